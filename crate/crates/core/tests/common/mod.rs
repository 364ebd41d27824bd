//! Shared proptest strategies over model parameters.
#![allow(dead_code)]

use proptest::prelude::*;
use ruinwerk::models::{ClaimModel, CompensatedJumps, JumpLaw, PerturbationModel, RiskModel, StableComponent};

pub fn jump_law(min_lomax_shape: f64) -> impl Strategy<Value = JumpLaw> {
    prop_oneof![
        (0.2..5.0f64).prop_map(|rate| JumpLaw::Exponential { rate }),
        (min_lomax_shape..6.0f64, 0.2..3.0f64).prop_map(|(shape, scale)| JumpLaw::Lomax { shape, scale }),
        (0.1..3.0f64).prop_map(|size| JumpLaw::Deterministic { size }),
    ]
}

pub fn claim_model(min_lomax_shape: f64) -> impl Strategy<Value = ClaimModel> {
    prop_oneof![
        (0.1..3.0f64, jump_law(min_lomax_shape)).prop_map(|(rate, jump)| ClaimModel::CompoundPoisson { rate, jump }),
        (0.1..3.0f64, 0.2..5.0f64).prop_map(|(shape, rate)| ClaimModel::Gamma { shape, rate }),
    ]
}

pub fn perturbation() -> impl Strategy<Value = PerturbationModel> {
    (
        prop_oneof![Just(0.0), 0.01..10.0f64],
        prop::option::of((1.05..1.95f64, 0.1..3.0f64)),
        prop::option::of((0.1..3.0f64, jump_law(1.5))),
    )
        .prop_map(|(gaussian_var, stable, ccp)| PerturbationModel {
            gaussian_var,
            stable: stable.map(|(alpha, scale)| StableComponent { alpha, scale }),
            ccp: ccp.map(|(rate, jump)| CompensatedJumps { rate, jump }),
        })
}

pub fn risk_model() -> impl Strategy<Value = RiskModel> {
    (claim_model(1.5), perturbation(), 1.05..4.0f64).prop_map(|(claim, pert, loading)| {
        RiskModel::new(loading * claim.mean(), claim, pert).expect("loaded premium satisfies net profit")
    })
}
