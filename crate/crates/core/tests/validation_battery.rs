#![allow(clippy::neg_cmp_op_on_partial_ord)]
use ruinwerk::models::{ClaimModel, JumpLaw, PerturbationModel, RiskModel};
use ruinwerk::sim::{self, PathConfig};
use ruinwerk::validation::{self, BatteryOptions};

fn exp_claims() -> ClaimModel {
    ClaimModel::CompoundPoisson {
        rate: 1.0,
        jump: JumpLaw::Exponential { rate: 1.0 },
    }
}

fn m1() -> RiskModel {
    RiskModel::new(2.0, exp_claims(), PerturbationModel::none()).unwrap()
}

fn m2() -> RiskModel {
    RiskModel::new(2.0, exp_claims(), PerturbationModel::brownian(2.0)).unwrap()
}

#[test]
fn m1_battery_passes() {
    let model = m1();
    let cfg = PathConfig::for_model(&model, 11, 20_000);
    let reports = validation::run_battery(&model, &cfg, &BatteryOptions::default()).unwrap();
    for r in &reports {
        assert!(!r.is_gating_failure(), "{}", r.summary_line());
    }
}

#[test]
fn battery_is_reproducible() {
    let model = m1();
    let cfg = PathConfig::for_model(&model, 3, 5_000);
    let opts = BatteryOptions {
        occupation_levels: vec![],
        ruin_levels: vec![1.0],
        ..BatteryOptions::default()
    };
    let a = validation::run_battery(&model, &cfg, &opts).unwrap();
    let b = validation::run_battery(&model, &cfg, &opts).unwrap();
    assert_eq!(a, b);
}

#[test]
fn injected_dependence_fails_on_brownian_model() {
    let model = m2();
    let cfg = PathConfig::for_model(&model, 5, 10_000);
    let records = sim::simulate_ladder(&model, &cfg).unwrap();
    assert!(validation::check_independence(&records).unwrap().pass);
    let forced = validation::inject_dependence(&records);
    assert!(!validation::check_independence(&forced).unwrap().pass);
}

#[test]
fn raw_jump_control_detects_wrong_overshoot_law() {
    let claims = ClaimModel::CompoundPoisson {
        rate: 1.0,
        jump: JumpLaw::Deterministic { size: 1.0 },
    };
    let model = RiskModel::new(2.0, claims, PerturbationModel::none()).unwrap();
    let cfg = PathConfig::for_model(&model, 9, 10_000);
    let records = sim::simulate_ladder(&model, &cfg).unwrap();
    assert!(validation::check_overshoot_law(&records, &model).unwrap().pass);
    let raw = validation::replace_overshoots_with_jumps(&records, &model, 9).unwrap();
    assert!(!validation::check_overshoot_law(&raw, &model).unwrap().pass);
}

#[test]
fn raw_jump_control_is_consistent_for_exponential_claims() {
    let model = m1();
    let cfg = PathConfig::for_model(&model, 13, 10_000);
    let records = sim::simulate_ladder(&model, &cfg).unwrap();
    let raw = validation::replace_overshoots_with_jumps(&records, &model, 13).unwrap();
    assert!(validation::check_overshoot_law(&raw, &model).unwrap().pass);
}

#[test]
fn too_few_pre_suprema_is_an_error() {
    let model = m2();
    let cfg = PathConfig::for_model(&model, 1, 100);
    let records = sim::simulate_ladder(&model, &cfg).unwrap();
    let sup = sim::sample_sup_y(&model, &cfg).unwrap();
    assert!(validation::check_pre_supremum_law(&records, &sup, &model).is_err());
}

#[test]
fn reports_serialize_with_expected_fields() {
    let model = m1();
    let cfg = PathConfig::for_model(&model, 2, 2_000);
    let records = sim::simulate_ladder(&model, &cfg).unwrap();
    let report = validation::check_rho(&records, &model).unwrap();
    let json = serde_json::to_value(&report).unwrap();
    for key in ["name", "statistic", "threshold", "p_value", "pass", "n", "notes"] {
        assert!(json.get(key).is_some(), "missing {key}");
    }
}
