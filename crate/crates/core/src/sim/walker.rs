//! Path generation for the dual process `X̂ = −X`, reported to observers as
//! a sequence of continuous segments and jumps.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, Gamma, Open01, StandardNormal};

use super::jumps::{sample_jump, GammaBigJumps};
use super::rng::{Component, Family, StreamFactory};
use super::stable::StableIncrements;
use super::PathConfig;
use crate::models::{ClaimModel, JumpLaw, RiskModel};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Flow {
    Continue,
    Stop,
}

/// Continuous motion of `X̂` over `(t0, t1]`. `max` and `min` bound the
/// path on the segment; `min` is only filled in when the plan tracks it.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Segment {
    pub t0: f64,
    pub t1: f64,
    pub x0: f64,
    pub x1: f64,
    pub max: f64,
    pub min: f64,
}

pub(crate) trait Observer {
    fn segment(&mut self, seg: &Segment) -> Flow;
    /// A claim of `size` at time `t`, with `x_before = X̂(t−)`.
    fn claim(&mut self, t: f64, x_before: f64, size: f64) -> Flow;
    /// A jump of `−Z` (upwards in `X̂`).
    fn perturbation_jump(&mut self, t: f64, x_before: f64, size: f64) -> Flow;
    fn finish(&mut self, _t: f64, _x: f64) {}
}

#[derive(Debug, Clone)]
enum ClaimSource {
    Off,
    Poisson { rate: f64, jump: JumpLaw },
    GammaBig(GammaBigJumps),
    /// Exact Gamma increments per segment, treated as part of the continuous motion.
    GammaIncrements { shape: f64, rate: f64 },
}

#[derive(Debug, Clone)]
pub(crate) struct Plan {
    drift: f64,
    sd: f64,
    stable: Option<StableIncrements>,
    claims: ClaimSource,
    ccp: Option<(f64, JumpLaw)>,
    grid: bool,
    track_min: bool,
    family: Family,
}

impl Plan {
    pub fn new(model: &RiskModel, cfg: &PathConfig) -> Self {
        let pert = model.perturbation();
        let mut drift = -model.premium_rate();
        let claims = match *model.claim() {
            ClaimModel::CompoundPoisson { rate, jump } => ClaimSource::Poisson { rate, jump },
            ClaimModel::Gamma { shape, rate } if cfg.small_jump_cutoff > 0.0 => {
                let big = GammaBigJumps::new(shape, rate, cfg.small_jump_cutoff);
                drift += big.small_jump_drift;
                ClaimSource::GammaBig(big)
            }
            ClaimModel::Gamma { shape, rate } => ClaimSource::GammaIncrements { shape, rate },
        };
        let ccp = pert.jumps().map(|c| {
            drift -= c.drift();
            (c.rate, c.jump)
        });
        let stable = pert.stable.map(|s| StableIncrements::new(s.alpha, s.scale));
        let grid = stable.is_some() || matches!(claims, ClaimSource::GammaIncrements { .. });
        Self {
            drift,
            sd: pert.gaussian_sd(),
            stable,
            claims,
            ccp,
            grid,
            track_min: false,
            family: Family::Primary,
        }
    }

    pub fn without_claims(mut self) -> Self {
        if let ClaimSource::GammaBig(big) = &self.claims {
            self.drift -= big.small_jump_drift;
        }
        self.claims = ClaimSource::Off;
        self.grid = self.stable.is_some();
        self
    }

    pub fn with_grid(mut self) -> Self {
        self.grid = true;
        self
    }

    pub fn tracking_min(mut self) -> Self {
        self.track_min = true;
        self
    }

    pub fn in_family(mut self, family: Family) -> Self {
        self.family = family;
        self
    }

    /// Every continuous component is a deterministic drift.
    pub fn is_linear(&self) -> bool {
        self.sd == 0.0 && self.stable.is_none() && !matches!(self.claims, ClaimSource::GammaIncrements { .. })
    }

    pub fn streams(&self, seed: u64) -> StreamFactory {
        StreamFactory::new(seed, self.family)
    }

    /// Slope of `X̂` between jumps when [`Plan::is_linear`] holds.
    pub fn drift(&self) -> f64 {
        self.drift
    }
}

struct Streams {
    claims: ChaCha8Rng,
    brownian: ChaCha8Rng,
    stable: ChaCha8Rng,
    ccp: ChaCha8Rng,
    gamma: ChaCha8Rng,
}

fn exp_time<R: Rng + ?Sized>(rate: f64, rng: &mut R) -> f64 {
    let e: f64 = Exp1.sample(rng);
    e / rate
}

fn open01<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    Open01.sample(rng)
}

/// Runs path `path` of `plan` over `[0, cfg.horizon]`.
pub(crate) fn walk<O: Observer>(plan: &Plan, cfg: &PathConfig, factory: &StreamFactory, path: u64, obs: &mut O) {
    let mut rng = Streams {
        claims: factory.stream(path, Component::Claims),
        brownian: factory.stream(path, Component::Brownian),
        stable: factory.stream(path, Component::Stable),
        ccp: factory.stream(path, Component::PerturbationJumps),
        gamma: factory.stream(path, Component::GammaIncrements),
    };
    let horizon = cfg.horizon;
    let claim_rate = match &plan.claims {
        ClaimSource::Poisson { rate, .. } => Some(*rate),
        ClaimSource::GammaBig(big) => Some(big.rate),
        _ => None,
    };
    let mut next_claim = claim_rate.map_or(f64::INFINITY, |r| exp_time(r, &mut rng.claims));
    let mut next_ccp = plan
        .ccp
        .map_or(f64::INFINITY, |(r, _)| exp_time(r, &mut rng.ccp));
    let mut grid_index = 1u64;
    let mut next_grid = if plan.grid { cfg.dt } else { f64::INFINITY };

    let mut t = 0.0;
    let mut x = 0.0;
    loop {
        let t_next = next_claim.min(next_ccp).min(next_grid).min(horizon);
        let tau = t_next - t;
        if tau > 0.0 {
            let seg = advance(plan, t, t_next, x, &mut rng);
            x = seg.x1;
            if obs.segment(&seg) == Flow::Stop {
                return;
            }
        }
        t = t_next;
        if t >= horizon {
            break;
        }
        if t == next_claim {
            let size = match &plan.claims {
                ClaimSource::Poisson { jump, .. } => sample_jump(jump, &mut rng.claims),
                ClaimSource::GammaBig(big) => big.sample(&mut rng.claims),
                _ => unreachable!("only finite-rate claim streams schedule claims"),
            };
            let flow = obs.claim(t, x, size);
            x += size;
            next_claim = t + exp_time(claim_rate.expect("scheduled"), &mut rng.claims);
            if flow == Flow::Stop {
                return;
            }
        } else if t == next_ccp {
            let (rate, law) = plan.ccp.expect("scheduled");
            let size = sample_jump(&law, &mut rng.ccp);
            let flow = obs.perturbation_jump(t, x, size);
            x += size;
            next_ccp = t + exp_time(rate, &mut rng.ccp);
            if flow == Flow::Stop {
                return;
            }
        } else {
            grid_index += 1;
            next_grid = grid_index as f64 * cfg.dt;
        }
    }
    obs.finish(horizon, x);
}

fn advance(plan: &Plan, t0: f64, t1: f64, x0: f64, rng: &mut Streams) -> Segment {
    let tau = t1 - t0;
    let mut lin = plan.drift * tau;
    if let Some(st) = &plan.stable {
        lin += st.sample(tau, &mut rng.stable);
    }
    if let ClaimSource::GammaIncrements { shape, rate } = plan.claims {
        lin += Gamma::new(shape * tau, 1.0 / rate)
            .expect("positive gamma parameters")
            .sample(&mut rng.gamma);
    }
    if plan.sd == 0.0 {
        let x1 = x0 + lin;
        return Segment {
            t0,
            t1,
            x0,
            x1,
            max: x0.max(x1),
            min: x0.min(x1),
        };
    }
    let z: f64 = StandardNormal.sample(&mut rng.brownian);
    let x1 = x0 + lin + plan.sd * tau.sqrt() * z;
    let spread = 2.0 * plan.sd * plan.sd * tau;
    let gap = (x1 - x0) * (x1 - x0);
    // Extremes of a Brownian bridge from x0 to x1 by inversion of their laws.
    let max = 0.5 * (x0 + x1 + (gap - spread * open01(&mut rng.brownian).ln()).sqrt());
    let min = if plan.track_min {
        0.5 * (x0 + x1 - (gap - spread * open01(&mut rng.brownian).ln()).sqrt())
    } else {
        x0.min(x1)
    };
    Segment {
        t0,
        t1,
        x0,
        x1,
        max,
        min,
    }
}
