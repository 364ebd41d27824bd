//! Monte Carlo simulation of the risk process and its dual `X̂ = −X`.
//!
//! Claim arrivals and perturbation jumps are event driven. Brownian motion is
//! sampled exactly at event times, and its supremum between events is drawn
//! from the conditional bridge law, so suprema carry no discretization bias.
//! Stable components and exact Gamma increments need the `dt` grid; between
//! grid nodes they are treated as linear.

mod jumps;
mod rng;
mod stable;
mod walker;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use jumps::{sample_jump, GammaBigJumps};
pub use rng::{Component, Family, StreamFactory};
pub use stable::StableIncrements;

use crate::error::{Error, Result};
use crate::models::RiskModel;
use walker::{walk, Flow, Observer, Plan, Segment};

/// Horizon used by [`PathConfig::for_model`], in units of `1/d`.
pub const DEFAULT_HORIZON_DRIFTS: f64 = 40.0;
pub const DEFAULT_DT: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PathConfig {
    pub horizon: f64,
    pub dt: f64,
    /// Gamma-claim jumps below this size are replaced by their mean drift;
    /// zero means exact Gamma increments on the `dt` grid.
    #[serde(default)]
    pub small_jump_cutoff: f64,
    pub seed: u64,
    pub n_paths: usize,
}

impl PathConfig {
    /// `T = 40/d`, `dt = 10⁻³`, no small-jump cutoff.
    pub fn for_model(model: &RiskModel, seed: u64, n_paths: usize) -> Self {
        Self {
            horizon: DEFAULT_HORIZON_DRIFTS / model.drift(),
            dt: DEFAULT_DT,
            small_jump_cutoff: 0.0,
            seed,
            n_paths,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = self.horizon.is_finite()
            && self.horizon > 0.0
            && self.dt > 0.0
            && self.dt <= self.horizon
            && self.small_jump_cutoff >= 0.0
            && self.small_jump_cutoff.is_finite();
        if !ok {
            return Err(Error::InvalidArgument(format!(
                "path config needs T > 0, 0 < dt <= T and cutoff >= 0; got T = {}, dt = {}, cutoff = {}",
                self.horizon, self.dt, self.small_jump_cutoff
            )));
        }
        if self.n_paths == 0 {
            return Err(Error::InvalidArgument("n_paths must be positive".into()));
        }
        Ok(())
    }

    pub fn with_horizon(self, horizon: f64) -> Self {
        Self { horizon, ..self }
    }

    pub fn with_seed(self, seed: u64) -> Self {
        Self { seed, ..self }
    }

    pub fn with_paths(self, n_paths: usize) -> Self {
        Self { n_paths, ..self }
    }
}

/// Modified ladder data of one path of the dual process.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LadderRecord {
    /// `σ₁ < σ₂ < …` within the horizon.
    pub sigma_times: Vec<f64>,
    /// Supremum increments `L₀, …, L_N`; `L_N` runs to the horizon.
    pub pre_suprema: Vec<f64>,
    /// Overshoots `J₁, …, J_N`.
    pub overshoots: Vec<f64>,
    #[serde(rename = "N")]
    pub n: usize,
    /// `Ŝ(T)`.
    pub sup_final: f64,
}

impl LadderRecord {
    /// `Ŝ(T)` minus the sum of all recorded increments.
    pub fn decomposition_residual(&self) -> f64 {
        let total: f64 = self.pre_suprema.iter().sum::<f64>() + self.overshoots.iter().sum::<f64>();
        self.sup_final - total
    }

    pub fn is_strictly_ordered(&self) -> bool {
        self.sigma_times.windows(2).all(|w| w[0] < w[1])
    }

    /// Structural invariants of a single record.
    pub fn check_invariants(&self, tol: f64) -> std::result::Result<(), String> {
        if self.sigma_times.len() != self.n
            || self.overshoots.len() != self.n
            || self.pre_suprema.len() != self.n + 1
        {
            return Err(format!(
                "inconsistent lengths: N = {}, {} epochs, {} overshoots, {} increments",
                self.n,
                self.sigma_times.len(),
                self.overshoots.len(),
                self.pre_suprema.len()
            ));
        }
        if !self.is_strictly_ordered() {
            return Err("ladder epochs are not strictly increasing".into());
        }
        if self.overshoots.iter().any(|&j| !(j > 0.0)) {
            return Err("non-positive overshoot".into());
        }
        if self.pre_suprema.iter().any(|&l| !(l >= 0.0)) {
            return Err("negative supremum increment".into());
        }
        let residual = self.decomposition_residual();
        if residual.abs() > tol {
            return Err(format!("decomposition residual {residual:e} exceeds {tol:e}"));
        }
        Ok(())
    }
}

/// Ladder bookkeeping for the dual process: the running supremum `Ŝ`, the
/// level at the last epoch and the record built so far.
#[derive(Debug, Clone)]
pub struct LadderTracker {
    sup: f64,
    level: f64,
    record: LadderRecord,
}

impl Default for LadderTracker {
    fn default() -> Self {
        Self::new()
    }
}

impl LadderTracker {
    pub fn new() -> Self {
        Self {
            sup: 0.0,
            level: 0.0,
            record: LadderRecord {
                sigma_times: Vec::new(),
                pre_suprema: Vec::new(),
                overshoots: Vec::new(),
                n: 0,
                sup_final: 0.0,
            },
        }
    }

    /// Continuous motion (or a non-claim jump) reaching `value`.
    pub fn observe(&mut self, value: f64) {
        self.sup = self.sup.max(value);
    }

    pub fn supremum(&self) -> f64 {
        self.sup
    }

    /// A claim of `size` at `t` with `X̂(t−) = x_before`; returns whether it is a ladder epoch.
    pub fn claim(&mut self, t: f64, x_before: f64, size: f64) -> bool {
        let drawdown = self.sup - x_before;
        if size <= drawdown {
            return false;
        }
        self.record.sigma_times.push(t);
        self.record.pre_suprema.push(self.sup - self.level);
        self.record.overshoots.push(size - drawdown);
        self.record.n += 1;
        self.sup = x_before + size;
        self.level = self.sup;
        true
    }

    pub fn finish(mut self) -> LadderRecord {
        self.record.pre_suprema.push(self.sup - self.level);
        self.record.sup_final = self.sup;
        self.record
    }
}

struct LadderObserver(LadderTracker);

impl Observer for LadderObserver {
    fn segment(&mut self, seg: &Segment) -> Flow {
        self.0.observe(seg.max);
        Flow::Continue
    }

    fn claim(&mut self, t: f64, x_before: f64, size: f64) -> Flow {
        self.0.claim(t, x_before, size);
        Flow::Continue
    }

    fn perturbation_jump(&mut self, _t: f64, x_before: f64, size: f64) -> Flow {
        self.0.observe(x_before + size);
        Flow::Continue
    }
}

/// One node of a path skeleton of `X`: the value after any jump at `t`,
/// with the claim and perturbation jump sizes at `t` (zero when absent).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SkeletonNode {
    pub t: f64,
    pub x: f64,
    pub claim: f64,
    pub perturbation_jump: f64,
}

impl SkeletonNode {
    /// `X(t−)`.
    pub fn x_before(&self) -> f64 {
        self.x + self.claim + self.perturbation_jump
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathSkeleton {
    pub path_index: u64,
    pub nodes: Vec<SkeletonNode>,
}

impl PathSkeleton {
    pub fn final_value(&self) -> f64 {
        self.nodes.last().map_or(0.0, |n| n.x)
    }

    /// Ladder record of the skeleton, with the path linear between nodes.
    pub fn ladder_record(&self) -> LadderRecord {
        let mut tracker = LadderTracker::new();
        for node in &self.nodes {
            let before = -node.x_before();
            tracker.observe(before + node.perturbation_jump);
            tracker.observe(before);
            if node.claim > 0.0 {
                tracker.claim(node.t, before + node.perturbation_jump, node.claim);
            }
        }
        tracker.finish()
    }
}

struct SkeletonObserver(Vec<SkeletonNode>);

impl SkeletonObserver {
    fn last_at(&mut self, t: f64, x_hat: f64) -> &mut SkeletonNode {
        if self.0.last().is_none_or(|n| n.t != t) {
            self.0.push(SkeletonNode {
                t,
                x: -x_hat,
                claim: 0.0,
                perturbation_jump: 0.0,
            });
        }
        self.0.last_mut().expect("just pushed")
    }
}

impl Observer for SkeletonObserver {
    fn segment(&mut self, seg: &Segment) -> Flow {
        self.last_at(seg.t1, seg.x1);
        Flow::Continue
    }

    fn claim(&mut self, t: f64, x_before: f64, size: f64) -> Flow {
        let node = self.last_at(t, x_before);
        node.claim += size;
        node.x -= size;
        Flow::Continue
    }

    fn perturbation_jump(&mut self, t: f64, x_before: f64, size: f64) -> Flow {
        let node = self.last_at(t, x_before);
        node.perturbation_jump += size;
        node.x -= size;
        Flow::Continue
    }
}

/// Event skeleton of path `path_index`; continuous random components are
/// sampled on the `dt` grid merged with the event times.
pub fn sample_path(model: &RiskModel, cfg: &PathConfig, path_index: u64) -> Result<PathSkeleton> {
    cfg.validate()?;
    let mut plan = Plan::new(model, cfg);
    if !plan.is_linear() {
        plan = plan.with_grid();
    }
    let factory = plan.streams(cfg.seed);
    let mut obs = SkeletonObserver(vec![SkeletonNode {
        t: 0.0,
        x: 0.0,
        claim: 0.0,
        perturbation_jump: 0.0,
    }]);
    walk(&plan, cfg, &factory, path_index, &mut obs);
    Ok(PathSkeleton {
        path_index,
        nodes: obs.0,
    })
}

/// `X(T)` for every path.
pub fn sample_terminal_values(model: &RiskModel, cfg: &PathConfig) -> Result<Vec<f64>> {
    struct Terminal(f64);
    impl Observer for Terminal {
        fn segment(&mut self, _seg: &Segment) -> Flow {
            Flow::Continue
        }
        fn claim(&mut self, _t: f64, _x: f64, _s: f64) -> Flow {
            Flow::Continue
        }
        fn perturbation_jump(&mut self, _t: f64, _x: f64, _s: f64) -> Flow {
            Flow::Continue
        }
        fn finish(&mut self, _t: f64, x: f64) {
            self.0 = -x;
        }
    }
    cfg.validate()?;
    let plan = Plan::new(model, cfg);
    let factory = plan.streams(cfg.seed);
    Ok(map_paths(cfg, |i| {
        let mut obs = Terminal(0.0);
        walk(&plan, cfg, &factory, i, &mut obs);
        obs.0
    }))
}

fn map_paths<T: Send, F: Fn(u64) -> T + Sync + Send>(cfg: &PathConfig, f: F) -> Vec<T> {
    (0..cfg.n_paths as u64).into_par_iter().map(f).collect()
}

/// Monte Carlo ruin estimate with its binomial standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RuinEstimate {
    pub p_hat: f64,
    pub stderr: f64,
    pub n: usize,
    pub horizon: f64,
    /// Upper bound on the probability of ruin after the horizon, when the
    /// dual process has exponential moments.
    pub horizon_bias_bound: Option<f64>,
}

/// Chernoff bound `P(ruin after T) ≤ min_r e^{Tψ(−r) − rx}·d·r/(−ψ(−r))`
/// over `r` with `ψ(−r) < 0`.
pub fn horizon_bias_bound(model: &RiskModel, x: f64, horizon: f64) -> Option<f64> {
    let d = model.drift();
    let bound = |r: f64| -> Option<f64> {
        let k = model.dual_cumulant(r)?;
        (k < 0.0).then(|| (horizon * k - r * x).exp() * d * r / (-k))
    };
    // Search r on a geometric grid up to where the cumulant turns positive.
    let mut best: Option<f64> = None;
    let mut r = 1e-6;
    while r < 1e6 {
        match bound(r) {
            Some(b) => best = Some(best.map_or(b, |v: f64| v.min(b))),
            None if best.is_some() => break,
            None => {}
        }
        r *= 1.01;
    }
    best.map(|b| b.min(1.0))
}

struct RuinObserver {
    level: f64,
    ruined: bool,
}

impl Observer for RuinObserver {
    fn segment(&mut self, seg: &Segment) -> Flow {
        self.check(seg.max)
    }

    fn claim(&mut self, _t: f64, x_before: f64, size: f64) -> Flow {
        self.check(x_before + size)
    }

    fn perturbation_jump(&mut self, _t: f64, x_before: f64, size: f64) -> Flow {
        self.check(x_before + size)
    }
}

impl RuinObserver {
    fn check(&mut self, value: f64) -> Flow {
        if value > self.level {
            self.ruined = true;
            Flow::Stop
        } else {
            Flow::Continue
        }
    }
}

/// Fraction of paths with `inf_{t ≤ T} X(t) < −x`.
pub fn estimate_ruin(model: &RiskModel, x: f64, cfg: &PathConfig) -> Result<RuinEstimate> {
    if !(x >= 0.0) {
        return Err(Error::InvalidArgument(format!("ruin level must be >= 0, got {x}")));
    }
    cfg.validate()?;
    let plan = Plan::new(model, cfg);
    let factory = plan.streams(cfg.seed);
    let hits = map_paths(cfg, |i| {
        let mut obs = RuinObserver {
            level: x,
            ruined: false,
        };
        walk(&plan, cfg, &factory, i, &mut obs);
        obs.ruined
    });
    let n = hits.len();
    let p_hat = hits.iter().filter(|&&h| h).count() as f64 / n as f64;
    Ok(RuinEstimate {
        p_hat,
        stderr: (p_hat * (1.0 - p_hat) / n as f64).sqrt(),
        n,
        horizon: cfg.horizon,
        horizon_bias_bound: horizon_bias_bound(model, x, cfg.horizon),
    })
}

fn require_finite_activity(model: &RiskModel, what: &str) -> Result<()> {
    if model.claim().is_finite_activity() {
        Ok(())
    } else {
        Err(Error::Unsupported(format!(
            "{what} needs compound Poisson claims; ladder epochs of Gamma claims are not enumerable"
        )))
    }
}

/// Modified ladder records of `cfg.n_paths` dual paths.
pub fn simulate_ladder(model: &RiskModel, cfg: &PathConfig) -> Result<Vec<LadderRecord>> {
    require_finite_activity(model, "ladder simulation")?;
    cfg.validate()?;
    let plan = Plan::new(model, cfg);
    let factory = plan.streams(cfg.seed);
    Ok(map_paths(cfg, |i| {
        let mut obs = LadderObserver(LadderTracker::new());
        walk(&plan, cfg, &factory, i, &mut obs);
        obs.0.finish()
    }))
}

struct SupObserver {
    sup: f64,
    min: f64,
    last: f64,
}

impl Observer for SupObserver {
    fn segment(&mut self, seg: &Segment) -> Flow {
        self.sup = self.sup.max(seg.max);
        self.min = self.min.min(seg.min);
        Flow::Continue
    }

    fn claim(&mut self, _t: f64, x_before: f64, size: f64) -> Flow {
        self.sup = self.sup.max(x_before + size);
        Flow::Continue
    }

    fn perturbation_jump(&mut self, _t: f64, x_before: f64, size: f64) -> Flow {
        self.sup = self.sup.max(x_before + size);
        Flow::Continue
    }

    fn finish(&mut self, _t: f64, x: f64) {
        self.last = x;
    }
}

fn run_sup(plan: &Plan, cfg: &PathConfig) -> Vec<SupObserver> {
    let factory = plan.streams(cfg.seed);
    map_paths(cfg, |i| {
        let mut obs = SupObserver {
            sup: 0.0,
            min: 0.0,
            last: 0.0,
        };
        walk(plan, cfg, &factory, i, &mut obs);
        obs
    })
}

/// `sup_{t ≤ T}(−ct − Z(t))` per path, from streams independent of the
/// ladder runs under the same seed.
pub fn sample_sup_y(model: &RiskModel, cfg: &PathConfig) -> Result<Vec<f64>> {
    cfg.validate()?;
    if model.perturbation().is_zero() {
        return Ok(vec![0.0; cfg.n_paths]);
    }
    let plan = Plan::new(model, cfg)
        .without_claims()
        .in_family(Family::Independent);
    Ok(run_sup(&plan, cfg).into_iter().map(|o| o.sup).collect())
}

/// Drawdown `Ŝ(T) − X̂(T)` of the dual process per path.
pub fn sample_drawdown(model: &RiskModel, cfg: &PathConfig) -> Result<Vec<f64>> {
    cfg.validate()?;
    let plan = Plan::new(model, cfg);
    Ok(run_sup(&plan, cfg).into_iter().map(|o| o.sup - o.last).collect())
}

/// `S(T) = sup_{t ≤ T} X(t)` per path, from independent streams.
pub fn sample_running_sup(model: &RiskModel, cfg: &PathConfig) -> Result<Vec<f64>> {
    cfg.validate()?;
    let plan = Plan::new(model, cfg)
        .tracking_min()
        .in_family(Family::Independent);
    Ok(run_sup(&plan, cfg).into_iter().map(|o| -o.min).collect())
}

/// Occupation estimates for one `y` and several levels `x`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OccupationRun {
    pub y: f64,
    pub levels: Vec<f64>,
    pub estimates: Vec<f64>,
    pub stderrs: Vec<f64>,
    /// Monte Carlo estimate of `P(σ = ∞, τ̂_y = ∞)` at the horizon.
    pub survive_fraction: f64,
    pub n: usize,
}

struct OccupationObserver<'a> {
    levels: &'a [f64],
    y: f64,
    linear_slope: Option<f64>,
    sup: f64,
    times: Vec<f64>,
    stopped: bool,
}

impl OccupationObserver<'_> {
    fn stop(&mut self) -> Flow {
        self.stopped = true;
        Flow::Stop
    }
}

impl Observer for OccupationObserver<'_> {
    fn segment(&mut self, seg: &Segment) -> Flow {
        let tau = seg.t1 - seg.t0;
        let d0 = self.sup - seg.x0;
        match self.linear_slope {
            // The drawdown grows linearly at rate −slope while X̂ falls.
            Some(slope) => {
                let rate = -slope;
                for (acc, &x) in self.times.iter_mut().zip(self.levels) {
                    *acc += ((x - d0) / rate).clamp(0.0, tau);
                }
            }
            None => {
                let sup1 = self.sup.max(seg.max);
                let d1 = sup1 - seg.x1;
                for (acc, &x) in self.times.iter_mut().zip(self.levels) {
                    let inside = (d0 <= x) as u8 + (d1 <= x) as u8;
                    *acc += 0.5 * tau * inside as f64;
                }
            }
        }
        self.sup = self.sup.max(seg.max);
        if self.sup > self.y {
            return self.stop();
        }
        Flow::Continue
    }

    fn claim(&mut self, _t: f64, x_before: f64, size: f64) -> Flow {
        if size > self.sup - x_before {
            return self.stop();
        }
        Flow::Continue
    }

    fn perturbation_jump(&mut self, _t: f64, x_before: f64, size: f64) -> Flow {
        self.sup = self.sup.max(x_before + size);
        if self.sup > self.y {
            return self.stop();
        }
        Flow::Continue
    }
}

/// `E ∫₀^{σ∧τ̂_y∧T} 1{Ŝ(t) − X̂(t) ≤ x} dt` for each `x` in `levels`.
///
/// With a linear continuous part the integral is exact per path; otherwise
/// the indicator is integrated by the trapezoid rule on the `dt` grid.
pub fn occupation_statistics(
    model: &RiskModel,
    levels: &[f64],
    y: f64,
    cfg: &PathConfig,
) -> Result<OccupationRun> {
    require_finite_activity(model, "occupation statistics")?;
    cfg.validate()?;
    if levels.iter().any(|&x| !(x >= 0.0)) || !(y > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "occupation needs levels x >= 0 and y > 0, got {levels:?}, y = {y}"
        )));
    }
    let mut plan = Plan::new(model, cfg);
    let linear_slope = plan.is_linear().then(|| plan.drift());
    if linear_slope.is_none() {
        plan = plan.with_grid();
    }
    let factory = plan.streams(cfg.seed);
    let per_path = map_paths(cfg, |i| {
        let mut obs = OccupationObserver {
            levels,
            y,
            linear_slope,
            sup: 0.0,
            times: vec![0.0; levels.len()],
            stopped: false,
        };
        walk(&plan, cfg, &factory, i, &mut obs);
        (obs.times, !obs.stopped)
    });
    let n = per_path.len() as f64;
    let mut estimates = Vec::with_capacity(levels.len());
    let mut stderrs = Vec::with_capacity(levels.len());
    for k in 0..levels.len() {
        let mean = per_path.iter().map(|(t, _)| t[k]).sum::<f64>() / n;
        let var = per_path.iter().map(|(t, _)| (t[k] - mean).powi(2)).sum::<f64>() / (n - 1.0).max(1.0);
        estimates.push(mean);
        stderrs.push((var / n).sqrt());
    }
    Ok(OccupationRun {
        y,
        levels: levels.to_vec(),
        estimates,
        stderrs,
        survive_fraction: per_path.iter().filter(|(_, s)| *s).count() as f64 / n,
        n: per_path.len(),
    })
}

/// Occupation estimate and standard error for a single level.
pub fn occupation_statistic(model: &RiskModel, x: f64, y: f64, cfg: &PathConfig) -> Result<(f64, f64)> {
    let run = occupation_statistics(model, &[x], y, cfg)?;
    Ok((run.estimates[0], run.stderrs[0]))
}
