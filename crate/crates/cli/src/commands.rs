//! The four subcommands as functions from a configuration to file contents.

use log::info;
use ruinwerk::models::RiskModel;
use ruinwerk::sim::{self, LadderRecord, PathConfig};
use ruinwerk::validation::{self, CheckReport};
use ruinwerk::{pk, transforms};
use serde::Serialize;

use crate::config::RunConfig;
use crate::error::{CliError, CliResult};
use crate::output::{csv, fmt17};

/// Survival curve from the series and from transform inversion.
pub fn cmd_survival(cfg: &RunConfig) -> CliResult<String> {
    let s = &cfg.survival;
    if !(s.x_max > 0.0 && s.x_max.is_finite()) {
        return Err(CliError::Config(format!("survival.x_max must be positive, got {}", s.x_max)));
    }
    if !(s.output_step > 0.0) {
        return Err(CliError::Config(format!(
            "survival.output_step must be positive, got {}",
            s.output_step
        )));
    }
    info!("series on [0, {}] with h = {}, tol = {}", s.x_max, s.h, s.tol);
    let grid = pk::pk_survival(&cfg.model, s.x_max, s.h, s.tol)?;
    let rows = (s.x_max / s.output_step + 1e-9).floor() as usize;
    let mut out = Vec::with_capacity(rows + 1);
    for k in 0..=rows {
        let x = (k as f64 * s.output_step).min(s.x_max);
        let series = grid.value_at(x);
        let inversion = transforms::survival_by_inversion(&cfg.model, x)?;
        out.push(vec![
            fmt17(x),
            fmt17(series),
            fmt17(inversion),
            fmt17((series - inversion).abs()),
        ]);
    }
    Ok(csv(&["x", "theta_pk", "theta_inversion", "abs_diff"], out))
}

/// Exponent and transforms at each `β`, which must be positive.
pub fn cmd_transform(model: &RiskModel, betas: &[f64]) -> CliResult<String> {
    if betas.is_empty() {
        return Err(CliError::Config("no β values given".into()));
    }
    if let Some(b) = betas.iter().find(|b| !(**b > 0.0 && b.is_finite())) {
        return Err(CliError::Config(format!("β values must be positive and finite, got {b}")));
    }
    let rows = betas.iter().map(|&b| {
        vec![
            fmt17(b),
            fmt17(model.exponent(b)),
            fmt17(transforms::laplace_h(model, b)),
            fmt17(transforms::laplace_g(model, b)),
            fmt17(transforms::laplace_survival(model, b)),
            fmt17(transforms::ladder_exponent(model, b)),
        ]
    });
    Ok(csv(&["beta", "psi", "LH", "LG", "survival_transform", "kappa"], rows))
}

#[derive(Debug, Clone, Serialize)]
pub struct RuinSummary {
    pub x: f64,
    pub p_hat: f64,
    pub stderr: f64,
    pub horizon_bias_bound: Option<f64>,
    /// `1 − θ(x)` by transform inversion.
    pub analytic: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SimulationSummary {
    pub mode: &'static str,
    pub seed: u64,
    pub n_paths: usize,
    pub horizon: f64,
    pub dt: f64,
    pub rho: f64,
    pub drift: f64,
    pub fraction_with_epoch: Option<f64>,
    #[serde(rename = "mean_N")]
    pub mean_n: Option<f64>,
    #[serde(rename = "max_N")]
    pub max_n: Option<usize>,
    pub total_epochs: Option<usize>,
    pub ruin: Vec<RuinSummary>,
}

fn analytic_ruin(model: &RiskModel, x: f64) -> Option<f64> {
    transforms::survival_by_inversion(model, x).ok().map(|t| 1.0 - t)
}

fn ladder_csv(records: &[LadderRecord]) -> String {
    let rows = records.iter().enumerate().flat_map(|(p, r)| {
        (0..r.n).map(move |i| {
            vec![
                p.to_string(),
                (i + 1).to_string(),
                fmt17(r.sigma_times[i]),
                fmt17(r.pre_suprema[i]),
                fmt17(r.overshoots[i]),
            ]
        })
    });
    csv(&["path_id", "i", "sigma", "L", "J"], rows)
}

fn summary_base(cfg: &RunConfig, pc: &PathConfig, mode: &'static str) -> SimulationSummary {
    SimulationSummary {
        mode,
        seed: pc.seed,
        n_paths: pc.n_paths,
        horizon: pc.horizon,
        dt: pc.dt,
        rho: cfg.model.rho(),
        drift: cfg.model.drift(),
        fraction_with_epoch: None,
        mean_n: None,
        max_n: None,
        total_epochs: None,
        ruin: Vec::new(),
    }
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("summary serializes");
    s.push('\n');
    s
}

/// Ladder records as CSV plus a JSON summary. Finite-activity claims only.
pub fn cmd_simulate_ladder(cfg: &RunConfig) -> CliResult<(String, String)> {
    let pc = cfg.simulation.path_config(&cfg.model)?;
    info!("simulating {} ladder paths to T = {}", pc.n_paths, pc.horizon);
    let records = sim::simulate_ladder(&cfg.model, &pc)?;
    let n = records.len() as f64;
    let total: usize = records.iter().map(|r| r.n).sum();
    let mut summary = summary_base(cfg, &pc, "ladder");
    summary.fraction_with_epoch = Some(records.iter().filter(|r| r.n > 0).count() as f64 / n);
    summary.mean_n = Some(total as f64 / n);
    summary.max_n = records.iter().map(|r| r.n).max();
    summary.total_epochs = Some(total);
    summary.ruin = cfg
        .simulation
        .ruin_levels
        .iter()
        .map(|&x| {
            let p_hat = records.iter().filter(|r| r.sup_final > x).count() as f64 / n;
            RuinSummary {
                x,
                p_hat,
                stderr: (p_hat * (1.0 - p_hat) / n).sqrt(),
                horizon_bias_bound: sim::horizon_bias_bound(&cfg.model, x, pc.horizon),
                analytic: analytic_ruin(&cfg.model, x),
            }
        })
        .collect();
    Ok((ladder_csv(&records), to_json(&summary)))
}

/// Ruin frequencies per level as CSV plus a JSON summary; any claim model.
pub fn cmd_simulate_ruin(cfg: &RunConfig) -> CliResult<(String, String)> {
    let pc = cfg.simulation.path_config(&cfg.model)?;
    let mut summary = summary_base(cfg, &pc, "ruin");
    for &x in &cfg.simulation.ruin_levels {
        info!("ruin frequency at x = {x}");
        let est = sim::estimate_ruin(&cfg.model, x, &pc)?;
        summary.ruin.push(RuinSummary {
            x,
            p_hat: est.p_hat,
            stderr: est.stderr,
            horizon_bias_bound: est.horizon_bias_bound,
            analytic: analytic_ruin(&cfg.model, x),
        });
    }
    let rows = summary.ruin.iter().map(|r| {
        vec![
            fmt17(r.x),
            fmt17(r.p_hat),
            fmt17(r.stderr),
            r.horizon_bias_bound.map_or_else(String::new, fmt17),
        ]
    });
    let table = csv(&["x", "p_hat", "stderr", "horizon_bias_bound"], rows);
    Ok((table, to_json(&summary)))
}

#[derive(Debug, Clone, Serialize)]
pub struct ValidationReport {
    pub pass: bool,
    pub failed: usize,
    pub seed: u64,
    pub n_paths: usize,
    pub horizon: f64,
    pub dt: f64,
    pub inject_dependence: bool,
    pub checks: Vec<CheckReport>,
}

/// Full check battery. The report is returned even when checks fail.
pub fn cmd_validate(cfg: &RunConfig) -> CliResult<(ValidationReport, String)> {
    let pc = cfg.simulation.path_config(&cfg.model)?;
    info!("validation battery on {} paths", pc.n_paths);
    let checks = validation::run_battery(&cfg.model, &pc, &cfg.validation)?;
    for c in &checks {
        info!("{}", c.summary_line());
    }
    let failed = checks.iter().filter(|c| c.is_gating_failure()).count();
    let report = ValidationReport {
        pass: failed == 0,
        failed,
        seed: pc.seed,
        n_paths: pc.n_paths,
        horizon: pc.horizon,
        dt: pc.dt,
        inject_dependence: cfg.validation.inject_dependence,
        checks,
    };
    let json = to_json(&report);
    Ok((report, json))
}
