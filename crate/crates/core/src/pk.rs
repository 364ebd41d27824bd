//! Survival curves from the compound-geometric (Pollaczek–Hinchin) series
//! `θ = (1 − ρ) Σ ρⁿ G^{(n+1)*} * H^{n*}` on a uniform grid.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::models::RiskModel;
use crate::transforms;

/// CDF samples at `0, h, 2h, …, x_max` together with the mass at zero.
#[derive(Debug, Clone, PartialEq)]
pub struct DistributionGrid {
    pub x_max: f64,
    pub h: f64,
    pub values: Vec<f64>,
    pub atom0: f64,
}

impl DistributionGrid {
    /// Number of grid cells; there are `cells() + 1` nodes.
    pub fn cells(&self) -> usize {
        self.values.len() - 1
    }

    pub fn x(&self, k: usize) -> f64 {
        k as f64 * self.h
    }

    /// Piecewise-linear interpolation, constant beyond `x_max`.
    pub fn value_at(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return if x < 0.0 { 0.0 } else { self.values[0] };
        }
        let pos = x / self.h;
        let k = pos.floor() as usize;
        if k >= self.cells() {
            return self.values[self.cells()];
        }
        let t = pos - k as f64;
        self.values[k] + t * (self.values[k + 1] - self.values[k])
    }

    /// Largest absolute difference over the common nodes.
    pub fn sup_distance(&self, other: &DistributionGrid) -> Result<f64> {
        check_compatible(self, other)?;
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max))
    }

    /// Point mass at zero, the identity for [`convolve`].
    pub fn step_at_zero(x_max: f64, h: f64) -> Result<Self> {
        grid_from_cdf(|_| 1.0, x_max, h)
    }

    pub fn nodes(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.values.iter().enumerate().map(|(k, &v)| (self.x(k), v))
    }
}

fn cell_count(x_max: f64, h: f64) -> Result<usize> {
    if !(h > 0.0 && h.is_finite()) || !(x_max >= h && x_max.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "grid needs h > 0 and x_max >= h, got h = {h}, x_max = {x_max}"
        )));
    }
    let n = (x_max / h).round();
    if n > 1e8 {
        return Err(Error::InvalidArgument(format!("grid with {n} cells is too large")));
    }
    Ok(n as usize)
}

/// Samples a CDF on the grid, clamping to `[0, 1]` and enforcing monotonicity.
pub fn grid_from_cdf<F: Fn(f64) -> f64>(f: F, x_max: f64, h: f64) -> Result<DistributionGrid> {
    try_grid_from_cdf(|x| Ok(f(x)), x_max, h)
}

pub fn try_grid_from_cdf<F: Fn(f64) -> Result<f64>>(
    f: F,
    x_max: f64,
    h: f64,
) -> Result<DistributionGrid> {
    let n = cell_count(x_max, h)?;
    let mut values = Vec::with_capacity(n + 1);
    let mut running: f64 = 0.0;
    for k in 0..=n {
        let v = f(k as f64 * h)?;
        if !v.is_finite() {
            return Err(Error::Numerical(format!("CDF is not finite at x = {}", k as f64 * h)));
        }
        running = running.max(v.clamp(0.0, 1.0));
        values.push(running);
    }
    Ok(DistributionGrid {
        x_max: n as f64 * h,
        h,
        atom0: values[0],
        values,
    })
}

fn check_compatible(a: &DistributionGrid, b: &DistributionGrid) -> Result<()> {
    let same_h = (a.h - b.h).abs() <= 1e-12 * a.h.max(b.h);
    if !same_h || a.values.len() != b.values.len() {
        return Err(Error::GridMismatch(format!(
            "grids differ: (h = {}, {} nodes) vs (h = {}, {} nodes)",
            a.h,
            a.values.len(),
            b.h,
            b.values.len()
        )));
    }
    Ok(())
}

/// A finite measure on the grid: mass at zero plus masses of the cells
/// `(x_{k−1}, x_k]`, each spread uniformly over its cell.
#[derive(Debug, Clone)]
struct GridMeasure {
    atom: f64,
    // cells[0] is unused so that cells[k] is the mass of cell k.
    cells: Vec<f64>,
}

impl GridMeasure {
    fn from_grid(g: &DistributionGrid) -> Self {
        let mut cells = vec![0.0; g.values.len()];
        for (cell, w) in cells[1..].iter_mut().zip(g.values.windows(2)) {
            *cell = w[1] - w[0];
        }
        Self {
            atom: g.values[0],
            cells,
        }
    }

    fn dirac(cells: usize) -> Self {
        Self {
            atom: 1.0,
            cells: vec![0.0; cells + 1],
        }
    }

    fn is_dirac(&self) -> bool {
        self.cells.iter().all(|&m| m == 0.0)
    }

    fn scale(&mut self, s: f64) {
        self.atom *= s;
        self.cells.iter_mut().for_each(|m| *m *= s);
    }

    fn add_dirac(&mut self) {
        self.atom += 1.0;
    }

    /// Measure of the sum. Two uniform cells `i`, `j` sum to a triangle
    /// split evenly between cells `i + j − 1` and `i + j`.
    fn convolve(&self, other: &GridMeasure) -> GridMeasure {
        let n = self.cells.len() - 1;
        if self.is_dirac() {
            let mut out = other.clone();
            out.scale(self.atom);
            return out;
        }
        if other.is_dirac() {
            let mut out = self.clone();
            out.scale(other.atom);
            return out;
        }
        let a = &self.cells;
        let b_rev: Vec<f64> = other.cells.iter().rev().copied().collect();
        // pair[m] = Σ_{i+j=m, i,j ≥ 1} a_i b_j for m = 0..=n+1
        let pair: Vec<f64> = (0..=n + 1)
            .into_par_iter()
            .map(|m| {
                if m < 2 {
                    return 0.0;
                }
                let lo = 1.max(m.saturating_sub(n));
                let hi = (m - 1).min(n);
                if lo > hi {
                    return 0.0;
                }
                // b_j with j = m − i lives at b_rev[n − m + i]
                let off = n + lo - m;
                a[lo..=hi]
                    .iter()
                    .zip(&b_rev[off..=off + (hi - lo)])
                    .fold(0.0, |s, (x, y)| s + x * y)
            })
            .collect();
        let mut cells = vec![0.0; n + 1];
        for k in 1..=n {
            cells[k] = self.atom * other.cells[k] + other.atom * a[k] + 0.5 * (pair[k] + pair[k + 1]);
        }
        GridMeasure {
            atom: self.atom * other.atom,
            cells,
        }
    }

    fn into_grid(self, x_max: f64, h: f64) -> DistributionGrid {
        let mut values = Vec::with_capacity(self.cells.len());
        let mut acc = self.atom;
        values.push(acc);
        for &m in &self.cells[1..] {
            acc += m;
            values.push(acc);
        }
        DistributionGrid {
            x_max,
            h,
            atom0: self.atom,
            values,
        }
    }
}

/// CDF of the sum of independent draws from `a` and `b`.
pub fn convolve(a: &DistributionGrid, b: &DistributionGrid) -> Result<DistributionGrid> {
    check_compatible(a, b)?;
    let out = GridMeasure::from_grid(a).convolve(&GridMeasure::from_grid(b));
    Ok(out.into_grid(a.x_max, a.h))
}

/// Series length `N = ⌈ln tol / ln ρ⌉`.
pub fn truncation_index(rho: f64, tol: f64) -> Result<usize> {
    if !(tol > 0.0 && tol < 1.0) {
        return Err(Error::InvalidArgument(format!("tolerance must lie in (0, 1), got {tol}")));
    }
    Ok((tol.ln() / rho.ln()).ceil().max(0.0) as usize)
}

/// `θ` on `{0, h, …, x_max}` with the series truncated to `N` terms, see
/// [`truncation_index`].
pub fn pk_survival(model: &RiskModel, x_max: f64, h: f64, tol: f64) -> Result<DistributionGrid> {
    let terms = truncation_index(model.rho(), tol)?;
    pk_survival_terms(model, x_max, h, terms)
}

/// `θ` from the first `terms + 1` summands of the series.
pub fn pk_survival_terms(model: &RiskModel, x_max: f64, h: f64, terms: usize) -> Result<DistributionGrid> {
    let n = cell_count(x_max, h)?;
    let rho = model.rho();
    let g = try_grid_from_cdf(|x| transforms::G_cdf(model, x), x_max, h)?;
    let claim = *model.claim();
    let h_grid = grid_from_cdf(|x| claim.integrated_tail_cdf(x), x_max, h)?;

    let g = GridMeasure::from_grid(&g);
    let kernel = g.convolve(&GridMeasure::from_grid(&h_grid));
    // Horner: S ← δ + ρ (K * S), starting from S = δ.
    let mut acc = GridMeasure::dirac(n);
    for _ in 0..terms {
        acc = kernel.convolve(&acc);
        acc.scale(rho);
        acc.add_dirac();
    }
    let mut theta = g.convolve(&acc);
    theta.scale(1.0 - rho);
    let mut grid = theta.into_grid(n as f64 * h, h);
    let mut running: f64 = 0.0;
    for v in grid.values.iter_mut() {
        running = running.max(v.clamp(0.0, 1.0));
        *v = running;
    }
    grid.atom0 = grid.values[0];
    log::debug!("pk series: {terms} terms on {n} cells");
    Ok(grid)
}

/// `(x_max, h)` with `θ(x_max) ≥ 1 − 10·tol` according to the inversion route and `h = 10⁻³·x_max`.
pub fn default_grid(model: &RiskModel, tol: f64) -> Result<(f64, f64)> {
    let target = 1.0 - 10.0 * tol;
    let mut x_max = 1.0;
    for _ in 0..60 {
        if transforms::survival_by_inversion(model, x_max)? >= target {
            return Ok((x_max, 1e-3 * x_max));
        }
        x_max *= 2.0;
    }
    Err(Error::Numerical(format!(
        "survival curve did not reach {target} below x = {x_max}"
    )))
}

/// `θ(x) = 1 − ρ e^{−r(1−ρ)x}` for exponential claims of rate `r`.
pub fn classical_survival_exact(c: f64, lambda: f64, claim_rate: f64, x: f64) -> Result<f64> {
    let mean_rate = lambda / claim_rate;
    if !(c > mean_rate) {
        return Err(Error::NetProfit {
            premium: c,
            claim_mean: mean_rate,
        });
    }
    if x < 0.0 {
        return Ok(0.0);
    }
    let rho = mean_rate / c;
    Ok(1.0 - rho * (-claim_rate * (1.0 - rho) * x).exp())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{ClaimModel, JumpLaw, PerturbationModel};

    fn exp_cdf(rate: f64) -> impl Fn(f64) -> f64 {
        move |x| -(-rate * x).exp_m1()
    }

    fn m1() -> RiskModel {
        let claims = ClaimModel::CompoundPoisson {
            rate: 1.0,
            jump: JumpLaw::Exponential { rate: 1.0 },
        };
        RiskModel::new(2.0, claims, PerturbationModel::none()).unwrap()
    }

    #[test]
    fn step_grid() {
        let g = DistributionGrid::step_at_zero(1.0, 0.1).unwrap();
        assert!(g.values.iter().all(|&v| v == 1.0));
        assert_eq!(g.atom0, 1.0);
        assert_eq!(g.cells(), 10);
    }

    #[test]
    fn exponential_grid() {
        let g = grid_from_cdf(exp_cdf(1.0), 10.0, 0.01).unwrap();
        assert!((g.values[100] - (1.0 - (-1.0f64).exp())).abs() < 1e-15);
        assert_eq!(g.atom0, 0.0);
    }

    #[test]
    fn integrated_tail_grid_matches_exponential() {
        let claim = *m1().claim();
        let a = grid_from_cdf(|x| claim.integrated_tail_cdf(x), 10.0, 0.01).unwrap();
        let b = grid_from_cdf(exp_cdf(1.0), 10.0, 0.01).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn grid_rejects_bad_steps() {
        assert!(grid_from_cdf(exp_cdf(1.0), 1.0, 0.0).is_err());
        assert!(grid_from_cdf(exp_cdf(1.0), 0.05, 0.1).is_err());
    }

    #[test]
    fn grid_enforces_monotone_bounds() {
        let g = grid_from_cdf(|x| if x > 0.5 { 0.2 } else { 1.5 * x - 0.1 }, 1.0, 0.1).unwrap();
        assert_eq!(g.values[0], 0.0);
        assert!(g.values.windows(2).all(|w| w[0] <= w[1]));
        assert!(g.values.iter().all(|&v| (0.0..=1.0).contains(&v)));
    }

    #[test]
    fn step_is_identity() {
        let step = DistributionGrid::step_at_zero(10.0, 0.01).unwrap();
        let e = grid_from_cdf(exp_cdf(2.0), 10.0, 0.01).unwrap();
        assert_eq!(convolve(&step, &e).unwrap(), e);
        assert_eq!(convolve(&e, &step).unwrap(), e);
    }

    #[test]
    fn erlang_from_two_exponentials() {
        let h = 0.01;
        let e = grid_from_cdf(exp_cdf(1.0), 10.0, h).unwrap();
        let erlang = convolve(&e, &e).unwrap();
        let want = 1.0 - 2.0 * (-1.0f64).exp();
        assert!((erlang.values[100] - want).abs() < 2.0 * h);
        for (x, v) in erlang.nodes() {
            let exact = 1.0 - (1.0 + x) * (-x).exp();
            assert!((v - exact).abs() < 1e-4, "x = {x}: {v} vs {exact}");
        }
    }

    #[test]
    fn convolution_with_atoms() {
        // (½δ₀ + ½Exp(1)) * (½δ₀ + ½Exp(1)) at x = 1
        let mixed = grid_from_cdf(|x| 0.5 + 0.5 * exp_cdf(1.0)(x), 5.0, 0.001).unwrap();
        let s = convolve(&mixed, &mixed).unwrap();
        assert!((s.atom0 - 0.25).abs() < 1e-15);
        let x = 1.0f64;
        let want = 0.25 + 0.5 * (1.0 - (-x).exp()) + 0.25 * (1.0 - (1.0 + x) * (-x).exp());
        assert!((s.values[1000] - want).abs() < 1e-6);
    }

    #[test]
    fn mismatched_grids_rejected() {
        let a = grid_from_cdf(exp_cdf(1.0), 1.0, 0.1).unwrap();
        let b = grid_from_cdf(exp_cdf(1.0), 1.0, 0.05).unwrap();
        assert!(matches!(convolve(&a, &b), Err(Error::GridMismatch(_))));
    }

    #[test]
    fn classical_examples() {
        assert_eq!(classical_survival_exact(2.0, 1.0, 1.0, 0.0).unwrap(), 0.5);
        let want = 1.0 - 0.5 * (-1.0f64).exp();
        assert!((classical_survival_exact(2.0, 1.0, 1.0, 2.0).unwrap() - want).abs() < 1e-15);
        assert!((classical_survival_exact(2.0, 1.0, 1.0, 1e3).unwrap() - 1.0).abs() < 1e-15);
        assert!(classical_survival_exact(1.0, 1.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn pk_m1_coarse() {
        let grid = pk_survival(&m1(), 10.0, 0.01, 1e-8).unwrap();
        assert_eq!(grid.values[0], 0.5);
        assert!((grid.value_at(2.0) - 0.816_060_279_414_278_8).abs() < 1e-3);
    }

    #[test]
    fn truncation_index_bound() {
        let n = truncation_index(0.5, 1e-8).unwrap();
        assert_eq!(n, 27);
        assert!(0.5f64.powi(n as i32) <= 1e-8);
        assert!(truncation_index(0.5, 1.0).is_err());
    }
}
