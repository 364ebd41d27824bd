//! Laplace-domain objects of the risk process and their numerical inversion.
//!
//! `G` is the law of `−inf_t Y(t)` with `Y(t) = ct + Z(t)`, `H` the integrated
//! tail law of the claims and `θ` the survival function.

mod inversion;

pub use inversion::{
    invert_laplace, stehfest_weights, Inversion, TransformFn, TransformKind, DEFAULT_STEHFEST_ORDER,
    DEFAULT_TALBOT_NODES, STEHFEST_ORDERS, TALBOT_NODES,
};

use num_complex::Complex64;
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};
use crate::models::RiskModel;

/// Inverted values are used only from this point on; below it the curve is
/// interpolated towards the analytic value at zero.
pub const INVERSION_MIN_X: f64 = 1e-3;

/// Largest series term tolerated by [`mittag_leffler_tail`]. Rounding in the
/// alternating sum grows like this term times about `1e-13`, so the cap keeps
/// the absolute error near `1e-9`.
pub const MITTAG_LEFFLER_MAX_TERM: f64 = 1e4;

/// Treat `Φ(α) − β` as zero below this multiple of `1 + β`.
const SINGULARITY_RTOL: f64 = 1e-6;

/// `LH(β) = Φ_C(β) / (EC(1)·β)`.
pub fn laplace_h(model: &RiskModel, beta: f64) -> f64 {
    if beta == 0.0 {
        return 1.0;
    }
    model.claim().exponent(beta) / (model.claim_mean() * beta)
}

/// `LG(β) = cβ / (cβ + ψ_Z(β))`.
pub fn laplace_g(model: &RiskModel, beta: f64) -> f64 {
    if beta == 0.0 {
        return 1.0;
    }
    let cb = model.premium_rate() * beta;
    cb / (cb + model.perturbation().exponent(beta))
}

/// `d/ψ(β) = ∫₀^∞ e^{−βx} θ(x) dx`.
pub fn laplace_survival(model: &RiskModel, beta: f64) -> f64 {
    model.drift() / model.exponent(beta)
}

/// Ladder height exponent `κ̂(β) = ψ(β)/β`, equal to `d` at the origin.
pub fn ladder_exponent(model: &RiskModel, beta: f64) -> f64 {
    model.exponent_over_beta(beta)
}

/// Bivariate ladder exponent `κ̂(α, β) = (α − ψ(β)) / (Φ(α) − β)`.
pub fn bivariate_ladder_exponent(model: &RiskModel, alpha: f64, beta: f64) -> Result<f64> {
    if !(alpha >= 0.0 && beta >= 0.0) || !alpha.is_finite() || !beta.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "ladder exponent needs finite alpha, beta >= 0, got ({alpha}, {beta})"
        )));
    }
    if alpha == 0.0 && beta == 0.0 {
        return Err(Error::InvalidArgument(
            "ladder exponent is undefined at alpha = beta = 0".into(),
        ));
    }
    let phi = model.exponent_inverse(alpha)?;
    let gap = phi - beta;
    if gap.abs() < SINGULARITY_RTOL * (1.0 + beta) {
        return Ok(model.exponent_derivative(beta));
    }
    Ok((alpha - model.exponent(beta)) / gap)
}

pub fn integrated_tail_transform(model: &RiskModel) -> TransformFn {
    let m = *model;
    let f = TransformFn::new(TransformKind::IntegratedTail, move |b| laplace_h(&m, b));
    match m.claim().exponent_complex(Complex64::new(1.0, 0.0)) {
        Some(_) => f.with_complex(move |s| {
            m.claim().exponent_complex(s).expect("checked above") / (m.claim_mean() * s)
        }),
        None => f,
    }
}

pub fn infimum_law_transform(model: &RiskModel) -> TransformFn {
    let m = *model;
    let f = TransformFn::new(TransformKind::InfimumLaw, move |b| laplace_g(&m, b));
    match m.perturbation().exponent_complex(Complex64::new(1.0, 0.0)) {
        Some(_) => f.with_complex(move |s| {
            let cs = m.premium_rate() * s;
            cs / (cs + m.perturbation().exponent_complex(s).expect("checked above"))
        }),
        None => f,
    }
}

/// `LG(β)/β`, the ordinary transform of `G`.
pub fn infimum_cdf_transform(model: &RiskModel) -> TransformFn {
    let m = *model;
    let c = m.premium_rate();
    let f = TransformFn::new(TransformKind::InfimumCdf, move |b| {
        c / (c * b + m.perturbation().exponent(b))
    });
    match m.perturbation().exponent_complex(Complex64::new(1.0, 0.0)) {
        Some(_) => f.with_complex(move |s| {
            c / (c * s + m.perturbation().exponent_complex(s).expect("checked above"))
        }),
        None => f,
    }
}

pub fn survival_transform(model: &RiskModel) -> TransformFn {
    let m = *model;
    let d = m.drift();
    let f = TransformFn::new(TransformKind::Survival, move |b| laplace_survival(&m, b));
    match m.exponent_complex(Complex64::new(1.0, 0.0)) {
        Some(_) => f.with_complex(move |s| d / m.exponent_complex(s).expect("checked above")),
        None => f,
    }
}

/// `G(0) = P(inf Y = 0)`: positive only when `Z` has bounded variation.
pub fn infimum_law_at_zero(model: &RiskModel) -> f64 {
    match model.perturbation().bounded_variation_drift() {
        Some(extra) => model.premium_rate() / (model.premium_rate() + extra),
        None => 0.0,
    }
}

/// `1 − G(x) = Σ (−c·x^{α−1})ⁿ / Γ(1 + (α−1)n)` summed directly, for
/// `α ∈ (1, 2]`.
///
/// For stable perturbations with general scale `q` pass `c/q` as `c`.
pub fn mittag_leffler_tail(c: f64, alpha: f64, x: f64) -> Result<f64> {
    if !(c > 0.0 && c.is_finite()) || !(alpha > 1.0 && alpha <= 2.0) || !(x >= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "Mittag-Leffler tail needs c > 0, alpha in (1, 2], x >= 0; got ({c}, {alpha}, {x})"
        )));
    }
    if x == 0.0 {
        return Ok(1.0);
    }
    let a = alpha - 1.0;
    let z = c * x.powf(a);
    let ln_z = z.ln();
    let mut sum = 1.0;
    let mut largest: f64 = 1.0;
    let mut n = 1usize;
    loop {
        let nf = n as f64;
        let mag = (nf * ln_z - ln_gamma(1.0 + a * nf)).exp();
        largest = largest.max(mag);
        if largest > MITTAG_LEFFLER_MAX_TERM {
            return Err(Error::Domain(format!(
                "Mittag-Leffler series at x = {x} has terms above {MITTAG_LEFFLER_MAX_TERM:e}"
            )));
        }
        sum += if n.is_multiple_of(2) { mag } else { -mag };
        // The term ratio z·Γ(1+an)/Γ(1+a(n+1)) decreases in n, so once terms
        // shrink they keep shrinking and the alternating remainder is bounded
        // by the next term.
        let next = ((nf + 1.0) * ln_z - ln_gamma(1.0 + a * (nf + 1.0))).exp();
        if next < mag && next <= 1e-17 {
            break;
        }
        n += 1;
        if n > 100_000 {
            return Err(Error::Numerical(format!(
                "Mittag-Leffler series at x = {x} did not converge"
            )));
        }
    }
    Ok(sum.clamp(0.0, 1.0))
}

/// Inverts `F` at `x > 0`, interpolating linearly to the analytic `value_at_zero`
/// below [`INVERSION_MIN_X`].
fn invert_cdf_like(f: &TransformFn, value_at_zero: f64, x: f64, method: Inversion) -> Result<f64> {
    if x == 0.0 {
        return Ok(value_at_zero);
    }
    if x < INVERSION_MIN_X {
        let edge = invert_laplace(f, INVERSION_MIN_X, method)?;
        return Ok(value_at_zero + (edge - value_at_zero) * x / INVERSION_MIN_X);
    }
    invert_laplace(f, x, method)
}

/// `G(x)`, the CDF of `sup_t(−ct − Z(t))`.
#[allow(non_snake_case)]
pub fn G_cdf(model: &RiskModel, x: f64) -> Result<f64> {
    if !(x >= 0.0) {
        return Err(Error::InvalidArgument(format!("G is evaluated at x >= 0, got {x}")));
    }
    let pert = model.perturbation();
    let c = model.premium_rate();
    if pert.is_zero() {
        return Ok(1.0);
    }
    if pert.is_pure_brownian() {
        return Ok(-(-2.0 * c * x / pert.gaussian_var).exp_m1());
    }
    if pert.is_pure_stable() {
        let stable = pert.stable.expect("pure stable");
        match mittag_leffler_tail(c / stable.scale, stable.alpha, x) {
            Ok(tail) => return Ok(1.0 - tail),
            Err(Error::Domain(msg)) => log::debug!("{msg}; falling back to inversion"),
            Err(e) => return Err(e),
        }
    }
    let f = infimum_cdf_transform(model);
    let method = f.default_inversion();
    Ok(invert_cdf_like(&f, infimum_law_at_zero(model), x, method)?.clamp(0.0, 1.0))
}

/// `θ(x)` by inversion of `d/ψ`, with the method chosen by [`TransformFn::default_inversion`].
pub fn survival_by_inversion(model: &RiskModel, x: f64) -> Result<f64> {
    let f = survival_transform(model);
    let method = f.default_inversion();
    survival_by_inversion_with(model, x, method)
}

pub fn survival_by_inversion_with(model: &RiskModel, x: f64, method: Inversion) -> Result<f64> {
    if !(x >= 0.0) {
        return Err(Error::InvalidArgument(format!("survival is evaluated at x >= 0, got {x}")));
    }
    let f = survival_transform(model);
    invert_cdf_like(&f, model.survival_at_zero(), x, method)
}
