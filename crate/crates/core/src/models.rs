//! Parametric claim subordinators, perturbations and the perturbed risk
//! process `X(t) = ct − C(t) + Z(t)` built from them.
//!
//! Every model value is validated at construction and immutable afterwards.
//! Laplace exponents follow the sign conventions
//! `E[e^{−βC(t)}] = e^{−tΦ_C(β)}` and `E[e^{βZ(t)}] = e^{tψ_Z(β)}`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{ensure, Error, Result};
use crate::quad::{self, Tolerance};
use crate::special::expint_scaled;

/// Law of an individual claim (or perturbation jump magnitude).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "params", rename_all = "snake_case")]
pub enum JumpLaw {
    Exponential { rate: f64 },
    /// Pareto type II: `P(Y > x) = (1 + x/scale)^{-shape}`.
    Lomax { shape: f64, scale: f64 },
    Deterministic { size: f64 },
}

impl JumpLaw {
    pub fn validate(&self) -> Result<()> {
        match *self {
            JumpLaw::Exponential { rate } => {
                ensure(rate.is_finite() && rate > 0.0, || {
                    format!("exponential jump rate must be positive and finite, got {rate}")
                })
            }
            JumpLaw::Lomax { shape, scale } => {
                ensure(shape.is_finite() && shape > 1.0, || {
                    format!("lomax shape must exceed 1 for a finite mean, got {shape}")
                })?;
                ensure(scale.is_finite() && scale > 0.0, || {
                    format!("lomax scale must be positive and finite, got {scale}")
                })
            }
            JumpLaw::Deterministic { size } => ensure(size.is_finite() && size > 0.0, || {
                format!("deterministic jump size must be positive and finite, got {size}")
            }),
        }
    }

    pub fn mean(&self) -> f64 {
        match *self {
            JumpLaw::Exponential { rate } => 1.0 / rate,
            JumpLaw::Lomax { shape, scale } => scale / (shape - 1.0),
            JumpLaw::Deterministic { size } => size,
        }
    }

    /// `P(Y > x)`.
    pub fn tail(&self, x: f64) -> f64 {
        if x < 0.0 {
            return 1.0;
        }
        match *self {
            JumpLaw::Exponential { rate } => (-rate * x).exp(),
            JumpLaw::Lomax { shape, scale } => (1.0 + x / scale).powf(-shape),
            JumpLaw::Deterministic { size } => {
                if x < size {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }

    /// Integrated tail (stationary excess) distribution `(1/EY) ∫₀^x P(Y > y) dy`.
    pub fn integrated_tail_cdf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        match *self {
            JumpLaw::Exponential { rate } => -(-rate * x).exp_m1(),
            JumpLaw::Lomax { shape, scale } => -((1.0 - shape) * (x / scale).ln_1p()).exp_m1(),
            JumpLaw::Deterministic { size } => (x / size).min(1.0),
        }
    }

    /// `E[e^{−βY}]` for `β ≥ 0`.
    pub fn laplace(&self, beta: f64) -> f64 {
        if beta == 0.0 {
            return 1.0;
        }
        match *self {
            JumpLaw::Exponential { rate } => rate / (rate + beta),
            JumpLaw::Lomax { shape, scale } => {
                let z = beta * scale;
                1.0 - z * expint_scaled(shape, z)
            }
            JumpLaw::Deterministic { size } => (-beta * size).exp(),
        }
    }

    /// `1 − E[e^{−βY}]` evaluated without cancellation for small `β`.
    pub fn laplace_complement(&self, beta: f64) -> f64 {
        match *self {
            JumpLaw::Exponential { rate } => beta / (rate + beta),
            JumpLaw::Lomax { shape, scale } => {
                let z = beta * scale;
                z * expint_scaled(shape, z)
            }
            JumpLaw::Deterministic { size } => -(-beta * size).exp_m1(),
        }
    }

    /// `E[Y e^{−βY}]`, the negated derivative of [`JumpLaw::laplace`].
    pub fn laplace_derivative(&self, beta: f64) -> f64 {
        match *self {
            JumpLaw::Exponential { rate } => rate / ((rate + beta) * (rate + beta)),
            JumpLaw::Lomax { shape, scale } => {
                if beta == 0.0 {
                    return self.mean();
                }
                let z = beta * scale;
                scale * shape * (expint_scaled(shape, z) - expint_scaled(shape + 1.0, z))
            }
            JumpLaw::Deterministic { size } => size * (-beta * size).exp(),
        }
    }

    /// Complex continuation of `E[e^{−sY}]`, offered only for laws whose
    /// derived distributions are smooth enough for contour inversion.
    pub fn laplace_complex(&self, s: Complex64) -> Option<Complex64> {
        match *self {
            JumpLaw::Exponential { rate } => Some(rate / (s + rate)),
            JumpLaw::Lomax { .. } | JumpLaw::Deterministic { .. } => None,
        }
    }

    /// `E[e^{rY}]` for `r ≥ 0`, `None` when infinite.
    pub fn mgf(&self, r: f64) -> Option<f64> {
        match *self {
            JumpLaw::Exponential { rate } => (r < rate).then(|| rate / (rate - r)),
            JumpLaw::Lomax { .. } => (r == 0.0).then_some(1.0),
            JumpLaw::Deterministic { size } => Some((r * size).exp()),
        }
    }

    /// Inverse-transform sample from a uniform `u ∈ (0, 1)`.
    pub fn quantile_upper(&self, u: f64) -> f64 {
        // u is the upper-tail probability, so this maps u ↦ inf{x : P(Y > x) ≤ u}.
        match *self {
            JumpLaw::Exponential { rate } => -u.ln() / rate,
            JumpLaw::Lomax { shape, scale } => scale * (u.powf(-1.0 / shape) - 1.0),
            JumpLaw::Deterministic { size } => size,
        }
    }
}

/// Cumulative claims: a driftless subordinator with finite mean.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "params", rename_all = "snake_case")]
pub enum ClaimModel {
    CompoundPoisson { rate: f64, jump: JumpLaw },
    /// Gamma process with Lévy density `shape · e^{−rate·x} / x`.
    Gamma { shape: f64, rate: f64 },
}

const TAIL_TOL: Tolerance = Tolerance::new(1e-12, 1e-13);

/// `E₁(u) = ∫_u^∞ e^{−t}/t dt` by adaptive quadrature.
fn exponential_integral_quad(u: f64) -> f64 {
    let upper = quad::integrate_to_infinity(|t| (-t).exp() / t, u.max(1.0), TAIL_TOL)
        .expect("E1 quadrature on [1, inf) converges");
    if u >= 1.0 {
        return upper;
    }
    // ∫_u^1 e^{−t}/t dt with t = e^w is smooth in w.
    let lower = quad::integrate(|w| (-w.exp()).exp(), u.ln(), 0.0, TAIL_TOL)
        .expect("E1 quadrature on [u, 1] converges");
    lower + upper
}

impl ClaimModel {
    pub fn validate(&self) -> Result<()> {
        match *self {
            ClaimModel::CompoundPoisson { rate, jump } => {
                ensure(rate.is_finite() && rate > 0.0, || {
                    format!("claim arrival rate must be positive and finite, got {rate}")
                })?;
                jump.validate()
            }
            ClaimModel::Gamma { shape, rate } => {
                ensure(shape.is_finite() && shape > 0.0, || {
                    format!("gamma claim shape must be positive and finite, got {shape}")
                })?;
                ensure(rate.is_finite() && rate > 0.0, || {
                    format!("gamma claim rate must be positive and finite, got {rate}")
                })
            }
        }
    }

    pub fn is_finite_activity(&self) -> bool {
        matches!(self, ClaimModel::CompoundPoisson { .. })
    }

    /// Laplace exponent `Φ_C(β) = ∫(1 − e^{−βx}) ν(dx)`.
    pub fn exponent(&self, beta: f64) -> f64 {
        match *self {
            ClaimModel::CompoundPoisson { rate, jump } => rate * jump.laplace_complement(beta),
            ClaimModel::Gamma { shape, rate } => shape * (beta / rate).ln_1p(),
        }
    }

    /// `Φ_C′(β) = ∫ x e^{−βx} ν(dx)`.
    pub fn exponent_derivative(&self, beta: f64) -> f64 {
        match *self {
            ClaimModel::CompoundPoisson { rate, jump } => rate * jump.laplace_derivative(beta),
            ClaimModel::Gamma { shape, rate } => shape / (rate + beta),
        }
    }

    pub fn exponent_complex(&self, s: Complex64) -> Option<Complex64> {
        match *self {
            ClaimModel::CompoundPoisson { rate, jump } => {
                jump.laplace_complex(s).map(|l| rate * (1.0 - l))
            }
            ClaimModel::Gamma { shape, rate } => Some(shape * (1.0 + s / rate).ln()),
        }
    }

    /// `Φ_C(−r)`, i.e. `−log E[e^{rC(1)}]`; `None` when the claim mgf diverges.
    pub fn exponent_at_negative(&self, r: f64) -> Option<f64> {
        match *self {
            ClaimModel::CompoundPoisson { rate, jump } => jump.mgf(r).map(|m| rate * (1.0 - m)),
            ClaimModel::Gamma { shape, rate } => (r < rate).then(|| shape * (-r / rate).ln_1p()),
        }
    }

    /// `EC(1) = ∫ x ν(dx)`.
    pub fn mean(&self) -> f64 {
        match *self {
            ClaimModel::CompoundPoisson { rate, jump } => rate * jump.mean(),
            ClaimModel::Gamma { shape, rate } => shape / rate,
        }
    }

    /// Lévy tail `ν(x, ∞)`.
    pub fn tail(&self, x: f64) -> f64 {
        match *self {
            ClaimModel::CompoundPoisson { rate, jump } => rate * jump.tail(x),
            ClaimModel::Gamma { shape, rate } => {
                if x <= 0.0 {
                    f64::INFINITY
                } else {
                    shape * exponential_integral_quad(rate * x)
                }
            }
        }
    }

    /// Integrated tail distribution `H(x) = (1/EC(1)) ∫₀^x ν(y, ∞) dy`.
    pub fn integrated_tail_cdf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        match *self {
            ClaimModel::CompoundPoisson { jump, .. } => jump.integrated_tail_cdf(x),
            ClaimModel::Gamma { rate, .. } => {
                // ∫₀^x E₁(b y) dy = x E₁(bx) + (1 − e^{−bx}) / b
                let u = rate * x;
                (u * exponential_integral_quad(u) - (-u).exp_m1()).min(1.0)
            }
        }
    }
}

/// Spectrally negative stable part with exponent `q·β^α`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StableComponent {
    pub alpha: f64,
    pub scale: f64,
}

/// Compound Poisson downward jumps plus the upward drift that makes them mean zero.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CompensatedJumps {
    pub rate: f64,
    pub jump: JumpLaw,
}

impl CompensatedJumps {
    pub fn drift(&self) -> f64 {
        self.rate * self.jump.mean()
    }
}

/// Zero-mean spectrally negative perturbation `Z`; any subset of the
/// components may be present, including none.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PerturbationModel {
    /// `ς²`.
    #[serde(default)]
    pub gaussian_var: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stable: Option<StableComponent>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ccp: Option<CompensatedJumps>,
}

impl PerturbationModel {
    pub fn none() -> Self {
        Self::default()
    }

    pub fn brownian(gaussian_var: f64) -> Self {
        Self {
            gaussian_var,
            ..Self::default()
        }
    }

    pub fn stable(alpha: f64, scale: f64) -> Self {
        Self {
            stable: Some(StableComponent { alpha, scale }),
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        ensure(self.gaussian_var.is_finite() && self.gaussian_var >= 0.0, || {
            format!("gaussian variance must be non-negative, got {}", self.gaussian_var)
        })?;
        if let Some(StableComponent { alpha, scale }) = self.stable {
            ensure(alpha > 1.0 && alpha < 2.0, || {
                format!("stable index alpha must lie in (1, 2), got {alpha}")
            })?;
            ensure(scale.is_finite() && scale > 0.0, || {
                format!("stable scale must be positive, got {scale}")
            })?;
        }
        if let Some(ccp) = self.ccp {
            ensure(ccp.rate.is_finite() && ccp.rate >= 0.0, || {
                format!("perturbation jump rate must be non-negative, got {}", ccp.rate)
            })?;
            ccp.jump.validate()?;
        }
        Ok(())
    }

    fn active_ccp(&self) -> Option<CompensatedJumps> {
        self.ccp.filter(|c| c.rate > 0.0)
    }

    pub fn gaussian_sd(&self) -> f64 {
        self.gaussian_var.sqrt()
    }

    pub fn is_zero(&self) -> bool {
        self.gaussian_var == 0.0 && self.stable.is_none() && self.active_ccp().is_none()
    }

    pub fn is_pure_brownian(&self) -> bool {
        self.gaussian_var > 0.0 && self.stable.is_none() && self.active_ccp().is_none()
    }

    pub fn is_pure_stable(&self) -> bool {
        self.gaussian_var == 0.0 && self.stable.is_some() && self.active_ccp().is_none()
    }

    /// Jump component, when it has a positive rate.
    pub fn jumps(&self) -> Option<CompensatedJumps> {
        self.active_ccp()
    }

    /// `lim ψ_Z(β)/β` as `β → ∞`: finite only for bounded-variation `Z`.
    pub fn bounded_variation_drift(&self) -> Option<f64> {
        if self.gaussian_var > 0.0 || self.stable.is_some() {
            None
        } else {
            Some(self.active_ccp().map_or(0.0, |c| c.drift()))
        }
    }

    /// `ψ_Z(β) = (ς²/2)β² + qβ^α + λ_Z(E e^{−βY} − 1 + βEY)`.
    pub fn exponent(&self, beta: f64) -> f64 {
        let mut v = 0.5 * self.gaussian_var * beta * beta;
        if let Some(StableComponent { alpha, scale }) = self.stable {
            v += scale * beta.powf(alpha);
        }
        if let Some(ccp) = self.active_ccp() {
            v += ccp.rate * (beta * ccp.jump.mean() - ccp.jump.laplace_complement(beta));
        }
        v
    }

    pub fn exponent_derivative(&self, beta: f64) -> f64 {
        let mut v = self.gaussian_var * beta;
        if let Some(StableComponent { alpha, scale }) = self.stable {
            v += scale * alpha * beta.powf(alpha - 1.0);
        }
        if let Some(ccp) = self.active_ccp() {
            v += ccp.rate * (ccp.jump.mean() - ccp.jump.laplace_derivative(beta));
        }
        v
    }

    pub fn exponent_complex(&self, s: Complex64) -> Option<Complex64> {
        let mut v = 0.5 * self.gaussian_var * s * s;
        if let Some(StableComponent { alpha, scale }) = self.stable {
            v += scale * s.powf(alpha);
        }
        if let Some(ccp) = self.active_ccp() {
            let l = ccp.jump.laplace_complex(s)?;
            v += ccp.rate * (l - 1.0 + s * ccp.jump.mean());
        }
        Some(v)
    }

    /// `ψ_Z(−r) = log E[e^{−rZ(1)}]`; `None` when infinite.
    pub fn exponent_at_negative(&self, r: f64) -> Option<f64> {
        if self.stable.is_some() && r > 0.0 {
            return None;
        }
        let mut v = 0.5 * self.gaussian_var * r * r;
        if let Some(ccp) = self.active_ccp() {
            v += ccp.rate * (ccp.jump.mgf(r)? - 1.0 - r * ccp.jump.mean());
        }
        Some(v)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRiskModel {
    premium_rate: f64,
    claim: ClaimModel,
    #[serde(default)]
    perturbation: PerturbationModel,
}

/// The perturbed risk process `X(t) = ct − C(t) + Z(t)` under the net profit condition.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawRiskModel", into = "RawRiskModel")]
pub struct RiskModel {
    premium_rate: f64,
    claim: ClaimModel,
    perturbation: PerturbationModel,
    claim_mean: f64,
}

impl TryFrom<RawRiskModel> for RiskModel {
    type Error = Error;

    fn try_from(raw: RawRiskModel) -> Result<Self> {
        RiskModel::new(raw.premium_rate, raw.claim, raw.perturbation)
    }
}

impl From<RiskModel> for RawRiskModel {
    fn from(m: RiskModel) -> Self {
        RawRiskModel {
            premium_rate: m.premium_rate,
            claim: m.claim,
            perturbation: m.perturbation,
        }
    }
}

const ROOT_RTOL: f64 = 1e-12;
const ROOT_MAX_ITER: usize = 200;

impl RiskModel {
    pub fn new(premium_rate: f64, claim: ClaimModel, perturbation: PerturbationModel) -> Result<Self> {
        ensure(premium_rate.is_finite() && premium_rate > 0.0, || {
            format!("premium rate must be positive and finite, got {premium_rate}")
        })?;
        claim.validate()?;
        perturbation.validate()?;
        let claim_mean = claim.mean();
        if premium_rate <= claim_mean {
            return Err(Error::NetProfit {
                premium: premium_rate,
                claim_mean,
            });
        }
        Ok(Self {
            premium_rate,
            claim,
            perturbation,
            claim_mean,
        })
    }

    pub fn premium_rate(&self) -> f64 {
        self.premium_rate
    }

    pub fn claim(&self) -> &ClaimModel {
        &self.claim
    }

    pub fn perturbation(&self) -> &PerturbationModel {
        &self.perturbation
    }

    /// `EC(1)`.
    pub fn claim_mean(&self) -> f64 {
        self.claim_mean
    }

    /// Net profit rate `d = c − EC(1) = EX(1)`.
    pub fn drift(&self) -> f64 {
        self.premium_rate - self.claim_mean
    }

    /// Loading `ρ = EC(1)/c ∈ (0, 1)`.
    pub fn rho(&self) -> f64 {
        self.claim_mean / self.premium_rate
    }

    /// Same premium and claims with the perturbation removed.
    pub fn without_perturbation(&self) -> Self {
        Self {
            perturbation: PerturbationModel::none(),
            ..*self
        }
    }

    /// `ψ(β) = cβ − Φ_C(β) + ψ_Z(β)`.
    pub fn exponent(&self, beta: f64) -> f64 {
        self.premium_rate * beta - self.claim.exponent(beta) + self.perturbation.exponent(beta)
    }

    pub fn exponent_derivative(&self, beta: f64) -> f64 {
        self.premium_rate - self.claim.exponent_derivative(beta)
            + self.perturbation.exponent_derivative(beta)
    }

    pub fn exponent_complex(&self, s: Complex64) -> Option<Complex64> {
        Some(self.premium_rate * s - self.claim.exponent_complex(s)? + self.perturbation.exponent_complex(s)?)
    }

    /// `ψ(β)/β`, evaluated without the `0/0` at the origin.
    pub fn exponent_over_beta(&self, beta: f64) -> f64 {
        if beta == 0.0 {
            return self.drift();
        }
        self.exponent(beta) / beta
    }

    /// `ψ(−r) = log E[e^{r X̂(1)}]` for the dual process `X̂ = −X`; `None` when infinite.
    pub fn dual_cumulant(&self, r: f64) -> Option<f64> {
        let claims = self.claim.exponent_at_negative(r)?;
        let pert = self.perturbation.exponent_at_negative(r)?;
        Some(-self.premium_rate * r - claims + pert)
    }

    /// `θ(0)`: `d / lim ψ(β)/β`, which is zero for unbounded-variation perturbations.
    pub fn survival_at_zero(&self) -> f64 {
        match self.perturbation.bounded_variation_drift() {
            Some(extra) => self.drift() / (self.premium_rate + extra),
            None => 0.0,
        }
    }

    /// The strictly increasing inverse `Φ` of `ψ` on `[0, ∞)`.
    pub fn exponent_inverse(&self, q: f64) -> Result<f64> {
        if !(q >= 0.0) || !q.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "exponent inverse needs a finite q >= 0, got {q}"
            )));
        }
        if q == 0.0 {
            return Ok(0.0);
        }
        let target = |b: f64| self.exponent(b) - q;
        let mut lo = 0.0;
        let mut f_lo = -q;
        let mut hi = (q / self.drift()).clamp(f64::MIN_POSITIVE, 1.0);
        let mut f_hi = target(hi);
        let mut grow = 0;
        while f_hi < 0.0 {
            lo = hi;
            f_lo = f_hi;
            hi *= 2.0;
            f_hi = target(hi);
            grow += 1;
            if grow > 2000 || !f_hi.is_finite() {
                return Err(Error::Numerical(format!(
                    "could not bracket the root of psi(beta) = {q}"
                )));
            }
        }
        let tol = ROOT_RTOL * q.max(1.0);
        // Regula falsi with the Illinois modification, falling back to
        // bisection whenever the interpolated point does not shrink the bracket.
        let mut side = 0i8;
        for _ in 0..ROOT_MAX_ITER {
            let width = hi - lo;
            let mut mid = (lo * f_hi - hi * f_lo) / (f_hi - f_lo);
            if !(mid > lo && mid < hi) {
                mid = 0.5 * (lo + hi);
            }
            let f_mid = target(mid);
            if f_mid.abs() <= tol || width <= 4.0 * f64::EPSILON * hi {
                return Ok(mid);
            }
            if f_mid < 0.0 {
                lo = mid;
                f_lo = f_mid;
                if side == -1 {
                    f_hi *= 0.5;
                }
                side = -1;
            } else {
                hi = mid;
                f_hi = f_mid;
                if side == 1 {
                    f_lo *= 0.5;
                }
                side = 1;
            }
            if (hi - lo) > 0.75 * width {
                let mid = 0.5 * (lo + hi);
                let f_mid = target(mid);
                if f_mid < 0.0 {
                    lo = mid;
                    f_lo = f_mid;
                } else {
                    hi = mid;
                    f_hi = f_mid;
                }
                side = 0;
            }
        }
        Err(Error::Numerical(format!(
            "root finder for psi(beta) = {q} did not converge in {ROOT_MAX_ITER} iterations"
        )))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn exp_cp(rate: f64, jump_rate: f64) -> ClaimModel {
        ClaimModel::CompoundPoisson {
            rate,
            jump: JumpLaw::Exponential { rate: jump_rate },
        }
    }

    fn m1() -> RiskModel {
        RiskModel::new(2.0, exp_cp(1.0, 1.0), PerturbationModel::none()).unwrap()
    }

    fn m2() -> RiskModel {
        RiskModel::new(2.0, exp_cp(1.0, 1.0), PerturbationModel::brownian(2.0)).unwrap()
    }

    #[test]
    fn claim_exponent_examples() {
        assert_relative_eq!(exp_cp(1.0, 1.0).exponent(1.0), 0.5, epsilon = 1e-15);
        assert_eq!(exp_cp(1.0, 1.0).exponent(0.0), 0.0);
        let gamma = ClaimModel::Gamma { shape: 1.0, rate: 1.0 };
        assert_relative_eq!(gamma.exponent(1.0), std::f64::consts::LN_2, epsilon = 1e-15);
        assert_eq!(gamma.exponent(0.0), 0.0);
    }

    #[test]
    fn claim_mean_examples() {
        assert_eq!(exp_cp(1.0, 1.0).mean(), 1.0);
        let det = ClaimModel::CompoundPoisson {
            rate: 2.0,
            jump: JumpLaw::Deterministic { size: 0.5 },
        };
        assert_eq!(det.mean(), 1.0);
        assert_eq!(ClaimModel::Gamma { shape: 3.0, rate: 2.0 }.mean(), 1.5);
    }

    #[test]
    fn claim_tail_examples() {
        assert_relative_eq!(exp_cp(1.0, 1.0).tail(1.0), (-1.0f64).exp(), epsilon = 1e-15);
        let det = ClaimModel::CompoundPoisson {
            rate: 1.0,
            jump: JumpLaw::Deterministic { size: 2.0 },
        };
        assert_eq!(det.tail(3.0), 0.0);
        let gamma = ClaimModel::Gamma { shape: 1.0, rate: 1.0 };
        assert_relative_eq!(gamma.tail(1.0), 0.219_383_934_395_520_3, epsilon = 1e-11);
    }

    #[test]
    fn integrated_tail_examples() {
        assert_relative_eq!(
            exp_cp(1.0, 1.0).integrated_tail_cdf(1.0),
            1.0 - (-1.0f64).exp(),
            epsilon = 1e-15
        );
        assert_eq!(exp_cp(1.0, 1.0).integrated_tail_cdf(0.0), 0.0);
        let gamma = ClaimModel::Gamma { shape: 1.0, rate: 1.0 };
        assert_eq!(gamma.integrated_tail_cdf(0.0), 0.0);
        let want = 0.219_383_934_395_520_3 + 1.0 - (-1.0f64).exp();
        assert_relative_eq!(gamma.integrated_tail_cdf(1.0), want, epsilon = 1e-11);
    }

    #[test]
    fn perturbation_exponent_examples() {
        assert_relative_eq!(PerturbationModel::brownian(2.0).exponent(1.0), 1.0);
        assert_eq!(PerturbationModel::none().exponent(3.7), 0.0);
        assert_relative_eq!(PerturbationModel::stable(1.5, 1.0).exponent(4.0), 8.0, epsilon = 1e-14);
    }

    #[test]
    fn risk_exponent_examples() {
        assert_relative_eq!(m1().exponent(1.0), 1.5, epsilon = 1e-15);
        assert_eq!(m1().exponent(0.0), 0.0);
        assert_relative_eq!(m2().exponent(1.0), 2.5, epsilon = 1e-15);
    }

    #[test]
    fn exponent_inverse_examples() {
        assert_relative_eq!(m1().exponent_inverse(1.5).unwrap(), 1.0, max_relative = 1e-10);
        assert_eq!(m1().exponent_inverse(0.0).unwrap(), 0.0);
        assert_relative_eq!(m2().exponent_inverse(2.5).unwrap(), 1.0, max_relative = 1e-10);
        assert!(m1().exponent_inverse(-1.0).is_err());
    }

    #[test]
    fn net_profit_violation_is_named() {
        let err = RiskModel::new(1.0, exp_cp(1.0, 1.0), PerturbationModel::none()).unwrap_err();
        assert!(matches!(err, Error::NetProfit { .. }));
        assert!(err.to_string().contains("net profit"));
    }

    #[test]
    fn invalid_parameters_rejected() {
        let lomax = ClaimModel::CompoundPoisson {
            rate: 1.0,
            jump: JumpLaw::Lomax { shape: 1.0, scale: 1.0 },
        };
        assert!(RiskModel::new(5.0, lomax, PerturbationModel::none()).is_err());
        let bad_alpha = PerturbationModel::stable(2.0, 1.0);
        assert!(RiskModel::new(5.0, exp_cp(1.0, 1.0), bad_alpha).is_err());
        assert!(RiskModel::new(5.0, exp_cp(1.0, 1.0), PerturbationModel::brownian(-1.0)).is_err());
    }

    #[test]
    fn dual_cumulant_m1() {
        // ψ(−r) = −2r + r/(1−r)
        let r = 0.3;
        assert_relative_eq!(m1().dual_cumulant(r).unwrap(), -2.0 * r + r / (1.0 - r), epsilon = 1e-14);
        assert!(m1().dual_cumulant(1.5).is_none());
    }

    #[test]
    fn survival_at_zero_by_variation() {
        assert_relative_eq!(m1().survival_at_zero(), 0.5);
        assert_eq!(m2().survival_at_zero(), 0.0);
    }

    #[test]
    fn serde_rejects_invalid_model() {
        let text = r#"{"premium_rate": 0.5, "claim": {"kind": "compound_poisson",
            "params": {"rate": 1, "jump": {"kind": "exponential", "params": {"rate": 1}}}}}"#;
        let err = serde_json::from_str::<RiskModel>(text).unwrap_err().to_string();
        assert!(err.contains("net profit"), "{err}");
    }

    #[test]
    fn serde_round_trip() {
        let text = r#"{"premium_rate": 2, "claim": {"kind": "gamma", "params": {"shape": 1, "rate": 1}},
            "perturbation": {"gaussian_var": 2, "stable": {"alpha": 1.5, "scale": 0.3}}}"#;
        let model: RiskModel = serde_json::from_str(text).unwrap();
        let again: RiskModel = serde_json::from_str(&serde_json::to_string(&model).unwrap()).unwrap();
        assert_eq!(model, again);
    }
}
