//! Numerical inversion of one-sided Laplace transforms.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Stehfest orders accepted by [`invert_laplace`]; beyond 18 the weights
/// cancel catastrophically in double precision.
pub const STEHFEST_ORDERS: std::ops::RangeInclusive<usize> = 2..=18;
/// Node counts accepted for the fixed Talbot contour.
pub const TALBOT_NODES: std::ops::RangeInclusive<usize> = 4..=64;

pub const DEFAULT_STEHFEST_ORDER: usize = 14;
pub const DEFAULT_TALBOT_NODES: usize = 20;

/// Which analytic object a transform represents.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TransformKind {
    /// `LH`, the transform of the integrated tail law.
    IntegratedTail,
    /// `LG`, the transform of the law of `−inf Y`.
    InfimumLaw,
    /// `d/ψ(β)`, the ordinary transform of the survival function.
    Survival,
    /// `LG(β)/β`, the ordinary transform of the CDF `G`.
    InfimumCdf,
    Generic,
}

type RealFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;
type ComplexFn = Arc<dyn Fn(Complex64) -> Complex64 + Send + Sync>;

/// A Laplace-domain function `β ↦ F(β)` for `β > 0`, optionally with its
/// analytic continuation to the right of all singularities.
#[derive(Clone)]
pub struct TransformFn {
    kind: TransformKind,
    real: RealFn,
    complex: Option<ComplexFn>,
}

impl fmt::Debug for TransformFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TransformFn")
            .field("kind", &self.kind)
            .field("complex", &self.complex.is_some())
            .finish()
    }
}

impl TransformFn {
    pub fn new(kind: TransformKind, real: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Self {
            kind,
            real: Arc::new(real),
            complex: None,
        }
    }

    pub fn with_complex(
        mut self,
        complex: impl Fn(Complex64) -> Complex64 + Send + Sync + 'static,
    ) -> Self {
        self.complex = Some(Arc::new(complex));
        self
    }

    pub fn kind(&self) -> TransformKind {
        self.kind
    }

    pub fn eval(&self, beta: f64) -> f64 {
        (self.real)(beta)
    }

    pub fn eval_complex(&self, s: Complex64) -> Option<Complex64> {
        self.complex.as_ref().map(|f| f(s))
    }

    pub fn has_complex(&self) -> bool {
        self.complex.is_some()
    }

    /// Talbot when a complex evaluator is available, Stehfest otherwise.
    pub fn default_inversion(&self) -> Inversion {
        if self.has_complex() {
            Inversion::Talbot(DEFAULT_TALBOT_NODES)
        } else {
            Inversion::Stehfest(DEFAULT_STEHFEST_ORDER)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Inversion {
    /// Gaver–Stehfest with an even number of real abscissae.
    Stehfest(usize),
    /// Fixed Talbot contour with the given number of nodes.
    Talbot(usize),
}

/// Recovers `f(x)` from its transform `F`.
pub fn invert_laplace(f: &TransformFn, x: f64, method: Inversion) -> Result<f64> {
    if !(x > 0.0 && x.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "inversion point must be positive and finite, got {x}"
        )));
    }
    let value = match method {
        Inversion::Stehfest(order) => stehfest(f, x, order)?,
        Inversion::Talbot(nodes) => talbot(f, x, nodes)?,
    };
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::Numerical(format!(
            "inversion of {:?} at x = {x} produced {value}",
            f.kind()
        )))
    }
}

/// Stehfest weights `V_k`, `k = 1..=n`.
pub fn stehfest_weights(n: usize) -> Vec<f64> {
    let half = n / 2;
    let fact: Vec<f64> = (0..=n).scan(1.0, |acc, i| {
        if i > 0 {
            *acc *= i as f64;
        }
        Some(*acc)
    })
    .collect();
    (1..=n)
        .map(|k| {
            let mut sum = 0.0;
            for j in k.div_ceil(2)..=k.min(half) {
                sum += (j as f64).powi(half as i32) * fact[2 * j]
                    / (fact[half - j] * fact[j] * fact[j - 1] * fact[k - j] * fact[2 * j - k]);
            }
            if (k + half).is_multiple_of(2) {
                sum
            } else {
                -sum
            }
        })
        .collect()
}

fn stehfest(f: &TransformFn, x: f64, order: usize) -> Result<f64> {
    if !order.is_multiple_of(2) || !STEHFEST_ORDERS.contains(&order) {
        return Err(Error::InvalidArgument(format!(
            "Stehfest order must be even and within {STEHFEST_ORDERS:?}, got {order}"
        )));
    }
    let a = std::f64::consts::LN_2 / x;
    let mut sum = 0.0;
    for (k, w) in stehfest_weights(order).into_iter().enumerate() {
        let v = f.eval(a * (k + 1) as f64);
        if !v.is_finite() {
            return Err(Error::Numerical(format!(
                "transform {:?} is not finite at beta = {}",
                f.kind(),
                a * (k + 1) as f64
            )));
        }
        sum += w * v;
    }
    Ok(a * sum)
}

fn talbot(f: &TransformFn, x: f64, nodes: usize) -> Result<f64> {
    if !TALBOT_NODES.contains(&nodes) {
        return Err(Error::InvalidArgument(format!(
            "Talbot node count must lie within {TALBOT_NODES:?}, got {nodes}"
        )));
    }
    let eval = |s: Complex64| {
        f.eval_complex(s).ok_or_else(|| {
            Error::Unsupported(format!(
                "Talbot inversion needs a complex evaluator for {:?}",
                f.kind()
            ))
        })
    };
    let m = nodes as f64;
    let r = 2.0 * m / (5.0 * x);
    let first = eval(Complex64::new(r, 0.0))?.re * (r * x).exp();
    let mut sum = 0.5 * first;
    for k in 1..nodes {
        let theta = k as f64 * std::f64::consts::PI / m;
        let cot = theta.cos() / theta.sin();
        let s = Complex64::new(r * theta * cot, r * theta);
        let sigma = theta + (theta * cot - 1.0) * cot;
        let term = (s * x).exp() * eval(s)? * Complex64::new(1.0, sigma);
        sum += term.re;
    }
    Ok(r / m * sum)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn exp_pair() -> TransformFn {
        TransformFn::new(TransformKind::Generic, |b| 1.0 / (b + 1.0)).with_complex(|s| 1.0 / (s + 1.0))
    }

    #[test]
    fn exponential_pair() {
        for method in [Inversion::Stehfest(14), Inversion::Talbot(20)] {
            let v = invert_laplace(&exp_pair(), 1.0, method).unwrap();
            assert!((v - (-1.0f64).exp()).abs() < 1e-4, "{method:?}: {v}");
        }
        let v = invert_laplace(&exp_pair(), 1.0, Inversion::Talbot(20)).unwrap();
        assert!((v - (-1.0f64).exp()).abs() < 1e-12);
    }

    #[test]
    fn ramp_pair() {
        let f = TransformFn::new(TransformKind::Generic, |b| 1.0 / (b * b)).with_complex(|s| 1.0 / (s * s));
        for method in [Inversion::Stehfest(14), Inversion::Talbot(20)] {
            let v = invert_laplace(&f, 2.0, method).unwrap();
            assert!((v - 2.0).abs() < 1e-6, "{method:?}: {v}");
        }
    }

    #[test]
    fn stehfest_weights_sum_to_zero() {
        // Σ V_k = 0 for every even order: the inverse of a constant transform vanishes.
        for n in (2..=18).step_by(2) {
            let w = stehfest_weights(n);
            let scale: f64 = w.iter().map(|v| v.abs()).sum();
            assert!(w.iter().sum::<f64>().abs() < 1e-12 * scale, "order {n}");
        }
        assert_eq!(stehfest_weights(2), vec![2.0, -2.0]);
    }

    #[test]
    fn rejects_bad_orders() {
        assert!(invert_laplace(&exp_pair(), 1.0, Inversion::Stehfest(13)).is_err());
        assert!(invert_laplace(&exp_pair(), 1.0, Inversion::Stehfest(30)).is_err());
        assert!(invert_laplace(&exp_pair(), 1.0, Inversion::Talbot(2)).is_err());
        assert!(invert_laplace(&exp_pair(), 0.0, Inversion::Talbot(20)).is_err());
    }

    #[test]
    fn talbot_without_complex_is_unsupported() {
        let f = TransformFn::new(TransformKind::Generic, |b| 1.0 / (b + 1.0));
        assert!(matches!(
            invert_laplace(&f, 1.0, Inversion::Talbot(20)),
            Err(Error::Unsupported(_))
        ));
        assert_eq!(f.default_inversion(), Inversion::Stehfest(14));
    }

    #[test]
    fn non_finite_transform_is_an_error() {
        let f = TransformFn::new(TransformKind::Generic, |_| f64::NAN);
        assert!(invert_laplace(&f, 1.0, Inversion::Stehfest(14)).is_err());
    }
}
