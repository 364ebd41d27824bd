//! Jump-size samplers.

use rand::Rng;
use rand_distr::{Distribution, Exp, Open01};

use crate::models::JumpLaw;
use crate::special::expint;

pub fn sample_jump<R: Rng + ?Sized>(law: &JumpLaw, rng: &mut R) -> f64 {
    let u: f64 = Open01.sample(rng);
    law.quantile_upper(u)
}

/// Jumps above `ε` of a Gamma process with Lévy density `a·e^{−bx}/x`.
///
/// The normalized density `e^{−bx}/(x·E₁(bε))` is split at `s = max(ε, 1/b)`:
/// below `s` a log-uniform proposal is thinned by `e^{−bx}`, above it
/// `s + Exp(b)` is thinned by `s/x`.
#[derive(Debug, Clone)]
pub struct GammaBigJumps {
    pub rate: f64,
    /// Total drift `a(1 − e^{−bε})/b` of the discarded small jumps.
    pub small_jump_drift: f64,
    b: f64,
    lower: f64,
    split: f64,
    p_lower: f64,
    tail_exp: Exp<f64>,
}

impl GammaBigJumps {
    pub fn new(shape: f64, rate: f64, cutoff: f64) -> Self {
        debug_assert!(cutoff > 0.0);
        let split = cutoff.max(1.0 / rate);
        let total = expint(1.0, rate * cutoff);
        let upper = expint(1.0, rate * split);
        Self {
            rate: shape * total,
            small_jump_drift: -shape * (-rate * cutoff).exp_m1() / rate,
            b: rate,
            lower: cutoff,
            split,
            p_lower: ((total - upper) / total).max(0.0),
            tail_exp: Exp::new(rate).expect("positive rate"),
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let below = rng.random::<f64>() < self.p_lower;
        loop {
            if below {
                let u: f64 = rng.random();
                let x = self.lower * (self.split / self.lower).powf(u);
                if rng.random::<f64>() < (-self.b * x).exp() {
                    return x;
                }
            } else {
                let x = self.split + self.tail_exp.sample(rng);
                if rng.random::<f64>() * x < self.split {
                    return x;
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn big_jump_mean_and_tail() {
        let (a, b, eps) = (1.0, 1.0, 1e-3);
        let s = GammaBigJumps::new(a, b, eps);
        assert!((s.rate - expint(1.0, 1e-3)).abs() < 1e-12);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let n = 400_000;
        let draws: Vec<f64> = (0..n).map(|_| s.sample(&mut rng)).collect();
        // Mean of the big-jump law: e^{−bε}/(b·E₁(bε)).
        let want_mean = (-b * eps).exp() / (b * expint(1.0, b * eps));
        let mean = draws.iter().sum::<f64>() / n as f64;
        let var = draws.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n as f64;
        assert!((mean - want_mean).abs() < 4.0 * (var / n as f64).sqrt());
        // P(Y > 1) = E₁(b)/E₁(bε)
        let p = draws.iter().filter(|&&x| x > 1.0).count() as f64 / n as f64;
        let want_p = expint(1.0, b) / expint(1.0, b * eps);
        assert!((p - want_p).abs() < 4.0 * (want_p * (1.0 - want_p) / n as f64).sqrt());
        assert!(draws.iter().all(|&x| x > eps));
        let total_mean = s.rate * want_mean + s.small_jump_drift;
        assert!((total_mean - a / b).abs() < 1e-12);
    }
}
