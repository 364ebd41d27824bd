//! Chambers–Mallows–Stuck sampling of totally skewed stable increments.

use std::f64::consts::FRAC_PI_2;

use rand::Rng;
use rand_distr::{Distribution, Exp1, Uniform};

/// Increments of a spectrally positive stable process `S` with
/// `E[e^{−βS(t)}] = e^{t·q·β^α}`, `α ∈ (1, 2)`.
#[derive(Debug, Clone, Copy)]
pub struct StableIncrements {
    alpha: f64,
    scale_per_time: f64,
    shift: f64,
    stretch: f64,
}

impl StableIncrements {
    pub fn new(alpha: f64, q: f64) -> Self {
        debug_assert!(alpha > 1.0 && alpha < 2.0 && q > 0.0);
        let tan = (FRAC_PI_2 * alpha).tan();
        Self {
            alpha,
            // σ(t)^α = q·t·|cos(πα/2)|
            scale_per_time: q * (FRAC_PI_2 * alpha).cos().abs(),
            shift: tan.atan() / alpha,
            stretch: (1.0 + tan * tan).powf(0.5 / alpha),
        }
    }

    /// Standard variate with unit scale, skewness +1 and zero mean.
    pub fn standard<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let a = self.alpha;
        let v = Uniform::new(-FRAC_PI_2, FRAC_PI_2).expect("valid range").sample(rng);
        let w: f64 = Exp1.sample(rng);
        let av = a * (v + self.shift);
        self.stretch * av.sin() / v.cos().powf(1.0 / a) * ((v - av).cos() / w).powf((1.0 - a) / a)
    }

    /// Increment over a time span `dt`.
    pub fn sample<R: Rng + ?Sized>(&self, dt: f64, rng: &mut R) -> f64 {
        (self.scale_per_time * dt).powf(1.0 / self.alpha) * self.standard(rng)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn laplace_transform_matches_exponent() {
        // E e^{−βS(t)} = e^{tqβ^α}; e^{−βS} has finite variance since the left tail is light.
        let (alpha, q, dt) = (1.5, 1.0, 0.5);
        let st = StableIncrements::new(alpha, q);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let n = 400_000;
        let draws: Vec<f64> = (0..n).map(|_| st.sample(dt, &mut rng)).collect();
        for beta in [0.3, 1.0, 1.5] {
            let vals: Vec<f64> = draws.iter().map(|s| (-beta * s).exp()).collect();
            let mean = vals.iter().sum::<f64>() / n as f64;
            let var = vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
            let want = (dt * q * f64::powf(beta, alpha)).exp();
            let se = (var / n as f64).sqrt();
            assert!((mean - want).abs() < 4.0 * se, "beta {beta}: {mean} vs {want} (se {se})");
        }
    }

    #[test]
    fn skewed_to_the_right() {
        let st = StableIncrements::new(1.5, 1.0);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let draws: Vec<f64> = (0..100_000).map(|_| st.standard(&mut rng)).collect();
        let max = draws.iter().copied().fold(f64::MIN, f64::max);
        let min = draws.iter().copied().fold(f64::MAX, f64::min);
        assert!(max > 10.0 * min.abs());
    }
}
