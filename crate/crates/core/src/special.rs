//! Special functions not covered by `statrs`.

use statrs::function::gamma::gamma;

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// `e^z E_p(z)`, finite for large `z` where `E_p` itself underflows.
pub fn expint_scaled(p: f64, z: f64) -> f64 {
    if z >= 1.0 {
        expint_cf_scaled(p, z)
    } else {
        z.exp() * expint(p, z)
    }
}

/// Generalized exponential integral `E_p(z) = ∫₁^∞ e^{-zu} u^{-p} du` for real
/// `p > 0`, `z > 0`.
pub fn expint(p: f64, z: f64) -> f64 {
    debug_assert!(p > 0.0 && z > 0.0);
    if z >= 1.0 {
        return expint_cf_scaled(p, z) * (-z).exp();
    }
    // Reduce to the fractional order in (0, 1], then recur upward.
    let steps = (p.ceil() - 1.0).max(0.0) as usize;
    let frac = p - steps as f64;
    let mut e = expint_series(frac, z);
    let ez = (-z).exp();
    let mut q = frac;
    for _ in 0..steps {
        e = (ez - z * e) / q;
        q += 1.0;
    }
    e
}

fn expint_cf_scaled(p: f64, z: f64) -> f64 {
    const TINY: f64 = 1e-300;
    let mut b = z + p;
    let mut c = 1.0 / TINY;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..10_000 {
        let i = i as f64;
        let an = -i * (p - 1.0 + i);
        b += 2.0;
        d = 1.0 / (an * d + b);
        c = b + an / c;
        let del = c * d;
        h *= del;
        if (del - 1.0).abs() < 2.0 * f64::EPSILON {
            break;
        }
    }
    h
}

// Power series for 0 < s <= 1 and small z.
fn expint_series(s: f64, z: f64) -> f64 {
    if (s - 1.0).abs() < 1e-15 {
        let mut sum = 0.0;
        let mut term = 1.0;
        for k in 1..200 {
            term *= -z / k as f64;
            let add = term / k as f64;
            sum += add;
            if add.abs() < 1e-17 * sum.abs().max(1e-300) {
                break;
            }
        }
        return -EULER_GAMMA - z.ln() - sum;
    }
    let mut sum = 0.0;
    let mut fact = 1.0;
    for k in 0..200 {
        if k > 0 {
            fact *= -z / k as f64;
        }
        let add = fact / (1.0 - s + k as f64);
        sum += add;
        if k > 2 && add.abs() < 1e-17 * sum.abs() {
            break;
        }
    }
    gamma(1.0 - s) * z.powf(s - 1.0) - sum
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::{integrate_to_infinity, Tolerance};

    fn oracle(p: f64, z: f64) -> f64 {
        integrate_to_infinity(|u| (-z * u).exp() * u.powf(-p), 1.0, Tolerance::new(1e-15, 1e-13))
            .unwrap()
    }

    #[test]
    fn matches_quadrature_across_orders() {
        for &p in &[0.3, 1.0, 1.5, 2.0, 2.5, 3.0, 4.7] {
            for &z in &[0.01, 0.2, 0.9, 1.0, 2.5, 10.0] {
                let got = expint(p, z);
                let want = oracle(p, z);
                assert!(
                    ((got - want) / want).abs() < 1e-10,
                    "E_{p}({z}) = {got}, quadrature {want}"
                );
            }
        }
    }

    #[test]
    fn e1_at_one() {
        assert!((expint(1.0, 1.0) - 0.219_383_934_395_520_3).abs() < 1e-14);
    }
}
