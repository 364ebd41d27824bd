//! Kolmogorov–Smirnov and chi-square tests with asymptotic critical values.

use serde::Serialize;
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::error::{Error, Result};

/// Smallest sample the asymptotic KS law is trusted for.
pub const KS_MIN_SAMPLES: usize = 500;

/// Asymptotic KS quantile for level `alpha`, from `P(K > k) ≈ 2e^{−2k²}`.
pub fn ks_quantile(alpha: f64) -> f64 {
    (-(0.5 * alpha).ln() / 2.0).sqrt()
}

/// Kolmogorov survival function `P(K > λ) = 2 Σ (−1)^{k−1} e^{−2k²λ²}`.
pub fn kolmogorov_survival(lambda: f64) -> f64 {
    if lambda <= 0.0 {
        return 1.0;
    }
    if lambda < 0.2 {
        // The alternating series converges slowly here and the value is 1 to
        // double precision.
        return 1.0;
    }
    let mut sum = 0.0;
    for k in 1..=100 {
        let kf = k as f64;
        let term = (-2.0 * kf * kf * lambda * lambda).exp();
        sum += if k % 2 == 1 { term } else { -term };
        if term < 1e-18 {
            break;
        }
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TestOutcome {
    pub statistic: f64,
    pub critical: f64,
    pub p_value: f64,
    pub n: usize,
}

impl TestOutcome {
    pub fn passes(&self) -> bool {
        self.statistic <= self.critical
    }
}

fn sorted(samples: &[f64]) -> Result<Vec<f64>> {
    if samples.iter().any(|v| v.is_nan()) {
        return Err(Error::InvalidArgument("samples contain NaN".into()));
    }
    let mut v = samples.to_vec();
    v.sort_by(f64::total_cmp);
    Ok(v)
}

fn require(check: &str, required: usize, got: usize) -> Result<()> {
    if got < required {
        return Err(Error::InsufficientSamples {
            check: check.to_string(),
            required,
            got,
        });
    }
    Ok(())
}

/// `sup_x |F_n(x) − F(x)|` against a continuous `cdf`, tested at level `alpha`.
pub fn ks_one_sample<F: Fn(f64) -> f64>(samples: &[f64], cdf: F, alpha: f64) -> Result<TestOutcome> {
    require("one-sample KS", KS_MIN_SAMPLES, samples.len())?;
    let v = sorted(samples)?;
    let n = v.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &x) in v.iter().enumerate() {
        let f = cdf(x);
        d = d.max((i as f64 + 1.0) / n - f).max(f - i as f64 / n);
    }
    Ok(TestOutcome {
        statistic: d,
        critical: ks_quantile(alpha) / n.sqrt(),
        p_value: kolmogorov_survival(n.sqrt() * d),
        n: v.len(),
    })
}

/// `sup_x |F_n(x) − G_m(x)|`, tested at level `alpha`.
pub fn ks_two_sample(a: &[f64], b: &[f64], alpha: f64) -> Result<TestOutcome> {
    require("two-sample KS", KS_MIN_SAMPLES, a.len().min(b.len()))?;
    let x = sorted(a)?;
    let y = sorted(b)?;
    let (n, m) = (x.len(), y.len());
    let (mut i, mut j) = (0, 0);
    let mut d: f64 = 0.0;
    while i < n && j < m {
        let v = x[i].min(y[j]);
        while i < n && x[i] <= v {
            i += 1;
        }
        while j < m && y[j] <= v {
            j += 1;
        }
        d = d.max((i as f64 / n as f64 - j as f64 / m as f64).abs());
    }
    let eff = (n as f64 * m as f64 / (n + m) as f64).sqrt();
    Ok(TestOutcome {
        statistic: d,
        critical: ks_quantile(alpha) / eff,
        p_value: kolmogorov_survival(eff * d),
        n: n + m,
    })
}

/// Rank-based bin of each sample into `bins` classes of (nearly) equal size;
/// ties are broken by sample order.
pub fn quantile_bins(samples: &[f64], bins: usize) -> Vec<usize> {
    let n = samples.len();
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&a, &b| samples[a].total_cmp(&samples[b]).then(a.cmp(&b)));
    let mut out = vec![0; n];
    for (rank, &i) in idx.iter().enumerate() {
        out[i] = rank * bins / n;
    }
    out
}

fn chi_square_critical(df: usize, alpha: f64) -> (ChiSquared, f64) {
    let law = ChiSquared::new(df as f64).expect("positive degrees of freedom");
    let crit = law.inverse_cdf(1.0 - alpha);
    (law, crit)
}

/// Pearson independence test on a `bins × bins` table of empirical-quantile classes.
pub fn chi_square_independence(x: &[f64], y: &[f64], bins: usize, alpha: f64) -> Result<TestOutcome> {
    if x.len() != y.len() {
        return Err(Error::InvalidArgument(format!(
            "paired samples differ in length: {} vs {}",
            x.len(),
            y.len()
        )));
    }
    if bins < 2 {
        return Err(Error::InvalidArgument("independence test needs at least 2 bins".into()));
    }
    let n = x.len();
    require("chi-square independence", 5 * bins * bins, n)?;
    let bx = quantile_bins(x, bins);
    let by = quantile_bins(y, bins);
    let mut table = vec![0.0; bins * bins];
    for (&i, &j) in bx.iter().zip(&by) {
        table[i * bins + j] += 1.0;
    }
    let rows: Vec<f64> = (0..bins).map(|i| table[i * bins..(i + 1) * bins].iter().sum()).collect();
    let cols: Vec<f64> = (0..bins).map(|j| (0..bins).map(|i| table[i * bins + j]).sum()).collect();
    let mut stat = 0.0;
    for i in 0..bins {
        for j in 0..bins {
            let e = rows[i] * cols[j] / n as f64;
            stat += (table[i * bins + j] - e).powi(2) / e;
        }
    }
    let df = (bins - 1) * (bins - 1);
    let (law, critical) = chi_square_critical(df, alpha);
    Ok(TestOutcome {
        statistic: stat,
        critical,
        p_value: 1.0 - law.cdf(stat),
        n,
    })
}

/// Pearson goodness of fit of counts `observed[k]` (with `observed.last()`
/// holding the tail) against probabilities `expected[k]` summing to one.
/// Adjacent classes are pooled until every expected count is at least 5.
pub fn chi_square_gof(observed: &[f64], expected: &[f64], alpha: f64) -> Result<TestOutcome> {
    if observed.len() != expected.len() || observed.is_empty() {
        return Err(Error::InvalidArgument("observed and expected classes differ".into()));
    }
    let n: f64 = observed.iter().sum();
    let mut pooled: Vec<(f64, f64)> = Vec::new();
    let (mut o_acc, mut e_acc) = (0.0, 0.0);
    for (&o, &p) in observed.iter().zip(expected) {
        o_acc += o;
        e_acc += p * n;
        if e_acc >= 5.0 {
            pooled.push((o_acc, e_acc));
            o_acc = 0.0;
            e_acc = 0.0;
        }
    }
    if e_acc > 0.0 || o_acc > 0.0 {
        match pooled.last_mut() {
            Some(last) => {
                last.0 += o_acc;
                last.1 += e_acc;
            }
            None => pooled.push((o_acc, e_acc)),
        }
    }
    if pooled.len() < 2 {
        return Err(Error::InsufficientSamples {
            check: "chi-square goodness of fit".into(),
            required: 10,
            got: n as usize,
        });
    }
    let stat: f64 = pooled.iter().map(|(o, e)| (o - e).powi(2) / e).sum();
    let df = pooled.len() - 1;
    let (law, critical) = chi_square_critical(df, alpha);
    Ok(TestOutcome {
        statistic: stat,
        critical,
        p_value: 1.0 - law.cdf(stat),
        n: n as usize,
    })
}

/// Mean and standard error of the mean.
pub fn mean_stderr(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    if values.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, f64::NAN);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}
