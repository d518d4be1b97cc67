use crate::error::{Error, Result};

/// Kolmogorov–Smirnov statistic `D` and its asymptotic p-value.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KsResult {
    pub d: f64,
    pub p: f64,
}

/// `P(K > λ)` for the Kolmogorov distribution.
///
/// Uses `2 Σ (−1)^{k−1} exp(−2k²λ²)` for large `λ` and the Jacobi-transformed
/// series for small `λ`; both are truncated once a term falls below 1e−12.
pub fn kolmogorov_survival(lambda: f64) -> f64 {
    if lambda <= 0.0 {
        return 1.0;
    }
    if lambda < 1.18 {
        let c = std::f64::consts::PI.powi(2) / (8.0 * lambda * lambda);
        let mut cdf = 0.0;
        for k in 1..=100 {
            let odd = (2 * k - 1) as f64;
            let term = (-odd * odd * c).exp();
            cdf += term;
            if term < 1e-12 {
                break;
            }
        }
        cdf *= (2.0 * std::f64::consts::PI).sqrt() / lambda;
        return (1.0 - cdf).clamp(0.0, 1.0);
    }
    let mut sum = 0.0;
    let mut sign = 1.0;
    for k in 1..=100 {
        let kf = k as f64;
        let term = (-2.0 * kf * kf * lambda * lambda).exp();
        sum += sign * term;
        if term < 1e-12 {
            break;
        }
        sign = -sign;
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

fn p_value(d: f64, effective_n: f64) -> f64 {
    let root = effective_n.sqrt();
    kolmogorov_survival((root + 0.12 + 0.11 / root) * d)
}

fn sorted(a: &[f64]) -> Result<Vec<f64>> {
    if a.is_empty() {
        return Err(Error::Stats("empty sample".into()));
    }
    if a.iter().any(|x| x.is_nan()) {
        return Err(Error::Stats("sample contains NaN".into()));
    }
    let mut v = a.to_vec();
    v.sort_by(f64::total_cmp);
    Ok(v)
}

pub fn ks_two_sample(a: &[f64], b: &[f64]) -> Result<KsResult> {
    let (a, b) = (sorted(a)?, sorted(b)?);
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j) = (0, 0);
    let mut d: f64 = 0.0;
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] == x {
            i += 1;
        }
        while j < b.len() && b[j] == x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    Ok(KsResult {
        d,
        p: p_value(d, na * nb / (na + nb)),
    })
}

/// One-sample test against a CDF; a jump of the CDF at a sample value is
/// read through its left limit.
pub fn ks_one_sample(a: &[f64], cdf: impl Fn(f64) -> f64) -> Result<KsResult> {
    let a = sorted(a)?;
    let n = a.len() as f64;
    let mut d: f64 = 0.0;
    let mut i = 0;
    while i < a.len() {
        let x = a[i];
        let below = i as f64 / n;
        while i < a.len() && a[i] == x {
            i += 1;
        }
        d = d
            .max((cdf(x.next_down()) - below).abs())
            .max((i as f64 / n - cdf(x)).abs());
    }
    Ok(KsResult { d, p: p_value(d, n) })
}
