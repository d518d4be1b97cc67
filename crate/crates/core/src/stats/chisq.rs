use std::collections::BTreeMap;

use statrs::function::erf::erfc;
use statrs::function::gamma::gamma_ur;

use crate::error::{Error, Result};

/// Smallest expected count allowed in a bin.
pub const MIN_EXPECTED: f64 = 5.0;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChiSquareResult {
    pub stat: f64,
    pub dof: usize,
    pub p: f64,
}

fn upper_tail(stat: f64, dof: usize) -> f64 {
    if dof == 0 {
        return 1.0;
    }
    if stat <= 0.0 {
        return 1.0;
    }
    gamma_ur(dof as f64 / 2.0, stat / 2.0)
}

/// Pearson goodness of fit of `observed` counts to `expected` weights,
/// which are rescaled to the observed total.
pub fn chi_square(observed: &[u64], expected: &[f64]) -> Result<ChiSquareResult> {
    if observed.len() != expected.len() || observed.is_empty() {
        return Err(Error::Stats("observed and expected bins differ".into()));
    }
    if expected.iter().any(|w| !(*w > 0.0) || !w.is_finite()) {
        return Err(Error::Stats("expected weights must be positive".into()));
    }
    let total: u64 = observed.iter().sum();
    let weight: f64 = expected.iter().sum();
    let mut stat = 0.0;
    for (&o, &w) in observed.iter().zip(expected) {
        let e = total as f64 * w / weight;
        if e < MIN_EXPECTED {
            return Err(Error::Stats(format!("expected count {e} below {MIN_EXPECTED}")));
        }
        stat += (o as f64 - e).powi(2) / e;
    }
    let dof = observed.len() - 1;
    Ok(ChiSquareResult {
        stat,
        dof,
        p: upper_tail(stat, dof),
    })
}

/// Homogeneity test of two samples of a discrete statistic.
///
/// Values are binned in increasing order; adjacent bins are pooled until
/// every expected count reaches [`MIN_EXPECTED`] in both samples.
pub fn chi_square_two_sample(a: &[u64], b: &[u64]) -> Result<ChiSquareResult> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::Stats("empty sample".into()));
    }
    let mut table: BTreeMap<u64, (u64, u64)> = BTreeMap::new();
    for &x in a {
        table.entry(x).or_default().0 += 1;
    }
    for &x in b {
        table.entry(x).or_default().1 += 1;
    }
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let share = na.min(nb) / (na + nb);
    let mut bins: Vec<(u64, u64)> = Vec::new();
    let mut pending = (0, 0);
    for (_, (ca, cb)) in table {
        pending = (pending.0 + ca, pending.1 + cb);
        if (pending.0 + pending.1) as f64 * share >= MIN_EXPECTED {
            bins.push(pending);
            pending = (0, 0);
        }
    }
    if pending.0 + pending.1 > 0 {
        match bins.last_mut() {
            Some(last) => *last = (last.0 + pending.0, last.1 + pending.1),
            None => bins.push(pending),
        }
    }
    let mut stat = 0.0;
    for &(ca, cb) in &bins {
        let pooled = (ca + cb) as f64 / (na + nb);
        let (ea, eb) = (na * pooled, nb * pooled);
        stat += (ca as f64 - ea).powi(2) / ea + (cb as f64 - eb).powi(2) / eb;
    }
    let dof = bins.len() - 1;
    Ok(ChiSquareResult {
        stat,
        dof,
        p: upper_tail(stat, dof),
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ZResult {
    pub z: f64,
    /// Two-sided.
    pub p: f64,
}

fn two_sided(z: f64) -> f64 {
    if z.is_nan() {
        1.0
    } else {
        erfc(z.abs() / std::f64::consts::SQRT_2)
    }
}

fn mean_var(x: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mean = x.iter().sum::<f64>() / n;
    let var = if x.len() > 1 {
        x.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)
    } else {
        0.0
    };
    (mean, var)
}

/// Welch statistic for a difference of means in units of its standard error.
pub fn mean_difference_z(a: &[f64], b: &[f64]) -> Result<ZResult> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::Stats("empty sample".into()));
    }
    let ((ma, va), (mb, vb)) = (mean_var(a), mean_var(b));
    let se = (va / a.len() as f64 + vb / b.len() as f64).sqrt();
    let z = if se > 0.0 {
        (ma - mb) / se
    } else if ma == mb {
        0.0
    } else {
        f64::INFINITY
    };
    Ok(ZResult { z, p: two_sided(z) })
}

/// Normal approximation for `hits` successes in `n` trials of probability `p0`.
pub fn binomial_z(hits: u64, n: u64, p0: f64) -> ZResult {
    let n = n as f64;
    let z = (hits as f64 - n * p0) / (n * p0 * (1.0 - p0)).sqrt();
    ZResult { z, p: two_sided(z) }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pearson_examples() {
        let r = chi_square(&[60, 40], &[1.0, 1.0]).unwrap();
        assert!((r.stat - 4.0).abs() < 1e-12);
        assert_eq!(r.dof, 1);
        let exact = chi_square(&[30, 60, 90], &[1.0, 2.0, 3.0]).unwrap();
        assert_eq!(exact.stat, 0.0);
        assert_eq!(exact.p, 1.0);
        assert!(matches!(chi_square(&[3, 3], &[1.0, 1.0]), Err(Error::Stats(_))));
        assert!(chi_square(&[10, 10], &[1.0, 0.0]).is_err());
    }

    #[test]
    fn upper_tail_quantiles() {
        assert!((upper_tail(3.841458820694124, 1) - 0.05).abs() < 1e-9);
        assert!((upper_tail(13.815510557964274, 2) - 0.001).abs() < 1e-9);
    }

    #[test]
    fn two_sample_pooling() {
        let a: Vec<u64> = (0..200).map(|k| k % 4).collect();
        let r = chi_square_two_sample(&a, &a).unwrap();
        assert_eq!(r.stat, 0.0);
        assert_eq!(r.dof, 3);
        // A rare tail value is pooled into the last bin.
        let mut b = a.clone();
        b[0] = 40;
        assert_eq!(chi_square_two_sample(&a, &b).unwrap().dof, 3);
        let constant = chi_square_two_sample(&[0; 50], &[0; 70]).unwrap();
        assert_eq!((constant.dof, constant.p), (0, 1.0));
        let apart = chi_square_two_sample(&[0; 100], &[1; 100]).unwrap();
        assert!((apart.stat - 200.0).abs() < 1e-9);
        assert!(apart.p < 1e-40);
    }

    #[test]
    fn z_statistics() {
        let r = mean_difference_z(&[1.0, 2.0, 3.0], &[1.0, 2.0, 3.0]).unwrap();
        assert_eq!(r.z, 0.0);
        assert!((r.p - 1.0).abs() < 1e-15);
        let b = binomial_z(60, 100, 0.5);
        assert!((b.z - 2.0).abs() < 1e-12);
        assert!((b.p - 0.04550026389635843).abs() < 1e-10, "{}", b.p);
        assert_eq!(mean_difference_z(&[1.0], &[1.0]).unwrap().z, 0.0);
    }
}
