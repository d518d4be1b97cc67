//! Test statistics and the engine-equivalence battery.

mod chisq;
mod equivalence;
mod ks;

pub use chisq::{
    binomial_z, chi_square, chi_square_two_sample, mean_difference_z, ChiSquareResult, ZResult, MIN_EXPECTED,
};
pub use equivalence::{
    collect_summaries, compare_summaries, equivalence_between, equivalence_report, thread_pool, EquivalenceReport,
    Simulator,
};
pub use ks::{kolmogorov_survival, ks_one_sample, ks_two_sample, KsResult};

use crate::error::{Error, Result};

/// Outcome of one test at level `alpha`.
#[derive(Clone, Debug, PartialEq)]
pub struct TestReport {
    pub name: String,
    pub n_a: usize,
    pub n_b: usize,
    pub stat: f64,
    pub p: f64,
    pub pass: bool,
}

impl TestReport {
    /// Passes when `p > alpha`.
    pub fn new(name: impl Into<String>, n_a: usize, n_b: usize, stat: f64, p: f64, alpha: f64) -> Self {
        let p = p.clamp(0.0, 1.0);
        Self {
            name: name.into(),
            n_a,
            n_b,
            stat,
            p,
            pass: p > alpha,
        }
    }
}

/// Mean time to the most recent common ancestor and mean total branch
/// length of a Kingman tree over `n` leaves.
pub fn kingman_expectations(n: u32) -> Result<(f64, f64)> {
    if n < 2 {
        return Err(Error::Config(format!("need at least two samples, got {n}")));
    }
    let height = 2.0 * (1.0 - 1.0 / n as f64);
    let length = 2.0 * (1..n).map(|k| 1.0 / k as f64).sum::<f64>();
    Ok((height, length))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kingman_closed_forms() {
        assert_eq!(kingman_expectations(2).unwrap(), (1.0, 2.0));
        let (h, l) = kingman_expectations(6).unwrap();
        assert!((h - 5.0 / 3.0).abs() < 1e-15);
        assert!((l - 2.0 * (1.0 + 0.5 + 1.0 / 3.0 + 0.25 + 0.2)).abs() < 1e-15);
        assert!(kingman_expectations(1000).unwrap().0 < 2.0);
        assert!(kingman_expectations(1).is_err());
    }

    #[test]
    fn report_threshold() {
        assert!(TestReport::new("x", 1, 1, 0.0, 0.5, 0.001).pass);
        assert!(!TestReport::new("x", 1, 1, 0.0, 1.0, 1.0).pass);
    }
}
