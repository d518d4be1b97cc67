//! Distribution of recombination breakpoint positions on `(0, 1)`.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use statrs::function::beta::{beta_reg, ln_beta};

use crate::error::{Error, Result};
use crate::numfmt::g17;
use crate::rng::open01;

/// Absolute tolerance of the bisection used to invert a CDF.
pub const INVERSION_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub enum BreakpointDensity {
    #[default]
    Uniform,
    Beta {
        alpha: f64,
        beta: f64,
    },
}

impl BreakpointDensity {
    pub fn beta(alpha: f64, beta: f64) -> Result<Self> {
        if !(alpha > 0.0 && beta > 0.0 && alpha.is_finite() && beta.is_finite()) {
            return Err(Error::Density(format!("beta:{alpha},{beta}")));
        }
        Ok(Self::Beta { alpha, beta })
    }

    pub fn pdf(&self, s: f64) -> f64 {
        if !(0.0..=1.0).contains(&s) {
            return 0.0;
        }
        match *self {
            Self::Uniform => 1.0,
            Self::Beta { alpha, beta } => {
                if (s == 0.0 && alpha < 1.0) || (s == 1.0 && beta < 1.0) {
                    return f64::INFINITY;
                }
                ((alpha - 1.0) * s.ln() + (beta - 1.0) * (1.0 - s).ln() - ln_beta(alpha, beta)).exp()
            }
        }
    }

    pub fn cdf(&self, s: f64) -> f64 {
        if s <= 0.0 {
            return 0.0;
        }
        if s >= 1.0 {
            return 1.0;
        }
        match *self {
            Self::Uniform => s,
            Self::Beta { alpha, beta } => beta_reg(alpha, beta, s),
        }
    }

    /// `∫_lo^hi p(s) ds`.
    pub fn mass(&self, lo: f64, hi: f64) -> f64 {
        if hi <= lo {
            return 0.0;
        }
        (self.cdf(hi) - self.cdf(lo)).max(0.0)
    }

    /// Smallest `s` in `[0, 1]` with `cdf(s) ≥ p`.
    pub fn inverse_cdf(&self, p: f64) -> f64 {
        self.inverse_cdf_within(p.clamp(0.0, 1.0), 0.0, 1.0)
    }

    pub(crate) fn inverse_cdf_within(&self, p: f64, lo: f64, hi: f64) -> f64 {
        match *self {
            Self::Uniform => p.clamp(lo, hi),
            Self::Beta { .. } => {
                let (mut lo, mut hi) = (lo, hi);
                let mut iterations = 0;
                while hi - lo > INVERSION_TOL && iterations < 200 {
                    let mid = 0.5 * (lo + hi);
                    if self.cdf(mid) < p {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                    iterations += 1;
                }
                0.5 * (lo + hi)
            }
        }
    }

    /// Draws from the density restricted and renormalised to `(lo, hi)` by
    /// inverting the CDF. The result lies strictly inside the interval.
    pub fn sample_truncated<R: Rng + ?Sized>(&self, lo: f64, hi: f64, rng: &mut R) -> f64 {
        debug_assert!(lo < hi);
        let (c_lo, c_hi) = (self.cdf(lo), self.cdf(hi));
        loop {
            let target = c_lo + open01(rng) * (c_hi - c_lo);
            let s = match *self {
                Self::Uniform => lo + (target - c_lo) / (c_hi - c_lo) * (hi - lo),
                Self::Beta { .. } => self.inverse_cdf_within(target, lo, hi),
            };
            if s > lo && s < hi {
                return s;
            }
        }
    }
}

impl fmt::Display for BreakpointDensity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Self::Uniform => f.write_str("uniform"),
            Self::Beta { alpha, beta } => write!(f, "beta:{},{}", g17(alpha), g17(beta)),
        }
    }
}

/// Parses `uniform` or `beta:<alpha>,<beta>` with positive shapes.
impl FromStr for BreakpointDensity {
    type Err = Error;

    fn from_str(spec: &str) -> Result<Self> {
        let spec = spec.trim();
        if spec == "uniform" {
            return Ok(Self::Uniform);
        }
        let bad = || Error::Density(spec.to_string());
        let params = spec.strip_prefix("beta:").ok_or_else(bad)?;
        let (a, b) = params.split_once(',').ok_or_else(bad)?;
        let alpha: f64 = a.trim().parse().map_err(|_| bad())?;
        let beta: f64 = b.trim().parse().map_err(|_| bad())?;
        Self::beta(alpha, beta).map_err(|_| bad())
    }
}
