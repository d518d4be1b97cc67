use serde::{Deserialize, Serialize};

use crate::density::BreakpointDensity;
use crate::error::{Error, Result};
use crate::rng::{child_seed, rng_from_seed, SimRng};

/// Hard cap on the number of events in one simulated path.
pub const DEFAULT_EVENT_CAP: u64 = 10_000_000;

/// Parameters of one simulated replicate.
#[derive(Clone, Debug, PartialEq)]
pub struct SimConfig {
    /// Sample size `N`.
    pub n_samples: u32,
    /// Population-scaled recombination rate `ρ = 4 N_e r`.
    pub rho: f64,
    pub density: BreakpointDensity,
    /// Root seed of the run.
    pub seed: u64,
    pub replicate_index: u64,
}

impl SimConfig {
    pub fn new(n_samples: u32, rho: f64) -> Self {
        Self {
            n_samples,
            rho,
            density: BreakpointDensity::Uniform,
            seed: 0,
            replicate_index: 0,
        }
    }

    pub fn with_density(mut self, density: BreakpointDensity) -> Self {
        self.density = density;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_replicate(mut self, replicate_index: u64) -> Self {
        self.replicate_index = replicate_index;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_samples < 2 {
            return Err(Error::Config(format!(
                "sample size must be at least 2, got {}",
                self.n_samples
            )));
        }
        if !(self.rho >= 0.0 && self.rho.is_finite()) {
            return Err(Error::Config(format!(
                "recombination rate must be finite and non-negative, got {}",
                self.rho
            )));
        }
        Ok(())
    }

    /// Seed of this replicate, derived from the root seed.
    pub fn replicate_seed(&self) -> u64 {
        child_seed(self.seed, self.replicate_index)
    }

    pub fn rng(&self) -> SimRng {
        rng_from_seed(self.replicate_seed())
    }
}

/// Which simulator produced a path.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Engine {
    Backintime,
    Spatial,
}

impl Engine {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Backintime => "backintime",
            Self::Spatial => "spatial",
        }
    }
}

impl std::str::FromStr for Engine {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "backintime" => Ok(Self::Backintime),
            "spatial" => Ok(Self::Spatial),
            other => Err(Error::Config(format!("unknown engine `{other}`"))),
        }
    }
}

impl std::fmt::Display for Engine {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}
