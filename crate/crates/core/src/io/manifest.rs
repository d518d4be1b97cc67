use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::FORMAT_VERSION;
use crate::config::{Engine, SimConfig};
use crate::error::{Error, Result};
use crate::rng::child_seed;

/// Runs with at most this many replicates are written as one stream.
pub const STREAM_LIMIT: u64 = 100;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Layout {
    /// One file holding every replicate.
    Stream,
    /// One file per replicate inside a directory.
    Directory,
}

impl Layout {
    pub fn for_reps(reps: u64) -> Self {
        if reps <= STREAM_LIMIT {
            Self::Stream
        } else {
            Self::Directory
        }
    }
}

/// Everything needed to regenerate a run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub format_version: u32,
    pub tool_version: String,
    pub engine: Engine,
    pub samples: u32,
    pub rho: f64,
    pub density: String,
    pub seed: u64,
    pub reps: u64,
    pub layout: Layout,
    pub replicate_seeds: Vec<u64>,
}

impl RunManifest {
    pub fn new(config: &SimConfig, engine: Engine, reps: u64) -> Self {
        Self {
            format_version: FORMAT_VERSION,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            engine,
            samples: config.n_samples,
            rho: config.rho,
            density: config.density.to_string(),
            seed: config.seed,
            reps,
            layout: Layout::for_reps(reps),
            replicate_seeds: (0..reps).map(|r| child_seed(config.seed, r)).collect(),
        }
    }

    pub fn config(&self) -> Result<SimConfig> {
        let config = SimConfig::new(self.samples, self.rho)
            .with_density(self.density.parse()?)
            .with_seed(self.seed);
        config.validate()?;
        Ok(config)
    }

    /// Checks the version and that the stored seeds are the derived ones.
    pub fn check(&self) -> Result<()> {
        if self.format_version != FORMAT_VERSION {
            return Err(Error::Config(format!(
                "manifest format_version {} is not {FORMAT_VERSION}",
                self.format_version
            )));
        }
        self.config()?;
        let derived = (0..self.reps).map(|r| child_seed(self.seed, r));
        if self.replicate_seeds.len() as u64 != self.reps || !derived.eq(self.replicate_seeds.iter().copied()) {
            return Err(Error::Config(
                "manifest replicate seeds do not follow from the root seed".into(),
            ));
        }
        if self.layout != Layout::for_reps(self.reps) {
            return Err(Error::Config(format!(
                "layout {:?} does not match {} replicates",
                self.layout, self.reps
            )));
        }
        Ok(())
    }

    /// `<out>.manifest.json` for a stream, `<out>/manifest.json` for a directory.
    pub fn path_for(&self, out: &Path) -> PathBuf {
        match self.layout {
            Layout::Stream => {
                let mut name = out.as_os_str().to_owned();
                name.push(".manifest.json");
                PathBuf::from(name)
            }
            Layout::Directory => out.join("manifest.json"),
        }
    }

    pub fn replicate_file(out: &Path, r: u64) -> PathBuf {
        out.join(format!("rep{r:06}.jsonl"))
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("manifest serializes");
        s.push('\n');
        s
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let manifest: Self = serde_json::from_str(&text).map_err(|e| Error::Parse {
            path: path.to_path_buf(),
            line: e.line(),
            message: e.to_string(),
        })?;
        manifest.check()?;
        Ok(manifest)
    }
}
