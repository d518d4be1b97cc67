use std::fmt::Write as _;

use rayon::prelude::*;

use super::{chi_square_two_sample, ks_two_sample, mean_difference_z, TestReport};
use crate::arg::{summary, SummaryStats};
use crate::backintime::{simulate_backintime_with, EngineOptions};
use crate::config::SimConfig;
use crate::error::{Error, Result};
use crate::numfmt::g17;
use crate::rng::{child_seed, rng_from_seed};
use crate::spatial::simulate_spatial;

/// A simulator whose replicates feed one side of a comparison.
#[derive(Clone, Debug, PartialEq)]
pub enum Simulator {
    Backintime(EngineOptions),
    Spatial,
}

impl Simulator {
    pub fn backintime() -> Self {
        Self::Backintime(EngineOptions::default())
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Backintime(o) if !o.coalesced_prefix_rule => "backintime-no-r1",
            Self::Backintime(_) => "backintime",
            Self::Spatial => "spatial",
        }
    }
}

/// A rayon pool sized by `ARGSIM_THREADS` when it is set to a positive integer.
pub fn thread_pool() -> Result<rayon::ThreadPool> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(k) = std::env::var("ARGSIM_THREADS")
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|k| *k > 0)
    {
        builder = builder.num_threads(k);
    }
    builder.build().map_err(|e| Error::Config(format!("thread pool: {e}")))
}

/// Summaries of `reps` replicates; replicate `r` runs on seed
/// `child_seed(child_seed(config.seed, stream), r)`.
pub fn collect_summaries(
    config: &SimConfig,
    simulator: &Simulator,
    stream: u64,
    reps: u64,
    sites: &[f64],
) -> Result<Vec<SummaryStats>> {
    config.validate()?;
    let root = child_seed(config.seed, stream);
    thread_pool()?.install(|| {
        (0..reps)
            .into_par_iter()
            .map(|r| {
                let mut rng = rng_from_seed(child_seed(root, r));
                let arg = match simulator {
                    Simulator::Backintime(options) => simulate_backintime_with(config, options, &mut rng)?,
                    Simulator::Spatial => simulate_spatial(config, &mut rng)?,
                };
                Ok(summary(&arg, sites))
            })
            .collect()
    })
}

/// The battery of two-sample tests between engines.
#[derive(Clone, Debug, PartialEq)]
pub struct EquivalenceReport {
    pub engine_a: String,
    pub engine_b: String,
    pub alpha: f64,
    pub tests: Vec<TestReport>,
}

impl EquivalenceReport {
    pub fn passed(&self) -> bool {
        self.tests.iter().all(|t| t.pass)
    }

    pub fn test(&self, name: &str) -> Option<&TestReport> {
        self.tests.iter().find(|t| t.name == name)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("statistic,engineA_n,engineB_n,stat,p,pass\n");
        for t in &self.tests {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{}",
                t.name,
                t.n_a,
                t.n_b,
                g17(t.stat),
                g17(t.p),
                t.pass
            );
        }
        out
    }

    pub fn to_table(&self) -> String {
        let mut out = format!(
            "{} vs {}, alpha = {} per test ({} tests; Bonferroni family level {})\n",
            self.engine_a,
            self.engine_b,
            self.alpha,
            self.tests.len(),
            self.alpha * self.tests.len() as f64
        );
        let _ = writeln!(
            out,
            "{:<18} {:>9} {:>9} {:>12} {:>12}  result",
            "statistic", "n_a", "n_b", "stat", "p"
        );
        for t in &self.tests {
            let _ = writeln!(
                out,
                "{:<18} {:>9} {:>9} {:>12.6} {:>12.6}  {}",
                t.name,
                t.n_a,
                t.n_b,
                t.stat,
                t.p,
                if t.pass { "pass" } else { "FAIL" }
            );
        }
        out
    }
}

pub fn compare_summaries(a: &[SummaryStats], b: &[SummaryStats], sites: &[f64], alpha: f64) -> Result<Vec<TestReport>> {
    let (na, nb) = (a.len(), b.len());
    let report = |name: String, stat: f64, p: f64| TestReport::new(name, na, nb, stat, p, alpha);
    let column = |xs: &[SummaryStats], f: &dyn Fn(&SummaryStats) -> f64| xs.iter().map(f).collect::<Vec<f64>>();
    let mut tests = Vec::new();
    for &s in sites {
        let pick = |x: &SummaryStats| x.tmrca(s).expect("site was summarized");
        let r = ks_two_sample(&column(a, &pick), &column(b, &pick))?;
        tests.push(report(format!("tmrca@{s}"), r.d, r.p));
    }
    for &s in sites {
        let pick = |x: &SummaryStats| x.length(s).expect("site was summarized");
        let r = ks_two_sample(&column(a, &pick), &column(b, &pick))?;
        tests.push(report(format!("length@{s}"), r.d, r.p));
    }
    let gmrca = |x: &SummaryStats| x.grand_mrca_time;
    let r = ks_two_sample(&column(a, &gmrca), &column(b, &gmrca))?;
    tests.push(report("gmrca".into(), r.d, r.p));

    let counts =
        |xs: &[SummaryStats], f: fn(&SummaryStats) -> usize| xs.iter().map(|x| f(x) as u64).collect::<Vec<u64>>();
    let r = chi_square_two_sample(&counts(a, |x| x.breakpoint_count), &counts(b, |x| x.breakpoint_count))?;
    tests.push(report("breakpoints".into(), r.stat, r.p));
    let r = chi_square_two_sample(&counts(a, |x| x.event_count), &counts(b, |x| x.event_count))?;
    tests.push(report("events".into(), r.stat, r.p));

    let bp = |x: &SummaryStats| x.breakpoint_count as f64;
    let r = mean_difference_z(&column(a, &bp), &column(b, &bp))?;
    tests.push(report("mean_breakpoints".into(), r.z, r.p));
    Ok(tests)
}

/// Runs `a` on stream 0 and `b` on stream 1 of `config.seed` and compares.
pub fn equivalence_between(
    config: &SimConfig,
    a: &Simulator,
    b: &Simulator,
    reps: u64,
    sites: &[f64],
    alpha: f64,
) -> Result<EquivalenceReport> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::Config(format!("alpha {alpha} outside (0, 1]")));
    }
    if let Some(s) = sites.iter().find(|s| !(**s >= 0.0 && **s < 1.0)) {
        return Err(Error::Config(format!("site {s} outside [0, 1)")));
    }
    let left = collect_summaries(config, a, 0, reps, sites)?;
    let right = collect_summaries(config, b, 1, reps, sites)?;
    Ok(EquivalenceReport {
        engine_a: a.name().into(),
        engine_b: b.name().into(),
        alpha,
        tests: compare_summaries(&left, &right, sites, alpha)?,
    })
}

/// Back-in-time engine against the spatial engine.
pub fn equivalence_report(config: &SimConfig, reps: u64, sites: &[f64], alpha: f64) -> Result<EquivalenceReport> {
    equivalence_between(
        config,
        &Simulator::backintime(),
        &Simulator::Spatial,
        reps,
        sites,
        alpha,
    )
}
