//! The `argsim` command line.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use crate::arg::{local_tree, validate_arg, validate_events};
use crate::backintime::simulate_backintime;
use crate::config::{Engine, SimConfig, DEFAULT_EVENT_CAP};
use crate::density::BreakpointDensity;
use crate::error::{Error, Result};
use crate::io::{
    log_files, parse_logs, read_logs, states_sha256, trace_lines, write_log, Layout, LogHeader, RunManifest,
};
use crate::spatial::simulate_spatial_traced;
use crate::stats::{equivalence_report, thread_pool};

#[derive(Debug, Parser)]
#[command(name = "argsim", version, about = "Ancestral recombination graph simulation")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Simulate replicates and write event logs plus a manifest.
    Simulate(SimulateArgs),
    /// Replay event logs and check every path rule.
    Validate {
        /// A log file or a directory of logs.
        path: PathBuf,
    },
    /// Print the local tree at one site.
    Tree(TreeArgs),
    /// Compare the two engines on a battery of statistics.
    Compare(CompareArgs),
}

#[derive(Debug, clap::Args)]
pub struct SimulateArgs {
    #[arg(long, default_value = "backintime")]
    pub engine: Engine,
    #[arg(long, required_unless_present = "manifest")]
    pub samples: Option<u32>,
    #[arg(long, required_unless_present = "manifest")]
    pub rho: Option<f64>,
    #[arg(long, default_value = "uniform")]
    pub density: BreakpointDensity,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 1)]
    pub reps: u64,
    /// Stream file, or directory when there are more than 100 replicates.
    #[arg(long)]
    pub out: PathBuf,
    /// Rerun a previous manifest; the other run flags are ignored.
    #[arg(long)]
    pub manifest: Option<PathBuf>,
    /// Write the spatial engine's trace transitions as JSON lines.
    #[arg(long)]
    pub trace: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum TreeFormat {
    Newick,
    Levels,
}

#[derive(Debug, clap::Args)]
pub struct TreeArgs {
    pub path: PathBuf,
    #[arg(long)]
    pub site: f64,
    #[arg(long, value_enum, default_value = "newick")]
    pub format: TreeFormat,
    /// Position of the replicate within the log.
    #[arg(long, default_value_t = 0)]
    pub replicate: usize,
}

#[derive(Debug, clap::Args)]
pub struct CompareArgs {
    #[arg(long)]
    pub samples: u32,
    #[arg(long)]
    pub rho: f64,
    #[arg(long, default_value = "uniform")]
    pub density: BreakpointDensity,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 10_000)]
    pub reps: u64,
    #[arg(long, value_delimiter = ',', default_value = "0,0.25,0.5,0.75")]
    pub sites: Vec<f64>,
    #[arg(long, default_value_t = 0.001)]
    pub alpha: f64,
    /// Writes `<out>.txt` and `<out>.csv`.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Runs a parsed command, printing to `stdout`; returns the exit code.
pub fn run(cli: Cli, stdout: &mut dyn Write) -> Result<i32> {
    match cli.command {
        Command::Simulate(args) => cmd_simulate(&args, stdout),
        Command::Validate { path } => cmd_validate(&path, stdout),
        Command::Tree(args) => cmd_tree(&args, stdout),
        Command::Compare(args) => cmd_compare(&args, stdout),
    }
}

fn say(stdout: &mut dyn Write, text: &str) -> Result<()> {
    stdout.write_all(text.as_bytes()).map_err(|e| Error::io("<stdout>", e))
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

/// Log text and trace lines of replicate `r`.
fn simulate_replicate(
    manifest: &RunManifest,
    config: &SimConfig,
    r: u64,
    want_trace: bool,
) -> Result<(String, String)> {
    let config = config.clone().with_replicate(r);
    let mut rng = config.rng();
    let (arg, traces) = match manifest.engine {
        Engine::Backintime => (simulate_backintime(&config, &mut rng)?, String::new()),
        Engine::Spatial => {
            let run = simulate_spatial_traced(&config, DEFAULT_EVENT_CAP, &mut rng)?;
            let traces = if want_trace {
                trace_lines(r, &run.traces)
            } else {
                String::new()
            };
            (run.arg, traces)
        }
    };
    let report = validate_arg(&arg);
    if !report.passed() {
        return Err(Error::Validation(format!("replicate {r}: {report}")));
    }
    Ok((
        write_log(&LogHeader::for_run(&config, manifest.engine, &arg), &arg),
        traces,
    ))
}

pub fn cmd_simulate(args: &SimulateArgs, stdout: &mut dyn Write) -> Result<i32> {
    let manifest = match &args.manifest {
        Some(path) => RunManifest::load(path)?,
        None => {
            let config = SimConfig::new(args.samples.unwrap_or(0), args.rho.unwrap_or(f64::NAN))
                .with_density(args.density)
                .with_seed(args.seed);
            config.validate()?;
            if args.reps == 0 {
                return Err(Error::Config("at least one replicate is needed".into()));
            }
            RunManifest::new(&config, args.engine, args.reps)
        }
    };
    if args.trace.is_some() && manifest.engine != Engine::Spatial {
        return Err(Error::Config("only the spatial engine records traces".into()));
    }
    let config = manifest.config()?;
    let out = &args.out;
    let mut stream = String::new();
    let mut trace = String::new();
    if manifest.layout == Layout::Directory {
        fs::create_dir_all(out).map_err(|e| Error::io(out, e))?;
    }
    let pool = thread_pool()?;
    let ids: Vec<u64> = (0..manifest.reps).collect();
    for chunk in ids.chunks(1024) {
        let texts: Vec<(String, String)> = pool.install(|| {
            chunk
                .par_iter()
                .map(|&r| simulate_replicate(&manifest, &config, r, args.trace.is_some()))
                .collect::<Result<_>>()
        })?;
        for (&r, (log, lines)) in chunk.iter().zip(texts) {
            match manifest.layout {
                Layout::Stream => stream.push_str(&log),
                Layout::Directory => write_file(&RunManifest::replicate_file(out, r), &log)?,
            }
            trace.push_str(&lines);
        }
    }
    if manifest.layout == Layout::Stream {
        write_file(out, &stream)?;
    }
    if let Some(path) = &args.trace {
        write_file(path, &trace)?;
    }
    let manifest_path = manifest.path_for(out);
    write_file(&manifest_path, &manifest.to_json())?;
    say(
        stdout,
        &format!(
            "{} replicate(s) from the {} engine written to {} (manifest {})\n",
            manifest.reps,
            manifest.engine,
            out.display(),
            manifest_path.display()
        ),
    )?;
    Ok(0)
}

pub fn cmd_validate(path: &Path, stdout: &mut dyn Write) -> Result<i32> {
    let mut ok = true;
    let files = log_files(path)?;
    if files.is_empty() {
        return Err(Error::Config(format!("no logs under {}", path.display())));
    }
    for file in files {
        let text = fs::read_to_string(&file).map_err(|e| Error::io(&file, e))?;
        for record in parse_logs(&text, &file)? {
            let report = validate_events(record.header.n_samples, &record.events);
            let mut line = format!(
                "{}:{} replicate {}: {report}",
                file.display(),
                record.line,
                record.header.replicate
            );
            if !line.ends_with('\n') {
                line.push('\n');
            }
            ok &= report.passed();
            if report.passed() {
                let arg = crate::arg::Arg::replay(record.header.n_samples, &record.events)?;
                if states_sha256(&arg) != record.header.states_sha256 {
                    ok = false;
                    line.push_str("  state checksum mismatch\n");
                }
            }
            say(stdout, &line)?;
        }
    }
    Ok(if ok { 0 } else { 1 })
}

pub fn cmd_tree(args: &TreeArgs, stdout: &mut dyn Write) -> Result<i32> {
    if !(args.site >= 0.0 && args.site < 1.0) {
        return Err(Error::Config(format!("site {} outside [0, 1)", args.site)));
    }
    let records = read_logs(&args.path)?;
    let record = records.get(args.replicate).ok_or_else(|| {
        Error::Config(format!(
            "replicate position {} out of range ({} in the log)",
            args.replicate,
            records.len()
        ))
    })?;
    let tree = local_tree(&record.to_arg()?, args.site);
    let text = match args.format {
        TreeFormat::Newick => tree.to_newick() + "\n",
        TreeFormat::Levels => tree.to_levels_csv(),
    };
    say(stdout, &text)?;
    Ok(0)
}

pub fn cmd_compare(args: &CompareArgs, stdout: &mut dyn Write) -> Result<i32> {
    let config = SimConfig::new(args.samples, args.rho)
        .with_density(args.density)
        .with_seed(args.seed);
    let report = equivalence_report(&config, args.reps, &args.sites, args.alpha)?;
    let table = report.to_table();
    say(stdout, &table)?;
    if let Some(out) = &args.out {
        let with = |ext: &str| {
            let mut name = out.as_os_str().to_owned();
            name.push(ext);
            PathBuf::from(name)
        };
        write_file(&with(".txt"), &table)?;
        write_file(&with(".csv"), &report.to_csv())?;
    }
    Ok(if report.passed() { 0 } else { 1 })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(line: &str) -> std::result::Result<Cli, clap::Error> {
        Cli::try_parse_from(std::iter::once("argsim").chain(line.split_whitespace()))
    }

    fn run_args(line: &str) -> (Result<i32>, String) {
        let cli = parse(line).unwrap();
        let mut out = Vec::new();
        let code = run(cli, &mut out);
        (code, String::from_utf8(out).unwrap())
    }

    #[test]
    fn kingman_pair_log() {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("pair.jsonl");
        let o = out.to_str().unwrap();
        let (code, _) = run_args(&format!(
            "simulate --engine backintime --samples 2 --rho 0 --seed 7 --reps 1 --out {o}"
        ));
        assert_eq!(code.unwrap(), 0);
        let text = fs::read_to_string(&out).unwrap();
        assert_eq!(text.lines().count(), 2);
        assert!(text.lines().nth(1).unwrap().contains("\"type\":\"coal\""));
        assert!(dir.path().join("pair.jsonl.manifest.json").exists());
        let (code, report) = run_args(&format!("validate {o}"));
        assert_eq!(code.unwrap(), 0);
        assert!(report.contains("PASS (1 events)"));
    }

    #[test]
    fn density_flag_is_checked() {
        assert!(parse("simulate --samples 3 --rho 1 --density beta:2,2 --out x").is_ok());
        assert!(parse("simulate --samples 3 --rho 1 --density beta:0,1 --out x").is_err());
        assert!(parse("simulate --rho 1 --out x").is_err());
    }

    #[test]
    fn trees_from_a_log() {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("run.jsonl");
        let o = out.to_str().unwrap();
        run_args(&format!(
            "simulate --engine spatial --samples 4 --rho 1 --seed 3 --reps 3 --out {o}"
        ))
        .0
        .unwrap();
        let (code, newick) = run_args(&format!("tree {o} --site 0.5 --replicate 2"));
        assert_eq!(code.unwrap(), 0);
        assert!(newick.trim_end().ends_with(");"));
        let (_, levels) = run_args(&format!("tree {o} --site 0 --format levels"));
        assert!(levels.starts_with("time,partition\n0,\"{1} {2} {3} {4}\"\n"));
        assert!(run_args(&format!("tree {o} --site 1")).0.is_err());
        assert!(run_args(&format!("tree {o} --site 0.2 --replicate 3")).0.is_err());
    }

    #[test]
    fn traces_need_the_spatial_engine() {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("run.jsonl");
        let trace = dir.path().join("trace.jsonl");
        let (o, t) = (out.to_str().unwrap(), trace.to_str().unwrap());
        assert!(run_args(&format!("simulate --samples 3 --rho 1 --out {o} --trace {t}"))
            .0
            .is_err());
        let (code, _) = run_args(&format!(
            "simulate --engine spatial --samples 3 --rho 3 --seed 1 --reps 5 --out {o} --trace {t}"
        ));
        assert_eq!(code.unwrap(), 0);
        let lines = fs::read_to_string(&trace).unwrap();
        assert!(lines.lines().all(|l| l.starts_with("{\"replicate\":")));
        assert!(lines.lines().any(|l| l.contains("\"j\":0,")));
    }
}
