//! Acceptance gate: one line per criterion, nonzero exit if any fails.
//!
//! Every random quantity is drawn from a pinned seed.

use std::time::Instant;

use approx::relative_eq;
use argsim::arg::validate_arg;
use argsim::backintime::{simulate_backintime, total_rate, EngineOptions};
use argsim::cli::{run, Cli};
use argsim::rng::rng_from_seed;
use argsim::spatial::{
    accept_breakpoint, next_breakpoint_given_length, sample_recomb_location, simulate_spatial, trace_lineage,
    PartialGraph,
};
use argsim::stats::{
    binomial_z, chi_square, collect_summaries, equivalence_between, equivalence_report, kingman_expectations,
    ks_one_sample, Simulator,
};
use argsim::{AncestralFn, BreakpointDensity, SimConfig, State, TypeSet};
use clap::Parser;

const ALPHA: f64 = 0.001;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

/// The frozen four-leaf tree: {1,2} at 0.3, {3,4} at 0.7, root at 1.5.
fn frozen_tree() -> PartialGraph {
    PartialGraph::from_tree(4, &[(0.3, 0, 1), (0.7, 2, 3), (1.5, 4, 5)]).expect("valid merges")
}

fn kingman_marginals() -> Outcome {
    let config = SimConfig::new(6, 0.0).with_seed(101);
    let (height, length) = kingman_expectations(6).unwrap();
    let mut detail = Vec::new();
    let mut pass = true;
    for sim in [Simulator::backintime(), Simulator::Spatial] {
        let xs = collect_summaries(&config, &sim, 0, 100_000, &[0.0]).unwrap();
        let n = xs.len() as f64;
        let h = xs.iter().map(|x| x.tmrca(0.0).unwrap()).sum::<f64>() / n;
        let l = xs.iter().map(|x| x.length(0.0).unwrap()).sum::<f64>() / n;
        pass &= ((h - height) / height).abs() < 0.02 && ((l - length) / length).abs() < 0.02;
        detail.push(format!(
            "{}: tmrca {h:.4}/{height:.4}, length {l:.4}/{length:.4}",
            sim.name()
        ));
    }
    outcome(pass, detail.join("; "))
}

fn engine_equivalence() -> Outcome {
    let config = SimConfig::new(4, 1.0).with_seed(202);
    let report = equivalence_report(&config, 100_000, &[0.0, 0.5], ALPHA).unwrap();
    let z = report.test("mean_breakpoints").unwrap().stat;
    let failing: Vec<&str> = report
        .tests
        .iter()
        .filter(|t| !t.pass)
        .map(|t| t.name.as_str())
        .collect();
    let min_p = report.tests.iter().map(|t| t.p).fold(1.0, f64::min);
    outcome(
        failing.is_empty() && z.abs() <= 3.0,
        format!(
            "{} tests, min p {min_p:.4}, mean |Bp| z = {z:.3}, failing {failing:?}",
            report.tests.len()
        ),
    )
}

fn breakpoint_law() -> Outcome {
    let graph = frozen_tree();
    let length = graph.length();
    let rho = 1.0;
    let rate = 0.5 * rho * length;
    let mut rng = rng_from_seed(303);
    let draws: Vec<f64> = (0..1_000_000)
        .map(|_| next_breakpoint_given_length(length, 0.0, rho, &BreakpointDensity::Uniform, &mut rng))
        .collect();
    let atoms = draws.iter().filter(|s| **s >= 1.0).count() as u64;
    let interior: Vec<f64> = draws.into_iter().filter(|s| *s < 1.0).collect();
    let scale = 1.0 - (-rate).exp();
    let ks = ks_one_sample(&interior, |s| (1.0 - (-rate * s.clamp(0.0, 1.0)).exp()) / scale).unwrap();
    let atom = binomial_z(atoms, 1_000_000, (-rate).exp());
    outcome(
        length == 4.0 && ks.p > ALPHA && atom.z.abs() <= 3.0,
        format!(
            "L = {length}, KS p {:.4}, atom frequency {:.5} (z = {:.3})",
            ks.p,
            atoms as f64 / 1e6,
            atom.z
        ),
    )
}

fn uniform_location() -> Outcome {
    let graph = frozen_tree();
    let branches: Vec<(usize, f64, f64)> = graph
        .branches()
        .iter()
        .filter(|b| b.hi.is_finite())
        .map(|b| (b.id, b.lo, b.hi))
        .collect();
    let mut counts = vec![0u64; branches.len()];
    let mut latitudes = Vec::with_capacity(100_000);
    let mut rng = rng_from_seed(404);
    for _ in 0..100_000 {
        let (e, t) = sample_recomb_location(&graph, &mut rng);
        let k = branches.iter().position(|b| b.0 == e).expect("a finite branch");
        counts[k] += 1;
        latitudes.push(t);
    }
    let weights: Vec<f64> = branches.iter().map(|(_, lo, hi)| hi - lo).collect();
    let chi = chi_square(&counts, &weights).unwrap();
    let total: f64 = weights.iter().sum();
    let cdf = |t: f64| {
        branches
            .iter()
            .map(|(_, lo, hi)| (t.min(*hi) - lo).max(0.0))
            .sum::<f64>()
            / total
    };
    let ks = ks_one_sample(&latitudes, cdf).unwrap();
    outcome(
        chi.p > ALPHA && ks.p > ALPHA,
        format!(
            "branch chi-square p {:.4} ({} dof), latitude KS p {:.4}",
            chi.p, chi.dof, ks.p
        ),
    )
}

fn free_mode_law() -> Outcome {
    // Frozen partial graph: the tree above with two breakpoints folded in.
    let mut graph = frozen_tree();
    let mut rng = rng_from_seed(505);
    for s in [0.3, 0.6] {
        let start = sample_recomb_location(&graph, &mut rng);
        let trace = trace_lineage(&mut graph, start, s, 2.0, &BreakpointDensity::Uniform, &mut rng).unwrap();
        accept_breakpoint(&mut graph, s, &trace).unwrap();
    }
    let i = graph.current_index();
    let (fork, t0) = graph
        .local_tree_branches()
        .filter(|b| b.lo < 0.2 && 0.2 < b.hi.min(graph.beta()))
        .map(|b| (b.id, 0.2))
        .next()
        .expect("a branch spans latitude 0.2");
    let old: Vec<(f64, f64)> = graph.branches().iter().map(|b| (b.lo, b.hi)).collect();
    let mut rng = rng_from_seed(506);
    let firsts: Vec<f64> = (0..100_000)
        .map(|_| {
            let mut g = graph.clone();
            let trace = trace_lineage(&mut g, (fork, t0), 0.9, 2.0, &BreakpointDensity::Uniform, &mut rng).unwrap();
            trace.steps[1].latitude
        })
        .collect();
    // The fork splits one branch in two at t0, which leaves the live count unchanged.
    let cdf = |t: f64| {
        let exposure: f64 = old.iter().map(|(lo, hi)| (t.min(*hi) - lo.max(t0)).max(0.0)).sum();
        1.0 - (-exposure).exp()
    };
    let ks = ks_one_sample(&firsts, cdf).unwrap();
    outcome(
        ks.p > ALPHA,
        format!("graph X^S_{i} with {} branches, KS p {:.4}", old.len(), ks.p),
    )
}

fn structural_validation() -> Outcome {
    let rhos = [0.0, 0.5, 2.0];
    let mut failures = [0usize; 2];
    for seed in 0..10_000u64 {
        let n = 2 + (seed % 5) as u32;
        let rho = rhos[(seed / 5 % 3) as usize];
        let config = SimConfig::new(n, rho).with_seed(seed);
        let a = simulate_backintime(&config, &mut config.rng()).unwrap();
        let b = simulate_spatial(&config, &mut config.rng()).unwrap();
        failures[0] += !validate_arg(&a).passed() as usize;
        failures[1] += !validate_arg(&b).passed() as usize;
    }
    outcome(
        failures == [0, 0],
        format!(
            "invalid paths: backintime {}, spatial {} of 10000 each",
            failures[0], failures[1]
        ),
    )
}

fn set(labels: &[u32]) -> TypeSet {
    labels.iter().copied().collect()
}

fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    fn step(f: &dyn Fn(f64) -> f64, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, depth: u32) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        if depth == 0 || (left + right - whole).abs() < 1e-15 {
            return left + right + (left + right - whole) / 15.0;
        }
        step(f, a, m, fa, flm, fm, left, depth - 1) + step(f, m, b, fm, frm, fb, right, depth - 1)
    }
    let m = 0.5 * (a + b);
    let (fa, fm, fb) = (f(a), f(m), f(b));
    step(f, a, b, fa, fm, fb, (b - a) / 6.0 * (fa + 4.0 * fm + fb), 40)
}

fn rate_oracle() -> Outcome {
    let uniform = BreakpointDensity::Uniform;
    let beta22 = BreakpointDensity::beta(2.0, 2.0).unwrap();
    let f = |steps: &[(f64, &[u32])]| {
        AncestralFn::from_steps(&steps.iter().map(|(s, l)| (*s, set(l))).collect::<Vec<_>>()).unwrap()
    };

    // Three singletons: 3 pairs plus three unit-length intervals at ρ/2 = 1.
    let x1 = State::initial(3);
    // {1,2} fully coalesced on [0, 0.3): the first lineage may only recombine
    // right of 0.3. q = 1 + 0.75·(0.7 + 0.7).
    let x2 = State::new(
        2,
        vec![f(&[(0.0, &[1, 2]), (0.3, &[1])]), f(&[(0.0, &[]), (0.3, &[2])])],
    )
    .unwrap();
    // Active intervals (0, 0.4), (0, 1), (0.8, 1) under Beta(2,2), whose CDF is
    // 3s² − 2s³: masses 0.352, 1, 0.104. q = 3 + 1.5·1.456.
    let x3 = State::new(
        3,
        vec![
            f(&[(0.0, &[1, 2]), (0.4, &[])]),
            f(&[(0.0, &[3]), (0.4, &[1, 2, 3]), (0.8, &[3])]),
            f(&[(0.0, &[]), (0.8, &[1, 2])]),
        ],
    )
    .unwrap();
    let cases = [
        (&x1, 2.0, &uniform, 6.0, vec![(0.0, 1.0); 3]),
        (&x2, 1.5, &uniform, 2.05, vec![(0.3, 1.0), (0.3, 1.0)]),
        (&x3, 3.0, &beta22, 5.184, vec![(0.0, 0.4), (0.0, 1.0), (0.8, 1.0)]),
    ];
    let mut pass = true;
    let mut detail = Vec::new();
    for (k, (x, rho, density, by_hand, intervals)) in cases.iter().enumerate() {
        let rates = total_rate(x, *rho, density);
        let pdf = |s: f64| density.pdf(s);
        let quadrature = x.len() as f64 * (x.len() as f64 - 1.0) / 2.0
            + intervals
                .iter()
                .map(|(b, e)| 0.5 * rho * adaptive_simpson(&pdf, *b, *e))
                .sum::<f64>();
        let ok = relative_eq!(rates.total, *by_hand, max_relative = 1e-12)
            && relative_eq!(rates.total, quadrature, max_relative = 1e-12)
            && rates.intervals == *intervals;
        pass &= ok;
        detail.push(format!(
            "x{}: q = {} (hand {by_hand}, quadrature {quadrature})",
            k + 1,
            rates.total
        ));
    }
    outcome(pass, detail.join("; "))
}

fn run_cli(line: &str) -> (i32, Vec<u8>) {
    let cli = Cli::try_parse_from(std::iter::once("argsim").chain(line.split_whitespace())).unwrap();
    let mut out = Vec::new();
    let code = run(cli, &mut out).unwrap();
    (code, out)
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let p = |name: &str| dir.path().join(name).to_str().unwrap().to_string();
    let read = |name: &str| std::fs::read(dir.path().join(name)).unwrap();
    let mut same = true;

    run_cli(&format!(
        "simulate --engine spatial --samples 5 --rho 2 --density beta:2,3 --seed 808 --reps 40 --out {} --trace {}",
        p("a.jsonl"),
        p("a.trace")
    ));
    run_cli(&format!(
        "simulate --manifest {} --out {} --trace {}",
        p("a.jsonl.manifest.json"),
        p("b.jsonl"),
        p("b.trace")
    ));
    for (x, y) in [
        ("a.jsonl", "b.jsonl"),
        ("a.trace", "b.trace"),
        ("a.jsonl.manifest.json", "b.jsonl.manifest.json"),
    ] {
        same &= read(x) == read(y);
    }

    run_cli(&format!(
        "simulate --samples 4 --rho 1 --seed 809 --reps 150 --out {}",
        p("d1")
    ));
    run_cli(&format!(
        "simulate --manifest {} --out {}",
        p("d1/manifest.json"),
        p("d2")
    ));
    for r in [0, 77, 149] {
        let name = format!("rep{r:06}.jsonl");
        same &= read(&format!("d1/{name}")) == read(&format!("d2/{name}"));
    }
    same &= read("d1/manifest.json") == read("d2/manifest.json");

    let tree = |path: String| run_cli(&format!("tree {path} --site 0.5 --format levels")).1;
    same &= tree(p("a.jsonl")) == tree(p("b.jsonl"));
    let validate = |path: String| run_cli(&format!("validate {path}"));
    let (code_a, _) = validate(p("a.jsonl"));
    let (code_d, _) = validate(p("d2"));

    let compare = |out: String| {
        run_cli(&format!(
            "compare --samples 3 --rho 1 --seed 810 --reps 500 --sites 0,0.5 --out {out}"
        ))
    };
    same &= compare(p("c1")).1 == compare(p("c2")).1;
    same &= read("c1.csv") == read("c2.csv");

    outcome(
        same && code_a == 0 && code_d == 0,
        format!("simulate/tree/compare reruns byte-identical: {same}; validate exit codes {code_a}, {code_d}"),
    )
}

fn mutation_sensitivity() -> Outcome {
    let config = SimConfig::new(4, 1.0).with_seed(202);
    let broken = Simulator::Backintime(EngineOptions {
        coalesced_prefix_rule: false,
        ..EngineOptions::default()
    });
    let report = equivalence_between(&config, &Simulator::backintime(), &broken, 100_000, &[0.0, 0.5], ALPHA).unwrap();
    let bp = report.test("breakpoints").unwrap();
    outcome(
        !bp.pass,
        format!(
            "|Bp| chi-square {:.1}, p {:.3e} against the engine without the prefix rule",
            bp.stat, bp.p
        ),
    )
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("Kingman marginals", kingman_marginals),
        ("engine equivalence", engine_equivalence),
        ("breakpoint law", breakpoint_law),
        ("uniform recombination location", uniform_location),
        ("free-mode coalescence law", free_mode_law),
        ("structural validation", structural_validation),
        ("small-instance rate oracle", rate_oracle),
        ("determinism", determinism),
        ("mutation sensitivity", mutation_sensitivity),
    ];
    let mut failed = 0;
    for (k, (name, check)) in criteria.iter().enumerate() {
        let started = Instant::now();
        let result = check();
        failed += !result.pass as usize;
        println!(
            "criterion {} {:<31} {}  [{:.1?}] {}",
            k + 1,
            name,
            if result.pass { "PASS" } else { "FAIL" },
            started.elapsed(),
            result.detail
        );
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
    println!("all 9 acceptance criteria pass");
}
