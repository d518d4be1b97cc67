//! The spatial engine: the initial tree, each traced lineage and the
//! graph it leaves behind.
//!
//! cargo run --example spatial -- [samples] [rho] [seed]

use argsim::arg::{local_tree, validate_arg};
use argsim::config::DEFAULT_EVENT_CAP;
use argsim::spatial::simulate_spatial_traced;
use argsim::SimConfig;

fn main() -> argsim::Result<()> {
    let mut args = std::env::args().skip(1);
    let n: u32 = args.next().map_or(4, |a| a.parse().expect("samples"));
    let rho: f64 = args.next().map_or(2.0, |a| a.parse().expect("rho"));
    let seed: u64 = args.next().map_or(3, |a| a.parse().expect("seed"));

    let config = SimConfig::new(n, rho).with_seed(seed);
    let run = simulate_spatial_traced(&config, DEFAULT_EVENT_CAP, &mut config.rng())?;

    let first = local_tree(&run.arg, 0.0);
    println!("tree at 0: {}  height {:.4}", first.to_newick(), first.height);
    for trace in &run.traces {
        println!(
            "breakpoint {} at {:.4}: fork on branch {} at {:.4}, carrying {}",
            trace.index, trace.locus, trace.fork_branch, trace.t0, trace.xi
        );
        for step in &trace.steps {
            match step.edge {
                Some((e, label)) => println!("  {:>8.4}  rides branch {e} (label {label})", step.latitude),
                None => println!("  {:>8.4}  free", step.latitude),
            }
        }
        let tree = local_tree(&run.arg, trace.locus);
        println!("  new tree {}  length {:.4}", tree.to_newick(), tree.total_length);
    }
    println!(
        "{} branches, {} events, validation {}",
        run.graph.branches().len(),
        run.graph.event_count(),
        validate_arg(&run.arg)
    );
    Ok(())
}
