//! One path of the back-in-time engine, event by event, with its
//! validation report and summary.
//!
//! cargo run --example backintime -- [samples] [rho] [seed]

use argsim::arg::{breakpoints, summary, validate_arg};
use argsim::backintime::{simulate_backintime, total_rate};
use argsim::SimConfig;

fn main() -> argsim::Result<()> {
    let mut args = std::env::args().skip(1);
    let n: u32 = args.next().map_or(4, |a| a.parse().expect("samples"));
    let rho: f64 = args.next().map_or(1.5, |a| a.parse().expect("rho"));
    let seed: u64 = args.next().map_or(1, |a| a.parse().expect("seed"));

    let config = SimConfig::new(n, rho).with_seed(seed);
    let arg = simulate_backintime(&config, &mut config.rng())?;

    for (k, step) in arg.steps().iter().enumerate() {
        let rates = total_rate(arg.state_before(k), rho, &config.density);
        println!("{:>8.4}  q = {:<7.3} {:?}", step.time, rates.total, step.event);
        println!("          {}", step.state);
    }

    let bp = breakpoints(&arg);
    println!("breakpoints {:?}", bp.loci);
    println!("created at  {:?}", bp.times);
    println!("validation  {}", validate_arg(&arg));
    let stats = summary(&arg, &[0.0, 0.5]);
    println!(
        "grand MRCA {:.4}, {} events, at most {} lineages",
        stats.grand_mrca_time, stats.event_count, stats.max_lineages
    );
    Ok(())
}
