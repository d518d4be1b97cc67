//! Runs both engines on the same configuration and compares the laws of a
//! handful of path statistics.
//!
//! cargo run --release --example equivalence -- [reps] [rho] [samples]

use argsim::stats::equivalence_report;
use argsim::SimConfig;

fn main() -> argsim::Result<()> {
    let mut args = std::env::args().skip(1);
    let reps: u64 = args.next().map_or(20_000, |a| a.parse().expect("reps"));
    let rho: f64 = args.next().map_or(1.0, |a| a.parse().expect("rho"));
    let n: u32 = args.next().map_or(4, |a| a.parse().expect("samples"));

    let config = SimConfig::new(n, rho).with_seed(2024);
    let started = std::time::Instant::now();
    let report = equivalence_report(&config, reps, &[0.0, 0.5], 0.001)?;
    print!("{}", report.to_table());
    println!(
        "{} in {:.1?}",
        if report.passed() {
            "all tests pass"
        } else {
            "some tests FAIL"
        },
        started.elapsed()
    );
    Ok(())
}
