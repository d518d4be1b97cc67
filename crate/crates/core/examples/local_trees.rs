//! Local trees along the sequence: one Newick string per interval between
//! breakpoints, from either engine.
//!
//! cargo run --example local_trees -- [backintime|spatial] [samples] [rho] [seed]

use argsim::arg::{breakpoints, local_tree};
use argsim::backintime::simulate_backintime;
use argsim::spatial::simulate_spatial;
use argsim::{Engine, SimConfig};

fn main() -> argsim::Result<()> {
    let mut args = std::env::args().skip(1);
    let engine: Engine = args.next().map_or(Engine::Backintime, |a| a.parse().expect("engine"));
    let n: u32 = args.next().map_or(5, |a| a.parse().expect("samples"));
    let rho: f64 = args.next().map_or(3.0, |a| a.parse().expect("rho"));
    let seed: u64 = args.next().map_or(11, |a| a.parse().expect("seed"));

    let config = SimConfig::new(n, rho).with_seed(seed);
    let arg = match engine {
        Engine::Backintime => simulate_backintime(&config, &mut config.rng())?,
        Engine::Spatial => simulate_spatial(&config, &mut config.rng())?,
    };

    let loci = breakpoints(&arg).loci;
    let starts = std::iter::once(0.0).chain(loci.iter().copied());
    let ends = loci.iter().copied().chain(std::iter::once(1.0));
    for (a, b) in starts.zip(ends) {
        let tree = local_tree(&arg, a);
        println!(
            "[{a:.4}, {b:.4})  tmrca {:.4}  length {:.4}  {}",
            tree.height,
            tree.total_length,
            tree.to_newick()
        );
    }
    Ok(())
}
