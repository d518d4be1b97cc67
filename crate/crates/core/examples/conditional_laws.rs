//! Empirical checks of the laws one spatial iteration draws from: the next
//! breakpoint, its position on the tree and the first free coalescence.
//!
//! cargo run --release --example conditional_laws -- [draws]

use argsim::rng::rng_from_seed;
use argsim::spatial::{
    free_coalescence_cdf, kingman_tree, next_breakpoint_cdf, sample_free_coalescence, sample_next_breakpoint,
    sample_recomb_location,
};
use argsim::stats::ks_one_sample;
use argsim::BreakpointDensity;

fn main() {
    let draws: usize = std::env::args().nth(1).map_or(50_000, |a| a.parse().expect("draws"));
    let mut rng = rng_from_seed(8);
    let graph = kingman_tree(5, &mut rng);
    let density = BreakpointDensity::beta(2.0, 2.0).expect("valid shape");
    let (rho, s_i) = (2.0, 0.1);
    println!("tree length {:.4}, height {:.4}", graph.length(), graph.beta());

    let mut atoms = 0;
    let mut interior = Vec::new();
    for _ in 0..draws {
        let s = sample_next_breakpoint(&graph, s_i, rho, &density, &mut rng);
        if s >= 1.0 {
            atoms += 1;
        } else {
            interior.push(s);
        }
    }
    let mass = next_breakpoint_cdf(graph.length(), s_i, rho, &density, 1.0);
    println!(
        "no further breakpoint: {:.4} observed, {:.4} expected",
        atoms as f64 / draws as f64,
        1.0 - mass
    );
    let ks = ks_one_sample(&interior, |s| {
        next_breakpoint_cdf(graph.length(), s_i, rho, &density, s) / mass
    })
    .expect("enough draws");
    println!("next breakpoint given one exists: D = {:.4}, p = {:.3}", ks.d, ks.p);

    let heights: Vec<f64> = (0..draws).map(|_| sample_recomb_location(&graph, &mut rng).1).collect();
    let below_half = heights.iter().filter(|t| **t < 0.5 * graph.beta()).count();
    println!("fork below half the height: {:.4}", below_half as f64 / draws as f64);

    let from = 0.05;
    let times: Vec<f64> = (0..draws)
        .map(|_| sample_free_coalescence(&graph, from, 0, &mut rng).0)
        .collect();
    let ks = ks_one_sample(&times, |t| free_coalescence_cdf(&graph, from, 0, t)).expect("enough draws");
    println!("first free coalescence: D = {:.4}, p = {:.3}", ks.d, ks.p);
}
