//! The state operators on three samples: recombination, coalescence,
//! projection, ranking and the disagreement distance.
//!
//! cargo run --example state_operators

use argsim::state::distance_dl;
use argsim::{Event, State};

fn main() -> argsim::Result<()> {
    let x = State::initial(3);
    println!("initial        {x}");
    for i in 0..x.len() {
        let (lo, hi) = x.active_interval(i)?;
        println!("  rank {i} active on ({lo}, {hi})");
    }

    let y = x.apply(&Event::Recombine { i: 1, u: 0.4 })?;
    println!("split rank 1 at 0.4   {y}");
    let z = y.apply(&Event::Coalesce { i: 0, j: 2 })?;
    println!("merge ranks 0 and 2   {z}");
    let w = z.apply(&Event::Recombine { i: 0, u: 0.7 })?;
    println!("split rank 0 at 0.7   {w}");
    println!("breakpoints    {:?}", w.breakpoints());

    for s in [0.2, 0.5, 0.9] {
        let blocks: Vec<String> = w.site_partition(s).iter().map(|b| b.to_string()).collect();
        println!("partition at {s}: {}", blocks.join(" "));
    }
    println!("projected to 0.5      {}", w.project(0.5));

    let (f, g) = (&w.lineages()[0], &w.lineages()[1]);
    println!("d({f}, {g}) = {:.3}", distance_dl(f, g));

    match w.apply(&Event::Recombine { i: 0, u: 0.8 }) {
        Ok(_) => println!("unexpectedly legal"),
        Err(e) => println!("past the end of its material: {e}"),
    }
    Ok(())
}
