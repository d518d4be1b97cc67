//! The spatial algorithm: build `X^{S_0}` as a Kingman tree, then add one
//! breakpoint at a time by tracing the lineage it splits off, until the next
//! breakpoint would fall at 1.

mod graph;
mod sampling;
mod trace;

use rand::Rng;

pub use graph::{kingman_tree, Branch, BranchId, Node, NodeId, NodeKind, PartialGraph};
pub use sampling::{
    detach_rate, free_coalescence_cdf, locate_on_tree, next_breakpoint_cdf, next_breakpoint_given_length,
    sample_free_coalescence, sample_next_breakpoint, sample_recomb_location,
};
pub use trace::{accept_breakpoint, trace_lineage, TraceState, TraceStep};

use crate::arg::Arg;
use crate::config::{SimConfig, DEFAULT_EVENT_CAP};
use crate::error::{Error, Result};

/// A spatial run with the final graph and every trace.
#[derive(Clone, Debug)]
pub struct SpatialRun {
    pub arg: Arg,
    pub graph: PartialGraph,
    pub traces: Vec<TraceState>,
}

pub fn simulate_spatial<R: Rng + ?Sized>(config: &SimConfig, rng: &mut R) -> Result<Arg> {
    Ok(simulate_spatial_traced(config, DEFAULT_EVENT_CAP, rng)?.arg)
}

pub fn simulate_spatial_traced<R: Rng + ?Sized>(config: &SimConfig, event_cap: u64, rng: &mut R) -> Result<SpatialRun> {
    config.validate()?;
    let density = &config.density;
    let mut graph = kingman_tree(config.n_samples, rng);
    let mut traces = Vec::new();
    let mut s = 0.0;
    loop {
        let next = sample_next_breakpoint(&graph, s, config.rho, density, rng);
        if next >= 1.0 {
            break;
        }
        let start = sample_recomb_location(&graph, rng);
        let trace = trace_lineage(&mut graph, start, next, config.rho, density, rng)?;
        accept_breakpoint(&mut graph, next, &trace)?;
        if graph.event_count() as u64 > event_cap {
            return Err(Error::EventCapExceeded { cap: event_cap });
        }
        traces.push(trace);
        s = next;
    }
    let arg = graph.to_arg()?;
    Ok(SpatialRun { arg, graph, traces })
}
