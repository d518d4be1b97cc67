//! Tracing the lineage of a new breakpoint through `X^{S_i}` and folding the
//! result into the graph.

use rand::Rng;

use super::graph::{BranchId, NodeId, NodeKind, PartialGraph};
use super::sampling::{detach_rate, sample_free_coalescence};
use crate::arg::MaterialVector;
use crate::density::BreakpointDensity;
use crate::error::{Error, Result};
use crate::rng::exponential;
use crate::typeset::TypeSet;

/// One transition `(T_j, ξ_j)` of the traced lineage.
#[derive(Clone, Debug, PartialEq)]
pub struct TraceStep {
    pub j: usize,
    pub latitude: f64,
    /// Material the lineage carries from `latitude` on, one column per
    /// breakpoint index `0..=i+1`.
    pub xi: MaterialVector,
    /// The edge ridden from `latitude` on, with its label; `None` in free mode.
    pub edge: Option<(BranchId, usize)>,
}

/// A completed trace for breakpoint `S_{i+1}`.
#[derive(Clone, Debug, PartialEq)]
pub struct TraceState {
    /// `i + 1`.
    pub index: usize,
    pub locus: f64,
    /// Branch of `𝒯_{S_i}` carrying the fork; after the split it keeps the
    /// piece below `t0`.
    pub fork_branch: BranchId,
    pub t0: f64,
    /// `ξ^{i+1}`, the sample labels below the fork.
    pub xi: TypeSet,
    pub steps: Vec<TraceStep>,
    /// Free-mode segments created by the trace.
    pub new_segments: Vec<BranchId>,
    /// Existing branches the traced lineage rides, up to the top edge.
    pub on_path: Vec<BranchId>,
}

impl TraceState {
    pub fn transitions(&self) -> usize {
        self.steps.len()
    }

    pub fn detachments(&self) -> usize {
        self.steps
            .windows(2)
            .filter(|w| w[0].edge.is_some() && w[1].edge.is_none())
            .count()
    }
}

enum Mode {
    Free(BranchId),
    Edge(BranchId),
}

/// Forks `start.0` at latitude `start.1` and traces the new lineage until it
/// merges into `𝒯_{S_i}`.
///
/// The graph is extended in place with the fork, the coalescence and
/// detachment nodes and the free-mode segments; materials are left for
/// [`accept_breakpoint`].
pub fn trace_lineage<R: Rng + ?Sized>(
    graph: &mut PartialGraph,
    start: (BranchId, f64),
    s_next: f64,
    rho: f64,
    density: &BreakpointDensity,
    rng: &mut R,
) -> Result<TraceState> {
    let i = graph.current_index();
    let (e0, t0) = start;
    let b0 = graph.branch(e0);
    if b0.label != i || !(b0.lo < t0 && t0 < b0.hi.min(graph.beta())) {
        return Err(Error::Bookkeeping(format!(
            "fork at latitude {t0} is not on branch {e0} of the current tree"
        )));
    }
    if !(s_next > graph.locus(i) && s_next < 1.0) {
        return Err(Error::Bookkeeping(format!("breakpoint {s_next} out of order")));
    }
    let xi = b0.material.0[i].clone();
    let free_xi = {
        let mut columns = vec![TypeSet::empty(); i + 1];
        columns.push(xi.clone());
        MaterialVector(columns)
    };

    let (fork, _) = graph.split(e0, t0, NodeKind::Recombination { locus: s_next });
    let first = open_segment(graph, fork, t0, i);
    let mut trace = TraceState {
        index: i + 1,
        locus: s_next,
        fork_branch: e0,
        t0,
        xi: xi.clone(),
        steps: vec![TraceStep {
            j: 0,
            latitude: t0,
            xi: free_xi.clone(),
            edge: None,
        }],
        new_segments: vec![first],
        on_path: Vec::new(),
    };

    let mut mode = Mode::Free(first);
    let mut cur = t0;
    loop {
        match mode {
            Mode::Free(seg) => {
                let (t, target) = sample_free_coalescence(graph, cur, i, rng);
                let (node, up) = graph.split(target, t, NodeKind::Coalescence);
                graph.branches[seg].hi = t;
                graph.branches[seg].upper = Some(node);
                graph.nodes[node].children.push(seg);
                cur = t;
                mode = Mode::Edge(up);
            }
            Mode::Edge(e) => {
                let (label, hi, upper) = {
                    let b = graph.branch(e);
                    (b.label, b.hi, b.upper)
                };
                if label == i {
                    let mut edge = e;
                    loop {
                        trace.on_path.push(edge);
                        match graph.branch(edge).upper {
                            Some(v) => edge = graph.upward(v),
                            None => break,
                        }
                    }
                    break;
                }
                let s_k1 = graph.locus(label + 1);
                let w = exponential(rng, detach_rate(s_k1, s_next, rho, density));
                if cur + w < hi {
                    let d = cur + w;
                    let u = density.sample_truncated(s_k1, s_next, rng);
                    let (node, _) = graph.split(e, d, NodeKind::Recombination { locus: u });
                    trace.on_path.push(e);
                    let seg = open_segment(graph, node, d, i);
                    trace.new_segments.push(seg);
                    cur = d;
                    mode = Mode::Free(seg);
                } else {
                    trace.on_path.push(e);
                    let v = upper.expect("a branch below the top has an upper node");
                    cur = hi;
                    mode = Mode::Edge(graph.upward(v));
                }
            }
        }
        let (xi_j, edge) = match mode {
            Mode::Free(_) => (free_xi.clone(), None),
            Mode::Edge(e) => {
                let b = graph.branch(e);
                let mut columns = b.material.0.clone();
                columns.push(b.material.0[i].union(&xi));
                (MaterialVector(columns), Some((e, b.label)))
            }
        };
        trace.steps.push(TraceStep {
            j: trace.steps.len(),
            latitude: cur,
            xi: xi_j,
            edge,
        });
    }
    Ok(trace)
}

/// Opens a free-mode segment of epoch `i + 1` above `node`.
fn open_segment(graph: &mut PartialGraph, node: NodeId, t: f64, i: usize) -> BranchId {
    let seg = graph.push_branch(node, t, MaterialVector(vec![TypeSet::empty(); i + 1]), i + 1, i + 1);
    graph.nodes[node].parents.push(seg);
    seg
}

/// Appends column `i + 1` to every material vector, relabels the branches
/// of `𝒯_{S_{i+1}}` and refreshes `L` and `β`.
pub fn accept_breakpoint(graph: &mut PartialGraph, s_next: f64, trace: &TraceState) -> Result<()> {
    let i = graph.current_index();
    if trace.index != i + 1 || trace.locus != s_next {
        return Err(Error::Bookkeeping(format!(
            "trace for breakpoint {} at {} offered as breakpoint {} at {s_next}",
            trace.index,
            trace.locus,
            i + 1
        )));
    }
    let count = graph.branches.len();
    let mut on_path = vec![false; count];
    let mut fresh = vec![false; count];
    for &e in &trace.on_path {
        on_path[e] = true;
    }
    for &e in &trace.new_segments {
        fresh[e] = true;
    }
    for (e, b) in graph.branches.iter_mut().enumerate() {
        if b.material.0.len() != i + 1 {
            return Err(Error::Bookkeeping(format!(
                "branch {e} has {} columns",
                b.material.0.len()
            )));
        }
        let z = &b.material.0[i];
        let next = if fresh[e] {
            trace.xi.clone()
        } else if on_path[e] {
            z.union(&trace.xi)
        } else if b.lo >= trace.t0 {
            z.difference(&trace.xi)
        } else {
            z.clone()
        };
        b.material.0.push(next);
        b.label = b
            .material
            .0
            .iter()
            .rposition(|z| !z.is_empty())
            .ok_or_else(|| Error::Bookkeeping(format!("branch {e} carries no material")))?;
    }
    graph.push_breakpoint(s_next);

    let walked = graph.walk_from_leaves();
    let labelled: Vec<BranchId> = (0..count).filter(|&e| graph.branches[e].label == i + 1).collect();
    if walked != labelled {
        return Err(Error::Bookkeeping(format!(
            "tree {} walked from the leaves is not the set labelled {}",
            i + 1,
            i + 1
        )));
    }
    graph.check_column(i + 1)?;
    graph.refresh();
    Ok(())
}
