use rand::Rng;

use crate::ancestral::AncestralFn;
use crate::arg::{Arg, ArgStep, MaterialVector};
use crate::error::{Error, Result};
use crate::rng::exponential;
use crate::state::{Event, State};
use crate::typeset::TypeSet;

pub type NodeId = usize;
pub type BranchId = usize;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum NodeKind {
    Leaf {
        sample: u32,
    },
    Coalescence,
    /// Material left of `locus` goes to the first parent, the rest to the second.
    Recombination {
        locus: f64,
    },
}

#[derive(Clone, Debug, PartialEq)]
pub struct Node {
    pub id: NodeId,
    pub latitude: f64,
    pub kind: NodeKind,
    pub children: Vec<BranchId>,
    pub parents: Vec<BranchId>,
}

/// An edge of the partial graph between two node latitudes.
#[derive(Clone, Debug, PartialEq)]
pub struct Branch {
    pub id: BranchId,
    pub lower: NodeId,
    /// `None` only for the edge above the top of the graph.
    pub upper: Option<NodeId>,
    pub lo: f64,
    /// `+∞` for the top edge.
    pub hi: f64,
    /// One entry per breakpoint index `0..=i`.
    pub material: MaterialVector,
    /// Index of the last local tree the edge belongs to.
    pub label: usize,
    /// Index of the breakpoint whose trace created the edge.
    pub epoch: usize,
}

impl Branch {
    pub fn alive_at(&self, t: f64) -> bool {
        self.lo <= t && t < self.hi
    }
}

/// `X^{S_i}`: the graph of every lineage ancestral to `[0, S_i]`.
#[derive(Clone, Debug, PartialEq)]
pub struct PartialGraph {
    n: u32,
    pub(crate) nodes: Vec<Node>,
    pub(crate) branches: Vec<Branch>,
    breakpoints: Vec<f64>,
    length: f64,
    beta: f64,
}

/// Standard Kingman coalescent over `n` leaves; every edge gets label 0.
pub fn kingman_tree<R: Rng + ?Sized>(n: u32, rng: &mut R) -> PartialGraph {
    assert!(n >= 2, "a tree needs at least two leaves");
    let mut graph = PartialGraph::leaves(n);
    let mut active: Vec<BranchId> = (0..n as usize).collect();
    let mut t = 0.0;
    while active.len() >= 2 {
        let k = active.len();
        t += exponential(rng, (k * (k - 1)) as f64 / 2.0);
        let a = rng.random_range(0..k);
        let mut b = rng.random_range(0..k - 1);
        if b >= a {
            b += 1;
        }
        let (ea, eb) = (active[a], active[b]);
        let merged = graph.merge(t, ea, eb);
        active.retain(|e| *e != ea && *e != eb);
        active.push(merged);
    }
    graph.refresh();
    graph
}

impl PartialGraph {
    fn leaves(n: u32) -> Self {
        let mut graph = Self {
            n,
            nodes: Vec::new(),
            branches: Vec::new(),
            breakpoints: Vec::new(),
            length: 0.0,
            beta: 0.0,
        };
        for sample in 1..=n {
            let node = graph.push_node(0.0, NodeKind::Leaf { sample });
            let edge = graph.push_branch(node, 0.0, MaterialVector(vec![TypeSet::singleton(sample)]), 0, 0);
            graph.nodes[node].parents.push(edge);
        }
        graph
    }

    /// A label-0 tree from a fixed merge sequence.
    ///
    /// Each merge `(t, a, b)` joins the open branches `a` and `b` at latitude
    /// `t` and opens a new branch whose id is the next unused one; leaf
    /// branches have ids `0..n` for samples `1..=n`. Latitudes must increase.
    pub fn from_tree(n: u32, merges: &[(f64, BranchId, BranchId)]) -> Result<Self> {
        if n < 2 || merges.len() != n as usize - 1 {
            return Err(Error::Config(format!(
                "a tree over {n} leaves needs {} merges",
                n.saturating_sub(1)
            )));
        }
        let mut graph = Self::leaves(n);
        let mut last = 0.0;
        for &(t, a, b) in merges {
            let open = |e: BranchId| graph.branches.get(e).is_some_and(|x| x.hi == f64::INFINITY);
            if !(t > last) || a == b || !open(a) || !open(b) {
                return Err(Error::Config(format!("invalid merge ({t}, {a}, {b})")));
            }
            graph.merge(t, a, b);
            last = t;
        }
        graph.refresh();
        Ok(graph)
    }

    fn merge(&mut self, t: f64, a: BranchId, b: BranchId) -> BranchId {
        let node = self.push_node(t, NodeKind::Coalescence);
        for e in [a, b] {
            self.branches[e].hi = t;
            self.branches[e].upper = Some(node);
            self.nodes[node].children.push(e);
        }
        let material = MaterialVector(vec![
            self.branches[a].material.0[0].union(&self.branches[b].material.0[0])
        ]);
        let up = self.push_branch(node, t, material, 0, 0);
        self.nodes[node].parents.push(up);
        up
    }

    pub(crate) fn push_node(&mut self, latitude: f64, kind: NodeKind) -> NodeId {
        let id = self.nodes.len();
        self.nodes.push(Node {
            id,
            latitude,
            kind,
            children: Vec::new(),
            parents: Vec::new(),
        });
        id
    }

    /// Opens a branch at `lo` with no upper node.
    pub(crate) fn push_branch(
        &mut self,
        lower: NodeId,
        lo: f64,
        material: MaterialVector,
        label: usize,
        epoch: usize,
    ) -> BranchId {
        let id = self.branches.len();
        self.branches.push(Branch {
            id,
            lower,
            upper: None,
            lo,
            hi: f64::INFINITY,
            material,
            label,
            epoch,
        });
        id
    }

    /// Cuts `e` at latitude `t` with a new node of the given kind. `e` keeps
    /// `[lo, t)`; the returned branch takes `[t, hi)` and the old upper node.
    pub(crate) fn split(&mut self, e: BranchId, t: f64, kind: NodeKind) -> (NodeId, BranchId) {
        debug_assert!(self.branches[e].lo < t && t < self.branches[e].hi);
        let node = self.push_node(t, kind);
        let old = self.branches[e].clone();
        let upper_piece = self.branches.len();
        self.branches.push(Branch {
            id: upper_piece,
            lower: node,
            upper: old.upper,
            lo: t,
            hi: old.hi,
            material: old.material.clone(),
            label: old.label,
            epoch: old.epoch,
        });
        if let Some(up) = old.upper {
            for c in self.nodes[up].children.iter_mut() {
                if *c == e {
                    *c = upper_piece;
                }
            }
        }
        let lower = &mut self.branches[e];
        lower.hi = t;
        lower.upper = Some(node);
        self.nodes[node].children.push(e);
        self.nodes[node].parents.push(upper_piece);
        (node, upper_piece)
    }

    pub fn n_samples(&self) -> u32 {
        self.n
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn branches(&self) -> &[Branch] {
        &self.branches
    }

    pub fn branch(&self, e: BranchId) -> &Branch {
        &self.branches[e]
    }

    /// `S_1 < … < S_i`.
    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    /// `i`, the index of the current local tree.
    pub fn current_index(&self) -> usize {
        self.breakpoints.len()
    }

    /// `S_k` with `S_0 = 0`.
    pub fn locus(&self, k: usize) -> f64 {
        if k == 0 {
            0.0
        } else {
            self.breakpoints[k - 1]
        }
    }

    /// `L_{S_i}`: length of the current local tree up to the top of the graph.
    pub fn length(&self) -> f64 {
        self.length
    }

    /// `β_{S_i}`: the latitude where the graph collapses to one lineage.
    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn top_branch(&self) -> BranchId {
        self.branches
            .iter()
            .position(|b| b.hi == f64::INFINITY)
            .expect("the graph has a top edge")
    }

    /// Number of events the graph encodes.
    pub fn event_count(&self) -> usize {
        self.nodes.len() - self.n as usize
    }

    /// Branches of the current local tree, in id order.
    pub fn local_tree_branches(&self) -> impl Iterator<Item = &Branch> + '_ {
        let i = self.current_index();
        self.branches.iter().filter(move |b| b.label == i)
    }

    /// Length of branch `e` counted towards `L_{S_i}`.
    pub fn clipped_length(&self, e: BranchId) -> f64 {
        let b = &self.branches[e];
        (b.hi.min(self.beta) - b.lo).max(0.0)
    }

    pub(crate) fn push_breakpoint(&mut self, s: f64) {
        self.breakpoints.push(s);
    }

    pub(crate) fn refresh(&mut self) {
        self.beta = self.branches[self.top_branch()].lo;
        let i = self.current_index();
        self.length = (0..self.branches.len())
            .filter(|&e| self.branches[e].label == i)
            .map(|e| self.clipped_length(e))
            .sum();
    }

    /// `|X^{S_i}(t)|` as a step function: `(latitude, count)` pairs, each
    /// count holding until the next latitude. Only branches of epoch at most
    /// `max_epoch` are counted.
    pub fn lineage_profile(&self, max_epoch: usize) -> Vec<(f64, usize)> {
        let mut changes: Vec<(f64, i64)> = Vec::new();
        for b in self.branches.iter().filter(|b| b.epoch <= max_epoch) {
            changes.push((b.lo, 1));
            if b.hi.is_finite() {
                changes.push((b.hi, -1));
            }
        }
        changes.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut profile: Vec<(f64, usize)> = Vec::new();
        let mut count: i64 = 0;
        for (t, d) in changes {
            count += d;
            match profile.last_mut() {
                Some(last) if last.0 == t => last.1 = count as usize,
                _ => profile.push((t, count as usize)),
            }
        }
        profile
    }

    /// Every latitude at which the live branches' last column must
    /// partition the sample labels does so.
    pub(crate) fn check_column(&self, col: usize) -> Result<()> {
        let mut order: Vec<&Branch> = self.branches.iter().collect();
        order.sort_by(|a, b| a.lo.total_cmp(&b.lo));
        let mut latitudes: Vec<f64> = self.nodes.iter().map(|n| n.latitude).collect();
        latitudes.sort_by(f64::total_cmp);
        latitudes.dedup();
        let full = TypeSet::full(self.n);
        for t in latitudes {
            let mut seen = TypeSet::empty();
            for b in order.iter().take_while(|b| b.lo <= t).filter(|b| b.alive_at(t)) {
                let z = &b.material.0[col];
                if !seen.is_disjoint(z) {
                    return Err(Error::Bookkeeping(format!("column {col} overlaps at latitude {t}")));
                }
                seen = seen.union(z);
            }
            if seen != full {
                return Err(Error::Bookkeeping(format!(
                    "column {col} covers {seen} at latitude {t}"
                )));
            }
        }
        Ok(())
    }

    /// The branches reached from the leaves by moving up and taking the
    /// larger-label parent at every recombination node.
    pub fn walk_from_leaves(&self) -> Vec<BranchId> {
        let mut seen = vec![false; self.branches.len()];
        let mut stack: Vec<BranchId> = self
            .nodes
            .iter()
            .filter(|n| matches!(n.kind, NodeKind::Leaf { .. }))
            .map(|n| n.parents[0])
            .collect();
        while let Some(e) = stack.pop() {
            if seen[e] {
                continue;
            }
            seen[e] = true;
            if let Some(up) = self.branches[e].upper {
                stack.push(self.upward(up));
            }
        }
        (0..self.branches.len()).filter(|&e| seen[e]).collect()
    }

    /// The branch leaving node `v` upwards; at a recombination node the one
    /// with the larger label.
    pub(crate) fn upward(&self, v: NodeId) -> BranchId {
        let parents = &self.nodes[v].parents;
        match parents.as_slice() {
            [p] => *p,
            [l, r] => {
                if self.branches[*r].label >= self.branches[*l].label {
                    *r
                } else {
                    *l
                }
            }
            _ => unreachable!("node {v} has {} parents", parents.len()),
        }
    }

    /// Reads the graph as a path of the back-in-time process, replaying each
    /// node as an event and checking the states rebuilt from the materials.
    pub fn to_arg(&self) -> Result<Arg> {
        let loci = &self.breakpoints;
        let fns: Vec<AncestralFn> = self.branches.iter().map(|b| b.material.to_fn(loci)).collect();
        if let Some(b) = self.branches.iter().find(|b| b.material.is_null()) {
            return Err(Error::Bookkeeping(format!("branch {} carries no material", b.id)));
        }
        let mut order: Vec<&Node> = self
            .nodes
            .iter()
            .filter(|v| !matches!(v.kind, NodeKind::Leaf { .. }))
            .collect();
        order.sort_by(|a, b| a.latitude.total_cmp(&b.latitude).then(a.id.cmp(&b.id)));

        let mut alive: Vec<BranchId> = self
            .nodes
            .iter()
            .filter(|v| matches!(v.kind, NodeKind::Leaf { .. }))
            .map(|v| v.parents[0])
            .collect();
        let build = |alive: &[BranchId]| State::new(self.n, alive.iter().map(|&e| fns[e].clone()).collect());
        let initial = build(&alive)?;
        if initial != State::initial(self.n) {
            return Err(Error::Bookkeeping(format!("leaves read as {initial}")));
        }
        let mut current = initial.clone();
        let mut steps = Vec::with_capacity(order.len());
        let rank = |x: &State, e: BranchId| {
            x.position_of(&fns[e])
                .ok_or_else(|| Error::Bookkeeping(format!("branch {e} is not a lineage of {x}")))
        };
        for v in order {
            let event = match v.kind {
                NodeKind::Coalescence => {
                    let (a, b) = (rank(&current, v.children[0])?, rank(&current, v.children[1])?);
                    Event::Coalesce {
                        i: a.min(b),
                        j: a.max(b),
                    }
                }
                NodeKind::Recombination { locus } => Event::Recombine {
                    i: rank(&current, v.children[0])?,
                    u: locus,
                },
                NodeKind::Leaf { .. } => unreachable!(),
            };
            alive.retain(|e| !v.children.contains(e));
            alive.extend_from_slice(&v.parents);
            let rebuilt = build(&alive)?;
            let applied = current
                .apply(&event)
                .map_err(|e| Error::Bookkeeping(format!("node {} at {}: {e}", v.id, v.latitude)))?;
            if applied != rebuilt {
                return Err(Error::Bookkeeping(format!(
                    "node {} at {}: event gives {applied}, materials give {rebuilt}",
                    v.id, v.latitude
                )));
            }
            steps.push(ArgStep {
                time: v.latitude,
                event,
                state: rebuilt.clone(),
            });
            current = rebuilt;
        }
        Ok(Arg::from_parts(initial, steps))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::rng_from_seed;

    #[test]
    fn kingman_tree_structure() {
        let mut rng = rng_from_seed(4);
        let g = kingman_tree(5, &mut rng);
        assert_eq!(g.branches().len(), 9);
        assert_eq!(g.event_count(), 4);
        for k in 0..5 {
            assert_eq!(g.branch(k).material.0, vec![TypeSet::singleton(k as u32 + 1)]);
        }
        let top = g.top_branch();
        assert_eq!(g.branch(top).material.0, vec![TypeSet::full(5)]);
        assert!(g.branches().iter().all(|b| b.label == 0 && b.lo < b.hi));
        assert_eq!(g.beta(), g.branch(top).lo);
        let len: f64 = g
            .branches()
            .iter()
            .filter(|b| b.hi.is_finite())
            .map(|b| b.hi - b.lo)
            .sum();
        assert!((g.length() - len).abs() < 1e-12);
        g.check_column(0).unwrap();
        assert_eq!(g.walk_from_leaves().len(), 9);
    }

    #[test]
    fn fixed_tree_and_arg() {
        let g = PartialGraph::from_tree(3, &[(0.5, 1, 2), (2.0, 0, 3)]).unwrap();
        assert_eq!(g.beta(), 2.0);
        assert_eq!(g.length(), 0.5 * 3.0 + 1.5 * 2.0);
        assert_eq!(g.lineage_profile(0), vec![(0.0, 3), (0.5, 2), (2.0, 1)]);
        let arg = g.to_arg().unwrap();
        let events: Vec<_> = arg.events().collect();
        assert_eq!(
            events,
            vec![
                (0.5, Event::Coalesce { i: 1, j: 2 }),
                (2.0, Event::Coalesce { i: 0, j: 1 })
            ]
        );
        assert!(PartialGraph::from_tree(3, &[(0.5, 1, 1), (2.0, 0, 3)]).is_err());
        assert!(PartialGraph::from_tree(3, &[(0.5, 1, 2), (0.4, 0, 3)]).is_err());
    }

    #[test]
    fn split_keeps_links() {
        let mut g = PartialGraph::from_tree(2, &[(1.0, 0, 1)]).unwrap();
        let (node, upper) = g.split(0, 0.25, NodeKind::Coalescence);
        assert_eq!(g.branch(0).hi, 0.25);
        assert_eq!(g.branch(upper).lo, 0.25);
        assert_eq!(g.branch(upper).hi, 1.0);
        assert_eq!(g.nodes()[node].children, vec![0]);
        let top_node = g.branch(upper).upper.unwrap();
        assert!(g.nodes()[top_node].children.contains(&upper));
        assert!(!g.nodes()[top_node].children.contains(&0));
    }
}
