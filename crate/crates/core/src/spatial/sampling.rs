//! Conditional laws used by one iteration of the spatial algorithm.

use rand::Rng;

use super::graph::{BranchId, PartialGraph};
use crate::density::BreakpointDensity;
use crate::rng::{exponential, open01};

/// Draws `S_{i+1}` given `X^{S_i}`.
///
/// `P(S_{i+1} > s) = exp{−ρ L_{S_i} ∫_{S_i}^s p/2}` for `s < 1`; the remaining
/// mass `exp{−ρ L_{S_i} ∫_{S_i}^1 p/2}` sits on 1, which ends the algorithm.
pub fn sample_next_breakpoint<R: Rng + ?Sized>(
    graph: &PartialGraph,
    s_i: f64,
    rho: f64,
    density: &BreakpointDensity,
    rng: &mut R,
) -> f64 {
    next_breakpoint_given_length(graph.length(), s_i, rho, density, rng)
}

/// [`sample_next_breakpoint`] for a given local-tree length.
pub fn next_breakpoint_given_length<R: Rng + ?Sized>(
    length: f64,
    s_i: f64,
    rho: f64,
    density: &BreakpointDensity,
    rng: &mut R,
) -> f64 {
    let scale = 0.5 * rho * length;
    if scale <= 0.0 {
        return 1.0;
    }
    let base = density.cdf(s_i);
    loop {
        let u = open01(rng);
        if u <= (-scale * (1.0 - base)).exp() {
            return 1.0;
        }
        let target = base - u.ln() / scale;
        let s = density.inverse_cdf_within(target, s_i, 1.0);
        if s > s_i && s < 1.0 {
            return s;
        }
    }
}

/// `P(S_{i+1} ≤ s)` for `s < 1`, the continuous part of the law above.
pub fn next_breakpoint_cdf(length: f64, s_i: f64, rho: f64, density: &BreakpointDensity, s: f64) -> f64 {
    if s <= s_i {
        return 0.0;
    }
    1.0 - (-0.5 * rho * length * density.mass(s_i, s.min(1.0))).exp()
}

/// Maps `u ∈ [0, L_{S_i})` to a point of the current local tree by walking
/// its branches in id order.
pub fn locate_on_tree(graph: &PartialGraph, u: f64) -> (BranchId, f64) {
    let mut rest = u;
    let mut last = None;
    for b in graph.local_tree_branches() {
        let len = graph.clipped_length(b.id);
        if len <= 0.0 {
            continue;
        }
        if rest < len {
            return (b.id, b.lo + rest);
        }
        rest -= len;
        last = Some(b);
    }
    let b = last.expect("the local tree has positive length");
    (b.id, b.lo + graph.clipped_length(b.id) * (1.0 - f64::EPSILON))
}

/// Uniform point on the current local tree below the top of the graph:
/// the branch carrying the new breakpoint and the latitude `T_0`.
pub fn sample_recomb_location<R: Rng + ?Sized>(graph: &PartialGraph, rng: &mut R) -> (BranchId, f64) {
    let u = rng.random::<f64>() * graph.length();
    locate_on_tree(graph, u)
}

/// First coalescence of a free lineage rising from latitude `from`.
///
/// Each branch of epoch at most `max_epoch` alive at latitude `t` attracts
/// the lineage at rate 1, so the hazard is the live-lineage count. Returns
/// the latitude and a uniformly chosen live branch.
pub fn sample_free_coalescence<R: Rng + ?Sized>(
    graph: &PartialGraph,
    from: f64,
    max_epoch: usize,
    rng: &mut R,
) -> (f64, BranchId) {
    let profile = graph.lineage_profile(max_epoch);
    let mut budget = exponential(rng, 1.0);
    let start = profile.partition_point(|(t, _)| *t <= from);
    let mut t = from;
    let mut count = if start == 0 { 0 } else { profile[start - 1].1 };
    let mut k = start;
    let latitude = loop {
        let next = profile.get(k).map_or(f64::INFINITY, |p| p.0);
        let hazard = count as f64 * (next - t);
        if count > 0 && budget < hazard {
            break t + budget / count as f64;
        }
        budget -= hazard;
        t = next;
        count = profile[k].1;
        k += 1;
    };
    let live: Vec<BranchId> = graph
        .branches()
        .iter()
        .filter(|b| b.epoch <= max_epoch && b.alive_at(latitude))
        .map(|b| b.id)
        .collect();
    (latitude, live[rng.random_range(0..live.len())])
}

/// `P(first coalescence ≤ t)` for a free lineage rising from `from`.
pub fn free_coalescence_cdf(graph: &PartialGraph, from: f64, max_epoch: usize, t: f64) -> f64 {
    if t <= from {
        return 0.0;
    }
    let profile = graph.lineage_profile(max_epoch);
    let mut integral = 0.0;
    for (k, &(a, count)) in profile.iter().enumerate() {
        let b = profile.get(k + 1).map_or(f64::INFINITY, |p| p.0);
        let (lo, hi) = (a.max(from), b.min(t));
        if hi > lo {
            integral += count as f64 * (hi - lo);
        }
    }
    1.0 - (-integral).exp()
}

/// Rate at which a traced lineage riding an edge of label `k` recombines
/// away from it: `(ρ/2) ∫_{S_{k+1}}^{S_{i+1}} p`.
pub fn detach_rate(s_k1: f64, s_next: f64, rho: f64, density: &BreakpointDensity) -> f64 {
    0.5 * rho * density.mass(s_k1, s_next)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::rng_from_seed;

    fn two_leaf() -> PartialGraph {
        PartialGraph::from_tree(2, &[(1.0, 0, 1)]).unwrap()
    }

    #[test]
    fn locating_on_a_cherry() {
        let g = two_leaf();
        assert_eq!(g.length(), 2.0);
        assert_eq!(locate_on_tree(&g, 0.5), (0, 0.5));
        assert_eq!(locate_on_tree(&g, 1.5), (1, 0.5));
    }

    #[test]
    fn breakpoint_median_and_degenerate_rho() {
        let g = two_leaf();
        let mut rng = rng_from_seed(1);
        assert_eq!(
            sample_next_breakpoint(&g, 0.0, 0.0, &BreakpointDensity::Uniform, &mut rng),
            1.0
        );
        // ρL = 4 means rate 2 in s: the median solves exp(−2s) = 1/2.
        let cdf = next_breakpoint_cdf(2.0, 0.0, 2.0, &BreakpointDensity::Uniform, std::f64::consts::LN_2 / 2.0);
        assert!((cdf - 0.5).abs() < 1e-15);
        let mut draws: Vec<f64> = (0..20_001)
            .map(|_| next_breakpoint_given_length(2.0, 0.0, 2.0, &BreakpointDensity::Uniform, &mut rng))
            .collect();
        draws.sort_by(f64::total_cmp);
        let median = draws[10_000];
        assert!((median - 0.34657).abs() < 0.02, "{median}");
        assert!(draws.iter().all(|s| *s > 0.0 && *s <= 1.0));
    }

    #[test]
    fn breakpoints_stay_right_of_the_previous_one() {
        let mut rng = rng_from_seed(2);
        let beta = BreakpointDensity::beta(2.0, 2.0).unwrap();
        for _ in 0..5_000 {
            let s = next_breakpoint_given_length(3.0, 0.9, 4.0, &beta, &mut rng);
            assert!(s > 0.9 && s <= 1.0);
        }
    }

    #[test]
    fn free_mode_above_the_top_is_rate_one() {
        let g = two_leaf();
        assert_eq!(free_coalescence_cdf(&g, 0.0, 0, 1.0), 1.0 - (-2.0f64).exp());
        let above = free_coalescence_cdf(&g, 1.5, 0, 2.5);
        assert!((above - (1.0 - (-1.0f64).exp())).abs() < 1e-15);
        let mut rng = rng_from_seed(3);
        for _ in 0..1000 {
            let (t, e) = sample_free_coalescence(&g, 1.5, 0, &mut rng);
            assert!(t > 1.5);
            assert_eq!(e, g.top_branch());
        }
    }

    #[test]
    fn detach_rate_example() {
        let r = detach_rate(0.2, 0.6, 2.0, &BreakpointDensity::Uniform);
        assert!((r - 0.4).abs() < 1e-15);
    }
}
