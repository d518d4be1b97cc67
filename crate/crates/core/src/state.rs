//! The state space of the back-in-time process and its event operators.
//!
//! A [`State`] is a finite family of ancestral functions whose nonempty
//! values partition the sample labels at every locus. Lineages are kept in
//! canonical rank order: by the leftmost locus carrying material, ties broken
//! by the smallest label carried there. Rank indices in [`Event`] refer to
//! this order and are zero-based.

use std::cmp::Ordering;
use std::fmt;

use crate::ancestral::AncestralFn;
use crate::error::{Error, Result};
use crate::typeset::TypeSet;

/// A single jump of the back-in-time process.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Event {
    /// Merge the lineages at ranks `i < j`.
    Coalesce { i: usize, j: usize },
    /// Split the lineage at rank `i` at locus `u`.
    Recombine { i: usize, u: f64 },
}

#[derive(Clone, PartialEq, Debug)]
pub struct State {
    n: u32,
    lineages: Vec<AncestralFn>,
}

impl State {
    /// Validates the partition property and ranks the lineages.
    pub fn new(n: u32, lineages: Vec<AncestralFn>) -> Result<Self> {
        let state = Self::from_unranked(n, lineages);
        state.check()?;
        Ok(state)
    }

    fn from_unranked(n: u32, lineages: Vec<AncestralFn>) -> Self {
        Self {
            n,
            lineages: canonical_rank(lineages),
        }
    }

    /// `ϖ`: one singleton lineage per sample.
    pub fn initial(n: u32) -> Self {
        let lineages = (1..=n).map(|k| AncestralFn::constant(TypeSet::singleton(k))).collect();
        Self { n, lineages }
    }

    /// `Δ`: a single lineage carrying every sample at every locus.
    pub fn absorbing(n: u32) -> Self {
        Self {
            n,
            lineages: vec![AncestralFn::constant(TypeSet::full(n))],
        }
    }

    pub fn n_samples(&self) -> u32 {
        self.n
    }

    pub fn lineages(&self) -> &[AncestralFn] {
        &self.lineages
    }

    /// `|x|`.
    pub fn len(&self) -> usize {
        self.lineages.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lineages.is_empty()
    }

    pub fn is_absorbing(&self) -> bool {
        self.lineages.len() == 1
    }

    pub fn full_set(&self) -> TypeSet {
        TypeSet::full(self.n)
    }

    /// Checks every invariant of the state space.
    pub fn check(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::InvalidState(format!(
                "need at least two samples, got {}",
                self.n
            )));
        }
        if self.lineages.is_empty() {
            return Err(Error::InvalidState("no lineages".into()));
        }
        if let Some(k) = self.lineages.iter().position(AncestralFn::is_null) {
            return Err(Error::InvalidState(format!("lineage {k} carries no material")));
        }
        let full = self.full_set();
        let grid = self.grid();
        for s in &grid[..grid.len() - 1] {
            let mut seen = TypeSet::empty();
            for f in &self.lineages {
                let v = f.value_at(*s);
                if !seen.is_disjoint(v) {
                    return Err(Error::InvalidState(format!("lineages overlap at locus {s}")));
                }
                seen = seen.union(v);
            }
            if seen != full {
                return Err(Error::InvalidState(format!(
                    "material at locus {s} is {seen}, expected {full}"
                )));
            }
        }
        if canonical_rank(self.lineages.clone()) != self.lineages {
            return Err(Error::InvalidState("lineages are not in rank order".into()));
        }
        Ok(())
    }

    /// Sorted distinct discontinuity loci over all lineages.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut all: Vec<f64> = self
            .lineages
            .iter()
            .flat_map(|f| f.breakpoints().iter().copied())
            .collect();
        all.sort_by(f64::total_cmp);
        all.dedup();
        all
    }

    /// `d_0(x)`: the smallest gap between consecutive breakpoints, with 0 and 1 included.
    pub fn min_breakpoint_gap(&self) -> f64 {
        self.grid()
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(f64::INFINITY, f64::min)
    }

    fn grid(&self) -> Vec<f64> {
        let mut grid = vec![0.0];
        grid.extend(self.breakpoints());
        grid.push(1.0);
        grid
    }

    fn lineage(&self, i: usize) -> Result<&AncestralFn> {
        self.lineages.get(i).ok_or(Error::IndexOutOfRange {
            index: i,
            len: self.len(),
        })
    }

    /// `(b_i, e_i)`, the loci where lineage `i` may recombine.
    ///
    /// The top-ranked lineage starts at the first locus where it does not yet
    /// carry every sample (no recombination inside a fully coalesced prefix);
    /// every lineage ends where its material ends. The interval may be empty.
    pub fn active_interval(&self, i: usize) -> Result<(f64, f64)> {
        self.active_interval_with(i, true)
    }

    pub(crate) fn active_interval_with(&self, i: usize, coalesced_prefix_rule: bool) -> Result<(f64, f64)> {
        let f = self.lineage(i)?;
        let lo = if i == 0 && coalesced_prefix_rule {
            f.first_departure_from(&self.full_set())
        } else {
            f.first_material().unwrap_or(1.0)
        };
        Ok((lo, f.end_of_material()))
    }

    /// `R_{iu}(x)`.
    pub fn recombine(&self, i: usize, u: f64) -> Result<Self> {
        self.recombine_with(i, u, true)
    }

    pub(crate) fn recombine_with(&self, i: usize, u: f64, coalesced_prefix_rule: bool) -> Result<Self> {
        let (lo, hi) = self.active_interval_with(i, coalesced_prefix_rule)?;
        if !(u > lo && u < hi) {
            return Err(Error::LocusOutsideActiveInterval { i, u, lo, hi });
        }
        let f = &self.lineages[i];
        let mut lineages: Vec<AncestralFn> = Vec::with_capacity(self.len() + 1);
        lineages.extend(
            self.lineages
                .iter()
                .enumerate()
                .filter(|(k, _)| *k != i)
                .map(|(_, g)| g.clone()),
        );
        lineages.push(f.left_of(u));
        lineages.push(f.right_of(u));
        let next = Self::from_unranked(self.n, lineages);
        debug_assert!(next.check().is_ok());
        Ok(next)
    }

    /// `C_{i,j}(x)` for `i < j`.
    pub fn coalesce(&self, i: usize, j: usize) -> Result<Self> {
        if !(i < j && j < self.len()) {
            return Err(Error::IllegalCoalescence { i, j, len: self.len() });
        }
        let merged = self.lineages[i].join(&self.lineages[j]);
        let mut lineages: Vec<AncestralFn> = Vec::with_capacity(self.len() - 1);
        lineages.extend(
            self.lineages
                .iter()
                .enumerate()
                .filter(|(k, _)| *k != i && *k != j)
                .map(|(_, g)| g.clone()),
        );
        lineages.push(merged);
        let next = Self::from_unranked(self.n, lineages);
        debug_assert!(next.check().is_ok());
        Ok(next)
    }

    pub fn apply(&self, event: &Event) -> Result<Self> {
        match *event {
            Event::Coalesce { i, j } => self.coalesce(i, j),
            Event::Recombine { i, u } => self.recombine(i, u),
        }
    }

    /// `π_s^E(x)`: the nonempty values at locus `s`, ordered by smallest label.
    pub fn site_partition(&self, s: f64) -> Vec<TypeSet> {
        let mut blocks: Vec<TypeSet> = self
            .lineages
            .iter()
            .map(|f| f.value_at(s).clone())
            .filter(|v| !v.is_empty())
            .collect();
        blocks.sort_by_key(TypeSet::min_label);
        blocks
    }

    /// `π^E_{[0,s]}(x)`: freezes every lineage at `s` and drops the null ones.
    pub fn project(&self, s: f64) -> Self {
        let lineages = self
            .lineages
            .iter()
            .map(|f| f.frozen_at(s))
            .filter(|f| !f.is_null())
            .collect();
        Self::from_unranked(self.n, lineages)
    }

    /// Rank of a lineage equal to `f`, if present.
    pub fn position_of(&self, f: &AncestralFn) -> Option<usize> {
        self.lineages.iter().position(|g| g == f)
    }
}

/// Orders lineages by the leftmost locus carrying material, then by the
/// smallest label carried there.
pub fn canonical_rank(mut lineages: Vec<AncestralFn>) -> Vec<AncestralFn> {
    lineages.sort_by(rank_order);
    lineages
}

fn rank_order(a: &AncestralFn, b: &AncestralFn) -> Ordering {
    let key = |f: &AncestralFn| {
        let start = f.first_material().unwrap_or(1.0);
        (start, f.value_at(start).min_label().unwrap_or(u32::MAX))
    };
    let (sa, ma) = key(a);
    let (sb, mb) = key(b);
    sa.total_cmp(&sb).then(ma.cmp(&mb))
}

/// `d_L(f, h)`: the measure of loci where the two functions disagree.
pub fn distance_dl(f: &AncestralFn, h: &AncestralFn) -> f64 {
    f.disagreement(h)
}

/// Lineages joined by `; `.
impl fmt::Display for State {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, g) in self.lineages.iter().enumerate() {
            if k > 0 {
                f.write_str("; ")?;
            }
            write!(f, "{g}")?;
        }
        Ok(())
    }
}
