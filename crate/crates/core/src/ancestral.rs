//! Piecewise-constant ancestral material along the unit sequence `[0, 1)`.

use std::fmt;

use crate::error::{Error, Result};
use crate::numfmt::g17;
use crate::typeset::TypeSet;

/// A right-continuous, piecewise-constant, [`TypeSet`]-valued function on
/// `[0, 1)`: the ancestral material carried by one lineage.
///
/// Stored in canonical form. `values[k]` holds on `[a_k, a_{k+1})` with
/// `a_0 = 0`, `a_{m+1} = 1` and `a_1 < … < a_m` the listed breakpoints;
/// neighbouring values always differ, so every breakpoint is a genuine
/// discontinuity and structural equality is functional equality.
#[derive(Clone, PartialEq, Debug)]
pub struct AncestralFn {
    breaks: Vec<f64>,
    values: Vec<TypeSet>,
}

impl AncestralFn {
    pub fn constant(value: TypeSet) -> Self {
        Self {
            breaks: Vec::new(),
            values: vec![value],
        }
    }

    /// Builds a function from its discontinuities and piece values.
    ///
    /// `breaks` must be strictly increasing inside `(0, 1)` and
    /// `values.len() == breaks.len() + 1`. Equal neighbours are merged.
    pub fn from_pieces(breaks: Vec<f64>, values: Vec<TypeSet>) -> Result<Self> {
        if values.len() != breaks.len() + 1 {
            return Err(Error::InvalidFunction(format!(
                "{} breakpoints need {} values, got {}",
                breaks.len(),
                breaks.len() + 1,
                values.len()
            )));
        }
        if let Some(bad) = breaks.iter().find(|a| !(**a > 0.0 && **a < 1.0)) {
            return Err(Error::InvalidFunction(format!("breakpoint {bad} is outside (0, 1)")));
        }
        if breaks.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidFunction("breakpoints are not strictly increasing".into()));
        }
        Ok(Self::normalized(breaks, values))
    }

    /// Builds a function from `(start, value)` steps; the first start must be 0.
    pub fn from_steps(steps: &[(f64, TypeSet)]) -> Result<Self> {
        match steps.first() {
            Some((start, _)) if *start == 0.0 => {}
            _ => return Err(Error::InvalidFunction("the first step must start at locus 0".into())),
        }
        let breaks = steps[1..].iter().map(|(a, _)| *a).collect();
        let values = steps.iter().map(|(_, v)| v.clone()).collect();
        Self::from_pieces(breaks, values)
    }

    /// Reassembles `Σ_l values[l] · 1[grid_l, grid_{l+1})` with `grid_0 = 0`.
    ///
    /// `grid` lists the interior loci `S_1 < … < S_m`.
    pub fn from_grid(grid: &[f64], values: &[TypeSet]) -> Self {
        debug_assert_eq!(grid.len() + 1, values.len());
        Self::normalized(grid.to_vec(), values.to_vec())
    }

    pub(crate) fn normalized(breaks: Vec<f64>, values: Vec<TypeSet>) -> Self {
        let mut out_breaks = Vec::with_capacity(breaks.len());
        let mut out_values: Vec<TypeSet> = Vec::with_capacity(values.len());
        let mut values = values.into_iter();
        out_values.push(values.next().expect("at least one piece"));
        for (a, v) in breaks.into_iter().zip(values) {
            if out_values.last() != Some(&v) {
                out_breaks.push(a);
                out_values.push(v);
            }
        }
        Self {
            breaks: out_breaks,
            values: out_values,
        }
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breaks
    }

    pub fn values(&self) -> &[TypeSet] {
        &self.values
    }

    /// `(start, end, value)` for each piece, left to right.
    pub fn pieces(&self) -> impl Iterator<Item = (f64, f64, &TypeSet)> + '_ {
        let m = self.breaks.len();
        self.values.iter().enumerate().map(move |(k, v)| {
            let start = if k == 0 { 0.0 } else { self.breaks[k - 1] };
            let end = if k == m { 1.0 } else { self.breaks[k] };
            (start, end, v)
        })
    }

    /// `f(s)`.
    pub fn value_at(&self, s: f64) -> &TypeSet {
        let k = self.breaks.partition_point(|a| *a <= s);
        &self.values[k]
    }

    /// `f(s−)`, the value on the piece immediately left of `s`.
    pub fn value_left_of(&self, s: f64) -> &TypeSet {
        let k = self.breaks.partition_point(|a| *a < s);
        &self.values[k]
    }

    /// True when `f ≡ ∅`.
    pub fn is_null(&self) -> bool {
        self.values.iter().all(TypeSet::is_empty)
    }

    /// `min{s : f(s) ≠ ∅}`, or `None` when the function is null.
    pub fn first_material(&self) -> Option<f64> {
        self.pieces().find(|(_, _, v)| !v.is_empty()).map(|(start, _, _)| start)
    }

    /// `inf{u : f(s) = ∅ for all s ∈ (u, 1)} ∧ 1`.
    pub fn end_of_material(&self) -> f64 {
        let mut end = 0.0;
        for (_, stop, v) in self.pieces() {
            if !v.is_empty() {
                end = stop;
            }
        }
        end
    }

    /// `inf{u : f(u) ≠ full}`; 1 when `f ≡ full`.
    pub fn first_departure_from(&self, full: &TypeSet) -> f64 {
        self.pieces()
            .find(|(_, _, v)| *v != full)
            .map_or(1.0, |(start, _, _)| start)
    }

    /// `f ∨ h`, the pointwise union.
    pub fn join(&self, other: &Self) -> Self {
        self.combine(other, TypeSet::union)
    }

    /// `f^{(u−)}`: `f` on `[0, u)`, empty from `u` on.
    pub fn left_of(&self, u: f64) -> Self {
        let k = self.breaks.partition_point(|a| *a < u);
        let mut breaks = self.breaks[..k].to_vec();
        let mut values = self.values[..=k].to_vec();
        breaks.push(u);
        values.push(TypeSet::empty());
        Self::normalized(breaks, values)
    }

    /// `f^{(u+)}`: empty on `[0, u)`, `f` from `u` on.
    pub fn right_of(&self, u: f64) -> Self {
        let k = self.breaks.partition_point(|a| *a <= u);
        let mut breaks = vec![u];
        breaks.extend_from_slice(&self.breaks[k..]);
        let mut values = vec![TypeSet::empty()];
        values.extend_from_slice(&self.values[k..]);
        Self::normalized(breaks, values)
    }

    /// `f^s`: `f` left of `s`, frozen at `f(s)` from `s` on.
    pub fn frozen_at(&self, s: f64) -> Self {
        let k = self.breaks.partition_point(|a| *a <= s);
        Self {
            breaks: self.breaks[..k].to_vec(),
            values: self.values[..=k].to_vec(),
        }
    }

    /// Lebesgue measure of `{s ∈ [0, 1) : f(s) ≠ h(s)}`.
    pub fn disagreement(&self, other: &Self) -> f64 {
        merged_grid(&self.breaks, &other.breaks)
            .windows(2)
            .filter(|w| self.value_at(w[0]) != other.value_at(w[0]))
            .map(|w| w[1] - w[0])
            .sum()
    }

    /// The values at loci `0, grid[0], grid[1], …`.
    pub fn sample_on(&self, grid: &[f64]) -> Vec<TypeSet> {
        std::iter::once(0.0)
            .chain(grid.iter().copied())
            .map(|s| self.value_at(s).clone())
            .collect()
    }

    fn combine(&self, other: &Self, op: impl Fn(&TypeSet, &TypeSet) -> TypeSet) -> Self {
        let grid = merged_grid(&self.breaks, &other.breaks);
        let values = grid[..grid.len() - 1]
            .iter()
            .map(|s| op(self.value_at(*s), other.value_at(*s)))
            .collect();
        Self::normalized(grid[1..grid.len() - 1].to_vec(), values)
    }
}

/// `0`, the sorted union of both breakpoint lists, then `1`.
pub(crate) fn merged_grid(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut grid = Vec::with_capacity(a.len() + b.len() + 2);
    grid.push(0.0);
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        let next = match (a.get(i), b.get(j)) {
            (Some(x), Some(y)) if x < y => {
                i += 1;
                *x
            }
            (Some(x), Some(y)) if x > y => {
                j += 1;
                *y
            }
            (Some(x), Some(_)) => {
                i += 1;
                j += 1;
                *x
            }
            (Some(x), None) => {
                i += 1;
                *x
            }
            (None, Some(y)) => {
                j += 1;
                *y
            }
            (None, None) => unreachable!(),
        };
        grid.push(next);
    }
    grid.push(1.0);
    grid
}

/// Renders as `[0,{1,2} | 0.5,{1}]`, loci with 17 significant digits.
impl fmt::Display for AncestralFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (k, (start, _, v)) in self.pieces().enumerate() {
            if k > 0 {
                f.write_str(" | ")?;
            }
            write!(f, "{},{}", g17(start), v)?;
        }
        f.write_str("]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(labels: &[u32]) -> TypeSet {
        labels.iter().copied().collect()
    }

    #[test]
    fn canonical_form_merges_equal_neighbours() {
        let f = AncestralFn::from_steps(&[(0.0, set(&[1])), (0.3, set(&[1])), (0.6, set(&[2]))]).unwrap();
        assert_eq!(f.breakpoints(), &[0.6]);
        assert_eq!(f.values(), &[set(&[1]), set(&[2])]);
    }

    #[test]
    fn rejects_malformed_pieces() {
        assert!(AncestralFn::from_pieces(vec![0.5, 0.4], vec![set(&[1]); 3]).is_err());
        assert!(AncestralFn::from_pieces(vec![1.0], vec![set(&[1]); 2]).is_err());
        assert!(AncestralFn::from_pieces(vec![0.5], vec![set(&[1])]).is_err());
        assert!(AncestralFn::from_steps(&[(0.1, set(&[1]))]).is_err());
    }

    #[test]
    fn split_then_join_restores() {
        let f = AncestralFn::from_steps(&[(0.0, set(&[1, 2])), (0.3, set(&[1]))]).unwrap();
        for u in [0.1, 0.3, 0.7] {
            assert_eq!(f.left_of(u).join(&f.right_of(u)), f);
        }
        let l = f.left_of(0.7);
        assert_eq!(l.value_at(0.69), &set(&[1]));
        assert!(l.value_at(0.7).is_empty());
    }

    #[test]
    fn material_extent() {
        let f = AncestralFn::from_steps(&[(0.0, TypeSet::empty()), (0.2, set(&[2])), (0.7, TypeSet::empty())]).unwrap();
        assert_eq!(f.first_material(), Some(0.2));
        assert_eq!(f.end_of_material(), 0.7);
        assert_eq!(f.value_left_of(0.2), &TypeSet::empty());
        assert_eq!(f.value_at(0.2), &set(&[2]));
    }

    #[test]
    fn freezing() {
        let f = AncestralFn::from_steps(&[(0.0, set(&[1])), (0.5, set(&[1, 2]))]).unwrap();
        assert_eq!(f.frozen_at(0.2), AncestralFn::constant(set(&[1])));
        assert_eq!(
            f.frozen_at(0.5),
            AncestralFn::constant(set(&[1])).join(&f.right_of(0.5))
        );
        assert_eq!(f.frozen_at(0.9), f);
    }

    #[test]
    fn disagreement_measure() {
        let f = AncestralFn::constant(set(&[1]));
        let h = AncestralFn::from_steps(&[(0.0, set(&[1])), (0.5, set(&[1, 2]))]).unwrap();
        assert_eq!(f.disagreement(&f), 0.0);
        assert_eq!(f.disagreement(&h), 0.5);
        assert_eq!(f.disagreement(&AncestralFn::constant(set(&[2]))), 1.0);
    }

    #[test]
    fn display() {
        let h = AncestralFn::from_steps(&[(0.0, set(&[1])), (0.5, set(&[1, 2]))]).unwrap();
        assert_eq!(h.to_string(), "[0,{1} | 0.5,{1,2}]");
    }
}
