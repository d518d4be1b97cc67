use std::fmt;

use super::{creates_breakpoint, Arg};
use crate::ancestral::AncestralFn;
use crate::error::{Error, Result};
use crate::state::{Event, State};
use crate::typeset::TypeSet;

/// `Bp(g)`: the loci where some lineage of the path is discontinuous, in
/// increasing order, with the time of the event that created each one.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Breakpoints {
    /// `S_1 < … < S_m`.
    pub loci: Vec<f64>,
    /// `τ_{n(i)}`, aligned with `loci`.
    pub times: Vec<f64>,
}

impl Breakpoints {
    pub fn len(&self) -> usize {
        self.loci.len()
    }

    pub fn is_empty(&self) -> bool {
        self.loci.is_empty()
    }

    /// `S_i` with `S_0 = 0` and `S_i = 1` beyond the last breakpoint.
    pub fn locus(&self, i: usize) -> f64 {
        match i {
            0 => 0.0,
            i if i <= self.loci.len() => self.loci[i - 1],
            _ => 1.0,
        }
    }
}

/// Collects the loci of all recombinations that create a discontinuity.
pub fn breakpoints(arg: &Arg) -> Breakpoints {
    let mut found: Vec<(f64, f64)> = arg
        .steps()
        .iter()
        .enumerate()
        .filter_map(|(k, step)| match step.event {
            Event::Recombine { i, u } if creates_breakpoint(arg.state_before(k), i, u) => Some((u, step.time)),
            _ => None,
        })
        .collect();
    found.sort_by(|a, b| a.0.total_cmp(&b.0));
    Breakpoints {
        loci: found.iter().map(|p| p.0).collect(),
        times: found.iter().map(|p| p.1).collect(),
    }
}

/// `(f(S_0), f(S_1), …, f(S_m))` for one lineage.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MaterialVector(pub Vec<TypeSet>);

impl MaterialVector {
    pub fn of(f: &AncestralFn, loci: &[f64]) -> Self {
        Self(f.sample_on(loci))
    }

    pub fn entries(&self) -> &[TypeSet] {
        &self.0
    }

    pub fn is_null(&self) -> bool {
        self.0.iter().all(TypeSet::is_empty)
    }

    /// `Σ_l z_l · 1[S_l, S_{l+1})`.
    pub fn to_fn(&self, loci: &[f64]) -> AncestralFn {
        AncestralFn::from_grid(loci, &self.0)
    }
}

impl fmt::Debug for MaterialVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (k, z) in self.0.iter().enumerate() {
            if k > 0 {
                f.write_str(",")?;
            }
            write!(f, "{z}")?;
        }
        f.write_str(")")
    }
}

/// `𝔖(g(t))`, one vector per lineage of the state in force at `t`, in
/// rank order.
pub fn material_vectors(arg: &Arg, t: f64) -> Vec<MaterialVector> {
    let loci = breakpoints(arg).loci;
    arg.state_at(t)
        .lineages()
        .iter()
        .map(|f| MaterialVector::of(f, &loci))
        .collect()
}

/// Rebuilds a state from its material vectors and the breakpoint loci.
pub fn reconstruct_state(n: u32, loci: &[f64], vectors: &[MaterialVector]) -> Result<State> {
    if let Some(bad) = vectors.iter().find(|z| z.0.len() != loci.len() + 1) {
        return Err(Error::InvalidState(format!(
            "material vector {bad:?} does not have {} entries",
            loci.len() + 1
        )));
    }
    State::new(n, vectors.iter().map(|z| z.to_fn(loci)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::backintime::simulate_backintime;
    use crate::config::SimConfig;

    #[test]
    fn loci_are_sorted_with_their_creation_times() {
        // {1} splits at 0.7, then its left part splits at 0.2.
        let arg = Arg::replay(
            2,
            &[
                (0.4, Event::Recombine { i: 0, u: 0.7 }),
                (0.9, Event::Recombine { i: 0, u: 0.2 }),
            ],
        )
        .unwrap();
        let bp = breakpoints(&arg);
        assert_eq!(bp.loci, vec![0.2, 0.7]);
        assert_eq!(bp.times, vec![0.9, 0.4]);
        assert_eq!(bp.locus(0), 0.0);
        assert_eq!(bp.locus(2), 0.7);
        assert_eq!(bp.locus(3), 1.0);
    }

    #[test]
    fn kingman_path_has_no_breakpoints() {
        let config = SimConfig::new(5, 0.0).with_seed(3);
        let arg = simulate_backintime(&config, &mut config.rng()).unwrap();
        assert!(breakpoints(&arg).is_empty());
    }

    #[test]
    fn vectors_at_start_and_end() {
        let arg = Arg::replay(
            2,
            &[
                (0.4, Event::Recombine { i: 0, u: 0.7 }),
                (0.9, Event::Recombine { i: 0, u: 0.2 }),
                (1.0, Event::Coalesce { i: 0, j: 1 }),
                (1.1, Event::Coalesce { i: 0, j: 1 }),
                (1.2, Event::Coalesce { i: 0, j: 1 }),
            ],
        )
        .unwrap();
        assert!(arg.final_state().is_absorbing());
        let start = material_vectors(&arg, 0.0);
        let one = TypeSet::singleton(1);
        let two = TypeSet::singleton(2);
        assert_eq!(
            start,
            vec![
                MaterialVector(vec![one.clone(), one.clone(), one]),
                MaterialVector(vec![two.clone(), two.clone(), two]),
            ]
        );
        let end = material_vectors(&arg, 5.0);
        assert_eq!(end, vec![MaterialVector(vec![TypeSet::full(2); 3])]);
    }

    #[test]
    fn breakpoints_match_state_discontinuities_and_round_trip() {
        for seed in 0..200 {
            let config = SimConfig::new(4, 1.5).with_seed(seed);
            let arg = simulate_backintime(&config, &mut config.rng()).unwrap();
            let bp = breakpoints(&arg);
            let mut seen: Vec<f64> = arg.states().flat_map(|(_, x)| x.breakpoints()).collect();
            seen.sort_by(f64::total_cmp);
            seen.dedup();
            assert_eq!(seen, bp.loci);
            for (t, x) in arg.states() {
                let vectors = material_vectors(&arg, t);
                assert!(vectors.iter().all(|z| !z.is_null()));
                for col in 0..=bp.len() {
                    let mut labels: Vec<u32> = vectors.iter().flat_map(|z| z.0[col].iter()).collect();
                    labels.sort_unstable();
                    assert_eq!(labels, (1..=4).collect::<Vec<_>>());
                }
                assert_eq!(&reconstruct_state(4, &bp.loci, &vectors).unwrap(), x);
            }
        }
    }
}
