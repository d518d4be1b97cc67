use std::collections::HashMap;
use std::fmt::Write as _;

use super::Arg;
use crate::typeset::TypeSet;

/// `𝒯_s`: the genealogy at one locus as a sequence of coarsening partitions.
#[derive(Clone, Debug, PartialEq)]
pub struct LocalTree {
    pub site: f64,
    /// `(time, partition)` from the singletons to the full set; blocks are
    /// ordered by their smallest label.
    pub levels: Vec<(f64, Vec<TypeSet>)>,
    /// `β_s`, the time of the most recent common ancestor at `s`.
    pub height: f64,
    /// `L_s = ∫_0^{β_s} |𝒯_s(t)| dt`.
    pub total_length: f64,
}

pub fn local_tree(arg: &Arg, s: f64) -> LocalTree {
    let mut levels: Vec<(f64, Vec<TypeSet>)> = Vec::new();
    for (t, x) in arg.states() {
        let partition = x.site_partition(s);
        if levels.last().is_some_and(|(_, p)| *p == partition) {
            continue;
        }
        let done = partition.len() == 1;
        levels.push((t, partition));
        if done {
            break;
        }
    }
    let height = levels.last().map_or(0.0, |(t, _)| *t);
    let total_length = levels.windows(2).map(|w| w[0].1.len() as f64 * (w[1].0 - w[0].0)).sum();
    LocalTree {
        site: s,
        levels,
        height,
        total_length,
    }
}

impl LocalTree {
    /// The two blocks merged at each level transition, with its time.
    pub fn merges(&self) -> Vec<(f64, TypeSet, TypeSet)> {
        self.levels
            .windows(2)
            .map(|w| {
                let gone: Vec<&TypeSet> = w[0].1.iter().filter(|b| !w[1].1.contains(b)).collect();
                assert_eq!(gone.len(), 2, "levels must differ by one merge");
                (w[1].0, gone[0].clone(), gone[1].clone())
            })
            .collect()
    }

    /// Binary Newick string; the child holding the smaller label comes first.
    pub fn to_newick(&self) -> String {
        let mut nodes: HashMap<TypeSet, (String, f64)> = HashMap::new();
        if let Some((_, leaves)) = self.levels.first() {
            for block in leaves {
                let label = block.iter().map(|k| k.to_string()).collect::<Vec<_>>().join("_");
                nodes.insert(block.clone(), (label, 0.0));
            }
        }
        let mut root = None;
        for (t, a, b) in self.merges() {
            let (na, ha) = nodes.remove(&a).expect("merged block exists");
            let (nb, hb) = nodes.remove(&b).expect("merged block exists");
            let ((n1, h1), (n2, h2)) = if a.min_label() < b.min_label() {
                ((na, ha), (nb, hb))
            } else {
                ((nb, hb), (na, ha))
            };
            let joined = a.union(&b);
            nodes.insert(joined.clone(), (format!("({n1}:{},{n2}:{})", t - h1, t - h2), t));
            root = Some(joined);
        }
        let top = match root {
            Some(block) => nodes.remove(&block).expect("root exists").0,
            None => nodes.into_values().next().map_or(String::new(), |(n, _)| n),
        };
        format!("{top};")
    }

    /// `time,partition` CSV rows with a header.
    pub fn to_levels_csv(&self) -> String {
        let mut out = String::from("time,partition\n");
        for (t, p) in &self.levels {
            let blocks: Vec<String> = p.iter().map(|b| b.to_string()).collect();
            let _ = writeln!(out, "{t},\"{}\"", blocks.join(" "));
        }
        out
    }
}
