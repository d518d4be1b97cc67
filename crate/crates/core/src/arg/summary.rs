use super::{breakpoints, local_tree, Arg};

/// Per-path statistics compared between engines.
#[derive(Clone, Debug, PartialEq)]
pub struct SummaryStats {
    /// `|Bp(g)|`.
    pub breakpoint_count: usize,
    /// `γ(g)`.
    pub event_count: usize,
    /// `(s, β_s)` for each requested site.
    pub tmrca_at: Vec<(f64, f64)>,
    /// `(s, L_s)` for each requested site.
    pub length_at: Vec<(f64, f64)>,
    pub grand_mrca_time: f64,
    pub max_lineages: usize,
}

impl SummaryStats {
    pub fn tmrca(&self, s: f64) -> Option<f64> {
        lookup(&self.tmrca_at, s)
    }

    pub fn length(&self, s: f64) -> Option<f64> {
        lookup(&self.length_at, s)
    }
}

fn lookup(table: &[(f64, f64)], s: f64) -> Option<f64> {
    table.iter().find(|(site, _)| *site == s).map(|(_, v)| *v)
}

pub fn summary(arg: &Arg, sites: &[f64]) -> SummaryStats {
    let trees: Vec<_> = sites.iter().map(|&s| local_tree(arg, s)).collect();
    SummaryStats {
        breakpoint_count: breakpoints(arg).len(),
        event_count: arg.event_count(),
        tmrca_at: trees.iter().map(|t| (t.site, t.height)).collect(),
        length_at: trees.iter().map(|t| (t.site, t.total_length)).collect(),
        grand_mrca_time: arg.final_time(),
        max_lineages: arg.max_lineages(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::backintime::simulate_backintime;
    use crate::config::SimConfig;
    use crate::state::Event;

    #[test]
    fn kingman_summary() {
        let config = SimConfig::new(4, 0.0).with_seed(9);
        let arg = simulate_backintime(&config, &mut config.rng()).unwrap();
        let stats = summary(&arg, &[0.0, 0.5]);
        assert_eq!(stats.breakpoint_count, 0);
        assert_eq!(stats.event_count, 3);
        assert_eq!(stats.max_lineages, 4);
        assert_eq!(stats.tmrca(0.5), Some(stats.grand_mrca_time));
        assert_eq!(stats.tmrca(0.25), None);
    }

    #[test]
    fn two_leaf_length() {
        let arg = Arg::replay(2, &[(1.3, Event::Coalesce { i: 0, j: 1 })]).unwrap();
        assert_eq!(summary(&arg, &[0.0]).length(0.0), Some(2.6));
    }

    #[test]
    fn fields_are_consistent() {
        for seed in 0..100 {
            let config = SimConfig::new(5, 1.0).with_seed(seed);
            let arg = simulate_backintime(&config, &mut config.rng()).unwrap();
            let stats = summary(&arg, &[0.0, 0.5, 0.9]);
            assert!(stats.event_count >= 4);
            assert!(stats.event_count >= 4 + 2 * stats.breakpoint_count);
            for (_, h) in &stats.tmrca_at {
                assert!(*h <= stats.grand_mrca_time);
            }
            for (_, l) in &stats.length_at {
                assert!(l.is_finite() && *l > 0.0);
            }
        }
    }
}
