use std::collections::HashMap;
use std::fmt;

use super::{creates_breakpoint, Arg};
use crate::numfmt::g17;
use crate::state::{Event, State};

/// The membership conditions a path must satisfy.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Clause {
    /// (a) the path starts with one singleton lineage per sample.
    InitialState,
    /// (b) every jump is a legal recombination or coalescence.
    LegalTransition,
    /// (c) no breakpoint is created twice.
    DistinctBreakpoints,
    /// (d) the path ends in the single-lineage state.
    Absorbed,
    /// (e) event times are finite, positive and strictly increasing.
    IncreasingTimes,
}

impl Clause {
    pub fn tag(&self) -> char {
        match self {
            Self::InitialState => 'a',
            Self::LegalTransition => 'b',
            Self::DistinctBreakpoints => 'c',
            Self::Absorbed => 'd',
            Self::IncreasingTimes => 'e',
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Violation {
    pub clause: Clause,
    /// Zero-based event index, when the violation is tied to one event.
    pub event: Option<usize>,
    pub detail: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self.clause.tag())?;
        if let Some(k) = self.event {
            write!(f, " event {k}")?;
        }
        write!(f, ": {}", self.detail)
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ValidationReport {
    pub events_checked: usize,
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn violates(&self, clause: Clause) -> bool {
        self.violations.iter().any(|v| v.clause == clause)
    }

    fn push(&mut self, clause: Clause, event: Option<usize>, detail: String) {
        self.violations.push(Violation { clause, event, detail });
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.passed() {
            return write!(f, "PASS ({} events)", self.events_checked);
        }
        writeln!(
            f,
            "FAIL ({} events, {} violations)",
            self.events_checked,
            self.violations.len()
        )?;
        for v in &self.violations {
            writeln!(f, "  {v}")?;
        }
        Ok(())
    }
}

/// Checks clauses (a) through (e) on a path with recorded states.
pub fn validate_arg(arg: &Arg) -> ValidationReport {
    validate_path(
        arg.n_samples(),
        arg.initial(),
        arg.steps().iter().map(|s| (s.time, s.event, Some(&s.state))),
    )
}

/// Checks an events-only log by replaying it from the initial state.
pub fn validate_events(n: u32, events: &[(f64, Event)]) -> ValidationReport {
    let initial = State::initial(n);
    validate_path(n, &initial, events.iter().map(|(t, e)| (*t, *e, None)))
}

fn validate_path<'a>(
    n: u32,
    initial: &State,
    steps: impl Iterator<Item = (f64, Event, Option<&'a State>)>,
) -> ValidationReport {
    let mut report = ValidationReport::default();
    if *initial != State::initial(n) || initial.check().is_err() {
        report.push(Clause::InitialState, None, format!("initial state is {initial}"));
    }
    let mut current = Some(initial.clone());
    let mut last_time = 0.0;
    let mut seen: HashMap<u64, usize> = HashMap::new();
    for (k, (time, event, recorded)) in steps.enumerate() {
        report.events_checked += 1;
        if !(time.is_finite() && time > last_time) {
            report.push(
                Clause::IncreasingTimes,
                Some(k),
                format!("time {} does not exceed {}", g17(time), g17(last_time)),
            );
        }
        if time.is_finite() {
            last_time = last_time.max(time);
        }
        let Some(prev) = current.take() else {
            continue;
        };
        if let Event::Recombine { i, u } = event {
            if creates_breakpoint(&prev, i, u) {
                if let Some(first) = seen.insert(u.to_bits(), k) {
                    report.push(
                        Clause::DistinctBreakpoints,
                        Some(k),
                        format!("breakpoint {} already created by event {first}", g17(u)),
                    );
                }
            }
        }
        let next = match prev.apply(&event) {
            Ok(next) => next,
            Err(e) => {
                report.push(Clause::LegalTransition, Some(k), e.to_string());
                current = recorded.cloned();
                continue;
            }
        };
        match recorded {
            Some(state) if *state != next => {
                report.push(
                    Clause::LegalTransition,
                    Some(k),
                    format!("recorded state {state} differs from {next}"),
                );
                current = Some(state.clone());
            }
            _ => current = Some(next),
        }
    }
    match current {
        Some(x) if !x.is_absorbing() => {
            report.push(Clause::Absorbed, None, format!("path ends with {} lineages", x.len()))
        }
        None => report.push(Clause::Absorbed, None, "the path cannot be replayed to its end".into()),
        _ => {}
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::backintime::simulate_backintime;
    use crate::config::SimConfig;

    fn coal(t: f64, i: usize, j: usize) -> (f64, Event) {
        (t, Event::Coalesce { i, j })
    }

    fn rec(t: f64, i: usize, u: f64) -> (f64, Event) {
        (t, Event::Recombine { i, u })
    }

    #[test]
    fn simulated_paths_pass() {
        for seed in 0..50 {
            let config = SimConfig::new(4, 2.0).with_seed(seed);
            let arg = simulate_backintime(&config, &mut config.rng()).unwrap();
            let report = validate_arg(&arg);
            assert!(report.passed(), "{report}");
            let events: Vec<_> = arg.events().collect();
            assert!(validate_events(4, &events).passed());
        }
    }

    #[test]
    fn repeated_locus_violates_distinctness() {
        // Split {1} at 0.5, rejoin, split again at 0.5, rejoin, then coalesce.
        let events = [
            rec(0.1, 0, 0.5),
            coal(0.2, 0, 2),
            rec(0.3, 0, 0.5),
            coal(0.4, 0, 2),
            coal(0.5, 0, 1),
        ];
        let report = validate_events(2, &events);
        assert!(report.violates(Clause::DistinctBreakpoints), "{report}");
        let v = report
            .violations
            .iter()
            .find(|v| v.clause == Clause::DistinctBreakpoints)
            .unwrap();
        assert_eq!(v.event, Some(2));
        assert!(!report.violates(Clause::LegalTransition));
        assert!(!report.violates(Clause::Absorbed));
    }

    #[test]
    fn nonexistent_lineage_violates_legality() {
        let report = validate_events(3, &[coal(0.1, 0, 1), coal(0.2, 0, 2)]);
        assert!(report.violates(Clause::LegalTransition));
        assert_eq!(report.violations[0].event, Some(1));
    }

    #[test]
    fn unordered_times_and_unfinished_paths() {
        let report = validate_events(3, &[coal(0.5, 0, 1), coal(0.2, 0, 1)]);
        assert!(report.violates(Clause::IncreasingTimes));
        assert!(!report.violates(Clause::Absorbed));
        let report = validate_events(3, &[coal(0.5, 0, 1)]);
        assert!(report.violates(Clause::Absorbed));
        assert!(validate_events(2, &[coal(0.0, 0, 1)]).violates(Clause::IncreasingTimes));
    }

    #[test]
    fn wrong_initial_state_is_reported() {
        let arg = Arg::from_parts(State::absorbing(2), Vec::new());
        let report = validate_arg(&arg);
        assert!(report.violates(Clause::InitialState));
    }

    #[test]
    fn tampered_state_is_reported() {
        let config = SimConfig::new(3, 1.0).with_seed(2);
        let arg = simulate_backintime(&config, &mut config.rng()).unwrap();
        let mut steps = arg.steps().to_vec();
        steps[0].state = State::initial(3);
        let report = validate_arg(&Arg::from_parts(arg.initial().clone(), steps));
        assert!(report.violates(Clause::LegalTransition));
    }
}
