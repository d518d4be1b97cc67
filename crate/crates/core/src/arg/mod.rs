//! Sample paths of the back-in-time process: an initial state followed by a
//! finite log of timed events and the states they lead to.

mod local_tree;
mod material;
mod project;
mod summary;
mod validate;

pub use local_tree::{local_tree, LocalTree};
pub use material::{breakpoints, material_vectors, reconstruct_state, Breakpoints, MaterialVector};
pub use project::project_arg;
pub use summary::{summary, SummaryStats};
pub use validate::{validate_arg, validate_events, Clause, ValidationReport, Violation};

use crate::error::Result;
use crate::state::{Event, State};

/// One jump: its time, the event and the state right after it.
#[derive(Clone, Debug, PartialEq)]
pub struct ArgStep {
    pub time: f64,
    pub event: Event,
    pub state: State,
}

/// A path `g`: right-continuous, piecewise constant in time, started at the
/// initial state and absorbed at the single-lineage state.
#[derive(Clone, Debug, PartialEq)]
pub struct Arg {
    initial: State,
    steps: Vec<ArgStep>,
}

impl Arg {
    /// Assembles a path without checking it; see [`validate_arg`].
    pub fn from_parts(initial: State, steps: Vec<ArgStep>) -> Self {
        Self { initial, steps }
    }

    /// Replays `events` from the initial state of `n` samples.
    ///
    /// Fails on the first event that is not applicable. Times are taken as
    /// given; [`validate_arg`] checks them.
    pub fn replay(n: u32, events: &[(f64, Event)]) -> Result<Self> {
        let initial = State::initial(n);
        let mut current = initial.clone();
        let mut steps = Vec::with_capacity(events.len());
        for (time, event) in events {
            let next = current.apply(event)?;
            steps.push(ArgStep {
                time: *time,
                event: *event,
                state: next.clone(),
            });
            current = next;
        }
        Ok(Self { initial, steps })
    }

    pub fn n_samples(&self) -> u32 {
        self.initial.n_samples()
    }

    pub fn initial(&self) -> &State {
        &self.initial
    }

    pub fn steps(&self) -> &[ArgStep] {
        &self.steps
    }

    /// `γ(g)`, the number of events.
    pub fn event_count(&self) -> usize {
        self.steps.len()
    }

    pub fn events(&self) -> impl Iterator<Item = (f64, Event)> + '_ {
        self.steps.iter().map(|s| (s.time, s.event))
    }

    pub fn final_state(&self) -> &State {
        self.steps.last().map_or(&self.initial, |s| &s.state)
    }

    /// Time of the last event: the grand most recent common ancestor.
    pub fn final_time(&self) -> f64 {
        self.steps.last().map_or(0.0, |s| s.time)
    }

    /// `g(t)`.
    pub fn state_at(&self, t: f64) -> &State {
        let k = self.steps.partition_point(|s| s.time <= t);
        if k == 0 {
            &self.initial
        } else {
            &self.steps[k - 1].state
        }
    }

    /// States paired with the time they are entered, starting at `(0, initial)`.
    pub fn states(&self) -> impl Iterator<Item = (f64, &State)> + '_ {
        std::iter::once((0.0, &self.initial)).chain(self.steps.iter().map(|s| (s.time, &s.state)))
    }

    /// The state preceding event `k`.
    pub fn state_before(&self, k: usize) -> &State {
        if k == 0 {
            &self.initial
        } else {
            &self.steps[k - 1].state
        }
    }

    pub fn max_lineages(&self) -> usize {
        self.states().map(|(_, x)| x.len()).max().unwrap_or(0)
    }

    /// `inf{t : |X^s(t)| = 1}`: the first time a single lineage carries all
    /// material on `[0, s]`.
    pub fn projected_collapse_time(&self, s: f64) -> f64 {
        let carriers = |x: &State| {
            x.lineages()
                .iter()
                .filter(|f| f.first_material().is_some_and(|a| a <= s))
                .count()
        };
        self.states()
            .find(|(_, x)| carriers(x) == 1)
            .map_or(f64::INFINITY, |(t, _)| t)
    }

    /// `∫ |𝒯_s(t)| dt` up to [`Arg::projected_collapse_time`]: the branch
    /// length of the site-`s` tree that is exposed to the next breakpoint.
    pub fn exposed_length(&self, s: f64) -> f64 {
        let tree = local_tree(self, s);
        tree.total_length + (self.projected_collapse_time(s) - tree.height)
    }
}

/// Whether `R_{iu}` creates a new discontinuity, i.e. lineage `i` carries
/// material on both sides of `u`. Recombinations inside an empty stretch of
/// a lineage leave every ancestral function continuous at `u`.
pub fn creates_breakpoint(x: &State, i: usize, u: f64) -> bool {
    x.lineages()
        .get(i)
        .is_some_and(|f| !f.value_left_of(u).is_empty() && !f.value_at(u).is_empty())
}
