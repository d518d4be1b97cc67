//! The back-in-time Markov jump process.
//!
//! From a state `x` with `|x| ≥ 2` every pair of lineages coalesces at rate 1
//! and lineage `i` recombines at rate `(ρ/2)·∫_{b_i}^{e_i} p(s) ds`, the
//! breakpoint being drawn from `p` restricted to its active interval. The
//! holding time is exponential with the total rate `q(x)` and the next event
//! is chosen with probability proportional to its rate. The process stops at
//! the absorbing single-lineage state.

use rand::Rng;

use crate::arg::{Arg, ArgStep};
use crate::config::{SimConfig, DEFAULT_EVENT_CAP};
use crate::density::BreakpointDensity;
use crate::error::{Error, Result};
use crate::rng::{exponential, open01};
use crate::state::{Event, State};

/// Components of the jump rate `q(x)`.
#[derive(Clone, Debug, PartialEq)]
pub struct RateBreakdown {
    /// `|x|(|x| − 1)/2`.
    pub coal_rate: f64,
    /// `(ρ/2)·∫_{b_i}^{e_i} p`, one entry per lineage in rank order.
    pub recomb_rates: Vec<f64>,
    /// `(b_i, e_i)` per lineage.
    pub intervals: Vec<(f64, f64)>,
    /// `q(x)`.
    pub total: f64,
}

pub fn total_rate(x: &State, rho: f64, density: &BreakpointDensity) -> RateBreakdown {
    total_rate_with(x, rho, density, true)
}

fn total_rate_with(x: &State, rho: f64, density: &BreakpointDensity, coalesced_prefix_rule: bool) -> RateBreakdown {
    let k = x.len();
    if k < 2 {
        return RateBreakdown {
            coal_rate: 0.0,
            recomb_rates: vec![0.0; k],
            intervals: vec![(1.0, 1.0); k],
            total: 0.0,
        };
    }
    let intervals: Vec<(f64, f64)> = (0..k)
        .map(|i| {
            x.active_interval_with(i, coalesced_prefix_rule)
                .expect("index in range")
        })
        .collect();
    let recomb_rates: Vec<f64> = intervals
        .iter()
        .map(|&(lo, hi)| 0.5 * rho * density.mass(lo, hi))
        .collect();
    let coal_rate = (k * (k - 1)) as f64 / 2.0;
    let total = coal_rate + recomb_rates.iter().sum::<f64>();
    RateBreakdown {
        coal_rate,
        recomb_rates,
        intervals,
        total,
    }
}

/// Draws the next event of the embedded chain from `x`.
pub fn sample_event<R: Rng + ?Sized>(
    x: &State,
    rates: &RateBreakdown,
    density: &BreakpointDensity,
    rng: &mut R,
) -> Result<Event> {
    let k = x.len();
    if k < 2 || rates.total <= 0.0 {
        return Err(Error::Absorbed);
    }
    let mut target = open01(rng) * rates.total;
    if target < rates.coal_rate {
        let a = rng.random_range(0..k);
        let mut b = rng.random_range(0..k - 1);
        if b >= a {
            b += 1;
        }
        return Ok(Event::Coalesce {
            i: a.min(b),
            j: a.max(b),
        });
    }
    target -= rates.coal_rate;
    let mut chosen = None;
    for (i, rate) in rates.recomb_rates.iter().enumerate() {
        if *rate <= 0.0 {
            continue;
        }
        chosen = Some(i);
        if target < *rate {
            break;
        }
        target -= rate;
    }
    let i = chosen.ok_or(Error::Absorbed)?;
    let (lo, hi) = rates.intervals[i];
    let u = density.sample_truncated(lo, hi, rng);
    Ok(Event::Recombine { i, u })
}

/// Holding time in the current state: exponential with rate `q(x)`.
pub fn sample_waiting_time<R: Rng + ?Sized>(rates: &RateBreakdown, rng: &mut R) -> Result<f64> {
    if rates.total <= 0.0 {
        return Err(Error::Absorbed);
    }
    Ok(exponential(rng, rates.total))
}

/// Knobs of the back-in-time engine.
#[derive(Clone, Debug, PartialEq)]
pub struct EngineOptions {
    pub event_cap: u64,
    /// Forbid recombination inside the prefix on which all samples already
    /// share one ancestor. Switching it off yields a deliberately wrong engine
    /// that the statistics harness must be able to tell apart.
    pub coalesced_prefix_rule: bool,
}

impl Default for EngineOptions {
    fn default() -> Self {
        Self {
            event_cap: DEFAULT_EVENT_CAP,
            coalesced_prefix_rule: true,
        }
    }
}

pub fn simulate_backintime<R: Rng + ?Sized>(config: &SimConfig, rng: &mut R) -> Result<Arg> {
    simulate_backintime_with(config, &EngineOptions::default(), rng)
}

pub fn simulate_backintime_with<R: Rng + ?Sized>(
    config: &SimConfig,
    options: &EngineOptions,
    rng: &mut R,
) -> Result<Arg> {
    config.validate()?;
    let initial = State::initial(config.n_samples);
    let mut current = initial.clone();
    let mut steps = Vec::new();
    let mut time = 0.0;
    loop {
        let rates = total_rate_with(&current, config.rho, &config.density, options.coalesced_prefix_rule);
        if rates.total <= 0.0 {
            break;
        }
        if steps.len() as u64 >= options.event_cap {
            return Err(Error::EventCapExceeded { cap: options.event_cap });
        }
        time += sample_waiting_time(&rates, rng)?;
        let event = sample_event(&current, &rates, &config.density, rng)?;
        let next = match event {
            Event::Coalesce { i, j } => current.coalesce(i, j)?,
            Event::Recombine { i, u } => current.recombine_with(i, u, options.coalesced_prefix_rule)?,
        };
        steps.push(ArgStep {
            time,
            event,
            state: next.clone(),
        });
        current = next;
    }
    Ok(Arg::from_parts(initial, steps))
}
