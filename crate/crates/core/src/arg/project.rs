use super::{Arg, ArgStep};
use crate::error::{Error, Result};
use crate::state::{Event, State};

/// `X^s = π^G_{[0,s]}(g)`: the path of projected states with repeated
/// states compressed away.
///
/// Each remaining jump is identified as the coalescence or recombination
/// relating consecutive projected states.
pub fn project_arg(arg: &Arg, s: f64) -> Result<Arg> {
    let initial = arg.initial().project(s);
    let mut current = initial.clone();
    let mut steps = Vec::new();
    for step in arg.steps() {
        let next = step.state.project(s);
        if next == current {
            continue;
        }
        let event = infer_event(&current, &next, &step.event).ok_or_else(|| {
            Error::InvalidState(format!(
                "projected states at time {} are not one event apart",
                step.time
            ))
        })?;
        steps.push(ArgStep {
            time: step.time,
            event,
            state: next.clone(),
        });
        current = next;
    }
    Ok(Arg::from_parts(initial, steps))
}

/// A recombination inside an empty stretch is only determined up to its
/// gap, so the original locus is kept whenever it yields the same state.
fn infer_event(before: &State, after: &State, original: &Event) -> Option<Event> {
    let gone: Vec<usize> = (0..before.len())
        .filter(|&k| after.position_of(&before.lineages()[k]).is_none())
        .collect();
    let new: Vec<usize> = (0..after.len())
        .filter(|&k| before.position_of(&after.lineages()[k]).is_none())
        .collect();
    let event = match (gone.as_slice(), new.as_slice()) {
        ([i, j], [_]) => Event::Coalesce { i: *i, j: *j },
        ([i], [a, b]) => {
            if let Event::Recombine { u, .. } = *original {
                let kept = Event::Recombine { i: *i, u };
                if before.apply(&kept).ok().as_ref() == Some(after) {
                    return Some(kept);
                }
            }
            let start = |k: usize| after.lineages()[k].first_material().unwrap_or(1.0);
            Event::Recombine {
                i: *i,
                u: start(*a).max(start(*b)),
            }
        }
        _ => return None,
    };
    (before.apply(&event).ok()? == *after).then_some(event)
}
