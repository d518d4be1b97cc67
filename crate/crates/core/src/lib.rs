//! Simulation of the coalescent with recombination by two exact algorithms
//! over one shared model of ancestral recombination graphs.
//!
//! [`backintime`] runs the Markov jump process on sets of ancestral
//! functions; [`spatial`] builds the same graph breakpoint by breakpoint along
//! the sequence. Both return an [`Arg`], and [`stats`] compares their laws.

pub mod ancestral;
pub mod arg;
pub mod backintime;
pub mod cli;
pub mod config;
pub mod density;
pub mod error;
pub mod io;
pub mod numfmt;
pub mod rng;
pub mod spatial;
pub mod state;
pub mod stats;
pub mod typeset;

pub use ancestral::AncestralFn;
pub use arg::{Arg, ArgStep};
pub use config::{Engine, SimConfig};
pub use density::BreakpointDensity;
pub use error::{Error, Result};
pub use state::{Event, State};
pub use typeset::TypeSet;
