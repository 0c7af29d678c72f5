//! Petri nets extended with time, stochastic delays and fuzzy linguistic
//! probabilities, used as a vehicle for causal scenario modeling, together
//! with the classical causal formalisms they are compared against.

pub mod analysis;
pub mod dsl;
pub mod formalisms;
pub mod fuzzy;
pub mod net;
pub mod puzzles;
pub mod timing;

pub use fuzzy::{FuzzyLabel, NormKind, Shape};
pub use net::{Marking, Net, NetDef, NetError, TransitionKind, ValidationReport};
pub use timing::{GatePolicy, RunConfig, SimState, SimTrace, TimingSpec};
