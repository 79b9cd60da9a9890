//! Complexity-averse preferences over acts on finite state spaces.
//!
//! An agent values an act `f` by expected utility minus a cost charged on the
//! partition of states that `f` induces. The crate covers evaluation,
//! minimal-complexity updating after an event, executable axiom checks, and
//! three applications: wage design under moral hazard, attention
//! reallocation, and competitive equilibrium with complexity costs.

pub mod acts;
pub mod attention;
pub mod axioms;
pub mod car;
pub mod contract;
pub mod equilibrium;
pub mod error;
pub mod gen;
pub mod rational;
pub mod statespace;
pub mod updating;

pub use acts::{Act, MixtureProfile};
pub use car::{Belief, CarModel, Cost, CostFunction, UtilityIndex, Value};
pub use error::{Error, Result};
pub use rational::Rational;
pub use statespace::{Event, Partition, SigmaAlgebra, StateSpace};
