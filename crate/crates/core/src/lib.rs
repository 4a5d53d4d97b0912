//! Interaction-graph semantics for probabilistic multihead automata.
//!
//! Graphings over a symbolic measure space, their execution and measurement,
//! a compiler from k-head two-way probabilistic (pushdown) automata to
//! graphings, and an independent automaton simulator used as an oracle.

pub mod automata;
pub mod cli;
pub mod compiler;
pub mod corpus;
pub mod error;
pub mod execution;
pub mod graphing;
pub mod linsolve;
pub mod measurement;
pub mod measure_space;
pub mod microcosm;
pub mod properties;
pub mod random;
pub mod rational;
pub mod stack_monoid;
pub mod words;

pub use error::{Error, Result};
pub use rational::Q;
