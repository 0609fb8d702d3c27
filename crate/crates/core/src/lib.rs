//! Corrective sequential planning benchmark toolkit.
//!
//! Procedurally generates maze-navigation, blocks-rearrangement, and
//! tile-shuffle planning tasks with one injected error in the action context,
//! builds Step Completion and Error Detection MCQs with an anti-cheat
//! safeguard, and evaluates reasoners over a pluggable backend interface.
//! A deterministic symbolic oracle makes the whole pipeline verifiable
//! without any vision-language model.

pub mod env;
pub mod graph;

pub use env::{ActionRecord, Domain, EnvState, ViolationKind, ViolationTag};
