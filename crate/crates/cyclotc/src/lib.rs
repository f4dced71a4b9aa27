//! Toolkit for cyclic proofs in transitive closure logic and propositional
//! dynamic logic: syntax, finite-model semantics, the sequent and
//! hypersequent calculi, cyclic proof graphs, the ω-automata progress check,
//! translations between the systems, and bounded proof search.

pub mod exec;
pub mod calculi;
pub mod cli;
pub mod model;
pub mod progress;
pub mod proofgraph;
pub mod syntax;

pub use syntax::{Formula, PdlFormula, Program, Term};
