//! Unification modulo the 2-sorted block-chaining theories BC0, BC1
//! (xor-interpreted CBC) and DBC, with rewrite normalization and
//! brute-force oracles.
//!
//! The pipeline: [`parse`] a problem file (or build raw term pairs),
//! [`standardize`] into flat equation shapes, run the list-inference
//! search ([`engine`]), solve the element residues ([`elem`]), and
//! assemble unifiers ([`pipeline`]). [`rewrite`] provides the
//! equality-modulo-theory oracle used by every soundness check, and
//! [`oracle`] the bounded brute-force ground truth.

pub mod attack;
pub mod elem;
pub mod encode;
pub mod engine;
pub mod equation;
pub mod errors;
pub mod graph;
pub mod oracle;
pub mod parse;
pub mod pipeline;
pub mod print;
pub mod rewrite;
pub mod standardize;
pub mod term;
pub mod theory;

pub use equation::{Equation, Problem};
pub use errors::{Result, SolverError};
pub use pipeline::{solve, Report, SolveOptions, Unifier};
pub use term::{Sort, Subst, Term, Var};
pub use theory::TheoryId;
