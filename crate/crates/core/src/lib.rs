//! Symbolic automata and decision procedures for Kleene algebra with tests.
//!
//! The crate is layered bottom-up:
//!
//! * [`bdd`]: hash-consed multi-terminal BDDs;
//! * [`automata`]: symbolic DFAs and NFAs whose transitions are BDDs;
//! * [`equiv`]: bisimulation-based equivalence and inclusion checks;
//! * [`kat`]: KAT expressions, their symbolic form and guarded strings;
//! * [`construct`]: automata built from KAT expressions (derivatives,
//!   partial derivatives, and a Thompson-like construction with tests);
//! * [`check`], [`random`], [`bench`], [`oracle`]: the pieces behind the
//!   `kat` command-line tool.

pub mod automata;
pub mod bench;
pub mod bdd;
pub mod check;
pub mod construct;
pub mod equiv;
pub mod fixtures;
pub mod kat;
pub mod oracle;
pub mod parse;
pub mod random;
