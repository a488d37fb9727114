//! Parikh automata and their history-deterministic variants.
//!
//! A Parikh automaton reads letters while summing a vector per transition
//! and accepts when it ends in an accepting state with the sum inside a
//! semilinear set. The crate covers the automaton model and its decision
//! procedures, closure constructions, resolvers and bounded games for
//! history-determinism, reversal-bounded counter machines, and reductions
//! from two-counter machines.

pub mod alphabet;
pub mod budget;
pub mod closures;
pub mod corpus;
pub mod equiv;
pub mod error;
pub mod format;
pub mod hd;
pub mod pa;
pub mod rbcm;
pub mod reductions;
pub mod semilinear;
pub mod vector;

pub use alphabet::{Alphabet, Letter, Word};
pub use budget::Budget;
pub use error::{Error, Result};
pub use pa::{ParikhAutomaton, Run};
pub use semilinear::SemilinearSet;
pub use vector::VectorN;
