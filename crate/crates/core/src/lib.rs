//! Exact-arithmetic workbench for finite automata that read advice.
//!
//! Machines are one-way DFAs and PFAs with explicit endmarkers. Advice is
//! either a deterministic string per input length or a finite-support
//! distribution over strings; the advised machine reads the two-track word
//! pairing the input with its advice.

pub mod advice;
pub mod alphabet;
pub mod automata;
pub mod constructions;
pub mod criteria;
pub mod document;
pub mod error;
pub mod fixtures;
pub mod game;
pub mod languages;
pub mod linalg;

pub use alphabet::{sym, word, Alphabet, Symbol, TrackSymbol, Word};
pub use automata::{classify, AcceptanceMode, Classification, Dfa, Machine, Pfa, PfaFamily, Step};
pub use error::{Error, Result};
pub use linalg::{q, Rational};

/// PFA with exact rational probabilities.
pub type ExactPfa = Pfa<Rational>;
/// PFA with double-precision probabilities, for fast approximate sweeps.
pub type FloatPfa = Pfa<f64>;
/// Exact stochastic matrix.
pub type ExactMatrix = linalg::StochasticMatrix<Rational>;
/// Exact row vector.
pub type ExactVector = linalg::RowVector<Rational>;
