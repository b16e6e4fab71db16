//! Bayesian scoring tools for classical cryptanalysis.
//!
//! Evidence is measured in decibans (ten times the base-10 logarithm of a
//! likelihood ratio) and tabulated in integer half-decibans so that scoring a
//! hypothesis reduces to table lookups and addition. The crate covers:
//!
//! - [`bayes`]: odds, factors and deciban arithmetic.
//! - [`corpus`]: text normalisation, letter/bigram/r-gram statistics and the
//!   stats file formats.
//! - [`vigenere`]: per-column key scoring and exact key posteriors.
//! - [`subtractor`]: slide distributions of multi-wheel subtractors and crib
//!   evaluation.
//! - [`repeats`]: repetition figures and fit ("depth") scoring.
//! - [`transposition`]: columnar transposition, column-match scoring,
//!   bottom-of-column probabilities and bigram Markov-chain checks.
//! - [`generate`]: seeded text and cipher generators for self-contained tests.

pub mod bayes;
pub mod corpus;
pub mod error;
pub mod generate;
pub mod letters;
pub mod repeats;
pub mod subtractor;
pub mod transposition;
pub mod vigenere;

pub use error::{Error, Result};
