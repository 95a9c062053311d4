//! Quantum ensembles as explicit preparation records.
//!
//! An ensemble of `N` molecules is described by its *composition*: how many
//! molecules were prepared in each pure state. Two compositions may share a
//! density matrix and still differ in the fluctuation of a collective
//! observable `Σ_i Ω(i)`. This crate computes both quantities exactly, checks
//! them against a brute-force product-state oracle, and estimates them by
//! Born-rule Monte Carlo.
//!
//! Conventions: qubit 0 is the leftmost tensor factor (big-endian basis
//! index), and `ħ = 1`.

#![forbid(unsafe_code)]

pub mod decompositions;
pub mod ensemble;
mod error;
pub mod linalg;
pub mod observables;
pub mod sampling;

pub use error::{Error, Result};
pub use num_complex::Complex64;
