//! Exact Fock-basis simulation of linear-optical quantum circuits with
//! polarization-encoded qubits.
//!
//! The crate models multi-mode multi-photon states as sparse maps from
//! occupation-number basis states to complex amplitudes, applies waveplates,
//! phase delays, beamsplitters and polarizing beamsplitters as mode unitaries,
//! and post-selects on photon-counting patterns. On top of that sit the
//! heralded and coincidence-basis two-qubit gate constructions, the optical
//! four-element search circuits built from them, a dense abstract-qubit
//! reference simulator, and classical distribution fidelity metrics.
//!
//! Two independent amplitude engines are provided: symbolic expansion of
//! transformed creation-operator monomials ([`fock`]) and a matrix-permanent
//! evaluator ([`permanent`]). They exist to cross-validate each other.
//!
//! The crate is `no_std` (it allocates, but performs no IO); the companion
//! CLI crate carries file formats and reporting.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod circuit;
pub mod elements;
pub mod error;
pub mod fock;
pub mod gates;
pub mod grover;
pub mod matrix;
pub mod measurement;
pub mod metrics;
pub mod permanent;
pub mod qubit;

pub use error::{Error, Result};
pub use fock::{FockState, ModeLabel, ModeRegistry, Polarization, Rail, StateVector};
pub use matrix::CMatrix;
