// Copyright 2026 QecSim Contributors
// SPDX-License-Identifier: Apache-2.0

//! Density-matrix simulation of fault-tolerant quantum error correction
//! under a stochastic-Hamiltonian noise model.
//!
//! The crate is organized around the simulation pipeline:
//!
//! - [`qstate`] — dense complex linear algebra for n-qubit registers
//!   (density matrices, Pauli embedding, fidelity, partial trace).
//! - [`pulses`] — the step-function control Hamiltonian: pulse terms,
//!   layers, schedules, and gate compilation at three parallelism levels.
//! - [`propagator`] — master-equation propagation of a density matrix
//!   through a pulse schedule, for distinct or collective baths.
//! - [`measure`] — projective and POVM single-qubit measurements with
//!   branch bookkeeping for classically controlled circuits.
//! - [`codes`] — the three-qubit bit-flip code and the five-qubit code:
//!   stabilizers, recovery tables, ideal encoding, perfect decoding.
//! - [`ftqec`] — fault-tolerant QEC orchestration: ancilla preparation,
//!   syndrome detection rounds, repetition protocols, experiments.
//! - [`analysis`] — crash-rate fitting and noise-threshold scans.

pub mod analysis;
pub mod codes;
pub mod error;
pub mod ftqec;
pub mod measure;
pub mod propagator;
pub mod pulses;
pub mod qstate;

pub use error::{Error, Result};
