// Copyright 2026 QecSim Contributors
// SPDX-License-Identifier: Apache-2.0

//! Dense complex linear algebra for n-qubit registers.
//!
//! Qubit index 0 is the leftmost tensor factor, i.e. the most significant
//! bit of a computational basis-state index. This convention is fixed here
//! and used everywhere else in the crate.

mod density;
mod linalg;
mod operator;
mod pauli;

pub use density::{average_logical_input, DensityMatrix};
pub use linalg::{expm_neg_i, hermitian_eigenvalues, max_abs_diff};
pub use operator::{embed, QubitOperator};
pub use pauli::{Pauli, PauliString};

/// Bit position of qubit `q` inside a basis-state index of an `n`-qubit
/// register (qubit 0 is the most significant bit).
#[inline(always)]
pub fn qubit_bit(n_qubits: usize, q: usize) -> usize {
    n_qubits - 1 - q
}

/// Checks that `dim` is a power of two and returns log2(dim).
pub fn log2_dim(dim: usize) -> crate::Result<usize> {
    if dim == 0 || !dim.is_power_of_two() {
        return Err(crate::Error::NotPowerOfTwo(dim));
    }
    Ok(dim.trailing_zeros() as usize)
}
