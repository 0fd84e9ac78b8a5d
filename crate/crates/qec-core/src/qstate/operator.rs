// Copyright 2026 QecSim Contributors
// SPDX-License-Identifier: Apache-2.0

//! Dense operators on n-qubit registers and Kronecker embedding.

use ndarray::Array2;
use num_complex::Complex64;

use super::{log2_dim, qubit_bit};
use crate::{Error, Result};

/// A dense 2^n x 2^n operator.
#[derive(Debug, Clone, PartialEq)]
pub struct QubitOperator {
    n_qubits: usize,
    data: Array2<Complex64>,
}

impl QubitOperator {
    pub fn from_matrix(data: Array2<Complex64>) -> Result<Self> {
        if data.nrows() != data.ncols() {
            return Err(Error::DimensionMismatch {
                expected: data.nrows(),
                got: data.ncols(),
            });
        }
        let n_qubits = log2_dim(data.nrows())?;
        Ok(Self { n_qubits, data })
    }

    pub(crate) fn from_matrix_unchecked(n_qubits: usize, data: Array2<Complex64>) -> Self {
        Self { n_qubits, data }
    }

    pub fn identity(n_qubits: usize) -> Self {
        Self {
            n_qubits,
            data: Array2::eye(1 << n_qubits),
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        1 << self.n_qubits
    }

    pub fn data(&self) -> &Array2<Complex64> {
        &self.data
    }

    pub fn into_matrix(self) -> Array2<Complex64> {
        self.data
    }

    pub fn dagger(&self) -> Self {
        Self {
            n_qubits: self.n_qubits,
            data: self.data.t().mapv(|z| z.conj()),
        }
    }

    pub fn dot(&self, other: &Self) -> Self {
        Self {
            n_qubits: self.n_qubits,
            data: self.data.dot(&other.data),
        }
    }

    /// Deviation from unitarity: max |U U† - I|.
    pub fn unitarity_error(&self) -> f64 {
        let prod = self.data.dot(&self.dagger().data);
        let dim = self.dim();
        let mut err = 0.0f64;
        for r in 0..dim {
            for c in 0..dim {
                let expect = if r == c { 1.0 } else { 0.0 };
                err = err.max((prod[[r, c]] - Complex64::new(expect, 0.0)).norm());
            }
        }
        err
    }

    /// Deviation from Hermiticity: max |A - A†|.
    pub fn hermiticity_error(&self) -> f64 {
        super::max_abs_diff(&self.data, &self.dagger().data)
    }

    /// Max-norm distance to `other` after removing a global phase, chosen
    /// from the largest element of `other`.
    pub fn phase_distance(&self, other: &Self) -> f64 {
        let mut best = Complex64::new(0.0, 0.0);
        let mut best_mag = 0.0;
        let dim = other.dim();
        for r in 0..dim {
            for c in 0..dim {
                if other.data[[r, c]].norm() > best_mag {
                    best_mag = other.data[[r, c]].norm();
                    best = self.data[[r, c] ] / other.data[[r, c]];
                }
            }
        }
        if best_mag == 0.0 {
            return f64::INFINITY;
        }
        let phase = best / best.norm();
        let aligned = other.data.mapv(|z| z * phase);
        super::max_abs_diff(&self.data, &aligned)
    }
}

/// Kronecker embedding of a small operator into an n-qubit register with
/// identity on the untouched qubits. `op` must be 2^k x 2^k with k equal to
/// `targets.len()`; `targets[j]` receives the j-th tensor factor of `op`.
pub fn embed(op: &Array2<Complex64>, targets: &[usize], n_qubits: usize) -> Result<QubitOperator> {
    let k = targets.len();
    if k == 0 {
        return Err(Error::EmptySelection);
    }
    let small_dim = 1usize << k;
    if op.nrows() != small_dim || op.ncols() != small_dim {
        return Err(Error::DimensionMismatch {
            expected: small_dim,
            got: op.nrows(),
        });
    }
    for (i, &t) in targets.iter().enumerate() {
        if t >= n_qubits {
            return Err(Error::QubitOutOfRange { index: t, n_qubits });
        }
        if targets[..i].contains(&t) {
            return Err(Error::RepeatedQubit(t));
        }
    }

    let dim = 1usize << n_qubits;
    let target_bits: Vec<usize> = targets.iter().map(|&t| qubit_bit(n_qubits, t)).collect();
    let rest_mask: usize = {
        let mut m = dim - 1;
        for &b in &target_bits {
            m &= !(1usize << b);
        }
        m
    };

    // Sub-index of a basis state restricted to the target qubits, with
    // targets[0] as the most significant sub-bit.
    let sub_index = |full: usize| -> usize {
        let mut s = 0usize;
        for &b in &target_bits {
            s = (s << 1) | ((full >> b) & 1);
        }
        s
    };

    let mut m = Array2::<Complex64>::zeros((dim, dim));
    for col in 0..dim {
        let col_rest = col & rest_mask;
        let col_sub = sub_index(col);
        for row_sub in 0..small_dim {
            let v = op[[row_sub, col_sub]];
            if v.norm_sqr() == 0.0 {
                continue;
            }
            // Scatter row_sub back into the target bit positions.
            let mut row = col_rest;
            for (j, &b) in target_bits.iter().enumerate() {
                if (row_sub >> (k - 1 - j)) & 1 == 1 {
                    row |= 1usize << b;
                }
            }
            m[[row, col]] = v;
        }
    }
    Ok(QubitOperator::from_matrix_unchecked(n_qubits, m))
}
