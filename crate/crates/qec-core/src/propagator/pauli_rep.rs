// Copyright 2026 QecSim Contributors
// SPDX-License-Identifier: Apache-2.0

//! Pauli-coefficient representation of a density matrix.
//!
//! rho = sum_P c_P P over the 4^n Hermitian Pauli strings, with real
//! coefficients c_P = Tr(rho P)/2^n. Index layout: a string with symplectic
//! masks (a = X/Y positions, b = Z/Y positions) lives at index a | (b << n).
//!
//! In this basis the distinct-bath dissipator is diagonal (each string
//! decays at a rate set by how many noise couplings it anticommutes with),
//! Hermiticity is automatic, and the trace is the single coefficient at
//! index 0 — which no flow below ever touches.

use ndarray::Array2;
use num_complex::Complex64;

use crate::qstate::DensityMatrix;

/// Real Pauli-coefficient vector of an n-qubit density matrix.
#[derive(Debug, Clone)]
pub struct PauliVec {
    pub n_qubits: usize,
    pub coeffs: Vec<f64>,
}

impl PauliVec {
    pub fn from_density(rho: &DensityMatrix) -> Self {
        let n = rho.n_qubits();
        let mut buf: Vec<Complex64> = rho.data().iter().copied().collect();
        // Per-qubit 4-point butterflies take matrix elements (indexed by
        // the row bit `hi` and column bit `lo` of that qubit) to Pauli
        // components (X/Y flag in `lo`, Z/Y flag in `hi`).
        for p in 0..n {
            let lo = 1usize << p;
            let hi = lo << n;
            butterflies(&mut buf, lo, hi, |v00, v01, v10, v11| {
                let ci = 0.5 * (v00 + v11);
                let cx = 0.5 * (v01 + v10);
                let cy = 0.5 * Complex64::i() * (v01 - v10);
                let cz = 0.5 * (v00 - v11);
                (ci, cx, cz, cy)
            });
        }
        let coeffs = buf.iter().map(|z| z.re).collect();
        Self { n_qubits: n, coeffs }
    }

    pub fn to_density(&self) -> DensityMatrix {
        let n = self.n_qubits;
        let dim = 1usize << n;
        let mut buf: Vec<Complex64> = self
            .coeffs
            .iter()
            .map(|&x| Complex64::new(x, 0.0))
            .collect();
        for p in 0..n {
            let lo = 1usize << p;
            let hi = lo << n;
            // Slots arrive as (I, X, Z, Y) per the forward layout.
            butterflies(&mut buf, lo, hi, |ci, cx, cz, cy| {
                let v00 = ci + cz;
                let v01 = cx - Complex64::i() * cy;
                let v10 = cx + Complex64::i() * cy;
                let v11 = ci - cz;
                (v00, v01, v10, v11)
            });
        }
        let mut m = Array2::<Complex64>::zeros((dim, dim));
        for r in 0..dim {
            for c in 0..dim {
                m[[r, c]] = buf[(r << n) | c];
            }
        }
        DensityMatrix::from_matrix_unchecked(n, m)
    }

    /// Tr(rho) = 2^n c_0.
    pub fn trace(&self) -> f64 {
        self.coeffs[0] * (1u64 << self.n_qubits) as f64
    }
}

/// Applies a 4-point transform on every (lo, hi) bit-pair group of `buf`.
/// The closure maps slot values (s00, s01, s10, s11) — indexed by the hi
/// and lo bits — to their replacements in the same slot order.
fn butterflies<F>(buf: &mut [Complex64], lo: usize, hi: usize, f: F)
where
    F: Fn(Complex64, Complex64, Complex64, Complex64) -> (Complex64, Complex64, Complex64, Complex64),
{
    let len = buf.len();
    for idx in 0..len {
        if idx & lo != 0 || idx & hi != 0 {
            continue;
        }
        let i00 = idx;
        let i01 = idx | lo;
        let i10 = idx | hi;
        let i11 = idx | lo | hi;
        let (a, b, c, d) = f(buf[i00], buf[i01], buf[i10], buf[i11]);
        buf[i00] = a;
        buf[i01] = b;
        buf[i10] = c;
        buf[i11] = d;
    }
}
