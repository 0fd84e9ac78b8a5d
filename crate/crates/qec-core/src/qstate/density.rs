// Copyright 2026 QecSim Contributors
// SPDX-License-Identifier: Apache-2.0

//! Density matrices over n-qubit registers.

use ndarray::Array2;
use num_complex::Complex64;

use super::{hermitian_eigenvalues, log2_dim, qubit_bit, PauliString, QubitOperator};
use crate::{Error, Result};

/// Dense Hermitian, unit-trace operator over an n-qubit register.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    n_qubits: usize,
    data: Array2<Complex64>,
}

impl DensityMatrix {
    /// Rank-1 state |psi><psi| from a normalized amplitude vector.
    pub fn pure(amplitudes: &[Complex64]) -> Result<Self> {
        let n_qubits = log2_dim(amplitudes.len())?;
        let norm_sq: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if (norm_sq.sqrt() - 1.0).abs() > 1e-12 {
            return Err(Error::NotNormalized((norm_sq.sqrt() - 1.0).abs()));
        }
        let dim = amplitudes.len();
        let mut data = Array2::zeros((dim, dim));
        for r in 0..dim {
            for c in 0..dim {
                data[[r, c]] = amplitudes[r] * amplitudes[c].conj();
            }
        }
        Ok(Self { n_qubits, data })
    }

    /// Computational basis state |index><index|.
    pub fn basis_state(n_qubits: usize, index: usize) -> Result<Self> {
        let dim = 1usize << n_qubits;
        if index >= dim {
            return Err(Error::DimensionMismatch { expected: dim, got: index });
        }
        let mut data = Array2::zeros((dim, dim));
        data[[index, index]] = Complex64::new(1.0, 0.0);
        Ok(Self { n_qubits, data })
    }

    /// Validates Hermiticity and unit trace before accepting a matrix.
    pub fn from_matrix(data: Array2<Complex64>) -> Result<Self> {
        let n_qubits = log2_dim(data.nrows())?;
        if data.nrows() != data.ncols() {
            return Err(Error::DimensionMismatch {
                expected: data.nrows(),
                got: data.ncols(),
            });
        }
        let dm = Self { n_qubits, data };
        if dm.hermiticity_error() > 1e-10 {
            return Err(Error::InvalidState(format!(
                "not Hermitian: deviation {:.3e}",
                dm.hermiticity_error()
            )));
        }
        let tr = dm.trace();
        if (tr.re - 1.0).abs() > 1e-8 || tr.im.abs() > 1e-10 {
            return Err(Error::InvalidState(format!("trace {} != 1", tr)));
        }
        Ok(dm)
    }

    pub(crate) fn from_matrix_unchecked(n_qubits: usize, data: Array2<Complex64>) -> Self {
        Self { n_qubits, data }
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


    pub fn trace(&self) -> Complex64 {
        (0..self.dim()).map(|i| self.data[[i, i]]).sum()
    }

    /// Tr(rho^2); 1 for pure states.
    pub fn purity(&self) -> f64 {
        // Tr(rho rho) via the Frobenius inner product (rho is Hermitian).
        self.data.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn hermiticity_error(&self) -> f64 {
        let dim = self.dim();
        let mut err = 0.0f64;
        for r in 0..dim {
            for c in r..dim {
                err = err.max((self.data[[r, c]] - self.data[[c, r]].conj()).norm());
            }
        }
        err
    }

    /// Smallest eigenvalue, for positivity diagnostics.
    pub fn min_eigenvalue(&self) -> f64 {
        hermitian_eigenvalues(&self.data)[0]
    }

    /// Replaces rho by (rho + rho†)/2.
    pub fn symmetrize(&mut self) {
        let dim = self.dim();
        for r in 0..dim {
            for c in (r + 1)..dim {
                let avg = 0.5 * (self.data[[r, c]] + self.data[[c, r]].conj());
                self.data[[r, c]] = avg;
                self.data[[c, r]] = avg.conj();
            }
            self.data[[r, r]] = Complex64::new(self.data[[r, r]].re, 0.0);
        }
    }

    /// F = Tr(rho |psi><psi|) against a rank-1 target.
    pub fn fidelity(&self, pure_target: &DensityMatrix) -> Result<f64> {
        if pure_target.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: pure_target.dim(),
            });
        }
        let p = pure_target.purity();
        if (p - 1.0).abs() > 1e-8 {
            return Err(Error::NotPure(p));
        }
        // Tr(A B) for Hermitian A, B = sum_ij A_ij conj(B_ij).
        let f: Complex64 = self
            .data
            .iter()
            .zip(pure_target.data.iter())
            .map(|(a, b)| a * b.conj())
            .sum();
        Ok(f.re.clamp(0.0, 1.0 + 1e-9).min(1.0))
    }

    /// Expectation value Tr(rho P) of a Pauli string.
    pub fn pauli_expectation(&self, p: &PauliString) -> f64 {
        let dim = self.dim();
        let mut acc = Complex64::new(0.0, 0.0);
        for col in 0..dim {
            let row = col ^ p.x_mask() as usize;
            // Tr(rho P) = sum_col <col| rho P |col> = sum rho[col, row] * P[row, col]
            acc += self.data[[col, row]] * p.amplitude_on(col);
        }
        acc.re
    }

    /// rho -> U rho U†.
    pub fn apply_unitary(&self, u: &QubitOperator) -> Result<Self> {
        if u.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: u.dim(),
            });
        }
        let m = u.data().dot(&self.data).dot(&u.dagger().into_matrix());
        Ok(Self {
            n_qubits: self.n_qubits,
            data: m,
        })
    }

    /// rho -> P rho P for a Pauli string, computed in place by index
    /// permutation and sign flips (no dense matmul).
    pub fn conjugate_by_pauli(&mut self, p: &PauliString) {
        assert_eq!(p.n_qubits(), self.n_qubits, "pauli register size mismatch");
        let dim = self.dim();
        let x = p.x_mask() as usize;
        let old = self.data.clone();
        for r in 0..dim {
            let pr = p.amplitude_on(r ^ x); // <r| P |r^x>
            for c in 0..dim {
                // (P rho P)[r, c] = P[r, r^x] rho[r^x, c^x] P[c^x, c]
                let pc = p.amplitude_on(c ^ x).conj();
                self.data[[r, c]] = pr * old[[r ^ x, c ^ x]] * pc;
            }
        }
    }

    /// Tensor product self (x) other; self's qubits come first.
    pub fn tensor(&self, other: &DensityMatrix) -> DensityMatrix {
        let da = self.dim();
        let db = other.dim();
        let dim = da * db;
        let mut data = Array2::zeros((dim, dim));
        for ra in 0..da {
            for ca in 0..da {
                let va = self.data[[ra, ca]];
                if va.norm_sqr() == 0.0 {
                    continue;
                }
                for rb in 0..db {
                    for cb in 0..db {
                        data[[ra * db + rb, ca * db + cb]] = va * other.data[[rb, cb]];
                    }
                }
            }
        }
        DensityMatrix {
            n_qubits: self.n_qubits + other.n_qubits,
            data,
        }
    }

    /// Reduced state over `keep` (in the listed order), tracing out the rest.
    pub fn partial_trace(&self, keep: &[usize]) -> Result<DensityMatrix> {
        if keep.is_empty() {
            return Err(Error::EmptySelection);
        }
        for (i, &q) in keep.iter().enumerate() {
            if q >= self.n_qubits {
                return Err(Error::QubitOutOfRange {
                    index: q,
                    n_qubits: self.n_qubits,
                });
            }
            if keep[..i].contains(&q) {
                return Err(Error::RepeatedQubit(q));
            }
        }
        let k = keep.len();
        let keep_bits: Vec<usize> = keep.iter().map(|&q| qubit_bit(self.n_qubits, q)).collect();
        let traced_bits: Vec<usize> = (0..self.n_qubits)
            .map(|q| qubit_bit(self.n_qubits, q))
            .filter(|b| !keep_bits.contains(b))
            .collect();

        let out_dim = 1usize << k;
        let env_dim = 1usize << traced_bits.len();
        let mut out = Array2::<Complex64>::zeros((out_dim, out_dim));

        // Assemble each full index from (kept sub-index, environment index).
        let full_index = |sub: usize, env: usize| -> usize {
            let mut idx = 0usize;
            for (j, &b) in keep_bits.iter().enumerate() {
                if (sub >> (k - 1 - j)) & 1 == 1 {
                    idx |= 1 << b;
                }
            }
            for (j, &b) in traced_bits.iter().enumerate() {
                if (env >> j) & 1 == 1 {
                    idx |= 1 << b;
                }
            }
            idx
        };

        for rs in 0..out_dim {
            for cs in 0..out_dim {
                let mut acc = Complex64::new(0.0, 0.0);
                for env in 0..env_dim {
                    acc += self.data[[full_index(rs, env), full_index(cs, env)]];
                }
                out[[rs, cs]] = acc;
            }
        }
        Ok(DensityMatrix {
            n_qubits: k,
            data: out,
        })
    }

    /// Scales by a probability weight (used for branch arithmetic).
    pub(crate) fn scaled(&self, w: f64) -> DensityMatrix {
        DensityMatrix {
            n_qubits: self.n_qubits,
            data: self.data.mapv(|z| z * w),
        }
    }

    pub(crate) fn add_assign(&mut self, other: &DensityMatrix) {
        self.data.zip_mut_with(&other.data, |a, b| *a += b);
    }
}

/// The averaged logical input state rho0 = (I + (X+Y+Z)/sqrt(3)) / 2,
/// a pure state whose Bloch vector points along (1,1,1)/sqrt(3).
pub fn average_logical_input() -> DensityMatrix {
    let s = 1.0 / 3f64.sqrt();
    let data = ndarray::array![
        [
            Complex64::new(0.5 * (1.0 + s), 0.0),
            Complex64::new(0.5 * s, -0.5 * s)
        ],
        [
            Complex64::new(0.5 * s, 0.5 * s),
            Complex64::new(0.5 * (1.0 - s), 0.0)
        ]
    ];
    DensityMatrix {
        n_qubits: 1,
        data,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qstate::Pauli;
    use approx::assert_abs_diff_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn bell_pair() -> DensityMatrix {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        DensityMatrix::pure(&[c(s, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(s, 0.0)]).unwrap()
    }

    #[test]
    fn pure_basis_state_is_projector() {
        let rho = DensityMatrix::pure(&[c(1.0, 0.0), c(0.0, 0.0)]).unwrap();
        assert_abs_diff_eq!(rho.data()[[0, 0]].re, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(rho.trace().re, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(rho.purity(), 1.0, epsilon = 1e-14);
    }

    #[test]
    fn pure_uniform_superposition() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let rho = DensityMatrix::pure(&[c(s, 0.0), c(s, 0.0)]).unwrap();
        for r in 0..2 {
            for cc in 0..2 {
                assert_abs_diff_eq!(rho.data()[[r, cc]].re, 0.5, epsilon = 1e-15);
            }
        }
    }

    #[test]
    fn pure_cat_state_corners() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let mut amps = vec![c(0.0, 0.0); 16];
        amps[0] = c(s, 0.0);
        amps[15] = c(s, 0.0);
        let rho = DensityMatrix::pure(&amps).unwrap();
        assert_abs_diff_eq!(rho.data()[[0, 0]].re, 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(rho.data()[[0, 15]].re, 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(rho.data()[[15, 0]].re, 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(rho.data()[[15, 15]].re, 0.5, epsilon = 1e-15);
        let nonzero = rho.data().iter().filter(|z| z.norm() > 1e-12).count();
        assert_eq!(nonzero, 4);
    }

    #[test]
    fn pure_rejects_unnormalized() {
        assert!(DensityMatrix::pure(&[c(1.0, 0.0), c(0.5, 0.0)]).is_err());
        assert!(DensityMatrix::pure(&[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]).is_err());
    }

    #[test]
    fn fidelity_examples() {
        let zero = DensityMatrix::basis_state(1, 0).unwrap();
        let one = DensityMatrix::basis_state(1, 1).unwrap();
        assert_abs_diff_eq!(zero.fidelity(&zero).unwrap(), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(zero.fidelity(&one).unwrap(), 0.0, epsilon = 1e-15);

        let mixed = DensityMatrix::from_matrix(ndarray::array![
            [c(0.5, 0.0), c(0.0, 0.0)],
            [c(0.0, 0.0), c(0.5, 0.0)]
        ])
        .unwrap();
        assert_abs_diff_eq!(mixed.fidelity(&zero).unwrap(), 0.5, epsilon = 1e-15);
        // Mixed target is rejected.
        assert!(zero.fidelity(&mixed).is_err());
    }

    #[test]
    fn fidelity_is_linear_in_rho() {
        let zero = DensityMatrix::basis_state(1, 0).unwrap();
        let one = DensityMatrix::basis_state(1, 1).unwrap();
        let target = average_logical_input();
        let mix = DensityMatrix::from_matrix(
            zero.data() * Complex64::new(0.3, 0.0) + one.data() * Complex64::new(0.7, 0.0),
        )
        .unwrap();
        let expect = 0.3 * zero.fidelity(&target).unwrap() + 0.7 * one.fidelity(&target).unwrap();
        assert_abs_diff_eq!(mix.fidelity(&target).unwrap(), expect, epsilon = 1e-12);
    }

    #[test]
    fn partial_trace_product_state() {
        let rho = DensityMatrix::basis_state(2, 0).unwrap();
        let reduced = rho.partial_trace(&[0]).unwrap();
        assert_eq!(reduced.n_qubits(), 1);
        assert_abs_diff_eq!(reduced.data()[[0, 0]].re, 1.0, epsilon = 1e-15);
    }

    #[test]
    fn partial_trace_bell_is_maximally_mixed() {
        let reduced = bell_pair().partial_trace(&[0]).unwrap();
        assert_abs_diff_eq!(reduced.data()[[0, 0]].re, 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(reduced.data()[[1, 1]].re, 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(reduced.data()[[0, 1]].norm(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn partial_trace_factorizes_products() {
        let a = average_logical_input();
        let b = DensityMatrix::basis_state(1, 1).unwrap();
        let ab = a.tensor(&b);
        let back = ab.partial_trace(&[0]).unwrap();
        assert!(super::super::max_abs_diff(back.data(), a.data()) < 1e-14);
        let back_b = ab.partial_trace(&[1]).unwrap();
        assert!(super::super::max_abs_diff(back_b.data(), b.data()) < 1e-14);
    }

    #[test]
    fn partial_trace_all_qubits_is_identity_map() {
        let rho = bell_pair();
        let same = rho.partial_trace(&[0, 1]).unwrap();
        assert!(super::super::max_abs_diff(same.data(), rho.data()) < 1e-15);
    }

    #[test]
    fn partial_trace_rejects_empty_keep() {
        assert!(bell_pair().partial_trace(&[]).is_err());
    }

    #[test]
    fn average_input_properties() {
        let rho = average_logical_input();
        assert_abs_diff_eq!(rho.trace().re, 1.0, epsilon = 1e-15);
        let x = PauliString::single(1, 0, Pauli::X).unwrap();
        // Tr(rho0 X) = 1/sqrt(3)
        assert_abs_diff_eq!(rho.pauli_expectation(&x), 1.0 / 3f64.sqrt(), epsilon = 1e-14);
        let y = PauliString::single(1, 0, Pauli::Y).unwrap();
        assert_abs_diff_eq!(rho.pauli_expectation(&y), 1.0 / 3f64.sqrt(), epsilon = 1e-14);
        let z = PauliString::single(1, 0, Pauli::Z).unwrap();
        assert_abs_diff_eq!(rho.pauli_expectation(&z), 1.0 / 3f64.sqrt(), epsilon = 1e-14);
        // Unit Bloch vector: pure state.
        assert_abs_diff_eq!(rho.purity(), 1.0, epsilon = 1e-14);
        assert!(rho.hermiticity_error() < 1e-15);
    }

    #[test]
    fn pauli_conjugation_matches_dense() {
        let mut rho = bell_pair();
        let p = PauliString::parse("XY").unwrap();
        let dense = rho.apply_unitary(&p.to_operator()).unwrap();
        rho.conjugate_by_pauli(&p);
        assert!(super::super::max_abs_diff(rho.data(), dense.data()) < 1e-14);
    }

    #[test]
    fn min_eigenvalue_of_pure_state() {
        let rho = bell_pair();
        let lo = rho.min_eigenvalue();
        assert!(lo.abs() < 1e-12, "pure state min eigenvalue {lo}");
    }
}
