// Copyright 2026 QecSim Contributors
// SPDX-License-Identifier: Apache-2.0

//! Symbolic Pauli strings in the symplectic (x-mask, z-mask) representation.
//!
//! A string is stored as two bitmasks over basis-index bit positions: the
//! x-mask marks X/Y factors, the z-mask marks Z/Y factors. The Hermitian
//! convention P = i^{|x AND z|} X^x Z^z makes every stored string its own
//! adjoint. Commutation and syndrome checks reduce to popcount parity.

use ndarray::Array2;
use num_complex::Complex64;
use std::fmt;

use super::{operator::QubitOperator, qubit_bit};
use crate::{Error, Result};

/// Single-qubit Pauli factor.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub fn matrix(self) -> Array2<Complex64> {
        let o = Complex64::new(0.0, 0.0);
        let l = Complex64::new(1.0, 0.0);
        let i = Complex64::new(0.0, 1.0);
        match self {
            Pauli::I => ndarray::array![[l, o], [o, l]],
            Pauli::X => ndarray::array![[o, l], [l, o]],
            Pauli::Y => ndarray::array![[o, -i], [i, o]],
            Pauli::Z => ndarray::array![[l, o], [o, -l]],
        }
    }

    fn symbol(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }
}

/// An n-qubit Pauli string (phase-free, Hermitian convention).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PauliString {
    n_qubits: usize,
    /// Bit (n-1-q) set when qubit q carries an X or Y factor.
    x_mask: u64,
    /// Bit (n-1-q) set when qubit q carries a Z or Y factor.
    z_mask: u64,
}

impl PauliString {
    pub fn identity(n_qubits: usize) -> Self {
        Self { n_qubits, x_mask: 0, z_mask: 0 }
    }

    /// Parses e.g. "XZZXI"; the leftmost character acts on qubit 0.
    pub fn parse(s: &str) -> Result<Self> {
        let n = s.len();
        if n == 0 || n > 64 {
            return Err(Error::InvalidPauliString(s.to_string()));
        }
        let mut x_mask = 0u64;
        let mut z_mask = 0u64;
        for (q, ch) in s.chars().enumerate() {
            let bit = 1u64 << qubit_bit(n, q);
            match ch {
                'I' => {}
                'X' => x_mask |= bit,
                'Y' => {
                    x_mask |= bit;
                    z_mask |= bit;
                }
                'Z' => z_mask |= bit,
                _ => return Err(Error::InvalidPauliString(s.to_string())),
            }
        }
        Ok(Self { n_qubits: n, x_mask, z_mask })
    }

    /// Single-factor string: `pauli` on `qubit`, identity elsewhere.
    pub fn single(n_qubits: usize, qubit: usize, pauli: Pauli) -> Result<Self> {
        if qubit >= n_qubits {
            return Err(Error::QubitOutOfRange { index: qubit, n_qubits });
        }
        let bit = 1u64 << qubit_bit(n_qubits, qubit);
        let (x, z) = match pauli {
            Pauli::I => (0, 0),
            Pauli::X => (bit, 0),
            Pauli::Y => (bit, bit),
            Pauli::Z => (0, bit),
        };
        Ok(Self { n_qubits, x_mask: x, z_mask: z })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn x_mask(&self) -> u64 {
        self.x_mask
    }

    pub fn z_mask(&self) -> u64 {
        self.z_mask
    }

    pub fn factor(&self, qubit: usize) -> Pauli {
        let bit = 1u64 << qubit_bit(self.n_qubits, qubit);
        match (self.x_mask & bit != 0, self.z_mask & bit != 0) {
            (false, false) => Pauli::I,
            (true, false) => Pauli::X,
            (true, true) => Pauli::Y,
            (false, true) => Pauli::Z,
        }
    }

    pub fn is_identity(&self) -> bool {
        self.x_mask == 0 && self.z_mask == 0
    }

    /// Number of non-identity factors.
    pub fn weight(&self) -> usize {
        (self.x_mask | self.z_mask).count_ones() as usize
    }

    /// Pauli strings either commute or anticommute; this returns true in
    /// the former case (even symplectic product).
    pub fn commutes_with(&self, other: &Self) -> bool {
        let anti = (self.x_mask & other.z_mask).count_ones()
            + (self.z_mask & other.x_mask).count_ones();
        anti.is_multiple_of(2)
    }

    /// Product up to phase: the string whose masks are the XOR of both.
    pub fn product(&self, other: &Self) -> Self {
        Self {
            n_qubits: self.n_qubits,
            x_mask: self.x_mask ^ other.x_mask,
            z_mask: self.z_mask ^ other.z_mask,
        }
    }

    /// Dense matrix of the string (Hermitian, squares to identity).
    pub fn to_operator(&self) -> QubitOperator {
        let dim = 1usize << self.n_qubits;
        let mut m = Array2::<Complex64>::zeros((dim, dim));
        for col in 0..dim {
            let row = col ^ self.x_mask as usize;
            m[[row, col]] = self.amplitude_on(col);
        }
        QubitOperator::from_matrix_unchecked(self.n_qubits, m)
    }

    /// Matrix element <col ^ x_mask| P |col>: the sign/phase the string
    /// contributes when acting on basis state |col>.
    #[inline]
    pub fn amplitude_on(&self, col: usize) -> Complex64 {
        // P = i^{|x AND z|} X^x Z^z ; Z^z picks up (-1)^{|z AND col|}.
        let y_count = (self.x_mask & self.z_mask).count_ones();
        let sign = if (self.z_mask as usize & col).count_ones().is_multiple_of(2) {
            1.0
        } else {
            -1.0
        };
        let phase = match y_count % 4 {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        };
        phase * sign
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for q in 0..self.n_qubits {
            write!(f, "{}", self.factor(q).symbol())?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_display_roundtrip() {
        for s in ["XZZXI", "IIIII", "YIZXY", "ZZI"] {
            let p = PauliString::parse(s).unwrap();
            assert_eq!(p.to_string(), s);
        }
        assert!(PauliString::parse("ABC").is_err());
        assert!(PauliString::parse("").is_err());
    }

    #[test]
    fn commutation_rules() {
        let zzi = PauliString::parse("ZZI").unwrap();
        let izz = PauliString::parse("IZZ").unwrap();
        let xii = PauliString::parse("XII").unwrap();
        let xxi = PauliString::parse("XXI").unwrap();
        assert!(zzi.commutes_with(&izz));
        assert!(!zzi.commutes_with(&xii));
        assert!(zzi.commutes_with(&xxi));
    }

    #[test]
    fn single_factor_weight() {
        let p = PauliString::single(5, 2, Pauli::Y).unwrap();
        assert_eq!(p.to_string(), "IIYII");
        assert_eq!(p.weight(), 1);
        assert!(PauliString::single(3, 3, Pauli::X).is_err());
    }

    #[test]
    fn dense_matrix_matches_kronecker() {
        // Y on qubit 0 of two: Y (x) I
        let p = PauliString::parse("YI").unwrap();
        let m = p.to_operator();
        let y = Pauli::Y.matrix();
        for r in 0..4 {
            for c in 0..4 {
                let expect = if r % 2 == c % 2 { y[[r / 2, c / 2]] } else { Complex64::new(0.0, 0.0) };
                assert!((m.data()[[r, c]] - expect).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn strings_square_to_identity() {
        for s in ["X", "Y", "Z", "XZZXI", "YYZ"] {
            let p = PauliString::parse(s).unwrap();
            let m = p.to_operator();
            let sq = m.data().dot(m.data());
            let dim = sq.nrows();
            for r in 0..dim {
                for c in 0..dim {
                    let expect = if r == c { 1.0 } else { 0.0 };
                    assert!((sq[[r, c]] - Complex64::new(expect, 0.0)).norm() < 1e-14);
                }
            }
        }
    }
}
