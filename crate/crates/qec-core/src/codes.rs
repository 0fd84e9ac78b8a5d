// Copyright 2026 QecSim Contributors
// SPDX-License-Identifier: Apache-2.0

//! The three-qubit bit-flip code and the five-qubit code.
//!
//! Syndrome bit k is 1 when the state is in the -1 eigenspace of generator
//! k. Recovery tables are generated by brute force from the generators:
//! each syndrome maps to the lowest-weight single-qubit Pauli producing it
//! (restricted to X errors for the bit-flip code, which corrects nothing
//! else). The five-qubit codeword pair is fixed by projecting |00000> onto
//! the +1 eigenspace of all four generators and taking |1_L> = X^5 |0_L>;
//! every stated invariant is verified against this convention in tests.

use ndarray::Array2;
use num_complex::Complex64;

use crate::qstate::{DensityMatrix, Pauli, PauliString};
use crate::{Error, Result};

/// A stabilizer code with one logical qubit, its recovery table, and the
/// ideal codewords.
#[derive(Debug, Clone)]
pub struct StabilizerCode {
    name: &'static str,
    n: usize,
    generators: Vec<PauliString>,
    recovery_table: Vec<PauliString>,
    logical_x: PauliString,
    logical_z: PauliString,
    codewords: [Vec<Complex64>; 2],
    /// Dense projectors onto each syndrome subspace, indexed by syndrome.
    projectors: Vec<Array2<Complex64>>,
}

impl StabilizerCode {
    /// n = 3, generators {ZZI, IZZ}, recovery restricted to X errors.
    pub fn bit_flip() -> Self {
        let generators = vec![
            PauliString::parse("ZZI").unwrap(),
            PauliString::parse("IZZ").unwrap(),
        ];
        let candidates = error_candidates(3, &[Pauli::X]);
        Self::build(
            "bit-flip-3",
            3,
            generators,
            candidates,
            PauliString::parse("XXX").unwrap(),
            PauliString::parse("ZII").unwrap(),
        )
    }

    /// n = 5, the cyclic XZZXI generator family; corrects every
    /// single-qubit Pauli error.
    pub fn five_qubit() -> Self {
        let generators = vec![
            PauliString::parse("XZZXI").unwrap(),
            PauliString::parse("IXZZX").unwrap(),
            PauliString::parse("XIXZZ").unwrap(),
            PauliString::parse("ZXIXZ").unwrap(),
        ];
        let candidates = error_candidates(5, &[Pauli::X, Pauli::Y, Pauli::Z]);
        Self::build(
            "five-qubit",
            5,
            generators,
            candidates,
            PauliString::parse("XXXXX").unwrap(),
            PauliString::parse("ZZZZZ").unwrap(),
        )
    }

    pub fn by_name(name: &str) -> Result<Self> {
        match name {
            "bit-flip-3" => Ok(Self::bit_flip()),
            "five-qubit" => Ok(Self::five_qubit()),
            other => Err(Error::InvalidConfig(format!("unknown code {other:?}"))),
        }
    }

    fn build(
        name: &'static str,
        n: usize,
        generators: Vec<PauliString>,
        candidates: Vec<PauliString>,
        logical_x: PauliString,
        logical_z: PauliString,
    ) -> Self {
        for (i, g) in generators.iter().enumerate() {
            for h in &generators[..i] {
                assert!(g.commutes_with(h), "generators must commute");
            }
        }
        let n_syndromes = 1usize << generators.len();
        let mut table: Vec<Option<PauliString>> = vec![None; n_syndromes];
        for e in candidates {
            let s = syndrome_of(&generators, &e) as usize;
            if table[s].is_none() {
                table[s] = Some(e);
            } else {
                panic!("degenerate syndrome {s:#06b} for code {name}");
            }
        }
        let recovery_table: Vec<PauliString> = table
            .into_iter()
            .enumerate()
            .map(|(s, e)| e.unwrap_or_else(|| panic!("syndrome {s:#06b} unassigned")))
            .collect();

        let codeword0 = codeword_from_projection(n, &generators);
        // |1_L> = logical X applied to |0_L>.
        let x_op = logical_x.to_operator();
        let v0 = ndarray::Array1::from_vec(codeword0.clone());
        let v1 = x_op.data().dot(&v0);
        let codewords = [codeword0, v1.to_vec()];

        let projectors = (0..n_syndromes)
            .map(|s| syndrome_projector(n, &generators, s as u16))
            .collect();

        Self {
            name,
            n,
            generators,
            recovery_table,
            logical_x,
            logical_z,
            codewords,
            projectors,
        }
    }

    pub fn name(&self) -> &'static str {
        self.name
    }

    pub fn n_qubits(&self) -> usize {
        self.n
    }

    pub fn generators(&self) -> &[PauliString] {
        &self.generators
    }

    pub fn n_generators(&self) -> usize {
        self.generators.len()
    }

    pub fn n_syndromes(&self) -> usize {
        1 << self.generators.len()
    }

    pub fn logical_x(&self) -> &PauliString {
        &self.logical_x
    }

    pub fn logical_z(&self) -> &PauliString {
        &self.logical_z
    }

    pub fn codeword(&self, which: usize) -> &[Complex64] {
        &self.codewords[which]
    }

    /// Syndrome bits of a Pauli error (bit k = anticommutes with generator k).
    pub fn syndrome_of(&self, error: &PauliString) -> u16 {
        syndrome_of(&self.generators, error)
    }

    pub fn recovery_for(&self, syndrome: u16) -> &PauliString {
        &self.recovery_table[syndrome as usize]
    }

    /// Noiseless linear encoding of a one-qubit logical state.
    pub fn encode_ideal(&self, logical: &DensityMatrix) -> Result<DensityMatrix> {
        if logical.n_qubits() != 1 {
            return Err(Error::DimensionMismatch {
                expected: 2,
                got: logical.dim(),
            });
        }
        let dim = 1usize << self.n;
        let mut m = Array2::<Complex64>::zeros((dim, dim));
        for i in 0..2 {
            for j in 0..2 {
                let lij = logical.data()[[i, j]];
                if lij.norm_sqr() == 0.0 {
                    continue;
                }
                for r in 0..dim {
                    let vir = self.codewords[i][r];
                    if vir.norm_sqr() == 0.0 {
                        continue;
                    }
                    for c in 0..dim {
                        m[[r, c]] += lij * vir * self.codewords[j][c].conj();
                    }
                }
            }
        }
        Ok(DensityMatrix::from_matrix_unchecked(self.n, m))
    }

    /// Crash probability after a perfect (noiseless, instantaneous) QEC
    /// round: project onto each syndrome subspace, apply the table
    /// recovery, sum the branches, and compare with the ideal encoding of
    /// `ideal_logical`. Operates on a copy; the argument state is not
    /// disturbed.
    pub fn perfect_decode_crash(
        &self,
        rho: &DensityMatrix,
        ideal_logical: &DensityMatrix,
    ) -> Result<f64> {
        if rho.n_qubits() != self.n {
            return Err(Error::DimensionMismatch {
                expected: 1 << self.n,
                got: rho.dim(),
            });
        }
        let dim = rho.dim();
        let mut corrected = Array2::<Complex64>::zeros((dim, dim));
        for (s, proj) in self.projectors.iter().enumerate() {
            let branch = proj.dot(rho.data()).dot(proj);
            let mut branch = DensityMatrix::from_matrix_unchecked(self.n, branch);
            let recovery = &self.recovery_table[s];
            if !recovery.is_identity() {
                branch.conjugate_by_pauli(recovery);
            }
            corrected += branch.data();
        }
        let corrected = DensityMatrix::from_matrix_unchecked(self.n, corrected);
        let ideal = self.encode_ideal(ideal_logical)?;
        let f = corrected.fidelity(&ideal)?;
        Ok((1.0 - f).clamp(0.0, 1.0))
    }
}

fn error_candidates(n: usize, paulis: &[Pauli]) -> Vec<PauliString> {
    let mut v = vec![PauliString::identity(n)];
    for q in 0..n {
        for &p in paulis {
            v.push(PauliString::single(n, q, p).unwrap());
        }
    }
    v
}

fn syndrome_of(generators: &[PauliString], error: &PauliString) -> u16 {
    let mut s = 0u16;
    for (k, g) in generators.iter().enumerate() {
        if !g.commutes_with(error) {
            s |= 1 << k;
        }
    }
    s
}

/// Normalized +1-eigenvector of all generators reachable from |0...0>.
fn codeword_from_projection(n: usize, generators: &[PauliString]) -> Vec<Complex64> {
    let dim = 1usize << n;
    let mut v = ndarray::Array1::<Complex64>::zeros(dim);
    v[0] = Complex64::new(1.0, 0.0);
    for g in generators {
        let m = g.to_operator();
        let gv = m.data().dot(&v);
        v = (&v + &gv).mapv(|z| z * 0.5);
    }
    let norm: f64 = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    assert!(norm > 1e-9, "projection annihilated |0...0>");
    v.mapv(|z| z / norm).to_vec()
}

fn syndrome_projector(n: usize, generators: &[PauliString], syndrome: u16) -> Array2<Complex64> {
    let dim = 1usize << n;
    let mut p = Array2::<Complex64>::eye(dim);
    for (k, g) in generators.iter().enumerate() {
        let sign = if syndrome >> k & 1 == 0 { 1.0 } else { -1.0 };
        let gm = g.to_operator();
        let term = (&p + &gm.data().dot(&p).mapv(|z| z * sign)).mapv(|z| z * 0.5);
        p = term;
    }
    p
}
