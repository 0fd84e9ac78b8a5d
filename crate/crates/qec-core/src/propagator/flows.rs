// Copyright 2026 QecSim Contributors
// SPDX-License-Identifier: Apache-2.0

//! Exact sub-flows composed by the split-operator integrator.
//!
//! Distinct-bath propagation runs in the Pauli-coefficient basis, where
//! every flow is a single structured pass: the dissipator is an elementwise
//! decay, and each commuting Hamiltonian term is a Givens rotation between
//! string pairs. Collective-bath propagation runs in the matrix basis,
//! where both collective double-commutators are elementwise in a suitable
//! frame (computational for S_Z, Walsh-Hadamard for S_X).

use num_complex::Complex64;

use super::NoiseModel;
use crate::pulses::{PulseTerm, TermKind};

// ---------------------------------------------------------------------------
// Pauli-basis flows (distinct bath)
// ---------------------------------------------------------------------------

/// Symplectic masks of a pulse term within an n-qubit register, in the
/// PauliVec index layout (a-bit = X/Y at that position, b-bit = Z/Y).
fn term_masks(kind: TermKind, n: usize) -> (usize, usize) {
    let bit = |q: usize| 1usize << (n - 1 - q);
    match kind {
        TermKind::Z(q) => (0, bit(q)),
        TermKind::X(q) => (bit(q), 0),
        TermKind::ZZ(i, j) => (0, bit(i) | bit(j)),
    }
}

/// Precomputed decay factors exp(-rate * tau) per Pauli string for the
/// distinct-bath dissipator: rate = 2 gamma0 |a| + 2 gamma1 |b|.
pub fn distinct_decay_factors(n: usize, noise: &NoiseModel, tau: f64) -> Vec<f64> {
    let size = 1usize << (2 * n);
    let mask = (1usize << n) - 1;
    let mut f = Vec::with_capacity(size);
    for idx in 0..size {
        let a = idx & mask;
        let b = idx >> n;
        let rate = 2.0 * noise.gamma0 * (a.count_ones() as f64)
            + 2.0 * noise.gamma1 * (b.count_ones() as f64);
        f.push((-rate * tau).exp());
    }
    f
}

pub fn apply_decay(coeffs: &mut [f64], factors: &[f64]) {
    for (c, f) in coeffs.iter_mut().zip(factors.iter()) {
        *c *= f;
    }
}

/// Exact adjoint rotation of one Hamiltonian term: rho -> U rho U† with
/// U = exp(-i theta Q). Every Pauli string anticommuting with Q rotates
/// with its partner string P*Q by angle 2 theta (sign from the product
/// phase).
pub fn apply_term_rotation(coeffs: &mut [f64], n: usize, term: PulseTerm, theta: f64) {
    let (qa, qb) = term_masks(term.kind, n);
    let xor = qa | (qb << n);
    let mask = (1usize << n) - 1;
    let angle = 2.0 * term.strength * theta;
    let (sin, cos) = angle.sin_cos();
    let size = coeffs.len();
    let qy = qa & qb; // Y-count contribution of Q itself
    for idx in 0..size {
        let partner = idx ^ xor;
        if partner < idx {
            continue;
        }
        let a = idx & mask;
        let b = idx >> n;
        // Anticommutation: odd symplectic product with Q.
        let anti = ((a & qb).count_ones() + (b & qa).count_ones()) & 1;
        if anti == 0 {
            continue;
        }
        // P Q = alpha R with alpha = i^m (-1)^{|b & qa|},
        // m = |a&b| + |qa&qb| - |(a^qa)&(b^qb)|  (odd since {P,Q}=0).
        let m = (a & b).count_ones() as i32 + qy.count_ones() as i32
            - ((a ^ qa) & (b ^ qb)).count_ones() as i32;
        // sgn = i * alpha = i^{m+1} (-1)^{|b & qa|} in {-1, +1}.
        let mut sgn = if (m + 1).rem_euclid(4) == 0 { 1.0 } else { -1.0 };
        if (b & qa).count_ones() & 1 == 1 {
            sgn = -sgn;
        }
        let cp = coeffs[idx];
        let cr = coeffs[partner];
        coeffs[idx] = cos * cp - sgn * sin * cr;
        coeffs[partner] = cos * cr + sgn * sin * cp;
    }
}

/// Exact adjoint flow of a simultaneous single-qubit pulse
/// sx X + sz Z held for `theta`: a Bloch rotation of the qubit's
/// (X, Y, Z) coefficient triples about the axis (sx, 0, sz).
pub fn apply_axis_rotation(coeffs: &mut [f64], n: usize, q: usize, sx: f64, sz: f64, theta: f64) {
    let p = n - 1 - q;
    let abit = 1usize << p;
    let bbit = 1usize << (p + n);
    let norm = (sx * sx + sz * sz).sqrt();
    let (nx, nz) = (sx / norm, sz / norm);
    let phi = 2.0 * norm * theta;
    let (s, c) = phi.sin_cos();
    let omc = 1.0 - c;
    // Rodrigues rotation about (nx, 0, nz) acting on (cX, cY, cZ).
    let r = [
        [c + omc * nx * nx, -s * nz, omc * nx * nz],
        [s * nz, c, -s * nx],
        [omc * nx * nz, s * nx, c + omc * nz * nz],
    ];
    let size = coeffs.len();
    for ix in 0..size {
        // Visit each triple once through its X slot (a-bit set, b clear).
        if ix & abit == 0 || ix & bbit != 0 {
            continue;
        }
        let iy = ix | bbit;
        let iz = (ix ^ abit) | bbit;
        let (cx, cy, cz) = (coeffs[ix], coeffs[iy], coeffs[iz]);
        coeffs[ix] = r[0][0] * cx + r[0][1] * cy + r[0][2] * cz;
        coeffs[iy] = r[1][0] * cx + r[1][1] * cy + r[1][2] * cz;
        coeffs[iz] = r[2][0] * cx + r[2][1] * cy + r[2][2] * cz;
    }
}

// ---------------------------------------------------------------------------
// Matrix-basis flows (collective bath and general unitaries)
// ---------------------------------------------------------------------------

/// Eigenvalue of Z at bit position `bit` for basis index `idx`.
#[inline(always)]
fn zsign(idx: usize, bit: usize) -> f64 {
    if idx & bit == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Per-basis-state energy of the diagonal part of a layer.
pub fn diagonal_energies(terms: &[PulseTerm], n: usize, dim: usize) -> Vec<f64> {
    let bit = |q: usize| 1usize << (n - 1 - q);
    let mut e = vec![0.0f64; dim];
    for t in terms {
        match t.kind {
            TermKind::Z(q) => {
                let b = bit(q);
                for (idx, v) in e.iter_mut().enumerate() {
                    *v += t.strength * zsign(idx, b);
                }
            }
            TermKind::ZZ(i, j) => {
                let (bi, bj) = (bit(i), bit(j));
                for (idx, v) in e.iter_mut().enumerate() {
                    *v += t.strength * zsign(idx, bi) * zsign(idx, bj);
                }
            }
            TermKind::X(_) => {}
        }
    }
    e
}

/// rho[r,c] *= p[r] conj(p[c]) for a diagonal unitary with phases p.
pub fn apply_diagonal_conjugation(m: &mut [Complex64], dim: usize, phases: &[Complex64]) {
    for r in 0..dim {
        let pr = phases[r];
        let row = &mut m[r * dim..(r + 1) * dim];
        for (c, v) in row.iter_mut().enumerate() {
            *v *= pr * phases[c].conj();
        }
    }
}

/// U = exp(-i theta (sx X + sz Z)) as a 2x2 matrix.
pub fn single_qubit_pulse_unitary(sx: f64, sz: f64, theta: f64) -> [[Complex64; 2]; 2] {
    let norm = (sx * sx + sz * sz).sqrt();
    let (s, c) = (norm * theta).sin_cos();
    let (nx, nz) = (sx / norm, sz / norm);
    [
        [
            Complex64::new(c, -s * nz),
            Complex64::new(0.0, -s * nx),
        ],
        [
            Complex64::new(0.0, -s * nx),
            Complex64::new(c, s * nz),
        ],
    ]
}

/// rho -> U rho U† for a single-qubit unitary on the qubit at `bit`,
/// done as a row mix then a column mix of index pairs.
pub fn apply_single_qubit_conjugation(
    m: &mut [Complex64],
    dim: usize,
    bit: usize,
    u: [[Complex64; 2]; 2],
) {
    // Left multiply by U: rows r, r|bit.
    for r in 0..dim {
        if r & bit != 0 {
            continue;
        }
        let r2 = r | bit;
        for col in 0..dim {
            let a = m[r * dim + col];
            let b = m[r2 * dim + col];
            m[r * dim + col] = u[0][0] * a + u[0][1] * b;
            m[r2 * dim + col] = u[1][0] * a + u[1][1] * b;
        }
    }
    // Right multiply by U†: columns c, c|bit.
    let d = [
        [u[0][0].conj(), u[1][0].conj()],
        [u[0][1].conj(), u[1][1].conj()],
    ];
    for r in 0..dim {
        let row = &mut m[r * dim..(r + 1) * dim];
        for col in 0..dim {
            if col & bit != 0 {
                continue;
            }
            let c2 = col | bit;
            let a = row[col];
            let b = row[c2];
            row[col] = a * d[0][0] + b * d[1][0];
            row[c2] = a * d[0][1] + b * d[1][1];
        }
    }
}

/// Collective S_Z double-commutator decay: elementwise with rate
/// (gamma0/2)(s_r - s_c)^2, s = sum of Z eigenvalues.
pub fn collective_z_factors(n: usize, gamma0: f64, tau: f64) -> Vec<f64> {
    let dim = 1usize << n;
    let s = |idx: usize| n as f64 - 2.0 * (idx.count_ones() as f64);
    let mut f = Vec::with_capacity(dim * dim);
    for r in 0..dim {
        for c in 0..dim {
            let d = s(r) - s(c);
            f.push((-0.5 * gamma0 * d * d * tau).exp());
        }
    }
    f
}

pub fn apply_elementwise(m: &mut [Complex64], factors: &[f64]) {
    for (v, f) in m.iter_mut().zip(factors.iter()) {
        *v *= *f;
    }
}

/// Unnormalized Walsh-Hadamard butterflies over rows and columns; applied
/// twice this scales by 4^n, so callers fold 1/2^n into each surrounding
/// elementwise pass.
pub fn walsh_conjugate(m: &mut [Complex64], dim: usize) {
    // Rows.
    let mut h = 1;
    while h < dim {
        for r in 0..dim {
            if r & h != 0 {
                continue;
            }
            let r2 = r | h;
            for col in 0..dim {
                let a = m[r * dim + col];
                let b = m[r2 * dim + col];
                m[r * dim + col] = a + b;
                m[r2 * dim + col] = a - b;
            }
        }
        h <<= 1;
    }
    // Columns.
    let mut h = 1;
    while h < dim {
        for r in 0..dim {
            let row = &mut m[r * dim..(r + 1) * dim];
            for col in 0..dim {
                if col & h != 0 {
                    continue;
                }
                let c2 = col | h;
                let a = row[col];
                let b = row[c2];
                row[col] = a + b;
                row[c2] = a - b;
            }
        }
        h <<= 1;
    }
}
