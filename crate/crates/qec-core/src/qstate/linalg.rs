// Copyright 2026 QecSim Contributors
// SPDX-License-Identifier: Apache-2.0

//! Small dense linear-algebra helpers: matrix exponential and a Jacobi
//! eigensolver for Hermitian matrices. These serve gate construction and
//! diagnostics; the propagator hot path does not go through them.

use ndarray::Array2;
use num_complex::Complex64;

/// Largest absolute elementwise difference between two matrices.
pub fn max_abs_diff(a: &Array2<Complex64>, b: &Array2<Complex64>) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

fn one_norm(a: &Array2<Complex64>) -> f64 {
    let mut max = 0.0f64;
    for col in a.columns() {
        let s: f64 = col.iter().map(|z| z.norm()).sum();
        max = max.max(s);
    }
    max
}

/// exp(-i t H) for Hermitian `h`, by scaling-and-squaring with a Taylor
/// series. Accurate to ~1e-15 for the matrix sizes used here.
pub fn expm_neg_i(h: &Array2<Complex64>, t: f64) -> Array2<Complex64> {
    let dim = h.nrows();
    let a = h.mapv(|z| z * Complex64::new(0.0, -t));
    // Scale so the series argument has norm below 1/2.
    let norm = one_norm(&a);
    let squarings = if norm > 0.5 {
        (norm / 0.5).log2().ceil() as u32
    } else {
        0
    };
    let scaled = a.mapv(|z| z / (2f64.powi(squarings as i32)));

    let mut result = Array2::<Complex64>::eye(dim);
    let mut term = Array2::<Complex64>::eye(dim);
    for k in 1..=24 {
        term = term.dot(&scaled) / Complex64::new(k as f64, 0.0);
        result += &term;
        if term.iter().map(|z| z.norm()).fold(0.0, f64::max) < 1e-18 {
            break;
        }
    }
    for _ in 0..squarings {
        result = result.dot(&result);
    }
    result
}

/// Eigenvalues of a Hermitian matrix by cyclic complex Jacobi rotations,
/// returned in ascending order. Used for positivity diagnostics only.
pub fn hermitian_eigenvalues(a: &Array2<Complex64>) -> Vec<f64> {
    let n = a.nrows();
    assert_eq!(n, a.ncols(), "matrix must be square");
    let mut m = a.clone();

    for _sweep in 0..64 {
        let mut off = 0.0f64;
        for p in 0..n {
            for q in (p + 1)..n {
                off += m[[p, q]].norm_sqr();
            }
        }
        if off.sqrt() < 1e-14 {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m[[p, q]];
                if apq.norm() < 1e-300 {
                    continue;
                }
                // Phase rotation to make the pivot real, then a real
                // Jacobi rotation to zero it.
                let phase = apq / apq.norm();
                let app = m[[p, p]].re;
                let aqq = m[[q, q]].re;
                let g = apq.norm();
                let theta = 0.5 * (2.0 * g).atan2(app - aqq);
                let (c, s) = (theta.cos(), theta.sin());
                let u_pp = Complex64::new(c, 0.0);
                let u_pq = -phase * s;
                let u_qp = phase.conj() * s;
                let u_qq = Complex64::new(c, 0.0);
                // m <- U† m U acting on rows/cols p and q.
                for k in 0..n {
                    let mkp = m[[k, p]];
                    let mkq = m[[k, q]];
                    m[[k, p]] = mkp * u_pp + mkq * u_qp;
                    m[[k, q]] = mkp * u_pq + mkq * u_qq;
                }
                for k in 0..n {
                    let mpk = m[[p, k]];
                    let mqk = m[[q, k]];
                    m[[p, k]] = u_pp.conj() * mpk + u_qp.conj() * mqk;
                    m[[q, k]] = u_pq.conj() * mpk + u_qq.conj() * mqk;
                }
            }
        }
    }

    let mut eig: Vec<f64> = (0..n).map(|i| m[[i, i]].re).collect();
    eig.sort_by(|a, b| a.partial_cmp(b).unwrap());
    eig
}
