// Copyright 2026 QecSim Contributors
// SPDX-License-Identifier: Apache-2.0

//! Classical fixed-step RK4 integration of the master equation in the
//! matrix basis. This is the reference integrator; the split-operator
//! path must agree with it within the convergence tolerance.

use ndarray::Array2;
use num_complex::Complex64;

use super::{BathKind, NoiseModel};
use crate::pulses::{PulseLayer, PulseTerm, TermKind};
use crate::qstate::DensityMatrix;

/// dрho/dt contribution of the bath: the averaged double-commutator
/// dissipator induced by delta-correlated Hamiltonian fluctuations.
///
/// Distinct bath:   D(rho) = -sum_i (g0/2)[Z_i,[Z_i,rho]] + (g1/2)[X_i,[X_i,rho]]
/// Collective bath: D(rho) = -(g0/2)[S_Z,[S_Z,rho]] - (g1/2)[S_X,[S_X,rho]]
pub fn dissipator(rho: &DensityMatrix, noise: &NoiseModel) -> Array2<Complex64> {
    let n = rho.n_qubits();
    let dim = rho.dim();
    let src: Vec<Complex64> = rho.data().iter().copied().collect();
    let mut out = vec![Complex64::new(0.0, 0.0); dim * dim];
    match noise.bath {
        BathKind::Distinct => {
            add_distinct_dissipator(&mut out, &src, n, dim, noise, 1.0);
        }
        BathKind::Collective => {
            add_collective_dissipator(&mut out, &src, n, dim, noise, 1.0);
        }
    }
    Array2::from_shape_vec((dim, dim), out).expect("shape")
}

fn add_distinct_dissipator(
    out: &mut [Complex64],
    rho: &[Complex64],
    n: usize,
    dim: usize,
    noise: &NoiseModel,
    weight: f64,
) {
    let g0 = noise.gamma0;
    let g1 = noise.gamma1;
    if g0 != 0.0 {
        // -(g0/2) sum_i [Z_i,[Z_i,rho]] = -2 g0 ham(r xor c) rho_rc
        for r in 0..dim {
            for c in 0..dim {
                let k = ((r ^ c).count_ones()) as f64;
                out[r * dim + c] -= Complex64::new(2.0 * g0 * k * weight, 0.0) * rho[r * dim + c];
            }
        }
    }
    if g1 != 0.0 {
        // -(g1/2) sum_i [X_i,[X_i,rho]] = -g1 (n rho - sum_i X_i rho X_i)
        for r in 0..dim {
            for c in 0..dim {
                let mut acc = Complex64::new(0.0, 0.0);
                for q in 0..n {
                    let e = 1usize << q;
                    acc += rho[(r ^ e) * dim + (c ^ e)];
                }
                out[r * dim + c] -=
                    Complex64::new(g1 * weight, 0.0) * (Complex64::new(n as f64, 0.0) * rho[r * dim + c] - acc);
            }
        }
    }
}

fn add_collective_dissipator(
    out: &mut [Complex64],
    rho: &[Complex64],
    n: usize,
    dim: usize,
    noise: &NoiseModel,
    weight: f64,
) {
    let g0 = noise.gamma0;
    let g1 = noise.gamma1;
    if g0 != 0.0 {
        // -(g0/2)[S_Z,[S_Z,rho]] with S_Z diagonal: elementwise (s_r-s_c)^2.
        let s = |idx: usize| n as f64 - 2.0 * idx.count_ones() as f64;
        for r in 0..dim {
            for c in 0..dim {
                let d = s(r) - s(c);
                out[r * dim + c] -=
                    Complex64::new(0.5 * g0 * d * d * weight, 0.0) * rho[r * dim + c];
            }
        }
    }
    if g1 != 0.0 {
        // -(g1/2)(S_X^2 rho - 2 S_X rho S_X + rho S_X^2)
        let left = apply_sx_left(rho, n, dim);
        let left2 = apply_sx_left(&left, n, dim);
        let cross = apply_sx_right(&left, n, dim);
        let right2 = apply_sx_right(&apply_sx_right(rho, n, dim), n, dim);
        let half = Complex64::new(0.5 * g1 * weight, 0.0);
        for i in 0..dim * dim {
            out[i] -= half * (left2[i] - 2.0 * cross[i] + right2[i]);
        }
    }
}

fn apply_sx_left(m: &[Complex64], n: usize, dim: usize) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); dim * dim];
    for r in 0..dim {
        for q in 0..n {
            let e = 1usize << q;
            for c in 0..dim {
                out[r * dim + c] += m[(r ^ e) * dim + c];
            }
        }
    }
    out
}

fn apply_sx_right(m: &[Complex64], n: usize, dim: usize) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); dim * dim];
    for r in 0..dim {
        for q in 0..n {
            let e = 1usize << q;
            for c in 0..dim {
                out[r * dim + c] += m[r * dim + (c ^ e)];
            }
        }
    }
    out
}

/// Full right-hand side: -i [H_layer, rho] + D(rho), written into `out`.
fn rhs(
    out: &mut [Complex64],
    rho: &[Complex64],
    n: usize,
    dim: usize,
    terms: &[PulseTerm],
    noise: &NoiseModel,
) {
    for v in out.iter_mut() {
        *v = Complex64::new(0.0, 0.0);
    }
    let minus_i = Complex64::new(0.0, -1.0);
    let bit = |q: usize| 1usize << (n - 1 - q);
    let zval = |idx: usize, b: usize| if idx & b == 0 { 1.0 } else { -1.0 };
    for t in terms {
        match t.kind {
            TermKind::Z(q) => {
                let b = bit(q);
                for r in 0..dim {
                    for c in 0..dim {
                        let f = t.strength * (zval(r, b) - zval(c, b));
                        if f != 0.0 {
                            out[r * dim + c] += minus_i * f * rho[r * dim + c];
                        }
                    }
                }
            }
            TermKind::ZZ(i, j) => {
                let (bi, bj) = (bit(i), bit(j));
                for r in 0..dim {
                    for c in 0..dim {
                        let f = t.strength
                            * (zval(r, bi) * zval(r, bj) - zval(c, bi) * zval(c, bj));
                        if f != 0.0 {
                            out[r * dim + c] += minus_i * f * rho[r * dim + c];
                        }
                    }
                }
            }
            TermKind::X(q) => {
                let e = bit(q);
                let s = Complex64::new(t.strength, 0.0);
                for r in 0..dim {
                    for c in 0..dim {
                        out[r * dim + c] +=
                            minus_i * s * (rho[(r ^ e) * dim + c] - rho[r * dim + (c ^ e)]);
                    }
                }
            }
        }
    }
    match noise.bath {
        BathKind::Distinct => add_distinct_dissipator(out, rho, n, dim, noise, 1.0),
        BathKind::Collective => add_collective_dissipator(out, rho, n, dim, noise, 1.0),
    }
}

/// Integrates one layer with fixed-step RK4; the step count is the layer
/// duration over `dt`, rounded to the nearest whole step.
pub fn propagate_layer_rk4(
    m: &mut [Complex64],
    n: usize,
    layer: &PulseLayer,
    noise: &NoiseModel,
    dt_target: f64,
) {
    let dim = 1usize << n;
    let n_steps = ((layer.duration / dt_target).round() as usize).max(1);
    let dt = layer.duration / n_steps as f64;

    let size = dim * dim;
    let mut k1 = vec![Complex64::new(0.0, 0.0); size];
    let mut k2 = k1.clone();
    let mut k3 = k1.clone();
    let mut k4 = k1.clone();
    let mut tmp = k1.clone();

    for _ in 0..n_steps {
        rhs(&mut k1, m, n, dim, &layer.terms, noise);
        for i in 0..size {
            tmp[i] = m[i] + 0.5 * dt * k1[i];
        }
        rhs(&mut k2, &tmp, n, dim, &layer.terms, noise);
        for i in 0..size {
            tmp[i] = m[i] + 0.5 * dt * k2[i];
        }
        rhs(&mut k3, &tmp, n, dim, &layer.terms, noise);
        for i in 0..size {
            tmp[i] = m[i] + dt * k3[i];
        }
        rhs(&mut k4, &tmp, n, dim, &layer.terms, noise);
        let w = dt / 6.0;
        for i in 0..size {
            m[i] += w * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
    }
}
