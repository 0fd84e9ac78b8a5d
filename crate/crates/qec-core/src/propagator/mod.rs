// Copyright 2026 QecSim Contributors
// SPDX-License-Identifier: Apache-2.0

//! Master-equation propagation of a density matrix through a pulse
//! schedule.
//!
//! The noise model comes from white stochastic fluctuations of the control
//! Hamiltonian: diagonal (Z) fluctuations of strength gamma0 and
//! off-diagonal (X) fluctuations of strength gamma1, delta-correlated in
//! time. Averaging over the noise yields the deterministic equation
//!
//!   drho/dt = -i[H(t), rho] - (g0/2) sum [A,[A,rho]] - (g1/2) sum [B,[B,rho]]
//!
//! with A, B the per-qubit Z_i, X_i for a distinct bath, or the collective
//! sums S_Z, S_X when every qubit couples to one common bath. With this
//! convention a bare qubit under gamma1 reaches excited population
//! (1 - e^{-2 g1 t})/2, so fitted rates are directly comparable to the
//! noise strengths. Noise acts on every qubit during every layer,
//! including idle ones; measurements are instantaneous.

mod flows;
mod pauli_rep;
mod rk4;
mod split;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub use pauli_rep::PauliVec;
pub use rk4::dissipator;

use crate::pulses::{compile_gate, Gate, ParallelismLevel, PulseLayer, PulseSchedule};
use crate::qstate::DensityMatrix;
use crate::{Error, Result};

/// Bath topology: independent per-qubit environments or one common bath.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BathKind {
    Distinct,
    Collective,
}

/// Noise strengths per unit time (the control-field time scale).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseModel {
    /// Diagonal (Z) fluctuation strength.
    pub gamma0: f64,
    /// Off-diagonal (X) fluctuation strength.
    pub gamma1: f64,
    pub bath: BathKind,
}

impl NoiseModel {
    pub fn new(gamma0: f64, gamma1: f64, bath: BathKind) -> Result<Self> {
        for g in [gamma0, gamma1] {
            if !g.is_finite() || g < 0.0 {
                return Err(Error::InvalidNoiseStrength(g));
            }
        }
        Ok(Self { gamma0, gamma1, bath })
    }

    pub fn distinct(gamma0: f64, gamma1: f64) -> Result<Self> {
        Self::new(gamma0, gamma1, BathKind::Distinct)
    }

    pub fn collective(gamma0: f64, gamma1: f64) -> Result<Self> {
        Self::new(gamma0, gamma1, BathKind::Collective)
    }

    pub fn zero() -> Self {
        Self {
            gamma0: 0.0,
            gamma1: 0.0,
            bath: BathKind::Distinct,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.gamma0 == 0.0 && self.gamma1 == 0.0
    }
}

/// Integration method. The split-operator integrator composes exact
/// sub-flows to fourth order and is exact at zero noise; RK4 is the
/// classical fixed-step reference.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum IntegratorMethod {
    Split4,
    Rk4,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegratorConfig {
    pub method: IntegratorMethod,
    /// Target step in units of the control time scale; layer durations are
    /// divided into the nearest whole number of steps.
    pub dt: f64,
    pub trace_tol: f64,
    pub herm_tol: f64,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self {
            method: IntegratorMethod::Split4,
            dt: 0.05,
            trace_tol: 1e-9,
            herm_tol: 1e-12,
        }
    }
}

impl IntegratorConfig {
    pub fn rk4(dt: f64) -> Self {
        Self {
            method: IntegratorMethod::Rk4,
            dt,
            trace_tol: 1e-9,
            herm_tol: 1e-12,
        }
    }

    pub fn split4(dt: f64) -> Self {
        Self {
            method: IntegratorMethod::Split4,
            dt,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.dt <= 0.0 || !self.dt.is_finite() {
            return Err(Error::InvalidStep(self.dt));
        }
        Ok(())
    }
}

/// Reusable propagation context: holds the flow-factor caches for one
/// (register size, noise model, integrator) combination.
pub struct Propagator {
    n_qubits: usize,
    noise: NoiseModel,
    cfg: IntegratorConfig,
    cache: split::FlowCache,
}

impl Propagator {
    pub fn new(n_qubits: usize, noise: NoiseModel, cfg: IntegratorConfig) -> Result<Self> {
        cfg.validate()?;
        Ok(Self {
            n_qubits,
            noise,
            cfg,
            cache: split::FlowCache::default(),
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn noise(&self) -> &NoiseModel {
        &self.noise
    }

    pub fn config(&self) -> &IntegratorConfig {
        &self.cfg
    }

    /// Propagates through a measurement-free schedule. Trace preservation
    /// is checked against the input trace; the output is re-symmetrized
    /// when needed (the Pauli-basis path is Hermitian by construction).
    pub fn propagate(&mut self, rho: &DensityMatrix, sched: &PulseSchedule) -> Result<DensityMatrix> {
        if sched.n_qubits() != self.n_qubits || rho.n_qubits() != self.n_qubits {
            return Err(Error::DimensionMismatch {
                expected: self.n_qubits,
                got: sched.n_qubits().max(rho.n_qubits()),
            });
        }
        let layers = sched.pulse_layers()?;
        self.propagate_layers(rho, &layers)
    }

    pub fn propagate_layers(
        &mut self,
        rho: &DensityMatrix,
        layers: &[&PulseLayer],
    ) -> Result<DensityMatrix> {
        if layers.is_empty() {
            return Ok(rho.clone());
        }
        let trace_in = rho.trace().re;
        let mut out = match self.cfg.method {
            IntegratorMethod::Split4 => match self.noise.bath {
                BathKind::Distinct => {
                    let mut pv = PauliVec::from_density(rho);
                    for layer in layers {
                        split::propagate_layer_pauli(
                            &mut pv,
                            layer,
                            &self.noise,
                            self.cfg.dt,
                            &mut self.cache,
                        );
                    }
                    pv.to_density()
                }
                BathKind::Collective => {
                    let mut buf: Vec<Complex64> = rho.data().iter().copied().collect();
                    for layer in layers {
                        split::propagate_layer_matrix(
                            &mut buf,
                            self.n_qubits,
                            layer,
                            &self.noise,
                            self.cfg.dt,
                            &mut self.cache,
                        );
                    }
                    matrix_from_buf(self.n_qubits, buf)
                }
            },
            IntegratorMethod::Rk4 => {
                let mut buf: Vec<Complex64> = rho.data().iter().copied().collect();
                for layer in layers {
                    rk4::propagate_layer_rk4(&mut buf, self.n_qubits, layer, &self.noise, self.cfg.dt);
                }
                matrix_from_buf(self.n_qubits, buf)
            }
        };
        let drift = (out.trace().re - trace_in).abs();
        if drift > self.cfg.trace_tol * trace_in.abs().max(1.0) {
            return Err(Error::TraceDrift {
                drift,
                tol: self.cfg.trace_tol,
            });
        }
        if out.hermiticity_error() > self.cfg.herm_tol {
            out.symmetrize();
        }
        Ok(out)
    }

    /// Propagates an idle stretch (no control, noise only).
    pub fn propagate_idle(&mut self, rho: &DensityMatrix, duration: f64) -> Result<DensityMatrix> {
        if duration <= 0.0 {
            return Ok(rho.clone());
        }
        let layer = PulseLayer::idle(duration)?;
        self.propagate_layers(rho, &[&layer])
    }
}

fn matrix_from_buf(n: usize, buf: Vec<Complex64>) -> DensityMatrix {
    let dim = 1usize << n;
    let m = ndarray::Array2::from_shape_vec((dim, dim), buf).expect("shape");
    DensityMatrix::from_matrix_unchecked(n, m)
}

/// One-shot propagation through a measurement-free schedule.
pub fn propagate(
    rho: &DensityMatrix,
    sched: &PulseSchedule,
    noise: &NoiseModel,
    cfg: &IntegratorConfig,
) -> Result<DensityMatrix> {
    Propagator::new(sched.n_qubits(), *noise, *cfg)?.propagate(rho, sched)
}

/// The reference experiments on a single unencoded qubit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BareExperiment {
    /// Hold the state for a time t with no control.
    Memory { t: f64 },
    /// One compiled X pulse.
    XGate,
}

/// Crash probability of a bare physical qubit: the infidelity against the
/// ideal outcome of the same experiment, starting from `initial` (a pure
/// single-qubit state). This is the baseline the encoded crash rates are
/// compared against.
pub fn bare_qubit_crash(
    experiment: BareExperiment,
    noise: &NoiseModel,
    cfg: &IntegratorConfig,
    initial: &DensityMatrix,
) -> Result<f64> {
    if initial.n_qubits() != 1 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            got: initial.dim(),
        });
    }
    let (sched, ideal) = match experiment {
        BareExperiment::Memory { t } => {
            let mut s = PulseSchedule::new(1);
            if t > 0.0 {
                s.push_layer(PulseLayer::idle(t)?)?;
            }
            (s, initial.clone())
        }
        BareExperiment::XGate => {
            let s = compile_gate(Gate::X(0), ParallelismLevel::Sequential, 1)?;
            let mut ideal = initial.clone();
            ideal.conjugate_by_pauli(&crate::qstate::PauliString::parse("X")?);
            (s, ideal)
        }
    };
    let out = propagate(initial, &sched, noise, cfg)?;
    Ok(1.0 - out.fidelity(&ideal)?)
}
