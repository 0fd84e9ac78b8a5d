// Copyright 2026 QecSim Contributors
// SPDX-License-Identifier: Apache-2.0

//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension {0} is not a power of two")]
    NotPowerOfTwo(usize),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("state vector is not normalized: |norm - 1| = {0:.3e}")]
    NotNormalized(f64),

    #[error("qubit index {index} out of range for {n_qubits}-qubit register")]
    QubitOutOfRange { index: usize, n_qubits: usize },

    #[error("repeated qubit index {0}")]
    RepeatedQubit(usize),

    #[error("empty qubit selection")]
    EmptySelection,

    #[error("invalid pulse term: {0}")]
    InvalidPulseTerm(String),

    #[error("invalid pulse layer: {0}")]
    InvalidLayer(String),

    #[error("gates in a parallel group overlap on qubit {0}")]
    OverlappingParallelGates(usize),

    #[error("invalid Pauli string {0:?}")]
    InvalidPauliString(String),

    #[error("integrator step must be positive, got {0}")]
    InvalidStep(f64),

    #[error("trace drift {drift:.3e} exceeds tolerance {tol:.3e} (dt too large?)")]
    TraceDrift { drift: f64, tol: f64 },

    #[error("schedule contains a measurement marker; propagate only handles pulse layers")]
    UnexpectedMeasurement,

    #[error("measurement error probability {0} outside [0, 0.5]")]
    InvalidPovmEta(f64),

    #[error("noise strength must be finite and non-negative, got {0}")]
    InvalidNoiseStrength(f64),

    #[error("density matrix is not a valid state: {0}")]
    InvalidState(String),

    #[error("target state is not pure: Tr(rho^2) = {0}")]
    NotPure(f64),

    #[error("crash-probability fit needs at least 3 samples, got {0}")]
    TooFewSamples(usize),

    #[error("crash probability {0} >= 1/2: linearization undefined (noise far above threshold)")]
    FitDomain(f64),

    #[error("crash series is not monotone: P_c({n}) dropped by {drop:.3e}")]
    NonMonotoneSeries { n: usize, drop: f64 },

    #[error("no threshold crossing bracketed by the noise grid")]
    NoCrossing,

    #[error("noise grid too small: need at least {need} points spanning a decade, got {got}")]
    GridTooSmall { need: usize, got: usize },

    #[error("cat-state acceptance probability {0:.3e} below configured floor {1:.3e}")]
    AcceptanceTooLow(f64, f64),

    #[error("experiment needs at least {need} steps, got {got}")]
    TooFewSteps { need: usize, got: usize },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}
