// Copyright 2026 QecSim Contributors
// SPDX-License-Identifier: Apache-2.0

//! Quantum-memory and logical-X crash experiments.
//!
//! A computational step is a logical gate (identity for the memory
//! experiment) followed by one fault-tolerant QEC step. After every step
//! the crash probability is taken on a copy of the branch-merged state via
//! the perfect decoder; the series of (step, time, P_c) samples feeds the
//! rate fit.

use serde::{Deserialize, Serialize};

use crate::analysis::{CrashSample, CrashSeries};
use crate::codes::StabilizerCode;
use crate::measure::PovmError;
use crate::propagator::{IntegratorConfig, NoiseModel, Propagator};
use crate::pulses::{compile_gate, Gate, ParallelismLevel};
use crate::qstate::{average_logical_input, DensityMatrix, PauliString};
use crate::{Error, Result};

use super::inject::InjectionPoint;
use super::protocol::{qec_step, RepetitionProtocol};
use super::rounds::RoundContext;

/// What happens between QEC steps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    /// Repeated QEC on idle data.
    Memory,
    /// A transversal logical X before every QEC step.
    LogicalX,
}

/// Which per-step duration enters the rate normalization.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TauMode {
    /// Zero-syndrome-path duration (two detections for protocol A, one
    /// for B); recovery pulses and preparation retries are not charged.
    DominantBranch,
    /// Probability-weighted duration over all branches.
    ExpectedBranch,
}

/// Initial logical state of the encoded register.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InitialLogical {
    /// |0>: the bit-flip study's choice (avoids uncorrectable Z content).
    Zero,
    /// The Bloch-diagonal pure state averaging all logical inputs.
    Average,
}

impl InitialLogical {
    pub fn state(&self) -> DensityMatrix {
        match self {
            InitialLogical::Zero => DensityMatrix::basis_state(1, 0).unwrap(),
            InitialLogical::Average => average_logical_input(),
        }
    }
}

/// Full description of a crash experiment.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentSpec {
    pub code: String,
    pub kind: ExperimentKind,
    pub protocol: RepetitionProtocol,
    pub level: ParallelismLevel,
    pub povm_eta: f64,
    pub n_steps: usize,
    /// Stop recording once P_c exceeds this (after at least 3 samples).
    pub early_stop_pc: f64,
    pub tau_mode: TauMode,
    pub initial: InitialLogical,
    pub acceptance_floor: f64,
}

impl ExperimentSpec {
    pub fn memory(code: &str) -> Self {
        let initial = if code == "five-qubit" {
            InitialLogical::Average
        } else {
            InitialLogical::Zero
        };
        Self {
            code: code.to_string(),
            kind: ExperimentKind::Memory,
            protocol: RepetitionProtocol::A,
            level: ParallelismLevel::Sequential,
            povm_eta: 0.0,
            n_steps: 10,
            early_stop_pc: 0.4,
            tau_mode: TauMode::DominantBranch,
            initial,
            acceptance_floor: 0.05,
        }
    }

    pub fn logical_x(code: &str) -> Self {
        Self {
            kind: ExperimentKind::LogicalX,
            ..Self::memory(code)
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_steps < 3 {
            return Err(Error::TooFewSteps {
                need: 3,
                got: self.n_steps,
            });
        }
        StabilizerCode::by_name(&self.code)?;
        PovmError::new(self.povm_eta)?;
        Ok(())
    }
}

/// A completed experiment: the crash series plus per-step diagnostics.
#[derive(Debug, Clone)]
pub struct ExperimentRun {
    pub series: CrashSeries,
    pub branch_counts: Vec<usize>,
    /// Charged per-step duration (per the spec's tau mode).
    pub tau: f64,
    /// Mean probability-weighted step duration, for sensitivity checks.
    pub expected_step_time: f64,
}

/// Runs the experiment and records P_c after every computational step.
pub fn run_crash_experiment(
    spec: &ExperimentSpec,
    noise: &NoiseModel,
    cfg: &IntegratorConfig,
) -> Result<ExperimentRun> {
    run_crash_experiment_injected(spec, noise, cfg, &[])
}

/// As `run_crash_experiment`, with an optional injected fault (applied in
/// the first computational step only).
pub fn run_crash_experiment_injected(
    spec: &ExperimentSpec,
    noise: &NoiseModel,
    cfg: &IntegratorConfig,
    inj: &[InjectionPoint],
) -> Result<ExperimentRun> {
    spec.validate()?;
    let code = StabilizerCode::by_name(&spec.code)?;
    let mut ctx = RoundContext::new(
        code.clone(),
        spec.level,
        PovmError::new(spec.povm_eta)?,
        *noise,
        *cfg,
    );
    ctx.acceptance_floor = spec.acceptance_floor;

    let mut logical = spec.initial.state();
    let mut state = code.encode_ideal(&logical)?;
    let x = PauliString::single(1, 0, crate::qstate::Pauli::X)?;

    let gate_time = match spec.kind {
        ExperimentKind::Memory => 0.0,
        ExperimentKind::LogicalX => ctx.logical_x_duration()?,
    };

    let mut samples = Vec::with_capacity(spec.n_steps);
    let mut branch_counts = Vec::with_capacity(spec.n_steps);
    let mut dominant_tau = 0.0;
    let mut expected_total = 0.0;
    for k in 1..=spec.n_steps {
        let step_inj: &[InjectionPoint] = if k == 1 { inj } else { &[] };
        if spec.kind == ExperimentKind::LogicalX {
            state = ctx.apply_logical_x(&state, step_inj)?;
            logical.conjugate_by_pauli(&x);
        }
        let step = qec_step(&mut ctx, &state, spec.protocol, step_inj)?;
        state = step.post_state;
        dominant_tau = gate_time + step.elapsed;
        expected_total += gate_time + step.expected_elapsed;
        let mut p_c = code.perfect_decode_crash(&state, &logical)?;
        // P_c approaches 1/2 strictly from below; a recorded value at or
        // above it is pure float saturation of the decaying exponential.
        p_c = p_c.min(0.5 - 1e-12);
        samples.push((k, p_c));
        branch_counts.push(step.branch_count);
        if p_c > spec.early_stop_pc && samples.len() >= 3 {
            break;
        }
    }

    let expected_step_time = expected_total / samples.len() as f64;
    let tau = match spec.tau_mode {
        TauMode::DominantBranch => dominant_tau,
        TauMode::ExpectedBranch => expected_step_time,
    };
    let series = CrashSeries::new(
        samples
            .into_iter()
            .map(|(n, p_c)| CrashSample {
                n,
                t: n as f64 * tau,
                p_c,
            })
            .collect(),
        tau,
    )?;
    Ok(ExperimentRun {
        series,
        branch_counts,
        tau,
        expected_step_time,
    })
}

/// The bare-qubit counterpart, run through the identical pipeline: an
/// unencoded qubit idles for tau per step (memory) or takes one X pulse
/// per step (logical X), and the same series/fit machinery applies.
pub fn bare_crash_series(
    kind: ExperimentKind,
    noise: &NoiseModel,
    cfg: &IntegratorConfig,
    initial: &DensityMatrix,
    n_steps: usize,
    tau: f64,
) -> Result<CrashSeries> {
    if n_steps < 3 {
        return Err(Error::TooFewSteps {
            need: 3,
            got: n_steps,
        });
    }
    let mut prop = Propagator::new(1, *noise, *cfg)?;
    let mut state = initial.clone();
    let mut ideal = initial.clone();
    let x = PauliString::parse("X")?;
    let (step_tau, x_sched) = match kind {
        ExperimentKind::Memory => (tau, None),
        ExperimentKind::LogicalX => {
            let sched = compile_gate(Gate::X(0), ParallelismLevel::Sequential, 1)?;
            (sched.total_duration(), Some(sched))
        }
    };
    let mut samples = Vec::with_capacity(n_steps);
    for k in 1..=n_steps {
        match &x_sched {
            None => state = prop.propagate_idle(&state, step_tau)?,
            Some(sched) => {
                state = prop.propagate(&state, sched)?;
                ideal.conjugate_by_pauli(&x);
            }
        }
        let p_c = (1.0 - state.fidelity(&ideal)?).clamp(0.0, 0.5 - 1e-12);
        samples.push(CrashSample {
            n: k,
            t: k as f64 * step_tau,
            p_c,
        });
    }
    CrashSeries::new(samples, step_tau)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn zero_noise_memory_is_crash_free() {
        for code in ["bit-flip-3", "five-qubit"] {
            let mut spec = ExperimentSpec::memory(code);
            spec.n_steps = 3;
            spec.protocol = RepetitionProtocol::B;
            let run = run_crash_experiment(
                &spec,
                &NoiseModel::zero(),
                &IntegratorConfig::default(),
            )
            .unwrap();
            for s in run.series.samples() {
                assert!(s.p_c < 1e-9, "{code}: P_c({}) = {}", s.n, s.p_c);
            }
        }
    }

    #[test]
    fn zero_noise_logical_x_toggles_cleanly() {
        let mut spec = ExperimentSpec::logical_x("bit-flip-3");
        spec.n_steps = 3;
        let run =
            run_crash_experiment(&spec, &NoiseModel::zero(), &IntegratorConfig::default())
                .unwrap();
        for s in run.series.samples() {
            assert!(s.p_c < 1e-9, "P_c({}) = {}", s.n, s.p_c);
        }
        // tau includes the gate and two detections (protocol A).
        assert!(run.tau > 0.0);
    }

    #[test]
    fn crash_probability_nondecreasing_under_noise() {
        let mut spec = ExperimentSpec::memory("bit-flip-3");
        spec.n_steps = 4;
        let run = run_crash_experiment(
            &spec,
            &NoiseModel::distinct(0.0, 3e-3).unwrap(),
            &IntegratorConfig::default(),
        )
        .unwrap();
        let ps: Vec<f64> = run.series.samples().iter().map(|s| s.p_c).collect();
        assert!(ps[0] > 0.0);
        for w in ps.windows(2) {
            assert!(w[1] >= w[0] - 1e-9, "non-monotone: {ps:?}");
        }
    }

    #[test]
    fn bare_memory_series_matches_closed_form() {
        let g1 = 0.01;
        let noise = NoiseModel::distinct(0.0, g1).unwrap();
        let series = bare_crash_series(
            ExperimentKind::Memory,
            &noise,
            &IntegratorConfig::default(),
            &DensityMatrix::basis_state(1, 0).unwrap(),
            5,
            1.0,
        )
        .unwrap();
        for s in series.samples() {
            let expect = 0.5 * (1.0 - (-2.0 * g1 * s.t).exp());
            assert_abs_diff_eq!(s.p_c, expect, epsilon = 1e-8);
        }
    }

    #[test]
    fn spec_validation() {
        let mut spec = ExperimentSpec::memory("bit-flip-3");
        spec.n_steps = 2;
        assert!(spec.validate().is_err());
        let mut spec = ExperimentSpec::memory("nope");
        spec.n_steps = 5;
        assert!(spec.validate().is_err());
    }
}
