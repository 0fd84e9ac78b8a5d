// Copyright 2026 QecSim Contributors
// SPDX-License-Identifier: Apache-2.0

//! Projective and imperfect (POVM) single-qubit measurements with branch
//! bookkeeping.
//!
//! Measurements are instantaneous and noiseless; imprecision is modeled by
//! the POVM M_b = (1-eta)|b><b| + eta|1-b><1-b|: the state collapses by the
//! underlying projection mixture while the classical record is mislabeled
//! with probability eta.

use crate::propagator::Propagator;
use crate::pulses::{PulseLayer, PulseSchedule, ScheduleItem};
use crate::qstate::{qubit_bit, DensityMatrix};
use crate::{Error, Result};

/// Probability below which a branch is dropped as numerically absent.
pub const BRANCH_FLOOR: f64 = 1e-14;

/// Measurement-error probability.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PovmError {
    eta: f64,
}

impl PovmError {
    pub fn new(eta: f64) -> Result<Self> {
        if !(0.0..=0.5).contains(&eta) || !eta.is_finite() {
            return Err(Error::InvalidPovmEta(eta));
        }
        Ok(Self { eta })
    }

    pub fn ideal() -> Self {
        Self { eta: 0.0 }
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }
}

/// One measurement outcome: the recorded bit, its probability, and the
/// normalized post-measurement state.
#[derive(Debug, Clone)]
pub struct MeasurementBranch {
    pub outcome: u8,
    pub probability: f64,
    pub post_state: DensityMatrix,
}

/// Unnormalized projection of rho onto qubit `q` = `bit_value`; returns the
/// branch weight (trace) alongside.
pub(crate) fn project_qubit(
    rho: &DensityMatrix,
    q: usize,
    bit_value: u8,
) -> Result<(f64, DensityMatrix)> {
    let n = rho.n_qubits();
    if q >= n {
        return Err(Error::QubitOutOfRange {
            index: q,
            n_qubits: n,
        });
    }
    let bit = 1usize << qubit_bit(n, q);
    let want = if bit_value == 0 { 0 } else { bit };
    let dim = rho.dim();
    let mut out = ndarray::Array2::zeros((dim, dim));
    let mut weight = 0.0f64;
    for r in 0..dim {
        if r & bit != want {
            continue;
        }
        for c in 0..dim {
            if c & bit != want {
                continue;
            }
            out[[r, c]] = rho.data()[[r, c]];
        }
        weight += rho.data()[[r, r]].re;
    }
    Ok((weight, DensityMatrix::from_matrix_unchecked(n, out)))
}

/// Dephases qubit `q` in the computational basis: the branch sum
/// P0 rho P0 + P1 rho P1, used where measurement outcomes are summed over
/// without being recorded.
pub(crate) fn dephase_qubit(rho: &DensityMatrix, q: usize) -> Result<DensityMatrix> {
    let (_, mut p0) = project_qubit(rho, q, 0)?;
    let (_, p1) = project_qubit(rho, q, 1)?;
    p0.add_assign(&p1);
    Ok(p0)
}

/// Projective measurement of one qubit in the computational basis.
/// Zero-probability branches are omitted.
pub fn measure_projective(rho: &DensityMatrix, qubit: usize) -> Result<Vec<MeasurementBranch>> {
    measure_povm(rho, qubit, PovmError::ideal())
}

/// Imperfect measurement: outcome probabilities Tr(M_b rho); the post-state
/// mixes both projections weighted by the mislabel probability.
pub fn measure_povm(
    rho: &DensityMatrix,
    qubit: usize,
    err: PovmError,
) -> Result<Vec<MeasurementBranch>> {
    let trace = rho.trace().re;
    let mut branches = Vec::with_capacity(2);
    let (w0, p0) = project_qubit(rho, qubit, 0)?;
    let (w1, p1) = project_qubit(rho, qubit, 1)?;
    let eta = err.eta();
    for outcome in 0..2u8 {
        let (w_match, proj_match, w_flip, proj_flip) = if outcome == 0 {
            (w0, &p0, w1, &p1)
        } else {
            (w1, &p1, w0, &p0)
        };
        let prob = (1.0 - eta) * w_match + eta * w_flip;
        if prob <= BRANCH_FLOOR * trace.max(1.0) {
            continue;
        }
        let mut post = proj_match.scaled((1.0 - eta) / prob);
        post.add_assign(&proj_flip.scaled(eta / prob));
        branches.push(MeasurementBranch {
            outcome,
            probability: prob,
            post_state: post,
        });
    }
    Ok(branches)
}

/// A terminal branch of a schedule run: the classical record in schedule
/// order, the branch probability, and the normalized state.
#[derive(Debug, Clone)]
pub struct RecordBranch {
    pub record: Vec<u8>,
    pub probability: f64,
    pub state: DensityMatrix,
}

/// Runs a schedule with measurement markers, splitting into a branch per
/// recorded outcome. Pulse segments between markers are propagated under
/// the propagator's noise model.
pub fn run_with_measurements(
    rho: &DensityMatrix,
    sched: &PulseSchedule,
    prop: &mut Propagator,
    povm: PovmError,
) -> Result<Vec<RecordBranch>> {
    let mut branches = vec![RecordBranch {
        record: Vec::new(),
        probability: 1.0,
        state: rho.clone(),
    }];
    let mut pending: Vec<&PulseLayer> = Vec::new();
    for item in sched.items() {
        match item {
            ScheduleItem::Pulse(layer) => pending.push(layer),
            ScheduleItem::Measure { qubit } => {
                let mut next = Vec::with_capacity(branches.len() * 2);
                for b in branches {
                    let state = prop.propagate_layers(&b.state, &pending)?;
                    for m in measure_povm(&state, *qubit, povm)? {
                        let mut record = b.record.clone();
                        record.push(m.outcome);
                        next.push(RecordBranch {
                            record,
                            probability: b.probability * m.probability,
                            state: m.post_state,
                        });
                    }
                }
                pending.clear();
                branches = next;
            }
        }
    }
    if !pending.is_empty() {
        for b in &mut branches {
            b.state = prop.propagate_layers(&b.state, &pending)?;
        }
    }
    Ok(branches)
}

/// What the classical controller decides for one measurement record.
#[derive(Debug, Clone)]
pub struct ControlDecision {
    /// Recovery gates to apply to the branch (compiled with noise).
    pub recovery: Vec<crate::pulses::Gate>,
    /// Keep this branch (false = post-selected away).
    pub accept: bool,
}

/// Result of a classically controlled run.
#[derive(Debug, Clone)]
pub struct ControlledOutcome {
    /// Probability-weighted sum of accepted terminal states, renormalized.
    pub state: DensityMatrix,
    /// Total probability of the accepted branches.
    pub acceptance: f64,
    pub branch_count: usize,
}

/// Enumerates measurement branches of `sched`, applies the controller's
/// per-record recovery pulses (with noise) to each accepted branch, and
/// returns the renormalized accepted mixture with its acceptance
/// probability. With an accept-all controller and no recovery this is a
/// trace-preserving map equal to plain propagation.
pub fn branch_and_control(
    rho: &DensityMatrix,
    sched: &PulseSchedule,
    prop: &mut Propagator,
    povm: PovmError,
    level: crate::pulses::ParallelismLevel,
    controller: &dyn Fn(&[u8]) -> ControlDecision,
) -> Result<ControlledOutcome> {
    let n = sched.n_qubits();
    let branches = run_with_measurements(rho, sched, prop, povm)?;
    let branch_count = branches.len();
    let mut acc: Option<DensityMatrix> = None;
    let mut acceptance = 0.0;
    for b in branches {
        let decision = controller(&b.record);
        if !decision.accept {
            continue;
        }
        let mut state = b.state;
        if !decision.recovery.is_empty() {
            let mut circuit = crate::pulses::Circuit::new(n);
            for g in &decision.recovery {
                for &q in g.qubits().iter() {
                    if q >= n {
                        return Err(Error::QubitOutOfRange {
                            index: q,
                            n_qubits: n,
                        });
                    }
                }
                circuit.gate(*g);
            }
            let rec = crate::pulses::schedule_circuit(&circuit, level)?;
            state = prop.propagate(&state, &rec)?;
        }
        acceptance += b.probability;
        let weighted = state.scaled(b.probability);
        match &mut acc {
            None => acc = Some(weighted),
            Some(a) => a.add_assign(&weighted),
        }
    }
    let state = match acc {
        Some(a) => a.scaled(1.0 / acceptance),
        None => {
            return Err(Error::AcceptanceTooLow(0.0, BRANCH_FLOOR));
        }
    };
    Ok(ControlledOutcome {
        state,
        acceptance,
        branch_count,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::propagator::{IntegratorConfig, NoiseModel};
    use crate::pulses::{compile_gate, Gate, ParallelismLevel};
    use approx::assert_abs_diff_eq;
    use num_complex::Complex64;

    fn bell() -> DensityMatrix {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        DensityMatrix::pure(&[
            Complex64::new(s, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(s, 0.0),
        ])
        .unwrap()
    }

    fn maximally_mixed() -> DensityMatrix {
        DensityMatrix::from_matrix(
            ndarray::Array2::eye(2).mapv(|z: f64| Complex64::new(0.5 * z, 0.0)),
        )
        .unwrap()
    }

    #[test]
    fn eigenstate_gives_single_branch() {
        let rho = DensityMatrix::basis_state(1, 0).unwrap();
        let branches = measure_projective(&rho, 0).unwrap();
        assert_eq!(branches.len(), 1);
        assert_eq!(branches[0].outcome, 0);
        assert_abs_diff_eq!(branches[0].probability, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(
            branches[0].post_state.data()[[0, 0]].re,
            1.0,
            epsilon = 1e-12
        );
    }

    #[test]
    fn bell_correlation() {
        let branches = measure_projective(&bell(), 0).unwrap();
        assert_eq!(branches.len(), 2);
        for b in &branches {
            assert_abs_diff_eq!(b.probability, 0.5, epsilon = 1e-12);
            // Post-state is |00> or |11>.
            let idx = if b.outcome == 0 { 0 } else { 3 };
            assert_abs_diff_eq!(b.post_state.data()[[idx, idx]].re, 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn mixed_state_unbiased() {
        let branches = measure_projective(&maximally_mixed(), 0).unwrap();
        assert_eq!(branches.len(), 2);
        for b in &branches {
            assert_abs_diff_eq!(b.probability, 0.5, epsilon = 1e-12);
            assert_abs_diff_eq!(b.post_state.purity(), 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn povm_zero_eta_is_projective() {
        let rho = bell();
        let a = measure_projective(&rho, 1).unwrap();
        let b = measure_povm(&rho, 1, PovmError::new(0.0).unwrap()).unwrap();
        assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(b.iter()) {
            assert_eq!(x.outcome, y.outcome);
            assert_abs_diff_eq!(x.probability, y.probability, epsilon = 0.0);
            assert!(crate::qstate::max_abs_diff(x.post_state.data(), y.post_state.data()) == 0.0);
        }
    }

    #[test]
    fn povm_mislabels_eigenstate() {
        let rho = DensityMatrix::basis_state(1, 0).unwrap();
        let branches = measure_povm(&rho, 0, PovmError::new(0.05).unwrap()).unwrap();
        assert_eq!(branches.len(), 2);
        assert_abs_diff_eq!(branches[0].probability, 0.95, epsilon = 1e-12);
        assert_abs_diff_eq!(branches[1].probability, 0.05, epsilon = 1e-12);
        // The mislabeled branch still collapsed to |0>.
        assert_abs_diff_eq!(
            branches[1].post_state.data()[[0, 0]].re,
            1.0,
            epsilon = 1e-12
        );
    }

    #[test]
    fn povm_symmetric_on_mixed_state() {
        let branches = measure_povm(&maximally_mixed(), 0, PovmError::new(0.3).unwrap()).unwrap();
        assert_eq!(branches.len(), 2);
        for b in &branches {
            assert_abs_diff_eq!(b.probability, 0.5, epsilon = 1e-12);
        }
    }

    #[test]
    fn povm_rejects_bad_eta() {
        assert!(PovmError::new(-0.01).is_err());
        assert!(PovmError::new(0.6).is_err());
    }

    #[test]
    fn branch_probabilities_sum_to_one() {
        let rho = bell();
        let mut prop = Propagator::new(
            2,
            NoiseModel::distinct(0.0, 0.02).unwrap(),
            IntegratorConfig::default(),
        )
        .unwrap();
        let mut sched = compile_gate(Gate::H(0), ParallelismLevel::Sequential, 2).unwrap();
        sched.push_measure(0).unwrap();
        sched.push_measure(1).unwrap();
        let branches = run_with_measurements(&rho, &sched, &mut prop, PovmError::ideal()).unwrap();
        let total: f64 = branches.iter().map(|b| b.probability).sum();
        assert_abs_diff_eq!(total, 1.0, epsilon = 1e-10);
    }

    #[test]
    fn no_measurements_equals_propagate() {
        let rho = bell();
        let noise = NoiseModel::distinct(0.01, 0.02).unwrap();
        let cfg = IntegratorConfig::default();
        let sched = compile_gate(Gate::Cnot(0, 1), ParallelismLevel::Sequential, 2).unwrap();
        let mut prop = Propagator::new(2, noise, cfg).unwrap();
        let direct = prop.propagate(&rho, &sched).unwrap();
        let out = branch_and_control(
            &rho,
            &sched,
            &mut prop,
            PovmError::ideal(),
            ParallelismLevel::Sequential,
            &|_| ControlDecision {
                recovery: vec![],
                accept: true,
            },
        )
        .unwrap();
        assert_abs_diff_eq!(out.acceptance, 1.0, epsilon = 1e-12);
        assert!(crate::qstate::max_abs_diff(out.state.data(), direct.data()) < 1e-12);
    }

    #[test]
    fn trivial_controller_is_trace_preserving() {
        let rho = bell();
        let noise = NoiseModel::distinct(0.02, 0.03).unwrap();
        let mut prop = Propagator::new(2, noise, IntegratorConfig::default()).unwrap();
        let mut sched = compile_gate(Gate::H(1), ParallelismLevel::Sequential, 2).unwrap();
        sched.push_measure(1).unwrap();
        let out = branch_and_control(
            &rho,
            &sched,
            &mut prop,
            PovmError::ideal(),
            ParallelismLevel::Sequential,
            &|_| ControlDecision {
                recovery: vec![],
                accept: true,
            },
        )
        .unwrap();
        assert_abs_diff_eq!(out.acceptance, 1.0, epsilon = 1e-9);
        assert_abs_diff_eq!(out.state.trace().re, 1.0, epsilon = 1e-9);
    }

    #[test]
    fn classically_controlled_recovery_flips_back() {
        // Measure a Bell pair's first qubit; on outcome 1, flip the second
        // qubit back. The merged state has qubit 1 in |0> exactly.
        let rho = bell();
        let mut prop = Propagator::new(2, NoiseModel::zero(), IntegratorConfig::default()).unwrap();
        let mut sched = PulseSchedule::new(2);
        sched.push_measure(0).unwrap();
        let out = branch_and_control(
            &rho,
            &sched,
            &mut prop,
            PovmError::ideal(),
            ParallelismLevel::Sequential,
            &|record| ControlDecision {
                recovery: if record[0] == 1 { vec![Gate::X(1)] } else { vec![] },
                accept: true,
            },
        )
        .unwrap();
        let reduced = out.state.partial_trace(&[1]).unwrap();
        assert_abs_diff_eq!(reduced.data()[[0, 0]].re, 1.0, epsilon = 1e-10);
    }

    #[test]
    fn post_selection_renormalizes() {
        // Keep only outcome 0 of a biased state.
        let rho =
            DensityMatrix::pure(&[Complex64::new(0.8, 0.0), Complex64::new(0.6, 0.0)]).unwrap();
        let mut prop = Propagator::new(1, NoiseModel::zero(), IntegratorConfig::default()).unwrap();
        let mut sched = PulseSchedule::new(1);
        sched.push_measure(0).unwrap();
        let out = branch_and_control(
            &rho,
            &sched,
            &mut prop,
            PovmError::ideal(),
            ParallelismLevel::Sequential,
            &|record| ControlDecision {
                recovery: vec![],
                accept: record[0] == 0,
            },
        )
        .unwrap();
        assert_abs_diff_eq!(out.acceptance, 0.64, epsilon = 1e-12);
        assert_abs_diff_eq!(out.state.trace().re, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(out.state.data()[[0, 0]].re, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn branch_merge_order_independent() {
        // The weighted branch sum equals the dephased state in any order.
        let rho = bell();
        let branches = measure_projective(&rho, 0).unwrap();
        let sum = |iter: &mut dyn Iterator<Item = &MeasurementBranch>| {
            let mut acc: Option<DensityMatrix> = None;
            for b in iter {
                let w = b.post_state.scaled(b.probability);
                match &mut acc {
                    None => acc = Some(w),
                    Some(a) => a.add_assign(&w),
                }
            }
            acc.unwrap()
        };
        let fwd = sum(&mut branches.iter());
        let rev = sum(&mut branches.iter().rev());
        assert!(crate::qstate::max_abs_diff(fwd.data(), rev.data()) < 1e-12);
        let dephased = dephase_qubit(&rho, 0).unwrap();
        assert!(crate::qstate::max_abs_diff(fwd.data(), dephased.data()) < 1e-12);
    }
}
