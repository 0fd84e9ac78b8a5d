// Copyright 2026 QecSim Contributors
// SPDX-License-Identifier: Apache-2.0

//! Circuit layouts for fault-tolerant syndrome extraction.
//!
//! Bit-flip code register: data qubits 0..3, ancilla qubits 3..7. Each ZZ
//! generator is read through a Bell-pair ancilla: the two data qubits of
//! the generator couple to the two halves by controlled-NOT (data as
//! control), so ancilla X faults reach the data only as harmless Z's, and
//! the XOR of the two ancilla outcomes gives the generator eigenvalue bit
//! while each individual outcome stays uniformly random.
//!
//! Five-qubit code register: data 0..5, cat ancillas 5..9. Each of the
//! four generators is read sequentially through a fresh verified cat
//! state: cat qubit k controls the k-th nontrivial factor (CNOT for X
//! factors, CZ for Z factors), the cat is decoded by the reverse ladder
//! and one qubit is measured for the eigenvalue bit.
//!
//! Per-level layouts are written out explicitly: `Sequential` one gate at
//! a time, `Increased` groups disjoint-qubit gates, `Maximal` additionally
//! splits CNOTs into H-CZ-H so that simultaneous controlled-Z pulses fuse
//! into a single layer (adjacent same-qubit Hadamard pairs cancel).

use crate::codes::StabilizerCode;
use crate::pulses::{Circuit, Gate, ParallelismLevel};
use crate::qstate::{Pauli, PauliString};

/// The circuits above express their parallel structure through explicit
/// gate groups, so they are compiled with group merging enabled at every
/// level; only Maximal additionally fuses controlled-Z pulses.
pub(crate) fn scheduling_level(level: ParallelismLevel) -> ParallelismLevel {
    match level {
        ParallelismLevel::Maximal => ParallelismLevel::Maximal,
        _ => ParallelismLevel::Increased,
    }
}

/// Bell-pair preparation |00> -> (|00>+|11>)/sqrt(2) on two qubits.
pub fn bell_pair_circuit(level: ParallelismLevel) -> Circuit {
    let mut c = Circuit::new(2);
    match level {
        ParallelismLevel::Maximal => {
            c.group(vec![Gate::H(0), Gate::H(1)]);
            c.gate(Gate::Cz(0, 1));
            c.gate(Gate::H(1));
        }
        _ => {
            c.gate(Gate::H(0));
            c.gate(Gate::Cnot(0, 1));
        }
    }
    c
}

/// Four-qubit cat-state preparation with one verification qubit.
///
/// Qubits 0..4 hold the cat, qubit 4 is the verifier; accept on outcome 0.
/// The ladder builds the cat, and the verifier checks the parity of the
/// first and last cat qubits, which any ladder-propagated X fault breaks.
pub fn cat4_prep_circuit(level: ParallelismLevel) -> Circuit {
    let mut c = Circuit::new(5);
    match level {
        ParallelismLevel::Sequential => {
            c.gate(Gate::H(0));
            c.gate(Gate::Cnot(0, 1));
            c.gate(Gate::Cnot(1, 2));
            c.gate(Gate::Cnot(2, 3));
            c.gate(Gate::Cnot(0, 4));
            c.gate(Gate::Cnot(3, 4));
        }
        ParallelismLevel::Increased => {
            c.gate(Gate::H(0));
            c.gate(Gate::Cnot(0, 1));
            // The first verification coupling shares no qubits with the
            // ladder step beside it.
            c.group(vec![Gate::Cnot(1, 2), Gate::Cnot(0, 4)]);
            c.gate(Gate::Cnot(2, 3));
            c.gate(Gate::Cnot(3, 4));
        }
        ParallelismLevel::Maximal => {
            // CNOT targets decomposed as H-CZ-H with all target preludes
            // hoisted to the front; the verifier's inner H pair cancels.
            c.group(vec![
                Gate::H(0),
                Gate::H(1),
                Gate::H(2),
                Gate::H(3),
                Gate::H(4),
            ]);
            c.gate(Gate::Cz(0, 1));
            c.gate(Gate::H(1));
            c.group(vec![Gate::Cz(1, 2), Gate::Cz(0, 4)]);
            c.gate(Gate::H(2));
            c.gate(Gate::Cz(2, 3));
            c.gate(Gate::H(3));
            c.gate(Gate::Cz(3, 4));
            c.gate(Gate::H(4));
        }
    }
    c.measure(4);
    c
}

/// Syndrome-detection circuit for the bit-flip code on 7 qubits:
/// data 0,1,2; Bell pair (3,4) reads ZZI, Bell pair (5,6) reads IZZ.
/// Measurement order: 3, 4, 5, 6; bit M1 = m0 xor m1, M2 = m2 xor m3.
///
/// The circuit is laid out in drawn-column style: Hadamards sharing a
/// column act simultaneously at every level, the Bell preparations run
/// side by side, and the inner Hadamard pairs on the Bell targets cancel.
/// The parallelism levels differ in the data-coupling block: the four
/// controlled-Z couplings run one at a time (Sequential), as two
/// disjoint-pair slots (Increased), or in a single fused pulse with the
/// Bell CZs also fused (Maximal).
pub fn bitflip_detection_circuit(level: ParallelismLevel) -> Circuit {
    let mut c = Circuit::new(7);
    // Bell preparations: one H column, then both pair CZs side by side.
    c.group(vec![Gate::H(3), Gate::H(4), Gate::H(5), Gate::H(6)]);
    c.group(vec![Gate::Cz(3, 4), Gate::Cz(5, 6)]);
    // Basis change on the pair heads for the data couplings; the H pairs
    // on qubits 4 and 6 cancel between preparation and coupling.
    c.group(vec![Gate::H(3), Gate::H(5)]);
    match level {
        ParallelismLevel::Sequential => {
            c.gate(Gate::Cz(0, 3));
            c.gate(Gate::Cz(1, 4));
            c.gate(Gate::Cz(1, 5));
            c.gate(Gate::Cz(2, 6));
        }
        ParallelismLevel::Increased => {
            // The first coupling of each generator runs in parallel.
            c.group(vec![Gate::Cz(0, 3), Gate::Cz(1, 5)]);
            c.group(vec![Gate::Cz(1, 4), Gate::Cz(2, 6)]);
        }
        ParallelismLevel::Maximal => {
            // All four coupling CZs in a single pulse.
            c.group(vec![
                Gate::Cz(0, 3),
                Gate::Cz(1, 4),
                Gate::Cz(1, 5),
                Gate::Cz(2, 6),
            ]);
        }
    }
    c.group(vec![Gate::H(3), Gate::H(4), Gate::H(5), Gate::H(6)]);
    for q in 3..7 {
        c.measure(q);
    }
    c
}

/// Coupling plus cat-decode circuit for one five-qubit-code generator on
/// the 9-qubit register (data 0..5, cat 5..9, freshly attached). Ends by
/// measuring cat qubit 5 for the generator eigenvalue bit.
pub fn fivequbit_generator_round_circuit(
    generator: &PauliString,
    level: ParallelismLevel,
) -> Circuit {
    let mut c = Circuit::new(9);
    let factors: Vec<(usize, Pauli)> = (0..5)
        .filter_map(|q| match generator.factor(q) {
            Pauli::I => None,
            p => Some((q, p)),
        })
        .collect();
    assert_eq!(factors.len(), 4, "cyclic generators have weight 4");

    match level {
        ParallelismLevel::Sequential => {
            for (k, (q, p)) in factors.iter().enumerate() {
                let cat = 5 + k;
                match p {
                    Pauli::X => c.gate(Gate::Cnot(cat, *q)),
                    Pauli::Z => c.gate(Gate::Cz(cat, *q)),
                    _ => unreachable!("generators contain only X and Z factors"),
                };
            }
            // Decode: reverse ladder, then rotate the parity into qubit 5.
            c.gate(Gate::Cnot(7, 8));
            c.gate(Gate::Cnot(6, 7));
            c.gate(Gate::Cnot(5, 6));
            c.gate(Gate::H(5));
        }
        ParallelismLevel::Increased => {
            // Transversal couplings act on disjoint pairs: one group.
            let group: Vec<Gate> = factors
                .iter()
                .enumerate()
                .map(|(k, (q, p))| match p {
                    Pauli::X => Gate::Cnot(5 + k, *q),
                    Pauli::Z => Gate::Cz(5 + k, *q),
                    _ => unreachable!(),
                })
                .collect();
            c.group(group);
            c.gate(Gate::Cnot(7, 8));
            c.gate(Gate::Cnot(6, 7));
            c.gate(Gate::Cnot(5, 6));
            c.gate(Gate::H(5));
        }
        ParallelismLevel::Maximal => {
            // Couplings: H on the X-factor data qubits, all four CZs in a
            // single pulse, H back.
            let h_targets: Vec<Gate> = factors
                .iter()
                .filter(|(_, p)| *p == Pauli::X)
                .map(|(q, _)| Gate::H(*q))
                .collect();
            let czs: Vec<Gate> = factors
                .iter()
                .enumerate()
                .map(|(k, (q, _))| Gate::Cz(5 + k, *q))
                .collect();
            c.group(h_targets.clone());
            c.group(czs);
            c.group(h_targets);
            // Decode ladder with cancelled inner H pairs.
            c.gate(Gate::H(8));
            c.gate(Gate::Cz(7, 8));
            c.group(vec![Gate::H(8), Gate::H(7)]);
            c.gate(Gate::Cz(6, 7));
            c.group(vec![Gate::H(7), Gate::H(6)]);
            c.gate(Gate::Cz(5, 6));
            c.group(vec![Gate::H(6), Gate::H(5)]);
        }
    }
    c.measure(5);
    c
}

/// Transversal logical X: one column of simultaneous X pulses, at every
/// level (the pulses act on distinct qubits and are drawn as one slot).
pub fn logical_x_circuit(code: &StabilizerCode, _level: ParallelismLevel) -> Circuit {
    let n = code.n_qubits();
    let mut c = Circuit::new(n);
    c.group((0..n).map(Gate::X).collect());
    c
}

/// Recovery pulses for a syndrome: a column of X pulses, then a column of
/// Z pulses (Y recoveries take both). Single-qubit recoveries on distinct
/// qubits share a column at every level.
pub fn recovery_circuit(
    code: &StabilizerCode,
    syndrome: u16,
    _level: ParallelismLevel,
) -> Circuit {
    let recovery = code.recovery_for(syndrome);
    let n = code.n_qubits();
    let mut c = Circuit::new(n);
    let mut x_gates = Vec::new();
    let mut z_gates = Vec::new();
    for q in 0..n {
        match recovery.factor(q) {
            Pauli::I => {}
            Pauli::X => x_gates.push(Gate::X(q)),
            Pauli::Z => z_gates.push(Gate::Z(q)),
            Pauli::Y => {
                x_gates.push(Gate::X(q));
                z_gates.push(Gate::Z(q));
            }
        }
    }
    if !x_gates.is_empty() {
        c.group(x_gates);
    }
    if !z_gates.is_empty() {
        c.group(z_gates);
    }
    c
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pulses::{schedule_circuit, schedule_unitary, PulseSchedule, ScheduleItem};
    use crate::qstate::{DensityMatrix, QubitOperator};
    use approx::assert_abs_diff_eq;
    use num_complex::Complex64;

    const LEVELS: [ParallelismLevel; 3] = [
        ParallelismLevel::Sequential,
        ParallelismLevel::Increased,
        ParallelismLevel::Maximal,
    ];

    /// Noiseless unitary of the pulse part (measurement markers stripped).
    fn circuit_unitary(c: &Circuit, level: ParallelismLevel) -> QubitOperator {
        let sched = schedule_circuit(c, scheduling_level(level)).unwrap();
        let mut pulses_only = PulseSchedule::new(sched.n_qubits());
        for item in sched.items() {
            if let ScheduleItem::Pulse(l) = item {
                pulses_only.push_layer(l.clone()).unwrap();
            }
        }
        schedule_unitary(&pulses_only).unwrap()
    }

    #[test]
    fn bell_pair_all_levels_equivalent() {
        let reference = circuit_unitary(
            &bell_pair_circuit(ParallelismLevel::Sequential),
            ParallelismLevel::Sequential,
        );
        for level in LEVELS {
            let u = circuit_unitary(&bell_pair_circuit(level), level);
            assert!(
                u.phase_distance(&reference) < 1e-9,
                "{level:?} deviates by {}",
                u.phase_distance(&reference)
            );
        }
        // And it actually makes a Bell state.
        let rho = DensityMatrix::basis_state(2, 0).unwrap();
        let out = rho.apply_unitary(&reference).unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let bell = DensityMatrix::pure(&[
            Complex64::new(s, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(s, 0.0),
        ])
        .unwrap();
        assert_abs_diff_eq!(out.fidelity(&bell).unwrap(), 1.0, epsilon = 1e-10);
    }

    #[test]
    fn cat_prep_all_levels_equivalent() {
        let reference = circuit_unitary(
            &cat4_prep_circuit(ParallelismLevel::Sequential),
            ParallelismLevel::Sequential,
        );
        for level in LEVELS {
            let u = circuit_unitary(&cat4_prep_circuit(level), level);
            assert!(
                u.phase_distance(&reference) < 1e-9,
                "{level:?} deviates by {}",
                u.phase_distance(&reference)
            );
        }
        // |00000> maps to cat (x) |0> on the verifier.
        let rho = DensityMatrix::basis_state(5, 0).unwrap();
        let out = rho.apply_unitary(&reference).unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let mut amps = vec![Complex64::new(0.0, 0.0); 32];
        amps[0b00000] = Complex64::new(s, 0.0);
        amps[0b11110] = Complex64::new(s, 0.0);
        let expect = DensityMatrix::pure(&amps).unwrap();
        assert_abs_diff_eq!(out.fidelity(&expect).unwrap(), 1.0, epsilon = 1e-10);
    }

    #[test]
    fn bitflip_detection_all_levels_equivalent() {
        let reference = circuit_unitary(
            &bitflip_detection_circuit(ParallelismLevel::Sequential),
            ParallelismLevel::Sequential,
        );
        for level in LEVELS {
            let u = circuit_unitary(&bitflip_detection_circuit(level), level);
            assert!(
                u.phase_distance(&reference) < 1e-9,
                "{level:?} deviates by {}",
                u.phase_distance(&reference)
            );
        }
    }

    #[test]
    fn bitflip_detection_durations_strictly_decrease() {
        let mut durations = Vec::new();
        for level in LEVELS {
            let sched =
                schedule_circuit(&bitflip_detection_circuit(level), scheduling_level(level))
                    .unwrap();
            durations.push(sched.total_duration());
        }
        assert!(durations[0] > durations[1] && durations[1] > durations[2]);
        // Column-style layout: three H columns plus the CZ slots.
        use crate::pulses::HADAMARD_PULSE_TIME;
        use std::f64::consts::FRAC_PI_4;
        let h = HADAMARD_PULSE_TIME;
        let cz = 2.0 * FRAC_PI_4;
        approx::assert_abs_diff_eq!(durations[0], 3.0 * h + 5.0 * cz, epsilon = 1e-9);
        approx::assert_abs_diff_eq!(durations[1], 3.0 * h + 3.0 * cz, epsilon = 1e-9);
        approx::assert_abs_diff_eq!(durations[2], 3.0 * h + 2.0 * FRAC_PI_4, epsilon = 1e-9);
    }

    #[test]
    fn fivequbit_rounds_all_levels_equivalent() {
        let code = StabilizerCode::five_qubit();
        for g in code.generators() {
            let reference = circuit_unitary(
                &fivequbit_generator_round_circuit(g, ParallelismLevel::Sequential),
                ParallelismLevel::Sequential,
            );
            for level in LEVELS {
                let u = circuit_unitary(&fivequbit_generator_round_circuit(g, level), level);
                assert!(
                    u.phase_distance(&reference) < 1e-9,
                    "{g} at {level:?} deviates by {}",
                    u.phase_distance(&reference)
                );
            }
        }
    }

    #[test]
    fn maximal_bitflip_coupling_is_single_pulse() {
        let sched = schedule_circuit(
            &bitflip_detection_circuit(ParallelismLevel::Maximal),
            ParallelismLevel::Maximal,
        )
        .unwrap();
        // Five pulse blocks, one layer each: H, CZ, H, CZ, H.
        assert_eq!(sched.n_pulse_layers(), 5);
        // Exactly two layers carry ZZ terms: one pulse for both Bell CZs,
        // one pulse for all four coupling CZs.
        let zz_layers = sched
            .items()
            .iter()
            .filter(|it| match it {
                ScheduleItem::Pulse(l) => l
                    .terms
                    .iter()
                    .any(|t| matches!(t.kind, crate::pulses::TermKind::ZZ(_, _))),
                _ => false,
            })
            .count();
        assert_eq!(zz_layers, 2);
    }

    #[test]
    fn recovery_circuit_matches_table() {
        let code = StabilizerCode::bit_flip();
        // Syndrome with M1 = M2 = 1 recovers the middle qubit.
        let c = recovery_circuit(&code, 0b11, ParallelismLevel::Sequential);
        let sched = schedule_circuit(&c, ParallelismLevel::Sequential).unwrap();
        let u = schedule_unitary(&sched).unwrap();
        let ideal = crate::pulses::ideal_gate_unitary(Gate::X(1), 3).unwrap();
        assert!(u.phase_distance(&ideal) < 1e-10);
        // Zero syndrome: empty circuit.
        let c = recovery_circuit(&code, 0, ParallelismLevel::Sequential);
        assert!(schedule_circuit(&c, ParallelismLevel::Sequential)
            .unwrap()
            .items()
            .is_empty());
    }

    #[test]
    fn logical_x_flips_codewords() {
        for code in [StabilizerCode::bit_flip(), StabilizerCode::five_qubit()] {
            for level in LEVELS {
                let c = logical_x_circuit(&code, level);
                let u = circuit_unitary(&c, level);
                let v0 = DensityMatrix::pure(code.codeword(0)).unwrap();
                let v1 = DensityMatrix::pure(code.codeword(1)).unwrap();
                let out = v0.apply_unitary(&u).unwrap();
                assert_abs_diff_eq!(out.fidelity(&v1).unwrap(), 1.0, epsilon = 1e-10);
            }
        }
    }

    #[test]
    fn maximal_logical_x_is_one_layer() {
        let code = StabilizerCode::bit_flip();
        let c = logical_x_circuit(&code, ParallelismLevel::Maximal);
        let sched = schedule_circuit(&c, ParallelismLevel::Maximal).unwrap();
        assert_eq!(sched.n_pulse_layers(), 1);
        assert_abs_diff_eq!(
            sched.total_duration(),
            std::f64::consts::FRAC_PI_2,
            epsilon = 1e-12
        );
    }
}
