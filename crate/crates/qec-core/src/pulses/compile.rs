// Copyright 2026 QecSim Contributors
// SPDX-License-Identifier: Apache-2.0

//! Gate-to-pulse compilation and circuit scheduling.

use std::collections::HashMap;
use std::f64::consts::FRAC_PI_4;

use ndarray::Array2;
use num_complex::Complex64;

use super::schedule::{
    Circuit, CircuitItem, Gate, ParallelismLevel, PulseLayer, PulseSchedule, PulseTerm,
    ScheduleItem, TermKind,
};
use crate::qstate::{embed, expm_neg_i, Pauli, PauliString, QubitOperator};
use crate::{Error, Result};

/// Duration of the single-pulse Hadamard: exp(-i t (X+Z)) = H up to
/// phase at t = pi / (2 sqrt(2)).
pub const HADAMARD_PULSE_TIME: f64 = std::f64::consts::FRAC_PI_2 / std::f64::consts::SQRT_2;

/// Layers for one gate. Rotation convention: a pulse of strength s held
/// for time t generates exp(-i s t P), so Rz(theta) = exp(-i theta Z / 2)
/// takes duration theta/2 at strength +1.
fn gate_layers(gate: Gate, level: ParallelismLevel) -> Vec<PulseLayer> {
    match gate {
        // One simultaneous X+Z pulse: exp(-i pi (X+Z) / (2 sqrt 2)) = -iH.
        Gate::H(q) => vec![PulseLayer::new(
            vec![PulseTerm::x(q, 1.0), PulseTerm::z(q, 1.0)],
            HADAMARD_PULSE_TIME,
        )
        .unwrap()],
        // exp(-i pi X / 2) = -i X.
        Gate::X(q) => vec![PulseLayer::new(vec![PulseTerm::x(q, 1.0)], 2.0 * FRAC_PI_4).unwrap()],
        Gate::Z(q) => vec![PulseLayer::new(vec![PulseTerm::z(q, 1.0)], 2.0 * FRAC_PI_4).unwrap()],
        Gate::Cz(i, j) => cz_layers(i, j, level),
        Gate::Cnot(c, t) => {
            let mut layers = gate_layers(Gate::H(t), level);
            layers.extend(cz_layers(c, t, level));
            layers.extend(gate_layers(Gate::H(t), level));
            layers
        }
    }
}

/// Controlled-Z: exp(-i pi (ZZ - Z - Z)/4) as one pulse at Maximal level,
/// or the ZZ pulse followed by the two Z pulses otherwise.
fn cz_layers(i: usize, j: usize, level: ParallelismLevel) -> Vec<PulseLayer> {
    match level {
        ParallelismLevel::Maximal => vec![PulseLayer::new(
            vec![
                PulseTerm::zz(i, j, 1.0).unwrap(),
                PulseTerm::z(i, -1.0),
                PulseTerm::z(j, -1.0),
            ],
            FRAC_PI_4,
        )
        .unwrap()],
        _ => vec![
            PulseLayer::new(vec![PulseTerm::zz(i, j, 1.0).unwrap()], FRAC_PI_4).unwrap(),
            PulseLayer::new(
                vec![PulseTerm::z(i, -1.0), PulseTerm::z(j, -1.0)],
                FRAC_PI_4,
            )
            .unwrap(),
        ],
    }
}

/// Compiles a single gate to a schedule on an `n_qubits` register.
pub fn compile_gate(gate: Gate, level: ParallelismLevel, n_qubits: usize) -> Result<PulseSchedule> {
    for q in gate.qubits() {
        if q >= n_qubits {
            return Err(Error::QubitOutOfRange { index: q, n_qubits });
        }
    }
    if let Gate::Cz(a, b) | Gate::Cnot(a, b) = gate {
        if a == b {
            return Err(Error::RepeatedQubit(a));
        }
    }
    let mut sched = PulseSchedule::new(n_qubits);
    for layer in gate_layers(gate, level) {
        sched.push_layer(layer)?;
    }
    Ok(sched)
}

/// Compiles a circuit at the given parallelism level.
///
/// Sequential runs every gate on its own; Increased merges the gates of a
/// parallel group onto a shared timeline (disjoint qubits required);
/// Maximal additionally compiles controlled-Z as a single pulse and fuses
/// the commuting controlled-Z pulses of a group into one layer.
pub fn schedule_circuit(circuit: &Circuit, level: ParallelismLevel) -> Result<PulseSchedule> {
    let mut sched = PulseSchedule::new(circuit.n_qubits);
    for item in &circuit.items {
        match item {
            CircuitItem::Measure(q) => sched.push_measure(*q)?,
            CircuitItem::Group(gates) => {
                if level == ParallelismLevel::Sequential {
                    for &g in gates {
                        for layer in gate_layers(g, level) {
                            sched.push_layer(layer)?;
                        }
                    }
                } else {
                    schedule_group(&mut sched, gates, level)?;
                }
            }
        }
    }
    Ok(sched)
}

fn schedule_group(
    sched: &mut PulseSchedule,
    gates: &[Gate],
    level: ParallelismLevel,
) -> Result<()> {
    // Qubit-disjointness holds for every pair except controlled-Z pairs at
    // Maximal level, whose pulse Hamiltonians are diagonal and commute.
    for (i, a) in gates.iter().enumerate() {
        for b in &gates[..i] {
            let share = a.qubits().iter().any(|q| b.qubits().contains(q));
            if share {
                let both_cz = matches!(a, Gate::Cz(..)) && matches!(b, Gate::Cz(..));
                if !(both_cz && level == ParallelismLevel::Maximal) {
                    let q = a
                        .qubits()
                        .into_iter()
                        .find(|q| b.qubits().contains(q))
                        .unwrap();
                    return Err(Error::OverlappingParallelGates(q));
                }
            }
        }
    }

    let mut tracks: Vec<Vec<PulseLayer>> = Vec::new();
    if level == ParallelismLevel::Maximal {
        let czs: Vec<(usize, usize)> = gates
            .iter()
            .filter_map(|g| match g {
                Gate::Cz(a, b) => Some((*a, *b)),
                _ => None,
            })
            .collect();
        for batch in merge_cz_batch(&czs) {
            tracks.push(vec![batch]);
        }
        for &g in gates.iter().filter(|g| !matches!(g, Gate::Cz(..))) {
            tracks.push(gate_layers(g, level));
        }
    } else {
        for &g in gates {
            tracks.push(gate_layers(g, level));
        }
    }

    for layer in merge_tracks(tracks)? {
        sched.push_layer(layer)?;
    }
    Ok(())
}

/// Fuses a set of controlled-Z gates into as few single-pulse layers as
/// possible. Each gate contributes s(ZZ - Z - Z); the per-gate signs are
/// chosen so that the summed Z strength on any shared qubit stays within
/// {-1, 0, +1} (a sign flip conjugates the pulse, which leaves CZ invariant
/// up to global phase). Gates that cannot be accommodated spill into a
/// following layer.
fn merge_cz_batch(pairs: &[(usize, usize)]) -> Vec<PulseLayer> {
    let mut remaining: Vec<(usize, usize)> = pairs.to_vec();
    let mut layers = Vec::new();
    while !remaining.is_empty() {
        let mut z_sum: HashMap<usize, f64> = HashMap::new();
        let mut zz_terms: Vec<PulseTerm> = Vec::new();
        let mut spill = Vec::new();
        for &(a, b) in &remaining {
            let fits = |s: f64, z_sum: &HashMap<usize, f64>| {
                (z_sum.get(&a).copied().unwrap_or(0.0) - s).abs() <= 1.0 + 1e-9
                    && (z_sum.get(&b).copied().unwrap_or(0.0) - s).abs() <= 1.0 + 1e-9
            };
            let sign = if fits(1.0, &z_sum) {
                Some(1.0)
            } else if fits(-1.0, &z_sum) {
                Some(-1.0)
            } else {
                None
            };
            match sign {
                Some(s) => {
                    *z_sum.entry(a).or_insert(0.0) -= s;
                    *z_sum.entry(b).or_insert(0.0) -= s;
                    zz_terms.push(PulseTerm::zz(a, b, s).unwrap());
                }
                None => spill.push((a, b)),
            }
        }
        let mut terms = zz_terms;
        for (&q, &s) in z_sum.iter() {
            if s.abs() > 1e-9 {
                terms.push(PulseTerm::z(q, s));
            }
        }
        // Deterministic term order regardless of hash iteration.
        terms.sort_by_key(|t| match t.kind {
            TermKind::ZZ(i, j) => (0, i.min(j), i.max(j)),
            TermKind::Z(q) => (1, q, 0),
            TermKind::X(q) => (2, q, 0),
        });
        layers.push(PulseLayer::new(terms, FRAC_PI_4).unwrap());
        remaining = spill;
    }
    layers
}

/// Event-based merge of per-gate layer tracks onto one timeline. At each
/// step the shortest remaining sub-layer sets the chunk length and all
/// active terms are emitted together; gates on disjoint qubits commute, so
/// this never changes the noiseless unitary.
fn merge_tracks(tracks: Vec<Vec<PulseLayer>>) -> Result<Vec<PulseLayer>> {
    let mut pos: Vec<(usize, f64)> = tracks.iter().map(|_| (0usize, 0.0f64)).collect();
    let mut merged = Vec::new();
    loop {
        let mut chunk = f64::INFINITY;
        for (t, track) in tracks.iter().enumerate() {
            let (idx, into) = pos[t];
            if idx < track.len() {
                chunk = chunk.min(track[idx].duration - into);
            }
        }
        if !chunk.is_finite() {
            break;
        }
        let mut terms = Vec::new();
        for (t, track) in tracks.iter().enumerate() {
            let (idx, _) = pos[t];
            if idx < track.len() {
                terms.extend(track[idx].terms.iter().copied());
            }
        }
        merged.push(PulseLayer::new(terms, chunk)?);
        for (t, track) in tracks.iter().enumerate() {
            let (idx, into) = pos[t];
            if idx < track.len() {
                let rest = track[idx].duration - into - chunk;
                if rest <= 1e-12 {
                    pos[t] = (idx + 1, 0.0);
                } else {
                    pos[t] = (idx, into + chunk);
                }
            }
        }
    }
    Ok(merged)
}

/// U = exp(-i H_layer duration) with H_layer the sum of the layer's
/// embedded terms.
pub fn layer_unitary(layer: &PulseLayer, n_qubits: usize) -> Result<QubitOperator> {
    let dim = 1usize << n_qubits;
    if layer.is_diagonal() {
        // Diagonal Hamiltonian: exponentiate the per-basis-state energies.
        let mut u = Array2::<Complex64>::zeros((dim, dim));
        for idx in 0..dim {
            let mut h = 0.0f64;
            for t in &layer.terms {
                h += t.strength * diag_eigenvalue(t.kind, idx, n_qubits);
            }
            let phi = -h * layer.duration;
            u[[idx, idx]] = Complex64::new(phi.cos(), phi.sin());
        }
        return Ok(QubitOperator::from_matrix(u).expect("square"));
    }
    let mut h = Array2::<Complex64>::zeros((dim, dim));
    for t in &layer.terms {
        let p = term_pauli(t.kind, n_qubits)?;
        h = h + p.to_operator().data() * Complex64::new(t.strength, 0.0);
    }
    Ok(QubitOperator::from_matrix(expm_neg_i(&h, layer.duration)).expect("square"))
}

fn term_pauli(kind: TermKind, n_qubits: usize) -> Result<PauliString> {
    match kind {
        TermKind::Z(q) => PauliString::single(n_qubits, q, Pauli::Z),
        TermKind::X(q) => PauliString::single(n_qubits, q, Pauli::X),
        TermKind::ZZ(i, j) => {
            let a = PauliString::single(n_qubits, i, Pauli::Z)?;
            let b = PauliString::single(n_qubits, j, Pauli::Z)?;
            Ok(a.product(&b))
        }
    }
}

fn diag_eigenvalue(kind: TermKind, idx: usize, n_qubits: usize) -> f64 {
    let zval = |q: usize| -> f64 {
        if (idx >> crate::qstate::qubit_bit(n_qubits, q)) & 1 == 0 {
            1.0
        } else {
            -1.0
        }
    };
    match kind {
        TermKind::Z(q) => zval(q),
        TermKind::ZZ(i, j) => zval(i) * zval(j),
        TermKind::X(_) => unreachable!("diagonal path"),
    }
}

/// Noiseless unitary of a measurement-free schedule (product of its layer
/// unitaries in time order).
pub fn schedule_unitary(sched: &PulseSchedule) -> Result<QubitOperator> {
    let n = sched.n_qubits();
    let mut u = QubitOperator::identity(n);
    for item in sched.items() {
        match item {
            ScheduleItem::Measure { .. } => return Err(Error::UnexpectedMeasurement),
            ScheduleItem::Pulse(layer) => {
                u = layer_unitary(layer, n)?.dot(&u);
            }
        }
    }
    Ok(u)
}

/// Ideal (instantaneous) unitary of a gate, for compilation checks.
pub fn ideal_gate_unitary(gate: Gate, n_qubits: usize) -> Result<QubitOperator> {
    let o = Complex64::new(0.0, 0.0);
    let l = Complex64::new(1.0, 0.0);
    let s = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    match gate {
        Gate::H(q) => embed(&ndarray::array![[s, s], [s, -s]], &[q], n_qubits),
        Gate::X(q) => embed(&Pauli::X.matrix(), &[q], n_qubits),
        Gate::Z(q) => embed(&Pauli::Z.matrix(), &[q], n_qubits),
        Gate::Cz(a, b) => embed(
            &ndarray::array![
                [l, o, o, o],
                [o, l, o, o],
                [o, o, l, o],
                [o, o, o, -l]
            ],
            &[a, b],
            n_qubits,
        ),
        Gate::Cnot(c, t) => embed(
            &ndarray::array![
                [l, o, o, o],
                [o, l, o, o],
                [o, o, o, l],
                [o, o, l, o]
            ],
            &[c, t],
            n_qubits,
        ),
    }
}
