// Copyright 2026 QecSim Contributors
// SPDX-License-Identifier: Apache-2.0

//! Pulse schedule data types.

use serde::Serialize;

use crate::{Error, Result};

/// One term of a layer Hamiltonian.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum TermKind {
    /// Z on one qubit (diagonal field).
    Z(usize),
    /// X on one qubit (transverse field).
    X(usize),
    /// ZZ coupling between two qubits.
    ZZ(usize, usize),
}

impl TermKind {
    pub fn qubits(&self) -> (usize, Option<usize>) {
        match *self {
            TermKind::Z(i) | TermKind::X(i) => (i, None),
            TermKind::ZZ(i, j) => (i, Some(j)),
        }
    }

    pub fn max_qubit(&self) -> usize {
        match *self {
            TermKind::Z(i) | TermKind::X(i) => i,
            TermKind::ZZ(i, j) => i.max(j),
        }
    }

    pub fn is_diagonal(&self) -> bool {
        !matches!(self, TermKind::X(_))
    }
}

/// A pulse term: a Hamiltonian generator at strength -1 or +1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PulseTerm {
    pub kind: TermKind,
    pub strength: f64,
}

impl PulseTerm {
    pub fn new(kind: TermKind, strength: f64) -> Result<Self> {
        if (strength.abs() - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidPulseTerm(format!(
                "strength {strength} not in {{-1, +1}}"
            )));
        }
        if let TermKind::ZZ(i, j) = kind {
            if i == j {
                return Err(Error::InvalidPulseTerm(format!("ZZ({i},{j}) needs i != j")));
            }
        }
        Ok(Self { kind, strength })
    }

    pub fn z(q: usize, strength: f64) -> Self {
        Self::new(TermKind::Z(q), strength).unwrap()
    }

    pub fn x(q: usize, strength: f64) -> Self {
        Self::new(TermKind::X(q), strength).unwrap()
    }

    pub fn zz(i: usize, j: usize, strength: f64) -> Result<Self> {
        Self::new(TermKind::ZZ(i, j), strength)
    }
}

/// Simultaneous pulse terms held for a common duration; the terms'
/// Hamiltonians sum.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PulseLayer {
    pub terms: Vec<PulseTerm>,
    pub duration: f64,
}

impl PulseLayer {
    pub fn new(terms: Vec<PulseTerm>, duration: f64) -> Result<Self> {
        if duration <= 0.0 || !duration.is_finite() {
            return Err(Error::InvalidLayer(format!("duration {duration} must be > 0")));
        }
        // A qubit may carry at most one term per layer, with two
        // exceptions that the exact flows support: ZZ couplings and Z
        // fields may share a qubit (they commute; the single-pulse
        // controlled-Z), and an X and Z field may share a qubit (the
        // single-pulse Hadamard axis).
        for (i, t) in terms.iter().enumerate() {
            for u in &terms[..i] {
                if t.kind == u.kind {
                    return Err(Error::InvalidLayer(format!(
                        "duplicate term {:?} in layer",
                        t.kind
                    )));
                }
                if let (TermKind::X(a), other) | (other, TermKind::X(a)) = (t.kind, u.kind) {
                    if let TermKind::ZZ(b0, b1) = other {
                        if b0 == a || b1 == a {
                            return Err(Error::InvalidLayer(format!(
                                "X({a}) shares a qubit with non-commuting {other:?}"
                            )));
                        }
                    }
                }
            }
        }
        Ok(Self { terms, duration })
    }

    /// Idle layer: no control, only noise acts.
    pub fn idle(duration: f64) -> Result<Self> {
        Self::new(Vec::new(), duration)
    }

    pub fn is_diagonal(&self) -> bool {
        self.terms.iter().all(|t| t.kind.is_diagonal())
    }

    pub fn max_qubit(&self) -> Option<usize> {
        self.terms.iter().map(|t| t.kind.max_qubit()).max()
    }
}

/// Schedule element: a pulse layer or an instantaneous projective
/// measurement of one qubit in the computational basis.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum ScheduleItem {
    Pulse(PulseLayer),
    Measure { qubit: usize },
}

/// A time-ordered pulse schedule over a fixed register size.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PulseSchedule {
    n_qubits: usize,
    items: Vec<ScheduleItem>,
}

impl PulseSchedule {
    pub fn new(n_qubits: usize) -> Self {
        Self {
            n_qubits,
            items: Vec::new(),
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn items(&self) -> &[ScheduleItem] {
        &self.items
    }

    pub fn push_layer(&mut self, layer: PulseLayer) -> Result<()> {
        if let Some(q) = layer.max_qubit() {
            if q >= self.n_qubits {
                return Err(Error::QubitOutOfRange {
                    index: q,
                    n_qubits: self.n_qubits,
                });
            }
        }
        self.items.push(ScheduleItem::Pulse(layer));
        Ok(())
    }

    pub fn push_measure(&mut self, qubit: usize) -> Result<()> {
        if qubit >= self.n_qubits {
            return Err(Error::QubitOutOfRange {
                index: qubit,
                n_qubits: self.n_qubits,
            });
        }
        self.items.push(ScheduleItem::Measure { qubit });
        Ok(())
    }

    /// Appends all items of `other` (same register size required).
    pub fn append(&mut self, other: &PulseSchedule) -> Result<()> {
        if other.n_qubits != self.n_qubits {
            return Err(Error::DimensionMismatch {
                expected: self.n_qubits,
                got: other.n_qubits,
            });
        }
        self.items.extend(other.items.iter().cloned());
        Ok(())
    }

    /// Sum of layer durations; measurement markers contribute zero.
    pub fn total_duration(&self) -> f64 {
        self.items
            .iter()
            .map(|it| match it {
                ScheduleItem::Pulse(l) => l.duration,
                ScheduleItem::Measure { .. } => 0.0,
            })
            .sum()
    }

    pub fn n_pulse_layers(&self) -> usize {
        self.items
            .iter()
            .filter(|it| matches!(it, ScheduleItem::Pulse(_)))
            .count()
    }

    pub fn has_measurements(&self) -> bool {
        self.items
            .iter()
            .any(|it| matches!(it, ScheduleItem::Measure { .. }))
    }

    /// Pulse layers only (errors if the schedule contains measurements).
    pub fn pulse_layers(&self) -> Result<Vec<&PulseLayer>> {
        self.items
            .iter()
            .map(|it| match it {
                ScheduleItem::Pulse(l) => Ok(l),
                ScheduleItem::Measure { .. } => Err(Error::UnexpectedMeasurement),
            })
            .collect()
    }

    /// JSON debug dump of the layer structure.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("schedule serializes")
    }
}

/// Parallelism level of circuit-to-schedule compilation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ParallelismLevel {
    Sequential,
    Increased,
    Maximal,
}

/// Gate set: everything the studied circuits are built from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Gate {
    H(usize),
    X(usize),
    Z(usize),
    Cz(usize, usize),
    /// Controlled-NOT: (control, target).
    Cnot(usize, usize),
}

impl Gate {
    pub fn qubits(&self) -> Vec<usize> {
        match *self {
            Gate::H(q) | Gate::X(q) | Gate::Z(q) => vec![q],
            Gate::Cz(a, b) | Gate::Cnot(a, b) => vec![a, b],
        }
    }
}

/// Circuit element: a group of gates declared parallel, or a measurement.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum CircuitItem {
    Group(Vec<Gate>),
    Measure(usize),
}

/// An ordered gate list with declared parallel groups.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Circuit {
    pub n_qubits: usize,
    pub items: Vec<CircuitItem>,
}

impl Circuit {
    pub fn new(n_qubits: usize) -> Self {
        Self {
            n_qubits,
            items: Vec::new(),
        }
    }

    pub fn gate(&mut self, g: Gate) -> &mut Self {
        self.items.push(CircuitItem::Group(vec![g]));
        self
    }

    pub fn group(&mut self, gates: Vec<Gate>) -> &mut Self {
        self.items.push(CircuitItem::Group(gates));
        self
    }

    pub fn measure(&mut self, qubit: usize) -> &mut Self {
        self.items.push(CircuitItem::Measure(qubit));
        self
    }
}

