// Copyright 2026 QecSim Contributors
// SPDX-License-Identifier: Apache-2.0

//! Step-function control pulses and gate compilation.
//!
//! The control Hamiltonian supports single-qubit Z and X terms and
//! two-qubit ZZ couplings, all with unit field strength (in units of the
//! control field, which also sets the time unit). Gates are compiled into
//! time-ordered layers of simultaneous pulse terms; a pulse of strength s
//! held for duration t generates exp(-i s t P).
//!
//! Three parallelism levels are supported. `Sequential` runs one gate at a
//! time. `Increased` lets gates on disjoint qubits share layers. `Maximal`
//! additionally emits each controlled-Z as the single pulse
//! exp(-i pi (Z_i Z_j - Z_i - Z_j)/4) and merges commuting controlled-Z
//! pulses of a parallel group into one layer.

mod compile;
mod schedule;

pub use compile::{
    compile_gate, ideal_gate_unitary, layer_unitary, schedule_circuit, schedule_unitary,
    HADAMARD_PULSE_TIME,
};
pub use schedule::{
    Circuit, CircuitItem, Gate, ParallelismLevel, PulseLayer, PulseSchedule, PulseTerm,
    ScheduleItem, TermKind,
};
