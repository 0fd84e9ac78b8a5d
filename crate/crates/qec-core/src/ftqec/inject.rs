// Copyright 2026 QecSim Contributors
// SPDX-License-Identifier: Apache-2.0

//! Single-fault injection for fault-tolerance checks.
//!
//! A fault is one Pauli applied on one qubit at one layer boundary of one
//! circuit segment, with the rest of the run noiseless. Sites inside a
//! detection that a branch never executes simply do not fire there.

use crate::codes::StabilizerCode;
use crate::measure::PovmError;
use crate::propagator::{IntegratorConfig, NoiseModel};
use crate::pulses::ParallelismLevel;
use crate::qstate::Pauli;
use crate::Result;

use super::protocol::RepetitionProtocol;
use super::rounds::RoundContext;

/// Which circuit segment a fault lands in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FaultSite {
    /// The full bit-flip detection circuit (7-qubit register).
    BitflipDetection { detection: usize },
    /// The cat preparation/verification register (5 qubits, verifier = 4).
    CatPrep { detection: usize, generator: usize },
    /// The coupling + decode round on the 9-qubit register.
    GeneratorRound { detection: usize, generator: usize },
    /// The recovery pulses on the data register.
    Recovery,
    /// The transversal logical gate on the data register.
    LogicalGate,
}

/// A single injected fault.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InjectionPoint {
    pub site: FaultSite,
    /// Apply after this many layers of the segment (0 = before it starts;
    /// values past the end clamp to the end).
    pub after_layer: usize,
    /// Register-local qubit index within the segment's register.
    pub qubit: usize,
    pub pauli: Pauli,
}

/// Every fault location of one QEC step: each layer boundary of each
/// executed segment, on every qubit of that segment's register, for each
/// of the given Paulis.
pub fn enumerate_injection_sites(
    code: &StabilizerCode,
    protocol: RepetitionProtocol,
    level: ParallelismLevel,
    paulis: &[Pauli],
) -> Result<Vec<InjectionPoint>> {
    let mut ctx = RoundContext::new(
        code.clone(),
        level,
        PovmError::ideal(),
        NoiseModel::zero(),
        IntegratorConfig::default(),
    );
    let n_detections = match protocol {
        RepetitionProtocol::A => 3,
        RepetitionProtocol::B => 2,
    };
    let mut sites: Vec<(FaultSite, usize, usize)> = Vec::new(); // (site, layers, register)
    if code.n_qubits() == 3 {
        let layers = ctx.segment_layer_count_bitflip()?;
        for d in 0..n_detections {
            sites.push((FaultSite::BitflipDetection { detection: d }, layers, 7));
        }
    } else {
        let prep_layers = ctx.segment_layer_count_cat_prep()?;
        for d in 0..n_detections {
            for g in 0..code.n_generators() {
                sites.push((
                    FaultSite::CatPrep {
                        detection: d,
                        generator: g,
                    },
                    prep_layers,
                    5,
                ));
                sites.push((
                    FaultSite::GeneratorRound {
                        detection: d,
                        generator: g,
                    },
                    ctx.segment_layer_count_fq_round(g)?,
                    9,
                ));
            }
        }
    }
    // Recovery pulses: bound the boundary count by the largest table entry.
    let max_recovery_layers = (0..code.n_syndromes() as u16)
        .map(|s| ctx.segment_layer_count_recovery(s))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .max()
        .unwrap_or(0);
    if max_recovery_layers > 0 {
        sites.push((FaultSite::Recovery, max_recovery_layers, code.n_qubits()));
    }

    let mut points = Vec::new();
    for (site, layers, register) in sites {
        for after_layer in 0..=layers {
            for qubit in 0..register {
                for &pauli in paulis {
                    points.push(InjectionPoint {
                        site,
                        after_layer,
                        qubit,
                        pauli,
                    });
                }
            }
        }
    }
    Ok(points)
}
