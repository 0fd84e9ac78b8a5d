// Copyright 2026 QecSim Contributors
// SPDX-License-Identifier: Apache-2.0

//! Fault-tolerant QEC orchestration: ancilla preparation and verification,
//! syndrome-detection rounds, repetition protocols, and the quantum-memory
//! and logical-X crash experiments.

mod circuits;
mod experiments;
mod inject;
mod protocol;
mod rounds;

pub use circuits::{
    bell_pair_circuit, bitflip_detection_circuit, cat4_prep_circuit,
    fivequbit_generator_round_circuit, logical_x_circuit, recovery_circuit,
};
pub use experiments::{
    bare_crash_series, run_crash_experiment, run_crash_experiment_injected, ExperimentKind,
    ExperimentRun, ExperimentSpec, InitialLogical, TauMode,
};
pub use inject::{enumerate_injection_sites, FaultSite, InjectionPoint};
pub use protocol::{qec_step, QecRoundResult, RepetitionProtocol};
pub use rounds::{
    bitflip_detection, prepare_bell_pair, prepare_cat4_verified, syndrome_round_bitflip,
    syndrome_round_fivequbit, CatResource, RoundContext, SyndromeBranch,
};
