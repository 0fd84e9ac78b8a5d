// Copyright 2026 QecSim Contributors
// SPDX-License-Identifier: Apache-2.0

//! Quick threshold probes for the bit-flip code at each parallelism level.

use std::time::Instant;

use qec_core::analysis::{threshold_scan, NoiseAxis, ScanConfig};
use qec_core::ftqec::{ExperimentKind, ExperimentSpec, RepetitionProtocol};
use qec_core::propagator::{BathKind, IntegratorConfig};
use qec_core::pulses::ParallelismLevel;

fn log_grid(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    (0..points)
        .map(|k| (lo.ln() + (hi.ln() - lo.ln()) * k as f64 / (points - 1) as f64).exp())
        .collect()
}

fn main() {
    let cfg = IntegratorConfig::default();
    let scan = ScanConfig {
        rel_tol: 0.05,
        max_bisections: 10,
    };

    for (label, level, kind) in [
        ("memory  seq", ParallelismLevel::Sequential, ExperimentKind::Memory),
        ("memory  inc", ParallelismLevel::Increased, ExperimentKind::Memory),
        ("memory  max", ParallelismLevel::Maximal, ExperimentKind::Memory),
        ("x-gate  inc", ParallelismLevel::Increased, ExperimentKind::LogicalX),
        ("x-gate  seq", ParallelismLevel::Sequential, ExperimentKind::LogicalX),
    ] {
        let mut spec = match kind {
            ExperimentKind::Memory => ExperimentSpec::memory("bit-flip-3"),
            ExperimentKind::LogicalX => ExperimentSpec::logical_x("bit-flip-3"),
        };
        spec.level = level;
        spec.protocol = RepetitionProtocol::A;
        spec.n_steps = 10;
        let grid = match kind {
            ExperimentKind::Memory => log_grid(3e-3, 1e-1, 8),
            ExperimentKind::LogicalX => log_grid(2e-4, 1e-2, 8),
        };
        let start = Instant::now();
        match threshold_scan(&spec, &cfg, NoiseAxis::XErrors, BathKind::Distinct, &grid, &scan) {
            Ok(res) => println!(
                "{label}: gamma* = {:.3e}  bracket [{:.3e}, {:.3e}]  ({:.1} s)",
                res.gamma_star,
                res.bracket.0,
                res.bracket.1,
                start.elapsed().as_secs_f64()
            ),
            Err(e) => println!("{label}: ERROR {e}"),
        }
    }
}
