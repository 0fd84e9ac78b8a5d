// Copyright 2026 QecSim Contributors
// SPDX-License-Identifier: Apache-2.0

//! Five-qubit-code cost and threshold probes: per-step wall time, step
//! convergence in the integrator step, and a coarse memory threshold.

use std::time::Instant;

use qec_core::analysis::{fit_crash_rate, threshold_scan, NoiseAxis, ScanConfig};
use qec_core::ftqec::{run_crash_experiment, ExperimentSpec, RepetitionProtocol};
use qec_core::propagator::{BathKind, IntegratorConfig, NoiseModel};

fn main() {
    let mut spec = ExperimentSpec::memory("five-qubit");
    spec.protocol = RepetitionProtocol::B;
    spec.n_steps = 4;

    // Convergence + cost at one gamma.
    let noise = NoiseModel::distinct(0.0, 4e-4).unwrap();
    for dt in [0.2, 0.1, 0.05] {
        let cfg = IntegratorConfig::split4(dt);
        let start = Instant::now();
        let run = run_crash_experiment(&spec, &noise, &cfg).unwrap();
        let fit = fit_crash_rate(&run.series).unwrap();
        let ps: Vec<String> = run
            .series
            .samples()
            .iter()
            .map(|s| format!("{:.6e}", s.p_c))
            .collect();
        println!(
            "dt={dt:<5} Gamma_n={:.6e}  P_c={:?}  tau={:.1}  wall={:.1}s",
            fit.gamma_n,
            ps,
            run.tau,
            start.elapsed().as_secs_f64()
        );
    }

    // Coarse threshold scan (X errors).
    let cfg = IntegratorConfig::split4(0.1);
    let grid: Vec<f64> = (0..5)
        .map(|k| (1e-4f64.ln() + (2e-3f64 / 1e-4).ln() * k as f64 / 4.0).exp())
        .collect();
    let scan = ScanConfig {
        rel_tol: 0.25,
        max_bisections: 4,
    };
    let start = Instant::now();
    match threshold_scan(&spec, &cfg, NoiseAxis::XErrors, BathKind::Distinct, &grid, &scan) {
        Ok(res) => println!(
            "five-qubit memory (X): gamma* = {:.3e} bracket [{:.3e}, {:.3e}]  wall={:.0}s",
            res.gamma_star,
            res.bracket.0,
            res.bracket.1,
            start.elapsed().as_secs_f64()
        ),
        Err(e) => println!("five-qubit scan error: {e}  wall={:.0}s", start.elapsed().as_secs_f64()),
    }
}
