// Copyright 2026 QecSim Contributors
// SPDX-License-Identifier: Apache-2.0

//! Rough propagation throughput check: time per unit evolution on 7- and
//! 9-qubit registers for both integrators.

use std::time::Instant;

use qec_core::propagator::{propagate, IntegratorConfig, NoiseModel};
use qec_core::pulses::{PulseLayer, PulseSchedule, PulseTerm};
use qec_core::qstate::DensityMatrix;

fn workload(n: usize, repeats: usize) -> PulseSchedule {
    let mut sched = PulseSchedule::new(n);
    for _ in 0..repeats {
        sched
            .push_layer(PulseLayer::new(vec![PulseTerm::x(0, 1.0)], 0.785).unwrap())
            .unwrap();
        sched
            .push_layer(
                PulseLayer::new(
                    vec![
                        PulseTerm::zz(0, 1, 1.0).unwrap(),
                        PulseTerm::z(0, -1.0),
                        PulseTerm::z(1, -1.0),
                    ],
                    0.785,
                )
                .unwrap(),
            )
            .unwrap();
        sched
            .push_layer(PulseLayer::new(vec![PulseTerm::x(n - 1, 1.0)], 0.785).unwrap())
            .unwrap();
    }
    sched
}

fn main() {
    for n in [7usize, 9] {
        let rho = DensityMatrix::basis_state(n, 0).unwrap();
        let noise = NoiseModel::distinct(0.0, 0.01).unwrap();
        let sched = workload(n, 4);
        let total_t = sched.total_duration();

        for (label, cfg) in [
            ("split4 dt=0.05", IntegratorConfig::split4(0.05)),
            ("split4 dt=0.10", IntegratorConfig::split4(0.10)),
            ("rk4    dt=1e-3", IntegratorConfig::rk4(1e-3)),
        ] {
            let start = Instant::now();
            let out = propagate(&rho, &sched, &noise, &cfg).unwrap();
            let wall = start.elapsed().as_secs_f64();
            println!(
                "n={n}  {label}  T={total_t:6.2}  wall={wall:8.3}s  ({:.1} ms per unit time)  tr={:.3e}",
                1e3 * wall / total_t,
                (out.trace().re - 1.0).abs()
            );
        }
    }
}
