// Copyright 2026 QecSim Contributors
// SPDX-License-Identifier: Apache-2.0

//! Acceptance suite: one test per criterion, every tolerance pinned in
//! code. Each test prints a PASS line; failures panic with the measured
//! value. Expensive scans are shared between criteria through OnceLock.
//!
//! Run with:
//!   cargo test --release -p qec-core --test acceptance -- --nocapture

use std::sync::OnceLock;

use qec_core::analysis::{
    compare_baths, fit_crash_rate, log_log_slope, threshold_scan, NoiseAxis, ScanConfig,
    ThresholdResult,
};
use qec_core::codes::StabilizerCode;
use qec_core::ftqec::{
    enumerate_injection_sites, run_crash_experiment,
    syndrome_round_bitflip, syndrome_round_fivequbit, ExperimentKind, ExperimentSpec,
    RepetitionProtocol,
};
use qec_core::measure::PovmError;
use qec_core::propagator::{
    bare_qubit_crash, BareExperiment, BathKind, IntegratorConfig, NoiseModel,
};
use qec_core::pulses::{
    compile_gate, ideal_gate_unitary, schedule_unitary, Gate, ParallelismLevel,
};
use qec_core::qstate::{average_logical_input, DensityMatrix, Pauli, PauliString};

use rayon::prelude::*;

fn log_grid(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    (0..points)
        .map(|k| (lo.ln() + (hi.ln() - lo.ln()) * k as f64 / (points - 1) as f64).exp())
        .collect()
}

fn integrator() -> IntegratorConfig {
    IntegratorConfig::split4(0.05)
}

/// Table II correspondence: the paper's baseline circuit matches the
/// Increased layout best; protocol A is the baseline repetition scheme.
fn bitflip_memory_spec() -> ExperimentSpec {
    let mut spec = ExperimentSpec::memory("bit-flip-3");
    spec.level = ParallelismLevel::Increased;
    spec.protocol = RepetitionProtocol::A;
    spec.n_steps = 10;
    spec
}

fn scan_cfg() -> ScanConfig {
    ScanConfig {
        rel_tol: 0.02,
        max_bisections: 24,
    }
}

fn memory_threshold_increased() -> &'static ThresholdResult {
    static CELL: OnceLock<ThresholdResult> = OnceLock::new();
    CELL.get_or_init(|| {
        threshold_scan(
            &bitflip_memory_spec(),
            &integrator(),
            NoiseAxis::XErrors,
            BathKind::Distinct,
            &log_grid(3e-3, 1e-1, 8),
            &scan_cfg(),
        )
        .expect("bit-flip memory scan")
    })
}

// ---------------------------------------------------------------------
// Calibration criteria (exact, fast)
// ---------------------------------------------------------------------

#[test]
fn acceptance_01_bare_qubit_oracle() {
    let cfg = integrator();
    let ket0 = DensityMatrix::basis_state(1, 0).unwrap();
    for g1 in [1e-3, 1e-2] {
        let noise = NoiseModel::distinct(0.0, g1).unwrap();
        let p = bare_qubit_crash(BareExperiment::Memory { t: 10.0 }, &noise, &cfg, &ket0)
            .unwrap();
        let exact = 0.5 * (1.0 - (-2.0 * g1 * 10.0f64).exp());
        assert!(
            (p - exact).abs() <= 1e-6,
            "bare memory at gamma1={g1}: {p} vs {exact}"
        );
        // Fitted rate through the identical pipeline.
        let series = qec_core::ftqec::bare_crash_series(
            ExperimentKind::Memory,
            &noise,
            &cfg,
            &ket0,
            10,
            10.0,
        )
        .unwrap();
        let fit = fit_crash_rate(&series).unwrap();
        assert!(
            (fit.gamma_t - g1).abs() / g1 <= 1e-4,
            "fitted Gamma_t {} vs gamma1 {g1}",
            fit.gamma_t
        );
    }
    println!("ACCEPTANCE 1 bare-qubit oracle: PASS (P and fitted Gamma_t match closed form)");
}

#[test]
fn acceptance_02_noiseless_circuit_equivalence() {
    // Every compiled gate reproduces its ideal unitary.
    let levels = [
        ParallelismLevel::Sequential,
        ParallelismLevel::Increased,
        ParallelismLevel::Maximal,
    ];
    for level in levels {
        for gate in [
            Gate::H(0),
            Gate::X(1),
            Gate::Z(0),
            Gate::Cz(0, 1),
            Gate::Cnot(0, 1),
            Gate::Cnot(1, 0),
        ] {
            let sched = compile_gate(gate, level, 2).unwrap();
            let u = schedule_unitary(&sched).unwrap();
            let ideal = ideal_gate_unitary(gate, 2).unwrap();
            let d = u.phase_distance(&ideal);
            assert!(d <= 1e-8, "{gate:?} at {level:?}: distance {d}");
        }
    }

    // Both syndrome circuits read every single-qubit error exactly.
    let cfg = integrator();
    let bitflip = StabilizerCode::bit_flip();
    let zero = DensityMatrix::basis_state(1, 0).unwrap();
    let enc3 = bitflip.encode_ideal(&zero).unwrap();
    for q in 0..3 {
        let e = PauliString::single(3, q, Pauli::X).unwrap();
        let mut state = enc3.clone();
        state.conjugate_by_pauli(&e);
        let (branches, _) = syndrome_round_bitflip(
            &state,
            &NoiseModel::zero(),
            ParallelismLevel::Increased,
            &cfg,
            PovmError::ideal(),
        )
        .unwrap();
        assert_eq!(branches.len(), 1);
        assert_eq!(branches[0].syndrome, bitflip.syndrome_of(&e));
        assert!((branches[0].weight - 1.0).abs() <= 1e-8);
        let f = branches[0].state.fidelity(&state).unwrap();
        assert!(1.0 - f <= 1e-8, "bit-flip post-state disturbed: {f}");
    }
    let five = StabilizerCode::five_qubit();
    let enc5 = five.encode_ideal(&average_logical_input()).unwrap();
    for q in 0..5 {
        for p in [Pauli::X, Pauli::Z] {
            let e = PauliString::single(5, q, p).unwrap();
            let mut state = enc5.clone();
            state.conjugate_by_pauli(&e);
            let (branches, _) = syndrome_round_fivequbit(
                &state,
                &NoiseModel::zero(),
                ParallelismLevel::Sequential,
                &cfg,
                PovmError::ideal(),
            )
            .unwrap();
            assert_eq!(branches.len(), 1, "{p:?} on {q}");
            assert_eq!(branches[0].syndrome, five.syndrome_of(&e));
            let f = branches[0].state.fidelity(&state).unwrap();
            assert!(1.0 - f <= 1e-8, "five-qubit post-state disturbed: {f}");
        }
    }

    // Zero-noise experiments have identically zero crash probability.
    for code in ["bit-flip-3", "five-qubit"] {
        for protocol in [RepetitionProtocol::A, RepetitionProtocol::B] {
            for kind in [ExperimentKind::Memory, ExperimentKind::LogicalX] {
                let mut spec = match kind {
                    ExperimentKind::Memory => ExperimentSpec::memory(code),
                    ExperimentKind::LogicalX => ExperimentSpec::logical_x(code),
                };
                spec.protocol = protocol;
                spec.n_steps = 3;
                let run =
                    run_crash_experiment(&spec, &NoiseModel::zero(), &cfg).unwrap();
                for s in run.series.samples() {
                    assert!(
                        s.p_c <= 1e-9,
                        "{code} {kind:?} {protocol:?}: P_c({}) = {}",
                        s.n,
                        s.p_c
                    );
                }
            }
        }
    }
    println!("ACCEPTANCE 2 noiseless equivalence: PASS (gates, rounds, experiments exact)");
}

#[test]
fn acceptance_03_code_oracles_and_fault_injection() {
    // Five-qubit syndrome table equals brute-force anticommutation.
    let five = StabilizerCode::five_qubit();
    let mut seen = std::collections::HashSet::new();
    for q in 0..5 {
        for p in [Pauli::X, Pauli::Y, Pauli::Z] {
            let e = PauliString::single(5, q, p).unwrap();
            let s = five.syndrome_of(&e);
            assert_ne!(s, 0);
            assert!(seen.insert(s), "syndrome collision at {p:?}{q}");
            assert_eq!(
                five.recovery_for(s).to_string(),
                e.to_string(),
                "table entry for syndrome {s:04b}"
            );
        }
    }
    assert_eq!(seen.len(), 15);
    assert!(five.recovery_for(0).is_identity());

    // Single-fault injection at every circuit location leaves no
    // uncorrectable error after one QEC step.
    let cfg = integrator();
    let clean = NoiseModel::zero();
    let cases: Vec<(&str, RepetitionProtocol, Vec<Pauli>)> = vec![
        ("bit-flip-3", RepetitionProtocol::A, vec![Pauli::X]),
        ("bit-flip-3", RepetitionProtocol::B, vec![Pauli::X]),
        (
            "five-qubit",
            RepetitionProtocol::B,
            vec![Pauli::X, Pauli::Y, Pauli::Z],
        ),
    ];
    for (code_name, protocol, paulis) in cases {
        let code = StabilizerCode::by_name(code_name).unwrap();
        let level = ParallelismLevel::Sequential;
        let sites = enumerate_injection_sites(&code, protocol, level, &paulis).unwrap();
        let initial = if code_name == "five-qubit" {
            average_logical_input()
        } else {
            DensityMatrix::basis_state(1, 0).unwrap()
        };
        let encoded = code.encode_ideal(&initial).unwrap();
        let worst = sites
            .par_iter()
            .map(|site| {
                let mut ctx = qec_core::ftqec::RoundContext::new(
                    code.clone(),
                    level,
                    PovmError::ideal(),
                    clean,
                    cfg,
                );
                let step = qec_core::ftqec::qec_step(
                    &mut ctx,
                    &encoded,
                    protocol,
                    std::slice::from_ref(site),
                )
                .unwrap();
                let p = code.perfect_decode_crash(&step.post_state, &initial).unwrap();
                (p, *site)
            })
            .reduce(|| (0.0, sites[0]), |a, b| if a.0 >= b.0 { a } else { b });
        assert!(
            worst.0 <= 1e-9,
            "{code_name} {protocol:?}: fault {:?} leaves P_c = {}",
            worst.1,
            worst.0
        );
        println!(
            "ACCEPTANCE 3 fault injection {code_name} {protocol:?}: PASS \
             ({} sites, worst residual {:.2e})",
            sites.len(),
            worst.0
        );
    }
    println!("ACCEPTANCE 3 code oracles: PASS (table bijective, all single faults correctable)");
}

// ---------------------------------------------------------------------
// Paper-number reproduction
// ---------------------------------------------------------------------

#[test]
fn acceptance_04_bitflip_memory_threshold() {
    let res = memory_threshold_increased();
    let target = 2.1e-2;
    assert!(
        res.gamma_star >= target / 2.0 && res.gamma_star <= target * 2.0,
        "memory threshold {:.3e} outside factor 2 of {target:.1e}",
        res.gamma_star
    );
    println!(
        "ACCEPTANCE 4 bit-flip memory threshold: PASS (gamma* = {:.3e}, target 2.1e-2, \
         ratio {:.2})",
        res.gamma_star,
        res.gamma_star / target
    );
}

#[test]
fn acceptance_05_bitflip_xgate_threshold() {
    let mut spec = bitflip_memory_spec();
    spec.kind = ExperimentKind::LogicalX;
    let res = threshold_scan(
        &spec,
        &integrator(),
        NoiseAxis::XErrors,
        BathKind::Distinct,
        &log_grid(2e-4, 1e-2, 8),
        &scan_cfg(),
    )
    .expect("x-gate scan");
    let target = 1.2e-3;
    assert!(
        res.gamma_star >= target / 2.0 && res.gamma_star <= target * 2.0,
        "x-gate threshold {:.3e} outside factor 2 of {target:.1e}",
        res.gamma_star
    );

    // The extra logical X barely changes the per-step crash rate.
    let gamma_probe = 5e-3;
    let noise = NoiseModel::distinct(0.0, gamma_probe).unwrap();
    let mem = run_crash_experiment(&bitflip_memory_spec(), &noise, &integrator()).unwrap();
    let xg = run_crash_experiment(&spec, &noise, &integrator()).unwrap();
    let g_mem = fit_crash_rate(&mem.series).unwrap().gamma_n;
    let g_x = fit_crash_rate(&xg.series).unwrap().gamma_n;
    let rel = (g_x - g_mem).abs() / g_mem;
    assert!(
        rel <= 0.2,
        "Gamma_n(X) = {g_x:.3e} vs Gamma_n(memory) = {g_mem:.3e}: {:.0}% apart",
        100.0 * rel
    );
    println!(
        "ACCEPTANCE 5 bit-flip X-gate threshold: PASS (gamma* = {:.3e}, target 1.2e-3, \
         ratio {:.2}; Gamma_n gap {:.1}%)",
        res.gamma_star,
        res.gamma_star / target,
        100.0 * rel
    );
}

#[test]
fn acceptance_06_quadratic_regime() {
    let res = memory_threshold_increased();
    let lo = res.gamma_star / 10.0;
    let hi = res.gamma_star;
    let pts: Vec<(f64, f64)> = res
        .curve
        .iter()
        .filter(|p| p.gamma >= lo * 0.999 && p.gamma <= hi * 1.001)
        .map(|p| (p.gamma, p.gamma_n))
        .collect();
    assert!(pts.len() >= 4, "need points across the decade, got {}", pts.len());
    let slope = log_log_slope(&pts);
    assert!(
        (slope - 2.0).abs() <= 0.1,
        "log-log slope {slope:.3} not within 2 +- 0.1 over [{lo:.2e}, {hi:.2e}]"
    );
    println!(
        "ACCEPTANCE 6 quadratic regime: PASS (slope {:.3} over the decade below threshold)",
        slope
    );
}

#[test]
fn acceptance_07_protocol_comparison() {
    let cfg = integrator();
    let mut ratios = Vec::new();
    for gamma in [4e-3, 7e-3, 1.2e-2] {
        let noise = NoiseModel::distinct(0.0, gamma).unwrap();
        let mut spec_a = bitflip_memory_spec();
        spec_a.protocol = RepetitionProtocol::A;
        let mut spec_b = bitflip_memory_spec();
        spec_b.protocol = RepetitionProtocol::B;
        let ga = fit_crash_rate(&run_crash_experiment(&spec_a, &noise, &cfg).unwrap().series)
            .unwrap()
            .gamma_n;
        let gb = fit_crash_rate(&run_crash_experiment(&spec_b, &noise, &cfg).unwrap().series)
            .unwrap()
            .gamma_n;
        let r = gb / ga;
        assert!(
            (r - 0.5).abs() <= 0.15,
            "Gamma_n(B)/Gamma_n(A) = {r:.3} at gamma {gamma:.1e}"
        );
        ratios.push(r);
    }
    println!(
        "ACCEPTANCE 7 protocol comparison: PASS (B/A ratios {:?})",
        ratios.iter().map(|r| format!("{r:.2}")).collect::<Vec<_>>()
    );
}

#[test]
fn acceptance_08_parallelism_ordering() {
    let seq = {
        let mut spec = bitflip_memory_spec();
        spec.level = ParallelismLevel::Sequential;
        threshold_scan(
            &spec,
            &integrator(),
            NoiseAxis::XErrors,
            BathKind::Distinct,
            &log_grid(3e-3, 1e-1, 8),
            &scan_cfg(),
        )
        .expect("sequential scan")
    };
    let inc = memory_threshold_increased();
    let max = {
        let mut spec = bitflip_memory_spec();
        spec.level = ParallelismLevel::Maximal;
        threshold_scan(
            &spec,
            &integrator(),
            NoiseAxis::XErrors,
            BathKind::Distinct,
            &log_grid(1e-2, 4e-1, 8),
            &scan_cfg(),
        )
        .expect("maximal scan")
    };
    assert!(
        seq.gamma_star < inc.gamma_star && inc.gamma_star < max.gamma_star,
        "thresholds not strictly increasing: {:.3e}, {:.3e}, {:.3e}",
        seq.gamma_star,
        inc.gamma_star,
        max.gamma_star
    );
    let ratio = max.gamma_star / seq.gamma_star;
    assert!(ratio >= 2.0, "Maximal/Sequential = {ratio:.2} < 2");
    println!(
        "ACCEPTANCE 8 parallelism ordering: PASS (seq {:.3e} < inc {:.3e} < max {:.3e}, \
         max/seq = {:.2})",
        seq.gamma_star, inc.gamma_star, max.gamma_star, ratio
    );
}

#[test]
fn acceptance_09_povm_robustness() {
    let baseline = memory_threshold_increased();
    let mut spec = bitflip_memory_spec();
    spec.povm_eta = 0.05;
    let res = threshold_scan(
        &spec,
        &integrator(),
        NoiseAxis::XErrors,
        BathKind::Distinct,
        &log_grid(3e-3, 1e-1, 8),
        &scan_cfg(),
    )
    .expect("POVM scan");
    let shift = (res.gamma_star - baseline.gamma_star).abs() / baseline.gamma_star;
    assert!(
        shift < 0.2,
        "eta = 0.05 shifts the threshold by {:.0}% ({:.3e} vs {:.3e})",
        100.0 * shift,
        res.gamma_star,
        baseline.gamma_star
    );
    println!(
        "ACCEPTANCE 9 POVM robustness: PASS (threshold shift {:.1}% at eta = 0.05)",
        100.0 * shift
    );
}

#[test]
fn acceptance_10_collective_bath() {
    // Per-step crash-rate curves for both bath topologies over the decade
    // below threshold; protocol B keeps the collective run tractable and
    // the comparison internally consistent.
    let mut spec = bitflip_memory_spec();
    spec.protocol = RepetitionProtocol::B;
    spec.n_steps = 6;
    let grid = log_grid(2e-3, 2e-2, 6);
    let (distinct, collective) =
        compare_baths(&spec, &integrator(), NoiseAxis::XErrors, &grid).unwrap();
    let mut worst: f64 = 1.0;
    for (d, c) in distinct.iter().zip(collective.iter()) {
        let ratio = c.gamma_n / d.gamma_n;
        worst = worst.max(ratio.max(1.0 / ratio));
        assert!(
            (1.0 / 1.5..=1.5).contains(&ratio),
            "bath ratio {ratio:.3} at gamma {:.2e}",
            d.gamma
        );
    }
    println!(
        "ACCEPTANCE 10 collective bath: PASS (curves agree within factor {:.2} pointwise)",
        worst
    );
}

// ---------------------------------------------------------------------
// Five-qubit code (property-based substitution: reduced grids)
// ---------------------------------------------------------------------

fn fivequbit_spec() -> ExperimentSpec {
    let mut spec = ExperimentSpec::memory("five-qubit");
    spec.protocol = RepetitionProtocol::B;
    spec.n_steps = 4;
    spec
}

fn fivequbit_scan(axis: NoiseAxis, grid_lo: f64, grid_hi: f64, dt: f64) -> ThresholdResult {
    let scan = ScanConfig {
        rel_tol: 0.25,
        max_bisections: 4,
    };
    threshold_scan(
        &fivequbit_spec(),
        &IntegratorConfig::split4(dt),
        axis,
        BathKind::Distinct,
        &log_grid(grid_lo, grid_hi, 5),
        &scan,
    )
    .expect("five-qubit scan")
}

#[test]
fn acceptance_11_fivequbit_thresholds() {
    // Memory thresholds for the three noise types reproduce the reference
    // values within one order of magnitude (reduced 5-point grids; the
    // exact ancilla-circuit layout is not pinned down, so absolute
    // numbers carry a layout factor).
    let cases = [
        (NoiseAxis::XErrors, 4.2e-4, "X"),
        (NoiseAxis::ZErrors, 5.1e-4, "Z"),
        (NoiseAxis::Both, 4.7e-4, "both"),
    ];
    let mut memory_x = 0.0;
    for (axis, target, label) in cases {
        let res = fivequbit_scan(axis, 5e-5, 2e-3, 0.2);
        assert!(
            res.gamma_star >= target / 10.0 && res.gamma_star <= target * 10.0,
            "five-qubit memory ({label}) threshold {:.3e} outside one order of {target:.1e}",
            res.gamma_star
        );
        if matches!(axis, NoiseAxis::XErrors) {
            memory_x = res.gamma_star;
        }
        println!(
            "ACCEPTANCE 11 five-qubit memory ({label}): PASS (gamma* = {:.3e}, \
             target {target:.1e}, ratio {:.2})",
            res.gamma_star,
            res.gamma_star / target
        );
    }

    // Gate thresholds compare per-step rates against a single bare pulse,
    // so the logical-X threshold sits well below the memory one (an order
    // in the reference data); the ordering must be preserved.
    let mut spec = fivequbit_spec();
    spec.kind = ExperimentKind::LogicalX;
    let scan = ScanConfig {
        rel_tol: 0.25,
        max_bisections: 4,
    };
    let res = threshold_scan(
        &spec,
        &IntegratorConfig::split4(0.1),
        NoiseAxis::XErrors,
        BathKind::Distinct,
        &log_grid(5e-7, 5e-5, 5),
        &scan,
    )
    .expect("five-qubit x-gate scan");
    assert!(
        res.gamma_star < memory_x,
        "X-gate threshold {:.3e} not below memory threshold {:.3e}",
        res.gamma_star,
        memory_x
    );
    let gap = memory_x / res.gamma_star;
    assert!(
        gap >= 3.0,
        "memory/X-gate threshold gap {gap:.1} too small to call an order"
    );
    println!(
        "ACCEPTANCE 11 five-qubit X gate: PASS (gamma* = {:.3e}, memory/X gap {:.0}x, \
         ordering preserved)",
        res.gamma_star, gap
    );
}
