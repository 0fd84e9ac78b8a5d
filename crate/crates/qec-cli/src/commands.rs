// Copyright 2026 QecSim Contributors
// SPDX-License-Identifier: Apache-2.0

//! Subcommand implementations. Sweep points are dispatched to the rayon
//! pool and reassembled in grid order, so worker count never changes
//! output bytes.

use std::time::Instant;

use anyhow::Context;
use rayon::prelude::*;

use qec_core::analysis::{
    evaluate_point, fit_crash_rate, threshold_scan, CurvePoint, ScanConfig,
};
use qec_core::ftqec::run_crash_experiment;
use qec_core::propagator::BathKind;
use qec_core::pulses::ParallelismLevel;
use qec_core::ftqec::RepetitionProtocol;

use crate::config::RunConfig;
use crate::output::{
    curve_csv, labeled_curve_csv, out_path, series_csv, write_atomic, FitRecord, PointDiagnostics,
    RunManifest,
};

/// Exit status translated by main into a process code.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CmdOutcome {
    Ok,
    NoCrossing,
}

pub fn cmd_run(cfg: &RunConfig) -> anyhow::Result<CmdOutcome> {
    let start = Instant::now();
    let spec = cfg.experiment_spec()?;
    let integ = cfg.integrator_config();
    let mut manifest = RunManifest::new("run", cfg);

    let mut fits: Vec<FitRecord> = Vec::new();
    let mut series_rows = Vec::new();
    let mut curve: Vec<CurvePoint> = Vec::new();

    let runs: Vec<(f64, qec_core::ftqec::ExperimentRun)> = match &cfg.noise.sweep {
        None => {
            let noise = cfg.single_noise()?;
            let gamma = noise.gamma0.max(noise.gamma1);
            vec![(gamma, run_crash_experiment(&spec, &noise, &integ)?)]
        }
        Some(sweep) => {
            let grid = sweep.grid();
            let results: qec_core::Result<Vec<_>> = grid
                .par_iter()
                .map(|&g| {
                    let noise = sweep.axis.noise(g, cfg.experiment.bath)?;
                    run_crash_experiment(&spec, &noise, &integ).map(|r| (g, r))
                })
                .collect();
            results?
        }
    };

    for (gamma, run) in &runs {
        let fit = fit_crash_rate(&run.series)?;
        fits.push(FitRecord {
            gamma: *gamma,
            tau: run.tau,
            fit,
        });
        curve.push(CurvePoint {
            gamma: *gamma,
            gamma_n: fit.gamma_n,
            gamma_t: fit.gamma_t,
            residual: fit.residual,
            branch_count: run.branch_counts.iter().copied().max().unwrap_or(0),
        });
        manifest.points.push(PointDiagnostics {
            gamma: *gamma,
            tau: run.tau,
            expected_step_time: run.expected_step_time,
            max_branch_count: run.branch_counts.iter().copied().max().unwrap_or(0),
        });
        series_rows.push((*gamma, &run.series));
    }

    let series_path = out_path(cfg, "series.csv");
    write_atomic(&series_path, series_csv(&series_rows).as_bytes())?;
    let fit_path = out_path(cfg, "fit.json");
    write_atomic(
        &fit_path,
        serde_json::to_string_pretty(&fits)?.as_bytes(),
    )?;
    manifest.outputs = vec![display(&series_path), display(&fit_path)];
    if runs.len() > 1 {
        let curve_path = out_path(cfg, "curve.csv");
        write_atomic(&curve_path, curve_csv(&curve).as_bytes())?;
        manifest.outputs.push(display(&curve_path));
    }
    manifest.wall_time_s = start.elapsed().as_secs_f64();
    manifest.write(&out_path(cfg, "manifest.json"))?;
    Ok(CmdOutcome::Ok)
}

pub fn cmd_threshold(cfg: &RunConfig) -> anyhow::Result<CmdOutcome> {
    let start = Instant::now();
    let spec = cfg.experiment_spec()?;
    let integ = cfg.integrator_config();
    let sweep = cfg
        .noise
        .sweep
        .as_ref()
        .context("threshold needs a [noise.sweep] grid")?;
    let scan = ScanConfig {
        rel_tol: cfg.threshold.rel_tol,
        max_bisections: cfg.threshold.max_bisections,
    };
    let mut manifest = RunManifest::new("threshold", cfg);

    let result = threshold_scan(
        &spec,
        &integ,
        sweep.axis,
        cfg.experiment.bath,
        &sweep.grid(),
        &scan,
    );

    match result {
        Ok(res) => {
            let curve_path = out_path(cfg, "curve.csv");
            write_atomic(&curve_path, curve_csv(&res.curve).as_bytes())?;
            let json_path = out_path(cfg, "threshold.json");
            write_atomic(&json_path, serde_json::to_string_pretty(&res)?.as_bytes())?;
            manifest.outputs = vec![display(&curve_path), display(&json_path)];
            for p in &res.curve {
                manifest.points.push(PointDiagnostics {
                    gamma: p.gamma,
                    tau: 0.0,
                    expected_step_time: 0.0,
                    max_branch_count: p.branch_count,
                });
            }
            manifest.wall_time_s = start.elapsed().as_secs_f64();
            manifest.write(&out_path(cfg, "manifest.json"))?;
            println!("gamma_star = {:.4e}", res.gamma_star);
            Ok(CmdOutcome::Ok)
        }
        Err(qec_core::Error::NoCrossing) => {
            // Still write the curve so the grid's data is not lost.
            let grid = sweep.grid();
            let evaluated: qec_core::Result<Vec<_>> = grid
                .par_iter()
                .map(|&g| {
                    evaluate_point(&spec, &integ, sweep.axis, cfg.experiment.bath, g)
                        .map(|(p, _, _)| p)
                })
                .collect();
            let points = evaluated?;
            let curve_path = out_path(cfg, "curve.csv");
            write_atomic(&curve_path, curve_csv(&points).as_bytes())?;
            manifest.outputs = vec![display(&curve_path)];
            manifest.wall_time_s = start.elapsed().as_secs_f64();
            manifest.write(&out_path(cfg, "manifest.json"))?;
            eprintln!("no crossing bracketed by the sweep grid");
            Ok(CmdOutcome::NoCrossing)
        }
        Err(e) => Err(e.into()),
    }
}

/// Which experiment parameter `compare` varies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum CompareAxis {
    Protocol,
    Bath,
    Parallelism,
}

pub fn cmd_compare(cfg: &RunConfig, axis: CompareAxis) -> anyhow::Result<CmdOutcome> {
    let start = Instant::now();
    let base_spec = cfg.experiment_spec()?;
    let integ = cfg.integrator_config();
    let sweep = cfg
        .noise
        .sweep
        .as_ref()
        .context("compare needs a [noise.sweep] grid")?;
    let grid = sweep.grid();
    let mut manifest = RunManifest::new("compare", cfg);

    // (label, spec, bath) variants along the chosen axis.
    let mut variants: Vec<(String, qec_core::ftqec::ExperimentSpec, BathKind)> = Vec::new();
    match axis {
        CompareAxis::Protocol => {
            for p in [RepetitionProtocol::A, RepetitionProtocol::B] {
                let mut s = base_spec.clone();
                s.protocol = p;
                variants.push((format!("protocol-{p:?}"), s, cfg.experiment.bath));
            }
        }
        CompareAxis::Bath => {
            for b in [BathKind::Distinct, BathKind::Collective] {
                variants.push((format!("{b:?}").to_lowercase(), base_spec.clone(), b));
            }
        }
        CompareAxis::Parallelism => {
            for l in [
                ParallelismLevel::Sequential,
                ParallelismLevel::Increased,
                ParallelismLevel::Maximal,
            ] {
                let mut s = base_spec.clone();
                s.level = l;
                variants.push((format!("{l:?}").to_lowercase(), s, cfg.experiment.bath));
            }
        }
    }

    let mut curves = Vec::new();
    for (label, spec, bath) in &variants {
        let points: qec_core::Result<Vec<CurvePoint>> = grid
            .par_iter()
            .map(|&g| evaluate_point(spec, &integ, sweep.axis, *bath, g).map(|(p, _, _)| p))
            .collect();
        curves.push((label.clone(), points?));
    }

    let path = out_path(cfg, "compare.csv");
    write_atomic(&path, labeled_curve_csv(&curves).as_bytes())?;
    manifest.outputs = vec![display(&path)];
    manifest.wall_time_s = start.elapsed().as_secs_f64();
    manifest.write(&out_path(cfg, "manifest.json"))?;
    Ok(CmdOutcome::Ok)
}

fn display(p: &std::path::Path) -> String {
    p.display().to_string()
}
