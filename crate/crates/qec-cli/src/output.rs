// Copyright 2026 QecSim Contributors
// SPDX-License-Identifier: Apache-2.0

//! Result files: CSV curves and series, JSON results, and the run
//! manifest. Every file is written atomically (temp + rename) and numbers
//! are formatted with 9 significant digits so reruns are byte-identical.

use std::path::{Path, PathBuf};

use anyhow::Context;
use serde::Serialize;

use qec_core::analysis::{CrashSeries, CurvePoint, RateFit};

use crate::config::RunConfig;

/// Scientific notation with 9 significant digits, '.' decimal separator.
pub fn fmt_sci(x: f64) -> String {
    format!("{x:.8e}")
}

pub fn write_atomic(path: &Path, bytes: &[u8]) -> anyhow::Result<()> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir)
            .with_context(|| format!("creating {}", dir.display()))?;
    }
    let tmp = path.with_extension("tmp");
    std::fs::write(&tmp, bytes).with_context(|| format!("writing {}", tmp.display()))?;
    std::fs::rename(&tmp, path).with_context(|| format!("renaming to {}", path.display()))?;
    Ok(())
}

pub fn series_csv(rows: &[(f64, &CrashSeries)]) -> String {
    let mut out = String::from("gamma,n,t,p_c\n");
    for (gamma, series) in rows {
        for s in series.samples() {
            out.push_str(&format!(
                "{},{},{},{}\n",
                fmt_sci(*gamma),
                s.n,
                fmt_sci(s.t),
                fmt_sci(s.p_c)
            ));
        }
    }
    out
}

pub fn curve_csv(points: &[CurvePoint]) -> String {
    let mut out = String::from("gamma,Gamma_n,Gamma_t,residual,branch_count\n");
    for p in points {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            fmt_sci(p.gamma),
            fmt_sci(p.gamma_n),
            fmt_sci(p.gamma_t),
            fmt_sci(p.residual),
            p.branch_count
        ));
    }
    out
}

pub fn labeled_curve_csv(curves: &[(String, Vec<CurvePoint>)]) -> String {
    let mut out = String::from("label,gamma,Gamma_n,Gamma_t,residual,branch_count\n");
    for (label, points) in curves {
        for p in points {
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                label,
                fmt_sci(p.gamma),
                fmt_sci(p.gamma_n),
                fmt_sci(p.gamma_t),
                fmt_sci(p.residual),
                p.branch_count
            ));
        }
    }
    out
}

#[derive(Serialize)]
pub struct FitRecord {
    pub gamma: f64,
    pub tau: f64,
    pub fit: RateFit,
}

/// Per-point diagnostics recorded in the manifest.
#[derive(Serialize, Clone)]
pub struct PointDiagnostics {
    pub gamma: f64,
    pub tau: f64,
    pub expected_step_time: f64,
    pub max_branch_count: usize,
}

/// Reproducibility metadata written next to every output file. The wall
/// time is informational; everything else is a pure function of the
/// configuration.
#[derive(Serialize)]
pub struct RunManifest<'a> {
    pub artifact: &'static str,
    pub artifact_version: &'static str,
    pub command: String,
    pub config: &'a RunConfig,
    pub outputs: Vec<String>,
    pub points: Vec<PointDiagnostics>,
    pub wall_time_s: f64,
}

impl<'a> RunManifest<'a> {
    pub fn new(command: &str, config: &'a RunConfig) -> Self {
        Self {
            artifact: "qec-sim",
            artifact_version: env!("CARGO_PKG_VERSION"),
            command: command.to_string(),
            config,
            outputs: Vec::new(),
            points: Vec::new(),
            wall_time_s: 0.0,
        }
    }

    pub fn write(&self, path: &Path) -> anyhow::Result<()> {
        let json = serde_json::to_string_pretty(self).context("serializing manifest")?;
        write_atomic(path, json.as_bytes())
    }
}

pub fn out_path(cfg: &RunConfig, suffix: &str) -> PathBuf {
    cfg.output.dir.join(format!("{}_{suffix}", cfg.output.prefix))
}
