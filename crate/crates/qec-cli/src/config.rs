// Copyright 2026 QecSim Contributors
// SPDX-License-Identifier: Apache-2.0

//! Run configuration: a single TOML file with every knob, validated
//! against the library's preconditions before any simulation starts.
//! Unknown keys are rejected.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use serde::{Deserialize, Serialize};

use qec_core::analysis::NoiseAxis;
use qec_core::ftqec::{ExperimentKind, ExperimentSpec, InitialLogical, RepetitionProtocol, TauMode};
use qec_core::propagator::{BathKind, IntegratorConfig, IntegratorMethod, NoiseModel};
use qec_core::pulses::ParallelismLevel;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub experiment: ExperimentSection,
    pub noise: NoiseSection,
    #[serde(default)]
    pub integrator: IntegratorSection,
    #[serde(default)]
    pub threshold: ThresholdSection,
    #[serde(default)]
    pub output: OutputSection,
    #[serde(default)]
    pub run: RunSection,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSection {
    pub code: String,
    pub kind: ExperimentKind,
    #[serde(default = "default_protocol")]
    pub protocol: RepetitionProtocol,
    #[serde(default = "default_level")]
    pub parallelism: ParallelismLevel,
    #[serde(default = "default_bath")]
    pub bath: BathKind,
    #[serde(default)]
    pub povm_eta: f64,
    #[serde(default = "default_steps")]
    pub n_steps: usize,
    #[serde(default = "default_early_stop")]
    pub early_stop_pc: f64,
    #[serde(default = "default_tau_mode")]
    pub tau_mode: TauMode,
    /// Defaults per code: |0> for the bit-flip code, the averaged logical
    /// state for the five-qubit code.
    #[serde(default)]
    pub initial: Option<InitialLogical>,
    #[serde(default = "default_floor")]
    pub acceptance_floor: f64,
    /// The bit-flip code corrects no phase errors; gamma0 > 0 is rejected
    /// for it unless this is set.
    #[serde(default)]
    pub allow_gamma0: bool,
}

fn default_protocol() -> RepetitionProtocol {
    RepetitionProtocol::A
}
fn default_level() -> ParallelismLevel {
    ParallelismLevel::Sequential
}
fn default_bath() -> BathKind {
    BathKind::Distinct
}
fn default_steps() -> usize {
    10
}
fn default_early_stop() -> f64 {
    0.4
}
fn default_tau_mode() -> TauMode {
    TauMode::DominantBranch
}
fn default_floor() -> f64 {
    0.05
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseSection {
    #[serde(default)]
    pub gamma0: f64,
    #[serde(default)]
    pub gamma1: f64,
    #[serde(default)]
    pub sweep: Option<SweepSection>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    pub axis: NoiseAxis,
    pub start: f64,
    pub stop: f64,
    pub points: usize,
}

impl SweepSection {
    /// Log-spaced grid from start to stop inclusive.
    pub fn grid(&self) -> Vec<f64> {
        let n = self.points.max(2);
        (0..n)
            .map(|k| {
                (self.start.ln()
                    + (self.stop.ln() - self.start.ln()) * k as f64 / (n - 1) as f64)
                    .exp()
            })
            .collect()
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntegratorSection {
    #[serde(default = "default_method")]
    pub method: IntegratorMethod,
    #[serde(default = "default_dt")]
    pub dt: f64,
    #[serde(default = "default_trace_tol")]
    pub trace_tol: f64,
    #[serde(default = "default_herm_tol")]
    pub herm_tol: f64,
}

fn default_method() -> IntegratorMethod {
    IntegratorMethod::Split4
}
fn default_dt() -> f64 {
    0.05
}
fn default_trace_tol() -> f64 {
    1e-9
}
fn default_herm_tol() -> f64 {
    1e-12
}

impl Default for IntegratorSection {
    fn default() -> Self {
        Self {
            method: default_method(),
            dt: default_dt(),
            trace_tol: default_trace_tol(),
            herm_tol: default_herm_tol(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ThresholdSection {
    #[serde(default = "default_rel_tol")]
    pub rel_tol: f64,
    #[serde(default = "default_bisections")]
    pub max_bisections: usize,
}

fn default_rel_tol() -> f64 {
    0.02
}
fn default_bisections() -> usize {
    24
}

impl Default for ThresholdSection {
    fn default() -> Self {
        Self {
            rel_tol: default_rel_tol(),
            max_bisections: default_bisections(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    #[serde(default = "default_dir")]
    pub dir: PathBuf,
    #[serde(default = "default_prefix")]
    pub prefix: String,
}

fn default_dir() -> PathBuf {
    PathBuf::from("out")
}
fn default_prefix() -> String {
    "qec".to_string()
}

impl Default for OutputSection {
    fn default() -> Self {
        Self {
            dir: default_dir(),
            prefix: default_prefix(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct RunSection {
    /// Worker threads for sweep points; 0 uses every core.
    #[serde(default)]
    pub workers: usize,
}

impl RunConfig {
    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        let cfg: RunConfig = toml::from_str(&text).context("parsing config")?;
        Ok(cfg)
    }

    /// Checks every cross-field constraint the library would reject later.
    pub fn validate(&self) -> anyhow::Result<()> {
        self.experiment_spec().map(|_| ())?;
        self.integrator_config().validate()?;
        // Physically inconsistent: bit-flip code with diagonal noise.
        let bitflip = self.experiment.code == "bit-flip-3";
        let has_gamma0 = match &self.noise.sweep {
            Some(s) => matches!(s.axis, NoiseAxis::ZErrors | NoiseAxis::Both),
            None => self.noise.gamma0 > 0.0,
        };
        if bitflip && has_gamma0 && !self.experiment.allow_gamma0 {
            bail!(
                "the bit-flip code corrects no phase errors; set experiment.allow_gamma0 = true \
                 to sweep gamma0 anyway"
            );
        }
        if let Some(s) = &self.noise.sweep {
            if s.start <= 0.0 || s.stop <= s.start || s.points < 2 {
                bail!("sweep needs 0 < start < stop and at least 2 points");
            }
        } else {
            NoiseModel::new(self.noise.gamma0, self.noise.gamma1, self.experiment.bath)?;
        }
        if !(0.0..=0.5).contains(&self.experiment.povm_eta) {
            bail!("povm_eta must lie in [0, 0.5]");
        }
        Ok(())
    }

    pub fn experiment_spec(&self) -> anyhow::Result<ExperimentSpec> {
        let initial = self.experiment.initial.unwrap_or({
            if self.experiment.code == "five-qubit" {
                InitialLogical::Average
            } else {
                InitialLogical::Zero
            }
        });
        let spec = ExperimentSpec {
            code: self.experiment.code.clone(),
            kind: self.experiment.kind,
            protocol: self.experiment.protocol,
            level: self.experiment.parallelism,
            povm_eta: self.experiment.povm_eta,
            n_steps: self.experiment.n_steps,
            early_stop_pc: self.experiment.early_stop_pc,
            tau_mode: self.experiment.tau_mode,
            initial,
            acceptance_floor: self.experiment.acceptance_floor,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn integrator_config(&self) -> IntegratorConfig {
        IntegratorConfig {
            method: self.integrator.method,
            dt: self.integrator.dt,
            trace_tol: self.integrator.trace_tol,
            herm_tol: self.integrator.herm_tol,
        }
    }

    pub fn single_noise(&self) -> anyhow::Result<NoiseModel> {
        if self.noise.sweep.is_some() {
            bail!("this command takes a single noise point, not a sweep");
        }
        Ok(NoiseModel::new(
            self.noise.gamma0,
            self.noise.gamma1,
            self.experiment.bath,
        )?)
    }
}
