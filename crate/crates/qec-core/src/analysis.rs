// Copyright 2026 QecSim Contributors
// SPDX-License-Identifier: Apache-2.0

//! Crash-rate fitting and noise-threshold location.
//!
//! Crash series follow P_c(n) = (1 - e^{-2 Gamma_n n})/2, which linearizes
//! exactly: y = -ln(1 - 2 P_c)/2 = Gamma_n n. The fit is a least-squares
//! regression of y on n through the origin (P_c(0) = 0 holds by ideal
//! encoding), with the residual reported in linearized space and
//! Gamma_t = Gamma_n / tau.
//!
//! A threshold is the noise strength where the encoded crash rate crosses
//! the bare physical qubit's rate computed through the identical pipeline:
//! per unit time for quantum memory, per computational step for gate
//! experiments. The crossing is bracketed on a log grid, interpolated in
//! log-log space, and refined by bisection.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ftqec::{
    bare_crash_series, run_crash_experiment, ExperimentKind, ExperimentRun, ExperimentSpec,
};
use crate::propagator::{BathKind, IntegratorConfig, NoiseModel};
use crate::{Error, Result};

/// One crash-probability sample.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CrashSample {
    /// Computational step index (1-based).
    pub n: usize,
    /// Elapsed time n * tau.
    pub t: f64,
    pub p_c: f64,
}

/// A crash-probability series with its per-step duration.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CrashSeries {
    samples: Vec<CrashSample>,
    tau: f64,
}

impl CrashSeries {
    pub fn new(samples: Vec<CrashSample>, tau: f64) -> Result<Self> {
        let mut last_n = 0usize;
        for s in &samples {
            if s.n <= last_n {
                return Err(Error::InvalidState(format!(
                    "step indices must increase strictly, got {} after {last_n}",
                    s.n
                )));
            }
            last_n = s.n;
            if !(-1e-12..=0.5 + 1e-6).contains(&s.p_c) {
                return Err(Error::InvalidState(format!(
                    "crash probability {} outside [0, 1/2]",
                    s.p_c
                )));
            }
            if (s.t - s.n as f64 * tau).abs() > 1e-9 * s.t.abs().max(1.0) {
                return Err(Error::InvalidState(format!(
                    "sample time {} != n tau = {}",
                    s.t,
                    s.n as f64 * tau
                )));
            }
        }
        Ok(Self { samples, tau })
    }

    pub fn samples(&self) -> &[CrashSample] {
        &self.samples
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    /// Synthetic series from the exact exponential form, for tests and
    /// fit-consistency checks.
    pub fn synthetic(gamma_n: f64, tau: f64, n_steps: usize) -> Self {
        let samples = (1..=n_steps)
            .map(|n| CrashSample {
                n,
                t: n as f64 * tau,
                p_c: 0.5 * (1.0 - (-2.0 * gamma_n * n as f64).exp()),
            })
            .collect();
        Self { samples, tau }
    }
}

/// Fitted crash rate constants.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct RateFit {
    /// Per computational step.
    pub gamma_n: f64,
    /// Per unit time: gamma_n / tau.
    pub gamma_t: f64,
    /// RMS residual in the linearized space.
    pub residual: f64,
}

/// Least-squares fit of the exponential crash law via its exact
/// linearization, constrained through the origin.
pub fn fit_crash_rate(series: &CrashSeries) -> Result<RateFit> {
    let samples = series.samples();
    if samples.len() < 3 {
        return Err(Error::TooFewSamples(samples.len()));
    }
    for (i, w) in samples.windows(2).enumerate() {
        if w[1].p_c < w[0].p_c - 1e-7 {
            return Err(Error::NonMonotoneSeries {
                n: samples[i + 1].n,
                drop: w[0].p_c - w[1].p_c,
            });
        }
    }
    let mut num = 0.0f64;
    let mut den = 0.0f64;
    let mut ys = Vec::with_capacity(samples.len());
    for s in samples {
        if s.p_c >= 0.5 {
            return Err(Error::FitDomain(s.p_c));
        }
        let p = s.p_c.max(0.0);
        let y = -0.5 * (1.0 - 2.0 * p).ln();
        ys.push((s.n as f64, y));
        num += s.n as f64 * y;
        den += (s.n as f64) * (s.n as f64);
    }
    let gamma_n = num / den;
    let residual = (ys
        .iter()
        .map(|(n, y)| (y - gamma_n * n) * (y - gamma_n * n))
        .sum::<f64>()
        / ys.len() as f64)
        .sqrt();
    Ok(RateFit {
        gamma_n,
        gamma_t: gamma_n / series.tau(),
        residual,
    })
}

/// Which noise strengths a sweep varies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NoiseAxis {
    /// gamma1 = gamma, gamma0 = 0 (bit-flip errors).
    XErrors,
    /// gamma0 = gamma, gamma1 = 0 (phase errors).
    ZErrors,
    /// gamma0 = gamma1 = gamma.
    Both,
}

impl NoiseAxis {
    pub fn noise(&self, gamma: f64, bath: BathKind) -> Result<NoiseModel> {
        match self {
            NoiseAxis::XErrors => NoiseModel::new(0.0, gamma, bath),
            NoiseAxis::ZErrors => NoiseModel::new(gamma, 0.0, bath),
            NoiseAxis::Both => NoiseModel::new(gamma, gamma, bath),
        }
    }
}

/// Which rate the threshold comparison uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RateBasis {
    PerTime,
    PerStep,
}

impl RateBasis {
    pub fn for_kind(kind: ExperimentKind) -> Self {
        match kind {
            ExperimentKind::Memory => RateBasis::PerTime,
            ExperimentKind::LogicalX => RateBasis::PerStep,
        }
    }

    fn pick(&self, fit: &RateFit) -> f64 {
        match self {
            RateBasis::PerTime => fit.gamma_t,
            RateBasis::PerStep => fit.gamma_n,
        }
    }
}

/// One evaluated sweep point of the encoded system.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct CurvePoint {
    pub gamma: f64,
    pub gamma_n: f64,
    pub gamma_t: f64,
    pub residual: f64,
    /// Largest per-step classical branch count seen in the run.
    pub branch_count: usize,
}

/// Threshold-scan outcome: the located crossing, its final bracket, the
/// encoded curve, and the bare baseline at every evaluated gamma.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ThresholdResult {
    pub gamma_star: f64,
    pub bracket: (f64, f64),
    /// Every evaluated noise strength, ascending.
    pub grid: Vec<f64>,
    pub curve: Vec<CurvePoint>,
    /// (gamma, bare rate) in the comparison basis.
    pub bare: Vec<(f64, f64)>,
    pub basis: RateBasis,
}

/// Scan refinement parameters.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ScanConfig {
    /// Bisect until the bracket is this tight relatively.
    pub rel_tol: f64,
    pub max_bisections: usize,
}

impl Default for ScanConfig {
    fn default() -> Self {
        Self {
            rel_tol: 0.02,
            max_bisections: 24,
        }
    }
}

/// Evaluates one sweep point: encoded run + bare baseline, both fitted.
pub fn evaluate_point(
    spec: &ExperimentSpec,
    cfg: &IntegratorConfig,
    axis: NoiseAxis,
    bath: BathKind,
    gamma: f64,
) -> Result<(CurvePoint, f64, ExperimentRun)> {
    let noise = axis.noise(gamma, bath)?;
    let run = run_crash_experiment(spec, &noise, cfg)?;
    let fit = fit_crash_rate(&run.series)?;
    let bare_series = bare_crash_series(
        spec.kind,
        &noise,
        cfg,
        &spec.initial.state(),
        spec.n_steps.max(3),
        run.tau,
    )?;
    let bare_fit = fit_crash_rate(&bare_series)?;
    let basis = RateBasis::for_kind(spec.kind);
    let point = CurvePoint {
        gamma,
        gamma_n: fit.gamma_n,
        gamma_t: fit.gamma_t,
        residual: fit.residual,
        branch_count: run.branch_counts.iter().copied().max().unwrap_or(0),
    };
    Ok((point, basis.pick(&bare_fit), run))
}

fn rate_of(point: &CurvePoint, basis: RateBasis) -> f64 {
    match basis {
        RateBasis::PerTime => point.gamma_t,
        RateBasis::PerStep => point.gamma_n,
    }
}

/// Scans a log-spaced noise grid, brackets the first crossing of the
/// encoded rate over the bare baseline, and refines it by bisection in
/// log space to the configured relative tolerance.
pub fn threshold_scan(
    spec: &ExperimentSpec,
    cfg: &IntegratorConfig,
    axis: NoiseAxis,
    bath: BathKind,
    grid: &[f64],
    scan: &ScanConfig,
) -> Result<ThresholdResult> {
    if grid.len() < 5 {
        return Err(Error::GridTooSmall {
            need: 5,
            got: grid.len(),
        });
    }
    let lo = grid.first().copied().unwrap();
    let hi = grid.last().copied().unwrap();
    if lo <= 0.0 || hi / lo < 10.0 - 1e-9 {
        return Err(Error::InvalidConfig(
            "noise grid must be positive and span at least a decade".into(),
        ));
    }
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidConfig("noise grid must increase".into()));
    }

    let basis = RateBasis::for_kind(spec.kind);
    // Grid points are independent; evaluate them concurrently and collect
    // in grid order so concurrency never changes the output.
    let evaluated: Result<Vec<(CurvePoint, f64)>> = grid
        .par_iter()
        .map(|&g| evaluate_point(spec, cfg, axis, bath, g).map(|(p, b, _)| (p, b)))
        .collect();
    let mut evaluated = evaluated?;

    let excess = |p: &CurvePoint, bare: f64| -> f64 {
        rate_of(p, basis).max(1e-300).ln() - bare.max(1e-300).ln()
    };

    let mut bracket: Option<((f64, f64), (f64, f64))> = None;
    for w in evaluated.windows(2) {
        let d0 = excess(&w[0].0, w[0].1);
        let d1 = excess(&w[1].0, w[1].1);
        if d0 <= 0.0 && d1 > 0.0 {
            bracket = Some(((w[0].0.gamma, d0), (w[1].0.gamma, d1)));
            break;
        }
    }
    let (mut lo_pt, mut hi_pt) = bracket.ok_or(Error::NoCrossing)?;

    for _ in 0..scan.max_bisections {
        if hi_pt.0 / lo_pt.0 - 1.0 <= scan.rel_tol {
            break;
        }
        let mid = (0.5 * (lo_pt.0.ln() + hi_pt.0.ln())).exp();
        let (point, bare, _) = evaluate_point(spec, cfg, axis, bath, mid)?;
        let d = excess(&point, bare);
        evaluated.push((point, bare));
        if d <= 0.0 {
            lo_pt = (mid, d);
        } else {
            hi_pt = (mid, d);
        }
    }

    // Log-log interpolation inside the final bracket.
    let gamma_star = if (hi_pt.1 - lo_pt.1).abs() > 1e-300 {
        (lo_pt.0.ln() + (0.0 - lo_pt.1) * (hi_pt.0.ln() - lo_pt.0.ln()) / (hi_pt.1 - lo_pt.1))
            .exp()
    } else {
        (lo_pt.0 * hi_pt.0).sqrt()
    };

    evaluated.sort_by(|a, b| a.0.gamma.partial_cmp(&b.0.gamma).unwrap());
    let grid_out = evaluated.iter().map(|(p, _)| p.gamma).collect();
    let bare = evaluated.iter().map(|(p, b)| (p.gamma, *b)).collect();
    let curve = evaluated.into_iter().map(|(p, _)| p).collect();
    Ok(ThresholdResult {
        gamma_star,
        bracket: (lo_pt.0, hi_pt.0),
        grid: grid_out,
        curve,
        bare,
        basis,
    })
}

/// Evaluates the per-step crash-rate curve for both bath topologies over
/// the same grid (the collective/distinct comparison).
pub fn compare_baths(
    spec: &ExperimentSpec,
    cfg: &IntegratorConfig,
    axis: NoiseAxis,
    grid: &[f64],
) -> Result<(Vec<CurvePoint>, Vec<CurvePoint>)> {
    let eval = |bath: BathKind| -> Result<Vec<CurvePoint>> {
        grid.par_iter()
            .map(|&g| evaluate_point(spec, cfg, axis, bath, g).map(|(p, _, _)| p))
            .collect()
    };
    Ok((eval(BathKind::Distinct)?, eval(BathKind::Collective)?))
}

/// Least-squares slope of ln(y) against ln(x).
pub fn log_log_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let (mut sx, mut sy, mut sxx, mut sxy) = (0.0, 0.0, 0.0, 0.0);
    for &(x, y) in points {
        let lx = x.ln();
        let ly = y.ln();
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    (n * sxy - sx * sy) / (n * sxx - sx * sx)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn fit_recovers_exact_synthetic_series() {
        let series = CrashSeries::synthetic(1e-3, 2.0, 10);
        let fit = fit_crash_rate(&series).unwrap();
        assert_abs_diff_eq!(fit.gamma_n, 1e-3, epsilon = 1e-9);
        assert_abs_diff_eq!(fit.gamma_t, 5e-4, epsilon = 1e-9);
        assert!(fit.residual < 1e-12);
    }

    #[test]
    fn fit_of_all_zero_series_is_zero() {
        let samples = (1..=5)
            .map(|n| CrashSample {
                n,
                t: n as f64,
                p_c: 0.0,
            })
            .collect();
        let series = CrashSeries::new(samples, 1.0).unwrap();
        let fit = fit_crash_rate(&series).unwrap();
        assert_eq!(fit.gamma_n, 0.0);
        assert_eq!(fit.gamma_t, 0.0);
    }

    #[test]
    fn fit_is_a_fixed_point() {
        // Fitting a series generated by the fitted parameters returns them.
        let series = CrashSeries::synthetic(0.031, 7.5, 8);
        let fit = fit_crash_rate(&series).unwrap();
        let regen = CrashSeries::synthetic(fit.gamma_n, 7.5, 8);
        let refit = fit_crash_rate(&regen).unwrap();
        assert_abs_diff_eq!(refit.gamma_n, fit.gamma_n, epsilon = 1e-9);
    }

    #[test]
    fn tau_scale_covariance() {
        // Doubling tau halves gamma_t exactly and leaves gamma_n unchanged.
        let a = fit_crash_rate(&CrashSeries::synthetic(2e-3, 1.0, 6)).unwrap();
        let b = fit_crash_rate(&CrashSeries::synthetic(2e-3, 2.0, 6)).unwrap();
        assert_abs_diff_eq!(a.gamma_n, b.gamma_n, epsilon = 0.0);
        assert_abs_diff_eq!(a.gamma_t, 2.0 * b.gamma_t, epsilon = 1e-18);
    }

    #[test]
    fn fit_rejects_undefined_linearization() {
        let samples = vec![
            CrashSample { n: 1, t: 1.0, p_c: 0.2 },
            CrashSample { n: 2, t: 2.0, p_c: 0.4 },
            CrashSample { n: 3, t: 3.0, p_c: 0.5 + 5e-7 },
        ];
        let series = CrashSeries::new(samples, 1.0).unwrap();
        assert!(matches!(fit_crash_rate(&series), Err(Error::FitDomain(_))));
    }

    #[test]
    fn fit_rejects_non_monotone_series() {
        let samples = vec![
            CrashSample { n: 1, t: 1.0, p_c: 0.10 },
            CrashSample { n: 2, t: 2.0, p_c: 0.02 },
            CrashSample { n: 3, t: 3.0, p_c: 0.15 },
        ];
        let series = CrashSeries::new(samples, 1.0).unwrap();
        assert!(matches!(
            fit_crash_rate(&series),
            Err(Error::NonMonotoneSeries { .. })
        ));
    }

    #[test]
    fn fit_requires_three_samples() {
        let series = CrashSeries::synthetic(1e-3, 1.0, 2);
        assert!(matches!(
            fit_crash_rate(&series),
            Err(Error::TooFewSamples(2))
        ));
    }

    #[test]
    fn series_validation() {
        // Decreasing step index rejected.
        let bad = vec![
            CrashSample { n: 2, t: 2.0, p_c: 0.0 },
            CrashSample { n: 1, t: 1.0, p_c: 0.0 },
        ];
        assert!(CrashSeries::new(bad, 1.0).is_err());
        // Time inconsistent with n tau rejected.
        let bad = vec![CrashSample { n: 1, t: 1.5, p_c: 0.0 }];
        assert!(CrashSeries::new(bad, 1.0).is_err());
    }

    #[test]
    fn log_log_slope_of_power_law() {
        let pts: Vec<(f64, f64)> = (1..=10)
            .map(|k| {
                let x = 1e-3 * 2f64.powi(k);
                (x, 7.3 * x * x)
            })
            .collect();
        assert_abs_diff_eq!(log_log_slope(&pts), 2.0, epsilon = 1e-12);
    }

    #[test]
    fn synthetic_threshold_crossing() {
        // Encoded rate c g^2 against bare rate g crosses at g* = 1/c:
        // the log-log interpolation that threshold_scan uses recovers it
        // exactly because both curves are straight lines in log space.
        let c = 50.0;
        let grid: Vec<f64> = (0..8).map(|k| 1e-3 * 10f64.powf(k as f64 / 3.0)).collect();
        let mut crossing = None;
        for w in grid.windows(2) {
            let d0 = (c * w[0] * w[0]).ln() - w[0].ln();
            let d1 = (c * w[1] * w[1]).ln() - w[1].ln();
            if d0 <= 0.0 && d1 > 0.0 {
                let g = (w[0].ln() + (0.0 - d0) * (w[1].ln() - w[0].ln()) / (d1 - d0)).exp();
                crossing = Some(g);
            }
        }
        let g_star = crossing.expect("crossing in grid");
        assert_abs_diff_eq!(g_star, 1.0 / c, epsilon = 1e-9);
    }
}
