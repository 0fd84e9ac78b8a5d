// Copyright 2026 QecSim Contributors
// SPDX-License-Identifier: Apache-2.0

//! Repetition protocols: syndrome confirmation and recovery.
//!
//! Protocol A (majority of three): detect twice, act if the syndromes
//! agree; otherwise detect a third time and act on any two that agree; if
//! all three differ, do nothing. Protocol B (conditional repetition):
//! detect once, stop on zero; otherwise detect again and act only when the
//! two syndromes agree.
//!
//! All classical alternatives are enumerated exactly; branches are merged
//! back into one density matrix after the recoveries resolve. The elapsed
//! time charged per step is the dominant branch's (the zero-syndrome
//! path: two detections for A, one for B); the probability-weighted
//! expected time is reported alongside.

use std::collections::BTreeMap;

use crate::measure::BRANCH_FLOOR;
use crate::qstate::DensityMatrix;
use crate::Result;

use super::inject::InjectionPoint;
use super::rounds::{
    bitflip_detection, fq_detection_dephased, fq_detection_path, fq_detection_tree, RoundContext,
};

/// Syndrome-repetition protocol.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum RepetitionProtocol {
    /// Majority vote over up to three detections.
    A,
    /// First-zero short-circuit, accept on two consecutive agreements.
    B,
}

/// Result of one fault-tolerant QEC step.
#[derive(Debug, Clone)]
pub struct QecRoundResult {
    /// Branch-merged, normalized data state.
    pub post_state: DensityMatrix,
    /// Dominant-branch duration (zero-syndrome path).
    pub elapsed: f64,
    /// Probability-weighted duration over all branches.
    pub expected_elapsed: f64,
    /// Syndrome accepted in the most probable branch class.
    pub accepted_syndrome: Option<u16>,
    /// Largest number of syndrome classes alive after any single
    /// detection (at most the code's syndrome count).
    pub branch_count: usize,
}

/// One fault-tolerant QEC step on a normalized data state.
pub fn qec_step(
    ctx: &mut RoundContext,
    state: &DensityMatrix,
    protocol: RepetitionProtocol,
    inj: &[InjectionPoint],
) -> Result<QecRoundResult> {
    if ctx.code.n_qubits() == 3 {
        qec_step_bitflip(ctx, state, protocol, inj)
    } else {
        match protocol {
            RepetitionProtocol::B => qec_step_fivequbit_b(ctx, state, inj),
            RepetitionProtocol::A => qec_step_fivequbit_a(ctx, state, inj),
        }
    }
}

/// Positivity diagnostic on the merged per-step state: a clearly negative
/// eigenvalue means the integrator step is too coarse for the requested
/// noise.
fn check_positivity(state: &DensityMatrix) -> Result<()> {
    let min = state.min_eigenvalue();
    if min < -1e-8 {
        return Err(crate::Error::InvalidState(format!(
            "negative eigenvalue {min:.3e} beyond tolerance"
        )));
    }
    Ok(())
}

/// Terminal branch accumulator keyed by the accepted syndrome (None = no
/// action taken). BTreeMap keeps the merge order deterministic.
struct Terminals {
    groups: BTreeMap<Option<u16>, (f64, DensityMatrix)>,
    expected_time: f64,
    max_live: usize,
}

impl Terminals {
    fn new() -> Self {
        Self {
            groups: BTreeMap::new(),
            expected_time: 0.0,
            max_live: 0,
        }
    }

    fn saw_detection(&mut self, live: usize) {
        self.max_live = self.max_live.max(live);
    }

    fn push(&mut self, accepted: Option<u16>, weight: f64, state: DensityMatrix, time: f64) {
        self.expected_time += weight * time;
        match self.groups.get_mut(&accepted) {
            Some((w, acc)) => {
                *w += weight;
                acc.add_assign(&state.scaled(weight));
            }
            None => {
                self.groups.insert(accepted, (weight, state.scaled(weight)));
            }
        }
    }
}

fn qec_step_bitflip(
    ctx: &mut RoundContext,
    state: &DensityMatrix,
    protocol: RepetitionProtocol,
    inj: &[InjectionPoint],
) -> Result<QecRoundResult> {
    let mut terminals = Terminals::new();
    let (b1, t_det) = bitflip_detection(ctx, state, 0, inj)?;
    terminals.saw_detection(b1.len());
    match protocol {
        RepetitionProtocol::A => {
            for s1 in &b1 {
                let (b2, _) = bitflip_detection(ctx, &s1.state, 1, inj)?;
                terminals.saw_detection(b2.len());
                for s2 in &b2 {
                    let w12 = s1.weight * s2.weight;
                    if s2.syndrome == s1.syndrome {
                        terminals.push(
                            Some(s1.syndrome),
                            w12,
                            s2.state.clone(),
                            2.0 * t_det + ctx.recovery_duration(s1.syndrome)?,
                        );
                        continue;
                    }
                    let (b3, _) = bitflip_detection(ctx, &s2.state, 2, inj)?;
                    terminals.saw_detection(b3.len());
                    for s3 in &b3 {
                        let w = w12 * s3.weight;
                        let accepted = if s3.syndrome == s1.syndrome {
                            Some(s1.syndrome)
                        } else if s3.syndrome == s2.syndrome {
                            Some(s2.syndrome)
                        } else {
                            None
                        };
                        let t_rec = match accepted {
                            Some(s) => ctx.recovery_duration(s)?,
                            None => 0.0,
                        };
                        terminals.push(accepted, w, s3.state.clone(), 3.0 * t_det + t_rec);
                    }
                }
            }
        }
        RepetitionProtocol::B => {
            for s1 in &b1 {
                if s1.syndrome == 0 {
                    terminals.push(Some(0), s1.weight, s1.state.clone(), t_det);
                    continue;
                }
                let (b2, _) = bitflip_detection(ctx, &s1.state, 1, inj)?;
                terminals.saw_detection(b2.len());
                for s2 in &b2 {
                    let w = s1.weight * s2.weight;
                    if s2.syndrome == s1.syndrome {
                        terminals.push(
                            Some(s1.syndrome),
                            w,
                            s2.state.clone(),
                            2.0 * t_det + ctx.recovery_duration(s1.syndrome)?,
                        );
                    } else {
                        terminals.push(None, w, s2.state.clone(), 2.0 * t_det);
                    }
                }
            }
        }
    }
    let elapsed = match protocol {
        RepetitionProtocol::A => 2.0 * t_det,
        RepetitionProtocol::B => t_det,
    };
    finish_step(ctx, terminals, elapsed, inj)
}

/// Applies the grouped recoveries, merges everything, and normalizes.
fn finish_step(
    ctx: &mut RoundContext,
    terminals: Terminals,
    elapsed: f64,
    inj: &[InjectionPoint],
) -> Result<QecRoundResult> {
    let mut post: Option<DensityMatrix> = None;
    let mut best = (0.0f64, None);
    for (accepted, (weight, merged)) in &terminals.groups {
        if *weight > best.0 {
            best = (*weight, *accepted);
        }
        let state = match accepted {
            Some(s) if !ctx.code.recovery_for(*s).is_identity() => {
                ctx.apply_recovery(merged, *s, inj)?.0
            }
            _ => merged.clone(),
        };
        match &mut post {
            None => post = Some(state),
            Some(acc) => acc.add_assign(&state),
        }
    }
    let mut post = post.expect("at least one branch");
    let trace = post.trace().re;
    post = post.scaled(1.0 / trace);
    post.symmetrize();
    check_positivity(&post)?;
    Ok(QecRoundResult {
        post_state: post,
        elapsed,
        expected_elapsed: terminals.expected_time,
        accepted_syndrome: best.1,
        branch_count: terminals.max_live,
    })
}

/// Protocol B for the five-qubit code, organized by linearity: with E_s
/// the syndrome-s detection component, E the unconditional detection map
/// and R_s the table recovery,
///
///   step(rho) = E_0 rho + sum_{s!=0} [ R_s E_s E_s rho + (E - E_s) E_s rho ].
///
/// One resolved tree gives every E_s rho; the second detections need one
/// unconditional run on the summed nonzero branches plus one path-resolved
/// run per syndrome.
fn qec_step_fivequbit_b(
    ctx: &mut RoundContext,
    state: &DensityMatrix,
    inj: &[InjectionPoint],
) -> Result<QecRoundResult> {
    let t_det = ctx.detection_duration()?;
    let tree = fq_detection_tree(ctx, state, 0, inj)?;
    let live = tree
        .iter()
        .filter(|b| b.trace().re > BRANCH_FLOOR)
        .count();
    let branch_count = live;
    let w0 = tree[0].trace().re;
    let mut expected_time = w0 * t_det;

    let mut out = tree[0].clone();
    let mut nonzero_sum: Option<DensityMatrix> = None;
    for rho in tree.iter().skip(1) {
        match &mut nonzero_sum {
            None => nonzero_sum = Some(rho.clone()),
            Some(acc) => acc.add_assign(rho),
        }
    }
    let nonzero_sum = nonzero_sum.expect("syndrome tree has 16 entries");
    let mut best = (w0, Some(0u16));

    if nonzero_sum.trace().re > BRANCH_FLOOR {
        // Disagreeing second detections take no action: E(sum) - sum_s E_s.
        let mut disagree = fq_detection_dephased(ctx, &nonzero_sum, 1, inj)?;
        for (s, rho_s) in tree.iter().enumerate().skip(1) {
            let w_s = rho_s.trace().re;
            if w_s <= BRANCH_FLOOR {
                continue;
            }
            let agreed = fq_detection_path(ctx, rho_s, s as u16, 1, inj)?;
            let w_agree = agreed.trace().re;
            let t_rec = ctx.recovery_duration(s as u16)?;
            expected_time += w_s * 2.0 * t_det + w_agree * t_rec;
            if w_agree > best.0 {
                best = (w_agree, Some(s as u16));
            }
            // Subtract the agreeing component from the unconditional run...
            disagree.add_assign(&agreed.scaled(-1.0));
            // ...and push it through its recovery.
            let (recovered, _) = ctx.apply_recovery(&agreed, s as u16, inj)?;
            out.add_assign(&recovered);
        }
        out.add_assign(&disagree);
    }

    let trace = out.trace().re;
    let mut post = out.scaled(1.0 / trace);
    post.symmetrize();
    check_positivity(&post)?;
    Ok(QecRoundResult {
        post_state: post,
        elapsed: t_det,
        expected_elapsed: expected_time,
        accepted_syndrome: best.1,
        branch_count,
    })
}

/// Protocol A for the five-qubit code: exact majority-vote enumeration.
/// The third detection uses the accept-set linearity (only the two seen
/// syndromes need resolving). This path is exponentially branchier than
/// protocol B and is priced accordingly; the production experiments use B
/// for this code.
fn qec_step_fivequbit_a(
    ctx: &mut RoundContext,
    state: &DensityMatrix,
    inj: &[InjectionPoint],
) -> Result<QecRoundResult> {
    let t_det = ctx.detection_duration()?;
    let tree1 = fq_detection_tree(ctx, state, 0, inj)?;
    let mut out: Option<DensityMatrix> = None;
    let mut expected_time = 0.0;
    let mut branch_count = tree1
        .iter()
        .filter(|b| b.trace().re > BRANCH_FLOOR)
        .count();
    let mut best: (f64, Option<u16>) = (0.0, None);

    let add_out = |acc: &mut Option<DensityMatrix>, rho: DensityMatrix| match acc {
        None => *acc = Some(rho),
        Some(a) => a.add_assign(&rho),
    };

    for (s1, rho1) in tree1.iter().enumerate() {
        if rho1.trace().re <= BRANCH_FLOOR {
            continue;
        }
        let tree2 = fq_detection_tree(ctx, rho1, 1, inj)?;
        branch_count = branch_count.max(
            tree2
                .iter()
                .filter(|b| b.trace().re > BRANCH_FLOOR)
                .count(),
        );
        for (s2, rho2) in tree2.iter().enumerate() {
            let w2 = rho2.trace().re;
            if w2 <= BRANCH_FLOOR {
                continue;
            }
            if s2 == s1 {
                let t_rec = ctx.recovery_duration(s1 as u16)?;
                expected_time += w2 * (2.0 * t_det + t_rec);
                if w2 > best.0 {
                    best = (w2, Some(s1 as u16));
                }
                let (recovered, _) = ctx.apply_recovery(rho2, s1 as u16, inj)?;
                add_out(&mut out, recovered);
                continue;
            }
            // Third detection: resolve only the two candidate syndromes.
            let e3_s1 = fq_detection_path(ctx, rho2, s1 as u16, 2, inj)?;
            let e3_s2 = fq_detection_path(ctx, rho2, s2 as u16, 2, inj)?;
            let mut rest = fq_detection_dephased(ctx, rho2, 2, inj)?;
            rest.add_assign(&e3_s1.scaled(-1.0));
            rest.add_assign(&e3_s2.scaled(-1.0));
            let t_rec1 = ctx.recovery_duration(s1 as u16)?;
            let t_rec2 = ctx.recovery_duration(s2 as u16)?;
            expected_time += e3_s1.trace().re * (3.0 * t_det + t_rec1)
                + e3_s2.trace().re * (3.0 * t_det + t_rec2)
                + rest.trace().re * 3.0 * t_det;
            let (r1, _) = ctx.apply_recovery(&e3_s1, s1 as u16, inj)?;
            let (r2, _) = ctx.apply_recovery(&e3_s2, s2 as u16, inj)?;
            add_out(&mut out, r1);
            add_out(&mut out, r2);
            add_out(&mut out, rest);
        }
    }
    let out = out.expect("live branches exist");
    let trace = out.trace().re;
    let mut post = out.scaled(1.0 / trace);
    post.symmetrize();
    check_positivity(&post)?;
    Ok(QecRoundResult {
        post_state: post,
        elapsed: 2.0 * t_det,
        expected_elapsed: expected_time,
        accepted_syndrome: best.1,
        branch_count,
    })
}
