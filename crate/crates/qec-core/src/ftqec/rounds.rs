// Copyright 2026 QecSim Contributors
// SPDX-License-Identifier: Apache-2.0

//! Execution of syndrome-detection rounds.
//!
//! Branch states are carried unnormalized (weight = trace), which makes
//! every map here linear and lets the protocol layer merge, subtract and
//! recombine branches freely. Ancillas are freshly prepared for every
//! detection and traced out after their measurement, so the simulated
//! register never exceeds data + 4 ancilla qubits.

use std::collections::HashMap;
use std::rc::Rc;

use crate::codes::StabilizerCode;
use crate::measure::{project_qubit, PovmError, BRANCH_FLOOR};
use crate::propagator::{IntegratorConfig, NoiseModel, Propagator};
use crate::pulses::{
    schedule_circuit, Circuit, ParallelismLevel, PulseLayer, PulseSchedule, ScheduleItem,
};
use crate::qstate::{DensityMatrix, PauliString};
use crate::{Error, Result};

use super::circuits;
use super::inject::{FaultSite, InjectionPoint};

/// A compiled, measurement-terminal circuit segment: pulse layers, then
/// the measured qubits in order.
#[derive(Debug, Clone)]
pub(crate) struct CompiledSegment {
    pub layers: Vec<PulseLayer>,
    pub measured: Vec<usize>,
    pub duration: f64,
    pub n_qubits: usize,
}

fn compile_segment(circuit: &Circuit, level: ParallelismLevel) -> Result<CompiledSegment> {
    let sched: PulseSchedule = schedule_circuit(circuit, level)?;
    let mut layers = Vec::new();
    let mut measured = Vec::new();
    for item in sched.items() {
        match item {
            ScheduleItem::Pulse(l) => {
                if !measured.is_empty() {
                    return Err(Error::InvalidLayer(
                        "pulse layer after measurement marker in terminal segment".into(),
                    ));
                }
                layers.push(l.clone());
            }
            ScheduleItem::Measure { qubit } => measured.push(*qubit),
        }
    }
    Ok(CompiledSegment {
        duration: sched.total_duration(),
        layers,
        measured,
        n_qubits: sched.n_qubits(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum SegKey {
    BitflipDetection,
    CatPrep,
    FqRound(usize),
    Recovery(u16),
    LogicalX,
}

/// A freshly verified cat state: the accepted 4-qubit state, the
/// acceptance probability, and the preparation duration.
#[derive(Debug, Clone)]
pub struct CatResource {
    pub state: DensityMatrix,
    pub acceptance: f64,
    pub duration: f64,
}

/// Shared execution context for one (code, level, noise, POVM) setting.
pub struct RoundContext {
    pub code: StabilizerCode,
    pub level: ParallelismLevel,
    pub povm: PovmError,
    pub noise: NoiseModel,
    pub cfg: IntegratorConfig,
    /// Abort when the cat-verification acceptance drops below this.
    pub acceptance_floor: f64,
    props: HashMap<usize, Propagator>,
    segments: HashMap<SegKey, Rc<CompiledSegment>>,
    cat: Option<CatResource>,
    clean_cat: Option<DensityMatrix>,
}

impl RoundContext {
    pub fn new(
        code: StabilizerCode,
        level: ParallelismLevel,
        povm: PovmError,
        noise: NoiseModel,
        cfg: IntegratorConfig,
    ) -> Self {
        Self {
            code,
            level,
            povm,
            noise,
            cfg,
            acceptance_floor: 0.05,
            props: HashMap::new(),
            segments: HashMap::new(),
            cat: None,
            clean_cat: None,
        }
    }

    fn prop(&mut self, n: usize) -> Result<&mut Propagator> {
        if !self.props.contains_key(&n) {
            self.props
                .insert(n, Propagator::new(n, self.noise, self.cfg)?);
        }
        Ok(self.props.get_mut(&n).unwrap())
    }

    fn segment(&mut self, key: SegKey) -> Result<Rc<CompiledSegment>> {
        if let Some(seg) = self.segments.get(&key) {
            return Ok(seg.clone());
        }
        let circuit = match key {
            SegKey::BitflipDetection => circuits::bitflip_detection_circuit(self.level),
            SegKey::CatPrep => circuits::cat4_prep_circuit(self.level),
            SegKey::FqRound(g) => circuits::fivequbit_generator_round_circuit(
                &self.code.generators()[g],
                self.level,
            ),
            SegKey::Recovery(s) => circuits::recovery_circuit(&self.code, s, self.level),
            SegKey::LogicalX => circuits::logical_x_circuit(&self.code, self.level),
        };
        let seg = Rc::new(compile_segment(
            &circuit,
            circuits::scheduling_level(self.level),
        )?);
        self.segments.insert(key, seg.clone());
        Ok(seg)
    }

    /// Propagates a segment's pulse layers, applying any faults that
    /// target this site at their layer boundaries.
    fn run_layers(
        &mut self,
        state: &DensityMatrix,
        seg: &CompiledSegment,
        site: FaultSite,
        inj: &[InjectionPoint],
    ) -> Result<DensityMatrix> {
        let mut faults: Vec<(usize, PauliString)> = inj
            .iter()
            .filter(|p| p.site == site)
            .map(|p| {
                let pauli = PauliString::single(seg.n_qubits, p.qubit, p.pauli)
                    .expect("injection qubit fits register");
                (p.after_layer.min(seg.layers.len()), pauli)
            })
            .collect();
        faults.sort_by_key(|(k, _)| *k);
        let prop = self.prop(seg.n_qubits)?;
        let refs: Vec<&PulseLayer> = seg.layers.iter().collect();
        let mut cursor = 0usize;
        let mut rho = state.clone();
        for (k, pauli) in faults {
            rho = prop.propagate_layers(&rho, &refs[cursor..k])?;
            rho.conjugate_by_pauli(&pauli);
            cursor = k;
        }
        prop.propagate_layers(&rho, &refs[cursor..])
    }

    /// Measures the listed qubits in order with the context's POVM error,
    /// producing unnormalized record branches (weight = trace).
    fn measure_unnormalized(
        &self,
        state: DensityMatrix,
        qubits: &[usize],
        input_scale: f64,
    ) -> Result<Vec<(Vec<u8>, DensityMatrix)>> {
        let eta = self.povm.eta();
        let mut branches = vec![(Vec::new(), state)];
        for &q in qubits {
            let mut next = Vec::with_capacity(branches.len() * 2);
            for (record, rho) in branches {
                let (w0, p0) = project_qubit(&rho, q, 0)?;
                let (w1, p1) = project_qubit(&rho, q, 1)?;
                for b in 0..2u8 {
                    let (wm, pm, wf, pf) = if b == 0 {
                        (w0, &p0, w1, &p1)
                    } else {
                        (w1, &p1, w0, &p0)
                    };
                    let weight = (1.0 - eta) * wm + eta * wf;
                    if weight <= BRANCH_FLOOR * input_scale {
                        continue;
                    }
                    let mut post = pm.scaled(1.0 - eta);
                    if eta > 0.0 {
                        post.add_assign(&pf.scaled(eta));
                    }
                    let mut rec = record.clone();
                    rec.push(b);
                    next.push((rec, post));
                }
            }
            branches = next;
        }
        Ok(branches)
    }

    /// Verified cat state, cached for the fault-free path. An injected
    /// preparation is a one-shot event: its rejected fraction retries with
    /// a fresh (uninjected) preparation, so the result mixes the accepted
    /// state with the steady-state cat.
    pub fn verified_cat(
        &mut self,
        detection: usize,
        generator: usize,
        inj: &[InjectionPoint],
    ) -> Result<CatResource> {
        let site = FaultSite::CatPrep {
            detection,
            generator,
        };
        let injected = inj.iter().any(|p| p.site == site);
        if !injected {
            if let Some(cat) = &self.cat {
                return Ok(cat.clone());
            }
        }
        let seg = self.segment(SegKey::CatPrep)?;
        let rho0 = DensityMatrix::basis_state(5, 0)?;
        let state = self.run_layers(&rho0, &seg, site, inj)?;
        let branches = self.measure_unnormalized(state, &seg.measured, 1.0)?;
        let mut acceptance = 0.0;
        let mut accepted: Option<DensityMatrix> = None;
        for (record, rho) in branches {
            if record == [0] {
                acceptance = rho.trace().re;
                accepted = Some(rho.partial_trace(&[0, 1, 2, 3])?);
            }
        }
        let resource = if injected {
            // One-shot fault: rejection retries cleanly.
            let clean = self.clean_cat()?;
            let state = match accepted {
                Some(acc) => {
                    let mut mix = acc; // already weighted by acceptance
                    mix.add_assign(&clean.scaled(1.0 - acceptance));
                    mix
                }
                None => clean,
            };
            CatResource {
                state,
                acceptance,
                duration: seg.duration,
            }
        } else {
            if acceptance < self.acceptance_floor {
                return Err(Error::AcceptanceTooLow(acceptance, self.acceptance_floor));
            }
            let state = accepted.expect("acceptance above floor").scaled(1.0 / acceptance);
            let resource = CatResource {
                state,
                acceptance,
                duration: seg.duration,
            };
            self.cat = Some(resource.clone());
            return Ok(resource);
        };
        Ok(resource)
    }

    /// The noiseless accepted cat state (retry target for injected runs).
    fn clean_cat(&mut self) -> Result<DensityMatrix> {
        if let Some(c) = &self.clean_cat {
            return Ok(c.clone());
        }
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let mut amps = vec![num_complex::Complex64::new(0.0, 0.0); 16];
        amps[0] = num_complex::Complex64::new(s, 0.0);
        amps[15] = num_complex::Complex64::new(s, 0.0);
        let cat = DensityMatrix::pure(&amps)?;
        self.clean_cat = Some(cat.clone());
        Ok(cat)
    }

    /// Duration of one full syndrome detection (all generators, including
    /// ancilla preparation time, which the data spends idling).
    pub fn detection_duration(&mut self) -> Result<f64> {
        if self.code.n_qubits() == 3 {
            Ok(self.segment(SegKey::BitflipDetection)?.duration)
        } else {
            let prep = self.segment(SegKey::CatPrep)?.duration;
            let mut total = 0.0;
            for g in 0..self.code.n_generators() {
                total += prep + self.segment(SegKey::FqRound(g))?.duration;
            }
            Ok(total)
        }
    }

    pub fn recovery_duration(&mut self, syndrome: u16) -> Result<f64> {
        Ok(self.segment(SegKey::Recovery(syndrome))?.duration)
    }

    // Layer counts used by the fault-injection enumerator.
    pub(crate) fn segment_layer_count_bitflip(&mut self) -> Result<usize> {
        Ok(self.segment(SegKey::BitflipDetection)?.layers.len())
    }

    pub(crate) fn segment_layer_count_cat_prep(&mut self) -> Result<usize> {
        Ok(self.segment(SegKey::CatPrep)?.layers.len())
    }

    pub(crate) fn segment_layer_count_fq_round(&mut self, g: usize) -> Result<usize> {
        Ok(self.segment(SegKey::FqRound(g))?.layers.len())
    }

    pub(crate) fn segment_layer_count_recovery(&mut self, s: u16) -> Result<usize> {
        Ok(self.segment(SegKey::Recovery(s))?.layers.len())
    }

    pub fn logical_x_duration(&mut self) -> Result<f64> {
        Ok(self.segment(SegKey::LogicalX)?.duration)
    }

    /// Applies the transversal logical X (compiled pulses, with noise).
    pub fn apply_logical_x(
        &mut self,
        state: &DensityMatrix,
        inj: &[InjectionPoint],
    ) -> Result<DensityMatrix> {
        let seg = self.segment(SegKey::LogicalX)?;
        self.run_layers(state, &seg, FaultSite::LogicalGate, inj)
    }

    /// Applies the table recovery for a syndrome (compiled pulses, with
    /// noise); identity syndromes cost nothing.
    pub fn apply_recovery(
        &mut self,
        state: &DensityMatrix,
        syndrome: u16,
        inj: &[InjectionPoint],
    ) -> Result<(DensityMatrix, f64)> {
        let seg = self.segment(SegKey::Recovery(syndrome))?;
        if seg.layers.is_empty() {
            return Ok((state.clone(), 0.0));
        }
        let out = self.run_layers(state, &seg, FaultSite::Recovery, inj)?;
        Ok((out, seg.duration))
    }
}

/// One syndrome branch of a detection round (weight = probability for a
/// normalized input).
#[derive(Debug, Clone)]
pub struct SyndromeBranch {
    pub syndrome: u16,
    pub weight: f64,
    pub state: DensityMatrix,
}

/// Full syndrome detection for the bit-flip code: attach two fresh Bell
/// pairs, extract both generators, measure the four ancillas, and return
/// per-syndrome branches with the ancillas traced out. The syndrome bits
/// are the XORs of the Bell-half outcomes.
pub fn bitflip_detection(
    ctx: &mut RoundContext,
    data: &DensityMatrix,
    detection: usize,
    inj: &[InjectionPoint],
) -> Result<(Vec<SyndromeBranch>, f64)> {
    let seg = ctx.segment(SegKey::BitflipDetection)?;
    let scale = data.trace().re;
    let rho7 = data.tensor(&DensityMatrix::basis_state(4, 0)?);
    let state = ctx.run_layers(&rho7, &seg, FaultSite::BitflipDetection { detection }, inj)?;
    let raw = ctx.measure_unnormalized(state, &seg.measured, scale)?;

    // Merge the 16 raw outcomes into the 4 syndrome classes before tracing
    // out the ancillas; the classical controller only ever sees syndromes.
    let mut by_syndrome: HashMap<u16, DensityMatrix> = HashMap::new();
    for (record, rho) in raw {
        let m1 = record[0] ^ record[1];
        let m2 = record[2] ^ record[3];
        let syndrome = (m1 as u16) | ((m2 as u16) << 1);
        match by_syndrome.get_mut(&syndrome) {
            Some(acc) => acc.add_assign(&rho),
            None => {
                by_syndrome.insert(syndrome, rho);
            }
        }
    }
    let mut branches: Vec<SyndromeBranch> = Vec::with_capacity(by_syndrome.len());
    let mut keys: Vec<u16> = by_syndrome.keys().copied().collect();
    keys.sort_unstable();
    for s in keys {
        let rho = &by_syndrome[&s];
        let weight = rho.trace().re;
        if weight <= BRANCH_FLOOR * scale {
            continue;
        }
        let reduced = rho.partial_trace(&[0, 1, 2])?;
        branches.push(SyndromeBranch {
            syndrome: s,
            weight,
            state: reduced.scaled(1.0 / weight),
        });
    }
    Ok((branches, seg.duration))
}

/// How a five-qubit generator measurement is consumed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum MeasMode {
    /// Keep both outcomes as separate branches.
    Resolved,
    /// Keep only the branch whose record equals the given bit.
    Path(u8),
    /// Sum over outcomes without recording (unconditional map).
    Dephase,
}

/// One five-qubit generator round on an unnormalized data state: idle the
/// data while a fresh cat is verified, attach it, couple, decode, measure
/// one cat qubit, and trace the ancillas out. Returns (bit, state) pairs
/// (a single pair for Path/Dephase).
pub(crate) fn fq_generator_round(
    ctx: &mut RoundContext,
    data: &DensityMatrix,
    detection: usize,
    generator: usize,
    mode: MeasMode,
    inj: &[InjectionPoint],
) -> Result<Vec<(u8, DensityMatrix)>> {
    let cat = ctx.verified_cat(detection, generator, inj)?;
    let idled = {
        let prop = ctx.prop(5)?;
        prop.propagate_idle(data, cat.duration)?
    };
    let rho9 = idled.tensor(&cat.state);
    let seg = ctx.segment(SegKey::FqRound(generator))?;
    let site = FaultSite::GeneratorRound {
        detection,
        generator,
    };
    let state = ctx.run_layers(&rho9, &seg, site, inj)?;
    let q = seg.measured[0];
    let eta = ctx.povm.eta();
    let keep: Vec<usize> = (0..5).collect();

    let unnorm_record = |state: &DensityMatrix, b: u8| -> Result<DensityMatrix> {
        let (_, pm) = project_qubit(state, q, b)?;
        if eta == 0.0 {
            return Ok(pm);
        }
        let (_, pf) = project_qubit(state, q, 1 - b)?;
        let mut out = pm.scaled(1.0 - eta);
        out.add_assign(&pf.scaled(eta));
        Ok(out)
    };

    let mut out = Vec::new();
    match mode {
        MeasMode::Resolved => {
            for b in 0..2u8 {
                let rho = unnorm_record(&state, b)?;
                out.push((b, rho.partial_trace(&keep)?));
            }
        }
        MeasMode::Path(b) => {
            let rho = unnorm_record(&state, b)?;
            out.push((b, rho.partial_trace(&keep)?));
        }
        MeasMode::Dephase => {
            let rho = crate::measure::dephase_qubit(&state, q)?;
            out.push((0, rho.partial_trace(&keep)?));
        }
    }
    Ok(out)
}

/// Syndrome-resolved five-qubit detection: the full 16-way tree over the
/// four sequential generator measurements. Entry s of the result is the
/// unnormalized branch for syndrome s; branches whose weight underflows
/// are left zero without propagating their subtree.
pub(crate) fn fq_detection_tree(
    ctx: &mut RoundContext,
    data: &DensityMatrix,
    detection: usize,
    inj: &[InjectionPoint],
) -> Result<Vec<DensityMatrix>> {
    let scale = data.trace().re.max(BRANCH_FLOOR);
    let n_gen = ctx.code.n_generators();
    let mut states: Vec<(u16, DensityMatrix)> = vec![(0, data.clone())];
    for g in 0..n_gen {
        let mut next = Vec::with_capacity(states.len() * 2);
        for (prefix, rho) in states {
            if rho.trace().re <= BRANCH_FLOOR * scale {
                continue;
            }
            for (b, branch) in
                fq_generator_round(ctx, &rho, detection, g, MeasMode::Resolved, inj)?
            {
                next.push((prefix | ((b as u16) << g), branch));
            }
        }
        states = next;
    }
    let dim_zero = DensityMatrix::from_matrix_unchecked(
        5,
        ndarray::Array2::zeros((32, 32)),
    );
    let mut tree = vec![dim_zero; 1 << n_gen];
    for (s, rho) in states {
        tree[s as usize].add_assign(&rho);
    }
    Ok(tree)
}

/// The single-syndrome component E_s of a five-qubit detection.
pub(crate) fn fq_detection_path(
    ctx: &mut RoundContext,
    data: &DensityMatrix,
    syndrome: u16,
    detection: usize,
    inj: &[InjectionPoint],
) -> Result<DensityMatrix> {
    let mut rho = data.clone();
    for g in 0..ctx.code.n_generators() {
        let bit = ((syndrome >> g) & 1) as u8;
        rho = fq_generator_round(ctx, &rho, detection, g, MeasMode::Path(bit), inj)?
            .pop()
            .expect("path mode returns one branch")
            .1;
    }
    Ok(rho)
}

/// The unconditional five-qubit detection map (outcomes summed over).
pub(crate) fn fq_detection_dephased(
    ctx: &mut RoundContext,
    data: &DensityMatrix,
    detection: usize,
    inj: &[InjectionPoint],
) -> Result<DensityMatrix> {
    let mut rho = data.clone();
    for g in 0..ctx.code.n_generators() {
        rho = fq_generator_round(ctx, &rho, detection, g, MeasMode::Dephase, inj)?
            .pop()
            .expect("dephase mode returns one branch")
            .1;
    }
    Ok(rho)
}

/// Bell-pair preparation under noise on a standalone two-qubit register:
/// Hadamard then CNOT, compiled at the context's parallelism level.
pub fn prepare_bell_pair(
    noise: &NoiseModel,
    level: ParallelismLevel,
    cfg: &IntegratorConfig,
) -> Result<(DensityMatrix, f64)> {
    let circuit = circuits::bell_pair_circuit(level);
    let sched = schedule_circuit(&circuit, circuits::scheduling_level(level))?;
    let rho0 = DensityMatrix::basis_state(2, 0)?;
    let mut prop = Propagator::new(2, *noise, *cfg)?;
    let out = prop.propagate(&rho0, &sched)?;
    Ok((out, sched.total_duration()))
}

/// Verified four-qubit cat preparation on a standalone register.
pub fn prepare_cat4_verified(
    noise: &NoiseModel,
    level: ParallelismLevel,
    cfg: &IntegratorConfig,
) -> Result<(DensityMatrix, f64, f64)> {
    let mut ctx = RoundContext::new(
        StabilizerCode::five_qubit(),
        level,
        PovmError::ideal(),
        *noise,
        *cfg,
    );
    let cat = ctx.verified_cat(0, 0, &[])?;
    Ok((cat.state, cat.acceptance, cat.duration))
}

/// Syndrome detection round for the bit-flip code on a standalone context.
pub fn syndrome_round_bitflip(
    data: &DensityMatrix,
    noise: &NoiseModel,
    level: ParallelismLevel,
    cfg: &IntegratorConfig,
    povm: PovmError,
) -> Result<(Vec<SyndromeBranch>, f64)> {
    let mut ctx = RoundContext::new(StabilizerCode::bit_flip(), level, povm, *noise, *cfg);
    bitflip_detection(&mut ctx, data, 0, &[])
}

/// Syndrome detection round for the five-qubit code on a standalone
/// context: returns normalized per-syndrome branches.
pub fn syndrome_round_fivequbit(
    data: &DensityMatrix,
    noise: &NoiseModel,
    level: ParallelismLevel,
    cfg: &IntegratorConfig,
    povm: PovmError,
) -> Result<(Vec<SyndromeBranch>, f64)> {
    let mut ctx = RoundContext::new(StabilizerCode::five_qubit(), level, povm, *noise, *cfg);
    let tree = fq_detection_tree(&mut ctx, data, 0, &[])?;
    let duration = ctx.detection_duration()?;
    let mut branches = Vec::new();
    for (s, rho) in tree.into_iter().enumerate() {
        let weight = rho.trace().re;
        if weight <= BRANCH_FLOOR {
            continue;
        }
        branches.push(SyndromeBranch {
            syndrome: s as u16,
            weight,
            state: rho.scaled(1.0 / weight),
        });
    }
    Ok((branches, duration))
}
