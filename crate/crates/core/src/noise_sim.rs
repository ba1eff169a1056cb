//! Circuit-level Monte-Carlo of transversal injection on the rotated code.
//!
//! Each shot rotates every data qubit to `|chi>`, runs `rounds` noisy sweeps
//! of stabiliser measurements and one noiseless sweep, and compares the final
//! data state with the state heralded by the first-round outcomes. Shots
//! whose outcomes change between sweeps are discarded.
//!
//! Simulation is on a dense state vector of `N + 1` qubits. Stabilisers are
//! measured one at a time through a single ancilla (qubit `N`) that is reset
//! after every measurement; without idle noise this is equivalent to one
//! ancilla per stabiliser slot.
//!
//! Noise is depolarising: after every single-qubit gate (the initial
//! rotation and every Hadamard) a Pauli X, Y or Z fires with total
//! probability `p1`; after every CNOT one of the 15 non-identity two-qubit
//! Paulis fires with total probability `p2`; every recorded measurement
//! outcome flips with probability `p_meas`. Resets and idle periods are
//! noiseless.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::amplitude::{self, PhysicalRotation};
use crate::derive::{self, PauliFrame};
use crate::error::{Error, Result};
use crate::gf2;
use crate::layout::{build_rotated_layout, CodeLayout, Pauli, Variant};
use crate::trajectory::Trajectory;

/// Largest simulated register, data plus ancilla.
pub const MAX_SIM_QUBITS: usize = 20;
/// A shot counts as a logical error when its fidelity is below this.
pub const LOGICAL_ERROR_THRESHOLD: f64 = 0.5;

/// Order in which a stabiliser's CNOTs touch its support: row-major over the
/// data grid, i.e. NW, NE, SW, SE for bulk plaquettes.
pub const CNOT_ORDER: &str = "row-major";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseModel {
    pub p1: f64,
    pub p2: f64,
    pub p_meas: f64,
}

impl NoiseModel {
    pub fn new(p1: f64, p2: f64, p_meas: f64) -> Result<Self> {
        let m = Self { p1, p2, p_meas };
        m.validate()?;
        Ok(m)
    }

    pub fn noiseless() -> Self {
        Self {
            p1: 0.0,
            p2: 0.0,
            p_meas: 0.0,
        }
    }

    /// The same rate `p` on every channel.
    pub fn uniform(p: f64) -> Result<Self> {
        Self::new(p, p, p)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, p) in [("p1", self.p1), ("p2", self.p2), ("p_meas", self.p_meas)] {
            if !(0.0..0.5).contains(&p) {
                return Err(Error::InvalidParameter(format!("{name}={p} outside [0, 0.5)")));
            }
        }
        Ok(())
    }

    pub fn is_noiseless(&self) -> bool {
        self.p1 == 0.0 && self.p2 == 0.0 && self.p_meas == 0.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub distance: usize,
    pub theta: f64,
    pub phi: f64,
    pub noise: NoiseModel,
    pub rounds: usize,
    pub shots: u64,
    pub seed: u64,
}

impl ExperimentConfig {
    /// `rounds` defaults to the distance.
    pub fn new(distance: usize, rot: PhysicalRotation, noise: NoiseModel, shots: u64, seed: u64) -> Self {
        Self {
            distance,
            theta: rot.theta,
            phi: rot.phi,
            noise,
            rounds: distance.max(1),
            shots,
            seed,
        }
    }

    pub fn rotation(&self) -> Result<PhysicalRotation> {
        PhysicalRotation::new(self.theta, self.phi)
    }

    pub fn validate(&self) -> Result<()> {
        if self.rounds == 0 {
            return Err(Error::InvalidParameter("rounds must be at least 1".into()));
        }
        if self.shots == 0 {
            return Err(Error::InvalidParameter("shots must be at least 1".into()));
        }
        self.noise.validate()?;
        self.rotation()?;
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Op {
    /// Rotates a fresh `|0>` to `|chi>`.
    Prepare { qubit: usize },
    Reset { qubit: usize },
    H { qubit: usize },
    Cnot { control: usize, target: usize },
    /// Z-basis measurement of the ancilla, recorded as stabiliser `index`.
    Measure {
        qubit: usize,
        kind: Pauli,
        index: usize,
        round: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Gate {
    pub op: Op,
    pub noisy: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EncodingCircuit {
    pub layout: CodeLayout,
    /// Noisy sweeps; one more noiseless sweep follows.
    pub rounds: usize,
    pub n_qubits: usize,
    pub ancilla: usize,
    pub gates: Vec<Gate>,
}

impl EncodingCircuit {
    pub fn total_rounds(&self) -> usize {
        if self.layout.num_stabilizers() == 0 {
            0
        } else {
            self.rounds + 1
        }
    }
}

/// Gate list for `rounds` noisy sweeps plus a final noiseless one.
///
/// Within a sweep X stabilisers are measured before Z stabilisers, each in
/// layout order. An X check is reset, H, CNOTs ancilla to data, H, measure;
/// a Z check is reset, CNOTs data to ancilla, measure.
pub fn build_encoding_circuit(layout: &CodeLayout, rounds: usize) -> Result<EncodingCircuit> {
    if layout.variant != Variant::Rotated {
        return Err(Error::UnsupportedLayout);
    }
    if rounds == 0 {
        return Err(Error::InvalidParameter("rounds must be at least 1".into()));
    }
    let n = layout.n_data;
    let anc = n;
    let n_qubits = if layout.num_stabilizers() == 0 { n } else { n + 1 };
    if n_qubits > MAX_SIM_QUBITS {
        return Err(Error::TooLarge {
            what: "simulated qubit count",
            size: n_qubits,
            limit: MAX_SIM_QUBITS,
        });
    }
    let mut gates: Vec<Gate> = (0..n)
        .map(|q| Gate {
            op: Op::Prepare { qubit: q },
            noisy: true,
        })
        .collect();
    if layout.num_stabilizers() > 0 {
        for round in 0..=rounds {
            let noisy = round < rounds;
            let mut g = |op| gates.push(Gate { op, noisy });
            for (index, support) in layout.x_stabilizers.iter().enumerate() {
                g(Op::Reset { qubit: anc });
                g(Op::H { qubit: anc });
                for &q in support {
                    g(Op::Cnot { control: anc, target: q });
                }
                g(Op::H { qubit: anc });
                g(Op::Measure {
                    qubit: anc,
                    kind: Pauli::X,
                    index,
                    round,
                });
            }
            for (index, support) in layout.z_stabilizers.iter().enumerate() {
                g(Op::Reset { qubit: anc });
                for &q in support {
                    g(Op::Cnot { control: q, target: anc });
                }
                g(Op::Measure {
                    qubit: anc,
                    kind: Pauli::Z,
                    index,
                    round,
                });
            }
        }
    }
    Ok(EncodingCircuit {
        layout: layout.clone(),
        rounds,
        n_qubits,
        ancilla: anc,
        gates,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PauliError {
    X,
    Y,
    Z,
}

impl PauliError {
    fn from_index(i: usize) -> Option<Self> {
        match i {
            1 => Some(Self::X),
            2 => Some(Self::Y),
            3 => Some(Self::Z),
            _ => None,
        }
    }
}

/// A fault forced into a shot, for deterministic fault-injection runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Fault {
    Pauli { qubit: usize, pauli: PauliError },
    /// Flips the recorded outcome of the measurement at `after_gate`.
    MeasurementFlip,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct InjectedFault {
    /// Index into the circuit's gate list; the fault acts right after it.
    pub after_gate: usize,
    pub fault: Fault,
}

/// Dense register state with the ancilla as the top qubit.
struct Register {
    amps: Vec<Complex64>,
}

impl Register {
    fn zero(n: usize) -> Self {
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n];
        amps[0] = Complex64::new(1.0, 0.0);
        Self { amps }
    }

    fn apply_1q(&mut self, q: usize, m: [[Complex64; 2]; 2]) {
        let bit = 1usize << q;
        for i in 0..self.amps.len() {
            if i & bit == 0 {
                let a0 = self.amps[i];
                let a1 = self.amps[i | bit];
                self.amps[i] = m[0][0] * a0 + m[0][1] * a1;
                self.amps[i | bit] = m[1][0] * a0 + m[1][1] * a1;
            }
        }
    }

    fn hadamard(&mut self, q: usize) {
        let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        self.apply_1q(q, [[h, h], [h, -h]]);
    }

    fn x(&mut self, q: usize) {
        let bit = 1usize << q;
        for i in 0..self.amps.len() {
            if i & bit == 0 {
                self.amps.swap(i, i | bit);
            }
        }
    }

    fn z(&mut self, q: usize) {
        let bit = 1usize << q;
        for (i, a) in self.amps.iter_mut().enumerate() {
            if i & bit != 0 {
                *a = -*a;
            }
        }
    }

    fn pauli(&mut self, q: usize, p: PauliError) {
        // global phases are irrelevant, so Y is applied as XZ
        match p {
            PauliError::X => self.x(q),
            PauliError::Z => self.z(q),
            PauliError::Y => {
                self.z(q);
                self.x(q);
            }
        }
    }

    fn cnot(&mut self, c: usize, t: usize) {
        let cb = 1usize << c;
        let tb = 1usize << t;
        for i in 0..self.amps.len() {
            if i & cb != 0 && i & tb == 0 {
                self.amps.swap(i, i | tb);
            }
        }
    }

    fn prob_one(&self, q: usize) -> f64 {
        let bit = 1usize << q;
        self.amps
            .iter()
            .enumerate()
            .filter(|(i, _)| i & bit != 0)
            .map(|(_, a)| a.norm_sqr())
            .sum()
    }

    fn collapse(&mut self, q: usize, outcome: bool, p: f64) {
        let bit = 1usize << q;
        let k = 1.0 / p.sqrt();
        for (i, a) in self.amps.iter_mut().enumerate() {
            if (i & bit != 0) == outcome {
                *a *= k;
            } else {
                *a = Complex64::new(0.0, 0.0);
            }
        }
    }
}

fn prepare_matrix(rot: &PhysicalRotation) -> [[Complex64; 2]; 2] {
    let a = rot.alpha();
    let b = rot.beta();
    [[a, -b.conj()], [b, a.conj()]]
}

/// Raw outcome of one circuit execution.
struct CircuitRun {
    /// Recorded outcomes, one trajectory per sweep.
    rounds: Vec<Trajectory>,
    data: Vec<Complex64>,
}

/// Runs one shot. Random faults are drawn from `rng`; `injected` faults are
/// applied in addition. Every fault location consumes exactly one draw
/// whatever the noise rates, so runs at different rates share randomness.
fn run_circuit(
    circuit: &EncodingCircuit,
    rot: &PhysicalRotation,
    noise: &NoiseModel,
    rng: &mut ChaCha8Rng,
    injected: &[InjectedFault],
) -> CircuitRun {
    let layout = &circuit.layout;
    let mut reg = Register::zero(circuit.n_qubits);
    let prep = prepare_matrix(rot);
    let total = circuit.total_rounds();
    let mut x_bits = vec![0u64; total];
    let mut z_bits = vec![0u64; total];
    let depolarize_1q = |reg: &mut Register, rng: &mut ChaCha8Rng, q: usize, noisy: bool| {
        let r: f64 = rng.random();
        if noisy && r < noise.p1 {
            let k = ((r / noise.p1 * 3.0) as usize).min(2) + 1;
            reg.pauli(q, PauliError::from_index(k).unwrap());
        }
    };
    for (gi, gate) in circuit.gates.iter().enumerate() {
        match gate.op {
            Op::Prepare { qubit } => {
                reg.apply_1q(qubit, prep);
                depolarize_1q(&mut reg, rng, qubit, gate.noisy);
            }
            Op::Reset { qubit } => {
                // the ancilla is always returned to |0> after measurement
                debug_assert!(reg.prob_one(qubit) < 1e-9);
            }
            Op::H { qubit } => {
                reg.hadamard(qubit);
                depolarize_1q(&mut reg, rng, qubit, gate.noisy);
            }
            Op::Cnot { control, target } => {
                reg.cnot(control, target);
                let r: f64 = rng.random();
                if gate.noisy && r < noise.p2 {
                    let k = ((r / noise.p2 * 15.0) as usize).min(14) + 1;
                    if let Some(p) = PauliError::from_index(k / 4) {
                        reg.pauli(control, p);
                    }
                    if let Some(p) = PauliError::from_index(k % 4) {
                        reg.pauli(target, p);
                    }
                }
            }
            Op::Measure {
                qubit,
                kind,
                index,
                round,
            } => {
                let p1 = reg.prob_one(qubit).clamp(0.0, 1.0);
                let r: f64 = rng.random();
                let outcome = r < p1;
                let p = if outcome { p1 } else { 1.0 - p1 };
                reg.collapse(qubit, outcome, p);
                if outcome {
                    reg.x(qubit);
                }
                let flip: f64 = rng.random();
                let forced = injected
                    .iter()
                    .any(|f| f.after_gate == gi && f.fault == Fault::MeasurementFlip);
                let recorded = outcome ^ (gate.noisy && flip < noise.p_meas) ^ forced;
                let bits = match kind {
                    Pauli::X => &mut x_bits[round],
                    Pauli::Z => &mut z_bits[round],
                };
                if recorded {
                    *bits |= 1 << index;
                }
            }
        }
        for f in injected.iter().filter(|f| f.after_gate == gi) {
            if let Fault::Pauli { qubit, pauli } = f.fault {
                reg.pauli(qubit, pauli);
            }
        }
    }
    let n_data = 1usize << layout.n_data;
    let rounds = (0..total)
        .map(|r| Trajectory::new(x_bits[r], layout.num_x(), z_bits[r], layout.num_z()))
        .collect();
    reg.amps.truncate(n_data);
    CircuitRun {
        rounds,
        data: reg.amps,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShotRecord {
    pub shot: u64,
    /// First-sweep outcomes.
    pub trajectory: Trajectory,
    pub syndrome_history: Vec<Trajectory>,
    pub stable: bool,
    pub fidelity: f64,
    pub logical_error: bool,
}

/// Heralded logical state for one trajectory in the form needed to take
/// overlaps with a dense data state.
#[derive(Debug, Clone)]
struct Expected {
    a: Complex64,
    b: Complex64,
    frame: PauliFrame,
}

/// Everything a shot needs that does not depend on the random draws.
pub struct Simulator {
    config: ExperimentConfig,
    rot: PhysicalRotation,
    circuit: EncodingCircuit,
    /// `(subset of X stabilisers, product of their supports)` for every subset.
    x_group: Vec<(u64, u64)>,
    cache: Mutex<HashMap<Trajectory, Arc<Option<Expected>>>>,
}

impl Simulator {
    pub fn new(config: &ExperimentConfig) -> Result<Self> {
        config.validate()?;
        let layout = build_rotated_layout(config.distance)?;
        let circuit = build_encoding_circuit(&layout, config.rounds)?;
        let masks = layout.x_masks();
        let x_group = (0..1u64 << masks.len())
            .map(|s| {
                let m = gf2::indices_of(s).iter().fold(0u64, |acc, &i| acc ^ masks[i]);
                (s, m)
            })
            .collect();
        Ok(Self {
            config: *config,
            rot: config.rotation()?,
            circuit,
            x_group,
            cache: Mutex::new(HashMap::new()),
        })
    }

    pub fn config(&self) -> &ExperimentConfig {
        &self.config
    }

    pub fn circuit(&self) -> &EncodingCircuit {
        &self.circuit
    }

    pub fn layout(&self) -> &CodeLayout {
        &self.circuit.layout
    }

    /// Per-shot random stream: the shot index selects a ChaCha stream under
    /// the experiment seed, so results do not depend on scheduling.
    pub fn shot_rng(&self, shot: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.config.seed);
        rng.set_stream(shot);
        rng
    }

    fn expected(&self, t: &Trajectory) -> Arc<Option<Expected>> {
        if let Some(e) = self.cache.lock().unwrap().get(t) {
            return e.clone();
        }
        let e = Arc::new(self.compute_expected(t));
        self.cache.lock().unwrap().insert(*t, e.clone());
        e
    }

    fn compute_expected(&self, t: &Trajectory) -> Option<Expected> {
        let layout = self.layout();
        let form = derive::derive_state(layout, t).ok()?;
        let (a, b) = amplitude::normalize(&form, &self.rot).ok()?;
        let z_terms = derive::expand_z_sector(layout, t).ok()?;
        let frame = PauliFrame::from_z_terms(layout, &z_terms).ok()?;
        Some(Expected { a, b, frame })
    }

    /// `|<expected(t)|data>|^2`, or 0 when `t` heralds no state at this
    /// rotation.
    fn fidelity(&self, t: &Trajectory, data: &[Complex64]) -> f64 {
        let Some(e) = self.expected(t).as_ref().clone() else {
            return 0.0;
        };
        let scale = (self.x_group.len() as f64).sqrt().recip();
        let mut o0 = Complex64::new(0.0, 0.0);
        let mut o1 = Complex64::new(0.0, 0.0);
        for &(s, m) in &self.x_group {
            let sign = if gf2::parity(s & t.x()) { -1.0 } else { 1.0 };
            o0 += sign * data[(e.frame.ref0 ^ m) as usize];
            o1 += sign * data[(e.frame.ref1 ^ m) as usize];
        }
        let overlap = (e.a.conj() * o0 + e.b.conj() * o1) * scale;
        overlap.norm_sqr().min(1.0)
    }

    pub fn run_shot(&self, shot: u64) -> ShotRecord {
        self.run_shot_with(shot, &[])
    }

    /// Runs shot `shot` with extra deterministic faults.
    pub fn run_shot_with(&self, shot: u64, injected: &[InjectedFault]) -> ShotRecord {
        let mut rng = self.shot_rng(shot);
        let run = run_circuit(&self.circuit, &self.rot, &self.config.noise, &mut rng, injected);
        let trajectory = run
            .rounds
            .first()
            .copied()
            .unwrap_or_else(|| Trajectory::trivial(self.layout()));
        let stable = run.rounds.iter().all(|r| *r == trajectory);
        let fidelity = self.fidelity(&trajectory, &run.data);
        ShotRecord {
            shot,
            trajectory,
            syndrome_history: run.rounds,
            stable,
            fidelity,
            logical_error: fidelity < LOGICAL_ERROR_THRESHOLD,
        }
    }

    /// Final data-qubit amplitudes of one shot, for fault-injection checks.
    pub fn final_data_state(&self, shot: u64, injected: &[InjectedFault]) -> (Vec<Trajectory>, Vec<Complex64>) {
        let mut rng = self.shot_rng(shot);
        let run = run_circuit(&self.circuit, &self.rot, &self.config.noise, &mut rng, injected);
        (run.rounds, run.data)
    }

    /// All shots, in shot order.
    pub fn run_all(&self) -> Vec<ShotRecord> {
        (0..self.config.shots)
            .into_par_iter()
            .map(|s| self.run_shot(s))
            .collect()
    }
}

/// Convenience wrapper around [`Simulator::run_shot`].
pub fn run_shot(config: &ExperimentConfig, shot: u64) -> Result<ShotRecord> {
    Ok(Simulator::new(config)?.run_shot(shot))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryStats {
    pub trajectory: Trajectory,
    pub count: u64,
    pub mean_fidelity: f64,
    #[serde(default)]
    pub logical_errors: u64,
    /// `count` over all accepted shots.
    pub frequency: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentResult {
    pub config: ExperimentConfig,
    pub stats: Vec<TrajectoryStats>,
    pub logical_error_rate: f64,
    pub discard_rate: f64,
    pub mean_fidelity: f64,
    pub accepted: u64,
}

/// Neumaier-compensated running sum.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    c: f64,
}

impl CompensatedSum {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.c += (self.sum - t) + x;
        } else {
            self.c += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.c
    }
}

/// Aggregates stable shots per trajectory, in trajectory order.
pub fn aggregate(config: &ExperimentConfig, records: &[ShotRecord]) -> ExperimentResult {
    let mut by_traj: std::collections::BTreeMap<Trajectory, (u64, CompensatedSum, u64)> = Default::default();
    let mut total_fid = CompensatedSum::default();
    let mut accepted = 0u64;
    let mut errors = 0u64;
    for r in records.iter().filter(|r| r.stable) {
        let e = by_traj.entry(r.trajectory).or_default();
        e.0 += 1;
        e.1.add(r.fidelity);
        e.2 += u64::from(r.logical_error);
        total_fid.add(r.fidelity);
        accepted += 1;
        errors += u64::from(r.logical_error);
    }
    let stats = by_traj
        .into_iter()
        .map(|(trajectory, (count, fid, errs))| TrajectoryStats {
            trajectory,
            count,
            mean_fidelity: fid.value() / count as f64,
            logical_errors: errs,
            frequency: count as f64 / accepted as f64,
        })
        .collect();
    let ratio = |a: u64, b: u64| if b == 0 { 0.0 } else { a as f64 / b as f64 };
    ExperimentResult {
        config: *config,
        stats,
        logical_error_rate: ratio(errors, accepted),
        discard_rate: ratio(records.len() as u64 - accepted, records.len() as u64),
        mean_fidelity: if accepted == 0 { 0.0 } else { total_fid.value() / accepted as f64 },
        accepted,
    }
}

/// Runs every shot of `config` and aggregates them.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentResult> {
    let (result, _) = run_experiment_with_records(config)?;
    Ok(result)
}

pub fn run_experiment_with_records(config: &ExperimentConfig) -> Result<(ExperimentResult, Vec<ShotRecord>)> {
    let sim = Simulator::new(config)?;
    let records = sim.run_all();
    Ok((aggregate(config, &records), records))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::layout::build_unrotated_layout;

    fn cfg(d: usize, theta: f64, phi: f64, noise: NoiseModel, shots: u64, seed: u64) -> ExperimentConfig {
        ExperimentConfig::new(d, PhysicalRotation::new(theta, phi).unwrap(), noise, shots, seed)
    }

    #[test]
    fn circuit_shape_d2() {
        let l = build_rotated_layout(2).unwrap();
        let c = build_encoding_circuit(&l, 2).unwrap();
        assert_eq!(c.n_qubits, 5);
        let cnots = c.gates.iter().filter(|g| matches!(g.op, Op::Cnot { .. })).count();
        // two weight-2 X checks and one weight-4 Z check per sweep, three sweeps
        assert_eq!(cnots, 3 * 8);
        let measures: Vec<_> = c
            .gates
            .iter()
            .filter_map(|g| match g.op {
                Op::Measure { round, .. } => Some((round, g.noisy)),
                _ => None,
            })
            .collect();
        assert_eq!(measures.len(), 9);
        assert!(measures.iter().all(|&(r, noisy)| noisy == (r < 2)));
    }

    #[test]
    fn circuit_distance_one_is_rotation_only() {
        let l = build_rotated_layout(1).unwrap();
        let c = build_encoding_circuit(&l, 1).unwrap();
        assert_eq!(c.gates.len(), 1);
        assert!(matches!(c.gates[0].op, Op::Prepare { qubit: 0 }));
    }

    #[test]
    fn unrotated_rejected() {
        let l = build_unrotated_layout(2).unwrap();
        assert!(matches!(build_encoding_circuit(&l, 1), Err(Error::UnsupportedLayout)));
    }

    #[test]
    fn noise_validation() {
        assert!(NoiseModel::new(0.5, 0.0, 0.0).is_err());
        assert!(NoiseModel::new(-0.1, 0.0, 0.0).is_err());
        assert!(NoiseModel::uniform(0.01).is_ok());
    }

    #[test]
    fn noiseless_shots_are_exact() {
        let sim = Simulator::new(&cfg(2, 1.1, 0.7, NoiseModel::noiseless(), 200, 5)).unwrap();
        for s in 0..200 {
            let r = sim.run_shot(s);
            assert!(r.stable);
            assert!((r.fidelity - 1.0).abs() < 1e-9, "shot {s}: {}", r.fidelity);
        }
    }

    #[test]
    fn distance_one_shot() {
        let r = run_shot(&cfg(1, 0.8, 0.2, NoiseModel::noiseless(), 1, 0), 0).unwrap();
        assert!(r.stable && (r.fidelity - 1.0).abs() < 1e-12);
        assert!(r.syndrome_history.is_empty());
    }

    #[test]
    fn measurement_flip_breaks_stability() {
        let sim = Simulator::new(&cfg(2, 1.1, 0.7, NoiseModel::noiseless(), 1, 3)).unwrap();
        let first_measure = sim
            .circuit()
            .gates
            .iter()
            .position(|g| matches!(g.op, Op::Measure { round: 0, .. }))
            .unwrap();
        let clean = sim.run_shot(0);
        let flipped = sim.run_shot_with(
            0,
            &[InjectedFault {
                after_gate: first_measure,
                fault: Fault::MeasurementFlip,
            }],
        );
        assert!(clean.stable);
        assert!(!flipped.stable);
        assert_ne!(flipped.syndrome_history[0], flipped.syndrome_history[1]);
        assert_eq!(flipped.syndrome_history[1], clean.syndrome_history[1]);
    }

    #[test]
    fn aggregate_counts_and_frequencies() {
        let c = cfg(2, 1.0, 0.0, NoiseModel::noiseless(), 4, 0);
        let t0 = Trajectory::new(0, 2, 0, 1);
        let t1 = Trajectory::new(1, 2, 0, 1);
        let rec = |shot, t, stable, f: f64| ShotRecord {
            shot,
            trajectory: t,
            syndrome_history: vec![t],
            stable,
            fidelity: f,
            logical_error: f < 0.5,
        };
        let records = vec![
            rec(0, t0, true, 1.0),
            rec(1, t0, true, 0.2),
            rec(2, t1, true, 0.9),
            rec(3, t1, false, 0.0),
        ];
        let res = aggregate(&c, &records);
        assert_eq!(res.accepted, 3);
        assert!((res.discard_rate - 0.25).abs() < 1e-15);
        assert!((res.logical_error_rate - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(res.stats.len(), 2);
        assert!((res.stats[0].mean_fidelity - 0.6).abs() < 1e-15);
        let fsum: f64 = res.stats.iter().map(|s| s.frequency).sum();
        assert!((fsum - 1.0).abs() < 1e-12);
    }

    #[test]
    fn compensated_sum_recovers_small_terms() {
        let mut s = CompensatedSum::default();
        s.add(1e16);
        for _ in 0..10 {
            s.add(1.0);
        }
        s.add(-1e16);
        assert_eq!(s.value(), 10.0);
    }
}
