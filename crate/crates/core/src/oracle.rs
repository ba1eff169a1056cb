//! Dense state-vector reference for heralded logical states.
//!
//! Builds `|chi>^N` explicitly, applies the trajectory's stabiliser
//! projectors one by one, and reads the result in the trajectory's codeword
//! basis. Nothing here depends on the combinatorial derivation; it is capped
//! at [`MAX_ORACLE_QUBITS`] qubits.

use num_complex::Complex64;

use crate::amplitude::PhysicalRotation;
use crate::error::{Error, Result};
use crate::gf2;
use crate::layout::{CodeLayout, Pauli};
use crate::trajectory::Trajectory;

pub const MAX_ORACLE_QUBITS: usize = 20;
/// Branch probability below which a trajectory is reported impossible.
pub const IMPOSSIBLE_PROBABILITY: f64 = 1e-14;

/// Amplitudes over `2^n` basis states; bit `i` of the index is qubit `i`.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    pub n: usize,
    pub amps: Vec<Complex64>,
}

impl StateVector {
    pub fn zeros(n: usize) -> Result<Self> {
        check_size(n)?;
        Ok(Self {
            n,
            amps: vec![Complex64::new(0.0, 0.0); 1 << n],
        })
    }

    pub fn basis(n: usize, index: u64) -> Result<Self> {
        let mut s = Self::zeros(n)?;
        s.amps[index as usize] = Complex64::new(1.0, 0.0);
        Ok(s)
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &StateVector) -> Complex64 {
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    pub fn scale(&mut self, k: f64) {
        for a in &mut self.amps {
            *a *= k;
        }
    }

    pub fn normalize(&mut self) {
        let n = self.norm_sqr().sqrt();
        if n > 0.0 {
            self.scale(1.0 / n);
        }
    }

    /// Applies X on every qubit in `mask`.
    pub fn flip(&self, mask: u64) -> StateVector {
        let mut out = self.clone();
        for (i, a) in self.amps.iter().enumerate() {
            out.amps[i ^ mask as usize] = *a;
        }
        out
    }
}

fn check_size(n: usize) -> Result<()> {
    if n > MAX_ORACLE_QUBITS {
        return Err(Error::TooLarge {
            what: "state-vector qubit count",
            size: n,
            limit: MAX_ORACLE_QUBITS,
        });
    }
    Ok(())
}

/// `|chi>^n` built by successive tensor products.
pub fn product_state(rot: &PhysicalRotation, n: usize) -> Result<StateVector> {
    check_size(n)?;
    let (alpha, beta) = (rot.alpha(), rot.beta());
    let mut amps = vec![Complex64::new(1.0, 0.0)];
    for q in 0..n {
        let mut next = vec![Complex64::new(0.0, 0.0); amps.len() * 2];
        for (i, a) in amps.iter().enumerate() {
            next[i] = a * alpha;
            next[i | 1 << q] = a * beta;
        }
        amps = next;
    }
    Ok(StateVector { n, amps })
}

/// Applies `(I + (-1)^outcome P)/2` for `P` the X- or Z-type operator on
/// `support`. Returns the unnormalised result and its squared norm.
pub fn apply_projector(
    state: &StateVector,
    support: &[usize],
    pauli: Pauli,
    outcome: bool,
) -> (StateVector, f64) {
    let mask = gf2::mask_of(support);
    let sign = if outcome { -1.0 } else { 1.0 };
    let mut out = state.clone();
    for (i, a) in out.amps.iter_mut().enumerate() {
        let image = match pauli {
            Pauli::X => state.amps[i ^ mask as usize],
            Pauli::Z => {
                if gf2::parity(i as u64 & mask) {
                    -state.amps[i]
                } else {
                    state.amps[i]
                }
            }
        };
        *a = 0.5 * (*a + sign * image);
    }
    let p = out.norm_sqr();
    (out, p)
}

/// Orthonormal logical basis for `trajectory`.
///
/// `|0>_L` is the X-sector projection of the lightest even-logical basis
/// string carrying the trajectory's Z syndrome (ties to the smallest printed
/// string); `|1>_L` is `logical_x` applied to it.
pub fn codewords(layout: &CodeLayout, trajectory: &Trajectory) -> Result<(StateVector, StateVector)> {
    check_size(layout.n_data)?;
    trajectory.check(layout)?;
    let n = layout.n_data;
    let lz = layout.logical_z_mask();
    let printed = |b: u64| -> u64 {
        (0..n).fold(0u64, |acc, q| (acc << 1) | ((b >> q) & 1))
    };
    let mut best: Option<(u32, u64, u64)> = None;
    for basis in 0..(1u64 << n) {
        if gf2::parity(basis & lz) {
            continue;
        }
        let consistent = layout
            .z_stabilizers
            .iter()
            .enumerate()
            .all(|(i, s)| gf2::parity(basis & gf2::mask_of(s)) == trajectory.z_bit(i));
        if !consistent {
            continue;
        }
        let key = (basis.count_ones(), printed(basis), basis);
        if best.is_none_or(|b| key < b) {
            best = Some(key);
        }
    }
    let (_, _, reference) = best.ok_or(Error::InconsistentTrajectory)?;
    let mut zero = StateVector::basis(n, reference)?;
    for (i, s) in layout.x_stabilizers.iter().enumerate() {
        zero = apply_projector(&zero, s, Pauli::X, trajectory.x_bit(i)).0;
    }
    zero.normalize();
    let one = zero.flip(layout.logical_x_mask());
    Ok((zero, one))
}

/// Logical state read off the dense projection.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleState {
    pub a: Complex64,
    pub b: Complex64,
    pub probability: f64,
    /// Norm of the part of the projected state outside `span{|0>_L, |1>_L}`.
    pub residual: f64,
}

/// Projects `|chi>^N` through the trajectory's X then Z projectors.
pub fn oracle_state(layout: &CodeLayout, trajectory: &Trajectory, rot: &PhysicalRotation) -> Result<OracleState> {
    let (psi, probability) = project_trajectory(layout, trajectory, rot)?;
    if probability < IMPOSSIBLE_PROBABILITY {
        return Err(Error::ImpossibleTrajectory(probability));
    }
    let mut psi = psi;
    psi.normalize();
    let (zero, one) = codewords(layout, trajectory)?;
    let a = zero.inner(&psi);
    let b = one.inner(&psi);
    let residual = psi
        .amps
        .iter()
        .zip(zero.amps.iter().zip(&one.amps))
        .map(|(p, (z, o))| (p - a * z - b * o).norm_sqr())
        .sum::<f64>()
        .sqrt();
    Ok(OracleState {
        a,
        b,
        probability,
        residual,
    })
}

/// Unnormalised projected state and its probability.
pub fn project_trajectory(
    layout: &CodeLayout,
    trajectory: &Trajectory,
    rot: &PhysicalRotation,
) -> Result<(StateVector, f64)> {
    trajectory.check(layout)?;
    let mut psi = product_state(rot, layout.n_data)?;
    for (i, s) in layout.x_stabilizers.iter().enumerate() {
        psi = apply_projector(&psi, s, Pauli::X, trajectory.x_bit(i)).0;
    }
    for (i, s) in layout.z_stabilizers.iter().enumerate() {
        psi = apply_projector(&psi, s, Pauli::Z, trajectory.z_bit(i)).0;
    }
    let p = psi.norm_sqr();
    Ok((psi, p))
}

/// `|<u|v>|^2` for two normalised qubit states given as amplitude pairs.
pub fn pair_fidelity(u: (Complex64, Complex64), v: (Complex64, Complex64)) -> f64 {
    (u.0.conj() * v.0 + u.1.conj() * v.1).norm_sqr()
}
