//! Exact derivation of heralded logical states.
//!
//! [`derive_state`] follows a single trajectory: it expands the Z-sector
//! parity constraints into the coset of consistent basis strings, projects
//! each string onto the X-sector outcome, and reads the logical amplitudes
//! off the Pauli frame. Its cost is exponential in the number of Z
//! stabilisers only.
//!
//! [`enumerate_all_states`] is the brute-force route: it scans all `2^N`
//! basis strings, buckets them by Z syndrome, and Walsh-transforms each
//! X-orbit so every X trajectory falls out at once.
//!
//! Every term carries the Hamming weight `j` of the basis string it started
//! from, and contributes the monomial `alpha^(N-j) beta^j`. Projection onto
//! the X sector moves terms to other basis strings but never changes `j`.
//!
//! A term survives the Z sector only when its parities *equal* the measured
//! outcomes; terms with any mismatching parity are projected out. A
//! pseudocode rendering of this step that keeps a term when the product of
//! its parity and the outcome is nonzero reads the other way round; that
//! reading drops the consistent terms and is not what is implemented.
//!
//! # Pauli frame
//!
//! For a trajectory, the reference string `r0` is the lowest-weight basis
//! string with the measured Z syndrome and even parity on `logical_z` (ties
//! go to the smallest printed string, qubit 0 first). Then
//! `|0>_L ∝ P_X |r0>` and `|1>_L = X_L |0>_L`, with `X_L` the layout's
//! `logical_x` chain. `alpha_L` is the coefficient of `|r0>` in the projected
//! state and `beta_L` that of `|r0 xor X_L>`, each scaled by `2^(#X)`.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::amplitude::{AmplitudePoly, LogicalStateForm};
use crate::error::{Error, Result};
use crate::gf2::{self, Decomposer};
use crate::layout::CodeLayout;
use crate::trajectory::{bits_to_string, Trajectory};

/// Largest number of Z stabilisers the exact single-trajectory path accepts.
pub const MAX_Z_STABILIZERS: usize = 24;
/// Largest data-qubit count accepted by [`enumerate_all_states`].
pub const MAX_ENUMERATE_QUBITS: usize = 25;
/// Cap on the number of terms materialised by [`project_x_sector`].
pub const MAX_PROJECTED_TERMS: usize = 1 << 24;

/// One signed basis string and the Hamming weight of the string it came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Term {
    pub basis: u64,
    pub sign: i8,
    pub hamming_origin: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct TermSet {
    pub n: usize,
    pub terms: Vec<Term>,
}

impl TermSet {
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// `(printed basis string, sign, j)` rows, for display and comparison.
    pub fn rows(&self) -> Vec<(String, i8, u32)> {
        self.terms
            .iter()
            .map(|t| (bits_to_string(t.basis, self.n), t.sign, t.hamming_origin))
            .collect()
    }
}

/// Reference basis strings of the logical codewords for one trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PauliFrame {
    /// Basis string whose projected coefficient is `alpha_L`.
    pub ref0: u64,
    /// `ref0 xor logical_x`, whose projected coefficient is `beta_L`.
    pub ref1: u64,
}

impl PauliFrame {
    /// Picks the frame from the Z-sector expansion of a trajectory.
    pub fn from_z_terms(layout: &CodeLayout, z_terms: &TermSet) -> Result<Self> {
        let lz = layout.logical_z_mask();
        let n = layout.n_data;
        let ref0 = z_terms
            .terms
            .iter()
            .map(|t| t.basis)
            .filter(|&b| !gf2::parity(b & lz))
            .min_by_key(|&b| frame_key(b, n))
            .ok_or(Error::InconsistentTrajectory)?;
        Ok(Self {
            ref0,
            ref1: ref0 ^ layout.logical_x_mask(),
        })
    }
}

/// Ordering used to pick `ref0`: Hamming weight, then printed string.
pub fn frame_key(basis: u64, n: usize) -> (u32, u64) {
    let printed = if n == 0 { 0 } else { basis.reverse_bits() >> (64 - n) };
    (basis.count_ones(), printed)
}

/// Number of set bits in a basis string.
pub fn hamming(basis: u64) -> u32 {
    basis.count_ones()
}

/// Subsets of `unseen` whose size has the given parity.
///
/// Subsets come out by increasing size, each size in lexicographic order of
/// positions within `unseen`. With `unseen` empty there is one (empty)
/// subset for even parity and none for odd parity.
pub fn parity_combinations(unseen: &[usize], odd: bool) -> impl Iterator<Item = Vec<usize>> + '_ {
    let n = unseen.len();
    let start = usize::from(odd);
    (start..=n).step_by(2).flat_map(move |k| {
        Combinations::new(n, k).map(move |c| c.into_iter().map(|i| unseen[i]).collect())
    })
}

/// k-subsets of `0..n` in lexicographic order.
struct Combinations {
    n: usize,
    idx: Vec<usize>,
    done: bool,
}

impl Combinations {
    fn new(n: usize, k: usize) -> Self {
        Self {
            n,
            idx: (0..k).collect(),
            done: k > n,
        }
    }
}

impl Iterator for Combinations {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        if self.done {
            return None;
        }
        let out = self.idx.clone();
        let k = self.idx.len();
        // advance to the next combination
        let mut i = k;
        loop {
            if i == 0 {
                self.done = true;
                break;
            }
            i -= 1;
            if self.idx[i] < self.n - k + i {
                self.idx[i] += 1;
                for t in i + 1..k {
                    self.idx[t] = self.idx[t - 1] + 1;
                }
                break;
            }
        }
        Some(out)
    }
}

fn parity_combination_masks(unseen: u64, odd: bool) -> Vec<u64> {
    let idx = gf2::indices_of(unseen);
    parity_combinations(&idx, odd)
        .map(|c| gf2::mask_of(&c))
        .collect()
}

fn check_z_guard(layout: &CodeLayout) -> Result<()> {
    if layout.num_z() > MAX_Z_STABILIZERS {
        return Err(Error::TooLarge {
            what: "Z stabiliser count",
            size: layout.num_z(),
            limit: MAX_Z_STABILIZERS,
        });
    }
    Ok(())
}

/// All basis strings whose Z-stabiliser parities equal `trajectory`'s Z bits.
///
/// Strings are built stabiliser by stabiliser: bits already fixed by earlier
/// stabilisers determine the parity still needed from the unseen bits, and
/// every unseen-bit combination with that parity extends the string. Qubits
/// outside every Z stabiliser are left free. The result is sorted by basis
/// index.
pub fn expand_z_sector(layout: &CodeLayout, trajectory: &Trajectory) -> Result<TermSet> {
    trajectory.check(layout)?;
    check_z_guard(layout)?;
    let mut seen = 0u64;
    let mut partial: Vec<u64> = vec![0];
    for (i, support) in layout.z_masks().into_iter().enumerate() {
        let seen_here = support & seen;
        let unseen = support & !seen;
        let even = parity_combination_masks(unseen, false);
        let odd = parity_combination_masks(unseen, true);
        let mut next = Vec::with_capacity(partial.len() * even.len().max(1));
        for &v in &partial {
            let t = trajectory.z_bit(i) ^ gf2::parity(v & seen_here);
            let combos = if t { &odd } else { &even };
            next.extend(combos.iter().map(|&c| v | c));
        }
        partial = next;
        seen |= support;
        if partial.is_empty() {
            return Err(Error::InconsistentTrajectory);
        }
    }
    let all = if layout.n_data == 64 {
        u64::MAX
    } else {
        (1u64 << layout.n_data) - 1
    };
    let free = all & !seen;
    if free != 0 {
        let free_subsets: Vec<u64> = subsets_of(free).collect();
        partial = partial
            .iter()
            .flat_map(|&v| free_subsets.iter().map(move |&s| v | s))
            .collect();
    }
    partial.sort_unstable();
    Ok(TermSet {
        n: layout.n_data,
        terms: partial
            .into_iter()
            .map(|basis| Term {
                basis,
                sign: 1,
                hamming_origin: hamming(basis),
            })
            .collect(),
    })
}

fn subsets_of(mask: u64) -> impl Iterator<Item = u64> {
    // standard submask walk, including 0
    let mut sub = Some(mask);
    std::iter::from_fn(move || {
        let s = sub?;
        sub = if s == 0 { None } else { Some((s - 1) & mask) };
        Some(s)
    })
}

/// Applies the signed X-sector projector to every term.
///
/// Each term expands into one term per subset `S` of X stabilisers:
/// basis `xor` the supports in `S`, sign multiplied by `(-1)^(outcomes in S)`.
/// Subsets are visited in counting order (bit `i` = stabiliser `i`), so the
/// first image of each term is the term itself.
pub fn project_x_sector(layout: &CodeLayout, terms: &TermSet, trajectory: &Trajectory) -> Result<TermSet> {
    trajectory.check(layout)?;
    let nx = layout.num_x();
    let size = terms.len().saturating_mul(1usize.checked_shl(nx as u32).unwrap_or(usize::MAX));
    if nx >= 63 || size > MAX_PROJECTED_TERMS {
        return Err(Error::TooLarge {
            what: "projected term count",
            size,
            limit: MAX_PROJECTED_TERMS,
        });
    }
    let xs = layout.x_masks();
    let flips: Vec<(u64, i8)> = (0..1u64 << nx)
        .map(|s| {
            let support = gf2::indices_of(s).iter().fold(0u64, |m, &g| m ^ xs[g]);
            let sign = if gf2::parity(s & trajectory.x()) { -1 } else { 1 };
            (support, sign)
        })
        .collect();
    let mut out = Vec::with_capacity(size);
    for t in &terms.terms {
        for &(support, sign) in &flips {
            out.push(Term {
                basis: t.basis ^ support,
                sign: t.sign * sign,
                hamming_origin: t.hamming_origin,
            });
        }
    }
    Ok(TermSet {
        n: terms.n,
        terms: out,
    })
}

/// Collects projected terms into `(alpha_L, beta_L)`.
///
/// Terms landing on `frame.ref0` feed `alpha_L`, those on `frame.ref1` feed
/// `beta_L`; each adds its sign to the coefficient of its Hamming origin.
/// Every other basis string of the orbit carries the same amplitude up to
/// the frame sign, so reading the two references loses nothing.
pub fn collect_logical(
    layout: &CodeLayout,
    trajectory: &Trajectory,
    projected: &TermSet,
    frame: &PauliFrame,
) -> LogicalStateForm {
    let n = layout.n_data;
    let mut alpha = AmplitudePoly::zero(n);
    let mut beta = AmplitudePoly::zero(n);
    for t in &projected.terms {
        if t.basis == frame.ref0 {
            alpha.add_term(t.hamming_origin as usize, t.sign as i64);
        } else if t.basis == frame.ref1 {
            beta.add_term(t.hamming_origin as usize, t.sign as i64);
        }
    }
    LogicalStateForm {
        trajectory: *trajectory,
        alpha,
        beta,
    }
}

/// Intermediate tables of one derivation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DerivationTrace {
    pub z_terms: TermSet,
    pub projected: TermSet,
    pub frame: PauliFrame,
    pub form: LogicalStateForm,
}

#[derive(Serialize)]
struct TermRow {
    basis: String,
    sign: i8,
    j: u32,
}

impl Serialize for DerivationTrace {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let rows = |t: &TermSet| -> Vec<TermRow> {
            t.rows()
                .into_iter()
                .map(|(basis, sign, j)| TermRow { basis, sign, j })
                .collect()
        };
        let n = self.z_terms.n;
        let mut st = s.serialize_struct("DerivationTrace", 5)?;
        st.serialize_field("z_terms", &rows(&self.z_terms))?;
        st.serialize_field("projected", &rows(&self.projected))?;
        st.serialize_field("ref0", &bits_to_string(self.frame.ref0, n))?;
        st.serialize_field("ref1", &bits_to_string(self.frame.ref1, n))?;
        st.serialize_field("form", &self.form)?;
        st.end()
    }
}

/// Runs expand, project, and collect explicitly, keeping every table.
///
/// The projection materialises `|coset| * 2^(#X)` terms; use
/// [`derive_state`] when only the form is needed.
pub fn derive_with_trace(layout: &CodeLayout, trajectory: &Trajectory) -> Result<DerivationTrace> {
    let z_terms = expand_z_sector(layout, trajectory)?;
    let frame = PauliFrame::from_z_terms(layout, &z_terms)?;
    let projected = project_x_sector(layout, &z_terms, trajectory)?;
    let form = collect_logical(layout, trajectory, &projected, &frame);
    Ok(DerivationTrace {
        z_terms,
        projected,
        frame,
        form,
    })
}

/// Logical state form heralded by `trajectory`.
///
/// Equivalent to [`derive_with_trace`] but the X projection is folded into
/// the collection: each coset string is mapped onto its frame reference by
/// solving for the X stabilisers that connect them, and contributes the
/// parity of the matching outcomes as its sign.
pub fn derive_state(layout: &CodeLayout, trajectory: &Trajectory) -> Result<LogicalStateForm> {
    let z_terms = expand_z_sector(layout, trajectory)?;
    let frame = PauliFrame::from_z_terms(layout, &z_terms)?;
    let lz = layout.logical_z_mask();
    let n = layout.n_data;
    let x_out = trajectory.x();
    let decomposer = (x_out != 0).then(|| Decomposer::new(&layout.x_masks()));

    let contribution = |basis: u64| -> (bool, usize, i64) {
        let odd = gf2::parity(basis & lz);
        let sign = match &decomposer {
            None => 1,
            Some(dec) => {
                let reference = if odd { frame.ref1 } else { frame.ref0 };
                let combo = dec
                    .decompose(basis ^ reference)
                    .expect("coset strings of equal logical parity differ by X stabilisers");
                if gf2::parity(combo & x_out) {
                    -1
                } else {
                    1
                }
            }
        };
        (odd, hamming(basis) as usize, sign)
    };

    let accumulate = |(mut a, mut b): (Vec<i64>, Vec<i64>), t: &Term| {
        let (odd, j, s) = contribution(t.basis);
        if odd {
            b[j] += s;
        } else {
            a[j] += s;
        }
        (a, b)
    };
    let empty = || (vec![0i64; n + 1], vec![0i64; n + 1]);
    let (a, b) = if z_terms.len() >= 1 << 14 {
        z_terms
            .terms
            .par_iter()
            .fold(empty, accumulate)
            .reduce(empty, |(mut a1, mut b1), (a2, b2)| {
                a1.iter_mut().zip(a2).for_each(|(x, y)| *x += y);
                b1.iter_mut().zip(b2).for_each(|(x, y)| *x += y);
                (a1, b1)
            })
    } else {
        z_terms.terms.iter().fold(empty(), accumulate)
    };
    Ok(LogicalStateForm {
        trajectory: *trajectory,
        alpha: AmplitudePoly::from_coeffs(a),
        beta: AmplitudePoly::from_coeffs(b),
    })
}

/// Forms for every trajectory of `layout`, by exhaustive enumeration of
/// basis strings.
pub fn enumerate_all_states(layout: &CodeLayout) -> Result<BTreeMap<Trajectory, LogicalStateForm>> {
    enumerate_states(layout, false)
}

/// Like [`enumerate_all_states`] but restricted to trivial X outcomes.
pub fn enumerate_trivial_x_states(layout: &CodeLayout) -> Result<BTreeMap<Trajectory, LogicalStateForm>> {
    enumerate_states(layout, true)
}

fn enumerate_states(layout: &CodeLayout, trivial_x_only: bool) -> Result<BTreeMap<Trajectory, LogicalStateForm>> {
    let n = layout.n_data;
    if n > MAX_ENUMERATE_QUBITS {
        return Err(Error::TooLarge {
            what: "data qubit count for full enumeration",
            size: n,
            limit: MAX_ENUMERATE_QUBITS,
        });
    }
    let nx = layout.num_x();
    let nz = layout.num_z();
    let zs = layout.z_masks();
    let xs = layout.x_masks();
    let lz = layout.logical_z_mask();
    let lx = layout.logical_x_mask();

    // frame reference per Z syndrome: lowest frame_key among even-logical strings
    let mut refs: Vec<Option<u64>> = vec![None; 1 << nz];
    for basis in 0..(1u64 << n) {
        if gf2::parity(basis & lz) {
            continue;
        }
        let syndrome = zs
            .iter()
            .enumerate()
            .fold(0u64, |s, (i, &m)| s | (u64::from(gf2::parity(basis & m)) << i));
        let slot = &mut refs[syndrome as usize];
        if slot.is_none_or(|r| frame_key(basis, n) < frame_key(r, n)) {
            *slot = Some(basis);
        }
    }

    // orbit images ref xor X_S, S in counting order
    let orbit: Vec<u64> = (0..1u64 << nx)
        .map(|s| gf2::indices_of(s).iter().fold(0u64, |m, &g| m ^ xs[g]))
        .collect();
    let x_range: Vec<u64> = if trivial_x_only { vec![0] } else { (0..1u64 << nx).collect() };

    let per_syndrome: Vec<Vec<LogicalStateForm>> = (0..1u64 << nz)
        .into_par_iter()
        .map(|syndrome| {
            let ref0 = refs[syndrome as usize].expect("every syndrome is reachable");
            let alpha = walsh_orbit(ref0, &orbit, n);
            let beta = walsh_orbit(ref0 ^ lx, &orbit, n);
            x_range
                .iter()
                .map(|&x| LogicalStateForm {
                    trajectory: Trajectory::new(x, nx, syndrome, nz),
                    alpha: AmplitudePoly::from_coeffs(alpha[x as usize].clone()),
                    beta: AmplitudePoly::from_coeffs(beta[x as usize].clone()),
                })
                .collect()
        })
        .collect();
    Ok(per_syndrome
        .into_iter()
        .flatten()
        .map(|f| (f.trajectory, f))
        .collect())
}

/// `out[x][j] = sum_S (-1)^{|x & S|} [hamming(r ^ X_S) == j]` via an in-place
/// Walsh-Hadamard transform over the orbit index.
fn walsh_orbit(reference: u64, orbit: &[u64], n: usize) -> Vec<Vec<i64>> {
    let mut table: Vec<Vec<i64>> = orbit
        .iter()
        .map(|&img| {
            let mut row = vec![0i64; n + 1];
            row[hamming(reference ^ img) as usize] = 1;
            row
        })
        .collect();
    let len = table.len();
    let mut h = 1;
    while h < len {
        for block in (0..len).step_by(2 * h) {
            for i in block..block + h {
                let (lo, hi) = table.split_at_mut(i + h);
                let (u, v) = (&mut lo[i], &mut hi[0]);
                for j in 0..=n {
                    let (a, b) = (u[j], v[j]);
                    u[j] = a + b;
                    v[j] = a - b;
                }
            }
        }
        h *= 2;
    }
    table
}
