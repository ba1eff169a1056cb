//! Exact logical-amplitude polynomials and their numeric evaluation.
//!
//! An [`AmplitudePoly`] with coefficients `c_0..c_N` stands for
//! `sum_j c_j * alpha^(N-j) * beta^j`, where `j` is the Hamming weight of the
//! computational basis string the term came from. Coefficients are exact
//! integers; floating point only enters in [`evaluate`].

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::trajectory::Trajectory;

/// Magnitude below which an evaluated amplitude pair counts as zero.
pub const ZERO_STATE_EPS: f64 = 1e-12;

/// Transversal single-qubit state `cos(theta/2)|0> + e^{i phi} sin(theta/2)|1>`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalRotation {
    pub theta: f64,
    pub phi: f64,
}

impl PhysicalRotation {
    /// `theta` must lie in `[0, pi]`; `phi` is wrapped into `[0, 2 pi)`.
    pub fn new(theta: f64, phi: f64) -> Result<Self> {
        if !(0.0..=PI).contains(&theta) || !phi.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "rotation (theta={theta}, phi={phi}) out of range"
            )));
        }
        Ok(Self {
            theta,
            phi: phi.rem_euclid(2.0 * PI),
        })
    }

    pub fn alpha(&self) -> Complex64 {
        Complex64::new((self.theta / 2.0).cos(), 0.0)
    }

    pub fn beta(&self) -> Complex64 {
        Complex64::from_polar((self.theta / 2.0).sin(), self.phi)
    }
}

/// Integer-coefficient polynomial in the monomial basis `alpha^(n-j) beta^j`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AmplitudePoly {
    coeffs: Vec<i64>,
}

impl AmplitudePoly {
    pub fn zero(n: usize) -> Self {
        Self {
            coeffs: vec![0; n + 1],
        }
    }

    pub fn from_coeffs(coeffs: Vec<i64>) -> Self {
        assert!(!coeffs.is_empty(), "polynomial needs n+1 >= 1 coefficients");
        Self { coeffs }
    }

    pub fn n(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[i64] {
        &self.coeffs
    }

    pub fn add_term(&mut self, j: usize, c: i64) {
        self.coeffs[j] += c;
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    pub fn negate(&mut self) {
        for c in &mut self.coeffs {
            *c = -*c;
        }
    }
}

impl std::ops::AddAssign<&AmplitudePoly> for AmplitudePoly {
    fn add_assign(&mut self, rhs: &AmplitudePoly) {
        assert_eq!(self.n(), rhs.n());
        for (a, b) in self.coeffs.iter_mut().zip(&rhs.coeffs) {
            *a += b;
        }
    }
}

impl std::fmt::Display for AmplitudePoly {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let n = self.n();
        let mut first = true;
        for (j, &c) in self.coeffs.iter().enumerate() {
            if c == 0 {
                continue;
            }
            let sign = if c < 0 { "-" } else if first { "" } else { "+" };
            if !first {
                f.write_str(" ")?;
            }
            let mag = c.unsigned_abs();
            write!(f, "{sign}")?;
            if !first {
                f.write_str(" ")?;
            }
            if mag != 1 {
                write!(f, "{mag}")?;
            }
            let mono = |name: &str, e: usize| match e {
                0 => String::new(),
                1 => name.to_string(),
                e => format!("{name}^{e}"),
            };
            let a = mono("a", n - j);
            let b = mono("b", j);
            if a.is_empty() && b.is_empty() {
                write!(f, "1")?;
            }
            write!(f, "{a}{b}")?;
            first = false;
        }
        if first {
            f.write_str("0")?;
        }
        Ok(())
    }
}

/// Unnormalised logical state `alpha_L |0>_L + beta_L |1>_L` heralded by a trajectory.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LogicalStateForm {
    pub trajectory: Trajectory,
    pub alpha: AmplitudePoly,
    pub beta: AmplitudePoly,
}

#[derive(Serialize, Deserialize)]
struct FormRepr {
    trajectory: Trajectory,
    n: usize,
    alpha_coeffs: Vec<i64>,
    beta_coeffs: Vec<i64>,
}

impl Serialize for LogicalStateForm {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        FormRepr {
            trajectory: self.trajectory,
            n: self.n(),
            alpha_coeffs: self.alpha.coeffs.clone(),
            beta_coeffs: self.beta.coeffs.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for LogicalStateForm {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = FormRepr::deserialize(d)?;
        if r.alpha_coeffs.len() != r.n + 1 || r.beta_coeffs.len() != r.n + 1 {
            return Err(serde::de::Error::custom("coefficient count must be n + 1"));
        }
        Ok(LogicalStateForm {
            trajectory: r.trajectory,
            alpha: AmplitudePoly::from_coeffs(r.alpha_coeffs),
            beta: AmplitudePoly::from_coeffs(r.beta_coeffs),
        })
    }
}

impl LogicalStateForm {
    pub fn n(&self) -> usize {
        self.alpha.n()
    }

    /// True when the two polynomials are identical, i.e. the state is `|+>_L`
    /// for every rotation where it is defined.
    pub fn is_plus_state(&self) -> bool {
        self.alpha == self.beta
    }
}

/// Logical Bloch angles of a normalised state, global phase removed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlochPoint {
    pub theta_l: f64,
    pub phi_l: f64,
}

/// `sum_j c_j alpha^(n-j) beta^j` at the rotation's `(alpha, beta)`.
pub fn evaluate(poly: &AmplitudePoly, rot: &PhysicalRotation) -> Complex64 {
    evaluate_at(poly, rot.alpha(), rot.beta())
}

/// Horner-style evaluation in `beta / alpha` is unstable near `alpha = 0`, so
/// powers are accumulated directly.
pub fn evaluate_at(poly: &AmplitudePoly, alpha: Complex64, beta: Complex64) -> Complex64 {
    let n = poly.n();
    let mut alpha_pows = Vec::with_capacity(n + 1);
    let mut p = Complex64::new(1.0, 0.0);
    for _ in 0..=n {
        alpha_pows.push(p);
        p *= alpha;
    }
    let mut sum = Complex64::new(0.0, 0.0);
    let mut beta_pow = Complex64::new(1.0, 0.0);
    for (j, &c) in poly.coeffs().iter().enumerate() {
        if c != 0 {
            sum += alpha_pows[n - j] * beta_pow * c as f64;
        }
        beta_pow *= beta;
    }
    sum
}

/// Unit-norm `(alpha_L, beta_L)` with the first nonzero component real positive.
pub fn normalize(form: &LogicalStateForm, rot: &PhysicalRotation) -> Result<(Complex64, Complex64)> {
    let a = evaluate(&form.alpha, rot);
    let b = evaluate(&form.beta, rot);
    normalize_pair(a, b)
}

pub fn normalize_pair(a: Complex64, b: Complex64) -> Result<(Complex64, Complex64)> {
    if a.norm() < ZERO_STATE_EPS && b.norm() < ZERO_STATE_EPS {
        return Err(Error::ZeroState);
    }
    let norm = (a.norm_sqr() + b.norm_sqr()).sqrt();
    let (a, b) = (a / norm, b / norm);
    let lead = if a.norm() > ZERO_STATE_EPS { a } else { b };
    let phase = lead.conj() / lead.norm();
    Ok((a * phase, b * phase))
}

pub fn to_bloch(form: &LogicalStateForm, rot: &PhysicalRotation) -> Result<BlochPoint> {
    let (a, b) = normalize(form, rot)?;
    Ok(bloch_of_pair(a, b))
}

/// Bloch angles of a normalised pair; `theta_L = 2 acos|a|`, `phi_L = arg b - arg a`.
pub fn bloch_of_pair(a: Complex64, b: Complex64) -> BlochPoint {
    let theta_l = 2.0 * a.norm().clamp(0.0, 1.0).acos();
    let phi_l = if a.norm() < ZERO_STATE_EPS || b.norm() < ZERO_STATE_EPS {
        0.0
    } else {
        wrap_angle(b.arg() - a.arg())
    };
    BlochPoint { theta_l, phi_l }
}

/// Wraps into `(-pi, pi]`.
pub fn wrap_angle(x: f64) -> f64 {
    let mut y = x.rem_euclid(2.0 * PI);
    if y > PI {
        y -= 2.0 * PI;
    }
    y
}

/// Probability of observing `form.trajectory` on `|chi>^N`.
///
/// Each coefficient of the form sums one representative per X-stabiliser
/// orbit, so the projected squared norm is `(|alpha_L|^2 + |beta_L|^2)`
/// scaled by `2^-(number of X stabilisers)`.
pub fn trajectory_probability(form: &LogicalStateForm, rot: &PhysicalRotation) -> f64 {
    let a = evaluate(&form.alpha, rot);
    let b = evaluate(&form.beta, rot);
    (a.norm_sqr() + b.norm_sqr()) * 0.5f64.powi(form.trajectory.nx() as i32)
}

/// Ancilla resource states consumed by gate teleportation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "angle", rename_all = "snake_case")]
pub enum TeleportTarget {
    /// `(|0> + e^{i angle}|1>)/sqrt 2`, enacting `R_z(angle)`.
    Equatorial(f64),
    /// `cos(angle)|0> + i sin(angle)|1>`, enacting `R_x`.
    PolarReal(f64),
}

impl TeleportTarget {
    pub fn state(&self) -> (Complex64, Complex64) {
        match *self {
            Self::Equatorial(t) => {
                let s = std::f64::consts::FRAC_1_SQRT_2;
                (Complex64::new(s, 0.0), Complex64::from_polar(s, t))
            }
            Self::PolarReal(t) => (Complex64::new(t.cos(), 0.0), Complex64::new(0.0, t.sin())),
        }
    }

    /// `1 - |<target|state>|^2` for a normalised pair.
    pub fn residual(&self, a: Complex64, b: Complex64) -> f64 {
        let (ta, tb) = self.state();
        let overlap = ta.conj() * a + tb.conj() * b;
        (1.0 - overlap.norm_sqr()).max(0.0)
    }
}

/// Cartesian grid of physical rotations.
#[derive(Debug, Clone, PartialEq)]
pub struct RotationGrid {
    pub thetas: Vec<f64>,
    pub phis: Vec<f64>,
}

impl RotationGrid {
    pub fn single(rot: PhysicalRotation) -> Self {
        Self {
            thetas: vec![rot.theta],
            phis: vec![rot.phi],
        }
    }

    /// `n_theta` points over `[0, pi]` and `n_phi` over `[0, 2 pi)`.
    pub fn uniform(n_theta: usize, n_phi: usize) -> Self {
        Self {
            thetas: linspace(0.0, PI, n_theta),
            phis: (0..n_phi).map(|k| 2.0 * PI * k as f64 / n_phi as f64).collect(),
        }
    }

    pub fn points(&self) -> impl Iterator<Item = PhysicalRotation> + '_ {
        self.thetas.iter().flat_map(move |&theta| {
            self.phis
                .iter()
                .filter_map(move |&phi| PhysicalRotation::new(theta, phi).ok())
        })
    }
}

/// Inclusive evenly spaced points; a single point returns `lo`.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..n)
            .map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64)
            .collect(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TeleportMatch {
    pub trajectory: Trajectory,
    pub rotation: PhysicalRotation,
    pub residual: f64,
}

/// Searches `grid` for (trajectory, rotation) pairs whose normalised logical
/// state is within `threshold` of `target`.
///
/// With `refine` set, the best grid point of each form is polished by a
/// shrinking pattern search before thresholding. Matches come back sorted by
/// residual, then trajectory.
pub fn match_teleportation_target(
    forms: &[LogicalStateForm],
    target: TeleportTarget,
    grid: &RotationGrid,
    threshold: f64,
    refine: bool,
) -> Result<Vec<TeleportMatch>> {
    if forms.is_empty() {
        return Err(Error::InvalidParameter("no forms to match".into()));
    }
    let residual_at = |form: &LogicalStateForm, rot: &PhysicalRotation| -> Option<f64> {
        normalize(form, rot).ok().map(|(a, b)| target.residual(a, b))
    };
    let mut out = Vec::new();
    for form in forms {
        let mut best: Option<(PhysicalRotation, f64)> = None;
        for rot in grid.points() {
            let Some(r) = residual_at(form, &rot) else {
                continue;
            };
            if !refine && r <= threshold {
                out.push(TeleportMatch {
                    trajectory: form.trajectory,
                    rotation: rot,
                    residual: r,
                });
            }
            if best.is_none_or(|(_, b)| r < b) {
                best = Some((rot, r));
            }
        }
        if refine {
            if let Some((rot, r)) = best {
                let (rot, r) = pattern_search(|p| residual_at(form, p), rot, r, grid_step(grid));
                if r <= threshold {
                    out.push(TeleportMatch {
                        trajectory: form.trajectory,
                        rotation: rot,
                        residual: r,
                    });
                }
            }
        }
    }
    if out.is_empty() {
        return Err(Error::EmptyResult(threshold));
    }
    out.sort_by(|a, b| {
        a.residual
            .total_cmp(&b.residual)
            .then_with(|| a.trajectory.cmp(&b.trajectory))
    });
    Ok(out)
}

fn grid_step(grid: &RotationGrid) -> f64 {
    let spacing = |v: &[f64]| {
        if v.len() > 1 {
            (v[1] - v[0]).abs()
        } else {
            0.1
        }
    };
    spacing(&grid.thetas).max(spacing(&grid.phis)).max(1e-3)
}

fn pattern_search(
    f: impl Fn(&PhysicalRotation) -> Option<f64>,
    mut at: PhysicalRotation,
    mut val: f64,
    mut step: f64,
) -> (PhysicalRotation, f64) {
    while step > 1e-12 {
        let mut improved = false;
        for (dt, dp) in [(1.0, 0.0), (-1.0, 0.0), (0.0, 1.0), (0.0, -1.0)] {
            let theta = (at.theta + dt * step).clamp(0.0, PI);
            let Ok(cand) = PhysicalRotation::new(theta, at.phi + dp * step) else {
                continue;
            };
            if let Some(v) = f(&cand) {
                if v < val {
                    at = cand;
                    val = v;
                    improved = true;
                }
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    (at, val)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly(c: &[i64]) -> AmplitudePoly {
        AmplitudePoly::from_coeffs(c.to_vec())
    }

    // Golden forms for the d=2 unrotated code, trivial X sector.
    fn lambda_00() -> LogicalStateForm {
        LogicalStateForm {
            trajectory: Trajectory::from_bit_strings("00", "00").unwrap(),
            alpha: poly(&[1, 0, 0, 2, 1, 0]),
            beta: poly(&[0, 0, 2, 2, 0, 0]),
        }
    }

    fn lambda_01() -> LogicalStateForm {
        LogicalStateForm {
            trajectory: Trajectory::from_bit_strings("00", "01").unwrap(),
            alpha: poly(&[0, 1, 1, 1, 1, 0]),
            beta: poly(&[0, 1, 1, 1, 1, 0]),
        }
    }

    #[test]
    fn evaluate_at_poles_and_equator() {
        let zero = PhysicalRotation::new(0.0, 0.0).unwrap();
        assert!((evaluate(&lambda_00().alpha, &zero) - 1.0).norm() < 1e-15);
        assert!(evaluate(&lambda_00().beta, &zero).norm() < 1e-15);
        let eq = PhysicalRotation::new(PI / 2.0, 0.0).unwrap();
        let v = evaluate(&lambda_00().alpha, &eq);
        // (1+2+1) at alpha=beta=2^-1/2 over 5 factors: 4 / 2^{5/2}
        let coeff_sum: i64 = lambda_00().alpha.coeffs().iter().sum();
        assert!((v.re - coeff_sum as f64 / 2f64.powf(2.5)).abs() < 1e-15);
        assert!(v.im.abs() < 1e-15);
    }

    #[test]
    fn plus_state_for_any_generic_rotation() {
        for (t, p) in [(0.3, 0.0), (1.0, 0.3), (2.5, 4.0)] {
            let rot = PhysicalRotation::new(t, p).unwrap();
            let (a, b) = normalize(&lambda_01(), &rot).unwrap();
            let h = std::f64::consts::FRAC_1_SQRT_2;
            assert!((a - h).norm() < 1e-12 && (b - h).norm() < 1e-12);
            let bp = to_bloch(&lambda_01(), &rot).unwrap();
            assert!((bp.theta_l - PI / 2.0).abs() < 1e-9 && bp.phi_l.abs() < 1e-9);
        }
    }

    #[test]
    fn lambda_00_pole_behaviour() {
        let zero = PhysicalRotation::new(0.0, 0.0).unwrap();
        let (a, b) = normalize(&lambda_00(), &zero).unwrap();
        assert!((a - 1.0).norm() < 1e-15 && b.norm() < 1e-15);
        // no beta^5 term in either polynomial
        let pi = PhysicalRotation::new(PI, 0.7).unwrap();
        assert!(matches!(normalize(&lambda_00(), &pi), Err(Error::ZeroState)));
    }

    #[test]
    fn phase_canonicalisation() {
        let (a, b) = normalize_pair(Complex64::new(0.0, 2.0), Complex64::new(1.0, 1.0)).unwrap();
        assert!(a.im.abs() < 1e-15 && a.re > 0.0);
        assert!(((a.norm_sqr() + b.norm_sqr()) - 1.0).abs() < 1e-12);
        let (a, b) = normalize_pair(Complex64::new(0.0, 0.0), Complex64::new(0.0, -3.0)).unwrap();
        assert_eq!(a, Complex64::new(0.0, 0.0));
        assert!((b - 1.0).norm() < 1e-15);
        let bp = bloch_of_pair(a, b);
        assert!((bp.theta_l - PI).abs() < 1e-12);
    }

    #[test]
    fn display_polynomial() {
        assert_eq!(lambda_00().alpha.to_string(), "a^5 + 2a^2b^3 + ab^4");
        let mut p = poly(&[0, 1, 0, -1]);
        assert_eq!(p.to_string(), "a^2b - b^3");
        p.negate();
        assert_eq!(p.to_string(), "-a^2b + b^3");
        assert_eq!(AmplitudePoly::zero(2).to_string(), "0");
    }

    #[test]
    fn form_json_shape() {
        let f = lambda_00();
        let j = serde_json::to_value(&f).unwrap();
        assert_eq!(j["n"], 5);
        assert_eq!(j["alpha_coeffs"], serde_json::json!([1, 0, 0, 2, 1, 0]));
        assert_eq!(j["trajectory"]["z_bits"], "00");
        let back: LogicalStateForm = serde_json::from_value(j).unwrap();
        assert_eq!(back, f);
    }

    #[test]
    fn teleport_equatorial_zero_matches_plus() {
        let grid = RotationGrid::uniform(5, 5);
        let m = match_teleportation_target(
            &[lambda_00(), lambda_01()],
            TeleportTarget::Equatorial(0.0),
            &grid,
            1e-12,
            false,
        )
        .unwrap();
        assert!(m.iter().any(|m| m.trajectory == lambda_01().trajectory));
        assert!(m.iter().all(|m| m.residual <= 1e-12));
        assert!(matches!(
            match_teleportation_target(&[lambda_00()], TeleportTarget::PolarReal(0.3), &RotationGrid::single(PhysicalRotation::new(0.0, 0.0).unwrap()), 1e-9, false),
            Err(Error::EmptyResult(_))
        ));
    }

    #[test]
    fn rotation_validation() {
        assert!(PhysicalRotation::new(-0.1, 0.0).is_err());
        assert!(PhysicalRotation::new(3.2, 0.0).is_err());
        let r = PhysicalRotation::new(1.0, -1.0).unwrap();
        assert!((r.phi - (2.0 * PI - 1.0)).abs() < 1e-15);
        assert!(((r.alpha().norm_sqr() + r.beta().norm_sqr()) - 1.0).abs() < 1e-12);
    }
}
