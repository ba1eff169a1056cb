//! C ABI over the tinj library.
//!
//! Layouts and derived forms are opaque handles freed with their `_free`
//! function. Every call returns a [`TinjStatus`]; on failure the message is
//! available from [`tinj_last_error`] on the same thread. Strings returned
//! through `char **` out-parameters are owned by the caller and released
//! with [`tinj_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use tinj::amplitude::{self, LogicalStateForm, PhysicalRotation};
use tinj::cli;
use tinj::layout::{CodeLayout, Variant};
use tinj::noise_sim::{self, ExperimentConfig, ExperimentResult, NoiseModel};
use tinj::postselect;
use tinj::trajectory::Trajectory;
use tinj::Error;

pub const TINJ_VARIANT_UNROTATED: i32 = 0;
pub const TINJ_VARIANT_ROTATED: i32 = 1;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TinjStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    TooLarge = 3,
    /// The trajectory cannot occur, or its logical state vanishes.
    Impossible = 4,
    Failure = 5,
    Panic = 6,
}

/// Opaque code layout.
pub struct TinjLayout(CodeLayout);

/// Opaque logical state form heralded by one trajectory.
pub struct TinjForm(LogicalStateForm);

/// Parameters of a noisy injection experiment.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct TinjSimConfig {
    pub distance: u32,
    pub theta: f64,
    pub phi: f64,
    pub p1: f64,
    pub p2: f64,
    pub p_meas: f64,
    /// Noisy sweeps; 0 means the distance.
    pub rounds: u32,
    pub shots: u64,
    pub seed: u64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> TinjStatus {
    match e {
        Error::InvalidDistance(_)
        | Error::TrajectoryLength { .. }
        | Error::TrajectoryParse(_)
        | Error::UnsupportedLayout
        | Error::InvalidParameter(_)
        | Error::Json(_) => TinjStatus::InvalidArgument,
        Error::TooLarge { .. } => TinjStatus::TooLarge,
        Error::ImpossibleTrajectory(_) | Error::ZeroState | Error::InconsistentTrajectory => TinjStatus::Impossible,
        _ => TinjStatus::Failure,
    }
}

struct Fail(TinjStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

impl From<serde_json::Error> for Fail {
    fn from(e: serde_json::Error) -> Self {
        Fail(TinjStatus::InvalidArgument, e.to_string())
    }
}

fn null(what: &str) -> Fail {
    Fail(TinjStatus::NullPointer, format!("{what} is null"))
}

/// Runs `f`, recording any error or panic.
fn guard(f: impl FnOnce() -> Result<(), Fail>) -> TinjStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            TinjStatus::Ok
        }
        Ok(Err(Fail(s, msg))) => {
            set_error(msg);
            s
        }
        Err(_) => {
            set_error("internal panic".into());
            TinjStatus::Panic
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Fail(TinjStatus::InvalidArgument, format!("{what} is not UTF-8")))
}

unsafe fn put<T>(out: *mut T, v: T, what: &str) -> Result<(), Fail> {
    if out.is_null() {
        return Err(null(what));
    }
    *out = v;
    Ok(())
}

unsafe fn put_handle<T>(out: *mut *mut T, v: T) -> Result<(), Fail> {
    if out.is_null() {
        return Err(null("out"));
    }
    *out = Box::into_raw(Box::new(v));
    Ok(())
}

unsafe fn put_string(out: *mut *mut c_char, s: String) -> Result<(), Fail> {
    let c = CString::new(s).map_err(|_| Fail(TinjStatus::Failure, "output contains NUL".into()))?;
    if out.is_null() {
        return Err(null("out"));
    }
    *out = c.into_raw();
    Ok(())
}

unsafe fn handle<'a, T>(p: *const T, what: &str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or_else(|| null(what))
}

fn rotation(theta: f64, phi: f64) -> Result<PhysicalRotation, Fail> {
    Ok(PhysicalRotation::new(theta, phi)?)
}

/// Message of the last failed call on this thread, or null. Valid until the
/// next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn tinj_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// # Safety
/// `s` must be null or a string returned by this library and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn tinj_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Builds a layout; `variant` is one of the `TINJ_VARIANT_*` constants.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn tinj_layout_new(distance: u32, variant: i32, out: *mut *mut TinjLayout) -> TinjStatus {
    guard(|| {
        let variant = match variant {
            TINJ_VARIANT_UNROTATED => Variant::Unrotated,
            TINJ_VARIANT_ROTATED => Variant::Rotated,
            v => return Err(Fail(TinjStatus::InvalidArgument, format!("unknown variant {v}"))),
        };
        let l = CodeLayout::new(distance as usize, variant)?;
        put_handle(out, TinjLayout(l))
    })
}

/// # Safety
/// `json` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn tinj_layout_from_json(json: *const c_char, out: *mut *mut TinjLayout) -> TinjStatus {
    guard(|| {
        let l = CodeLayout::from_json(str_arg(json, "json")?)?;
        put_handle(out, TinjLayout(l))
    })
}

/// # Safety
/// `layout` must be null or a handle from this library that is not yet freed.
#[no_mangle]
pub unsafe extern "C" fn tinj_layout_free(layout: *mut TinjLayout) {
    if !layout.is_null() {
        drop(Box::from_raw(layout));
    }
}

/// Number of data qubits and of X and Z stabilisers.
///
/// # Safety
/// `layout` must be a live handle; the out-pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn tinj_layout_counts(
    layout: *const TinjLayout,
    n_data: *mut usize,
    n_x: *mut usize,
    n_z: *mut usize,
) -> TinjStatus {
    guard(|| {
        let l = &handle(layout, "layout")?.0;
        put(n_data, l.n_data, "n_data")?;
        put(n_x, l.num_x(), "n_x")?;
        put(n_z, l.num_z(), "n_z")
    })
}

/// # Safety
/// `layout` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn tinj_layout_to_json(layout: *const TinjLayout, out: *mut *mut c_char) -> TinjStatus {
    guard(|| put_string(out, handle(layout, "layout")?.0.to_json()))
}

/// Derives the logical state form for a trajectory such as `"x=00 z=01"`.
///
/// # Safety
/// `layout` must be a live handle, `trajectory` a NUL-terminated string and
/// `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn tinj_derive(
    layout: *const TinjLayout,
    trajectory: *const c_char,
    out: *mut *mut TinjForm,
) -> TinjStatus {
    guard(|| {
        let l = &handle(layout, "layout")?.0;
        let t = Trajectory::parse_for(l, str_arg(trajectory, "trajectory")?)?;
        let form = tinj::derive_state(l, &t)?;
        put_handle(out, TinjForm(form))
    })
}

/// # Safety
/// `form` must be null or a handle from this library that is not yet freed.
#[no_mangle]
pub unsafe extern "C" fn tinj_form_free(form: *mut TinjForm) {
    if !form.is_null() {
        drop(Box::from_raw(form));
    }
}

/// Number of coefficients in each amplitude polynomial (data qubits plus one).
///
/// # Safety
/// `form` must be a live handle and `len` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn tinj_form_num_coefficients(form: *const TinjForm, len: *mut usize) -> TinjStatus {
    guard(|| put(len, handle(form, "form")?.0.alpha.coeffs().len(), "len"))
}

/// Copies the integer coefficients of alpha_L and beta_L; entry `j`
/// multiplies `cos(theta/2)^(N-j) (e^{i phi} sin(theta/2))^j`.
///
/// # Safety
/// `form` must be a live handle; `alpha` and `beta` must each hold `len`
/// elements, where `len` equals [`tinj_form_num_coefficients`].
#[no_mangle]
pub unsafe extern "C" fn tinj_form_coefficients(
    form: *const TinjForm,
    alpha: *mut i64,
    beta: *mut i64,
    len: usize,
) -> TinjStatus {
    guard(|| {
        let f = &handle(form, "form")?.0;
        let (a, b) = (f.alpha.coeffs(), f.beta.coeffs());
        if len != a.len() {
            return Err(Fail(TinjStatus::InvalidArgument, format!("need {} coefficients, got {len}", a.len())));
        }
        if alpha.is_null() || beta.is_null() {
            return Err(null("coefficient buffer"));
        }
        ptr::copy_nonoverlapping(a.as_ptr(), alpha, len);
        ptr::copy_nonoverlapping(b.as_ptr(), beta, len);
        Ok(())
    })
}

/// Logical Bloch angles at the physical rotation `(theta, phi)`.
///
/// # Safety
/// `form` must be a live handle; the out-pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn tinj_form_bloch(
    form: *const TinjForm,
    theta: f64,
    phi: f64,
    theta_l: *mut f64,
    phi_l: *mut f64,
) -> TinjStatus {
    guard(|| {
        let b = amplitude::to_bloch(&handle(form, "form")?.0, &rotation(theta, phi)?)?;
        put(theta_l, b.theta_l, "theta_l")?;
        put(phi_l, b.phi_l, "phi_l")
    })
}

/// Probability of the form's trajectory at the physical rotation.
///
/// # Safety
/// `form` must be a live handle and `probability` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn tinj_form_probability(
    form: *const TinjForm,
    theta: f64,
    phi: f64,
    probability: *mut f64,
) -> TinjStatus {
    guard(|| {
        let p = amplitude::trajectory_probability(&handle(form, "form")?.0, &rotation(theta, phi)?);
        put(probability, p, "probability")
    })
}

/// # Safety
/// `form` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn tinj_form_to_json(form: *const TinjForm, out: *mut *mut c_char) -> TinjStatus {
    guard(|| put_string(out, serde_json::to_string(&handle(form, "form")?.0)?))
}

/// Runs a noisy injection experiment on the rotated code and returns its
/// aggregate result as JSON.
///
/// # Safety
/// `config` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn tinj_simulate_json(config: *const TinjSimConfig, out: *mut *mut c_char) -> TinjStatus {
    guard(|| {
        let c = *handle(config, "config")?;
        let noise = NoiseModel::new(c.p1, c.p2, c.p_meas)?;
        let mut cfg = ExperimentConfig::new(c.distance as usize, rotation(c.theta, c.phi)?, noise, c.shots, c.seed);
        if c.rounds > 0 {
            cfg.rounds = c.rounds as usize;
        }
        let result = noise_sim::run_experiment(&cfg)?;
        put_string(out, serde_json::to_string(&result)?)
    })
}

/// Builds a whitelist from the training result and applies it to the
/// evaluation result (the training result itself when `eval_json` is null).
/// Returns the table and the filtered aggregate as JSON.
///
/// # Safety
/// `train_json` must be a NUL-terminated string, `eval_json` null or one,
/// and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn tinj_postselect_json(
    train_json: *const c_char,
    eval_json: *const c_char,
    budget: f64,
    out: *mut *mut c_char,
) -> TinjStatus {
    guard(|| {
        let train: ExperimentResult = serde_json::from_str(str_arg(train_json, "train_json")?)?;
        let eval: ExperimentResult = if eval_json.is_null() {
            train.clone()
        } else {
            serde_json::from_str(str_arg(eval_json, "eval_json")?)?
        };
        let table = postselect::build_lookup(&train.stats, budget)?;
        let filtered = cli::filtered(&table, &eval);
        let v = serde_json::json!({ "table": table, "filtered": filtered });
        put_string(out, v.to_string())
    })
}
