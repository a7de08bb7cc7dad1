//! C ABI over the `glme` engine.
//!
//! Models and states are opaque heap handles released with the matching
//! `*_free` function. Every fallible call returns a [`GlmeStatus`]; on failure
//! the message is kept per thread and read back with
//! [`glme_last_error_message`]. Matrices cross the boundary as row-major
//! `double` buffers whose length is passed explicitly.

use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use glme::bosonic::{self, GaussianState};
use glme::entanglement::{log_negativity_bosonic, log_negativity_fermionic};
use glme::error::GlmeError;
use glme::fermionic::{self, FermionicGaussianState};
use glme::io::{self, StateFile};
use glme::linalg::RMat;
use glme::model::{validate_model, Flavor, GeneralizedLindbladModel, Tolerances};
use glme::propagate::Method;

/// Result of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GlmeStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidArgument = 2,
    BufferSize = 3,
    Parse = 4,
    Io = 5,
    Structural = 6,
    Positivity = 7,
    NonHermitian = 8,
    Stability = 9,
    Unphysical = 10,
    Boundary = 11,
    Numerical = 12,
    SpectralEvaluation = 13,
    Domain = 14,
    Truncation = 15,
    Panic = 16,
}

/// Particle statistics of a model or state.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GlmeKind {
    Bosonic = 0,
    Fermionic = 1,
}

/// Integration path for `glme_evolve*`.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GlmeMethod {
    Exact = 0,
    Rk4 = 1,
}

/// Opaque model handle.
pub struct GlmeModel {
    inner: GeneralizedLindbladModel,
}

/// Opaque Gaussian state handle (bosonic `(mean, V)` or fermionic `σ`).
pub struct GlmeState {
    inner: StateFile,
}

/// Slack allowed on the uncertainty bound for states passed in by callers.
pub const PHYSICALITY_TOL: f64 = 1e-8;

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: impl Into<String>) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg.into());
}

fn status_of(e: &GlmeError) -> GlmeStatus {
    match e {
        GlmeError::Structural { .. } => GlmeStatus::Structural,
        GlmeError::Positivity { .. } => GlmeStatus::Positivity,
        GlmeError::NonHermitian { .. } => GlmeStatus::NonHermitian,
        GlmeError::Stability { .. } => GlmeStatus::Stability,
        GlmeError::Unphysical { .. } => GlmeStatus::Unphysical,
        GlmeError::Boundary { .. } => GlmeStatus::Boundary,
        GlmeError::Numerical { .. } => GlmeStatus::Numerical,
        GlmeError::SpectralEvaluation { .. } => GlmeStatus::SpectralEvaluation,
        GlmeError::Domain(_) => GlmeStatus::Domain,
        GlmeError::Truncation { .. } => GlmeStatus::Truncation,
        GlmeError::Parse(_) => GlmeStatus::Parse,
        GlmeError::Io(_) => GlmeStatus::Io,
    }
}

struct Failure(GlmeStatus, String);

impl From<GlmeError> for Failure {
    fn from(e: GlmeError) -> Self {
        Failure(status_of(&e), e.to_string())
    }
}

fn fail<T>(status: GlmeStatus, msg: impl Into<String>) -> Result<T, Failure> {
    Err(Failure(status, msg.into()))
}

/// Runs `f`, recording any error or panic.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> GlmeStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            GlmeStatus::Ok
        }
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_error(format!("internal panic: {msg}"));
            GlmeStatus::Panic
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return fail(GlmeStatus::NullArgument, format!("{what} is null"));
    }
    CStr::from_ptr(p)
        .to_str()
        .or_else(|_| fail(GlmeStatus::InvalidArgument, format!("{what} is not valid UTF-8")))
}

unsafe fn ref_arg<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref()
        .ok_or_else(|| Failure(GlmeStatus::NullArgument, format!("{what} is null")))
}

unsafe fn out_arg<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Failure> {
    p.as_mut()
        .ok_or_else(|| Failure(GlmeStatus::NullArgument, format!("{what} is null")))
}

unsafe fn buffer<'a>(p: *mut f64, len: usize, need: usize, what: &str) -> Result<&'a mut [f64], Failure> {
    if p.is_null() {
        return fail(GlmeStatus::NullArgument, format!("{what} is null"));
    }
    if len < need {
        return fail(GlmeStatus::BufferSize, format!("{what} holds {len} values, {need} needed"));
    }
    Ok(std::slice::from_raw_parts_mut(p, need))
}

unsafe fn input<'a>(p: *const f64, len: usize, what: &str) -> Result<&'a [f64], Failure> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return fail(GlmeStatus::NullArgument, format!("{what} is null"));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

fn copy_matrix(m: &RMat, out: &mut [f64]) {
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            out[i * m.ncols() + j] = m[(i, j)];
        }
    }
}

fn square_from(data: &[f64], d: usize) -> RMat {
    RMat::from_row_slice(d, d, data)
}

fn kind_of(flavor: Flavor) -> GlmeKind {
    match flavor {
        Flavor::Bosonic => GlmeKind::Bosonic,
        Flavor::Fermionic => GlmeKind::Fermionic,
    }
}

fn method_of(m: GlmeMethod) -> Method {
    match m {
        GlmeMethod::Exact => Method::Exact,
        GlmeMethod::Rk4 => Method::Rk4,
    }
}

fn state_dim(s: &StateFile) -> usize {
    match s {
        StateFile::Bosonic(g) => g.v.nrows(),
        StateFile::Fermionic(f) => f.sigma.nrows(),
    }
}

fn require_physical(s: &StateFile) -> Result<(), Failure> {
    Ok(io::require_physical_state(s, PHYSICALITY_TOL)?)
}

fn boxed<T>(value: T, out: *mut *mut T) -> Result<(), Failure> {
    let slot = unsafe { out_arg(out, "out") }?;
    *slot = Box::into_raw(Box::new(value));
    Ok(())
}

/// Copies the calling thread's last error message into `buf` (NUL
/// terminated, truncated to `len`). Returns the full message length in bytes,
/// excluding the terminator.
///
/// # Safety
/// `buf` must be null or point to `len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn glme_last_error_message(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        if !buf.is_null() && len > 0 {
            let n = msg.len().min(len - 1);
            ptr::copy_nonoverlapping(msg.as_ptr(), buf.cast::<u8>(), n);
            *buf.add(n) = 0;
        }
        msg.len()
    })
}

/// Parses a model from JSON text (same schema as the CLI model files).
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn glme_model_from_json(json: *const c_char, out: *mut *mut GlmeModel) -> GlmeStatus {
    guard(|| {
        let text = str_arg(json, "json")?;
        boxed(
            GlmeModel {
                inner: io::parse_model(text)?,
            },
            out,
        )
    })
}

/// Reads a model file.
///
/// # Safety
/// `path` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn glme_model_load(path: *const c_char, out: *mut *mut GlmeModel) -> GlmeStatus {
    guard(|| {
        let path = str_arg(path, "path")?;
        boxed(
            GlmeModel {
                inner: io::load_model(std::path::Path::new(path))?,
            },
            out,
        )
    })
}

/// Releases a model. Null is ignored.
///
/// # Safety
/// `model` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn glme_model_free(model: *mut GlmeModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// Number of modes, or 0 for a null handle.
///
/// # Safety
/// `model` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn glme_model_n_modes(model: *const GlmeModel) -> usize {
    model.as_ref().map_or(0, |m| m.inner.n_modes)
}

/// # Safety
/// `model` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn glme_model_kind(model: *const GlmeModel, out: *mut GlmeKind) -> GlmeStatus {
    guard(|| {
        let m = ref_arg(model, "model")?;
        *out_arg(out, "out")? = kind_of(m.inner.flavor);
        Ok(())
    })
}

/// Validates with one tolerance for every check. `defects`, if not null,
/// receives `[hermitian_defect, min_gamma_eigenvalue, hamiltonian_symmetry_defect]`.
///
/// # Safety
/// `model` must be a live handle; `is_valid` writable; `defects` null or 3 writable doubles.
#[no_mangle]
pub unsafe extern "C" fn glme_model_validate(
    model: *const GlmeModel,
    tol: f64,
    is_valid: *mut bool,
    defects: *mut f64,
) -> GlmeStatus {
    guard(|| {
        let m = ref_arg(model, "model")?;
        if !(tol > 0.0 && tol.is_finite()) {
            return fail(GlmeStatus::InvalidArgument, format!("tolerance must be positive, got {tol}"));
        }
        let report = validate_model(&m.inner, &Tolerances::uniform(tol))?;
        *out_arg(is_valid, "is_valid")? = report.is_valid;
        if !defects.is_null() {
            let d = std::slice::from_raw_parts_mut(defects, 3);
            d[0] = report.hermitian_defect;
            d[1] = report.min_gamma_eigenvalue;
            d[2] = report.hamiltonian_symmetry_defect;
        }
        Ok(())
    })
}

/// Writes the `2N × 2N` drift (`A` or `X`) and diffusion (`D` or `Y`)
/// matrices row-major; each buffer needs `len ≥ 4N²`.
///
/// # Safety
/// `model` must be a live handle; both buffers must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn glme_model_drift_diffusion(
    model: *const GlmeModel,
    drift: *mut f64,
    diffusion: *mut f64,
    len: usize,
) -> GlmeStatus {
    guard(|| {
        let m = ref_arg(model, "model")?;
        let d = 2 * m.inner.n_modes;
        let drift = buffer(drift, len, d * d, "drift")?;
        let diffusion = buffer(diffusion, len, d * d, "diffusion")?;
        let (a, b) = match m.inner.flavor {
            Flavor::Bosonic => {
                let dd = bosonic::build_drift_diffusion(&m.inner)?;
                (dd.a, dd.d)
            }
            Flavor::Fermionic => {
                let dd = fermionic::build_drift_diffusion_f(&m.inner)?;
                (dd.x, dd.y)
            }
        };
        copy_matrix(&a, drift);
        copy_matrix(&b, diffusion);
        Ok(())
    })
}

/// Vacuum state of `n_modes` modes.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn glme_state_vacuum(kind: GlmeKind, n_modes: usize, out: *mut *mut GlmeState) -> GlmeStatus {
    guard(|| {
        if n_modes == 0 {
            return fail(GlmeStatus::InvalidArgument, "n_modes must be at least 1");
        }
        let inner = match kind {
            GlmeKind::Bosonic => StateFile::Bosonic(GaussianState::vacuum(n_modes)),
            GlmeKind::Fermionic => StateFile::Fermionic(FermionicGaussianState::vacuum(n_modes)),
        };
        boxed(GlmeState { inner }, out)
    })
}

/// Builds a state from a row-major covariance (`V` or `σ`) of size `dim × dim`
/// and, for bosons, an optional mean of length `dim` (null for zero).
///
/// # Safety
/// `covariance` must hold `dim²` doubles, `mean` null or `dim` doubles; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn glme_state_new(
    kind: GlmeKind,
    dim: usize,
    covariance: *const f64,
    mean: *const f64,
    out: *mut *mut GlmeState,
) -> GlmeStatus {
    guard(|| {
        if dim == 0 || !dim.is_multiple_of(2) {
            return fail(GlmeStatus::InvalidArgument, format!("dim must be even and positive, got {dim}"));
        }
        let cov = square_from(input(covariance, dim * dim, "covariance")?, dim);
        let inner = match kind {
            GlmeKind::Bosonic => {
                let mean = if mean.is_null() {
                    glme::linalg::RVec::zeros(dim)
                } else {
                    glme::linalg::RVec::from_column_slice(input(mean, dim, "mean")?)
                };
                StateFile::Bosonic(GaussianState::new(mean, cov)?)
            }
            GlmeKind::Fermionic => {
                if !mean.is_null() {
                    return fail(GlmeStatus::InvalidArgument, "fermionic states have no mean");
                }
                StateFile::Fermionic(FermionicGaussianState::new(cov)?)
            }
        };
        require_physical(&inner)?;
        boxed(GlmeState { inner }, out)
    })
}

/// Parses a state from JSON text (same schema as the CLI state files).
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn glme_state_from_json(json: *const c_char, out: *mut *mut GlmeState) -> GlmeStatus {
    guard(|| {
        let text = str_arg(json, "json")?;
        let inner = io::parse_state(text)?;
        require_physical(&inner)?;
        boxed(GlmeState { inner }, out)
    })
}

/// Releases a state. Null is ignored.
///
/// # Safety
/// `state` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn glme_state_free(state: *mut GlmeState) {
    if !state.is_null() {
        drop(Box::from_raw(state));
    }
}

/// Covariance dimension `2N`, or 0 for a null handle.
///
/// # Safety
/// `state` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn glme_state_dim(state: *const GlmeState) -> usize {
    state.as_ref().map_or(0, |s| state_dim(&s.inner))
}

/// # Safety
/// `state` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn glme_state_kind(state: *const GlmeState, out: *mut GlmeKind) -> GlmeStatus {
    guard(|| {
        let s = ref_arg(state, "state")?;
        *out_arg(out, "out")? = match s.inner {
            StateFile::Bosonic(_) => GlmeKind::Bosonic,
            StateFile::Fermionic(_) => GlmeKind::Fermionic,
        };
        Ok(())
    })
}

/// Copies the covariance row-major into `out` (`len ≥ dim²`).
///
/// # Safety
/// `state` must be a live handle; `out` must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn glme_state_covariance(state: *const GlmeState, out: *mut f64, len: usize) -> GlmeStatus {
    guard(|| {
        let s = ref_arg(state, "state")?;
        let d = state_dim(&s.inner);
        let out = buffer(out, len, d * d, "out")?;
        match &s.inner {
            StateFile::Bosonic(g) => copy_matrix(&g.v, out),
            StateFile::Fermionic(f) => copy_matrix(&f.sigma, out),
        }
        Ok(())
    })
}

/// Copies the bosonic mean into `out` (`len ≥ dim`).
///
/// # Safety
/// `state` must be a live handle; `out` must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn glme_state_mean(state: *const GlmeState, out: *mut f64, len: usize) -> GlmeStatus {
    guard(|| {
        let s = ref_arg(state, "state")?;
        let StateFile::Bosonic(g) = &s.inner else {
            return fail(GlmeStatus::InvalidArgument, "fermionic states have no mean");
        };
        let out = buffer(out, len, g.mean.len(), "out")?;
        out.copy_from_slice(g.mean.as_slice());
        Ok(())
    })
}

/// Purity `Tr ρ²` of the state.
///
/// # Safety
/// `state` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn glme_state_purity(state: *const GlmeState, out: *mut f64) -> GlmeStatus {
    guard(|| {
        let s = ref_arg(state, "state")?;
        *out_arg(out, "out")? = match &s.inner {
            StateFile::Bosonic(g) => bosonic::purity(&g.v)?,
            StateFile::Fermionic(f) => fermionic::purity_f(&f.sigma)?,
        };
        Ok(())
    })
}

/// Stationary state; fails with `Stability` when the drift is not Hurwitz.
///
/// # Safety
/// `model` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn glme_steady_state(model: *const GlmeModel, out: *mut *mut GlmeState) -> GlmeStatus {
    guard(|| {
        let m = ref_arg(model, "model")?;
        let inner = match m.inner.flavor {
            Flavor::Bosonic => StateFile::Bosonic(bosonic::steady_state(&bosonic::build_drift_diffusion(&m.inner)?)?),
            Flavor::Fermionic => {
                StateFile::Fermionic(fermionic::steady_state_f(&fermionic::build_drift_diffusion_f(&m.inner)?)?)
            }
        };
        boxed(GlmeState { inner }, out)
    })
}

fn trajectory(m: &GlmeModel, s: &GlmeState, times: &[f64], method: GlmeMethod) -> Result<Vec<StateFile>, Failure> {
    let method = method_of(method);
    match (&s.inner, m.inner.flavor) {
        (StateFile::Bosonic(g), Flavor::Bosonic) => {
            let dd = bosonic::build_drift_diffusion(&m.inner)?;
            let traj = bosonic::propagate_state(&dd, g, times, method)?;
            Ok(traj.states.into_iter().map(StateFile::Bosonic).collect())
        }
        (StateFile::Fermionic(f), Flavor::Fermionic) => {
            let dd = fermionic::build_drift_diffusion_f(&m.inner)?;
            let traj = fermionic::propagate_covariance_f(&dd, &f.sigma, times, method)?;
            Ok(traj.states.into_iter().map(StateFile::Fermionic).collect())
        }
        _ => fail(GlmeStatus::InvalidArgument, "state and model kinds differ"),
    }
}

fn check_dims(m: &GlmeModel, s: &GlmeState) -> Result<(), Failure> {
    let (dm, ds) = (2 * m.inner.n_modes, state_dim(&s.inner));
    if dm != ds {
        return fail(GlmeStatus::Structural, format!("model dimension {dm} differs from state dimension {ds}"));
    }
    Ok(())
}

/// Propagates `initial` for time `t ≥ 0` and returns a new state.
///
/// # Safety
/// `model`, `initial` must be live handles; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn glme_evolve(
    model: *const GlmeModel,
    initial: *const GlmeState,
    t: f64,
    method: GlmeMethod,
    out: *mut *mut GlmeState,
) -> GlmeStatus {
    guard(|| {
        let (m, s) = (ref_arg(model, "model")?, ref_arg(initial, "initial")?);
        check_dims(m, s)?;
        if !(t >= 0.0 && t.is_finite()) {
            return fail(GlmeStatus::InvalidArgument, format!("t must be finite and >= 0, got {t}"));
        }
        let last = trajectory(m, s, &[0.0, t], method)?.pop().expect("two samples");
        boxed(GlmeState { inner: last }, out)
    })
}

/// Covariances at `times` (non-decreasing, the first is the initial time),
/// written back to back into `out` (`len ≥ n_times · dim²`).
///
/// # Safety
/// `times` must hold `n_times` doubles, `out` `len` doubles; handles live.
#[no_mangle]
pub unsafe extern "C" fn glme_evolve_trajectory(
    model: *const GlmeModel,
    initial: *const GlmeState,
    times: *const f64,
    n_times: usize,
    method: GlmeMethod,
    out: *mut f64,
    len: usize,
) -> GlmeStatus {
    guard(|| {
        let (m, s) = (ref_arg(model, "model")?, ref_arg(initial, "initial")?);
        check_dims(m, s)?;
        let times = input(times, n_times, "times")?;
        let d = state_dim(&s.inner);
        let out = buffer(out, len, n_times * d * d, "out")?;
        for (k, st) in trajectory(m, s, times, method)?.iter().enumerate() {
            let chunk = &mut out[k * d * d..(k + 1) * d * d];
            match st {
                StateFile::Bosonic(g) => copy_matrix(&g.v, chunk),
                StateFile::Fermionic(f) => copy_matrix(&f.sigma, chunk),
            }
        }
        Ok(())
    })
}

/// Logarithmic negativity of a two-mode state (bosonic `max(0, −ln η)`).
///
/// # Safety
/// `state` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn glme_log_negativity(state: *const GlmeState, out: *mut f64) -> GlmeStatus {
    guard(|| {
        let s = ref_arg(state, "state")?;
        let r = match &s.inner {
            StateFile::Bosonic(g) => log_negativity_bosonic(&g.v, false)?,
            StateFile::Fermionic(f) => log_negativity_fermionic(&f.sigma)?,
        };
        *out_arg(out, "out")? = r.value;
        Ok(())
    })
}
