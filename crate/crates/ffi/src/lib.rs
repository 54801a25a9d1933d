//! C ABI over `parity_bell`.
//!
//! States and configurations are opaque heap handles released with their
//! `_free` function. Every fallible call returns a [`PbStatus`]; on failure
//! `pb_last_error_message` describes the most recent error on the calling
//! thread. Output pointers are written only on success.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use nalgebra::DMatrix;
use num_complex::Complex64;
use parity_bell::{
    alt_phase, bell_from_f, correlation_tensor, f_closed, f_direct, f_trace, horodecki_max,
    number_config, operator_set, position_config, reduced_density, tmsv_state, truncation_for,
    ClosedForm, Error, PseudospinConfig, QuadratureSpec, ReducedDensity, SqueezeParam, TmsvState,
};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PbStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    CapExceeded = 3,
    TruncationTooSmall = 4,
    QuadratureInsufficient = 5,
    NonUnitary = 6,
    DimensionMismatch = 7,
    BufferTooSmall = 8,
    Panic = 9,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PbConfigLabel {
    Number = 0,
    Position = 1,
    AltPhase = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PbRoute {
    Direct = 0,
    Trace = 1,
}

/// Truncated two-mode squeezed vacuum and its reduced density.
pub struct PbState {
    state: TmsvState,
    rho: ReducedDensity,
}

/// Configurational unitary on the half-index space.
pub struct PbConfig {
    config: PseudospinConfig,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("NUL removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> PbStatus {
    match e {
        Error::CapExceeded { .. } => PbStatus::CapExceeded,
        Error::TruncationTooSmall { .. } | Error::DimensionTooLarge { .. } => {
            PbStatus::TruncationTooSmall
        }
        Error::QuadratureInsufficient { .. } => PbStatus::QuadratureInsufficient,
        Error::NonUnitaryConfig { .. } => PbStatus::NonUnitary,
        Error::DimensionMismatch { .. } => PbStatus::DimensionMismatch,
        _ => PbStatus::InvalidArgument,
    }
}

struct Fail(PbStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

fn null(what: &str) -> Fail {
    Fail(PbStatus::NullPointer, format!("{what} is null"))
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> PbStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => PbStatus::Ok,
        Ok(Err(Fail(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            PbStatus::Panic
        }
    }
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or_else(|| null(what))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn pb_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message for the last failed call on this thread, or null. Valid until the
/// next failing call on the same thread.
#[no_mangle]
pub extern "C" fn pb_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Builds the state with the adaptive truncation for `tail_tol`.
///
/// # Safety
/// `out` must be null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn pb_state_new(zeta: f64, tail_tol: f64, out: *mut *mut PbState) -> PbStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let zp = SqueezeParam::new(zeta)?;
        let state = tmsv_state(zp, &truncation_for(zp, tail_tol)?)?;
        let rho = reduced_density(&state);
        *out = Box::into_raw(Box::new(PbState { state, rho }));
        Ok(())
    })
}

/// # Safety
/// `state` must be null or a handle from `pb_state_new` not yet freed.
#[no_mangle]
pub unsafe extern "C" fn pb_state_free(state: *mut PbState) {
    if !state.is_null() {
        drop(Box::from_raw(state));
    }
}

/// Fock levels per mode, or 0 for a null handle.
///
/// # Safety
/// `state` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn pb_state_dim(state: *const PbState) -> usize {
    state.as_ref().map_or(0, |s| s.state.dim())
}

/// Copies the Schmidt coefficients into `out[0..dim]`.
///
/// # Safety
/// `state` must be a live handle and `out` valid for `len` writes.
#[no_mangle]
pub unsafe extern "C" fn pb_state_lambda(state: *const PbState, out: *mut f64, len: usize) -> PbStatus {
    guard(|| {
        let s = deref(state, "state")?;
        if out.is_null() {
            return Err(null("out"));
        }
        let lambda = s.state.lambda();
        if len < lambda.len() {
            return Err(Fail(
                PbStatus::BufferTooSmall,
                format!("buffer holds {len}, need {}", lambda.len()),
            ));
        }
        std::slice::from_raw_parts_mut(out, lambda.len()).copy_from_slice(lambda);
        Ok(())
    })
}

/// `Tr rho^2` of either mode.
///
/// # Safety
/// `state` must be a live handle and `out` valid for a write.
#[no_mangle]
pub unsafe extern "C" fn pb_state_purity(state: *const PbState, out: *mut f64) -> PbStatus {
    guard(|| {
        let s = deref(state, "state")?;
        if out.is_null() {
            return Err(null("out"));
        }
        *out = s.rho.purity();
        Ok(())
    })
}

/// A named configuration on `half_dim` half-indices.
///
/// # Safety
/// `out` must be null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn pb_config_named(
    label: PbConfigLabel,
    half_dim: usize,
    out: *mut *mut PbConfig,
) -> PbStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        if half_dim == 0 {
            return Err(Fail(PbStatus::InvalidArgument, "half_dim must be positive".into()));
        }
        let config = match label {
            PbConfigLabel::Number => number_config(half_dim),
            PbConfigLabel::AltPhase => alt_phase(half_dim),
            PbConfigLabel::Position => {
                position_config(half_dim, &QuadratureSpec::for_levels(2 * half_dim - 1))?
            }
        };
        *out = Box::into_raw(Box::new(PbConfig { config }));
        Ok(())
    })
}

/// A caller-supplied unitary from row-major real and imaginary parts, each
/// `half_dim * half_dim` long; rejected if `|U U^dagger - I| >= tol`.
///
/// # Safety
/// `re` and `im` must be valid for `half_dim * half_dim` reads; `out` valid
/// for writes.
#[no_mangle]
pub unsafe extern "C" fn pb_config_custom(
    re: *const f64,
    im: *const f64,
    half_dim: usize,
    tol: f64,
    out: *mut *mut PbConfig,
) -> PbStatus {
    guard(|| {
        if re.is_null() || im.is_null() || out.is_null() {
            return Err(null("re, im or out"));
        }
        if half_dim == 0 {
            return Err(Fail(PbStatus::InvalidArgument, "half_dim must be positive".into()));
        }
        let n = half_dim * half_dim;
        let (re, im) = (
            std::slice::from_raw_parts(re, n),
            std::slice::from_raw_parts(im, n),
        );
        let u = DMatrix::from_fn(half_dim, half_dim, |i, j| {
            Complex64::new(re[i * half_dim + j], im[i * half_dim + j])
        });
        let config = PseudospinConfig::custom(u, tol)?;
        *out = Box::into_raw(Box::new(PbConfig { config }));
        Ok(())
    })
}

/// # Safety
/// `config` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn pb_config_free(config: *mut PbConfig) {
    if !config.is_null() {
        drop(Box::from_raw(config));
    }
}

/// # Safety
/// `config` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn pb_config_half_dim(config: *const PbConfig) -> usize {
    config.as_ref().map_or(0, |c| c.config.half_dim())
}

/// The key correlation `F` for configurations `c1`, `c2` (one per mode).
///
/// # Safety
/// Handles must be live; `out` valid for a write.
#[no_mangle]
pub unsafe extern "C" fn pb_f(
    state: *const PbState,
    c1: *const PbConfig,
    c2: *const PbConfig,
    route: PbRoute,
    out: *mut f64,
) -> PbStatus {
    guard(|| {
        let s = deref(state, "state")?;
        let (a, b) = (deref(c1, "c1")?, deref(c2, "c2")?);
        if out.is_null() {
            return Err(null("out"));
        }
        let r = match route {
            PbRoute::Direct => f_direct(&s.state, &a.config, &b.config)?,
            PbRoute::Trace => f_trace(&s.rho, &a.config, &b.config)?,
        };
        *out = r.f;
        Ok(())
    })
}

/// Row-major 3x3 correlation tensor `<Pi_i (x) Pi_j>`, `i, j` in `x, y, z`.
///
/// # Safety
/// Handles must be live; `out` valid for 9 writes.
#[no_mangle]
pub unsafe extern "C" fn pb_correlation_tensor(
    state: *const PbState,
    c1: *const PbConfig,
    c2: *const PbConfig,
    out: *mut f64,
) -> PbStatus {
    guard(|| {
        let s = deref(state, "state")?;
        let (a, b) = (deref(c1, "c1")?, deref(c2, "c2")?);
        if out.is_null() {
            return Err(null("out"));
        }
        let k = correlation_tensor(&s.state, &operator_set(&a.config)?, &operator_set(&b.config)?)?;
        let dst = std::slice::from_raw_parts_mut(out, 9);
        for i in 0..3 {
            dst[3 * i..3 * i + 3].copy_from_slice(&k.k[i]);
        }
        Ok(())
    })
}

/// Largest CHSH value for a row-major tensor. When `setting` is non-null it
/// receives `n, n', m, m'` as 12 consecutive components.
///
/// # Safety
/// `k` must be valid for 9 reads, `value` for a write, `setting` null or
/// valid for 12 writes.
#[no_mangle]
pub unsafe extern "C" fn pb_horodecki_max(k: *const f64, value: *mut f64, setting: *mut f64) -> PbStatus {
    guard(|| {
        if k.is_null() || value.is_null() {
            return Err(null("k or value"));
        }
        let src = std::slice::from_raw_parts(k, 9);
        if src.iter().any(|x| !x.is_finite()) {
            return Err(Fail(PbStatus::InvalidArgument, "tensor has non-finite entries".into()));
        }
        let rows = [
            [src[0], src[1], src[2]],
            [src[3], src[4], src[5]],
            [src[6], src[7], src[8]],
        ];
        let best = horodecki_max(&parity_bell::CorrelationTensor::from_rows(rows));
        *value = best.value;
        if !setting.is_null() {
            let dst = std::slice::from_raw_parts_mut(setting, 12);
            let s = best.setting;
            for (i, v) in [s.n, s.n_prime, s.m, s.m_prime].iter().enumerate() {
                dst[3 * i..3 * i + 3].copy_from_slice(v);
            }
        }
        Ok(())
    })
}

/// Closed-form `F` of a named family at squeezing `zeta`.
///
/// # Safety
/// `out` must be valid for a write.
#[no_mangle]
pub unsafe extern "C" fn pb_f_closed(zeta: f64, label: PbConfigLabel, out: *mut f64) -> PbStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let which = match label {
            PbConfigLabel::Number => ClosedForm::Number,
            PbConfigLabel::Position => ClosedForm::Position,
            PbConfigLabel::AltPhase => ClosedForm::AltPhase,
        };
        *out = f_closed(SqueezeParam::new(zeta)?, which);
        Ok(())
    })
}

/// `2 sqrt(1 + f^2)`.
#[no_mangle]
pub extern "C" fn pb_bell_from_f(f: f64) -> f64 {
    bell_from_f(f)
}
