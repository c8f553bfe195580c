//! C ABI over the `amplitude_flow` library.
//!
//! Every entry point returns an [`AflStatus`]; results go through out
//! pointers. On failure a message is stored per thread and can be read with
//! [`afl_last_error`]. Models and oracles are opaque handles owned by the
//! caller and released with their `_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use amplitude_flow::channels::{Channel, ChannelModel};
use amplitude_flow::invariants::{conservation_residual, signed_conservation_residual};
use amplitude_flow::oracle::{flat_mode_grid, Oracle};
use amplitude_flow::schmidt::{
    closed_form_partner_weight, closed_form_qubit_weight, moon_weight, snapshot_weight, sqrt_coordinate,
    BipartitionCut, FlowCoordinate, PreparationAngle,
};
use amplitude_flow::Error;

/// Result codes shared by every function.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AflStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidInput = 2,
    OutOfRange = 3,
    NotNormalized = 4,
    WrongBranch = 5,
    Config = 6,
    Io = 7,
    Panic = 8,
}

/// A prepared amplitude-flow channel.
pub struct AflModel {
    channel: Channel,
}

/// Exact-diagonalization engine for a model.
pub struct AflOracle {
    oracle: Oracle,
}

/// One oracle evaluation.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct AflOracleSample {
    pub time: f64,
    pub p: f64,
    pub k_qubit: f64,
    pub k_partner: f64,
    pub k_moon: f64,
    pub max_third_eigenvalue: f64,
    pub norm_drift: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: String) {
    let msg = CString::new(msg.replace('\0', " ")).expect("interior NULs removed");
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(msg));
}

fn status_of(err: &Error) -> AflStatus {
    match err {
        Error::Normalization { .. } => AflStatus::NotNormalized,
        Error::InvalidInput(_) => AflStatus::InvalidInput,
        Error::Range(_) => AflStatus::OutOfRange,
        Error::Config(_) => AflStatus::Config,
        Error::Branch => AflStatus::WrongBranch,
        Error::Io(_) => AflStatus::Io,
    }
}

enum Failure {
    Null(&'static str),
    Lib(Error),
}

impl From<Error> for Failure {
    fn from(err: Error) -> Self {
        Failure::Lib(err)
    }
}

/// Runs `f`, translating errors and panics into status codes.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> AflStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|slot| *slot.borrow_mut() = None);
            AflStatus::Ok
        }
        Ok(Err(Failure::Null(name))) => {
            set_last_error(format!("null pointer passed for `{name}`"));
            AflStatus::NullPointer
        }
        Ok(Err(Failure::Lib(err))) => {
            set_last_error(err.to_string());
            status_of(&err)
        }
        Err(_) => {
            set_last_error("internal panic".to_string());
            AflStatus::Panic
        }
    }
}

unsafe fn write<T>(out: *mut T, name: &'static str, value: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(Failure::Null(name));
    }
    out.write(value);
    Ok(())
}

unsafe fn deref<'a, T>(handle: *const T, name: &'static str) -> Result<&'a T, Failure> {
    handle.as_ref().ok_or(Failure::Null(name))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn afl_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message of the last failed call on this thread, or NULL.
///
/// The pointer stays valid until the next call into the library on the same
/// thread.
#[no_mangle]
pub extern "C" fn afl_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// `K_M = 1 / (cos⁴θ + sin⁴θ)`.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn afl_moon_weight(theta: f64, out: *mut f64) -> AflStatus {
    guard(|| {
        let theta = PreparationAngle::new(theta)?;
        write(out, "out", moon_weight(theta))
    })
}

/// Closed-form `K_A` and `K_a` for survival probability `p`.
///
/// # Safety
/// Both out pointers must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn afl_closed_form_weights(
    p: f64,
    theta: f64,
    k_qubit: *mut f64,
    k_partner: *mut f64,
) -> AflStatus {
    guard(|| {
        let p = FlowCoordinate::new(p)?;
        let theta = PreparationAngle::new(theta)?;
        write(k_qubit, "k_qubit", closed_form_qubit_weight(p, theta))?;
        write(k_partner, "k_partner", closed_form_partner_weight(p, theta))
    })
}

/// `√(2/K − 1)` for `K ∈ [1, 2]`.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn afl_sqrt_coordinate(k: f64, out: *mut f64) -> AflStatus {
    guard(|| write(out, "out", sqrt_coordinate(k)?))
}

/// Conservation residual; `AFL_STATUS_WRONG_BRANCH` when sin²θ < cos²θ.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn afl_conservation_residual(
    k_qubit: f64,
    k_partner: f64,
    k_moon: f64,
    theta: f64,
    out: *mut f64,
) -> AflStatus {
    guard(|| {
        let branch = PreparationAngle::new(theta)?.branch();
        write(out, "out", conservation_residual(k_qubit, k_partner, k_moon, branch)?)
    })
}

/// Signed conservation residual, defined on both branches.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn afl_signed_residual(p: f64, theta: f64, out: *mut f64) -> AflStatus {
    guard(|| {
        let value = signed_conservation_residual(FlowCoordinate::new(p)?, PreparationAngle::new(theta)?);
        write(out, "out", value)
    })
}

unsafe fn new_model(model: amplitude_flow::Result<ChannelModel>, out: *mut *mut AflModel) -> AflStatus {
    guard(|| {
        if out.is_null() {
            return Err(Failure::Null("out"));
        }
        let channel = model?.prepare()?;
        out.write(Box::into_raw(Box::new(AflModel { channel })));
        Ok(())
    })
}

/// Weisskopf–Wigner spontaneous emission with decay rate `gamma`.
///
/// # Safety
/// `out` must be valid for writes; release the handle with [`afl_model_free`].
#[no_mangle]
pub unsafe extern "C" fn afl_model_new_se(gamma: f64, omega_a: f64, out: *mut *mut AflModel) -> AflStatus {
    new_model(ChannelModel::spontaneous_emission(gamma, omega_a, None), out)
}

/// Resonant Jaynes–Cummings exchange with coupling `g`.
///
/// # Safety
/// `out` must be valid for writes; release the handle with [`afl_model_free`].
#[no_mangle]
pub unsafe extern "C" fn afl_model_new_jc(g: f64, omega_a: f64, out: *mut *mut AflModel) -> AflStatus {
    new_model(ChannelModel::jaynes_cummings(g, omega_a), out)
}

/// XY chain of `sites` partner spins with hopping `hopping`.
///
/// # Safety
/// `out` must be valid for writes; release the handle with [`afl_model_free`].
#[no_mangle]
pub unsafe extern "C" fn afl_model_new_xy(sites: usize, hopping: f64, out: *mut *mut AflModel) -> AflStatus {
    new_model(ChannelModel::xy_chain(sites, hopping), out)
}

/// # Safety
/// `model` must come from an `afl_model_new_*` call and not be used afterwards.
/// NULL is ignored.
#[no_mangle]
pub unsafe extern "C" fn afl_model_free(model: *mut AflModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// Survival probability `p(t) = |c_e(t)|²`.
///
/// # Safety
/// `model` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn afl_model_flow(model: *const AflModel, t: f64, out: *mut f64) -> AflStatus {
    guard(|| {
        let model = deref(model, "model")?;
        write(out, "out", model.channel.flow(t)?.value())
    })
}

/// Schmidt weights of the three cuts computed from the amplitudes at `t`.
///
/// # Safety
/// `model` must be a live handle and the out pointers valid for writes.
#[no_mangle]
pub unsafe extern "C" fn afl_model_snapshot_weights(
    model: *const AflModel,
    theta: f64,
    t: f64,
    k_qubit: *mut f64,
    k_partner: *mut f64,
    k_moon: *mut f64,
) -> AflStatus {
    guard(|| {
        let model = deref(model, "model")?;
        let snap = model.channel.snapshot(PreparationAngle::new(theta)?, t)?;
        write(k_qubit, "k_qubit", snapshot_weight(&snap, BipartitionCut::QubitVsRest)?)?;
        write(k_partner, "k_partner", snapshot_weight(&snap, BipartitionCut::PartnerVsRest)?)?;
        write(k_moon, "k_moon", snapshot_weight(&snap, BipartitionCut::MoonVsRest)?)
    })
}

/// Builds the oracle for `model`. Spontaneous emission is discretized on a
/// flat grid of `n_modes` modes over `bandwidth` (40 decay rates when
/// `bandwidth <= 0`); the two arguments are ignored for the other models.
///
/// # Safety
/// `model` must be a live handle and `out` valid for writes; release the
/// oracle with [`afl_oracle_free`].
#[no_mangle]
pub unsafe extern "C" fn afl_oracle_new(
    model: *const AflModel,
    n_modes: usize,
    bandwidth: f64,
    out: *mut *mut AflOracle,
) -> AflStatus {
    guard(|| {
        let model = deref(model, "model")?;
        if out.is_null() {
            return Err(Failure::Null("out"));
        }
        let spec = match model.channel.model() {
            ChannelModel::SpontaneousEmission { gamma, omega_a, .. } => {
                let width = if bandwidth > 0.0 { bandwidth } else { 40.0 * gamma };
                let grid = flat_mode_grid(n_modes, width, *gamma, *omega_a)?;
                ChannelModel::spontaneous_emission(*gamma, *omega_a, Some(grid))?
            }
            other => other.clone(),
        };
        let oracle = Oracle::new(&spec)?;
        out.write(Box::into_raw(Box::new(AflOracle { oracle })));
        Ok(())
    })
}

/// # Safety
/// `oracle` must come from [`afl_oracle_new`] and not be used afterwards.
/// NULL is ignored.
#[no_mangle]
pub unsafe extern "C" fn afl_oracle_free(oracle: *mut AflOracle) {
    if !oracle.is_null() {
        drop(Box::from_raw(oracle));
    }
}

/// Evolves the pair, assembles the three-party state and reports the
/// numerical Schmidt weights.
///
/// # Safety
/// `oracle` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn afl_oracle_sample(
    oracle: *const AflOracle,
    theta: f64,
    t: f64,
    out: *mut AflOracleSample,
) -> AflStatus {
    guard(|| {
        let oracle = deref(oracle, "oracle")?;
        let s = oracle.oracle.sample(PreparationAngle::new(theta)?, t)?;
        let sample = AflOracleSample {
            time: s.time,
            p: s.p,
            k_qubit: s.k_qubit,
            k_partner: s.k_partner,
            k_moon: s.k_moon,
            max_third_eigenvalue: s.max_third_eigenvalue,
            norm_drift: s.norm_drift,
        };
        write(out, "out", sample)
    })
}

/// Reads the last error as an owned string (Rust-side convenience).
pub fn last_error_message() -> Option<String> {
    let p = afl_last_error();
    if p.is_null() {
        None
    } else {
        // SAFETY: non-null pointers come from the thread-local CString.
        Some(unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned())
    }
}
