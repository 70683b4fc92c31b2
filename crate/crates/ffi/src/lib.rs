//! C ABI for `drivosc`.
//!
//! Every function returns a [`DrivoscStatus`]; on failure the message is
//! available from [`drivosc_last_error_message`] on the same thread. Objects
//! cross the boundary as opaque handles created by `*_new`/`drivosc_force_*`
//! and released with the matching `*_free`. Panics never unwind into C.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use drivosc::dynamics::{classical_trajectory, drive_integrals, ForceModel};
use drivosc::grid::UniformGrid;
use drivosc::propagator::{green_function, propagate, GreenKernelParams};
use drivosc::states::{InitialState, WaveFunctionGrid};
use drivosc::tomography::{closed_form_tomogram, symplectic_from_wavefunction, Frame, SymplecticFrame};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DrivoscStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    NumericalError = 3,
    BufferTooSmall = 4,
    Panic = 5,
}

/// Opaque external force.
pub struct DrivoscForce(ForceModel);

/// Opaque wavefunction sampled on a uniform grid.
pub struct DrivoscWavefunction(WaveFunctionGrid);

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct DrivoscComplex {
    pub re: f64,
    pub im: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct DrivoscPhasePoint {
    pub q: f64,
    pub p: f64,
}

/// `F = ∫ sin τ f`, `J = ∫ cos τ f`, and the trajectory `(x̃, p̃)` from rest.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct DrivoscDriveIntegrals {
    pub sin_moment: f64,
    pub cos_moment: f64,
    pub x_rest: f64,
    pub p_rest: f64,
    pub t: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DrivoscStateKind {
    Coherent = 0,
    Fock = 1,
}

/// Initial state; `x0`/`p0` are read for coherent states, `n` for Fock states.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DrivoscState {
    pub kind: DrivoscStateKind,
    pub x0: f64,
    pub p0: f64,
    pub n: u32,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let text = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(text).ok());
}

struct Failure(DrivoscStatus, String);

impl From<drivosc::Error> for Failure {
    fn from(e: drivosc::Error) -> Self {
        let status = match e {
            drivosc::Error::InvalidForce(_)
            | drivosc::Error::InvalidGrid(_)
            | drivosc::Error::FockIndexTooLarge { .. }
            | drivosc::Error::InvalidFrame(_)
            | drivosc::Error::InvalidParameter(_)
            | drivosc::Error::TimeOutOfRange { .. } => DrivoscStatus::InvalidArgument,
            _ => DrivoscStatus::NumericalError,
        };
        Failure(status, e.to_string())
    }
}

fn null(what: &str) -> Failure {
    Failure(DrivoscStatus::NullPointer, format!("{what} is null"))
}

fn guard(body: impl FnOnce() -> Result<(), Failure>) -> DrivoscStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => DrivoscStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            DrivoscStatus::Panic
        }
    }
}

unsafe fn write_out<T>(out: *mut T, value: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null("output pointer"));
    }
    out.write(value);
    Ok(())
}

unsafe fn borrow<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn store_force(model: ForceModel, out: *mut *mut DrivoscForce) -> Result<(), Failure> {
    model.validate()?;
    write_out(out, Box::into_raw(Box::new(DrivoscForce(model))))
}

/// Message of the last failure on this thread, or null. Valid until the next
/// failing call on the same thread.
#[no_mangle]
pub extern "C" fn drivosc_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn drivosc_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn drivosc_force_zero(out: *mut *mut DrivoscForce) -> DrivoscStatus {
    guard(|| store_force(ForceModel::Zero, out))
}

/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn drivosc_force_constant(f0: f64, out: *mut *mut DrivoscForce) -> DrivoscStatus {
    guard(|| store_force(ForceModel::Constant { f0 }, out))
}

/// `amplitude · sin(frequency · t + phase)`.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn drivosc_force_sinusoidal(
    amplitude: f64,
    frequency: f64,
    phase: f64,
    out: *mut *mut DrivoscForce,
) -> DrivoscStatus {
    guard(|| {
        store_force(
            ForceModel::Sinusoidal {
                amplitude,
                frequency,
                phase,
            },
            out,
        )
    })
}

/// Piecewise-linear force through `(times[i], values[i])`.
///
/// # Safety
/// `times` and `values` must point to `len` readable doubles; `out` must be
/// valid for writes.
#[no_mangle]
pub unsafe extern "C" fn drivosc_force_tabulated(
    times: *const f64,
    values: *const f64,
    len: usize,
    out: *mut *mut DrivoscForce,
) -> DrivoscStatus {
    guard(|| {
        if times.is_null() || values.is_null() {
            return Err(null("times or values"));
        }
        let times = std::slice::from_raw_parts(times, len).to_vec();
        let values = std::slice::from_raw_parts(values, len).to_vec();
        store_force(ForceModel::tabulated(times, values)?, out)
    })
}

/// # Safety
/// `force` must be null or a handle from a `drivosc_force_*` constructor that
/// has not been freed.
#[no_mangle]
pub unsafe extern "C" fn drivosc_force_free(force: *mut DrivoscForce) {
    if !force.is_null() {
        drop(Box::from_raw(force));
    }
}

/// # Safety
/// `force` must be a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn drivosc_drive_integrals(
    force: *const DrivoscForce,
    t: f64,
    out: *mut DrivoscDriveIntegrals,
) -> DrivoscStatus {
    guard(|| {
        let d = drive_integrals(&borrow(force, "force")?.0, t)?;
        write_out(
            out,
            DrivoscDriveIntegrals {
                sin_moment: d.sin_moment,
                cos_moment: d.cos_moment,
                x_rest: d.x_rest,
                p_rest: d.p_rest,
                t: d.t,
            },
        )
    })
}

/// # Safety
/// `force` must be a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn drivosc_classical_trajectory(
    force: *const DrivoscForce,
    q0: f64,
    p0: f64,
    t: f64,
    out: *mut DrivoscPhasePoint,
) -> DrivoscStatus {
    guard(|| {
        let pt = classical_trajectory(q0, p0, &borrow(force, "force")?.0, t)?;
        write_out(out, DrivoscPhasePoint { q: pt.q, p: pt.p })
    })
}

/// Green function `G(x, x', t)` for `0 < t < π`.
///
/// # Safety
/// `force` must be a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn drivosc_green_function(
    force: *const DrivoscForce,
    t: f64,
    x: f64,
    x_prime: f64,
    out: *mut DrivoscComplex,
) -> DrivoscStatus {
    guard(|| {
        let params = GreenKernelParams::new(borrow(force, "force")?.0.clone(), t);
        let g = green_function(x, x_prime, &params)?;
        write_out(out, DrivoscComplex { re: g.re, im: g.im })
    })
}

fn to_state(s: &DrivoscState) -> InitialState {
    match s.kind {
        DrivoscStateKind::Coherent => InitialState::Coherent { x0: s.x0, p0: s.p0 },
        DrivoscStateKind::Fock => InitialState::Fock { n: s.n as usize },
    }
}

/// # Safety
/// `state` must be readable; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn drivosc_wavefunction_new(
    state: *const DrivoscState,
    x_min: f64,
    x_max: f64,
    n_points: usize,
    out: *mut *mut DrivoscWavefunction,
) -> DrivoscStatus {
    guard(|| {
        let state = to_state(borrow(state, "state")?);
        let psi = state.wavefunction(UniformGrid::new(x_min, x_max, n_points)?)?;
        write_out(out, Box::into_raw(Box::new(DrivoscWavefunction(psi))))
    })
}

/// Propagates `psi` for time `t` into a new handle.
///
/// # Safety
/// `psi` and `force` must be live handles; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn drivosc_wavefunction_propagate(
    psi: *const DrivoscWavefunction,
    force: *const DrivoscForce,
    t: f64,
    out: *mut *mut DrivoscWavefunction,
) -> DrivoscStatus {
    guard(|| {
        let evolved = propagate(&borrow(psi, "psi")?.0, &borrow(force, "force")?.0, t)?;
        write_out(out, Box::into_raw(Box::new(DrivoscWavefunction(evolved))))
    })
}

/// Number of grid points, or 0 for a null handle.
///
/// # Safety
/// `psi` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn drivosc_wavefunction_len(psi: *const DrivoscWavefunction) -> usize {
    psi.as_ref().map_or(0, |p| p.0.amplitudes().len())
}

/// Copies the amplitudes into `buffer`, which must hold at least
/// `drivosc_wavefunction_len(psi)` entries.
///
/// # Safety
/// `psi` must be a live handle; `buffer` must be writable for `capacity` entries.
#[no_mangle]
pub unsafe extern "C" fn drivosc_wavefunction_values(
    psi: *const DrivoscWavefunction,
    buffer: *mut DrivoscComplex,
    capacity: usize,
) -> DrivoscStatus {
    guard(|| {
        let amps = borrow(psi, "psi")?.0.amplitudes();
        if buffer.is_null() {
            return Err(null("buffer"));
        }
        if capacity < amps.len() {
            return Err(Failure(
                DrivoscStatus::BufferTooSmall,
                format!("buffer holds {capacity} values, {} needed", amps.len()),
            ));
        }
        let out = std::slice::from_raw_parts_mut(buffer, amps.len());
        for (slot, a) in out.iter_mut().zip(amps) {
            *slot = DrivoscComplex { re: a.re, im: a.im };
        }
        Ok(())
    })
}

/// # Safety
/// `psi` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn drivosc_wavefunction_free(psi: *mut DrivoscWavefunction) {
    if !psi.is_null() {
        drop(Box::from_raw(psi));
    }
}

unsafe fn fill_slice(
    densities: *mut f64,
    capacity: usize,
    n_points: usize,
    compute: impl FnOnce(UniformGrid) -> Result<Vec<f64>, Failure>,
    x_min: f64,
    x_max: f64,
) -> Result<(), Failure> {
    if densities.is_null() {
        return Err(null("densities"));
    }
    if capacity < n_points {
        return Err(Failure(
            DrivoscStatus::BufferTooSmall,
            format!("buffer holds {capacity} values, {n_points} needed"),
        ));
    }
    let values = compute(UniformGrid::new(x_min, x_max, n_points)?)?;
    std::slice::from_raw_parts_mut(densities, n_points).copy_from_slice(&values);
    Ok(())
}

/// Symplectic tomogram of `psi` along `(mu, nu)` on `n_points` values of X.
///
/// # Safety
/// `psi` must be a live handle; `densities` must be writable for `capacity` doubles.
#[no_mangle]
pub unsafe extern "C" fn drivosc_symplectic_tomogram(
    psi: *const DrivoscWavefunction,
    mu: f64,
    nu: f64,
    x_min: f64,
    x_max: f64,
    n_points: usize,
    densities: *mut f64,
    capacity: usize,
) -> DrivoscStatus {
    guard(|| {
        let psi = &borrow(psi, "psi")?.0;
        let frame = Frame::Symplectic(SymplecticFrame::new(mu, nu)?);
        fill_slice(
            densities,
            capacity,
            n_points,
            |grid| Ok(symplectic_from_wavefunction(psi, frame, grid)?.densities().to_vec()),
            x_min,
            x_max,
        )
    })
}

/// Closed-form tomogram of `state` evolved for `t` under `force`.
///
/// # Safety
/// `state` must be readable, `force` a live handle, and `densities` writable
/// for `capacity` doubles.
#[no_mangle]
pub unsafe extern "C" fn drivosc_closed_form_tomogram(
    state: *const DrivoscState,
    force: *const DrivoscForce,
    t: f64,
    mu: f64,
    nu: f64,
    x_min: f64,
    x_max: f64,
    n_points: usize,
    densities: *mut f64,
    capacity: usize,
) -> DrivoscStatus {
    guard(|| {
        let state = to_state(borrow(state, "state")?);
        let force = &borrow(force, "force")?.0;
        let frame = Frame::Symplectic(SymplecticFrame::new(mu, nu)?);
        fill_slice(
            densities,
            capacity,
            n_points,
            |grid| Ok(closed_form_tomogram(&state, force, t, frame, grid)?.densities().to_vec()),
            x_min,
            x_max,
        )
    })
}
