//! C interface to `steklov-core`.
//!
//! Every function returns a [`SteklovStatus`] and writes results through out
//! pointers. On failure a description is kept per thread and can be read with
//! [`steklov_last_error_message`]. Panics never cross the boundary.
//!
//! Boxes and 2-D spectra are opaque handles owned by the caller and released
//! with the matching `_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{self, AssertUnwindSafe};
use std::ptr;

use steklov_core::boxspec::{self, BoxCylinder, SpectralFamily};
use steklov_core::counting;
use steklov_core::fd::{BoundaryPartition, Grid2D, SteklovSpectrum};
use steklov_core::profile;
use steklov_core::weyl::{self, BoundaryData};
use steklov_core::Error;

/// Sine modes on the lateral faces.
pub const STEKLOV_FAMILY_DIRICHLET: u32 = 0;
/// Cosine modes on the lateral faces.
pub const STEKLOV_FAMILY_NEUMANN: u32 = 1;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SteklovStatus {
    Ok = 0,
    Domain = 1,
    Unsupported = 2,
    Config = 3,
    Consistency = 4,
    Numerical = 5,
    SignContract = 6,
    Discretization = 7,
    DegenerateMode = 8,
    NullPointer = 9,
    BufferTooSmall = 10,
    Panic = 11,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_last_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

struct Failure {
    status: SteklovStatus,
    message: String,
}

impl Failure {
    fn new(status: SteklovStatus, message: impl Into<String>) -> Self {
        Self {
            status,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match e {
            Error::Domain(_) => SteklovStatus::Domain,
            Error::Unsupported(_) => SteklovStatus::Unsupported,
            Error::Config(_) => SteklovStatus::Config,
            Error::Consistency(_) => SteklovStatus::Consistency,
            Error::Numerical(_) => SteklovStatus::Numerical,
            Error::SignContract(_) => SteklovStatus::SignContract,
            Error::Discretization(_) => SteklovStatus::Discretization,
            Error::DegenerateMode(_) => SteklovStatus::DegenerateMode,
        };
        Failure::new(status, e.to_string())
    }
}

type FfiResult = Result<(), Failure>;

fn call(f: impl FnOnce() -> FfiResult) -> SteklovStatus {
    match panic::catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => SteklovStatus::Ok,
        Ok(Err(fail)) => {
            set_last_error(&fail.message);
            fail.status
        }
        Err(payload) => {
            let what = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_last_error(&format!("panic: {what}"));
            SteklovStatus::Panic
        }
    }
}

unsafe fn out<'a, T>(p: *mut T, name: &str) -> Result<&'a mut T, Failure> {
    p.as_mut()
        .ok_or_else(|| Failure::new(SteklovStatus::NullPointer, format!("{name} is null")))
}

unsafe fn input<'a, T>(p: *const T, name: &str) -> Result<&'a T, Failure> {
    p.as_ref()
        .ok_or_else(|| Failure::new(SteklovStatus::NullPointer, format!("{name} is null")))
}

unsafe fn slice<'a>(p: *const f64, len: usize, name: &str) -> Result<&'a [f64], Failure> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(Failure::new(SteklovStatus::NullPointer, format!("{name} is null")));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn slice_mut<'a>(
    p: *mut f64,
    len: usize,
    need: usize,
    name: &str,
) -> Result<&'a mut [f64], Failure> {
    if len < need {
        return Err(Failure::new(
            SteklovStatus::BufferTooSmall,
            format!("{name} holds {len} values, {need} needed"),
        ));
    }
    if need == 0 {
        return Ok(&mut []);
    }
    if p.is_null() {
        return Err(Failure::new(SteklovStatus::NullPointer, format!("{name} is null")));
    }
    Ok(std::slice::from_raw_parts_mut(p, need))
}

fn family(code: u32) -> Result<SpectralFamily, Failure> {
    match code {
        STEKLOV_FAMILY_DIRICHLET => Ok(SpectralFamily::DirichletLateral),
        STEKLOV_FAMILY_NEUMANN => Ok(SpectralFamily::NeumannLateral),
        other => Err(Failure::new(
            SteklovStatus::Domain,
            format!("unknown family code {other}"),
        )),
    }
}

/// Message of the last failed call on this thread; empty if none. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn steklov_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn steklov_version() -> *const c_char {
    static VERSION: &str = concat!(env!("CARGO_PKG_VERSION"), "\0");
    VERSION.as_ptr().cast()
}

/// `t(s)` for `s > 0`.
///
/// # Safety
/// `result` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn steklov_t_profile(s: f64, result: *mut f64) -> SteklovStatus {
    call(|| {
        *out(result, "result")? = profile::t_profile(s)?;
        Ok(())
    })
}

/// `t'(s)` for `s >= 1`.
///
/// # Safety
/// `result` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn steklov_t_profile_derivative(s: f64, result: *mut f64) -> SteklovStatus {
    call(|| {
        *out(result, "result")? = profile::t_profile_derivative(s)?;
        Ok(())
    })
}

/// Inverse of `t` on `s >= 1`, for `t >= t(1)`.
///
/// # Safety
/// `result` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn steklov_h_inverse(t: f64, result: *mut f64) -> SteklovStatus {
    call(|| {
        *out(result, "result")? = profile::h_inverse(t)?;
        Ok(())
    })
}

/// Volume of the unit ball in dimension `m >= 1`.
///
/// # Safety
/// `result` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn steklov_unit_ball_volume(m: u32, result: *mut f64) -> SteklovStatus {
    call(|| {
        *out(result, "result")? = profile::unit_ball_volume(m)?;
        Ok(())
    })
}

/// Lattice points `m` of the family with `sum (m_i/l_i)^2 <= radius^2`.
///
/// # Safety
/// `sides` must point to `n_sides` readable doubles; `result` must be valid
/// for writes.
#[no_mangle]
pub unsafe extern "C" fn steklov_count_lattice(
    sides: *const f64,
    n_sides: usize,
    radius: f64,
    family_code: u32,
    result: *mut u64,
) -> SteklovStatus {
    call(|| {
        let q = counting::LatticeQuery {
            sides: slice(sides, n_sides, "sides")?.to_vec(),
            radius,
            family: family(family_code)?,
        };
        *out(result, "result")? = counting::count_lattice(&q)?;
        Ok(())
    })
}

/// `1 / (1 + lambda)`.
///
/// # Safety
/// `result` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn steklov_mu_from_lambda(lambda: f64, result: *mut f64) -> SteklovStatus {
    call(|| {
        *out(result, "result")? = counting::mu_from_lambda(lambda)?;
        Ok(())
    })
}

/// `mu* / (1 + mu*)`.
///
/// # Safety
/// `result` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn steklov_mu_from_mu_star(mu_star: f64, result: *mut f64) -> SteklovStatus {
    call(|| {
        *out(result, "result")? = counting::mu_from_mu_star(mu_star)?;
        Ok(())
    })
}

/// Weyl prediction of the counting function in dimension `n`.
///
/// # Safety
/// `result` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn steklov_predict_count(
    n: u32,
    rho_integral: f64,
    tau: f64,
    result: *mut f64,
) -> SteklovStatus {
    call(|| {
        let b = BoundaryData::new(n, rho_integral, rho_integral)?;
        *out(result, "result")? = weyl::predict_count(&b, tau)?;
        Ok(())
    })
}

/// Opaque rectangular cylinder.
pub struct SteklovBox(BoxCylinder);

/// Creates a box with base sides `sides[0..n_sides]`.
///
/// # Safety
/// `sides` must point to `n_sides` readable doubles; `handle` must be valid
/// for writes. The handle must be released with [`steklov_box_free`].
#[no_mangle]
pub unsafe extern "C" fn steklov_box_new(
    sides: *const f64,
    n_sides: usize,
    height: f64,
    rho: f64,
    handle: *mut *mut SteklovBox,
) -> SteklovStatus {
    call(|| {
        let slot = out(handle, "handle")?;
        *slot = ptr::null_mut();
        let bx = BoxCylinder::new(slice(sides, n_sides, "sides")?.to_vec(), height, rho)?;
        *slot = Box::into_raw(Box::new(SteklovBox(bx)));
        Ok(())
    })
}

/// Releases a box. Null is ignored.
///
/// # Safety
/// `handle` must come from [`steklov_box_new`] and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn steklov_box_free(handle: *mut SteklovBox) {
    if !handle.is_null() {
        let _ = panic::catch_unwind(AssertUnwindSafe(|| drop(Box::from_raw(handle))));
    }
}

/// Ambient dimension of the box.
///
/// # Safety
/// `handle` must be a live box; `result` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn steklov_box_dim(handle: *const SteklovBox, result: *mut usize) -> SteklovStatus {
    call(|| {
        *out(result, "result")? = input(handle, "handle")?.0.dim();
        Ok(())
    })
}

/// The `k` smallest eigenvalues of a family, ascending, into
/// `values[0..k]`.
///
/// # Safety
/// `handle` must be a live box; `values` must point to `capacity` writable
/// doubles.
#[no_mangle]
pub unsafe extern "C" fn steklov_box_eigenvalues(
    handle: *const SteklovBox,
    family_code: u32,
    k: usize,
    values: *mut f64,
    capacity: usize,
) -> SteklovStatus {
    call(|| {
        let bx = &input(handle, "handle")?.0;
        let dst = slice_mut(values, capacity, k, "values")?;
        let modes = boxspec::spectrum(bx, family(family_code)?, k)?;
        for (d, m) in dst.iter_mut().zip(&modes) {
            *d = m.lambda;
        }
        Ok(())
    })
}

/// Number of eigenvalues `<= tau` of a family.
///
/// # Safety
/// `handle` must be a live box; `result` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn steklov_box_count(
    handle: *const SteklovBox,
    family_code: u32,
    tau: f64,
    result: *mut u64,
) -> SteklovStatus {
    call(|| {
        let bx = &input(handle, "handle")?.0;
        *out(result, "result")? = counting::counting_function(bx, family(family_code)?, tau)?;
        Ok(())
    })
}

/// Opaque finite-difference spectrum.
pub struct SteklovSpectrum2D(SteklovSpectrum);

/// Solves the 2-D problem on `[0, a] x [0, b]` with `nx x ny` cells.
/// `faces` is a list such as `bottom=steklov:1,top=hardnu`; unlisted faces
/// are `softfree`.
///
/// # Safety
/// `faces` must be a NUL-terminated string; `handle` must be valid for
/// writes. The handle must be released with [`steklov_spectrum2d_free`].
#[no_mangle]
pub unsafe extern "C" fn steklov_solve2d(
    a: f64,
    b: f64,
    nx: usize,
    ny: usize,
    faces: *const c_char,
    k: usize,
    handle: *mut *mut SteklovSpectrum2D,
) -> SteklovStatus {
    call(|| {
        let slot = out(handle, "handle")?;
        *slot = ptr::null_mut();
        let faces = input(faces, "faces")?;
        let faces = CStr::from_ptr(faces)
            .to_str()
            .map_err(|_| Failure::new(SteklovStatus::Config, "faces is not UTF-8"))?;
        let part: BoundaryPartition = faces.parse()?;
        let grid = Grid2D::new(a, b, nx, ny)?;
        let spec = steklov_core::fd::steklov_spectrum_2d(grid, part, k)?;
        *slot = Box::into_raw(Box::new(SteklovSpectrum2D(spec)));
        Ok(())
    })
}

/// Releases a spectrum. Null is ignored.
///
/// # Safety
/// `handle` must come from [`steklov_solve2d`] and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn steklov_spectrum2d_free(handle: *mut SteklovSpectrum2D) {
    if !handle.is_null() {
        let _ = panic::catch_unwind(AssertUnwindSafe(|| drop(Box::from_raw(handle))));
    }
}

/// Number of eigenvalues held.
///
/// # Safety
/// `handle` must be live; `result` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn steklov_spectrum2d_len(
    handle: *const SteklovSpectrum2D,
    result: *mut usize,
) -> SteklovStatus {
    call(|| {
        *out(result, "result")? = input(handle, "handle")?.0.eigenvalues.len();
        Ok(())
    })
}

/// Copies the eigenvalues (ascending).
///
/// # Safety
/// `handle` must be live; `values` must point to `capacity` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn steklov_spectrum2d_eigenvalues(
    handle: *const SteklovSpectrum2D,
    values: *mut f64,
    capacity: usize,
) -> SteklovStatus {
    call(|| {
        let s = &input(handle, "handle")?.0;
        slice_mut(values, capacity, s.eigenvalues.len(), "values")?.copy_from_slice(&s.eigenvalues);
        Ok(())
    })
}

/// Copies the relative Rayleigh-quotient residuals.
///
/// # Safety
/// `handle` must be live; `values` must point to `capacity` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn steklov_spectrum2d_rayleigh_residuals(
    handle: *const SteklovSpectrum2D,
    values: *mut f64,
    capacity: usize,
) -> SteklovStatus {
    call(|| {
        let s = &input(handle, "handle")?.0;
        let n = s.rayleigh_residuals.len();
        slice_mut(values, capacity, n, "values")?.copy_from_slice(&s.rayleigh_residuals);
        Ok(())
    })
}

/// Relative asymmetry of the boundary operator before symmetrization.
///
/// # Safety
/// `handle` must be live; `result` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn steklov_spectrum2d_asymmetry(
    handle: *const SteklovSpectrum2D,
    result: *mut f64,
) -> SteklovStatus {
    call(|| {
        *out(result, "result")? = input(handle, "handle")?.0.asymmetry_norm;
        Ok(())
    })
}
