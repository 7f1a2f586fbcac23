//! C ABI for the tetdg solver.
//!
//! Objects are opaque handles created by `*_new`/`*_load` functions and
//! released with the matching `*_free`. Every fallible call returns a
//! [`TetdgStatus`]; on failure the message is available from
//! [`tetdg_last_error`] on the same thread until the next failing call.
//! Panics never cross the boundary and are reported as
//! [`TetdgStatus::Panic`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;

use tetdg::cli::{self, CaseConfig};
use tetdg::mesh::generate::{box_mesh, sphere_shell, ShellParams};
use tetdg::mesh::gmsh::read_gmsh_file;
use tetdg::refelem::ReferenceElement;
use tetdg::solver::SteadyResult;
use tetdg::Error;

/// Result codes.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TetdgStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Config = 3,
    Parse = 4,
    Format = 5,
    Io = 6,
    Mesh = 7,
    Numerical = 8,
    BufferTooSmall = 9,
    Panic = 10,
}

/// Unstructured tetrahedral mesh.
pub struct TetdgMesh {
    inner: tetdg::mesh::Mesh,
}

/// Parsed case configuration with paths resolved.
pub struct TetdgCase {
    inner: CaseConfig,
}

/// Result of a steady solve.
pub struct TetdgSolution {
    inner: SteadyResult,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("interior nul removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> TetdgStatus {
    match e {
        Error::Config(_) | Error::Json(_) => TetdgStatus::Config,
        Error::Parse { .. } => TetdgStatus::Parse,
        Error::Format(_) => TetdgStatus::Format,
        Error::Io { .. } => TetdgStatus::Io,
        Error::Nonconforming(_) | Error::InvertedElement { .. } | Error::CurvingFailed { .. } => TetdgStatus::Mesh,
        _ => TetdgStatus::Numerical,
    }
}

/// Run `f`, converting errors and panics to status codes.
fn guard(f: impl FnOnce() -> Result<(), (TetdgStatus, String)>) -> TetdgStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => TetdgStatus::Ok,
        Ok(Err((s, msg))) => {
            set_error(msg);
            s
        }
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_error(format!("internal panic: {msg}"));
            TetdgStatus::Panic
        }
    }
}

fn lift<T>(r: tetdg::Result<T>) -> Result<T, (TetdgStatus, String)> {
    r.map_err(|e| (status_of(&e), e.to_string()))
}

fn null(what: &str) -> (TetdgStatus, String) {
    (TetdgStatus::NullPointer, format!("{what} is null"))
}

unsafe fn path_arg(p: *const c_char) -> Result<PathBuf, (TetdgStatus, String)> {
    if p.is_null() {
        return Err(null("path"));
    }
    let s = CStr::from_ptr(p)
        .to_str()
        .map_err(|_| (TetdgStatus::InvalidArgument, "path is not valid UTF-8".to_string()))?;
    Ok(PathBuf::from(s))
}

unsafe fn out_arg<'a, T>(p: *mut *mut T) -> Result<&'a mut *mut T, (TetdgStatus, String)> {
    p.as_mut().ok_or_else(|| null("output handle pointer"))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn tetdg_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message of the last failing call on this thread, or NULL. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn tetdg_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(std::ptr::null(), |c| c.as_ptr()))
}

/// Node counts of the degree-`p` reference element: collocation nodes,
/// cubature nodes, and quadrature nodes per face.
///
/// # Safety
/// The output pointers must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn tetdg_reference_counts(
    p: u32,
    n_p: *mut usize,
    n_cub: *mut usize,
    n_face: *mut usize,
) -> TetdgStatus {
    guard(|| {
        if n_p.is_null() || n_cub.is_null() || n_face.is_null() {
            return Err(null("output pointer"));
        }
        let re = lift(ReferenceElement::new(p as usize))?;
        *n_p = re.n_basis;
        *n_cub = re.n_cub();
        *n_face = re.n_face();
        Ok(())
    })
}

/// Read a Gmsh 2.2 ASCII mesh.
///
/// # Safety
/// `path` must be a NUL-terminated string; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn tetdg_mesh_read(path: *const c_char, out: *mut *mut TetdgMesh) -> TetdgStatus {
    guard(|| {
        let out = out_arg(out)?;
        let mesh = lift(read_gmsh_file(&path_arg(path)?))?;
        *out = Box::into_raw(Box::new(TetdgMesh { inner: mesh }));
        Ok(())
    })
}

/// Kuhn-split unit cube with `n` cells per edge.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn tetdg_mesh_box(n: u32, out: *mut *mut TetdgMesh) -> TetdgStatus {
    guard(|| {
        let out = out_arg(out)?;
        let n = n as usize;
        let mesh = lift(box_mesh([n; 3], [0.0; 3], [1.0; 3]))?;
        *out = Box::into_raw(Box::new(TetdgMesh { inner: mesh }));
        Ok(())
    })
}

/// Cubed-sphere shell between `r_inner` and `r_outer`; `half != 0` keeps
/// `z >= 0` with a symmetry plane.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn tetdg_mesh_sphere(
    n: u32,
    layers: u32,
    r_inner: f64,
    r_outer: f64,
    half: i32,
    out: *mut *mut TetdgMesh,
) -> TetdgStatus {
    guard(|| {
        let out = out_arg(out)?;
        let mesh = lift(sphere_shell(&ShellParams {
            n: n as usize,
            layers: layers as usize,
            r_inner,
            r_outer,
            half: half != 0,
        }))?;
        *out = Box::into_raw(Box::new(TetdgMesh { inner: mesh }));
        Ok(())
    })
}

/// Number of tetrahedra, 0 for a null handle.
///
/// # Safety
/// `mesh` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn tetdg_mesh_element_count(mesh: *const TetdgMesh) -> usize {
    mesh.as_ref().map_or(0, |m| m.inner.n_elements())
}

/// Sum of the element volumes, NaN for a null handle.
///
/// # Safety
/// `mesh` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn tetdg_mesh_volume(mesh: *const TetdgMesh) -> f64 {
    mesh.as_ref().map_or(f64::NAN, |m| m.inner.total_volume())
}

/// # Safety
/// `mesh` must be null or a handle not freed before.
#[no_mangle]
pub unsafe extern "C" fn tetdg_mesh_free(mesh: *mut TetdgMesh) {
    if !mesh.is_null() {
        drop(Box::from_raw(mesh));
    }
}

/// Load a JSON case file; relative paths resolve against its directory.
///
/// # Safety
/// `path` must be a NUL-terminated string; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn tetdg_case_load(path: *const c_char, out: *mut *mut TetdgCase) -> TetdgStatus {
    guard(|| {
        let out = out_arg(out)?;
        let c = lift(CaseConfig::load(&path_arg(path)?))?;
        *out = Box::into_raw(Box::new(TetdgCase { inner: c }));
        Ok(())
    })
}

/// # Safety
/// `case` must be null or a handle not freed before.
#[no_mangle]
pub unsafe extern "C" fn tetdg_case_free(case: *mut TetdgCase) {
    if !case.is_null() {
        drop(Box::from_raw(case));
    }
}

/// Curve the case mesh and write the sidecar named in the case outputs.
/// `min_jacobian` (nullable) receives the smallest curved-element Jacobian.
///
/// # Safety
/// `case` must be a live handle; `min_jacobian` null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn tetdg_curve(case: *const TetdgCase, min_jacobian: *mut f64) -> TetdgStatus {
    guard(|| {
        let c = case.as_ref().ok_or_else(|| null("case"))?;
        let report = lift(cli::cmd_curve(&c.inner))?;
        if let Some(j) = min_jacobian.as_mut() {
            *j = report.min_jacobian;
        }
        Ok(())
    })
}

/// Run the steady solve of a case, writing its state and log files.
///
/// # Safety
/// `case` must be a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn tetdg_solve(case: *const TetdgCase, out: *mut *mut TetdgSolution) -> TetdgStatus {
    guard(|| {
        let c = case.as_ref().ok_or_else(|| null("case"))?;
        let out = out_arg(out)?;
        let r = lift(cli::cmd_solve(&c.inner))?;
        *out = Box::into_raw(Box::new(TetdgSolution { inner: r }));
        Ok(())
    })
}

/// Final polynomial degree, 0 for a null handle.
///
/// # Safety
/// `sol` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn tetdg_solution_degree(sol: *const TetdgSolution) -> u32 {
    sol.as_ref().map_or(0, |s| s.inner.degree as u32)
}

/// Last residual of the final level, NaN for a null handle.
///
/// # Safety
/// `sol` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn tetdg_solution_residual(sol: *const TetdgSolution) -> f64 {
    sol.as_ref()
        .and_then(|s| s.inner.levels.last())
        .map_or(f64::NAN, |l| l.residual)
}

/// 1 if the final level reached its tolerance, 0 otherwise.
///
/// # Safety
/// `sol` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn tetdg_solution_converged(sol: *const TetdgSolution) -> i32 {
    sol.as_ref().map_or(0, |s| s.inner.converged() as i32)
}

/// Copy the nodal state, element-major then field-major
/// (`elements * 5 * N_p` doubles). With `buf` null, only `len_out`
/// receives the required length.
///
/// # Safety
/// `sol` must be a live handle, `buf` null or valid for `len` writes,
/// `len_out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn tetdg_solution_state(
    sol: *const TetdgSolution,
    buf: *mut f64,
    len: usize,
    len_out: *mut usize,
) -> TetdgStatus {
    guard(|| {
        let s = sol.as_ref().ok_or_else(|| null("solution"))?;
        let len_out = len_out.as_mut().ok_or_else(|| null("length pointer"))?;
        let dense = s.inner.state.unpack();
        *len_out = dense.len();
        if buf.is_null() {
            return Ok(());
        }
        if len < dense.len() {
            return Err((
                TetdgStatus::BufferTooSmall,
                format!("buffer holds {len} values, {} needed", dense.len()),
            ));
        }
        std::slice::from_raw_parts_mut(buf, dense.len()).copy_from_slice(&dense);
        Ok(())
    })
}

/// # Safety
/// `sol` must be null or a handle not freed before.
#[no_mangle]
pub unsafe extern "C" fn tetdg_solution_free(sol: *mut TetdgSolution) {
    if !sol.is_null() {
        drop(Box::from_raw(sol));
    }
}
