//! C ABI for `mkfix`.
//!
//! Every entry point returns an [`MkfixCode`]; results come back through
//! out-pointers. Handles are opaque and owned by the caller once returned,
//! each with a matching `_free`. After a nonzero code,
//! [`mkfix_last_error_message`] describes the failure on the calling thread.

use std::cell::RefCell;
use std::ffi::{c_char, c_void, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use mkfix::bvp::{greens_kernel, kernel_row_integral, solve_bvp, GridFunction, QuadratureSpec, UniformGrid};
use mkfix::metric::RealLine;
use mkfix::picard::{iterate, FixedPointResult, IterationConfig, IterationFailure, IterationTrace, Status};
use mkfix::relation::BoolMatrix;
use mkfix::verify::{check_n_transitive, TransitivityReport};
use mkfix::Error;

/// Result code of every call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MkfixCode {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    DomainError = 3,
    NumericError = 4,
    MetricAxiom = 5,
    FormatError = 6,
    /// The iteration stopped at the cap. The handle is still returned.
    MaxIterations = 7,
    Panic = 8,
}

/// Why an iteration stopped.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MkfixStatus {
    Converged = 0,
    MaxIterations = 1,
    DomainError = 2,
}

impl From<Status> for MkfixStatus {
    fn from(s: Status) -> Self {
        match s {
            Status::Converged => MkfixStatus::Converged,
            Status::MaxIterations => MkfixStatus::MaxIterations,
            Status::DomainError => MkfixStatus::DomainError,
        }
    }
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let text = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(CString::new(text).expect("nul bytes removed")));
}

fn fail(code: MkfixCode, msg: impl Into<String>) -> MkfixCode {
    set_error(msg);
    code
}

fn from_error(e: &Error) -> MkfixCode {
    let code = match e {
        Error::Argument(_) => MkfixCode::InvalidArgument,
        Error::Domain(_) => MkfixCode::DomainError,
        Error::Numeric(_) => MkfixCode::NumericError,
        Error::MetricAxiom(_) => MkfixCode::MetricAxiom,
        Error::Format(_) => MkfixCode::FormatError,
    };
    fail(code, e.to_string())
}

/// Runs `body`, turning a panic into [`MkfixCode::Panic`].
fn guarded(body: impl FnOnce() -> MkfixCode) -> MkfixCode {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(code) => code,
        Err(_) => fail(MkfixCode::Panic, "internal panic"),
    }
}

/// Message for the last failed call on this thread, or null. Valid until
/// the next call on the same thread.
#[no_mangle]
pub extern "C" fn mkfix_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// `G(t, s)` for `(t, s)` in the unit square.
///
/// # Safety
/// `out` must be null or valid for one write.
#[no_mangle]
pub unsafe extern "C" fn mkfix_greens_kernel(t: f64, s: f64, out: *mut f64) -> MkfixCode {
    guarded(|| {
        if out.is_null() {
            return fail(MkfixCode::NullPointer, "out is null");
        }
        match greens_kernel(t, s) {
            Ok(v) => {
                *out = v;
                MkfixCode::Ok
            }
            Err(e) => from_error(&e),
        }
    })
}

/// Quadrature value of `int_0^1 G(t, s) ds` with `subintervals` (even) Simpson
/// subintervals per unit length.
///
/// # Safety
/// `out` must be null or valid for one write.
#[no_mangle]
pub unsafe extern "C" fn mkfix_kernel_row_integral(t: f64, subintervals: usize, out: *mut f64) -> MkfixCode {
    guarded(|| {
        if out.is_null() {
            return fail(MkfixCode::NullPointer, "out is null");
        }
        match QuadratureSpec::new(subintervals).and_then(|q| kernel_row_integral(t, &q)) {
            Ok(v) => {
                *out = v;
                MkfixCode::Ok
            }
            Err(e) => from_error(&e),
        }
    })
}

/// Iteration settings shared by the solvers.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MkfixIterationSettings {
    pub tolerance: f64,
    pub max_iterations: usize,
    pub cauchy_window: usize,
}

/// Library defaults: tolerance 1e-10, 10000 iterations, Cauchy window 2.
#[no_mangle]
pub extern "C" fn mkfix_iteration_settings_default() -> MkfixIterationSettings {
    let d = IterationConfig::new(());
    MkfixIterationSettings { tolerance: d.tolerance, max_iterations: d.max_iterations, cauchy_window: d.cauchy_window }
}

fn config<P>(start: P, s: &MkfixIterationSettings) -> IterationConfig<P> {
    IterationConfig::new(start)
        .with_tolerance(s.tolerance)
        .with_max_iterations(s.max_iterations)
        .with_cauchy_window(s.cauchy_window)
}

/// Outcome of a Picard solve, successful or not.
struct Run<P> {
    point: Option<P>,
    residual: f64,
    iterations: usize,
    residuals: Vec<f64>,
    status: Status,
}

impl<P: Clone> Run<P> {
    fn from_result(r: Result<FixedPointResult<P>, IterationFailure<P>>) -> (Self, Option<Error>) {
        match r {
            Ok(res) => (
                Self {
                    residual: res.residual,
                    iterations: res.iterations,
                    residuals: res.trace.residuals.clone(),
                    status: res.status(),
                    point: Some(res.point),
                },
                None,
            ),
            Err(IterationFailure { error, trace }) => (Self::from_failed(trace), Some(error)),
        }
    }

    fn from_failed(trace: IterationTrace<P>) -> Self {
        Self {
            point: None,
            residual: f64::NAN,
            iterations: trace.residuals.len(),
            residuals: trace.residuals,
            status: trace.status,
        }
    }

    fn code(&self, error: Option<Error>) -> MkfixCode {
        match (error, self.status) {
            (Some(e), _) => from_error(&e),
            (None, Status::MaxIterations) => fail(MkfixCode::MaxIterations, "iteration cap reached before convergence"),
            (None, _) => MkfixCode::Ok,
        }
    }
}

/// Opaque result of [`mkfix_iterate_real`].
pub struct MkfixRealIteration(Run<f64>);

/// Opaque result of [`mkfix_bvp_solve`].
pub struct MkfixBvpSolution(Run<GridFunction>);

/// Picard iteration of `map` on the real line from `start`.
///
/// Once the iteration has started, a handle is written to `*out` whatever
/// the code, so the trace of a failed run stays inspectable. Otherwise
/// `*out` is set to null.
///
/// # Safety
/// `settings` and `out` must be null or valid; `map` must be safe to call
/// with `user`.
#[no_mangle]
pub unsafe extern "C" fn mkfix_iterate_real(
    map: Option<extern "C" fn(x: f64, user: *mut c_void) -> f64>,
    user: *mut c_void,
    start: f64,
    settings: *const MkfixIterationSettings,
    out: *mut *mut MkfixRealIteration,
) -> MkfixCode {
    guarded(|| {
        let (Some(map), false, false) = (map, settings.is_null(), out.is_null()) else {
            return fail(MkfixCode::NullPointer, "map, settings and out must be non-null");
        };
        *out = ptr::null_mut();
        let cfg = config(start, &*settings);
        if let Err(e) = cfg.validate() {
            return from_error(&e);
        }
        let f = |x: &f64| map(*x, user);
        let (handle, error) = Run::from_result(iterate(&f, &RealLine, &cfg));
        let code = handle.code(error);
        *out = Box::into_raw(Box::new(MkfixRealIteration(handle)));
        code
    })
}

/// Solves `x''' + f(t, x) = 0`, `x(0) = x(1) = x''(0) = 0` on `grid_nodes`
/// (odd) uniform nodes from the zero function. `quadrature_subintervals`
/// of 0 uses `grid_nodes - 1`.
///
/// # Safety
/// As for [`mkfix_iterate_real`].
#[no_mangle]
pub unsafe extern "C" fn mkfix_bvp_solve(
    source: Option<extern "C" fn(t: f64, x: f64, user: *mut c_void) -> f64>,
    user: *mut c_void,
    grid_nodes: usize,
    quadrature_subintervals: usize,
    settings: *const MkfixIterationSettings,
    out: *mut *mut MkfixBvpSolution,
) -> MkfixCode {
    guarded(|| {
        let (Some(source), false, false) = (source, settings.is_null(), out.is_null()) else {
            return fail(MkfixCode::NullPointer, "source, settings and out must be non-null");
        };
        *out = ptr::null_mut();
        let grid = match UniformGrid::with_nodes(grid_nodes) {
            Ok(g) => g,
            Err(e) => return from_error(&e),
        };
        let sub = if quadrature_subintervals == 0 { grid.intervals() } else { quadrature_subintervals };
        let quad = match QuadratureSpec::new(sub) {
            Ok(q) => q,
            Err(e) => return from_error(&e),
        };
        let cfg = config(GridFunction::zeros(grid), &*settings);
        if let Err(e) = cfg.validate() {
            return from_error(&e);
        }
        let f = |t: f64, x: f64| source(t, x, user);
        let (handle, error) = match solve_bvp(f, &grid, &quad, &cfg) {
            Ok(sol) => Run::from_result(Ok(sol.result)),
            Err(failure) => Run::from_result(Err(failure)),
        };
        let code = handle.code(error);
        *out = Box::into_raw(Box::new(MkfixBvpSolution(handle)));
        code
    })
}

/// Why the iteration stopped.
///
/// # Safety
/// `h` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn mkfix_real_iteration_status(h: *const MkfixRealIteration) -> MkfixStatus {
    (*h).0.status.into()
}

/// Index `n` of the stopping step; `d(x_n, x_{n+1})` was the last residual checked.
///
/// # Safety
/// `h` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn mkfix_real_iteration_iterations(h: *const MkfixRealIteration) -> usize {
    (*h).0.iterations
}

/// `d(x*, T x*)` at the returned point; NaN after a failure.
///
/// # Safety
/// `h` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn mkfix_real_iteration_residual(h: *const MkfixRealIteration) -> f64 {
    (*h).0.residual
}

/// Copies up to `cap` successive residuals into `buf` and returns the
/// full count. Pass a null `buf` to query the count.
///
/// # Safety
/// `h` must be a live handle; `buf` null or valid for `cap` writes.
#[no_mangle]
pub unsafe extern "C" fn mkfix_real_iteration_residuals(
    h: *const MkfixRealIteration,
    buf: *mut f64,
    cap: usize,
) -> usize {
    copy_out(&(*h).0.residuals, buf, cap)
}

/// Releases the handle. Null is ignored.
///
/// # Safety
/// `h` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn mkfix_real_iteration_free(h: *mut MkfixRealIteration) {
    if !h.is_null() {
        drop(Box::from_raw(h));
    }
}

/// Why the iteration stopped.
///
/// # Safety
/// `h` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn mkfix_bvp_solution_status(h: *const MkfixBvpSolution) -> MkfixStatus {
    (*h).0.status.into()
}

/// Index `n` of the stopping step; `d(x_n, x_{n+1})` was the last residual checked.
///
/// # Safety
/// `h` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn mkfix_bvp_solution_iterations(h: *const MkfixBvpSolution) -> usize {
    (*h).0.iterations
}

/// `d(x*, T x*)` at the returned point; NaN after a failure.
///
/// # Safety
/// `h` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn mkfix_bvp_solution_residual(h: *const MkfixBvpSolution) -> f64 {
    (*h).0.residual
}

/// Copies up to `cap` successive residuals into `buf` and returns the
/// full count. Pass a null `buf` to query the count.
///
/// # Safety
/// `h` must be a live handle; `buf` null or valid for `cap` writes.
#[no_mangle]
pub unsafe extern "C" fn mkfix_bvp_solution_residuals(h: *const MkfixBvpSolution, buf: *mut f64, cap: usize) -> usize {
    copy_out(&(*h).0.residuals, buf, cap)
}

/// Releases the handle. Null is ignored.
///
/// # Safety
/// `h` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn mkfix_bvp_solution_free(h: *mut MkfixBvpSolution) {
    if !h.is_null() {
        drop(Box::from_raw(h));
    }
}

unsafe fn copy_out<T: Copy>(src: &[T], buf: *mut T, cap: usize) -> usize {
    if !buf.is_null() {
        let n = src.len().min(cap);
        ptr::copy_nonoverlapping(src.as_ptr(), buf, n);
    }
    src.len()
}

/// Writes the fixed point to `*out`. Fails with `DomainError` when the
/// iteration produced none.
///
/// # Safety
/// `h` must be a live handle; `out` null or valid for one write.
#[no_mangle]
pub unsafe extern "C" fn mkfix_real_iteration_point(h: *const MkfixRealIteration, out: *mut f64) -> MkfixCode {
    guarded(|| {
        if h.is_null() || out.is_null() {
            return fail(MkfixCode::NullPointer, "handle and out must be non-null");
        }
        match (*h).0.point {
            Some(p) => {
                *out = p;
                MkfixCode::Ok
            }
            None => fail(MkfixCode::DomainError, "the iteration produced no point"),
        }
    })
}

/// Copies up to `cap` node values of the solution into `buf` and returns
/// the node count, or 0 when the solve produced no solution.
///
/// # Safety
/// `h` must be a live handle; `buf` null or valid for `cap` writes.
#[no_mangle]
pub unsafe extern "C" fn mkfix_bvp_solution_values(h: *const MkfixBvpSolution, buf: *mut f64, cap: usize) -> usize {
    match &(*h).0.point {
        Some(x) => copy_out(x.values(), buf, cap),
        None => 0,
    }
}

/// Opaque result of [`mkfix_check_n_transitive`].
pub struct MkfixTransitivity(TransitivityReport);

/// Checks `R^(N+1) ⊆ R` for the relation given by `size * size` row-major
/// bytes (nonzero means related).
///
/// # Safety
/// `rows` must be valid for `size * size` reads; `out` null or valid.
#[no_mangle]
pub unsafe extern "C" fn mkfix_check_n_transitive(
    rows: *const u8,
    size: usize,
    n: usize,
    out: *mut *mut MkfixTransitivity,
) -> MkfixCode {
    guarded(|| {
        if out.is_null() || (rows.is_null() && size > 0) {
            return fail(MkfixCode::NullPointer, "rows and out must be non-null");
        }
        *out = ptr::null_mut();
        if n == 0 {
            return fail(MkfixCode::InvalidArgument, "N must be at least 1");
        }
        let Some(cells) = size.checked_mul(size) else {
            return fail(MkfixCode::InvalidArgument, "relation size overflows");
        };
        let bytes = if cells == 0 { &[][..] } else { std::slice::from_raw_parts(rows, cells) };
        let rel = BoolMatrix::from_fn(size, |i, j| bytes[i * size + j] != 0);
        *out = Box::into_raw(Box::new(MkfixTransitivity(check_n_transitive(&rel, n))));
        MkfixCode::Ok
    })
}

/// 1 when the relation is N-transitive, 0 otherwise.
///
/// # Safety
/// `h` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn mkfix_transitivity_passes(h: *const MkfixTransitivity) -> i32 {
    i32::from((*h).0.passes)
}

/// Copies up to `cap` indices of the counterexample chain into `buf` and
/// returns its length (`N + 2`), or 0 when the check passed.
///
/// # Safety
/// `h` must be a live handle; `buf` null or valid for `cap` writes.
#[no_mangle]
pub unsafe extern "C" fn mkfix_transitivity_counterexample(
    h: *const MkfixTransitivity,
    buf: *mut usize,
    cap: usize,
) -> usize {
    match &(*h).0.counterexample {
        Some(chain) => copy_out(chain, buf, cap),
        None => 0,
    }
}

/// Releases the handle. Null is ignored.
///
/// # Safety
/// `h` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn mkfix_transitivity_free(h: *mut MkfixTransitivity) {
    if !h.is_null() {
        drop(Box::from_raw(h));
    }
}
