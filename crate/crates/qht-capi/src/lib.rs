//! C ABI for the hypothesis-testing library.
//!
//! The surface follows the usual opaque-handle pattern: a `QhtPair` is
//! created from a file/fixture name, dense matrices, or classical vectors,
//! queried through scalar out-parameters, and released with
//! [`qht_pair_free`]. Every function returns a [`QhtStatus`]; on failure a
//! thread-local message with the detail is available via
//! [`qht_last_error_message`] until the next call on the same thread.
//!
//! The header `include/qht.h` is generated at build time by cbindgen.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use qht::cli_io::load_pair;
use qht::divergence::{
    cutoff_rate, hoeffding_anti_divergence, max_relative, petz_renyi, q_star, sandwiched_renyi,
    umegaki, ArgAlpha,
};
use qht::exponents::{finite_n_exponent, Caps, Engine, ProblemPair};
use qht::operator_core::DensityOperator;
use qht::types_pinch::ClassicalPair;
use qht::Error;

/// Result codes for every `qht_*` call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QhtStatus {
    QhtOk = 0,
    /// A required pointer argument was null.
    QhtNullPointer = 1,
    /// Input failed validation (file, state invariants, parameter ranges).
    QhtInvalidInput = 2,
    /// A numerical routine failed (convergence, caps, bisection).
    QhtNumericalFailure = 3,
    /// A string argument was not valid UTF-8.
    QhtInvalidUtf8 = 4,
    /// Unexpected internal panic; the handle is still valid.
    QhtInternalPanic = 5,
}

/// Opaque discrimination instance; create with one of the constructors and
/// release with `qht_pair_free`.
pub struct QhtPair {
    inner: ProblemPair,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::new("").unwrap());
}

fn set_error(msg: &str) {
    let clean = msg.replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(clean).unwrap());
}

fn classify(err: &Error) -> QhtStatus {
    set_error(&err.to_string());
    match err.exit_code() {
        1 => QhtStatus::QhtInvalidInput,
        _ => QhtStatus::QhtNumericalFailure,
    }
}

/// Message for the most recent failure on this thread; valid until the
/// next `qht_*` call from the same thread. Never null.
#[no_mangle]
pub extern "C" fn qht_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

fn guarded<F: FnOnce() -> QhtStatus>(f: F) -> QhtStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(status) => status,
        Err(_) => {
            set_error("internal panic");
            QhtStatus::QhtInternalPanic
        }
    }
}

unsafe fn write_handle(out: *mut *mut QhtPair, pair: ProblemPair) -> QhtStatus {
    *out = Box::into_raw(Box::new(QhtPair { inner: pair }));
    QhtStatus::QhtOk
}

/// Load a pair from a JSON file path or a built-in fixture name
/// (`equal_qubit`, `bern_half_quarter`, `qubit_tilted`).
///
/// # Safety
/// `spec` must be a valid NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn qht_pair_load(spec: *const c_char, out: *mut *mut QhtPair) -> QhtStatus {
    if spec.is_null() || out.is_null() {
        set_error("null pointer argument");
        return QhtStatus::QhtNullPointer;
    }
    guarded(|| {
        let spec = match CStr::from_ptr(spec).to_str() {
            Ok(s) => s,
            Err(_) => {
                set_error("spec is not valid UTF-8");
                return QhtStatus::QhtInvalidUtf8;
            }
        };
        match load_pair(spec) {
            Ok(pair) => write_handle(out, pair),
            Err(e) => classify(&e),
        }
    })
}

/// Build a quantum pair from row-major interleaved complex entries
/// (`[re, im]` per entry, so each matrix occupies `2 * dim * dim` doubles).
///
/// # Safety
/// `rho` and `eta` must point to `2 * dim * dim` readable doubles and
/// `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn qht_pair_from_dense(
    dim: usize,
    rho: *const f64,
    eta: *const f64,
    out: *mut *mut QhtPair,
) -> QhtStatus {
    if rho.is_null() || eta.is_null() || out.is_null() {
        set_error("null pointer argument");
        return QhtStatus::QhtNullPointer;
    }
    guarded(|| {
        let parse = |ptr: *const f64| -> qht::Result<DensityOperator> {
            let raw = std::slice::from_raw_parts(ptr, 2 * dim * dim);
            DensityOperator::from_interleaved(dim, raw)
        };
        let rho = match parse(rho) {
            Ok(d) => d,
            Err(e) => return classify(&e),
        };
        let eta = match parse(eta) {
            Ok(d) => d,
            Err(e) => return classify(&e),
        };
        match qht::StatePair::new(rho, eta) {
            Ok(sp) => write_handle(out, ProblemPair::Quantum(sp)),
            Err(e) => classify(&e),
        }
    })
}

/// Build a classical pair from two probability vectors of length `n`.
///
/// # Safety
/// `p` and `q` must point to `n` readable doubles and `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn qht_pair_from_classical(
    n: usize,
    p: *const f64,
    q: *const f64,
    out: *mut *mut QhtPair,
) -> QhtStatus {
    if p.is_null() || q.is_null() || out.is_null() {
        set_error("null pointer argument");
        return QhtStatus::QhtNullPointer;
    }
    guarded(|| {
        let p = std::slice::from_raw_parts(p, n);
        let q = std::slice::from_raw_parts(q, n);
        match ClassicalPair::from_probabilities(p, q) {
            Ok(cp) => write_handle(out, ProblemPair::Classical(cp)),
            Err(e) => classify(&e),
        }
    })
}

/// Release a pair handle; null is a no-op.
///
/// # Safety
/// `pair` must come from a `qht_pair_*` constructor and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn qht_pair_free(pair: *mut QhtPair) {
    if !pair.is_null() {
        drop(Box::from_raw(pair));
    }
}

unsafe fn with_state_pair(
    pair: *const QhtPair,
    out: *mut f64,
    f: impl FnOnce(&qht::StatePair) -> qht::Result<f64>,
) -> QhtStatus {
    if pair.is_null() || out.is_null() {
        set_error("null pointer argument");
        return QhtStatus::QhtNullPointer;
    }
    guarded(|| {
        let sp = match (*pair).inner.to_state_pair() {
            Ok(sp) => sp,
            Err(e) => return classify(&e),
        };
        match f(&sp) {
            Ok(v) => {
                *out = v;
                QhtStatus::QhtOk
            }
            Err(e) => classify(&e),
        }
    })
}

/// Sandwiched Rényi divergence D*_α in nats, α ∈ (1, 1e6].
///
/// # Safety
/// `pair` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn qht_sandwiched_renyi(
    pair: *const QhtPair,
    alpha: f64,
    out: *mut f64,
) -> QhtStatus {
    with_state_pair(pair, out, |sp| sandwiched_renyi(sp, alpha))
}

/// Petz–Rényi divergence in nats, α ∈ (0,1) ∪ (1,2].
///
/// # Safety
/// `pair` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn qht_petz_renyi(
    pair: *const QhtPair,
    alpha: f64,
    out: *mut f64,
) -> QhtStatus {
    with_state_pair(pair, out, |sp| petz_renyi(sp, alpha))
}

/// The α-norm Q*_α (linear domain).
///
/// # Safety
/// `pair` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn qht_q_star(pair: *const QhtPair, alpha: f64, out: *mut f64) -> QhtStatus {
    with_state_pair(pair, out, |sp| q_star(sp, alpha))
}

/// Umegaki relative entropy in nats.
///
/// # Safety
/// `pair` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn qht_umegaki(pair: *const QhtPair, out: *mut f64) -> QhtStatus {
    with_state_pair(pair, out, umegaki)
}

/// Max-relative entropy D*_∞ in nats.
///
/// # Safety
/// `pair` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn qht_max_relative(pair: *const QhtPair, out: *mut f64) -> QhtStatus {
    with_state_pair(pair, out, |sp| Ok(max_relative(sp)))
}

/// Hoeffding anti-divergence H*_r. `arg_alpha` receives the maximizing α,
/// `1.0` on the degenerate r ≤ D₁ branch, or `INFINITY` when the supremum
/// is approached as α → ∞.
///
/// # Safety
/// `pair` must be a live handle; each non-null out-pointer receives a value.
#[no_mangle]
pub unsafe extern "C" fn qht_hoeffding(
    pair: *const QhtPair,
    r: f64,
    tol: f64,
    value: *mut f64,
    arg_alpha: *mut f64,
    truncation_bound: *mut f64,
) -> QhtStatus {
    if pair.is_null() || value.is_null() {
        set_error("null pointer argument");
        return QhtStatus::QhtNullPointer;
    }
    guarded(|| {
        let sp = match (*pair).inner.to_state_pair() {
            Ok(sp) => sp,
            Err(e) => return classify(&e),
        };
        match hoeffding_anti_divergence(&sp, r, tol) {
            Ok(h) => {
                *value = h.value;
                if !arg_alpha.is_null() {
                    *arg_alpha = match h.arg_alpha {
                        ArgAlpha::AtOne => 1.0,
                        ArgAlpha::At(a) => a,
                        ArgAlpha::Limit => f64::INFINITY,
                    };
                }
                if !truncation_bound.is_null() {
                    *truncation_bound = h.truncation_bound;
                }
                QhtStatus::QhtOk
            }
            Err(e) => classify(&e),
        }
    })
}

/// Generalized κ-cutoff rate, κ ∈ (0, 1).
///
/// # Safety
/// `pair` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn qht_cutoff_rate(
    pair: *const QhtPair,
    kappa: f64,
    tol: f64,
    out: *mut f64,
) -> QhtStatus {
    with_state_pair(pair, out, |sp| cutoff_rate(sp, kappa, tol))
}

/// Engine selector for [`qht_finite_n_exponent`].
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QhtEngine {
    QhtEngineAuto = 0,
    QhtEngineDense = 1,
    QhtEngineClassical = 2,
    QhtEnginePinched = 3,
}

/// Finite-n strong-converse exponent b_n(r) from the exact test solvers.
///
/// # Safety
/// `pair` must be a live handle and `b_n` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn qht_finite_n_exponent(
    pair: *const QhtPair,
    n: usize,
    r: f64,
    engine: QhtEngine,
    b_n: *mut f64,
) -> QhtStatus {
    if pair.is_null() || b_n.is_null() {
        set_error("null pointer argument");
        return QhtStatus::QhtNullPointer;
    }
    guarded(|| {
        let engine = match engine {
            QhtEngine::QhtEngineAuto => Engine::Auto,
            QhtEngine::QhtEngineDense => Engine::Dense,
            QhtEngine::QhtEngineClassical => Engine::Classical,
            QhtEngine::QhtEnginePinched => Engine::Pinched,
        };
        match finite_n_exponent(&(*pair).inner, n, r, engine, Caps::default()) {
            Ok(rec) => {
                *b_n = rec.b_n;
                QhtStatus::QhtOk
            }
            Err(e) => classify(&e),
        }
    })
}

/// Order constant ln min{λ : ρ ≤ λη} of the pair.
///
/// # Safety
/// `pair` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn qht_order_log(pair: *const QhtPair, out: *mut f64) -> QhtStatus {
    with_state_pair(pair, out, |sp| Ok(sp.order_log()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::ptr;

    fn load(name: &str) -> *mut QhtPair {
        let spec = CString::new(name).unwrap();
        let mut handle: *mut QhtPair = ptr::null_mut();
        let status = unsafe { qht_pair_load(spec.as_ptr(), &mut handle) };
        assert_eq!(status, QhtStatus::QhtOk);
        assert!(!handle.is_null());
        handle
    }

    #[test]
    fn classical_divergence_through_the_abi() {
        let p = [0.5, 0.5];
        let q = [0.25, 0.75];
        let mut handle: *mut QhtPair = ptr::null_mut();
        let status = unsafe { qht_pair_from_classical(2, p.as_ptr(), q.as_ptr(), &mut handle) };
        assert_eq!(status, QhtStatus::QhtOk);
        let mut d = 0.0;
        assert_eq!(
            unsafe { qht_sandwiched_renyi(handle, 2.0, &mut d) },
            QhtStatus::QhtOk
        );
        assert!((d - (4.0f64 / 3.0).ln()).abs() < 1e-12);
        let mut c = 0.0;
        assert_eq!(
            unsafe { qht_cutoff_rate(handle, 0.5, 1e-6, &mut c) },
            QhtStatus::QhtOk
        );
        assert!((c - d).abs() < 1e-6);
        unsafe { qht_pair_free(handle) };
    }

    #[test]
    fn builtin_fixture_and_hoeffding() {
        let handle = load("bern_half_quarter");
        let (mut v, mut a, mut t) = (0.0, 0.0, 0.0);
        let status = unsafe { qht_hoeffding(handle, 0.5, 1e-6, &mut v, &mut a, &mut t) };
        assert_eq!(status, QhtStatus::QhtOk);
        assert!((v - 0.10685501427068081).abs() < 1e-6);
        assert!((a - 1.8912).abs() < 1e-2);
        assert!(t <= 1e-6);

        let mut b1 = 0.0;
        let status =
            unsafe { qht_finite_n_exponent(handle, 1, 0.5, QhtEngine::QhtEngineAuto, &mut b1) };
        assert_eq!(status, QhtStatus::QhtOk);
        assert!((b1 - 0.30423551925046655).abs() < 1e-12);
        unsafe { qht_pair_free(handle) };
    }

    #[test]
    fn dense_constructor_matches_fixture() {
        // qubit_tilted spelled as interleaved [re, im] entries
        let rho = [0.5, 0.0, 0.25, -0.1, 0.25, 0.1, 0.5, 0.0];
        let eta = [0.65, 0.0, 0.0, 0.0, 0.0, 0.0, 0.35, 0.0];
        let mut handle: *mut QhtPair = ptr::null_mut();
        let status = unsafe { qht_pair_from_dense(2, rho.as_ptr(), eta.as_ptr(), &mut handle) };
        assert_eq!(status, QhtStatus::QhtOk);
        let mut via_dense = 0.0;
        unsafe { qht_sandwiched_renyi(handle, 2.0, &mut via_dense) };
        unsafe { qht_pair_free(handle) };

        let fixture = load("qubit_tilted");
        let mut via_fixture = 0.0;
        unsafe { qht_sandwiched_renyi(fixture, 2.0, &mut via_fixture) };
        unsafe { qht_pair_free(fixture) };
        assert_eq!(via_dense, via_fixture);
        assert!((via_dense - 0.338_544_161_238_257_1).abs() < 1e-12);
    }

    #[test]
    fn errors_carry_status_and_message() {
        let mut handle: *mut QhtPair = ptr::null_mut();
        let spec = CString::new("/no/such/pair.json").unwrap();
        let status = unsafe { qht_pair_load(spec.as_ptr(), &mut handle) };
        assert_eq!(status, QhtStatus::QhtInvalidInput);
        let msg = unsafe { CStr::from_ptr(qht_last_error_message()) };
        assert!(msg.to_str().unwrap().contains("/no/such/pair.json"));

        assert_eq!(
            unsafe { qht_pair_load(ptr::null(), &mut handle) },
            QhtStatus::QhtNullPointer
        );

        let handle = load("qubit_tilted");
        let mut v = 0.0;
        // alpha out of range surfaces as invalid input
        assert_eq!(
            unsafe { qht_sandwiched_renyi(handle, 0.5, &mut v) },
            QhtStatus::QhtInvalidInput
        );
        // over-cap dense request surfaces as numerical failure
        let mut b = 0.0;
        assert_eq!(
            unsafe { qht_finite_n_exponent(handle, 13, 0.4, QhtEngine::QhtEngineDense, &mut b) },
            QhtStatus::QhtNumericalFailure
        );
        unsafe { qht_pair_free(handle) };
        unsafe { qht_pair_free(ptr::null_mut()) };
    }
}
