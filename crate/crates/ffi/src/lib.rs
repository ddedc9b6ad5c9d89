//! C ABI over the `qsawtooth` simulator.
//!
//! Every fallible call returns a [`QsStatus`]; on failure a message for the
//! current thread is available from [`qs_last_error`]. Registers and
//! circuits are opaque handles released with their `_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use qsawtooth::analysis::{compute_fidelity_trace, fidelity, husimi};
use qsawtooth::circuit::{apply_circuit, build_map_circuit, route, Circuit, LatticeLayout};
use qsawtooth::classical::{classical_step, ClassicalState};
use qsawtooth::hardware::ErrorMode;
use qsawtooth::state::{init_momentum_eigenstate, ExactEngine};
use qsawtooth::{Error, QuantumRegister, SawtoothParams};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QsStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    DimensionMismatch = 3,
    BasisMismatch = 4,
    BufferTooSmall = 5,
    Io = 6,
    Panic = 7,
    Other = 8,
}

/// Error model selector for [`qs_fidelity_trace`].
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QsErrorMode {
    Ideal = 0,
    Static = 1,
    NoisyDetuning = 2,
    RandomRotation = 3,
}

/// A state vector in the momentum or angle basis.
pub struct QsRegister(QuantumRegister);

/// A gate sequence, optionally routed onto a lattice.
pub struct QsCircuit(Circuit);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> QsStatus {
    match e {
        Error::InvalidParameter { .. } | Error::QubitOutOfRange { .. } | Error::LayoutTooSmall { .. } => {
            QsStatus::InvalidArgument
        }
        Error::DimensionMismatch { .. } => QsStatus::DimensionMismatch,
        Error::BasisMismatch { .. } => QsStatus::BasisMismatch,
        Error::Io { .. } => QsStatus::Io,
        _ => QsStatus::Other,
    }
}

/// Run `f`, turning errors and panics into a status code.
fn guard(f: impl FnOnce() -> Result<(), (QsStatus, String)>) -> QsStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => QsStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(panic) => {
            let msg = panic
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| panic.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_error(format!("internal panic: {msg}"));
            QsStatus::Panic
        }
    }
}

fn lift<T>(r: qsawtooth::Result<T>) -> Result<T, (QsStatus, String)> {
    r.map_err(|e| (status_of(&e), e.to_string()))
}

fn null(what: &str) -> (QsStatus, String) {
    (QsStatus::NullPointer, format!("`{what}` is null"))
}

fn invalid(msg: &str) -> (QsStatus, String) {
    (QsStatus::InvalidArgument, msg.to_string())
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> Result<&'a T, (QsStatus, String)> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn deref_mut<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, (QsStatus, String)> {
    p.as_mut().ok_or_else(|| null(what))
}

/// Message for the last failed call on this thread. The pointer stays valid
/// until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn qs_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Momentum eigenstate `|n⟩` (`n` in `[−N/2, N/2)`) on `n_qubits` qubits.
///
/// # Safety
/// `out` must be a valid pointer to writable storage for one handle.
#[no_mangle]
pub unsafe extern "C" fn qs_register_momentum_eigenstate(
    n_qubits: usize,
    n: i64,
    out: *mut *mut QsRegister,
) -> QsStatus {
    guard(|| {
        let out = deref_mut(out, "out")?;
        let reg = lift(QuantumRegister::momentum_eigenstate(n_qubits, n))?;
        *out = Box::into_raw(Box::new(QsRegister(reg)));
        Ok(())
    })
}

/// Copy of a register.
///
/// # Safety
/// `reg` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn qs_register_clone(reg: *const QsRegister, out: *mut *mut QsRegister) -> QsStatus {
    guard(|| {
        let reg = deref(reg, "reg")?;
        let out = deref_mut(out, "out")?;
        *out = Box::into_raw(Box::new(QsRegister(reg.0.clone())));
        Ok(())
    })
}

/// # Safety
/// `reg` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn qs_register_free(reg: *mut QsRegister) {
    if !reg.is_null() {
        drop(Box::from_raw(reg));
    }
}

/// Hilbert-space dimension `2^n_qubits`, or 0 for a null handle.
///
/// # Safety
/// `reg` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn qs_register_dim(reg: *const QsRegister) -> usize {
    reg.as_ref().map_or(0, |r| r.0.dim())
}

/// Copy amplitudes into `re` and `im`, each of length `len ≥ dim`.
///
/// # Safety
/// `re` and `im` must point to `len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn qs_register_amplitudes(
    reg: *const QsRegister,
    re: *mut f64,
    im: *mut f64,
    len: usize,
) -> QsStatus {
    guard(|| {
        let reg = deref(reg, "reg")?;
        if re.is_null() || im.is_null() {
            return Err(null("re/im"));
        }
        let amps = reg.0.amplitudes();
        if len < amps.len() {
            return Err((
                QsStatus::BufferTooSmall,
                format!("need {} entries, got {len}", amps.len()),
            ));
        }
        let re = std::slice::from_raw_parts_mut(re, amps.len());
        let im = std::slice::from_raw_parts_mut(im, amps.len());
        for (i, a) in amps.iter().enumerate() {
            re[i] = a.re;
            im[i] = a.im;
        }
        Ok(())
    })
}

/// `‖ψ‖`, or NaN for a null handle.
///
/// # Safety
/// `reg` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn qs_register_norm(reg: *const QsRegister) -> f64 {
    reg.as_ref().map_or(f64::NAN, |r| r.0.norm())
}

/// Apply `iterations` exact map steps with chaos parameter `chaos`.
///
/// # Safety
/// `reg` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn qs_exact_iterate(reg: *mut QsRegister, chaos: f64, iterations: usize) -> QsStatus {
    guard(|| {
        let reg = deref_mut(reg, "reg")?;
        let params = lift(SawtoothParams::new(reg.0.n_qubits(), chaos, 0))?;
        lift(ExactEngine::new(&params).run(&mut reg.0, iterations))
    })
}

/// `|⟨a|b⟩|²`.
///
/// # Safety
/// `a`, `b` must be live handles and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn qs_fidelity(a: *const QsRegister, b: *const QsRegister, out: *mut f64) -> QsStatus {
    guard(|| {
        let (a, b) = (deref(a, "a")?, deref(b, "b")?);
        let out = deref_mut(out, "out")?;
        *out = lift(fidelity(&a.0, &b.0))?;
        Ok(())
    })
}

/// Gate circuit for one map iteration, on the default square lattice.
/// With `routed` nonzero every two-qubit gate is made nearest-neighbour.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qs_circuit_build_map(
    n_qubits: usize,
    chaos: f64,
    routed: bool,
    out: *mut *mut QsCircuit,
) -> QsStatus {
    guard(|| {
        let out = deref_mut(out, "out")?;
        let params = lift(SawtoothParams::new(n_qubits, chaos, 0))?;
        let layout = LatticeLayout::for_qubits(n_qubits);
        let mut circuit = build_map_circuit(&params);
        if routed {
            circuit = lift(route(&circuit, &layout))?.0;
        }
        *out = Box::into_raw(Box::new(QsCircuit(circuit)));
        Ok(())
    })
}

/// # Safety
/// `c` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn qs_circuit_free(c: *mut QsCircuit) {
    if !c.is_null() {
        drop(Box::from_raw(c));
    }
}

/// Timed gates (global phases excluded), or 0 for a null handle.
///
/// # Safety
/// `c` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn qs_circuit_gate_count(c: *const QsCircuit) -> usize {
    c.as_ref().map_or(0, |c| c.0.gate_count())
}

/// Apply the circuit once to a momentum-basis register.
///
/// # Safety
/// `c` and `reg` must be live handles.
#[no_mangle]
pub unsafe extern "C" fn qs_circuit_apply(c: *const QsCircuit, reg: *mut QsRegister) -> QsStatus {
    guard(|| {
        let c = deref(c, "circuit")?;
        let reg = deref_mut(reg, "reg")?;
        lift(apply_circuit(&mut reg.0, &c.0))
    })
}

/// One classical map step, in place.
///
/// # Safety
/// `p` and `theta` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qs_classical_step(p: *mut f64, theta: *mut f64, k: f64) -> QsStatus {
    guard(|| {
        let p = deref_mut(p, "p")?;
        let theta = deref_mut(theta, "theta")?;
        let s = classical_step(ClassicalState { p: *p, theta: *theta }, k);
        *p = s.p;
        *theta = s.theta;
        Ok(())
    })
}

/// Husimi density on an `n_theta × n_p` grid, rows of constant p, lowest
/// p first, written to `out` (length `len ≥ n_theta·n_p`).
///
/// # Safety
/// `reg` must be a live handle and `out` point to `len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn qs_husimi(
    reg: *const QsRegister,
    n_theta: usize,
    n_p: usize,
    s: f64,
    out: *mut f64,
    len: usize,
) -> QsStatus {
    guard(|| {
        let reg = deref(reg, "reg")?;
        if out.is_null() {
            return Err(null("out"));
        }
        let need = n_theta.checked_mul(n_p).ok_or_else(|| invalid("grid too large"))?;
        if len < need {
            return Err((QsStatus::BufferTooSmall, format!("need {need} entries, got {len}")));
        }
        let h = lift(husimi(&reg.0, n_theta, n_p, s))?;
        std::slice::from_raw_parts_mut(out, need).copy_from_slice(&h.grid.values);
        Ok(())
    })
}

/// Fidelity of the routed circuit under an error model against the exact
/// evolution of `|⌊0.38 N⌋⟩`, for `t = 0..=t_max`. `coupling_ratio` is `J/δ`
/// for the static model and ignored otherwise. Writes `t_max + 1` values.
///
/// # Safety
/// `out` must point to `len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn qs_fidelity_trace(
    n_qubits: usize,
    chaos: f64,
    mode: QsErrorMode,
    epsilon: f64,
    coupling_ratio: f64,
    t_max: usize,
    seed: u64,
    out: *mut f64,
    len: usize,
) -> QsStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let need = t_max.checked_add(1).ok_or_else(|| invalid("t_max too large"))?;
        if len < need {
            return Err((QsStatus::BufferTooSmall, format!("need {need} entries, got {len}")));
        }
        let mode = match mode {
            QsErrorMode::Ideal => ErrorMode::Ideal,
            QsErrorMode::Static => ErrorMode::static_from_epsilon(epsilon, coupling_ratio, 1.0),
            QsErrorMode::NoisyDetuning => ErrorMode::noisy_from_epsilon(epsilon, 1.0),
            QsErrorMode::RandomRotation => ErrorMode::RandomRotation {
                epsilon,
                all_qubits: false,
            },
        };
        let params = lift(SawtoothParams::with_default_n0(n_qubits, chaos))?;
        let layout = LatticeLayout::for_qubits(n_qubits);
        let circuit = lift(route(&build_map_circuit(&params), &layout))?.0;
        let trace = lift(compute_fidelity_trace(
            &params, &circuit, &layout, &mode, t_max, seed, None,
        ))?;
        let out = std::slice::from_raw_parts_mut(out, need);
        for (slot, (_, f)) in out.iter_mut().zip(&trace.records) {
            *slot = *f;
        }
        Ok(())
    })
}

/// Initial register `|⌊0.38 N⌋⟩` used by the experiments.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qs_register_default_initial(n_qubits: usize, out: *mut *mut QsRegister) -> QsStatus {
    guard(|| {
        let out = deref_mut(out, "out")?;
        let params = lift(SawtoothParams::with_default_n0(n_qubits, 0.0))?;
        *out = Box::into_raw(Box::new(QsRegister(init_momentum_eigenstate(&params))));
        Ok(())
    })
}
