//! C interface to `kcalc`.
//!
//! Every function returns a [`KcalcStatus`]; results come back through out
//! pointers. Handles and strings allocated here must be released with the
//! matching `*_free` function. After a failure, [`kcalc_last_error`] holds a
//! message for the calling thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use kcalc::arith::{FactorBudget, KPowerRational};
use kcalc::colimit::prime_power_witness;
use kcalc::odometer::{k0_odometer, membership_psi, LocallyConstantFn, OdometerK0, OdometerSpec};
use kcalc::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KcalcStatus {
    Ok = 0,
    InvalidInput = 1,
    Precondition = 2,
    Budget = 3,
    Verification = 4,
    NullPointer = 5,
    Panic = 6,
}

impl From<&Error> for KcalcStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::Precondition(_) => KcalcStatus::Precondition,
            Error::FactorBudget { .. } | Error::Budget(_) => KcalcStatus::Budget,
            Error::Verification(_) => KcalcStatus::Verification,
            _ => KcalcStatus::InvalidInput,
        }
    }
}

/// `K_0` data of an odometer crossed product over a finite level prefix.
pub struct KcalcOdometer(OdometerK0);

/// A prime power `q^r` on which `k` has multiplicative order `p^s`.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct KcalcWitness {
    pub q: u64,
    pub r: u32,
    pub order: u64,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: impl Into<String>) {
    let msg = CString::new(msg.into().replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|slot| *slot.borrow_mut() = msg);
}

fn guard(f: impl FnOnce() -> Result<(), KcalcStatus>) -> KcalcStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => KcalcStatus::Ok,
        Ok(Err(status)) => status,
        Err(_) => {
            set_error("internal panic");
            KcalcStatus::Panic
        }
    }
}

fn fail(e: Error) -> KcalcStatus {
    set_error(e.to_string());
    KcalcStatus::from(&e)
}

fn null() -> KcalcStatus {
    set_error("null pointer argument");
    KcalcStatus::NullPointer
}

/// Message for the last failure on this thread; valid until the next call
/// into this library from the same thread. Never null.
#[no_mangle]
pub extern "C" fn kcalc_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

/// # Safety
/// `s` must be null or a string returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn kcalc_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Build the odometer with levels `levels[0..len]`.
///
/// # Safety
/// `levels` must point to `len` readable values and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn kcalc_odometer_new(
    k: u64,
    levels: *const u64,
    len: usize,
    out: *mut *mut KcalcOdometer,
) -> KcalcStatus {
    guard(|| {
        if out.is_null() || (levels.is_null() && len > 0) {
            return Err(null());
        }
        *out = ptr::null_mut();
        let levels = if len == 0 { Vec::new() } else { std::slice::from_raw_parts(levels, len).to_vec() };
        let spec = OdometerSpec::new(k, levels).map_err(fail)?;
        let k0 = k0_odometer(&spec).map_err(fail)?;
        *out = Box::into_raw(Box::new(KcalcOdometer(k0)));
        Ok(())
    })
}

/// # Safety
/// `h` must be null or a live handle from [`kcalc_odometer_new`].
#[no_mangle]
pub unsafe extern "C" fn kcalc_odometer_free(h: *mut KcalcOdometer) {
    if !h.is_null() {
        drop(Box::from_raw(h));
    }
}

/// # Safety
/// `h` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn kcalc_odometer_stage_count(h: *const KcalcOdometer, out: *mut usize) -> KcalcStatus {
    guard(|| {
        let (Some(h), false) = (h.as_ref(), out.is_null()) else {
            return Err(null());
        };
        *out = h.0.stages.len();
        Ok(())
    })
}

/// Decimal string of the stage modulus `k^{n_i} - 1` (0-based `stage`).
/// Free the result with [`kcalc_string_free`].
///
/// # Safety
/// `h` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn kcalc_odometer_modulus(
    h: *const KcalcOdometer,
    stage: usize,
    out: *mut *mut c_char,
) -> KcalcStatus {
    guard(|| {
        let (Some(h), false) = (h.as_ref(), out.is_null()) else {
            return Err(null());
        };
        let s = h.0.stages.get(stage).ok_or_else(|| {
            fail(Error::InvalidInput(format!("stage {stage} outside the prefix")))
        })?;
        *out = CString::new(s.modulus.to_string()).expect("digits").into_raw();
        Ok(())
    })
}

/// Whether every level carries a trivial-kernel certificate, i.e. `K_1 = 0`.
///
/// # Safety
/// `h` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn kcalc_odometer_k1_vanishes(h: *const KcalcOdometer, out: *mut bool) -> KcalcStatus {
    guard(|| {
        let (Some(h), false) = (h.as_ref(), out.is_null()) else {
            return Err(null());
        };
        *out = h.0.k1_vanishes();
        Ok(())
    })
}

/// The smallest `q^r` with `ord_{q^r}(k) = p^s`. `budget_bits = 0` uses the
/// default factorization guard.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn kcalc_witness(
    k: u64,
    p: u64,
    s: u32,
    budget_bits: u32,
    out: *mut KcalcWitness,
) -> KcalcStatus {
    guard(|| {
        if out.is_null() {
            return Err(null());
        }
        let budget = if budget_bits == 0 { FactorBudget::default() } else { FactorBudget::new(budget_bits) };
        let w = prime_power_witness(k, p, s, &budget).map_err(fail)?;
        *out = KcalcWitness {
            q: w.q,
            r: w.r,
            order: w.order,
        };
        Ok(())
    })
}

/// Whether `f(j) = numers[j] / k^expos[j]` lies in the image of
/// `id - (1/k)T`.
///
/// # Safety
/// `numers` and `expos` must point to `n` readable values; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn kcalc_membership(
    k: u64,
    numers: *const i64,
    expos: *const u32,
    n: usize,
    out: *mut bool,
) -> KcalcStatus {
    guard(|| {
        if out.is_null() || numers.is_null() || expos.is_null() {
            return Err(null());
        }
        if k < 2 {
            return Err(fail(Error::InvalidInput(format!("k = {k} must be at least 2"))));
        }
        let numers = std::slice::from_raw_parts(numers, n);
        let expos = std::slice::from_raw_parts(expos, n);
        let values = numers
            .iter()
            .zip(expos)
            .map(|(&a, &e)| KPowerRational::normalize(a.into(), e, k))
            .collect();
        let f = LocallyConstantFn::new(k, values).map_err(fail)?;
        *out = membership_psi(&f);
        Ok(())
    })
}

/// Run a command line (`argv[0]` is the program name) and return its JSON
/// report. Free the result with [`kcalc_string_free`].
///
/// # Safety
/// `argv` must point to `argc` NUL-terminated strings; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn kcalc_run_json(
    argc: usize,
    argv: *const *const c_char,
    out: *mut *mut c_char,
) -> KcalcStatus {
    guard(|| {
        if out.is_null() || (argv.is_null() && argc > 0) {
            return Err(null());
        }
        *out = ptr::null_mut();
        let mut args = Vec::with_capacity(argc);
        for i in 0..argc {
            let a = *argv.add(i);
            if a.is_null() {
                return Err(null());
            }
            let text = CStr::from_ptr(a)
                .to_str()
                .map_err(|_| fail(Error::InvalidInput(format!("argument {i} is not UTF-8"))))?;
            args.push(text.to_string());
        }
        let report = kcalc::cli::run_args(args).map_err(fail)?;
        *out = CString::new(report.to_json()).map_err(|_| fail(Error::InvalidInput("NUL in report".into())))?.into_raw();
        Ok(())
    })
}
