//! C ABI over the redlab library: opaque distribution handles, status
//! codes, and flat functions for the bounds, code construction, and the
//! extremal families.
//!
//! Every function returns a [`RedlabStatus`]; results travel through out
//! pointers. Panics are caught at the boundary and reported as
//! `REDLAB_INTERNAL`.

use std::panic::{catch_unwind, UnwindSafe};

use redlab::huffman::{build_huffman, redundancy};
use redlab::{bounds, extremal, Error, ProbabilityMultiset};

/// Status code returned by every entry point.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RedlabStatus {
    RedlabOk = 0,
    /// Malformed input: bad probabilities, unknown name, empty data.
    RedlabInvalidArgument = 1,
    /// Structurally valid input outside a function's domain.
    RedlabOutOfDomain = 2,
    /// A configured resource budget rejected the request.
    RedlabResourceLimit = 3,
    /// An iterative method exhausted its budget.
    RedlabNoConvergence = 4,
    /// A required pointer was null.
    RedlabNullPointer = 5,
    /// The provided buffer is too small.
    RedlabBufferTooSmall = 6,
    /// Unexpected internal failure.
    RedlabInternal = 7,
}

fn status_of(err: &Error) -> RedlabStatus {
    match err {
        Error::GridTooFine(_) => RedlabStatus::RedlabResourceLimit,
        Error::NoConvergence(_) => RedlabStatus::RedlabNoConvergence,
        Error::OutOfRange { .. } | Error::BadRadix(_) => RedlabStatus::RedlabOutOfDomain,
        _ => RedlabStatus::RedlabInvalidArgument,
    }
}

/// Opaque probability multiset handle.
pub struct RedlabDist {
    inner: ProbabilityMultiset,
}

fn guarded<F: FnOnce() -> RedlabStatus + UnwindSafe>(f: F) -> RedlabStatus {
    catch_unwind(f).unwrap_or(RedlabStatus::RedlabInternal)
}

/// Builds a distribution handle from `len` probabilities. On success the
/// handle is written to `out` and must be released with
/// [`redlab_dist_free`].
///
/// # Safety
/// `probs` must point to `len` readable doubles and `out` must be a valid
/// destination for one pointer.
#[no_mangle]
pub unsafe extern "C" fn redlab_dist_new(
    probs: *const f64,
    len: usize,
    out: *mut *mut RedlabDist,
) -> RedlabStatus {
    if probs.is_null() || out.is_null() {
        return RedlabStatus::RedlabNullPointer;
    }
    let values = std::slice::from_raw_parts(probs, len);
    guarded(move || match ProbabilityMultiset::new(values) {
        Ok(inner) => {
            let handle = Box::new(RedlabDist { inner });
            unsafe { *out = Box::into_raw(handle) };
            RedlabStatus::RedlabOk
        }
        Err(e) => status_of(&e),
    })
}

/// Releases a handle created by this library. A null pointer is ignored.
///
/// # Safety
/// `dist` must be null or a pointer previously returned by this library
/// and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn redlab_dist_free(dist: *mut RedlabDist) {
    if !dist.is_null() {
        drop(unsafe { Box::from_raw(dist) });
    }
}

/// Number of symbols in the distribution.
///
/// # Safety
/// `dist` must be a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn redlab_dist_len(dist: *const RedlabDist) -> usize {
    if dist.is_null() {
        return 0;
    }
    unsafe { &*dist }.inner.len()
}

/// Entropy of the distribution in base `radix`.
///
/// # Safety
/// `dist` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn redlab_dist_entropy(
    dist: *const RedlabDist,
    radix: u32,
    out: *mut f64,
) -> RedlabStatus {
    if dist.is_null() || out.is_null() {
        return RedlabStatus::RedlabNullPointer;
    }
    let handle = unsafe { &*dist };
    guarded(move || match handle.inner.entropy(radix) {
        Ok(h) => {
            unsafe { *out = h };
            RedlabStatus::RedlabOk
        }
        Err(e) => status_of(&e),
    })
}

/// Huffman redundancy of the distribution over a `radix`-letter alphabet.
///
/// # Safety
/// `dist` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn redlab_redundancy(
    dist: *const RedlabDist,
    radix: u32,
    out: *mut f64,
) -> RedlabStatus {
    if dist.is_null() || out.is_null() {
        return RedlabStatus::RedlabNullPointer;
    }
    let handle = unsafe { &*dist };
    guarded(move || match redundancy(&handle.inner, radix) {
        Ok(r) => {
            unsafe { *out = r };
            RedlabStatus::RedlabOk
        }
        Err(e) => status_of(&e),
    })
}

/// Codeword length of every symbol, most likely first. `cap` is the
/// capacity of `out`; the number of lengths is written to `written`.
///
/// # Safety
/// `dist` must be a live handle; `out` must hold `cap` u32 slots;
/// `written` must be writable.
#[no_mangle]
pub unsafe extern "C" fn redlab_code_lengths(
    dist: *const RedlabDist,
    radix: u32,
    out: *mut u32,
    cap: usize,
    written: *mut usize,
) -> RedlabStatus {
    if dist.is_null() || out.is_null() || written.is_null() {
        return RedlabStatus::RedlabNullPointer;
    }
    let handle = unsafe { &*dist };
    guarded(move || match build_huffman(&handle.inner, radix) {
        Ok(tree) => {
            let lengths = tree.code_lengths();
            let slice = lengths.as_slice();
            if slice.len() > cap {
                return RedlabStatus::RedlabBufferTooSmall;
            }
            unsafe {
                std::ptr::copy_nonoverlapping(slice.as_ptr(), out, slice.len());
                *written = slice.len();
            }
            RedlabStatus::RedlabOk
        }
        Err(e) => status_of(&e),
    })
}

fn scalar_bound(
    eval: impl FnOnce() -> redlab::Result<bounds::BoundValue> + UnwindSafe,
    out: *mut f64,
    witness_m: *mut u32,
) -> RedlabStatus {
    if out.is_null() {
        return RedlabStatus::RedlabNullPointer;
    }
    guarded(move || match eval() {
        Ok(bound) => {
            unsafe { *out = bound.value };
            if !witness_m.is_null() {
                unsafe { *witness_m = bound.witness_m.unwrap_or(0) };
            }
            RedlabStatus::RedlabOk
        }
        Err(e) => status_of(&e),
    })
}

/// Largest Huffman redundancy for a source containing probability `p`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn redlab_r_max(p: f64, out: *mut f64) -> RedlabStatus {
    scalar_bound(move || bounds::r_max(p), out, std::ptr::null_mut())
}

/// Piecewise upper bound that caps the middle region at 1/2.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn redlab_r_ub(p: f64, out: *mut f64) -> RedlabStatus {
    scalar_bound(move || bounds::r_ub(p), out, std::ptr::null_mut())
}

/// Upper bound as a function of the most likely probability.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn redlab_f_p1(p1: f64, out: *mut f64) -> RedlabStatus {
    scalar_bound(move || bounds::f_p1(p1), out, std::ptr::null_mut())
}

/// Smallest Huffman redundancy for a source containing probability `p`.
/// `witness_m` (optional, may be null) receives the optimal depth.
///
/// # Safety
/// `out` must be writable; `witness_m` may be null or writable.
#[no_mangle]
pub unsafe extern "C" fn redlab_r_min(p: f64, out: *mut f64, witness_m: *mut u32) -> RedlabStatus {
    scalar_bound(move || bounds::r_min(p), out, witness_m)
}

/// Lower bound when `p` is the least likely symbol.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn redlab_r_min_pn(p: f64, out: *mut f64) -> RedlabStatus {
    scalar_bound(move || bounds::r_min_pn(p), out, std::ptr::null_mut())
}

/// D-ary lower bound for a source containing probability `p`.
///
/// # Safety
/// `out` must be writable; `witness_m` may be null or writable.
#[no_mangle]
pub unsafe extern "C" fn redlab_r_min_d(
    p: f64,
    radix: u32,
    out: *mut f64,
    witness_m: *mut u32,
) -> RedlabStatus {
    scalar_bound(move || bounds::r_min_d(p, radix), out, witness_m)
}

/// Builds the lower-bound-achieving backbone distribution for `p` at its
/// optimal depth and returns it as a new handle.
///
/// # Safety
/// `out` must be a valid destination for one pointer.
#[no_mangle]
pub unsafe extern "C" fn redlab_backbone(p: f64, out: *mut *mut RedlabDist) -> RedlabStatus {
    if out.is_null() {
        return RedlabStatus::RedlabNullPointer;
    }
    guarded(move || match extremal::backbone(p, None) {
        Ok(member) => {
            let handle = Box::new(RedlabDist { inner: member.dist });
            unsafe { *out = Box::into_raw(handle) };
            RedlabStatus::RedlabOk
        }
        Err(e) => status_of(&e),
    })
}

/// Copies the probabilities out of a handle, most likely first. `cap` is
/// the capacity of `out`; the count is written to `written`.
///
/// # Safety
/// `dist` must be a live handle; `out` must hold `cap` doubles;
/// `written` must be writable.
#[no_mangle]
pub unsafe extern "C" fn redlab_dist_probs(
    dist: *const RedlabDist,
    out: *mut f64,
    cap: usize,
    written: *mut usize,
) -> RedlabStatus {
    if dist.is_null() || out.is_null() || written.is_null() {
        return RedlabStatus::RedlabNullPointer;
    }
    let handle = unsafe { &*dist };
    let probs = handle.inner.probs();
    if probs.len() > cap {
        return RedlabStatus::RedlabBufferTooSmall;
    }
    unsafe {
        std::ptr::copy_nonoverlapping(probs.as_ptr(), out, probs.len());
        *written = probs.len();
    }
    RedlabStatus::RedlabOk
}
