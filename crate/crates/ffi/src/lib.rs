//! C ABI for `sumlevel`.
//!
//! Every function returns an [`SlStatus`]; results travel through out
//! pointers. Families and operators are opaque handles released with their
//! `_free` function. After a failure, [`sl_last_error`] copies the message of
//! the most recent error on the calling thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use sumlevel::error::{Error, Guards};
use sumlevel::exact_kernel::Rational;
use sumlevel::sum_level::{
    complement_family_guarded, e_set_measure_guarded, enumerate_sum_level_guarded, lambda_compensated_guarded,
    lambda_exact_guarded, level_family, FamilyTag, IntervalFamily,
};
use sumlevel::transfer_operator::{GridEngine, InducedEngine};

/// Status codes.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SlStatus {
    Ok = 0,
    Domain = 1,
    InvalidArgument = 2,
    Guard = 3,
    Checkpoint = 4,
    Io = 5,
    NullPointer = 6,
    BufferTooSmall = 7,
    Panic = 8,
}

/// Interval families of a level.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SlFamilyKind {
    C = 0,
    Complement = 1,
    All = 2,
    Even = 3,
}

/// Operator engines.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SlEngine {
    Induced = 0,
    Grid = 1,
}

/// A closed interval `[left_num/left_den, right_num/right_den]`.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SlInterval {
    pub left_num: u64,
    pub left_den: u64,
    pub right_num: u64,
    pub right_den: u64,
}

/// Opaque list of intervals.
pub struct SlFamily(IntervalFamily);

enum Engine {
    Induced(Box<InducedEngine>),
    Grid(GridEngine),
}

/// Opaque iterated transfer operator.
pub struct SlOperator(Engine);

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: String) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

fn status_of(e: &Error) -> SlStatus {
    match e {
        Error::LevelTooLarge { .. } => SlStatus::Guard,
        Error::Checkpoint(_) => SlStatus::Checkpoint,
        Error::Io(_) => SlStatus::Io,
        _ => SlStatus::Domain,
    }
}

struct Fail(SlStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

fn null() -> Fail {
    Fail(SlStatus::NullPointer, "null pointer argument".into())
}

fn guarded(f: impl FnOnce() -> Result<(), Fail>) -> SlStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => SlStatus::Ok,
        Ok(Err(Fail(status, msg))) => {
            set_error(msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_error(msg);
            SlStatus::Panic
        }
    }
}

unsafe fn out<'a, T>(p: *mut T) -> Result<&'a mut T, Fail> {
    p.as_mut().ok_or_else(null)
}

/// Writes `s` as a NUL-terminated string into `buf` of capacity `len`.
/// `written`, when non-null, receives the length without the terminator,
/// also on `BufferTooSmall`.
unsafe fn write_str(s: &str, buf: *mut c_char, len: usize, written: *mut usize) -> Result<(), Fail> {
    if let Some(w) = written.as_mut() {
        *w = s.len();
    }
    if buf.is_null() {
        return Err(null());
    }
    if s.len() + 1 > len {
        return Err(Fail(SlStatus::BufferTooSmall, format!("need {} bytes", s.len() + 1)));
    }
    ptr::copy_nonoverlapping(s.as_ptr(), buf as *mut u8, s.len());
    *buf.add(s.len()) = 0;
    Ok(())
}

/// Copies the last error message of this thread into `buf`.
///
/// # Safety
/// `buf` must be valid for `len` bytes; `written` may be null.
#[no_mangle]
pub unsafe extern "C" fn sl_last_error(buf: *mut c_char, len: usize, written: *mut usize) -> SlStatus {
    guarded(|| {
        let msg = LAST_ERROR.with(|e| e.borrow().clone());
        write_str(&msg, buf, len, written)
    })
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn sl_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// λ(Cₙ) as an exact fraction `"p/q"` in `buf` and as a double in `value`.
///
/// # Safety
/// `buf` must be valid for `len` bytes; `written` and `value` may be null.
#[no_mangle]
pub unsafe extern "C" fn sl_lambda_exact(
    n: u32,
    buf: *mut c_char,
    len: usize,
    written: *mut usize,
    value: *mut f64,
) -> SlStatus {
    guarded(|| {
        let v = lambda_exact_guarded(n, &Guards::default())?;
        let r = v.exact.expect("exact method");
        if let Some(x) = value.as_mut() {
            *x = v.approx;
        }
        write_str(&r.to_string(), buf, len, written)
    })
}

/// λ(Cₙ) by compensated summation.
///
/// # Safety
/// `value` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sl_lambda_compensated(n: u32, value: *mut f64) -> SlStatus {
    guarded(|| {
        let v = out(value)?;
        *v = lambda_compensated_guarded(n, &Guards::default())?.approx;
        Ok(())
    })
}

/// λ(Eₙᵉ).
///
/// # Safety
/// `value` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sl_e_set_measure(n: u32, eps: f64, value: *mut f64) -> SlStatus {
    guarded(|| {
        let v = out(value)?;
        *v = e_set_measure_guarded(n, eps, &Guards::default())?.approx;
        Ok(())
    })
}

/// Partition-function estimate `(1/n) log Σ diam(I)^t` over a family.
///
/// # Safety
/// `value` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sl_pressure_estimate(n: u32, t: f64, family: SlFamilyKind, value: *mut f64) -> SlStatus {
    guarded(|| {
        let v = out(value)?;
        *v = sumlevel::pressure::pressure_estimate(n, t, tag(family))?;
        Ok(())
    })
}

fn tag(kind: SlFamilyKind) -> FamilyTag {
    match kind {
        SlFamilyKind::C => FamilyTag::C,
        SlFamilyKind::Complement => FamilyTag::Complement,
        SlFamilyKind::All => FamilyTag::All,
        SlFamilyKind::Even => FamilyTag::Even,
    }
}

/// Enumerates a family of level `n`.
///
/// # Safety
/// `family` must be a valid pointer; on success it receives a handle owned by
/// the caller.
#[no_mangle]
pub unsafe extern "C" fn sl_family_new(n: u32, kind: SlFamilyKind, family: *mut *mut SlFamily) -> SlStatus {
    guarded(|| {
        let slot = out(family)?;
        let g = Guards::default();
        let f = match kind {
            SlFamilyKind::C => enumerate_sum_level_guarded(n, &g)?,
            SlFamilyKind::Complement => complement_family_guarded(n, &g)?,
            SlFamilyKind::All => level_family(n, &g)?,
            SlFamilyKind::Even => {
                let c = enumerate_sum_level_guarded(n, &g)?;
                let pairs = c.merged_pairs()?;
                let mut merged = c.clone();
                merged.tag = FamilyTag::Even;
                merged.codes.clear();
                merged.members = pairs
                    .into_iter()
                    .zip(&c.members)
                    .map(|((l, r), iv)| {
                        let mut iv = *iv;
                        iv.left = l;
                        iv.right = r;
                        iv.index = None;
                        iv
                    })
                    .collect();
                merged
            }
        };
        *slot = Box::into_raw(Box::new(SlFamily(f)));
        Ok(())
    })
}

/// Number of intervals in a family.
///
/// # Safety
/// `family` must be a live handle and `count` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sl_family_len(family: *const SlFamily, count: *mut usize) -> SlStatus {
    guarded(|| {
        let f = family.as_ref().ok_or_else(null)?;
        *out(count)? = f.0.members.len();
        Ok(())
    })
}

/// The `index`-th interval (0-based, increasing order).
///
/// # Safety
/// `family` must be a live handle and `interval` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sl_family_get(family: *const SlFamily, index: usize, interval: *mut SlInterval) -> SlStatus {
    guarded(|| {
        let f = family.as_ref().ok_or_else(null)?;
        let iv = f.0.members.get(index).ok_or_else(|| {
            Fail(SlStatus::InvalidArgument, format!("index {index} out of range {}", f.0.members.len()))
        })?;
        *out(interval)? = SlInterval {
            left_num: iv.left.num,
            left_den: iv.left.den,
            right_num: iv.right.num,
            right_den: iv.right.den,
        };
        Ok(())
    })
}

/// Total length of a family as `"p/q"`.
///
/// # Safety
/// `family` must be a live handle and `buf` valid for `len` bytes.
#[no_mangle]
pub unsafe extern "C" fn sl_family_measure(
    family: *const SlFamily,
    buf: *mut c_char,
    len: usize,
    written: *mut usize,
) -> SlStatus {
    guarded(|| {
        let f = family.as_ref().ok_or_else(null)?;
        let m: Rational = f.0.measure();
        write_str(&m.to_string(), buf, len, written)
    })
}

/// Releases a family. Null is ignored.
///
/// # Safety
/// `family` must come from [`sl_family_new`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn sl_family_free(family: *mut SlFamily) {
    if !family.is_null() {
        drop(Box::from_raw(family));
    }
}

/// Creates an operator positioned at level 1. `grid` is ignored by the
/// induced engine.
///
/// # Safety
/// `op` must be a valid pointer; on success it receives an owned handle.
#[no_mangle]
pub unsafe extern "C" fn sl_operator_new(engine: SlEngine, grid: usize, op: *mut *mut SlOperator) -> SlStatus {
    guarded(|| {
        let slot = out(op)?;
        let e = match engine {
            SlEngine::Induced => Engine::Induced(Box::new(InducedEngine::new())),
            SlEngine::Grid => Engine::Grid(GridEngine::new(grid)?),
        };
        *slot = Box::into_raw(Box::new(SlOperator(e)));
        Ok(())
    })
}

/// Advances to level `n` and reports λ(Cₙ). Levels below the current one
/// are rejected.
///
/// # Safety
/// `op` must be a live handle and `value` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sl_operator_lambda(op: *mut SlOperator, n: u64, value: *mut f64) -> SlStatus {
    guarded(|| {
        let o = op.as_mut().ok_or_else(null)?;
        let v = out(value)?;
        let current = match &o.0 {
            Engine::Induced(e) => e.n(),
            Engine::Grid(e) => e.n(),
        };
        if n < current {
            return Err(Fail(
                SlStatus::InvalidArgument,
                format!("operator is at level {current}, cannot go back to {n}"),
            ));
        }
        *v = match &mut o.0 {
            Engine::Induced(e) => {
                e.advance_to(n);
                e.lambda()
            }
            Engine::Grid(e) => {
                while e.n() < n {
                    e.advance()?;
                }
                e.lambda()
            }
        };
        Ok(())
    })
}

/// Releases an operator. Null is ignored.
///
/// # Safety
/// `op` must come from [`sl_operator_new`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn sl_operator_free(op: *mut SlOperator) {
    if !op.is_null() {
        drop(Box::from_raw(op));
    }
}

/// Exact `λ{x : θₙ(x) > 0, a_{θₙ+1}(x) / Σ_{k≤θₙ} a_k(x) > ε}`.
///
/// # Safety
/// `value` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sl_theta_tail(n: u32, eps: f64, value: *mut f64) -> SlStatus {
    guarded(|| {
        let v = out(value)?;
        *v = sumlevel::diophantine::theta_tail_exact(n, eps)?.to_f64();
        Ok(())
    })
}

/// Parses a NUL-terminated code and reports its interval.
/// Accepts Farey (`L`/`R`) and Stern–Brocot (`A`/`B`) words.
///
/// # Safety
/// `code` must be a valid C string and `interval` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sl_code_interval(code: *const c_char, interval: *mut SlInterval) -> SlStatus {
    guarded(|| {
        if code.is_null() {
            return Err(null());
        }
        let s = CStr::from_ptr(code)
            .to_str()
            .map_err(|_| Fail(SlStatus::InvalidArgument, "code is not UTF-8".into()))?;
        let code: sumlevel::exact_kernel::BinaryCode = s.parse()?;
        let iv = sumlevel::exact_kernel::apply_code(&code)?;
        *out(interval)? = SlInterval {
            left_num: iv.left.num,
            left_den: iv.left.den,
            right_num: iv.right.num,
            right_den: iv.right.den,
        };
        Ok(())
    })
}
