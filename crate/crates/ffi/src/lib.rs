//! C ABI for `spectral-dial`.
//!
//! Every fallible function returns an [`SdialStatus`] and writes its result
//! through an out-pointer. On failure a message is available from
//! [`sdial_last_error`] until the next call on the same thread. Objects are
//! opaque handles released with their matching `_free` function; strings
//! returned through out-pointers are released with [`sdial_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use spectral_dial::cli::parse_coefficients;
use spectral_dial::exactalg::{default_drop_powers, format_rational, rational_to_f64};
use spectral_dial::{
    classical_cross_section, determinant, dial_partial, eigenfunction_value, evaluate_polynomial, evaluate_spectrum,
    ordering_report, parse_rational, verify_dialled, AlgebraError, EnergyMatrix, GridError, GridSpec, LevelIndex,
    PolynomialHamiltonian, Rational, SpectrumTarget, Stencil, VerificationReport,
};

/// Status codes; the numeric values match the command-line exit codes where
/// both exist.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SdialStatus {
    Ok = 0,
    Internal = 1,
    InvalidInput = 2,
    Singular = 3,
    NonConvergence = 5,
    NullPointer = 7,
    Panic = 8,
}

/// Polynomial Hamiltonian `Σ a_j ĥ^j` with exact rational coefficients.
pub struct SdialPolynomial(PolynomialHamiltonian);

/// Outcome of a grid verification run.
pub struct SdialReport(VerificationReport);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

struct Failure(SdialStatus, String);

impl From<AlgebraError> for Failure {
    fn from(e: AlgebraError) -> Self {
        let status = match e {
            AlgebraError::Singular { .. } | AlgebraError::SingularStripped { .. } => SdialStatus::Singular,
            AlgebraError::Consistency { .. } => SdialStatus::Internal,
            _ => SdialStatus::InvalidInput,
        };
        Failure(status, e.to_string())
    }
}

impl From<GridError> for Failure {
    fn from(e: GridError) -> Self {
        let status = match e {
            GridError::InvalidSpec(_) | GridError::TooManyEigenpairs { .. } => SdialStatus::InvalidInput,
            GridError::NonConvergence { .. } | GridError::Residual { .. } => SdialStatus::NonConvergence,
        };
        Failure(status, e.to_string())
    }
}

fn invalid(msg: impl Into<String>) -> Failure {
    Failure(SdialStatus::InvalidInput, msg.into())
}

fn null(what: &str) -> Failure {
    Failure(SdialStatus::NullPointer, format!("{what} is null"))
}

fn set_last_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn guard<F>(f: F) -> SdialStatus
where
    F: FnOnce() -> Result<(), Failure>,
{
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => SdialStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_last_error(&msg);
            status
        }
        Err(_) => {
            set_last_error("panic inside spectral-dial");
            SdialStatus::Panic
        }
    }
}

unsafe fn out_ref<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Failure> {
    p.as_mut().ok_or_else(|| null(what))
}

unsafe fn poly_ref<'a>(p: *const SdialPolynomial) -> Result<&'a PolynomialHamiltonian, Failure> {
    p.as_ref().map(|p| &p.0).ok_or_else(|| null("polynomial"))
}

unsafe fn c_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| invalid(format!("{what} is not UTF-8")))
}

unsafe fn slice<'a, T>(p: *const T, len: usize, what: &str) -> Result<&'a [T], Failure> {
    if len == 0 {
        Ok(&[])
    } else if p.is_null() {
        Err(null(what))
    } else {
        Ok(std::slice::from_raw_parts(p, len))
    }
}

fn new_string(s: String) -> Result<*mut c_char, Failure> {
    CString::new(s)
        .map(CString::into_raw)
        .map_err(|_| Failure(SdialStatus::Internal, "string contains NUL".into()))
}

fn boxed_poly(h: PolynomialHamiltonian) -> *mut SdialPolynomial {
    Box::into_raw(Box::new(SdialPolynomial(h)))
}

/// Message for the last failed call on this thread, or null. Owned by the
/// library; valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn sdial_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn sdial_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed already.
#[no_mangle]
pub unsafe extern "C" fn sdial_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses `"a1,a2,..."` or `"j:a_j,..."` (fractions or decimals).
///
/// # Safety
/// `text` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sdial_polynomial_parse(text: *const c_char, out: *mut *mut SdialPolynomial) -> SdialStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        let h = parse_coefficients(c_str(text, "text")?).map_err(|e| invalid(e.to_string()))?;
        *out = boxed_poly(h);
        Ok(())
    })
}

/// Builds a polynomial from `len` terms `numerators[i]/denominators[i] · ĥ^powers[i]`.
/// Powers must be strictly increasing and at least 1.
///
/// # Safety
/// The three arrays must hold `len` elements; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sdial_polynomial_from_terms(
    powers: *const u32,
    numerators: *const i64,
    denominators: *const i64,
    len: usize,
    out: *mut *mut SdialPolynomial,
) -> SdialStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        let powers = slice(powers, len, "powers")?;
        let nums = slice(numerators, len, "numerators")?;
        let dens = slice(denominators, len, "denominators")?;
        let mut terms = Vec::with_capacity(len);
        for i in 0..len {
            if dens[i] == 0 {
                return Err(invalid(format!("zero denominator in term {i}")));
            }
            terms.push((powers[i], Rational::new(nums[i].into(), dens[i].into())));
        }
        *out = boxed_poly(PolynomialHamiltonian::new(terms)?);
        Ok(())
    })
}

unsafe fn read_target(
    levels: *const u32,
    energies: *const *const c_char,
    len: usize,
) -> Result<SpectrumTarget, Failure> {
    let texts = slice(energies, len, "energies")?;
    let levels = if levels.is_null() {
        (0..len as u32).collect()
    } else {
        slice(levels, len, "levels")?.to_vec()
    };
    let mut pairs = Vec::with_capacity(len);
    for (i, (&n, &text)) in levels.iter().zip(texts).enumerate() {
        let e = parse_rational(c_str(text, "energy")?).map_err(|e| invalid(format!("energy {i}: {e}")))?;
        pairs.push((LevelIndex(n), e));
    }
    Ok(SpectrumTarget::new(pairs)?)
}

/// Dials target energies. `energies` holds `len` exact values as strings;
/// `levels` holds their level indices, or is null for levels `0..len`.
/// Non-contiguous levels drop the highest powers.
///
/// # Safety
/// Arrays must hold `len` elements; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sdial_dial(
    levels: *const u32,
    energies: *const *const c_char,
    len: usize,
    out: *mut *mut SdialPolynomial,
) -> SdialStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        let target = read_target(levels, energies, len)?;
        let drops = default_drop_powers(&target);
        *out = boxed_poly(dial_partial(&target, &drops)?);
        Ok(())
    })
}

/// As [`sdial_dial`] with an explicit list of dropped powers.
///
/// # Safety
/// Arrays must hold `len` and `drop_len` elements; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sdial_dial_partial(
    levels: *const u32,
    energies: *const *const c_char,
    len: usize,
    drop_powers: *const u32,
    drop_len: usize,
    out: *mut *mut SdialPolynomial,
) -> SdialStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        let target = read_target(levels, energies, len)?;
        let drops = slice(drop_powers, drop_len, "drop_powers")?;
        *out = boxed_poly(dial_partial(&target, drops)?);
        Ok(())
    })
}

/// # Safety
/// `p` must come from this library and not have been freed already.
#[no_mangle]
pub unsafe extern "C" fn sdial_polynomial_free(p: *mut SdialPolynomial) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// Number of stored (nonzero) terms.
///
/// # Safety
/// `p` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sdial_polynomial_term_count(p: *const SdialPolynomial, out: *mut usize) -> SdialStatus {
    guard(|| {
        *out_ref(out, "out")? = poly_ref(p)?.terms().len();
        Ok(())
    })
}

/// Term `index`: its power and its coefficient as an exact string (`"-13/2"`).
///
/// # Safety
/// `p` must be a live handle; out-pointers must be writable.
#[no_mangle]
pub unsafe extern "C" fn sdial_polynomial_term(
    p: *const SdialPolynomial,
    index: usize,
    power: *mut u32,
    coefficient: *mut *mut c_char,
) -> SdialStatus {
    guard(|| {
        let power = out_ref(power, "power")?;
        let coefficient = out_ref(coefficient, "coefficient")?;
        let (j, a) = poly_ref(p)?
            .terms()
            .get(index)
            .ok_or_else(|| invalid(format!("term index {index} out of range")))?;
        *power = *j;
        *coefficient = new_string(format_rational(a))?;
        Ok(())
    })
}

/// Exact `E_n = P(n + 1/2)` as a string, and its nearest double.
/// Either out-pointer may be null.
///
/// # Safety
/// `p` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn sdial_energy(
    p: *const SdialPolynomial,
    level: u32,
    exact: *mut *mut c_char,
    decimal: *mut f64,
) -> SdialStatus {
    guard(|| {
        let e = evaluate_polynomial(poly_ref(p)?, &LevelIndex(level).energy());
        if let Some(d) = decimal.as_mut() {
            *d = rational_to_f64(&e);
        }
        if let Some(s) = exact.as_mut() {
            *s = new_string(format_rational(&e))?;
        }
        Ok(())
    })
}

/// Levels `0..count` sorted by energy (ties by index), written to `out[0..count]`.
/// Returns the number of adjacent ordering violations in `violations` if non-null.
///
/// # Safety
/// `p` must be a live handle; `out` must hold `count` elements.
#[no_mangle]
pub unsafe extern "C" fn sdial_ascending_permutation(
    p: *const SdialPolynomial,
    count: usize,
    out: *mut u32,
    violations: *mut usize,
) -> SdialStatus {
    guard(|| {
        let h = poly_ref(p)?;
        if count > 0 && out.is_null() {
            return Err(null("out"));
        }
        let report = ordering_report(&evaluate_spectrum(h, count));
        for (i, n) in report.ascending_permutation.iter().enumerate() {
            *out.add(i) = n.0;
        }
        if let Some(v) = violations.as_mut() {
            *v = report.violations.len();
        }
        Ok(())
    })
}

/// Classical cross-section `H(x, 0) = P(x²/2)`.
///
/// # Safety
/// `p` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sdial_cross_section(p: *const SdialPolynomial, x: f64, out: *mut f64) -> SdialStatus {
    guard(|| {
        let h = poly_ref(p)?;
        *out_ref(out, "out")? = classical_cross_section(h, x);
        Ok(())
    })
}

/// Normalized oscillator eigenfunction `φ_n(x)`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sdial_eigenfunction(n: u32, x: f64, out: *mut f64) -> SdialStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        *out = eigenfunction_value(LevelIndex(n), x).map_err(|e| invalid(e.to_string()))?;
        Ok(())
    })
}

/// Exact determinant of the `size × size` energy matrix as a string.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sdial_determinant(size: u32, out: *mut *mut c_char) -> SdialStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        if size == 0 {
            return Err(invalid("size must be at least 1"));
        }
        *out = new_string(format_rational(&determinant(&EnergyMatrix::full(size as usize))))?;
        Ok(())
    })
}

/// Diagonalizes `P(ĥ_grid)` on `points` grid points over `[-half_width, half_width]`
/// and compares the lowest `levels` eigenpairs with the exact spectrum.
/// `stencil_order` is 2 or 4. A failed comparison is not an error: query
/// [`sdial_report_passed`].
///
/// # Safety
/// `p` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sdial_verify(
    p: *const SdialPolynomial,
    half_width: f64,
    points: usize,
    stencil_order: u32,
    levels: usize,
    out: *mut *mut SdialReport,
) -> SdialStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        let h = poly_ref(p)?;
        let stencil = match stencil_order {
            2 => Stencil::SecondOrder,
            4 => Stencil::FourthOrder,
            other => return Err(invalid(format!("stencil order {other} (expected 2 or 4)"))),
        };
        let spec = GridSpec::with_stencil(half_width, points, stencil)?;
        *out = Box::into_raw(Box::new(SdialReport(verify_dialled(h, &spec, levels)?)));
        Ok(())
    })
}

/// # Safety
/// `r` must come from this library and not have been freed already.
#[no_mangle]
pub unsafe extern "C" fn sdial_report_free(r: *mut SdialReport) {
    if !r.is_null() {
        drop(Box::from_raw(r));
    }
}

/// # Safety
/// `r` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sdial_report_passed(r: *const SdialReport, out: *mut bool) -> SdialStatus {
    guard(|| {
        let r = r.as_ref().ok_or_else(|| null("report"))?;
        *out_ref(out, "out")? = r.0.passed;
        Ok(())
    })
}

/// Number of compared levels.
///
/// # Safety
/// `r` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sdial_report_level_count(r: *const SdialReport, out: *mut usize) -> SdialStatus {
    guard(|| {
        let r = r.as_ref().ok_or_else(|| null("report"))?;
        *out_ref(out, "out")? = r.0.checks.len();
        Ok(())
    })
}

/// The `rank`-th lowest grid eigenpair: its energy, node count and the
/// exact level it was matched to. Any out-pointer may be null.
///
/// # Safety
/// `r` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn sdial_report_level(
    r: *const SdialReport,
    rank: usize,
    grid_energy: *mut f64,
    node_count: *mut usize,
    matched_level: *mut u32,
) -> SdialStatus {
    guard(|| {
        let r = r.as_ref().ok_or_else(|| null("report"))?;
        let c =
            r.0.checks
                .get(rank)
                .ok_or_else(|| invalid(format!("rank {rank} out of range")))?;
        if let Some(e) = grid_energy.as_mut() {
            *e = c.grid_energy;
        }
        if let Some(n) = node_count.as_mut() {
            *n = c.node_count;
        }
        if let Some(m) = matched_level.as_mut() {
            *m = c.matched_level.0;
        }
        Ok(())
    })
}
