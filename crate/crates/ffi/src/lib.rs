//! C ABI for the burbea-rao library.
//!
//! Conventions: opaque handles created and freed by paired functions, status
//! codes for every fallible call, results written through out-pointers.
//! Structured inputs and outputs (parameter sets, mixtures, centroids) travel
//! as JSON strings using the same schemas as the `brc` command-line tool.
//! The last error message is kept per thread and can be read with
//! [`br_last_error_message`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use burbea_rao::clustering::{hierarchical_simplify, MixtureModel};
use burbea_rao::expfam::{DynGenerator, ExpFamily};
use burbea_rao::generators::{NegRenyi, NegShannon, NegShannonExtended, Quadratic};
use burbea_rao::solver::{solve_centroid, SolverConfig, WeightedSet};
use burbea_rao::tailored::solve_tailored;
use burbea_rao::{
    bregman, burbea_rao, jeffreys_bregman, population_diversity, scaled_skew_burbea_rao,
    skew_burbea_rao, CompositeParam, Error, GaussianParam, SkewWeight, SymMat,
};

/// Status codes returned by every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BrStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    DomainError = 3,
    SingularSystem = 4,
    NotPositiveDefinite = 5,
    NonFinite = 6,
    /// The iteration budget ran out; any out-parameters still hold the last
    /// iterate.
    NotConverged = 7,
    InternalError = 8,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: &str) {
    let cstring = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(cstring));
}

fn status_of(err: &Error) -> BrStatus {
    match err {
        Error::Domain { .. } => BrStatus::DomainError,
        Error::SingularSystem(_) => BrStatus::SingularSystem,
        Error::NotPd(_) => BrStatus::NotPositiveDefinite,
        Error::NonFinite(_) => BrStatus::NonFinite,
        Error::Internal(_) => BrStatus::InternalError,
        _ => BrStatus::InvalidArgument,
    }
}

fn fail(err: &Error) -> BrStatus {
    set_error(&err.to_string());
    status_of(err)
}

/// Last error message for the calling thread, or NULL when the previous call
/// succeeded. The pointer stays valid until the next failing call on the
/// same thread.
#[no_mangle]
pub extern "C" fn br_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| {
        slot.borrow()
            .as_ref()
            .map_or(std::ptr::null(), |s| s.as_ptr())
    })
}

/// Opaque strictly convex generator handle.
pub struct BrGenerator {
    inner: DynGenerator,
}

/// Opaque exponential-family handle.
pub struct BrFamily {
    inner: ExpFamily,
}

/// Opaque parameter point (vector plus optional symmetric matrix block).
pub struct BrParam {
    inner: CompositeParam,
}

unsafe fn str_arg<'a>(ptr: *const c_char) -> Result<&'a str, BrStatus> {
    if ptr.is_null() {
        set_error("null string argument");
        return Err(BrStatus::NullPointer);
    }
    CStr::from_ptr(ptr).to_str().map_err(|_| {
        set_error("string argument is not valid UTF-8");
        BrStatus::InvalidArgument
    })
}

fn guard<F: FnOnce() -> BrStatus>(f: F) -> BrStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(status) => status,
        Err(_) => {
            set_error("internal panic");
            BrStatus::InternalError
        }
    }
}

// --- generator constructors ---------------------------------------------

/// Dimensions a C caller can reasonably ask for; anything larger is a bug on
/// the caller's side and would only exercise allocation failure paths.
const MAX_DIM: usize = 1 << 20;

fn check_dim(dim: usize) -> bool {
    if dim > MAX_DIM {
        set_error("dimension too large");
        return false;
    }
    true
}


/// Quadratic generator F(x) = x'x over vectors of the given dimension.
#[no_mangle]
pub extern "C" fn br_generator_quadratic_identity(dim: usize) -> *mut BrGenerator {
    if !check_dim(dim) {
        return std::ptr::null_mut();
    }
    Box::into_raw(Box::new(BrGenerator {
        inner: Box::new(Quadratic::identity(dim)),
    }))
}

/// Negative Shannon entropy F(x) = sum x_i log x_i on the non-negative
/// orthant.
#[no_mangle]
pub extern "C" fn br_generator_neg_shannon(dim: usize) -> *mut BrGenerator {
    if !check_dim(dim) {
        return std::ptr::null_mut();
    }
    Box::into_raw(Box::new(BrGenerator {
        inner: Box::new(NegShannon::new(dim)),
    }))
}

/// Extended negative entropy F(x) = sum (x_i log x_i - x_i).
#[no_mangle]
pub extern "C" fn br_generator_neg_shannon_extended(dim: usize) -> *mut BrGenerator {
    if !check_dim(dim) {
        return std::ptr::null_mut();
    }
    Box::into_raw(Box::new(BrGenerator {
        inner: Box::new(NegShannonExtended::new(dim)),
    }))
}

/// Negative Renyi entropy of the given order in (0,1); NULL on a bad order.
#[no_mangle]
pub extern "C" fn br_generator_neg_renyi(dim: usize, order: f64) -> *mut BrGenerator {
    if !check_dim(dim) {
        return std::ptr::null_mut();
    }
    match NegRenyi::new(dim, order) {
        Ok(g) => Box::into_raw(Box::new(BrGenerator { inner: Box::new(g) })),
        Err(e) => {
            set_error(&e.to_string());
            std::ptr::null_mut()
        }
    }
}

/// # Safety
/// `gen` must be a pointer returned by a `br_generator_*` constructor, not
/// yet freed.
#[no_mangle]
pub unsafe extern "C" fn br_generator_free(generator: *mut BrGenerator) {
    if !generator.is_null() {
        drop(Box::from_raw(generator));
    }
}

// --- family constructors --------------------------------------------------

#[no_mangle]
pub extern "C" fn br_family_poisson() -> *mut BrFamily {
    Box::into_raw(Box::new(BrFamily {
        inner: ExpFamily::poisson(),
    }))
}

#[no_mangle]
pub extern "C" fn br_family_gaussian() -> *mut BrFamily {
    Box::into_raw(Box::new(BrFamily {
        inner: ExpFamily::gaussian(),
    }))
}

/// Single-trial multinomial with the given number of categories (>= 2);
/// NULL on a bad count.
#[no_mangle]
pub extern "C" fn br_family_multinomial(categories: usize) -> *mut BrFamily {
    if !check_dim(categories) {
        return std::ptr::null_mut();
    }
    match ExpFamily::multinomial(categories) {
        Ok(f) => Box::into_raw(Box::new(BrFamily { inner: f })),
        Err(e) => {
            set_error(&e.to_string());
            std::ptr::null_mut()
        }
    }
}

/// Multivariate Gaussian family of the given dimension (>= 1); NULL on 0.
#[no_mangle]
pub extern "C" fn br_family_mv_gaussian(dim: usize) -> *mut BrFamily {
    if !check_dim(dim) {
        return std::ptr::null_mut();
    }
    match ExpFamily::mv_gaussian(dim) {
        Ok(f) => Box::into_raw(Box::new(BrFamily { inner: f })),
        Err(e) => {
            set_error(&e.to_string());
            std::ptr::null_mut()
        }
    }
}

/// The family's log-normalizer as a generator over natural parameters.
///
/// # Safety
/// `family` must be a live pointer from a `br_family_*` constructor.
#[no_mangle]
pub unsafe extern "C" fn br_family_log_normalizer(family: *const BrFamily) -> *mut BrGenerator {
    if family.is_null() {
        set_error("null family handle");
        return std::ptr::null_mut();
    }
    Box::into_raw(Box::new(BrGenerator {
        inner: (*family).inner.log_normalizer(),
    }))
}

/// # Safety
/// `family` must be a pointer returned by a `br_family_*` constructor, not
/// yet freed.
#[no_mangle]
pub unsafe extern "C" fn br_family_free(family: *mut BrFamily) {
    if !family.is_null() {
        drop(Box::from_raw(family));
    }
}

// --- parameter points -------------------------------------------------------

/// Build a parameter point from a vector and an optional symmetric matrix
/// block (`mat` row-major `mat_dim` x `mat_dim`, or NULL for none). Returns
/// NULL when the matrix is not symmetric or an argument is malformed.
///
/// # Safety
/// `vec` must point to `vec_len` doubles; `mat`, when non-NULL, to
/// `mat_dim * mat_dim` doubles.
#[no_mangle]
pub unsafe extern "C" fn br_param_new(
    vec: *const f64,
    vec_len: usize,
    mat: *const f64,
    mat_dim: usize,
) -> *mut BrParam {
    if vec.is_null() && vec_len > 0 {
        set_error("null vector with non-zero length");
        return std::ptr::null_mut();
    }
    let vec_part = if vec_len == 0 {
        Vec::new()
    } else {
        std::slice::from_raw_parts(vec, vec_len).to_vec()
    };
    let inner = if mat.is_null() {
        CompositeParam::vector(vec_part)
    } else {
        if !check_dim(mat_dim) {
            return std::ptr::null_mut();
        }
        let raw = std::slice::from_raw_parts(mat, mat_dim * mat_dim);
        let rows: Vec<Vec<f64>> = raw.chunks(mat_dim).map(<[f64]>::to_vec).collect();
        match SymMat::from_full(&rows) {
            Ok(m) => CompositeParam::with_matrix(vec_part, m),
            Err(e) => {
                set_error(&e.to_string());
                return std::ptr::null_mut();
            }
        }
    };
    Box::into_raw(Box::new(BrParam { inner }))
}

/// # Safety
/// `param` must be a pointer returned by [`br_param_new`], not yet freed.
#[no_mangle]
pub unsafe extern "C" fn br_param_free(param: *mut BrParam) {
    if !param.is_null() {
        drop(Box::from_raw(param));
    }
}

// --- divergences on raw parameters ---------------------------------------

unsafe fn div2(
    generator: *const BrGenerator,
    p: *const BrParam,
    q: *const BrParam,
    out: *mut f64,
    f: impl FnOnce(&DynGenerator, &CompositeParam, &CompositeParam) -> Result<f64, Error>,
) -> BrStatus {
    if generator.is_null() || p.is_null() || q.is_null() || out.is_null() {
        set_error("null argument");
        return BrStatus::NullPointer;
    }
    match f(&(*generator).inner, &(*p).inner, &(*q).inner) {
        Ok(v) => {
            *out = v;
            BrStatus::Ok
        }
        Err(e) => fail(&e),
    }
}

/// Jensen gap (F(p)+F(q))/2 - F((p+q)/2).
///
/// # Safety
/// All handles must be live pointers from this library; `out` must be
/// writable.
#[no_mangle]
pub unsafe extern "C" fn br_burbea_rao(
    generator: *const BrGenerator,
    p: *const BrParam,
    q: *const BrParam,
    out: *mut f64,
) -> BrStatus {
    guard(|| div2(generator, p, q, out, |g, p, q| burbea_rao(g.as_ref(), p, q)))
}

/// Skew Jensen gap with alpha in (0,1).
///
/// # Safety
/// As for [`br_burbea_rao`].
#[no_mangle]
pub unsafe extern "C" fn br_skew_burbea_rao(
    generator: *const BrGenerator,
    p: *const BrParam,
    q: *const BrParam,
    alpha: f64,
    out: *mut f64,
) -> BrStatus {
    guard(|| {
        div2(generator, p, q, out, |g, p, q| {
            let a = SkewWeight::new(alpha)?;
            skew_burbea_rao(g.as_ref(), p, q, a)
        })
    })
}

/// Skew Jensen gap divided by alpha(1-alpha); alpha may be any real outside
/// {0,1} whose combination stays inside the domain.
///
/// # Safety
/// As for [`br_burbea_rao`].
#[no_mangle]
pub unsafe extern "C" fn br_scaled_skew_burbea_rao(
    generator: *const BrGenerator,
    p: *const BrParam,
    q: *const BrParam,
    alpha: f64,
    out: *mut f64,
) -> BrStatus {
    guard(|| {
        div2(generator, p, q, out, |g, p, q| {
            scaled_skew_burbea_rao(g.as_ref(), p, q, alpha)
        })
    })
}

/// Bregman divergence F(p) - F(q) - <p-q, grad F(q)>.
///
/// # Safety
/// As for [`br_burbea_rao`].
#[no_mangle]
pub unsafe extern "C" fn br_bregman(
    generator: *const BrGenerator,
    p: *const BrParam,
    q: *const BrParam,
    out: *mut f64,
) -> BrStatus {
    guard(|| div2(generator, p, q, out, |g, p, q| bregman(g.as_ref(), p, q)))
}

/// Symmetrized Bregman divergence (B(p,q)+B(q,p))/2.
///
/// # Safety
/// As for [`br_burbea_rao`].
#[no_mangle]
pub unsafe extern "C" fn br_jeffreys_bregman(
    generator: *const BrGenerator,
    p: *const BrParam,
    q: *const BrParam,
    out: *mut f64,
) -> BrStatus {
    guard(|| div2(generator, p, q, out, |g, p, q| jeffreys_bregman(g.as_ref(), p, q)))
}

/// Population diversity sum w_i F(p_i) - F(sum w_i p_i) over `n` points.
///
/// # Safety
/// `points` must hold `n` live parameter handles and `weights` `n` doubles.
#[no_mangle]
pub unsafe extern "C" fn br_population_diversity(
    generator: *const BrGenerator,
    points: *const *const BrParam,
    weights: *const f64,
    n: usize,
    out: *mut f64,
) -> BrStatus {
    guard(|| {
        if generator.is_null() || points.is_null() || weights.is_null() || out.is_null() {
            set_error("null argument");
            return BrStatus::NullPointer;
        }
        let handles = std::slice::from_raw_parts(points, n);
        if handles.iter().any(|h| h.is_null()) {
            set_error("null parameter handle in points");
            return BrStatus::NullPointer;
        }
        let pts: Vec<CompositeParam> = handles.iter().map(|&h| (*h).inner.clone()).collect();
        let ws = std::slice::from_raw_parts(weights, n);
        match population_diversity((*generator).inner.as_ref(), &pts, ws) {
            Ok(v) => {
                *out = v;
                BrStatus::Ok
            }
            Err(e) => fail(&e),
        }
    })
}

// --- family distances over JSON source parameters --------------------------

/// Evaluate bhattacharyya, hellinger, kl, and the Chernoff coefficient at
/// `alpha` between two JSON source parameters; writes 4 doubles in that
/// order.
///
/// # Safety
/// `family` must be live; `p_json`/`q_json` NUL-terminated strings; `out`
/// must have room for 4 doubles.
#[no_mangle]
pub unsafe extern "C" fn br_family_divergences(
    family: *const BrFamily,
    p_json: *const c_char,
    q_json: *const c_char,
    alpha: f64,
    out: *mut f64,
) -> BrStatus {
    guard(|| {
        if family.is_null() || out.is_null() {
            set_error("null argument");
            return BrStatus::NullPointer;
        }
        let (p_str, q_str) = match (str_arg(p_json), str_arg(q_json)) {
            (Ok(p), Ok(q)) => (p, q),
            (Err(s), _) | (_, Err(s)) => return s,
        };
        let fam = &(*family).inner;
        let run = || -> Result<[f64; 4], Error> {
            let p = fam.source_from_json(p_str)?;
            let q = fam.source_from_json(q_str)?;
            let a = SkewWeight::new(alpha)?;
            Ok([
                fam.bhattacharyya(&p, &q)?,
                fam.hellinger(&p, &q)?,
                fam.kl_divergence(&p, &q)?,
                fam.chernoff_coefficient(&p, &q, a)?,
            ])
        };
        match run() {
            Ok(values) => {
                std::slice::from_raw_parts_mut(out, 4).copy_from_slice(&values);
                BrStatus::Ok
            }
            Err(e) => fail(&e),
        }
    })
}

// --- centroids and mixtures over JSON ------------------------------------

fn parse_weighted_gaussians(text: &str) -> Result<(Vec<GaussianParam>, Vec<f64>), Error> {
    #[derive(serde::Deserialize)]
    struct In {
        points: Vec<Entry>,
    }
    #[derive(serde::Deserialize)]
    struct Entry {
        weight: f64,
        param: GaussianParam,
    }
    let parsed: In = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    if parsed.points.is_empty() {
        return Err(Error::Parse("input has no points".into()));
    }
    let total: f64 = parsed.points.iter().map(|p| p.weight).sum();
    if !(total.is_finite() && total > 0.0) {
        return Err(Error::Weight("total weight must be positive".into()));
    }
    let weights = parsed.points.iter().map(|p| p.weight / total).collect();
    let comps = parsed.points.into_iter().map(|p| p.param).collect();
    Ok((comps, weights))
}

fn write_out_string(out_json: *mut *mut c_char, text: String) -> BrStatus {
    let cstring = match CString::new(text) {
        Ok(s) => s,
        Err(_) => {
            set_error("output contained an interior NUL byte");
            return BrStatus::InternalError;
        }
    };
    unsafe { *out_json = cstring.into_raw() };
    BrStatus::Ok
}

/// Solve the centroid of a weighted parameter set
/// (`{"points":[{"weight":w,"param":{...}}]}`) with the generic fixed-point
/// solver at uniform skew `alpha`. On success `*out_json` holds
/// `{"centroid": ..., "iterations": n, "converged": bool}` (free with
/// [`br_string_free`]). Returns `NotConverged` with the result still written
/// when the iteration budget ran out.
///
/// # Safety
/// `family` must be live, `points_json` NUL-terminated, `out_json` writable.
#[no_mangle]
pub unsafe extern "C" fn br_centroid_generic(
    family: *const BrFamily,
    points_json: *const c_char,
    alpha: f64,
    tolerance: f64,
    max_iterations: usize,
    out_json: *mut *mut c_char,
) -> BrStatus {
    guard(|| {
        if family.is_null() || out_json.is_null() {
            set_error("null argument");
            return BrStatus::NullPointer;
        }
        let text = match str_arg(points_json) {
            Ok(t) => t,
            Err(s) => return s,
        };
        let fam = &(*family).inner;
        let run = || -> Result<(serde_json::Value, bool), Error> {
            #[derive(serde::Deserialize)]
            struct In {
                points: Vec<Entry>,
            }
            #[derive(serde::Deserialize)]
            struct Entry {
                weight: f64,
                param: serde_json::Value,
            }
            let parsed: In = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
            if parsed.points.is_empty() {
                return Err(Error::Parse("input has no points".into()));
            }
            let total: f64 = parsed.points.iter().map(|p| p.weight).sum();
            if !(total.is_finite() && total > 0.0) {
                return Err(Error::Weight("total weight must be positive".into()));
            }
            let mut naturals = Vec::with_capacity(parsed.points.len());
            let mut weights = Vec::with_capacity(parsed.points.len());
            for entry in &parsed.points {
                let source = fam.source_from_json(&entry.param.to_string())?;
                naturals.push(fam.to_natural(&source)?);
                weights.push(entry.weight / total);
            }
            let skew = SkewWeight::new(alpha)?;
            let set = WeightedSet::new(naturals, weights)?.with_uniform_skew(skew);
            let cfg = SolverConfig {
                tolerance,
                max_iterations,
                ..SolverConfig::default()
            };
            let logn = fam.log_normalizer();
            let (centroid, report) = solve_centroid(logn.as_ref(), &set, &cfg)?;
            let source = fam.to_source(&centroid)?;
            Ok((
                serde_json::json!({
                    "centroid": fam.source_to_json(&source)?,
                    "iterations": report.iterations,
                    "converged": report.converged,
                }),
                report.converged,
            ))
        };
        match run() {
            Ok((value, converged)) => {
                let status = write_out_string(out_json, value.to_string());
                if status == BrStatus::Ok && !converged {
                    set_error("iteration budget exhausted before the tolerance was met");
                    BrStatus::NotConverged
                } else {
                    status
                }
            }
            Err(e) => fail(&e),
        }
    })
}

/// Solve the Bhattacharyya centroid of weighted multivariate Gaussians
/// (`{"points":[{"weight":w,"param":{"mean":[..],"cov":[[..]]}}]}`) with the
/// direct matrix-update scheme. Output as for [`br_centroid_generic`], plus
/// a `"failure"` field when a covariance iterate left the PD cone.
///
/// # Safety
/// `points_json` NUL-terminated, `out_json` writable.
#[no_mangle]
pub unsafe extern "C" fn br_centroid_tailored(
    points_json: *const c_char,
    tolerance: f64,
    max_iterations: usize,
    out_json: *mut *mut c_char,
) -> BrStatus {
    guard(|| {
        if out_json.is_null() {
            set_error("null argument");
            return BrStatus::NullPointer;
        }
        let text = match str_arg(points_json) {
            Ok(t) => t,
            Err(s) => return s,
        };
        let run = || -> Result<(serde_json::Value, bool), Error> {
            let (comps, weights) = parse_weighted_gaussians(text)?;
            let cfg = SolverConfig {
                tolerance,
                max_iterations,
                ..SolverConfig::default()
            };
            let (center, report) = solve_tailored(&comps, &weights, &cfg)?;
            Ok((
                serde_json::json!({
                    "centroid": serde_json::to_value(&center)
                        .map_err(|e| Error::Parse(e.to_string()))?,
                    "iterations": report.iterations,
                    "converged": report.converged,
                    "failure": report.failure,
                }),
                report.converged,
            ))
        };
        match run() {
            Ok((value, converged)) => {
                let status = write_out_string(out_json, value.to_string());
                if status == BrStatus::Ok && !converged {
                    set_error("solver stopped before the tolerance was met");
                    BrStatus::NotConverged
                } else {
                    status
                }
            }
            Err(e) => fail(&e),
        }
    })
}

/// Reduce a mixture (JSON schema as emitted by `brc simplify`) to `k_target`
/// components by greedy Bhattacharyya merging. `*out_json` holds the
/// simplified mixture JSON on success.
///
/// # Safety
/// `mixture_json` NUL-terminated, `out_json` writable.
#[no_mangle]
pub unsafe extern "C" fn br_simplify_mixture(
    mixture_json: *const c_char,
    k_target: usize,
    tolerance: f64,
    max_iterations: usize,
    out_json: *mut *mut c_char,
) -> BrStatus {
    guard(|| {
        if out_json.is_null() {
            set_error("null argument");
            return BrStatus::NullPointer;
        }
        let text = match str_arg(mixture_json) {
            Ok(t) => t,
            Err(s) => return s,
        };
        let run = || -> Result<String, Error> {
            let mixture: MixtureModel =
                serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
            let cfg = SolverConfig {
                tolerance,
                max_iterations,
                ..SolverConfig::default()
            };
            let simplified = hierarchical_simplify(&mixture, k_target, &cfg)?;
            serde_json::to_string(&simplified).map_err(|e| Error::Parse(e.to_string()))
        };
        match run() {
            Ok(text) => write_out_string(out_json, text),
            Err(e) => fail(&e),
        }
    })
}

/// Natural parameters of a JSON source parameter, flattened as the vector
/// block followed by the row-major matrix block. `out_len` receives the
/// number of doubles written; `out` must have room for
/// `vec_dim + mat_dim * mat_dim` doubles (poisson 1, gaussian 2,
/// multinomial d-1, mvgaussian d + d*d).
///
/// # Safety
/// `family` live, `param_json` NUL-terminated, `out`/`out_len` writable.
#[no_mangle]
pub unsafe extern "C" fn br_to_natural(
    family: *const BrFamily,
    param_json: *const c_char,
    out: *mut f64,
    out_len: *mut usize,
) -> BrStatus {
    guard(|| {
        if family.is_null() || out.is_null() || out_len.is_null() {
            set_error("null argument");
            return BrStatus::NullPointer;
        }
        let text = match str_arg(param_json) {
            Ok(t) => t,
            Err(s) => return s,
        };
        let fam = &(*family).inner;
        let run = || -> Result<Vec<f64>, Error> {
            let source = fam.source_from_json(text)?;
            let natural = fam.to_natural(&source)?;
            let mut flat = natural.vec_part.clone();
            if let Some(m) = &natural.mat_part {
                for row in m.to_full() {
                    flat.extend(row);
                }
            }
            Ok(flat)
        };
        match run() {
            Ok(flat) => {
                std::slice::from_raw_parts_mut(out, flat.len()).copy_from_slice(&flat);
                *out_len = flat.len();
                BrStatus::Ok
            }
            Err(e) => fail(&e),
        }
    })
}

/// Free a string returned through an `out_json` parameter.
///
/// # Safety
/// `s` must be a pointer produced by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn br_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
