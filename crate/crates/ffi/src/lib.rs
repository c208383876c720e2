//! C ABI over `ftpg`.
//!
//! Objects are opaque heap handles created by `ftpg_*_new`-style functions
//! and released with the matching `ftpg_*_free`. Every fallible function
//! returns an [`FtpgStatus`]; on failure a message is available from
//! [`ftpg_last_error`] on the same thread. Strings returned to the caller
//! must be released with [`ftpg_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use ftpg::ample::{AmpleFamily, AmpleSubset};
use ftpg::extend::{brute_force_extensions, extend, restrict_semilinear, ExtendError, ExtendOptions};
use ftpg::gf::Gf;
use ftpg::linalg::Matrix;
use ftpg::primesets::{construct_small_order, gl_order, natural_density_estimate, PrimeSet};
use ftpg::projgeom::ProjSpace;
use ftpg::semilinear::{decode_ftpg, equal_up_to_scalar, Collineation, FieldIso, SemilinearIso};
use num_rational::Ratio;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Result of every fallible call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FtpgStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    NotAdmissible = 3,
    NotAmple = 4,
    InvalidPartial = 5,
    ExtensionFailed = 6,
    DecodeFailed = 7,
    Budget = 8,
    PrimeSet = 9,
    Panic = 10,
}

/// GF(p^n).
pub struct FtpgField(Gf);

/// The projective space of a vector space over a field.
pub struct FtpgSpace(ProjSpace);

/// A semilinear isomorphism between two projective spaces.
pub struct FtpgSemilinear(SemilinearIso);

/// A collineation known only on a subset and the lines meeting it.
pub struct FtpgPartial(ftpg::extend::PartialCollineation);

/// A completed extension: the full collineation and its decoded map.
pub struct FtpgExtension {
    collineation: Collineation,
    decoded: SemilinearIso,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl ToString) {
    let c = CString::new(msg.to_string().replace('\0', " ")).expect("no interior nul");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn fail(status: FtpgStatus, msg: impl ToString) -> FtpgStatus {
    set_error(msg);
    status
}

fn guard(f: impl FnOnce() -> FtpgStatus) -> FtpgStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(_) => fail(FtpgStatus::Panic, "internal panic"),
    }
}

fn extend_status(e: &ExtendError) -> FtpgStatus {
    match e {
        ExtendError::NotAdmissible(_) => FtpgStatus::NotAdmissible,
        ExtendError::NotAmple { .. } => FtpgStatus::NotAmple,
        ExtendError::InvalidPartial(_) => FtpgStatus::InvalidPartial,
        ExtendError::Budget { .. } => FtpgStatus::Budget,
        ExtendError::Decode(_) => FtpgStatus::DecodeFailed,
        ExtendError::DimensionTooSmall(_)
        | ExtendError::DimensionMismatch { .. }
        | ExtendError::FieldMismatch(..)
        | ExtendError::Shape(_) => FtpgStatus::InvalidArgument,
        _ => FtpgStatus::ExtensionFailed,
    }
}

macro_rules! deref {
    ($p:expr) => {
        match unsafe { $p.as_ref() } {
            Some(v) => v,
            None => return fail(FtpgStatus::NullPointer, concat!("null pointer: ", stringify!($p))),
        }
    };
}

macro_rules! out {
    ($p:expr) => {
        match unsafe { $p.as_mut() } {
            Some(v) => v,
            None => return fail(FtpgStatus::NullPointer, concat!("null output pointer: ", stringify!($p))),
        }
    };
}

fn boxed<T>(v: T) -> *mut T {
    Box::into_raw(Box::new(v))
}

/// # Safety
/// `p` must be null or come from `Box::into_raw` and not be used afterwards.
unsafe fn release<T>(p: *mut T) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// Message of the last failed call on this thread, or null. Valid until the
/// next failing call on the same thread; do not free.
#[no_mangle]
pub extern "C" fn ftpg_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Releases a string returned by this library.
///
/// # Safety
/// `s` must be null or a string returned by this library, freed once.
#[no_mangle]
pub unsafe extern "C" fn ftpg_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Library version as a static string; do not free.
#[no_mangle]
pub extern "C" fn ftpg_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Creates GF(p^n) with the least monic irreducible modulus.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ftpg_field_new(p: u32, n: u32, out: *mut *mut FtpgField) -> FtpgStatus {
    guard(|| {
        let out = out!(out);
        match Gf::new(p, n) {
            Ok(f) => {
                *out = boxed(FtpgField(f));
                FtpgStatus::Ok
            }
            Err(e) => fail(FtpgStatus::InvalidArgument, e),
        }
    })
}

/// Number of elements, or 0 for a null handle.
///
/// # Safety
/// `f` must be null or a live field handle.
#[no_mangle]
pub unsafe extern "C" fn ftpg_field_order(f: *const FtpgField) -> u32 {
    f.as_ref().map_or(0, |f| f.0.q())
}

/// # Safety
/// `f` must be null or a field handle, freed once.
#[no_mangle]
pub unsafe extern "C" fn ftpg_field_free(f: *mut FtpgField) {
    release(f)
}

/// Creates P(F^dim).
///
/// # Safety
/// `field` must be a live field handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ftpg_space_new(field: *const FtpgField, dim: usize, out: *mut *mut FtpgSpace) -> FtpgStatus {
    guard(|| {
        let f = deref!(field);
        let out = out!(out);
        match ProjSpace::new(&f.0, dim) {
            Ok(s) => {
                *out = boxed(FtpgSpace(s));
                FtpgStatus::Ok
            }
            Err(e) => fail(FtpgStatus::InvalidArgument, e),
        }
    })
}

/// # Safety
/// `s` must be null or a live space handle.
#[no_mangle]
pub unsafe extern "C" fn ftpg_space_point_count(s: *const FtpgSpace) -> usize {
    s.as_ref().map_or(0, |s| s.0.point_count())
}

/// # Safety
/// `s` must be null or a live space handle.
#[no_mangle]
pub unsafe extern "C" fn ftpg_space_line_count(s: *const FtpgSpace) -> usize {
    s.as_ref().map_or(0, |s| s.0.line_count())
}

/// # Safety
/// `s` must be null or a space handle, freed once.
#[no_mangle]
pub unsafe extern "C" fn ftpg_space_free(s: *mut FtpgSpace) {
    release(s)
}

/// A random semilinear automorphism of `space`. A negative `frob_exp`
/// picks the Frobenius twist at random.
///
/// # Safety
/// `space` must be a live space handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ftpg_semilinear_random(
    space: *const FtpgSpace,
    seed: u64,
    frob_exp: i32,
    out: *mut *mut FtpgSemilinear,
) -> FtpgStatus {
    guard(|| {
        let s = deref!(space);
        let out = out!(out);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let e = u32::try_from(frob_exp).ok();
        match SemilinearIso::random(&s.0, &s.0, e, &mut rng) {
            Ok(l) => {
                *out = boxed(FtpgSemilinear(l));
                FtpgStatus::Ok
            }
            Err(e) => fail(FtpgStatus::InvalidArgument, e),
        }
    })
}

/// `x -> M · frob^e(x)` with `M` given row-major as `dim * dim` encoded
/// field elements.
///
/// # Safety
/// `space` must be a live space handle, `entries` must point to `len`
/// values and `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ftpg_semilinear_new(
    space: *const FtpgSpace,
    frob_exp: u32,
    entries: *const u32,
    len: usize,
    out: *mut *mut FtpgSemilinear,
) -> FtpgStatus {
    guard(|| {
        let s = deref!(space);
        let out = out!(out);
        if entries.is_null() {
            return fail(FtpgStatus::NullPointer, "null pointer: entries");
        }
        let f = s.0.field();
        let d = s.0.dim();
        if len != d * d {
            return fail(FtpgStatus::InvalidArgument, format!("expected {} entries, got {len}", d * d));
        }
        let raw = std::slice::from_raw_parts(entries, len);
        let data: Result<Vec<_>, _> = raw.iter().map(|&v| f.element(v)).collect();
        let data = match data {
            Ok(d) => d,
            Err(e) => return fail(FtpgStatus::InvalidArgument, e),
        };
        let m = Matrix::from_row_major(d, d, data).expect("length checked");
        let res = FieldIso::new(f, f, frob_exp).and_then(|mu| SemilinearIso::new(&s.0, &s.0, mu, m));
        match res {
            Ok(l) => {
                *out = boxed(FtpgSemilinear(l));
                FtpgStatus::Ok
            }
            Err(e) => fail(FtpgStatus::InvalidArgument, e),
        }
    })
}

/// # Safety
/// `l` must be null or a live semilinear handle.
#[no_mangle]
pub unsafe extern "C" fn ftpg_semilinear_frob_exp(l: *const FtpgSemilinear) -> u32 {
    l.as_ref().map_or(0, |l| l.0.frob_exp())
}

/// Writes the point image of `p` under the induced collineation.
///
/// # Safety
/// `l` must be a live semilinear handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ftpg_semilinear_point_image(l: *const FtpgSemilinear, p: u32, out: *mut u32) -> FtpgStatus {
    guard(|| {
        let l = deref!(l);
        let out = out!(out);
        let s = l.0.source();
        if p as usize >= s.point_count() {
            return fail(FtpgStatus::InvalidArgument, format!("point {p} out of range"));
        }
        let img = l.0.apply(&s.coords_of(p)).expect("dimension matches");
        *out = l.0.target().index_of_vector(&img).expect("invertible maps send points to points");
        FtpgStatus::Ok
    })
}

/// Sets `*equal` and, when equal, `*scalar` to the `a` with `b = a(a·−)`.
///
/// # Safety
/// `a`, `b` must be live semilinear handles; `equal`, `scalar` valid pointers.
#[no_mangle]
pub unsafe extern "C" fn ftpg_semilinear_equal_up_to_scalar(
    a: *const FtpgSemilinear,
    b: *const FtpgSemilinear,
    equal: *mut bool,
    scalar: *mut u32,
) -> FtpgStatus {
    guard(|| {
        let (a, b) = (deref!(a), deref!(b));
        let (equal, scalar) = (out!(equal), out!(scalar));
        match equal_up_to_scalar(&a.0, &b.0) {
            Some(c) => {
                *equal = true;
                *scalar = c.value();
            }
            None => *equal = false,
        }
        FtpgStatus::Ok
    })
}

/// # Safety
/// `l` must be null or a semilinear handle, freed once.
#[no_mangle]
pub unsafe extern "C" fn ftpg_semilinear_free(l: *mut FtpgSemilinear) {
    release(l)
}

/// Decodes a collineation given by its point map `sigma[0..len]`.
///
/// # Safety
/// `space` must be a live space handle, `sigma` must point to `len` values
/// and `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ftpg_decode(
    space: *const FtpgSpace,
    sigma: *const u32,
    len: usize,
    out: *mut *mut FtpgSemilinear,
) -> FtpgStatus {
    guard(|| {
        let s = deref!(space);
        let out = out!(out);
        if sigma.is_null() {
            return fail(FtpgStatus::NullPointer, "null pointer: sigma");
        }
        let map = std::slice::from_raw_parts(sigma, len).to_vec();
        let c = match Collineation::from_points(&s.0, &s.0, map) {
            Ok(c) => c,
            Err(e) => return fail(FtpgStatus::InvalidArgument, e),
        };
        match decode_ftpg(&c) {
            Ok(l) => {
                *out = boxed(FtpgSemilinear(l));
                FtpgStatus::Ok
            }
            Err(e) => fail(FtpgStatus::DecodeFailed, e),
        }
    })
}

/// Restricts `lambda` to the points `points[0..len]` and the lines meeting
/// them.
///
/// # Safety
/// `lambda` must be a live handle, `points` must point to `len` values and
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ftpg_partial_restrict(
    lambda: *const FtpgSemilinear,
    points: *const u32,
    len: usize,
    out: *mut *mut FtpgPartial,
) -> FtpgStatus {
    guard(|| {
        let l = deref!(lambda);
        let out = out!(out);
        if points.is_null() && len > 0 {
            return fail(FtpgStatus::NullPointer, "null pointer: points");
        }
        let pts = if len == 0 { &[][..] } else { std::slice::from_raw_parts(points, len) };
        let u = match AmpleSubset::new(l.0.source(), pts) {
            Ok(u) => u,
            Err(e) => return fail(FtpgStatus::InvalidArgument, e),
        };
        match restrict_semilinear(&l.0, &u) {
            Ok(pc) => {
                *out = boxed(FtpgPartial(pc));
                FtpgStatus::Ok
            }
            Err(e) => fail(extend_status(&e), e),
        }
    })
}

/// # Safety
/// `p` must be null or a partial handle, freed once.
#[no_mangle]
pub unsafe extern "C" fn ftpg_partial_free(p: *mut FtpgPartial) {
    release(p)
}

/// Extends `partial` to a full collineation, using `size_at_most(t)` on both
/// sides as the family of small subsets.
///
/// # Safety
/// `partial` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ftpg_extend(partial: *const FtpgPartial, t: usize, out: *mut *mut FtpgExtension) -> FtpgStatus {
    guard(|| {
        let pc = deref!(partial);
        let out = out!(out);
        let f1 = AmpleFamily::size_at_most(pc.0.source().field(), t);
        let f2 = AmpleFamily::size_at_most(pc.0.target().field(), t);
        match extend(&pc.0, &f1, &f2, &ExtendOptions::default()) {
            Ok(r) => {
                *out = boxed(FtpgExtension { collineation: r.collineation, decoded: r.decoded });
                FtpgStatus::Ok
            }
            Err(e) => fail(extend_status(&e), e),
        }
    })
}

/// # Safety
/// `ext` must be a live extension handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ftpg_extension_point_image(ext: *const FtpgExtension, p: u32, out: *mut u32) -> FtpgStatus {
    guard(|| {
        let e = deref!(ext);
        let out = out!(out);
        match e.collineation.sigma().get(p as usize) {
            Some(&v) => {
                *out = v;
                FtpgStatus::Ok
            }
            None => fail(FtpgStatus::InvalidArgument, format!("point {p} out of range")),
        }
    })
}

/// A new handle holding the decoded semilinear map.
///
/// # Safety
/// `ext` must be a live extension handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ftpg_extension_decoded(ext: *const FtpgExtension, out: *mut *mut FtpgSemilinear) -> FtpgStatus {
    guard(|| {
        let e = deref!(ext);
        let out = out!(out);
        *out = boxed(FtpgSemilinear(e.decoded.clone()));
        FtpgStatus::Ok
    })
}

/// # Safety
/// `e` must be null or an extension handle, freed once.
#[no_mangle]
pub unsafe extern "C" fn ftpg_extension_free(e: *mut FtpgExtension) {
    release(e)
}

/// Number of collineations agreeing with `partial`, by exhaustive search.
///
/// # Safety
/// `partial` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ftpg_brute_force_count(partial: *const FtpgPartial, out: *mut u64) -> FtpgStatus {
    guard(|| {
        let pc = deref!(partial);
        let out = out!(out);
        match brute_force_extensions(&pc.0) {
            Ok(v) => {
                *out = v.len() as u64;
                FtpgStatus::Ok
            }
            Err(e) => fail(extend_status(&e), e),
        }
    })
}

/// Picks the least prime `r` for genus `g`, characteristic `p` and density
/// target `eps_num / eps_den`, and certifies it up to `cert_bound`.
///
/// # Safety
/// `r` and `certified` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn ftpg_prime_set_construct(
    g: u32,
    p: u64,
    eps_num: u64,
    eps_den: u64,
    cert_bound: u64,
    r: *mut u64,
    certified: *mut bool,
) -> FtpgStatus {
    guard(|| {
        let (r, certified) = (out!(r), out!(certified));
        if eps_den == 0 {
            return fail(FtpgStatus::InvalidArgument, "epsilon denominator is zero");
        }
        match construct_small_order(g, p, Ratio::new(eps_num, eps_den), cert_bound) {
            Ok(c) => {
                *r = c.r;
                *certified = c.certificate.holds();
                FtpgStatus::Ok
            }
            Err(e) => fail(FtpgStatus::PrimeSet, e),
        }
    })
}

/// Fraction of primes up to `bound` in the order-defined set for `(r, g, p)`,
/// as `num / den` in lowest terms.
///
/// # Safety
/// `num` and `den` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn ftpg_prime_set_density(
    r: u64,
    g: u32,
    p: u64,
    bound: u64,
    num: *mut u64,
    den: *mut u64,
) -> FtpgStatus {
    guard(|| {
        let (num, den) = (out!(num), out!(den));
        let res = PrimeSet::small_order(r, g, p).and_then(|s| natural_density_estimate(&s, bound));
        match res {
            Ok(d) => {
                *num = *d.numer();
                *den = *d.denom();
                FtpgStatus::Ok
            }
            Err(e) => fail(FtpgStatus::PrimeSet, e),
        }
    })
}

/// `|GL_n(F_l)|` in decimal. Release with [`ftpg_string_free`].
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ftpg_gl_order(n: u32, l: u64, out: *mut *mut c_char) -> FtpgStatus {
    guard(|| {
        let out = out!(out);
        match gl_order(n, l) {
            Ok(v) => {
                *out = CString::new(v.to_string()).expect("digits").into_raw();
                FtpgStatus::Ok
            }
            Err(e) => fail(FtpgStatus::PrimeSet, e),
        }
    })
}

/// Reads the last error as an owned Rust string; for tests and wrappers.
pub fn last_error_message() -> Option<String> {
    let p = ftpg_last_error();
    (!p.is_null()).then(|| unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned())
}
