//! C ABI over the eulerphase library.
//!
//! Every fallible function returns an [`EpStatus`]; on failure a message is
//! kept per thread and can be copied out with [`ep_last_error_message`].
//! Handles are opaque and must be released with their matching `_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::fs::File;
use std::io::{BufWriter, Write};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use eulerphase::asymptotics;
use eulerphase::config::parse_sequence;
use eulerphase::phases::{self, PhaseMap, Pixel, Window};
use eulerphase::series::{self, ContourOptions};
use eulerphase::weights::WeightSequence;
use eulerphase::Error;
use num_complex::Complex64;

/// Status codes; 2–4 match the command-line exit codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EpStatus {
    Ok = 0,
    /// A required pointer was null or a string was not UTF-8.
    InvalidArgument = 1,
    Config = 2,
    /// Domain, pole, boundary or convergence failure.
    Domain = 3,
    UnsupportedFamily = 4,
    Io = 5,
    /// A Rust panic was caught at the boundary.
    Internal = 6,
}

/// Opaque weight sequence.
pub struct EpWeights {
    seq: WeightSequence,
}

/// Opaque rasterized phase diagram.
pub struct EpPhaseMap {
    map: PhaseMap,
}

/// Classification of one point of the disk.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct EpPhase {
    pub dominant_h: u64,
    pub dominant_k: u64,
    pub major_arc_count: u64,
    pub leading: f64,
    pub margin: f64,
    /// 1 when the point lies within the tie tolerance of a phase boundary.
    pub boundary: i32,
}

/// Pixel state in an [`EpPhaseMap`].
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EpPixelKind {
    Outside = 0,
    Empty = 1,
    Labeled = 2,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: String) {
    let msg = CString::new(msg.replace('\0', " ")).expect("interior nul removed");
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(msg));
}

fn status_of(err: &Error) -> EpStatus {
    match err.exit_code() {
        2 => EpStatus::Config,
        4 => EpStatus::UnsupportedFamily,
        _ => EpStatus::Domain,
    }
}

enum Failure {
    Lib(Error),
    Invalid(String),
    Io(std::io::Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Io(e)
    }
}

fn guard(body: impl FnOnce() -> Result<(), Failure>) -> EpStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => EpStatus::Ok,
        Ok(Err(Failure::Lib(e))) => {
            set_last_error(e.to_string());
            status_of(&e)
        }
        Ok(Err(Failure::Invalid(msg))) => {
            set_last_error(msg);
            EpStatus::InvalidArgument
        }
        Ok(Err(Failure::Io(e))) => {
            set_last_error(e.to_string());
            EpStatus::Io
        }
        Err(_) => {
            set_last_error("internal panic".into());
            EpStatus::Internal
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(Failure::Invalid(format!("{what} is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure::Invalid(format!("{what} is not UTF-8")))
}

unsafe fn out_arg<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Failure> {
    p.as_mut()
        .ok_or_else(|| Failure::Invalid(format!("{what} is null")))
}

unsafe fn weights_arg<'a>(p: *const EpWeights) -> Result<&'a WeightSequence, Failure> {
    p.as_ref()
        .map(|w| &w.seq)
        .ok_or_else(|| Failure::Invalid("weights handle is null".into()))
}

/// Copy the calling thread's last error message into `buf` (NUL-terminated,
/// truncated to `len`). Returns the full message length excluding the NUL,
/// or 0 when no error has been recorded.
///
/// # Safety
/// `buf` must be null or point to `len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn ep_last_error_message(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|slot| {
        let slot = slot.borrow();
        let Some(msg) = slot.as_ref() else { return 0 };
        let bytes = msg.as_bytes();
        if !buf.is_null() && len > 0 {
            let n = bytes.len().min(len - 1);
            ptr::copy_nonoverlapping(bytes.as_ptr(), buf.cast::<u8>(), n);
            *buf.add(n) = 0;
        }
        bytes.len()
    })
}

/// Parse a family spec such as `power:s0=2` into a new handle.
///
/// # Safety
/// `spec` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ep_weights_parse(
    spec: *const c_char,
    out: *mut *mut EpWeights,
) -> EpStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        *out = ptr::null_mut();
        let seq = parse_sequence(str_arg(spec, "spec")?)?;
        *out = Box::into_raw(Box::new(EpWeights { seq }));
        Ok(())
    })
}

/// Replace the continuation abscissa σ0 (must lie in (−1, 0)).
///
/// # Safety
/// `weights` must be a live handle from [`ep_weights_parse`].
#[no_mangle]
pub unsafe extern "C" fn ep_weights_set_sigma0(weights: *mut EpWeights, sigma0: f64) -> EpStatus {
    guard(|| {
        let w = weights
            .as_mut()
            .ok_or_else(|| Failure::Invalid("weights handle is null".into()))?;
        w.seq = w.seq.clone().with_sigma0(sigma0)?;
        Ok(())
    })
}

/// # Safety
/// `weights` must be null or a handle from [`ep_weights_parse`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ep_weights_free(weights: *mut EpWeights) {
    if !weights.is_null() {
        drop(Box::from_raw(weights));
    }
}

/// Pole location s0 of the handle's Dirichlet series.
///
/// # Safety
/// `weights` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ep_weights_s0(weights: *const EpWeights, out: *mut f64) -> EpStatus {
    guard(|| {
        *out_arg(out, "out")? = weights_arg(weights)?.s0();
        Ok(())
    })
}

/// Canonical spec string of the handle; release with [`ep_string_free`].
///
/// # Safety
/// `weights` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn ep_weights_describe(weights: *const EpWeights) -> *mut c_char {
    match weights_arg(weights) {
        Ok(seq) => CString::new(seq.to_string())
            .map(CString::into_raw)
            .unwrap_or(ptr::null_mut()),
        Err(_) => ptr::null_mut(),
    }
}

/// # Safety
/// `s` must be null or a string returned by this library.
#[no_mangle]
pub unsafe extern "C" fn ep_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Q_n(z) by the exact log-exp recurrence.
///
/// # Safety
/// `weights` must be a live handle; `out_re`, `out_im` writable.
#[no_mangle]
pub unsafe extern "C" fn ep_eval_exact(
    weights: *const EpWeights,
    z_re: f64,
    z_im: f64,
    n: u64,
    out_re: *mut f64,
    out_im: *mut f64,
) -> EpStatus {
    guard(|| {
        let seq = weights_arg(weights)?;
        let (re, im) = (out_arg(out_re, "out_re")?, out_arg(out_im, "out_im")?);
        let v = series::eval_exact(seq, Complex64::new(z_re, z_im), n as usize);
        *re = v.re;
        *im = v.im;
        Ok(())
    })
}

/// Q_n(z) by the trapezoid rule on a circle; `radius <= 0` and `points == 0`
/// select the defaults.
///
/// # Safety
/// `weights` must be a live handle; `out_re`, `out_im` writable.
#[no_mangle]
pub unsafe extern "C" fn ep_contour_extract(
    weights: *const EpWeights,
    z_re: f64,
    z_im: f64,
    n: u64,
    radius: f64,
    points: u64,
    out_re: *mut f64,
    out_im: *mut f64,
) -> EpStatus {
    guard(|| {
        let seq = weights_arg(weights)?;
        let (re, im) = (out_arg(out_re, "out_re")?, out_arg(out_im, "out_im")?);
        let options = ContourOptions {
            radius: (radius > 0.0).then_some(radius),
            points: (points > 0).then_some(points as usize),
        };
        let v = series::contour_extract(seq, Complex64::new(z_re, z_im), n as usize, options)?;
        *re = v.re;
        *im = v.im;
        Ok(())
    })
}

/// Classify z among arcs with k ≤ k_max.
///
/// # Safety
/// `weights` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ep_classify(
    weights: *const EpWeights,
    z_re: f64,
    z_im: f64,
    k_max: u64,
    tie_tol: f64,
    out: *mut EpPhase,
) -> EpStatus {
    guard(|| {
        let seq = weights_arg(weights)?;
        let out = out_arg(out, "out")?;
        let class = phases::classify(seq, Complex64::new(z_re, z_im), k_max, tie_tol)?;
        *out = EpPhase {
            dominant_h: class.dominant.h,
            dominant_k: class.dominant.k,
            major_arc_count: class.major_arcs.len() as u64,
            leading: class.leading,
            margin: class.margin,
            boundary: class.boundary as i32,
        };
        Ok(())
    })
}

/// Saddle-point estimate of Q_n(z) summed over the major arcs, with its
/// error exponent μ. `mu` may be null.
///
/// # Safety
/// `weights` must be a live handle; `out_re`, `out_im` writable.
#[no_mangle]
pub unsafe extern "C" fn ep_estimate(
    weights: *const EpWeights,
    z_re: f64,
    z_im: f64,
    n: u64,
    k_max: u64,
    out_re: *mut f64,
    out_im: *mut f64,
    mu: *mut f64,
) -> EpStatus {
    guard(|| {
        let seq = weights_arg(weights)?;
        let (re, im) = (out_arg(out_re, "out_re")?, out_arg(out_im, "out_im")?);
        let est = asymptotics::estimate(seq, Complex64::new(z_re, z_im), n, k_max)?;
        *re = est.value.re;
        *im = est.value.im;
        if let Some(mu) = mu.as_mut() {
            *mu = est.mu;
        }
        Ok(())
    })
}

/// Leading-order growth estimate of Q_n(1).
///
/// # Safety
/// `weights` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ep_meinardus_r(
    weights: *const EpWeights,
    n: u64,
    out: *mut f64,
) -> EpStatus {
    guard(|| {
        let seq = weights_arg(weights)?;
        *out_arg(out, "out")? = asymptotics::meinardus_r(seq, n)?;
        Ok(())
    })
}

/// Raster the window [re_min, re_max] × [im_min, im_max] at width × height.
///
/// # Safety
/// `weights` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ep_phase_map_new(
    weights: *const EpWeights,
    re_min: f64,
    re_max: f64,
    im_min: f64,
    im_max: f64,
    width: u32,
    height: u32,
    k_max: u64,
    out: *mut *mut EpPhaseMap,
) -> EpStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        *out = ptr::null_mut();
        let seq = weights_arg(weights)?;
        let window = Window {
            re_min,
            re_max,
            im_min,
            im_max,
        };
        let map = phases::raster(seq, window, width as usize, height as usize, k_max)?;
        *out = Box::into_raw(Box::new(EpPhaseMap { map }));
        Ok(())
    })
}

/// # Safety
/// `map` must be null or a handle from [`ep_phase_map_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ep_phase_map_free(map: *mut EpPhaseMap) {
    if !map.is_null() {
        drop(Box::from_raw(map));
    }
}

/// Pixel at (col, row), row 0 at the top. `h`, `k` are set to 0 unless the
/// pixel is labeled; `boundary` may be null.
///
/// # Safety
/// `map` must be a live handle; `kind`, `h`, `k` writable.
#[no_mangle]
pub unsafe extern "C" fn ep_phase_map_pixel(
    map: *const EpPhaseMap,
    col: u32,
    row: u32,
    kind: *mut EpPixelKind,
    h: *mut u64,
    k: *mut u64,
    boundary: *mut i32,
) -> EpStatus {
    guard(|| {
        let map = &map
            .as_ref()
            .ok_or_else(|| Failure::Invalid("phase map handle is null".into()))?
            .map;
        let (col, row) = (col as usize, row as usize);
        if col >= map.width || row >= map.height {
            return Err(Failure::Lib(Error::Domain(format!(
                "pixel ({col}, {row}) outside {}x{}",
                map.width, map.height
            ))));
        }
        let (kind, h, k) = (out_arg(kind, "kind")?, out_arg(h, "h")?, out_arg(k, "k")?);
        let mut on_boundary = 0;
        (*kind, *h, *k) = match map.pixel(col, row) {
            Pixel::Outside => (EpPixelKind::Outside, 0, 0),
            Pixel::Empty => (EpPixelKind::Empty, 0, 0),
            Pixel::Labeled {
                dominant, boundary, ..
            } => {
                on_boundary = *boundary as i32;
                (EpPixelKind::Labeled, dominant.h, dominant.k)
            }
        };
        if let Some(b) = boundary.as_mut() {
            *b = on_boundary;
        }
        Ok(())
    })
}

/// Fraction of in-disk pixels whose dominant arc is (h, k).
///
/// # Safety
/// `map` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ep_phase_map_fraction(
    map: *const EpPhaseMap,
    h: u64,
    k: u64,
    out: *mut f64,
) -> EpStatus {
    guard(|| {
        let map = &map
            .as_ref()
            .ok_or_else(|| Failure::Invalid("phase map handle is null".into()))?
            .map;
        let out = out_arg(out, "out")?;
        *out = map
            .label_fractions()
            .into_iter()
            .find(|(label, _)| label.h == h && label.k == k)
            .map_or(0.0, |(_, f)| f);
        Ok(())
    })
}

/// Write the map as a binary PPM image.
///
/// # Safety
/// `map` must be a live handle; `path` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn ep_phase_map_write_ppm(
    map: *const EpPhaseMap,
    path: *const c_char,
) -> EpStatus {
    guard(|| {
        let map = &map
            .as_ref()
            .ok_or_else(|| Failure::Invalid("phase map handle is null".into()))?
            .map;
        let mut file = BufWriter::new(File::create(str_arg(path, "path")?)?);
        map.write_ppm(&mut file)?;
        file.flush()?;
        Ok(())
    })
}
