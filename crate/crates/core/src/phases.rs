//! Arc strengths L_{h,k}(z) and the phase picture of the punctured disk.
//!
//! Φ_{h,k}(z) = Γ(s0+1) Σ_{j∈Z_k} c(j) Li_{s0+1}(e^{2πi hj/k} z) and
//! L_{h,k} = Φ_{h,k}^{1/(s0+1)} on the principal branch. A point belongs to
//! phase (p,q) when every arc outside the class of L_{p,q} has strictly
//! smaller real part; the class is decided numerically with a relative tie
//! tolerance and points near a tie are flagged as boundary.

use std::collections::BTreeMap;
use std::fmt;
use std::io::{self, Write};
use std::sync::Arc;

use num_complex::Complex64;
use num_integer::Integer;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::special::{gamma_real, polylog, principal_root, DISK_CUTOFF};
use crate::weights::{fourier_coeffs, unit_root, DirichletData, WeightSequence};

pub const DEFAULT_K_MAX: u64 = 10;
pub const DEFAULT_TIE_TOL: f64 = 1e-9;

/// |Φ| below which an arc is treated as absent.
const PHI_FLOOR: f64 = 1e-14;

/// A root of unity e^{2πi h/k} with gcd(h, k) = 1 and 1 ≤ h ≤ k.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct ArcLabel {
    pub h: u64,
    pub k: u64,
}

impl ArcLabel {
    pub fn new(h: u64, k: u64) -> Result<Self> {
        if k == 0 || h == 0 || h > k || h.gcd(&k) != 1 {
            return Err(Error::Domain(format!(
                "({h},{k}) is not a reduced arc label"
            )));
        }
        Ok(Self { h, k })
    }

    /// The label of the conjugate root e^{−2πi h/k}.
    pub fn conjugate(self) -> Self {
        if self.k == self.h {
            self
        } else {
            Self {
                h: self.k - self.h,
                k: self.k,
            }
        }
    }
}

impl Ord for ArcLabel {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.k, self.h).cmp(&(other.k, other.h))
    }
}

impl PartialOrd for ArcLabel {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for ArcLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.h, self.k)
    }
}

/// All reduced labels with k ≤ k_max, ordered by k then h.
pub fn arcs_up_to(k_max: u64) -> Vec<ArcLabel> {
    (1..=k_max)
        .flat_map(|k| {
            (1..=k)
                .filter(move |h| h.gcd(&k) == 1)
                .map(move |h| ArcLabel { h, k })
        })
        .collect()
}

pub(crate) fn check_point(z: Complex64) -> Result<()> {
    if z.re == 0.0 && z.im == 0.0 {
        return Err(Error::Domain(
            "z = 0 is excluded from the punctured disk".into(),
        ));
    }
    if !(z.norm() <= DISK_CUTOFF) {
        return Err(Error::Domain(format!(
            "|z| = {} exceeds 1 - 1e-6",
            z.norm()
        )));
    }
    Ok(())
}

/// Φ_{h,k}(z) = Γ(s0+1) Σ_j c(j) Li_{s0+1}(e^{2πi hj/k} z).
pub fn phi_hk(seq: &WeightSequence, arc: ArcLabel, z: Complex64) -> Result<Complex64> {
    check_point(z)?;
    let data = fourier_coeffs(seq, arc.k)?;
    let order = seq.s0() + 1.0;
    let mut total = Complex64::new(0.0, 0.0);
    for (j, c) in data.c.iter().enumerate() {
        if c.norm() < 1e-15 {
            continue;
        }
        let rotated = unit_root((arc.h * j as u64) as i64, arc.k) * z;
        total += c * polylog(order, rotated)?;
    }
    Ok(total * gamma_real(order)?)
}

/// L_{h,k}(z): the principal (s0+1)-th root of Φ_{h,k}(z).
pub fn l_hk(seq: &WeightSequence, arc: ArcLabel, z: Complex64) -> Result<Complex64> {
    let phi = phi_hk(seq, arc, z)?;
    root_of_phi(seq, arc, phi)
}

fn root_of_phi(seq: &WeightSequence, arc: ArcLabel, phi: Complex64) -> Result<Complex64> {
    if phi.norm() < PHI_FLOOR {
        return Err(Error::Domain(format!("Φ vanishes on arc {arc}")));
    }
    principal_root(phi, seq.s0() + 1.0)
}

/// Evaluates Φ for every arc with k ≤ k_max at once.
///
/// Substituting c(j) into the polylog sum gives
/// Φ_{h,k}(z) = Γ(s0+1) Σ_{n≥1} A_{hn,k} z^n n^{−s0−1}, so one pass over n
/// filling the residue-class sums S_{k,r} = Σ_{n≡r (k)} z^n n^{−s0−1}
/// serves every arc.
pub struct ArcEvaluator {
    seq: WeightSequence,
    arcs: Vec<ArcLabel>,
    data: Vec<Arc<DirichletData>>,
    gamma: f64,
    order: f64,
}

impl ArcEvaluator {
    pub fn new(seq: &WeightSequence, k_max: u64) -> Result<Self> {
        if k_max == 0 {
            return Err(Error::Domain("K_max must be at least 1".into()));
        }
        let data = (1..=k_max)
            .map(|k| fourier_coeffs(seq, k))
            .collect::<Result<Vec<_>>>()?;
        let order = seq.s0() + 1.0;
        Ok(Self {
            seq: seq.clone(),
            arcs: arcs_up_to(k_max),
            data,
            gamma: gamma_real(order)?,
            order,
        })
    }

    pub fn arcs(&self) -> &[ArcLabel] {
        &self.arcs
    }

    pub fn sequence(&self) -> &WeightSequence {
        &self.seq
    }

    fn k_max(&self) -> usize {
        self.data.len()
    }

    /// Φ_{h,k}(z) for every arc, in [`Self::arcs`] order.
    pub fn phis(&self, z: Complex64) -> Result<Vec<Complex64>> {
        check_point(z)?;
        let k_max = self.k_max();
        let mut sums: Vec<Vec<Complex64>> = (1..=k_max)
            .map(|k| vec![Complex64::new(0.0, 0.0); k])
            .collect();
        let terms = crate::special::series_terms(z.norm(), self.order);
        let integer_order = self.order.fract() == 0.0 && self.order <= 16.0;
        let mut zn = z;
        for n in 1..=terms {
            if n % 256 == 0 {
                zn = z.powu(n as u32);
            }
            let w = if integer_order {
                (n as f64).powi(-(self.order as i32))
            } else {
                (n as f64).powf(-self.order)
            };
            let t = zn * w;
            for (k, row) in sums.iter_mut().enumerate() {
                row[n % (k + 1)] += t;
            }
            zn *= z;
        }
        Ok(self
            .arcs
            .iter()
            .map(|arc| {
                let k = arc.k as usize;
                let data = &self.data[k - 1];
                let row = &sums[k - 1];
                let total: Complex64 = (0..k)
                    .map(|r| data.residue((arc.h as usize * r) as i64) * row[r])
                    .sum();
                total * self.gamma
            })
            .collect())
    }

    /// L_{h,k}(z) for every arc; `None` where Φ vanishes.
    pub fn strengths(&self, z: Complex64) -> Result<Vec<Option<Complex64>>> {
        Ok(self
            .phis(z)?
            .into_iter()
            .zip(&self.arcs)
            .map(|(phi, arc)| root_of_phi(&self.seq, *arc, phi).ok())
            .collect())
    }

    /// Phase classification of z with relative tie tolerance `tie_tol`.
    pub fn classify(&self, z: Complex64, tie_tol: f64) -> Result<PhaseClass> {
        let strengths = self.strengths(z)?;
        let mut best = f64::NEG_INFINITY;
        for l in strengths.iter().flatten() {
            best = best.max(l.re);
        }
        if !best.is_finite() {
            return Err(Error::Domain(format!(
                "no arc with k ≤ {} is defined at z = {z}",
                self.k_max()
            )));
        }
        let scale = best.abs().max(f64::MIN_POSITIVE);
        let tie = tie_tol * scale;
        let mut major = Vec::new();
        let mut runner_up = f64::NEG_INFINITY;
        for (arc, l) in self.arcs.iter().zip(&strengths) {
            let Some(l) = l else { continue };
            if l.re >= best - tie {
                major.push(*arc);
            } else {
                runner_up = runner_up.max(l.re);
            }
        }
        let margin = best - runner_up;
        Ok(PhaseClass {
            z,
            dominant: major[0],
            major_arcs: major,
            leading: best,
            margin,
            boundary: margin < 10.0 * tie,
        })
    }
}

/// Phase membership of a single point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PhaseClass {
    #[serde(skip)]
    pub z: Complex64,
    /// Smallest (k, h) among the major arcs.
    pub dominant: ArcLabel,
    /// Arcs whose Re L is within the tie tolerance of the maximum.
    pub major_arcs: Vec<ArcLabel>,
    /// max Re L_{h,k}(z).
    pub leading: f64,
    /// Gap between the maximum and the best excluded arc (∞ if none).
    pub margin: f64,
    pub boundary: bool,
}

/// Classify z among arcs with k ≤ k_max.
pub fn classify(
    seq: &WeightSequence,
    z: Complex64,
    k_max: u64,
    tie_tol: f64,
) -> Result<PhaseClass> {
    ArcEvaluator::new(seq, k_max)?.classify(z, tie_tol)
}

/// max Re L_{h,k}(z) over k ≤ k_max, the exponential growth rate of Q_n(z).
pub fn leading_growth(seq: &WeightSequence, z: Complex64, k_max: u64) -> Result<f64> {
    Ok(classify(seq, z, k_max, DEFAULT_TIE_TOL)?.leading)
}

/// Axis-aligned rectangle in the complex plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Window {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
}

impl Window {
    pub fn square(half_width: f64) -> Self {
        Self {
            re_min: -half_width,
            re_max: half_width,
            im_min: -half_width,
            im_max: half_width,
        }
    }

    fn validate(&self) -> Result<()> {
        let ok = [self.re_min, self.re_max, self.im_min, self.im_max]
            .iter()
            .all(|v| v.is_finite());
        if !ok || self.re_min >= self.re_max || self.im_min >= self.im_max {
            return Err(Error::Config(format!("degenerate window {self:?}")));
        }
        Ok(())
    }
}

/// Per-pixel outcome of a raster.
#[derive(Debug, Clone, PartialEq)]
pub enum Pixel {
    /// Center outside the disk cutoff.
    Outside,
    /// Inside the disk but not classifiable (z = 0 or no defined arc).
    Empty,
    Labeled {
        dominant: ArcLabel,
        major_arcs: Vec<ArcLabel>,
        boundary: bool,
    },
}

/// Rasterized phase labels; row 0 is the top (largest imaginary part).
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseMap {
    pub window: Window,
    pub width: usize,
    pub height: usize,
    pub k_max: u64,
    pub pixels: Vec<Pixel>,
}

impl PhaseMap {
    /// Pixel center; symmetric windows give exactly mirrored coordinates.
    pub fn center(&self, col: usize, row: usize) -> Complex64 {
        pixel_center(&self.window, self.width, self.height, col, row)
    }

    pub fn pixel(&self, col: usize, row: usize) -> &Pixel {
        &self.pixels[row * self.width + col]
    }

    /// Pixels whose center lies inside the disk.
    pub fn disk_pixels(&self) -> usize {
        self.pixels
            .iter()
            .filter(|p| !matches!(p, Pixel::Outside))
            .count()
    }

    /// Fraction of disk pixels carrying each dominant label.
    pub fn label_fractions(&self) -> BTreeMap<ArcLabel, f64> {
        let total = self.disk_pixels().max(1) as f64;
        let mut counts: BTreeMap<ArcLabel, usize> = BTreeMap::new();
        for p in &self.pixels {
            if let Pixel::Labeled { dominant, .. } = p {
                *counts.entry(*dominant).or_default() += 1;
            }
        }
        counts
            .into_iter()
            .map(|(k, v)| (k, v as f64 / total))
            .collect()
    }

    /// Labels covering more than `threshold` of the disk pixels.
    pub fn labels_above(&self, threshold: f64) -> Vec<ArcLabel> {
        self.label_fractions()
            .into_iter()
            .filter(|(_, f)| *f > threshold)
            .map(|(l, _)| l)
            .collect()
    }

    /// Binary PPM (P6): palette keyed by (h,k), boundary black, non-disk white.
    pub fn write_ppm<W: Write>(&self, mut out: W) -> io::Result<()> {
        write!(out, "P6\n{} {}\n255\n", self.width, self.height)?;
        let mut bytes = Vec::with_capacity(3 * self.pixels.len());
        for p in &self.pixels {
            let rgb = match p {
                Pixel::Outside | Pixel::Empty => [255, 255, 255],
                Pixel::Labeled { boundary: true, .. } => [0, 0, 0],
                Pixel::Labeled { dominant, .. } => palette(*dominant),
            };
            bytes.extend_from_slice(&rgb);
        }
        out.write_all(&bytes)
    }

    /// CSV `x,y,h,k,boundary`; pixels without a label report h = k = 0.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "x,y,h,k,boundary")?;
        for row in 0..self.height {
            for col in 0..self.width {
                let z = self.center(col, row);
                let (h, k, b) = match self.pixel(col, row) {
                    Pixel::Labeled {
                        dominant, boundary, ..
                    } => (dominant.h, dominant.k, *boundary as u8),
                    _ => (0, 0, 0),
                };
                writeln!(
                    out,
                    "{},{},{h},{k},{b}",
                    crate::series::format_float(z.re),
                    crate::series::format_float(z.im)
                )?;
            }
        }
        Ok(())
    }
}

fn pixel_center(window: &Window, width: usize, height: usize, col: usize, row: usize) -> Complex64 {
    let dx = (window.re_max - window.re_min) / width as f64;
    let dy = (window.im_max - window.im_min) / height as f64;
    let mid_x = 0.5 * (window.re_max + window.re_min);
    let mid_y = 0.5 * (window.im_max + window.im_min);
    let x = mid_x + (col as f64 - 0.5 * (width as f64 - 1.0)) * dx;
    let y = mid_y + (0.5 * (height as f64 - 1.0) - row as f64) * dy;
    Complex64::new(x, y)
}

/// Fixed color per label: the first few arcs get hand-picked colors, the rest
/// a golden-angle hue walk over the (k, h) ordinal.
pub fn palette(label: ArcLabel) -> [u8; 3] {
    const FIXED: [[u8; 3]; 8] = [
        [31, 119, 180],  // (1,1)
        [255, 127, 14],  // (1,2)
        [44, 160, 44],   // (1,3)
        [214, 39, 40],   // (2,3)
        [148, 103, 189], // (1,4)
        [140, 86, 75],   // (3,4)
        [227, 119, 194], // (1,5)
        [188, 189, 34],  // (2,5)
    ];
    let ordinal = arcs_up_to(label.k)
        .iter()
        .position(|a| *a == label)
        .unwrap_or(0);
    if let Some(c) = FIXED.get(ordinal) {
        return *c;
    }
    let hue = (ordinal as f64 * 137.507_764) % 360.0;
    hsv_to_rgb(hue, 0.65, 0.85)
}

fn hsv_to_rgb(hue: f64, sat: f64, val: f64) -> [u8; 3] {
    let c = val * sat;
    let x = c * (1.0 - ((hue / 60.0) % 2.0 - 1.0).abs());
    let m = val - c;
    let (r, g, b) = match (hue / 60.0) as u32 {
        0 => (c, x, 0.0),
        1 => (x, c, 0.0),
        2 => (0.0, c, x),
        3 => (0.0, x, c),
        4 => (x, 0.0, c),
        _ => (c, 0.0, x),
    };
    let to = |v: f64| ((v + m) * 255.0).round() as u8;
    [to(r), to(g), to(b)]
}

/// Classify every pixel center of `window` at the given resolution.
pub fn raster(
    seq: &WeightSequence,
    window: Window,
    width: usize,
    height: usize,
    k_max: u64,
) -> Result<PhaseMap> {
    raster_with_tolerance(seq, window, width, height, k_max, DEFAULT_TIE_TOL)
}

pub fn raster_with_tolerance(
    seq: &WeightSequence,
    window: Window,
    width: usize,
    height: usize,
    k_max: u64,
    tie_tol: f64,
) -> Result<PhaseMap> {
    window.validate()?;
    if width == 0 || height == 0 {
        return Err(Error::Config("raster resolution must be positive".into()));
    }
    let evaluator = ArcEvaluator::new(seq, k_max)?;
    let pixels: Vec<Pixel> = (0..width * height)
        .into_par_iter()
        .map(|idx| {
            let z = pixel_center(&window, width, height, idx % width, idx / width);
            if z.norm() > DISK_CUTOFF {
                return Pixel::Outside;
            }
            match evaluator.classify(z, tie_tol) {
                Ok(class) => Pixel::Labeled {
                    dominant: class.dominant,
                    major_arcs: class.major_arcs,
                    boundary: class.boundary,
                },
                Err(_) => Pixel::Empty,
            }
        })
        .collect();
    Ok(PhaseMap {
        window,
        width,
        height,
        k_max,
        pixels,
    })
}

/// Locate x* in (−1, 0) where Re L_{1,1}(x) = Re L_{1,2}(x) by bisection.
///
/// Returns `None` when the difference keeps one sign on the sampled axis
/// (then one arc dominates the whole negative axis).
pub fn negative_axis_crossover(seq: &WeightSequence, tol: f64) -> Result<Option<f64>> {
    let one = ArcLabel { h: 1, k: 1 };
    let two = ArcLabel { h: 1, k: 2 };
    let gap = |x: f64| -> Result<f64> {
        let z = Complex64::new(x, 0.0);
        Ok(l_hk(seq, one, z)?.re - l_hk(seq, two, z)?.re)
    };
    let mut lo = -DISK_CUTOFF;
    let mut hi = -1e-6;
    let (g_lo, g_hi) = (gap(lo)?, gap(hi)?);
    if g_lo.signum() == g_hi.signum() {
        return Ok(None);
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if gap(mid)?.signum() == g_lo.signum() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(Some(0.5 * (lo + hi)))
}
