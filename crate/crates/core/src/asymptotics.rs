//! Saddle-point estimates for Q_n(z) assembled from the major arcs at z,
//! plus the classical z = 1 growth formula for r(n) = Q_n(1).
//!
//! For a major arc (h, k) with strength L = L_{h,k}(z) the contribution is
//! ω_{h,k,n}(z)·T with
//!
//! ```text
//! T = sqrt(L / (n^{(s0+2)/(s0+1)} · 2π(s0+1))) · exp(((s0+1)/s0) n^{s0/(s0+1)} L)
//! ```
//!
//! replaced by 2·Re T when Φ_{h,k}(z) lies on the non-positive real axis
//! (two conjugate saddles).

use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::phases::{self, check_point, ArcLabel, PhaseClass, DEFAULT_K_MAX, DEFAULT_TIE_TOL};
use crate::series::eval_exact_all;
use crate::special::{gamma_real, hurwitz_zeta, principal_arg};
use crate::weights::{
    dirichlet_deriv_zero, dirichlet_residue, dirichlet_value, fourier_coeffs, unit_root,
    WeightSequence,
};

pub const DEFAULT_OSC_TOL: f64 = 1e-8;

/// b(j) below this magnitude contribute a factor of 1 and are skipped.
const B_FLOOR: f64 = 1e-14;

/// Relative imaginary part of Φ treated as exact rounding noise.
const REAL_NOISE: f64 = 64.0 * f64::EPSILON;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Branch {
    /// Single saddle; contribution ω·T.
    Analytic,
    /// Φ ≤ 0: two conjugate saddles; contribution ω·2Re T.
    Oscillatory,
}

impl fmt::Display for Branch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Branch::Analytic => "analytic",
            Branch::Oscillatory => "oscillatory",
        })
    }
}

/// Full detail of one saddle evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SaddleTerm {
    pub phi: Complex64,
    pub strength: Complex64,
    /// T, the single-saddle value.
    pub analytic: Complex64,
    pub branch: Branch,
    /// T on the analytic branch, 2·Re T on the oscillatory one.
    pub value: Complex64,
}

/// ω_{h,k,n}(z) = e^{−2πi hn/k} Π_j (1 − e^{2πi hj/k} z)^{−b(j)}, principal branch.
pub fn omega(seq: &WeightSequence, arc: ArcLabel, n: u64, z: Complex64) -> Result<Complex64> {
    if !(z.norm() < 1.0) {
        return Err(Error::Domain(format!(
            "omega: |z| = {} is not below 1",
            z.norm()
        )));
    }
    let data = fourier_coeffs(seq, arc.k)?;
    let mut log = Complex64::new(0.0, 0.0);
    for (j, b) in data.b.iter().enumerate() {
        if b.norm() < B_FLOOR {
            continue;
        }
        let w =
            Complex64::new(1.0, 0.0) - unit_root(((arc.h * j as u64) % arc.k) as i64, arc.k) * z;
        if w.norm() == 0.0 {
            return Err(Error::Domain(format!(
                "omega: factor 1 - e(hj/k)z vanishes on arc {arc}, j = {j}"
            )));
        }
        log -= b * Complex64::new(w.norm().ln(), principal_arg(w));
    }
    let twist = unit_root(-(((arc.h % arc.k) * (n % arc.k) % arc.k) as i64), arc.k);
    Ok(twist * log.exp())
}

/// The saddle value and its branch for arc (h, k).
pub fn saddle_term(
    seq: &WeightSequence,
    arc: ArcLabel,
    n: u64,
    z: Complex64,
    osc_tol: f64,
) -> Result<(Complex64, Branch)> {
    let t = saddle_detail(seq, arc, n, z, osc_tol)?;
    Ok((t.value, t.branch))
}

/// [`saddle_term`] with Φ, L and the single-saddle value T exposed.
pub fn saddle_detail(
    seq: &WeightSequence,
    arc: ArcLabel,
    n: u64,
    z: Complex64,
    osc_tol: f64,
) -> Result<SaddleTerm> {
    if n == 0 {
        return Err(Error::Domain("saddle term needs n >= 1".into()));
    }
    let phi = phases::phi_hk(seq, arc, z)?;
    let strength = phases::l_hk(seq, arc, z)?;
    let analytic = single_saddle(seq.s0(), n, strength);
    let oscillatory = phi.re < 0.0 && phi.im.abs() < osc_tol * phi.norm();
    let (branch, value) = if oscillatory {
        (Branch::Oscillatory, Complex64::new(2.0 * analytic.re, 0.0))
    } else {
        (Branch::Analytic, analytic)
    };
    Ok(SaddleTerm {
        phi,
        strength,
        analytic,
        branch,
        value,
    })
}

/// T evaluated in log form so large n do not overflow the intermediate pieces.
fn single_saddle(s0: f64, n: u64, strength: Complex64) -> Complex64 {
    let n = n as f64;
    let denom = n.powf((s0 + 2.0) / (s0 + 1.0)) * 2.0 * PI * (s0 + 1.0);
    let ratio = strength / denom;
    let half_log = Complex64::new(ratio.norm().ln(), principal_arg(ratio)) * 0.5;
    let growth = strength * ((s0 + 1.0) / s0 * n.powf(s0 / (s0 + 1.0)));
    (half_log + growth).exp()
}

/// μ = min(−σ0/(s0+1), s0/(2s0+2)).
pub fn error_exponent(seq: &WeightSequence) -> f64 {
    let s0 = seq.s0();
    (-seq.sigma0() / (s0 + 1.0)).min(s0 / (2.0 * s0 + 2.0))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimateOptions {
    pub k_max: u64,
    pub tie_tol: f64,
    pub osc_tol: f64,
}

impl Default for EstimateOptions {
    fn default() -> Self {
        Self {
            k_max: DEFAULT_K_MAX,
            tie_tol: DEFAULT_TIE_TOL,
            osc_tol: DEFAULT_OSC_TOL,
        }
    }
}

/// One major arc's share of the estimate.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ArcEstimate {
    pub arc: ArcLabel,
    #[serde(skip)]
    pub omega: Complex64,
    #[serde(skip)]
    pub saddle: Complex64,
    pub branch: Branch,
    #[serde(skip)]
    pub product: Complex64,
    /// The single-saddle value T, kept for oscillatory arcs so both branch
    /// values are available.
    #[serde(skip)]
    pub analytic_saddle: Option<Complex64>,
}

impl ArcEstimate {
    /// |ω|·|T|, the amplitude this arc's contribution oscillates within.
    pub fn envelope(&self) -> f64 {
        self.omega.norm() * self.analytic_saddle.unwrap_or(self.saddle).norm()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Estimate {
    pub z: Complex64,
    pub n: u64,
    pub value: Complex64,
    pub arcs: Vec<ArcEstimate>,
    pub mu: f64,
    pub phase: PhaseClass,
    pub warnings: Vec<String>,
}

impl Estimate {
    pub fn is_oscillatory(&self) -> bool {
        self.arcs.iter().any(|a| a.branch == Branch::Oscillatory)
    }

    /// Σ |ω|·|T| over the major arcs.
    pub fn envelope(&self) -> f64 {
        self.arcs.iter().map(ArcEstimate::envelope).sum()
    }
}

/// Σ ω·Ĩ over the major arcs at z, with default tolerances.
pub fn estimate(seq: &WeightSequence, z: Complex64, n: u64, k_max: u64) -> Result<Estimate> {
    estimate_with(
        seq,
        z,
        n,
        &EstimateOptions {
            k_max,
            ..EstimateOptions::default()
        },
    )
}

pub fn estimate_with(
    seq: &WeightSequence,
    z: Complex64,
    n: u64,
    options: &EstimateOptions,
) -> Result<Estimate> {
    let phase = classify_for_estimate(seq, z, options)?;
    assemble(seq, z, n, phase, options.osc_tol)
}

fn classify_for_estimate(
    seq: &WeightSequence,
    z: Complex64,
    options: &EstimateOptions,
) -> Result<PhaseClass> {
    check_point(z)?;
    let phase = phases::classify(seq, z, options.k_max, options.tie_tol)?;
    if phase.boundary {
        let arcs: Vec<String> = phase.major_arcs.iter().map(ToString::to_string).collect();
        return Err(Error::Boundary(format!(
            "z = {z} has margin {:e} (major arcs {})",
            phase.margin,
            arcs.join(" ")
        )));
    }
    Ok(phase)
}

fn assemble(
    seq: &WeightSequence,
    z: Complex64,
    n: u64,
    phase: PhaseClass,
    osc_tol: f64,
) -> Result<Estimate> {
    if n == 0 {
        return Err(Error::Domain("estimate needs n >= 1".into()));
    }
    let mut arcs = Vec::with_capacity(phase.major_arcs.len());
    let mut warnings = Vec::new();
    let mut value = Complex64::new(0.0, 0.0);
    for &arc in &phase.major_arcs {
        let w = omega(seq, arc, n, z)?;
        let term = saddle_detail(seq, arc, n, z, osc_tol)?;
        if term.branch == Branch::Oscillatory && term.phi.im.abs() > REAL_NOISE * term.phi.norm() {
            warnings.push(format!(
                "arc {arc}: Phi = {} is within osc_tol of the negative axis; \
                 analytic value {} also reported",
                term.phi,
                w * term.analytic
            ));
        }
        let product = w * term.value;
        value += product;
        arcs.push(ArcEstimate {
            arc,
            omega: w,
            saddle: term.value,
            branch: term.branch,
            product,
            analytic_saddle: (term.branch == Branch::Oscillatory).then_some(term.analytic),
        });
    }
    Ok(Estimate {
        z,
        n,
        value,
        arcs,
        mu: error_exponent(seq),
        phase,
        warnings,
    })
}

/// The constants of the z = 1 growth formula
/// r(n) ≈ C n^κ exp(((s0+1)/s0) n^{s0/(s0+1)} [AΓ(s0+1)ζ(s0+1)]^{1/(s0+1)}).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MeinardusConstants {
    pub s0: f64,
    /// Residue A of D(s) at s0.
    pub residue: f64,
    /// D(0).
    pub d0: f64,
    /// D′(0).
    pub d0_prime: f64,
    /// [AΓ(s0+1)ζ(s0+1)]^{1/(s0+1)}.
    pub growth: f64,
    pub c: f64,
    pub kappa: f64,
}

impl MeinardusConstants {
    /// ((s0+1)/s0) n^{s0/(s0+1)} · growth.
    pub fn exponent(&self, n: f64) -> f64 {
        (self.s0 + 1.0) / self.s0 * n.powf(self.s0 / (self.s0 + 1.0)) * self.growth
    }

    pub fn ln_r(&self, n: f64) -> f64 {
        self.c.ln() + self.kappa * n.ln() + self.exponent(n)
    }

    pub fn r(&self, n: f64) -> f64 {
        self.ln_r(n).exp()
    }
}

pub fn meinardus_constants(seq: &WeightSequence) -> Result<MeinardusConstants> {
    let s0 = seq.s0();
    let residue = dirichlet_residue(seq, 1, 1)?.re;
    if !(residue > 0.0) {
        return Err(Error::UnsupportedFamily(format!(
            "{seq}: residue A = {residue} at s0 must be positive"
        )));
    }
    let d0 = dirichlet_value(seq, 1, 1, 0.0)?.re;
    let d0_prime = dirichlet_deriv_zero(seq)?;
    let base = residue * gamma_real(s0 + 1.0)? * hurwitz_zeta(s0 + 1.0, 1.0)?;
    let growth = base.powf(1.0 / (s0 + 1.0));
    let c = d0_prime.exp()
        * (2.0 * PI * (1.0 + s0)).powf(-0.5)
        * base.powf((1.0 - 2.0 * d0) / (2.0 * s0 + 2.0));
    let kappa = (d0 - 1.0 - s0 / 2.0) / (1.0 + s0);
    Ok(MeinardusConstants {
        s0,
        residue,
        d0,
        d0_prime,
        growth,
        c,
        kappa,
    })
}

/// Leading-order r(n) = Q_n(1).
pub fn meinardus_r(seq: &WeightSequence, n: u64) -> Result<f64> {
    if n == 0 {
        return Err(Error::Domain("meinardus_r needs n >= 1".into()));
    }
    Ok(meinardus_constants(seq)?.r(n as f64))
}

/// One row of an exact-vs-estimate sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct CompareRow {
    pub n: u64,
    pub exact: Complex64,
    pub estimate: Complex64,
    /// |exact − estimate| / |exact|.
    pub rel_err: f64,
    /// |exact − estimate| / envelope, reported when some arc is oscillatory.
    pub envelope_err: Option<f64>,
}

pub fn compare(
    seq: &WeightSequence,
    z: Complex64,
    n_list: &[u64],
    k_max: u64,
) -> Result<Vec<CompareRow>> {
    compare_with(
        seq,
        z,
        n_list,
        &EstimateOptions {
            k_max,
            ..EstimateOptions::default()
        },
    )
}

pub fn compare_with(
    seq: &WeightSequence,
    z: Complex64,
    n_list: &[u64],
    options: &EstimateOptions,
) -> Result<Vec<CompareRow>> {
    let Some(&n_max) = n_list.iter().max() else {
        return Ok(Vec::new());
    };
    let phase = classify_for_estimate(seq, z, options)?;
    let exact = eval_exact_all(seq, z, n_max as usize);
    n_list
        .par_iter()
        .map(|&n| {
            let est = assemble(seq, z, n, phase.clone(), options.osc_tol)?;
            let q = exact[n as usize];
            let diff = (q - est.value).norm();
            Ok(CompareRow {
                n,
                exact: q,
                estimate: est.value,
                rel_err: diff / q.norm(),
                envelope_err: est.is_oscillatory().then(|| diff / est.envelope()),
            })
        })
        .collect()
}
