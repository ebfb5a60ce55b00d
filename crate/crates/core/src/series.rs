//! Exact and numeric coefficient extraction for
//! P(z, q) = Π_{m≥1} (1 − z q^m)^{−a_m} = Σ_n Q_n(z) q^n.
//!
//! Three independent routes:
//!  * [`expand_product`] multiplies the truncated factors out over big integers
//!    (nonnegative integer weights only);
//!  * [`expand_exp_recurrence`] / [`eval_exact`] use the logarithmic expansion
//!    ln P = Σ_N c_N(z) q^N, N·c_N(z) = Σ_{m|N} m·a_m·z^{N/m}, and the
//!    recurrence n·Q_n = Σ_{j=1}^{n} (j·c_j)·Q_{n−j};
//!  * [`contour_extract`] integrates P(z, q) q^{−n−1} on a circle by the
//!    trapezoid rule.

use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::phases;
use crate::weights::WeightSequence;

/// Coefficients of z^0..z^n.
#[derive(Debug, Clone, PartialEq)]
pub enum Coefficients {
    Integer(Vec<BigUint>),
    Rational(Vec<BigRational>),
    Float(Vec<f64>),
}

/// Q_n(z) as a polynomial of degree at most n.
#[derive(Debug, Clone, PartialEq)]
pub struct CoeffPoly {
    pub n: usize,
    pub coeffs: Coefficients,
}

impl CoeffPoly {
    pub fn is_exact(&self) -> bool {
        !matches!(self.coeffs, Coefficients::Float(_))
    }

    pub fn len(&self) -> usize {
        match &self.coeffs {
            Coefficients::Integer(v) => v.len(),
            Coefficients::Rational(v) => v.len(),
            Coefficients::Float(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Coefficients rounded to f64.
    pub fn to_f64(&self) -> Vec<f64> {
        match &self.coeffs {
            Coefficients::Integer(v) => v
                .iter()
                .map(|c| c.to_f64().unwrap_or(f64::INFINITY))
                .collect(),
            Coefficients::Rational(v) => v.iter().map(|c| c.to_f64().unwrap_or(f64::NAN)).collect(),
            Coefficients::Float(v) => v.clone(),
        }
    }

    /// Index of the highest nonzero coefficient, if any.
    pub fn degree(&self) -> Option<usize> {
        match &self.coeffs {
            Coefficients::Integer(v) => v.iter().rposition(|c| !c.is_zero()),
            Coefficients::Rational(v) => v.iter().rposition(|c| !c.is_zero()),
            Coefficients::Float(v) => v.iter().rposition(|c| *c != 0.0),
        }
    }

    /// Horner evaluation at z.
    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.to_f64()
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
    }

    /// Exact integer coefficients, when the polynomial has them.
    pub fn integer_coeffs(&self) -> Option<Vec<BigInt>> {
        match &self.coeffs {
            Coefficients::Integer(v) => Some(v.iter().cloned().map(BigInt::from).collect()),
            Coefficients::Rational(v) => v
                .iter()
                .map(|c| c.is_integer().then(|| c.to_integer()))
                .collect(),
            Coefficients::Float(_) => None,
        }
    }
}

impl fmt::Display for CoeffPoly {
    /// Comma-separated coefficients of z^0..z^n.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cells: Vec<String> = match &self.coeffs {
            Coefficients::Integer(v) => v.iter().map(|c| c.to_string()).collect(),
            Coefficients::Rational(v) => v.iter().map(|c| c.to_string()).collect(),
            Coefficients::Float(v) => v.iter().map(|c| format_float(*c)).collect(),
        };
        write!(f, "{}", cells.join(","))
    }
}

/// 17 significant digits, the shortest form that always round-trips.
pub fn format_float(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    format!("{:.16e}", x)
}

fn integer_weights(seq: &WeightSequence, n_max: usize) -> Result<Vec<u64>> {
    (1..=n_max as u64)
        .map(|m| {
            seq.integer_weight(m).ok_or_else(|| {
                Error::UnsupportedFamily(format!(
                    "{seq}: a_{m} = {} is not a nonnegative integer",
                    seq.weight_at(m)
                ))
            })
        })
        .collect()
}

/// Q_0..Q_{n_max} by multiplying Π_{m ≤ n_max} Σ_j C(a_m+j−1, j) z^j q^{mj}
/// over big integers.
pub fn expand_product(seq: &WeightSequence, n_max: usize) -> Result<Vec<CoeffPoly>> {
    let weights = integer_weights(seq, n_max)?;
    let mut table: Vec<Vec<BigUint>> = (0..=n_max).map(|n| vec![BigUint::zero(); n + 1]).collect();
    table[0][0] = BigUint::one();
    for (idx, &a) in weights.iter().enumerate() {
        if a == 0 {
            continue;
        }
        let m = idx + 1;
        let jmax = n_max / m;
        let mut binom = Vec::with_capacity(jmax + 1);
        binom.push(BigUint::one());
        for j in 1..=jmax {
            let next = &binom[j - 1] * BigUint::from(a + j as u64 - 1) / BigUint::from(j as u64);
            binom.push(next);
        }
        // descending n so table[n - m j] is still the old value
        for n in (m..=n_max).rev() {
            for l in (1..=n).rev() {
                let mut add = BigUint::zero();
                for j in 1..=(n / m).min(l) {
                    let prev = &table[n - m * j];
                    if l - j < prev.len() && !prev[l - j].is_zero() {
                        add += &binom[j] * &prev[l - j];
                    }
                }
                if !add.is_zero() {
                    table[n][l] += add;
                }
            }
        }
    }
    Ok(table
        .into_iter()
        .enumerate()
        .map(|(n, coeffs)| CoeffPoly {
            n,
            coeffs: Coefficients::Integer(coeffs),
        })
        .collect())
}

/// Exact Q_n(1) for n ≤ n_max: coefficients of Π (1 − q^m)^{−a_m}, via
/// n·r(n) = Σ_j σ(j)·r(n−j) with σ(j) = Σ_{d|j} d·a_d.
pub fn exact_totals(seq: &WeightSequence, n_max: usize) -> Result<Vec<BigUint>> {
    let weights = integer_weights(seq, n_max)?;
    let mut sigma = vec![BigUint::zero(); n_max + 1];
    for (idx, &a) in weights.iter().enumerate() {
        let d = idx + 1;
        if a == 0 {
            continue;
        }
        let contrib = BigUint::from(d as u64) * BigUint::from(a);
        for j in (d..=n_max).step_by(d) {
            sigma[j] += &contrib;
        }
    }
    let mut totals = vec![BigUint::zero(); n_max + 1];
    totals[0] = BigUint::one();
    for n in 1..=n_max {
        let mut acc = BigUint::zero();
        for j in 1..=n {
            if !sigma[j].is_zero() {
                acc += &sigma[j] * &totals[n - j];
            }
        }
        totals[n] = acc / BigUint::from(n as u64);
    }
    Ok(totals)
}

/// The sparse polynomials N·c_N(z) = Σ_{m|N} m·a_m·z^{N/m} for N = 1..n_max,
/// each stored as (power, coefficient) pairs.
fn log_coefficients<T: Clone>(
    n_max: usize,
    weight: impl Fn(u64) -> Option<T>,
    scale: impl Fn(u64, T) -> T,
) -> Vec<Vec<(usize, T)>> {
    let mut out: Vec<Vec<(usize, T)>> = vec![Vec::new(); n_max + 1];
    for m in 1..=n_max {
        let Some(a) = weight(m as u64) else { continue };
        let term = scale(m as u64, a);
        for (power, big_n) in (m..=n_max).step_by(m).enumerate() {
            out[big_n].push((power + 1, term.clone()));
        }
    }
    out
}

/// Q_0..Q_{n_max} with floating coefficients from the log-exp recurrence.
pub fn expand_exp_recurrence(seq: &WeightSequence, n_max: usize) -> Vec<CoeffPoly> {
    let logs = log_coefficients(
        n_max,
        |m| {
            let w = seq.weight_at(m);
            (w != 0.0).then_some(w)
        },
        |m, a| m as f64 * a,
    );
    let mut polys: Vec<Vec<f64>> = Vec::with_capacity(n_max + 1);
    polys.push(vec![1.0]);
    for n in 1..=n_max {
        let mut acc = vec![0.0; n + 1];
        for (j, terms) in logs.iter().enumerate().take(n + 1).skip(1) {
            let prev = &polys[n - j];
            for &(power, coeff) in terms {
                for (l, &p) in prev.iter().enumerate() {
                    acc[l + power] += coeff * p;
                }
            }
        }
        let inv = 1.0 / n as f64;
        acc.iter_mut().for_each(|c| *c *= inv);
        polys.push(acc);
    }
    polys
        .into_iter()
        .enumerate()
        .map(|(n, coeffs)| CoeffPoly {
            n,
            coeffs: Coefficients::Float(coeffs),
        })
        .collect()
}

/// Same recurrence over the rationals, for families whose weights are rational.
pub fn expand_exp_recurrence_exact(seq: &WeightSequence, n_max: usize) -> Result<Vec<CoeffPoly>> {
    if !seq.has_rational_weights() {
        return Err(Error::UnsupportedFamily(format!(
            "{seq}: weights are not rational"
        )));
    }
    let exponent = seq.exponent() as u32;
    let logs = log_coefficients(
        n_max,
        |m| {
            let chi = seq.pattern_at(m);
            if chi == 0.0 {
                return None;
            }
            let chi = BigRational::from_float(chi)?;
            Some(chi * BigRational::from_integer(BigInt::from(m).pow(exponent)))
        },
        |m, a| a * BigRational::from_integer(BigInt::from(m)),
    );
    let mut polys: Vec<Vec<BigRational>> = vec![vec![BigRational::one()]];
    for n in 1..=n_max {
        let mut acc = vec![BigRational::zero(); n + 1];
        for (j, terms) in logs.iter().enumerate().take(n + 1).skip(1) {
            let prev = &polys[n - j];
            for (power, coeff) in terms {
                for (l, p) in prev.iter().enumerate() {
                    if !p.is_zero() {
                        acc[l + power] += coeff * p;
                    }
                }
            }
        }
        let inv = BigRational::new(BigInt::one(), BigInt::from(n));
        acc.iter_mut().for_each(|c| *c *= &inv);
        polys.push(acc);
    }
    Ok(polys
        .into_iter()
        .enumerate()
        .map(|(n, coeffs)| CoeffPoly {
            n,
            coeffs: Coefficients::Rational(coeffs),
        })
        .collect())
}

/// Q_0(z)..Q_{n_max}(z) in O(n²) scalar operations.
pub fn eval_exact_all(seq: &WeightSequence, z: Complex64, n_max: usize) -> Vec<Complex64> {
    let mut zpow = Vec::with_capacity(n_max + 1);
    zpow.push(Complex64::new(1.0, 0.0));
    for i in 1..=n_max {
        zpow.push(zpow[i - 1] * z);
    }
    // j·c_j(z)
    let mut jc = vec![Complex64::new(0.0, 0.0); n_max + 1];
    for m in 1..=n_max {
        let a = seq.weight_at(m as u64);
        if a == 0.0 {
            continue;
        }
        let ma = m as f64 * a;
        for (power, j) in (m..=n_max).step_by(m).enumerate() {
            jc[j] += zpow[power + 1] * ma;
        }
    }
    let mut q = Vec::with_capacity(n_max + 1);
    q.push(Complex64::new(1.0, 0.0));
    for n in 1..=n_max {
        let mut acc = Complex64::new(0.0, 0.0);
        for j in 1..=n {
            acc += jc[j] * q[n - j];
        }
        q.push(acc / n as f64);
    }
    q
}

/// Q_n(z) via the scalar log-exp recurrence.
pub fn eval_exact(seq: &WeightSequence, z: Complex64, n: usize) -> Complex64 {
    eval_exact_all(seq, z, n)[n]
}

/// Knobs for [`contour_extract`]. `None` selects the defaults: radius
/// e^{−Re L/n^{1/(s0+1)}} from the dominant arc at z, and max(8n, 256)
/// trapezoid nodes doubled until successive values agree to 1e−9.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ContourOptions {
    pub radius: Option<f64>,
    pub points: Option<usize>,
}

const LOG_TAIL: f64 = 1e-13;
const MAX_FACTORS: usize = 50_000_000;
const MAX_POINTS: usize = 1 << 22;
const DOUBLING_TOL: f64 = 1e-9;

/// Contour radius e^{−2π α_n} with α_n = Re L_{p,q}(z) / (2π n^{1/(s0+1)}).
pub fn default_radius(seq: &WeightSequence, z: Complex64, n: usize) -> f64 {
    let growth = phases::leading_growth(seq, z, phases::DEFAULT_K_MAX)
        .ok()
        .filter(|g| *g > 1e-6)
        .unwrap_or(1.0);
    (-growth / (n as f64).powf(1.0 / (seq.s0() + 1.0))).exp()
}

/// Number of factors M in ln P = −Σ_{m≤M} a_m ln(1 − z q^m) needed for a tail
/// below 1e−13 on |q| = radius.
fn factor_count(seq: &WeightSequence, z: Complex64, radius: f64) -> Result<usize> {
    let amp = (0..seq.period())
        .map(|r| seq.pattern_at(r).abs())
        .fold(0.0, f64::max);
    let t = seq.exponent().max(0.0);
    let zr = z.norm();
    if amp == 0.0 || zr == 0.0 {
        return Ok(0);
    }
    let mut m = 1usize;
    while m <= MAX_FACTORS {
        let m1 = (m + 1) as f64;
        let ratio = radius * ((m1 + 1.0) / m1).powf(t);
        let head = zr * radius.powf(m1);
        if ratio < 1.0 && head < 1.0 {
            let bound = amp * m1.powf(t) * head / ((1.0 - ratio) * (1.0 - head));
            if bound < LOG_TAIL {
                return Ok(m);
            }
        }
        m = if m < 256 { m + 1 } else { m + m / 16 };
    }
    Err(Error::Convergence(format!(
        "ln P tail bound not met on |q| = {radius}"
    )))
}

/// The first `factors` weights, flagged when all are integers so the
/// factors can be multiplied instead of logged one by one.
struct Factors {
    weights: Vec<f64>,
    integer: bool,
}

impl Factors {
    fn new(seq: &WeightSequence, count: usize) -> Self {
        let weights: Vec<f64> = (1..=count as u64).map(|m| seq.weight_at(m)).collect();
        let integer = weights
            .iter()
            .all(|a| a.fract() == 0.0 && a.abs() < i32::MAX as f64);
        Self { weights, integer }
    }

    /// ln P(z, q) up to a multiple of 2πi, which the caller exponentiates.
    fn log_product(&self, z: Complex64, q: Complex64) -> Complex64 {
        const CHUNK: usize = 32;
        let one = Complex64::new(1.0, 0.0);
        let mut total = Complex64::new(0.0, 0.0);
        let mut qm = one;
        if self.integer {
            let mut acc = one;
            for (i, &a) in self.weights.iter().enumerate() {
                qm *= q;
                if a != 0.0 {
                    acc *= (one - z * qm).powi(a as i32);
                }
                if i % CHUNK == CHUNK - 1 {
                    total -= acc.ln();
                    acc = one;
                }
            }
            total - acc.ln()
        } else {
            for &a in &self.weights {
                qm *= q;
                if a != 0.0 {
                    total -= (one - z * qm).ln() * a;
                }
            }
            total
        }
    }
}

/// Mean of P(z, q_k) q_k^{−n} over the nodes k ≡ offset (mod stride) of an
/// N-point grid on |q| = radius, returned as a sum (not yet divided by the count).
fn trapezoid_sum(
    factors: &Factors,
    z: Complex64,
    n: usize,
    radius: f64,
    total_points: usize,
    offset: usize,
    stride: usize,
) -> Complex64 {
    let log_radius = radius.ln();
    (offset..total_points)
        .into_par_iter()
        .step_by(stride)
        .map(|k| {
            let theta = std::f64::consts::TAU * k as f64 / total_points as f64;
            let q = Complex64::from_polar(radius, theta);
            let log_p = factors.log_product(z, q);
            (log_p - Complex64::new(n as f64 * log_radius, n as f64 * theta)).exp()
        })
        .sum()
}

/// Q_n(z) = (1/2πi) ∮ P(z, q) q^{−n−1} dq by the trapezoid rule on |q| = radius.
pub fn contour_extract(
    seq: &WeightSequence,
    z: Complex64,
    n: usize,
    options: ContourOptions,
) -> Result<Complex64> {
    if !(z.norm() < 1.0) {
        return Err(Error::Domain(format!(
            "contour_extract: |z| = {} must be < 1",
            z.norm()
        )));
    }
    if n == 0 {
        return Ok(Complex64::new(1.0, 0.0));
    }
    let radius = match options.radius {
        Some(r) if r > 0.0 && r < 1.0 => r,
        Some(r) => return Err(Error::Domain(format!("contour radius {r} outside (0, 1)"))),
        None => default_radius(seq, z, n),
    };
    let factors = Factors::new(seq, factor_count(seq, z, radius)?);
    if let Some(points) = options.points {
        if points < 8 * n {
            return Err(Error::Domain(format!(
                "{points} nodes is fewer than 8n = {}",
                8 * n
            )));
        }
        return Ok(trapezoid_sum(&factors, z, n, radius, points, 0, 1) / points as f64);
    }
    let mut points = (8 * n).max(256);
    let mut sum = trapezoid_sum(&factors, z, n, radius, points, 0, 1);
    let mut value = sum / points as f64;
    while points < MAX_POINTS {
        // refine: the doubled grid reuses every existing node
        let odd = trapezoid_sum(&factors, z, n, radius, 2 * points, 1, 2);
        sum += odd;
        points *= 2;
        let refined = sum / points as f64;
        if (refined - value).norm() <= DOUBLING_TOL * refined.norm() {
            return Ok(refined);
        }
        value = refined;
    }
    Err(Error::Convergence(format!(
        "trapezoid rule did not settle for n = {n}"
    )))
}
