//! Weight sequences a_m and the Dirichlet data derived from them.
//!
//! Every supported family has the shape a_m = χ(m mod P)·m^t with χ periodic,
//! so each twisted series D_{h,k}(s) = Σ e^{2πi hm/k} a_m m^{-s} is a finite
//! combination of Hurwitz zeta values and continues meromorphically with a
//! single simple pole at s0 = t + 1.
//!
//! Admissibility beyond the structural conditions (growth of the g-function,
//! uniform decay of Re L_{h,k} in k) is not checked here; callers supplying
//! arbitrary periodic weights take responsibility for it.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::fmt;
use std::sync::{Arc, OnceLock, RwLock};

use num_complex::Complex64;
use num_integer::Integer;

use crate::error::{Error, Result};
use crate::special::hurwitz_zeta;

/// Continuation abscissa used when none is supplied.
pub const DEFAULT_SIGMA0: f64 = -0.99;

/// Distance from the pole below which [`dirichlet_value`] refuses to evaluate.
const POLE_GUARD: f64 = 1e-12;

const DERIV_STEP: f64 = 1e-4;

/// The built-in weight families.
#[derive(Debug, Clone, PartialEq)]
pub enum Family {
    /// a_m = 1.
    Constant,
    /// a_m = m^{s0-1}.
    Power { s0: f64 },
    /// a_m = 1 when m ≡ a (mod j), else 0.
    ArithmeticProgression { a: u64, j: u64 },
    /// a_m = weights[m mod period].
    Periodic { weights: Vec<f64> },
    /// a_m = base_m · m^{s-1}.
    Scaled { base: Box<Family>, shift: f64 },
}

/// Why a family satisfies the convergence/continuation/growth conditions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Admissibility {
    /// Periodic weights: s0 = 1, any σ0 in (−1, 0).
    Periodic,
    /// Periodic weights times m^{t}: s0 = t + 1.
    ScaledPeriodic { exponent: f64 },
}

/// A weight family together with its pole location s0 and continuation
/// abscissa σ0.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightSequence {
    family: Family,
    s0: f64,
    sigma0: f64,
    /// χ(r) for r = 0..period, indexed by m mod period.
    pattern: Vec<f64>,
    /// t in a_m = χ(m)·m^t.
    exponent: f64,
}

impl WeightSequence {
    pub fn new(family: Family) -> Result<Self> {
        let (pattern, exponent) = reduce(&family)?;
        let s0 = exponent + 1.0;
        if !(s0 > 0.0) || !s0.is_finite() {
            return Err(Error::Config(format!(
                "family has pole s0 = {s0}, must be positive"
            )));
        }
        Ok(Self {
            family,
            s0,
            sigma0: DEFAULT_SIGMA0,
            pattern,
            exponent,
        })
    }

    pub fn constant() -> Self {
        Self::new(Family::Constant).expect("constant family is valid")
    }

    pub fn power(s0: f64) -> Result<Self> {
        Self::new(Family::Power { s0 })
    }

    pub fn arithmetic_progression(a: u64, j: u64) -> Result<Self> {
        Self::new(Family::ArithmeticProgression { a, j })
    }

    pub fn periodic(weights: Vec<f64>) -> Result<Self> {
        Self::new(Family::Periodic { weights })
    }

    pub fn scaled(base: WeightSequence, shift: f64) -> Result<Self> {
        Self::new(Family::Scaled {
            base: Box::new(base.family),
            shift,
        })
    }

    /// Replace the continuation abscissa; must lie in (−1, 0).
    pub fn with_sigma0(mut self, sigma0: f64) -> Result<Self> {
        if !(sigma0 > -1.0 && sigma0 < 0.0) {
            return Err(Error::Config(format!("sigma0 = {sigma0} outside (-1, 0)")));
        }
        self.sigma0 = sigma0;
        Ok(self)
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    pub fn s0(&self) -> f64 {
        self.s0
    }

    pub fn sigma0(&self) -> f64 {
        self.sigma0
    }

    /// Period of the underlying χ.
    pub fn period(&self) -> u64 {
        self.pattern.len() as u64
    }

    /// Exponent t in a_m = χ(m)·m^t.
    pub fn exponent(&self) -> f64 {
        self.exponent
    }

    pub fn admissibility(&self) -> Admissibility {
        if self.exponent == 0.0 {
            Admissibility::Periodic
        } else {
            Admissibility::ScaledPeriodic {
                exponent: self.exponent,
            }
        }
    }

    /// χ(m mod period).
    pub fn pattern_at(&self, m: u64) -> f64 {
        self.pattern[(m % self.period()) as usize]
    }

    /// a_m for m ≥ 1.
    pub fn weight_at(&self, m: u64) -> f64 {
        let chi = self.pattern_at(m);
        if chi == 0.0 || self.exponent == 0.0 {
            chi
        } else {
            chi * (m as f64).powf(self.exponent)
        }
    }

    /// a_m as a nonnegative integer, if it is one.
    pub fn integer_weight(&self, m: u64) -> Option<u64> {
        let w = self.weight_at(m);
        let rounded = w.round();
        if w >= 0.0 && (w - rounded).abs() <= 1e-9 * rounded.max(1.0) && rounded < 9.0e15 {
            Some(rounded as u64)
        } else {
            None
        }
    }

    /// True when every a_m is a nonnegative integer.
    pub fn has_integer_weights(&self) -> bool {
        let integer_exponent = self.exponent >= 0.0 && self.exponent.fract() == 0.0;
        integer_exponent && self.pattern.iter().all(|&w| w >= 0.0 && w.fract() == 0.0)
    }

    /// True when every a_m is rational (hence representable exactly).
    pub fn has_rational_weights(&self) -> bool {
        self.exponent >= 0.0 && self.exponent.fract() == 0.0
    }

    fn cache_key(&self, k: u64) -> CacheKey {
        CacheKey {
            pattern: self.pattern.iter().map(|w| w.to_bits()).collect(),
            exponent: self.exponent.to_bits(),
            k,
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Family::Constant => write!(f, "constant"),
            Family::Power { s0 } => write!(f, "power:s0={s0}"),
            Family::ArithmeticProgression { a, j } => write!(f, "ap:a={a},j={j}"),
            Family::Periodic { weights } => {
                write!(f, "periodic:")?;
                for (i, w) in weights.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{w}")?;
                }
                Ok(())
            }
            Family::Scaled { base, shift } => write!(f, "scaled:base={base};s={shift}"),
        }
    }
}

impl fmt::Display for WeightSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.family.fmt(f)
    }
}

/// Reduce a family to (χ pattern, exponent t).
fn reduce(family: &Family) -> Result<(Vec<f64>, f64)> {
    match family {
        Family::Constant => Ok((vec![1.0], 0.0)),
        Family::Power { s0 } => {
            if !(*s0 > 0.0) || !s0.is_finite() {
                return Err(Error::Config(format!(
                    "power family needs s0 > 0, got {s0}"
                )));
            }
            Ok((vec![1.0], s0 - 1.0))
        }
        Family::ArithmeticProgression { a, j } => {
            if *j < 2 {
                return Err(Error::Config(format!(
                    "arithmetic progression needs j > 1, got {j}"
                )));
            }
            if *a == 0 || a.gcd(j) != 1 {
                return Err(Error::Config(format!(
                    "arithmetic progression needs gcd(a, j) = 1, got a={a}, j={j}"
                )));
            }
            let mut pattern = vec![0.0; *j as usize];
            pattern[(a % j) as usize] = 1.0;
            Ok((pattern, 0.0))
        }
        Family::Periodic { weights } => {
            if weights.is_empty() {
                return Err(Error::Config(
                    "periodic family needs at least one weight".into(),
                ));
            }
            if weights.iter().any(|w| !w.is_finite()) {
                return Err(Error::Config("periodic weights must be finite".into()));
            }
            Ok((weights.clone(), 0.0))
        }
        Family::Scaled { base, shift } => {
            if !(*shift > 0.0) || !shift.is_finite() {
                return Err(Error::Config(format!(
                    "scaled family needs s > 0, got {shift}"
                )));
            }
            let (pattern, exponent) = reduce(base)?;
            Ok((pattern, exponent + shift - 1.0))
        }
    }
}

/// e^{2πi·num/den}, with the fraction reduced first so the angle stays small.
pub(crate) fn unit_root(num: i64, den: u64) -> Complex64 {
    let r = num.rem_euclid(den as i64) as u64;
    if (4 * r).is_multiple_of(den) {
        return match 4 * r / den {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        };
    }
    Complex64::from_polar(1.0, 2.0 * PI * r as f64 / den as f64)
}

fn reduce_h(h: i64, k: u64) -> Result<u64> {
    if k == 0 {
        return Err(Error::Domain("modulus k must be positive".into()));
    }
    let r = h.rem_euclid(k as i64) as u64;
    Ok(if r == 0 { k } else { r })
}

/// The meromorphic continuation of D_{h,k}(s) = Σ_m e^{2πi hm/k} a_m m^{-s}.
///
/// With P = lcm(k, period) and a_m = χ(m)m^t,
/// D_{h,k}(s) = Σ_{r=1}^{P} χ(r) e^{2πi hr/k} P^{t−s} ζ(s−t, r/P).
/// `h` is reduced mod k; h ≡ 0 is the trivial character.
pub fn dirichlet_value(seq: &WeightSequence, h: i64, k: u64, s: f64) -> Result<Complex64> {
    let h = reduce_h(h, k)?;
    if (s - seq.s0).abs() < POLE_GUARD {
        return Err(Error::Pole(format!(
            "D_{{{h},{k}}}(s) at s = {s} (s0 = {})",
            seq.s0
        )));
    }
    let period = seq.period();
    let modulus = k.lcm(&period);
    let scale = (modulus as f64).powf(seq.exponent - s);
    let mut total = Complex64::new(0.0, 0.0);
    for r in 1..=modulus {
        let chi = seq.pattern_at(r);
        if chi == 0.0 {
            continue;
        }
        let zeta = hurwitz_zeta(s - seq.exponent, r as f64 / modulus as f64)?;
        total += unit_root((h * r % k) as i64, k) * (chi * zeta);
    }
    Ok(total * scale)
}

/// Residue A_{h,k} of D_{h,k}(s) at s = s0: (1/P) Σ_{r=1}^{P} χ(r) e^{2πi hr/k}.
pub fn dirichlet_residue(seq: &WeightSequence, h: i64, k: u64) -> Result<Complex64> {
    let h = reduce_h(h, k)?;
    let modulus = k.lcm(&seq.period());
    let mut total = Complex64::new(0.0, 0.0);
    for r in 1..=modulus {
        let chi = seq.pattern_at(r);
        if chi != 0.0 {
            total += unit_root((h * r % k) as i64, k) * chi;
        }
    }
    Ok(total / modulus as f64)
}

/// D_{h,k}(0), A_{h,k} for h = 1..k and their discrete Fourier coefficients
///
/// D_{h,k}(0) = Σ_{j∈Z_k} e^{2πi hj/k} b(j),   A_{h,k} = Σ_j e^{2πi hj/k} c(j).
#[derive(Debug, Clone, PartialEq)]
pub struct DirichletData {
    pub k: u64,
    /// D_{h,k}(0) at index h − 1.
    pub values_at_zero: Vec<Complex64>,
    /// A_{h,k} at index h − 1.
    pub residues: Vec<Complex64>,
    /// b(j) at index j.
    pub b: Vec<Complex64>,
    /// c(j) at index j.
    pub c: Vec<Complex64>,
}

impl DirichletData {
    /// D_{h,k}(0) for any integer h.
    pub fn value_at_zero(&self, h: i64) -> Complex64 {
        self.values_at_zero[(reduce_h(h, self.k).unwrap() - 1) as usize]
    }

    /// A_{h,k} for any integer h.
    pub fn residue(&self, h: i64) -> Complex64 {
        self.residues[(reduce_h(h, self.k).unwrap() - 1) as usize]
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
struct CacheKey {
    pattern: Vec<u64>,
    exponent: u64,
    k: u64,
}

type Cache = RwLock<HashMap<CacheKey, Arc<DirichletData>>>;

fn cache() -> &'static Cache {
    static CACHE: OnceLock<Cache> = OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(HashMap::new()))
}

/// Fourier data for modulus k, computed once per (family, k) and shared.
pub fn fourier_coeffs(seq: &WeightSequence, k: u64) -> Result<Arc<DirichletData>> {
    if k == 0 {
        return Err(Error::Domain("modulus k must be positive".into()));
    }
    let key = seq.cache_key(k);
    if let Some(hit) = cache().read().expect("dirichlet cache poisoned").get(&key) {
        return Ok(Arc::clone(hit));
    }
    let data = Arc::new(compute_fourier(seq, k)?);
    let mut guard = cache().write().expect("dirichlet cache poisoned");
    Ok(Arc::clone(guard.entry(key).or_insert(data)))
}

fn compute_fourier(seq: &WeightSequence, k: u64) -> Result<DirichletData> {
    let hs = 1..=k as i64;
    let values_at_zero = hs
        .clone()
        .map(|h| dirichlet_value(seq, h, k, 0.0))
        .collect::<Result<Vec<_>>>()?;
    let residues = hs
        .map(|h| dirichlet_residue(seq, h, k))
        .collect::<Result<Vec<_>>>()?;
    let b = inverse_dft(&values_at_zero, k);
    let c = inverse_dft(&residues, k);
    Ok(DirichletData {
        k,
        values_at_zero,
        residues,
        b,
        c,
    })
}

/// x(j) = (1/k) Σ_{h=1}^{k} e^{−2πi hj/k} X_h.
fn inverse_dft(values: &[Complex64], k: u64) -> Vec<Complex64> {
    (0..k)
        .map(|j| {
            let sum: Complex64 = values
                .iter()
                .enumerate()
                .map(|(i, v)| unit_root(-(((i as u64 + 1) * j % k) as i64), k) * v)
                .sum();
            sum / k as f64
        })
        .collect()
}

/// D'(0) for the untwisted series (h = k = 1) by Richardson-extrapolated
/// central differences at steps 1e−4 and 5e−5.
pub fn dirichlet_deriv_zero(seq: &WeightSequence) -> Result<f64> {
    let central = |eps: f64| -> Result<f64> {
        let up = dirichlet_value(seq, 1, 1, eps)?;
        let down = dirichlet_value(seq, 1, 1, -eps)?;
        Ok((up - down).re / (2.0 * eps))
    };
    let coarse = central(DERIV_STEP)?;
    let fine = central(DERIV_STEP / 2.0)?;
    Ok((4.0 * fine - coarse) / 3.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() <= tol * b.norm().max(1.0)
    }

    #[test]
    fn weights_by_family() {
        assert_eq!(WeightSequence::power(2.0).unwrap().weight_at(3), 3.0);
        assert_eq!(
            WeightSequence::arithmetic_progression(1, 2)
                .unwrap()
                .weight_at(4),
            0.0
        );
        assert_eq!(
            WeightSequence::arithmetic_progression(1, 2)
                .unwrap()
                .weight_at(5),
            1.0
        );
        assert_eq!(WeightSequence::constant().weight_at(7), 1.0);
        let p = WeightSequence::periodic(vec![1.0, 0.0, 2.0]).unwrap();
        assert_eq!(
            (p.weight_at(3), p.weight_at(4), p.weight_at(5)),
            (1.0, 0.0, 2.0)
        );
        let sc = WeightSequence::scaled(WeightSequence::arithmetic_progression(1, 2).unwrap(), 1.5)
            .unwrap();
        assert!((sc.weight_at(9) - 3.0).abs() < 1e-15);
        assert_eq!(sc.weight_at(4), 0.0);
        assert_eq!(sc.s0(), 1.5);
    }

    #[test]
    fn invalid_families_rejected() {
        assert!(WeightSequence::arithmetic_progression(2, 4).is_err());
        assert!(WeightSequence::arithmetic_progression(1, 1).is_err());
        assert!(WeightSequence::power(0.0).is_err());
        assert!(WeightSequence::power(-1.0).is_err());
        assert!(WeightSequence::periodic(vec![]).is_err());
        assert!(WeightSequence::scaled(WeightSequence::constant(), 0.0).is_err());
        assert!(WeightSequence::scaled(WeightSequence::power(0.3).unwrap(), 0.5).is_err());
        assert!(WeightSequence::constant().with_sigma0(-1.0).is_err());
        assert!(WeightSequence::constant().with_sigma0(0.0).is_err());
        assert!(WeightSequence::constant().with_sigma0(-0.5).is_ok());
    }

    #[test]
    fn constant_values() {
        let seq = WeightSequence::constant();
        assert!(close(
            dirichlet_value(&seq, 1, 1, 0.0).unwrap(),
            Complex64::new(-0.5, 0.0),
            1e-13
        ));
        assert!(close(
            dirichlet_residue(&seq, 1, 1).unwrap(),
            Complex64::new(1.0, 0.0),
            1e-15
        ));
        let data = fourier_coeffs(&seq, 1).unwrap();
        assert!(close(data.b[0], Complex64::new(-0.5, 0.0), 1e-13));
        assert!(close(data.c[0], Complex64::new(1.0, 0.0), 1e-15));
    }

    #[test]
    fn power_values() {
        for &s0 in &[0.5, 2.0, 3.0] {
            let seq = WeightSequence::power(s0).unwrap();
            let zeta = hurwitz_zeta(1.0 - s0, 1.0).unwrap();
            let d11 = dirichlet_value(&seq, 1, 1, 0.0).unwrap();
            let d12 = dirichlet_value(&seq, 1, 2, 0.0).unwrap();
            assert!(close(d11, Complex64::new(zeta, 0.0), 1e-12));
            assert!(close(
                d12,
                Complex64::new((2f64.powf(s0) - 1.0) * zeta, 0.0),
                1e-12
            ));
            assert!(dirichlet_residue(&seq, 1, 2).unwrap().norm() < 1e-15);
            let data = fourier_coeffs(&seq, 1).unwrap();
            assert!(close(data.c[0], Complex64::new(1.0, 0.0), 1e-15));
        }
    }

    #[test]
    fn progression_residue() {
        for j in 2..7u64 {
            for a in 1..j {
                if a.gcd(&j) != 1 {
                    continue;
                }
                let seq = WeightSequence::arithmetic_progression(a, j).unwrap();
                let res = dirichlet_residue(&seq, j as i64, j).unwrap();
                assert!(close(res, Complex64::new(1.0 / j as f64, 0.0), 1e-15));
            }
        }
    }

    #[test]
    fn pole_guard() {
        let seq = WeightSequence::power(2.0).unwrap();
        assert!(matches!(
            dirichlet_value(&seq, 1, 1, 2.0),
            Err(Error::Pole(_))
        ));
        assert!(matches!(
            dirichlet_value(&seq, 1, 3, 2.0 + 1e-13),
            Err(Error::Pole(_))
        ));
    }

    #[test]
    fn derivative_at_zero() {
        let d = dirichlet_deriv_zero(&WeightSequence::constant()).unwrap();
        assert!((d + 0.5 * (2.0 * PI).ln()).abs() < 1e-9);
        let d = dirichlet_deriv_zero(&WeightSequence::power(2.0).unwrap()).unwrap();
        assert!((d + 0.165_421_143_700_451).abs() < 1e-9);
        let base = WeightSequence::arithmetic_progression(1, 3).unwrap();
        let same = WeightSequence::scaled(base.clone(), 1.0).unwrap();
        assert_eq!(
            dirichlet_deriv_zero(&base).unwrap(),
            dirichlet_deriv_zero(&same).unwrap()
        );
    }

    #[test]
    fn dft_round_trip_k6() {
        let seq = WeightSequence::constant();
        let data = fourier_coeffs(&seq, 6).unwrap();
        for h in 1..=6i64 {
            let d: Complex64 = (0..6)
                .map(|j| unit_root(h * j, 6) * data.b[j as usize])
                .sum();
            assert!(close(d, data.value_at_zero(h), 1e-10));
        }
    }

    #[test]
    fn cache_returns_shared_data() {
        let seq = WeightSequence::arithmetic_progression(2, 5).unwrap();
        let a = fourier_coeffs(&seq, 7).unwrap();
        let b = fourier_coeffs(&seq, 7).unwrap();
        assert!(Arc::ptr_eq(&a, &b));
    }

    #[test]
    fn display_round_trips_shape() {
        let sc = WeightSequence::scaled(WeightSequence::arithmetic_progression(1, 2).unwrap(), 1.5)
            .unwrap();
        assert_eq!(sc.to_string(), "scaled:base=ap:a=1,j=2;s=1.5");
        assert_eq!(
            WeightSequence::periodic(vec![1.0, 0.0, 2.5])
                .unwrap()
                .to_string(),
            "periodic:1,0,2.5"
        );
    }
}
