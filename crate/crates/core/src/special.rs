//! Real-order special functions on the open unit disk.
//!
//! Hurwitz zeta (Euler–Maclaurin, plus an independent Hasse-series
//! evaluator), polylogarithm and Lerch phi by direct summation, Γ on the
//! positive axis and principal fractional roots.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Largest modulus accepted by [`polylog`] and [`lerch_phi`].
pub const DISK_CUTOFF: f64 = 1.0 - 1e-6;

/// Tail bound used to truncate the power series.
const SERIES_TAIL: f64 = 1e-13;

/// Terms summed explicitly before switching to the Euler–Maclaurin tail.
const EM_TERMS: usize = 16;

/// B_2, B_4, ..., B_12 divided by (2j)!.
const EM_COEFFS: [f64; 6] = [
    1.0 / 12.0,               // B2 / 2!
    -1.0 / 720.0,             // B4 / 4!
    1.0 / 30240.0,            // B6 / 6!
    -1.0 / 1209600.0,         // B8 / 8!
    1.0 / 47900160.0,         // B10 / 10!
    -691.0 / 1307674368000.0, // B12 / 12!
];

/// Hurwitz zeta ζ(s, ν) = Σ_{n≥0} (n+ν)^{-s}, continued to all real s ≠ 1.
///
/// Sixteen leading terms are summed directly; the remainder is the integral
/// term, the half-term and Bernoulli corrections through B_12.
pub fn hurwitz_zeta(s: f64, nu: f64) -> Result<f64> {
    if s == 1.0 {
        return Err(Error::Pole("hurwitz_zeta at s = 1".into()));
    }
    if !(nu > 0.0 && nu <= 1.0) || !s.is_finite() {
        return Err(Error::Domain(format!(
            "hurwitz_zeta: nu = {nu} outside (0, 1]"
        )));
    }
    let mut sum = 0.0;
    for n in 0..EM_TERMS {
        sum += (n as f64 + nu).powf(-s);
    }
    let a = EM_TERMS as f64 + nu;
    let a_pow = a.powf(-s);
    sum += a * a_pow / (s - 1.0);
    sum += 0.5 * a_pow;

    // rising factorial s(s+1)...(s+2j-2) times a^{-s-2j+1}
    let mut rising = s;
    let mut power = a_pow / a;
    let inv_a2 = 1.0 / (a * a);
    for (j, coeff) in EM_COEFFS.iter().enumerate() {
        sum += coeff * rising * power;
        let m = 2.0 * j as f64;
        rising *= (s + m + 1.0) * (s + m + 2.0);
        power *= inv_a2;
    }
    Ok(sum)
}

/// Shift applied before the Hasse series: ζ(s,ν) = Σ_{m<M}(m+ν)^{-s} + ζ(s, ν+M).
/// A large shift makes the forward differences decay factorially.
const HASSE_SHIFT: usize = 64;
const HASSE_MAX_TERMS: usize = 400;

/// Hurwitz zeta via Hasse's globally convergent series
///
/// ζ(s,ν) = 1/(s−1) Σ_{n≥0} 1/(n+1) Σ_{k=0}^{n} (−1)^k C(n,k) (ν+k)^{1−s}.
///
/// Independent of [`hurwitz_zeta`]; kept as a verification oracle. For
/// s a non-positive integer the inner differences vanish beyond n = 1 − s and
/// the sum is finite. Otherwise the series is applied to ζ(s, ν+64) after
/// peeling off 64 explicit terms, and summed until the outer term falls below
/// 1e−14 of the running total.
pub fn hurwitz_zeta_hasse(s: f64, nu: f64) -> Result<f64> {
    if s == 1.0 {
        return Err(Error::Pole("hurwitz_zeta_hasse at s = 1".into()));
    }
    if !(nu > 0.0) || !s.is_finite() {
        return Err(Error::Domain(format!(
            "hurwitz_zeta_hasse: nu = {nu} must be positive"
        )));
    }
    let exponent = 1.0 - s;
    if s <= 0.0 && s.fract() == 0.0 {
        let terms = exponent as usize + 1;
        return Ok(hasse_outer(nu, exponent, Some(terms)).0 / (s - 1.0));
    }
    let mut head = 0.0;
    for m in 0..HASSE_SHIFT {
        head += (m as f64 + nu).powf(-s);
    }
    let (tail, converged) = hasse_outer(nu + HASSE_SHIFT as f64, exponent, None);
    if !converged {
        return Err(Error::Convergence(format!(
            "Hasse series at s = {s}, nu = {nu}"
        )));
    }
    Ok(head + tail / (s - 1.0))
}

/// Σ_n 1/(n+1) Δ^n[(nu + ·)^{exponent}](0), with Δ the forward difference.
fn hasse_outer(nu: f64, exponent: f64, fixed_terms: Option<usize>) -> (f64, bool) {
    let limit = fixed_terms.unwrap_or(HASSE_MAX_TERMS);
    let mut values: Vec<f64> = Vec::with_capacity(limit);
    let mut total = 0.0;
    for n in 0..limit {
        values.push((nu + n as f64).powf(exponent));
        // Σ_k (−1)^k C(n,k) f(k) with binomials built incrementally
        let mut binom = 1.0;
        let mut inner = 0.0;
        for (k, v) in values.iter().enumerate() {
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            inner += sign * binom * v;
            binom = binom * (n - k) as f64 / (k + 1) as f64;
        }
        let term = inner / (n + 1) as f64;
        total += term;
        if fixed_terms.is_none() && n > 0 && term.abs() < 1e-14 * total.abs() {
            return (total, true);
        }
    }
    (total, fixed_terms.is_some())
}

/// Number of terms needed so the geometric tail of Σ z^n/(n+ν)^s is below
/// [`SERIES_TAIL`] (scaled by |z| when |z| < 1, so small arguments keep
/// their relative accuracy).
fn truncation(r: f64, s: f64, nu: f64) -> usize {
    if r == 0.0 {
        return 1;
    }
    let mut n: usize = 1;
    let log_r = r.ln();
    let log_gap = (1.0 - r).ln();
    let target = SERIES_TAIL.ln() + log_r.min(0.0);
    loop {
        let bound = (n as f64 + 1.0) * log_r - log_gap - s * (n as f64 + nu).ln();
        if bound < target {
            return n;
        }
        n = if n < 64 { n + 1 } else { n + n / 8 };
    }
}

/// Terms of Σ z^n n^{-s} needed at modulus r (same policy as [`polylog`]).
pub(crate) fn series_terms(r: f64, s: f64) -> usize {
    truncation(r, s, 0.0)
}

fn check_disk(z: Complex64, s: f64, what: &str) -> Result<f64> {
    let r = z.norm();
    if !(r <= DISK_CUTOFF) {
        return Err(Error::Domain(format!("{what}: |z| = {r} exceeds 1 - 1e-6")));
    }
    if !(s > 0.0) {
        return Err(Error::Domain(format!(
            "{what}: order s = {s} must be positive"
        )));
    }
    Ok(r)
}

/// Σ_{n≥start} z^n (n + shift)^{-s} summed to `terms`, recomputing z^n by
/// repeated squaring periodically to keep the power accurate on long runs.
fn power_series(z: Complex64, s: f64, shift: f64, start: usize, terms: usize) -> Complex64 {
    let mut sum = Complex64::new(0.0, 0.0);
    let mut zn = z.powu(start as u32);
    let integer_order = s.fract() == 0.0 && s <= 16.0;
    for n in start..=terms {
        if n > start && (n - start).is_multiple_of(256) {
            zn = z.powu(n as u32);
        }
        let base = n as f64 + shift;
        let weight = if integer_order {
            base.powi(-(s as i32))
        } else {
            base.powf(-s)
        };
        sum += zn * weight;
        zn *= z;
    }
    sum
}

/// Polylogarithm Li_s(z) = Σ_{n≥1} z^n / n^s for |z| ≤ 1 − 1e−6 and s > 0.
pub fn polylog(s: f64, z: Complex64) -> Result<Complex64> {
    let r = check_disk(z, s, "polylog")?;
    if r == 0.0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let terms = truncation(r, s, 0.0);
    Ok(power_series(z, s, 0.0, 1, terms))
}

/// Lerch phi Φ(z, s, ν) = Σ_{n≥0} z^n / (n+ν)^s for |z| ≤ 1 − 1e−6, s > 0, ν ∈ (0, 1].
pub fn lerch_phi(z: Complex64, s: f64, nu: f64) -> Result<Complex64> {
    let r = check_disk(z, s, "lerch_phi")?;
    if !(nu > 0.0 && nu <= 1.0) {
        return Err(Error::Domain(format!(
            "lerch_phi: nu = {nu} outside (0, 1]"
        )));
    }
    if r == 0.0 {
        return Ok(Complex64::new(nu.powf(-s), 0.0));
    }
    let terms = truncation(r, s, nu);
    Ok(power_series(z, s, nu, 0, terms))
}

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// Γ(x) for x > 0 (Lanczos, g = 7).
pub fn gamma_real(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Domain(format!(
            "gamma_real: x = {x} must be positive"
        )));
    }
    if x < 0.5 {
        return Ok(gamma_real(x + 1.0)? / x);
    }
    // exact on small integers
    if x.fract() == 0.0 && x <= 21.0 {
        return Ok((1..x as u64).map(|k| k as f64).product());
    }
    let x = x - 1.0;
    let mut acc = LANCZOS[0];
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        acc += c / (x + i as f64);
    }
    let t = x + LANCZOS_G + 0.5;
    Ok((2.0 * PI).sqrt() * t.powf(x + 0.5) * (-t).exp() * acc)
}

/// Principal p-th root exp((ln|w| + i arg w)/p) with arg w ∈ (−π, π].
pub fn principal_root(w: Complex64, p: f64) -> Result<Complex64> {
    if w.re == 0.0 && w.im == 0.0 {
        return Err(Error::Domain("principal_root of zero".into()));
    }
    if !(p > 0.0) {
        return Err(Error::Domain(format!(
            "principal_root: p = {p} must be positive"
        )));
    }
    Ok(Complex64::from_polar(
        w.norm().powf(1.0 / p),
        principal_arg(w) / p,
    ))
}

/// Argument in (−π, π]; a negative real axis with signed-zero imaginary part maps to π.
pub fn principal_arg(w: Complex64) -> f64 {
    let a = w.im.atan2(w.re);
    if a == -PI {
        PI
    } else {
        a
    }
}

/// Complex power w^e on the principal branch.
pub fn principal_pow(w: Complex64, e: Complex64) -> Complex64 {
    let log = Complex64::new(w.norm().ln(), principal_arg(w));
    (e * log).exp()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(1e-300)
    }

    #[test]
    fn zeta_two_matches_direct_series() {
        // direct partial sum with integral remainder bounds
        let n = 1_000_000usize;
        let partial: f64 = (1..=n).rev().map(|k| 1.0 / (k as f64 * k as f64)).sum();
        let lower = partial + 1.0 / (n as f64 + 1.0);
        let upper = partial + 1.0 / n as f64;
        let em = hurwitz_zeta(2.0, 1.0).unwrap();
        assert!(em > lower - 1e-15 && em < upper + 1e-15);
        assert!(rel(em, PI * PI / 6.0) < 1e-13);
        assert!(rel(hurwitz_zeta_hasse(2.0, 1.0).unwrap(), PI * PI / 6.0) < 1e-12);
    }

    #[test]
    fn zeta_at_non_positive_integers() {
        assert!((hurwitz_zeta(0.0, 0.25).unwrap() - 0.25).abs() < 1e-14);
        assert!((hurwitz_zeta(-1.0, 1.0).unwrap() + 1.0 / 12.0).abs() < 1e-14);
        assert!((hurwitz_zeta_hasse(0.0, 0.25).unwrap() - 0.25).abs() < 1e-14);
        assert!((hurwitz_zeta_hasse(0.0, 1.0).unwrap() + 0.5).abs() < 1e-14);
        assert!((hurwitz_zeta_hasse(-1.0, 1.0).unwrap() + 1.0 / 12.0).abs() < 1e-14);
        assert!(hurwitz_zeta_hasse(-2.0, 1.0).unwrap().abs() < 1e-14);
    }

    #[test]
    fn zeta_pole_and_domain() {
        assert!(matches!(hurwitz_zeta(1.0, 0.5), Err(Error::Pole(_))));
        assert!(matches!(hurwitz_zeta_hasse(1.0, 0.5), Err(Error::Pole(_))));
        assert!(matches!(hurwitz_zeta(2.0, 0.0), Err(Error::Domain(_))));
        assert!(matches!(hurwitz_zeta(2.0, 1.5), Err(Error::Domain(_))));
    }

    #[test]
    fn euler_maclaurin_agrees_with_hasse() {
        for &s in &[-3.0, -1.0, -0.5, 0.0, 0.5, 2.0, 4.0] {
            for &nu in &[0.1, 0.5, 1.0] {
                let a = hurwitz_zeta(s, nu).unwrap();
                let b = hurwitz_zeta_hasse(s, nu).unwrap();
                assert!(rel(a, b) < 1e-9, "s={s} nu={nu}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn polylog_values() {
        assert_eq!(polylog(2.0, c(0.0, 0.0)).unwrap(), c(0.0, 0.0));
        let li2 = polylog(2.0, c(0.5, 0.0)).unwrap();
        // π²/12 − ln²2 / 2
        let closed = PI * PI / 12.0 - 0.5 * 2f64.ln().powi(2);
        assert!(rel(li2.re, closed) < 1e-13 && li2.im == 0.0);
        assert!((li2.re - 0.582_240_526_5).abs() < 1e-10);
        let li1 = polylog(1.0, c(0.3, 0.0)).unwrap();
        assert!(rel(li1.re, -(0.7f64).ln()) < 1e-12);
    }

    #[test]
    fn polylog_domain() {
        assert!(matches!(polylog(2.0, c(1.0, 0.0)), Err(Error::Domain(_))));
        assert!(matches!(
            polylog(2.0, c(0.0, 0.9999999)),
            Err(Error::Domain(_))
        ));
        assert!(matches!(polylog(0.0, c(0.5, 0.0)), Err(Error::Domain(_))));
        assert!(polylog(2.0, c(DISK_CUTOFF, 0.0)).is_ok());
    }

    #[test]
    fn polylog_near_cutoff_matches_closed_form() {
        let z = 0.999;
        let li1 = polylog(1.0, c(z, 0.0)).unwrap();
        assert!(rel(li1.re, -(1.0 - z).ln()) < 1e-12);
    }

    #[test]
    fn lerch_values() {
        assert_eq!(lerch_phi(c(0.0, 0.0), 2.0, 0.5).unwrap(), c(4.0, 0.0));
        let phi = lerch_phi(c(0.5, 0.0), 2.0, 1.0).unwrap();
        let li2 = polylog(2.0, c(0.5, 0.0)).unwrap();
        assert!(rel(phi.re, li2.re / 0.5) < 1e-13);
        assert!((phi.re - 1.164_481_053_0).abs() < 1e-9);
    }

    #[test]
    fn multisection_identity() {
        for k in 1..=6usize {
            for &s in &[1.5, 2.0, 3.0] {
                for &z in &[c(0.4, 0.0), c(-0.3, 0.5), c(0.1, -0.8)] {
                    let zk = z.powu(k as u32);
                    let lhs: Complex64 = (1..=k)
                        .map(|r| z.powu(r as u32) * lerch_phi(zk, s, r as f64 / k as f64).unwrap())
                        .sum();
                    let rhs = polylog(s, z).unwrap() * (k as f64).powf(s);
                    assert!((lhs - rhs).norm() < 1e-10 * rhs.norm(), "k={k} s={s} z={z}");
                }
            }
        }
    }

    #[test]
    fn gamma_values() {
        assert_eq!(gamma_real(1.0).unwrap(), 1.0);
        assert_eq!(gamma_real(3.0).unwrap(), 2.0);
        assert!(rel(gamma_real(1.5).unwrap(), PI.sqrt() / 2.0) < 1e-13);
        assert!(rel(gamma_real(0.5).unwrap(), PI.sqrt()) < 1e-13);
        assert!(rel(gamma_real(2.5).unwrap(), 0.75 * PI.sqrt()) < 1e-13);
        assert!(rel(gamma_real(4.5).unwrap(), 11.631_728_396_567_448) < 1e-12);
        assert!(matches!(gamma_real(0.0), Err(Error::Domain(_))));
        assert!(matches!(gamma_real(-1.0), Err(Error::Domain(_))));
    }

    #[test]
    fn principal_roots() {
        let r = principal_root(c(4.0, 0.0), 2.0).unwrap();
        assert!((r - c(2.0, 0.0)).norm() < 1e-15);
        let r = principal_root(c(-1.0, 0.0), 2.0).unwrap();
        assert!((r - c(0.0, 1.0)).norm() < 1e-15);
        let r = principal_root(c(-1.0, -0.0), 2.0).unwrap();
        assert!((r - c(0.0, 1.0)).norm() < 1e-15);
        let r = principal_root(c(-8.0, 0.0), 3.0).unwrap();
        assert!((r - c(1.0, 3f64.sqrt())).norm() < 1e-14);
        assert!(matches!(
            principal_root(c(0.0, 0.0), 2.0),
            Err(Error::Domain(_))
        ));
    }
}
