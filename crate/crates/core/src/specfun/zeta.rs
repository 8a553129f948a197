//! ζ on the real axis and Euler's constant.

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use rug::{Integer, Rational};

use crate::error::{domain, Result};
use crate::xreal::{CompensatedSum, XReal};

const GUARD_BITS: u32 = 32;

/// Bernoulli numbers B_0..=B_max as exact rationals (B_1 = -1/2).
fn bernoulli_upto(max: usize) -> Vec<Rational> {
    static CACHE: OnceLock<Mutex<Vec<Rational>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(vec![Rational::from(1)]));
    let mut b = cache.lock().unwrap();
    while b.len() <= max {
        let m = b.len();
        // sum_{k<m} C(m+1, k) B_k
        let mut acc = Rational::new();
        let mut binom = Integer::from(1);
        for (k, bk) in b.iter().enumerate() {
            acc += Rational::from(&binom * bk.numer()) / bk.denom().clone();
            binom = binom * (m + 1 - k) as u32 / (k + 1) as u32;
        }
        b.push(-acc / Rational::from(m as u32 + 1));
    }
    b[..=max].to_vec()
}

/// B_{2k}/(2k)! for k = 1..=count, rounded to `prec` bits.
fn bernoulli_factorial_ratios(count: usize, prec: u32) -> Vec<XReal> {
    let b = bernoulli_upto(2 * count);
    let mut fact = Integer::from(1);
    let mut out = Vec::with_capacity(count);
    for k in 1..=count {
        fact *= (2 * k - 1) as u32;
        fact *= (2 * k) as u32;
        let r = b[2 * k].clone() / Rational::from((fact.clone(), 1));
        out.push(XReal::from_float(rug::Float::with_val(prec, &r)));
    }
    out
}

/// ζ(b) for real b > 1 with an error bound.
///
/// Euler–Maclaurin with N direct terms: the correction series is truncated at
/// the first term below 2^-(P+32) relative, and for real arguments that first
/// omitted term bounds the remainder.
pub fn zeta_with_error(b: &XReal) -> Result<(XReal, XReal)> {
    if !b.is_finite() || !(b > &1.0) {
        return domain(format!("zeta(b) requires b > 1 (pole at 1), got {b}"));
    }
    euler_maclaurin(b)
}

/// ζ(b) for real b > 0, b ≠ 1, by the continued Euler–Maclaurin series.
///
/// Negative on (0, 1).
pub fn zeta_positive(b: &XReal) -> Result<XReal> {
    if !b.is_finite() || !(b > &0.0) || b == &1.0 {
        return domain(format!("zeta(b) requires b > 0 and b != 1, got {b}"));
    }
    euler_maclaurin(b).map(|(v, _)| v)
}

fn euler_maclaurin(b: &XReal) -> Result<(XReal, XReal)> {
    let prec = b.prec();
    let wp = prec + GUARD_BITS;
    let s = b.with_prec(wp);
    let n_direct: u64 = (wp as f64 * 0.12).ceil() as u64 + 10;

    let mut direct = CompensatedSum::new(wp);
    for n in 1..n_direct {
        direct.add(&XReal::u64_pow_neg(n, &s));
    }
    let n = XReal::from_u64(n_direct, wp);
    let n_pow = XReal::u64_pow_neg(n_direct, &s); // N^-s
    direct.add(&(&n_pow * 0.5));
    direct.add(&(&n_pow * &n / (&s - 1.0)));

    let eps = XReal::exp2i(-(wp as i32), wp);
    let max_terms = (std::f64::consts::PI * n_direct as f64) as usize;
    let ratios = bernoulli_factorial_ratios(max_terms + 1, wp);
    let inv_n2 = (&n * &n).recip();
    let mut poch = s.clone(); // s(s+1)…(s+2k-2)
    let mut npow = &n_pow / &n; // N^{-s-2k+1}
    let mut bound = XReal::zero(wp);
    for k in 1..=max_terms + 1 {
        let term = &ratios[k - 1] * &poch * &npow;
        let threshold = direct.value().abs() * &eps;
        if term.abs() < threshold || k == max_terms + 1 {
            bound = term.abs();
            break;
        }
        direct.add(&term);
        let kf = k as f64;
        poch = poch * (&s + (2.0 * kf - 1.0)) * (&s + 2.0 * kf);
        npow = npow * &inv_n2;
    }
    Ok((direct.value().with_prec(prec), bound.with_prec(prec)))
}

/// ζ(b) for real b > 1.
pub fn zeta_real(b: &XReal) -> Result<XReal> {
    zeta_with_error(b).map(|(v, _)| v)
}

/// Euler's constant γ at `prec` bits, by the Brent–McMillan scheme
/// γ ≈ U/V with U = Σ A_k, V = Σ B_k, |error| < π e^{-4n}.
pub fn euler_gamma(prec: u32) -> XReal {
    static CACHE: OnceLock<Mutex<HashMap<u32, XReal>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(g) = cache.lock().unwrap().get(&prec) {
        return g.clone();
    }
    let wp = prec + 64;
    // π e^{-4n} < 2^{-wp}
    let n = ((wp as f64 * std::f64::consts::LN_2 + 2.0) / 4.0).ceil() as u64 + 1;
    let n2 = XReal::from_u64(n * n, wp);
    let mut a = -XReal::from_u64(n, wp).ln();
    let mut bk = XReal::one(wp);
    let mut u = CompensatedSum::new(wp);
    let mut v = CompensatedSum::new(wp);
    u.add(&a);
    v.add(&bk);
    let eps = XReal::exp2i(-(wp as i32), wp);
    let mut k = 1u64;
    loop {
        let kf = XReal::from_u64(k, wp);
        bk = &bk * &n2 / (&kf * &kf);
        a = (&a * &n2 / &kf + &bk) / &kf;
        u.add(&a);
        v.add(&bk);
        if k > n && a.abs() < u.value().abs() * &eps && bk < v.value() * &eps {
            break;
        }
        k += 1;
    }
    let g = (u.value() / v.value()).with_prec(prec);
    cache.lock().unwrap().insert(prec, g.clone());
    g
}

/// e^γ at `prec` bits.
pub fn exp_gamma(prec: u32) -> XReal {
    euler_gamma(prec + 16).exp().with_prec(prec)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rug::float::Constant;
    use rug::Float;

    fn rel(a: &XReal, b: &Float) -> f64 {
        let b = XReal::from_float(b.clone());
        ((a - &b) / &b).abs().to_f64()
    }

    #[test]
    fn bernoulli_small() {
        let b = bernoulli_upto(12);
        assert_eq!(b[1], Rational::from((-1, 2)));
        assert_eq!(b[2], Rational::from((1, 6)));
        assert_eq!(b[4], Rational::from((-1, 30)));
        assert_eq!(b[12], Rational::from((-691, 2730)));
        assert_eq!(b[11], 0);
    }

    #[test]
    fn zeta_two_is_pi_squared_over_six() {
        let z = zeta_real(&XReal::from_f64(2.0, 128)).unwrap();
        let pi = XReal::pi(128);
        let exact = &pi * &pi / 6.0;
        assert!(((&z - &exact) / &exact).abs() < 1e-37);
    }

    #[test]
    fn zeta_against_mpfr() {
        for (s, prec) in [("1.1", 128), ("1.0001", 128), ("3", 192), ("10", 128), ("200", 128), ("1.5", 300)] {
            let b = XReal::parse(s, prec).unwrap();
            let (z, bound) = zeta_with_error(&b).unwrap();
            let oracle = Float::with_val(prec + 64, b.as_float()).zeta();
            let tol = 2f64.powi(8 - prec as i32);
            assert!(rel(&z, &oracle) < tol, "zeta({s}) at {prec}: {}", rel(&z, &oracle));
            assert!(bound.abs() < tol);
        }
    }

    #[test]
    fn zeta_on_unit_interval() {
        for s in ["0.5", "0.1", "0.9", "0.999"] {
            let b = XReal::parse(s, 128).unwrap();
            let z = zeta_positive(&b).unwrap();
            let oracle = Float::with_val(192, b.as_float()).zeta();
            assert!(rel(&z, &oracle) < 1e-35, "zeta({s})");
        }
        assert!(zeta_positive(&XReal::one(128)).is_err());
        assert!(zeta_positive(&XReal::zero(128)).is_err());
    }

    #[test]
    fn zeta_rejects_pole_and_below() {
        assert!(zeta_real(&XReal::one(128)).is_err());
        assert!(zeta_real(&XReal::from_f64(0.5, 128)).is_err());
        assert!(zeta_real(&XReal::infinity(128)).is_err());
    }

    #[test]
    fn gamma_against_mpfr() {
        for prec in [53, 128, 256, 512] {
            let g = euler_gamma(prec);
            let oracle = Float::with_val(prec + 64, Constant::Euler);
            assert!(rel(&g, &oracle) < 2f64.powi(1 - prec as i32), "prec {prec}");
        }
        assert_eq!(format!("{:.3}", euler_gamma(128).to_f64()), "0.577");
    }
}
