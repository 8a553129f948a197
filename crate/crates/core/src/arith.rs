//! Multiplicative number theory on machine integers.

use std::sync::OnceLock;

use rug::Integer;

use crate::error::{domain, Result};
use crate::primes::{is_prime, mul_mod, pow_mod, primes_up_to, SieveConfig};
use crate::xreal::{CompensatedSum, XReal};

/// Trial division uses primes below this bound; larger cofactors go to Pollard rho.
const TRIAL_LIMIT: u64 = 1_000_000;

/// Upper bound (exclusive) on factorization inputs.
pub const FACTOR_LIMIT: u64 = 1 << 63;

fn small_primes() -> &'static [u64] {
    static SMALL: OnceLock<Vec<u64>> = OnceLock::new();
    SMALL.get_or_init(|| primes_up_to(TRIAL_LIMIT, &SieveConfig::default()).expect("fixed bound"))
}

/// Canonical factorization: ascending primes with positive exponents.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Factorization(Vec<(u64, u32)>);

impl Factorization {
    pub fn pairs(&self) -> &[(u64, u32)] {
        &self.0
    }

    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        self.0.iter().map(|&(p, _)| p)
    }

    /// ω(n), the number of distinct prime factors.
    pub fn distinct(&self) -> usize {
        self.0.len()
    }

    pub fn is_squarefree(&self) -> bool {
        self.0.iter().all(|&(_, k)| k == 1)
    }

    /// ∏ p^k; `None` on u64 overflow.
    pub fn value(&self) -> Option<u64> {
        self.0.iter().try_fold(1u64, |acc, &(p, k)| {
            p.checked_pow(k).and_then(|pk| acc.checked_mul(pk))
        })
    }
}

/// Greatest common divisor; `gcd(0, 0) = 0`.
pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

fn lcm(a: u64, b: u64) -> u64 {
    a / gcd(a, b) * b
}

/// Brent's variant of Pollard rho. `n` must be an odd composite.
fn pollard_rho(n: u64) -> u64 {
    let mut c = 1u64;
    loop {
        let f = |x: u64| (mul_mod(x, x, n) + c) % n;
        let (mut x, mut y, mut g) = (2u64, 2u64, 1u64);
        let mut q = 1u64;
        let mut ys = 2u64;
        let mut r = 1u64;
        const M: u64 = 128;
        while g == 1 {
            x = y;
            for _ in 0..r {
                y = f(y);
            }
            let mut k = 0;
            while k < r && g == 1 {
                ys = y;
                for _ in 0..M.min(r - k) {
                    y = f(y);
                    q = mul_mod(q, x.abs_diff(y), n);
                }
                g = gcd(q, n);
                k += M;
            }
            r *= 2;
        }
        if g == n {
            loop {
                ys = f(ys);
                g = gcd(x.abs_diff(ys), n);
                if g > 1 {
                    break;
                }
            }
        }
        if g != n {
            return g;
        }
        c += 1;
    }
}

fn split_large(n: u64, out: &mut Vec<u64>) {
    if n == 1 {
        return;
    }
    if is_prime(n) {
        out.push(n);
        return;
    }
    let d = pollard_rho(n);
    split_large(d, out);
    split_large(n / d, out);
}

/// Factorizes `1 ≤ n < 2^63`.
pub fn factorize(n: u64) -> Result<Factorization> {
    if n == 0 || n >= FACTOR_LIMIT {
        return domain(format!("factorize requires 1 <= n < 2^63, got {n}"));
    }
    let mut pairs = Vec::new();
    let mut m = n;
    for &p in small_primes() {
        if p * p > m {
            break;
        }
        if m % p == 0 {
            let mut k = 0;
            while m % p == 0 {
                m /= p;
                k += 1;
            }
            pairs.push((p, k));
        }
    }
    if m > 1 {
        let mut big = Vec::new();
        split_large(m, &mut big);
        big.sort_unstable();
        for p in big {
            match pairs.last_mut() {
                Some((q, k)) if *q == p => *k += 1,
                _ => pairs.push((p, 1)),
            }
        }
    }
    Ok(Factorization(pairs))
}

/// Factorizes an arbitrary-size integer whose prime factors are all below
/// 2^63 and which becomes a machine integer after removing factors below
/// 10^6 (primorials and other smooth numbers).
pub fn factorize_big(n: &Integer) -> Result<Factorization> {
    if *n < 1 {
        return domain(format!("factorize requires n >= 1, got {n}"));
    }
    if let Some(small) = n.to_u64().filter(|&v| v < FACTOR_LIMIT) {
        return factorize(small);
    }
    let mut m = n.clone();
    let mut pairs = Vec::new();
    for &p in small_primes() {
        if m.to_u64().is_some_and(|v| v < FACTOR_LIMIT) {
            break;
        }
        if m.is_divisible_u(p as u32) {
            let mut k = 0;
            while m.is_divisible_u(p as u32) {
                m.div_exact_u_mut(p as u32);
                k += 1;
            }
            pairs.push((p, k));
        }
    }
    let rest = match m.to_u64().filter(|&v| v < FACTOR_LIMIT) {
        Some(v) => v,
        None => return domain("cofactor after trial division exceeds 2^63"),
    };
    let tail = factorize(rest)?;
    for &(p, k) in tail.pairs() {
        match pairs.last_mut() {
            Some((q, e)) if *q == p => *e += k,
            _ => pairs.push((p, k)),
        }
    }
    Ok(Factorization(pairs))
}

fn phi_of(f: &Factorization) -> u64 {
    f.pairs()
        .iter()
        .map(|&(p, k)| (p - 1) * p.pow(k - 1))
        .product()
}

pub fn euler_phi(n: u64) -> Result<u64> {
    Ok(phi_of(&factorize(n)?))
}

pub fn mobius(n: u64) -> Result<i8> {
    let f = factorize(n)?;
    Ok(if !f.is_squarefree() {
        0
    } else if f.distinct() % 2 == 0 {
        1
    } else {
        -1
    })
}

/// λ(2)=1, λ(4)=2, λ(2^k)=2^(k-2) for k≥3, λ(p^k)=φ(p^k) for odd p,
/// combined by lcm.
pub fn carmichael_lambda(n: u64) -> Result<u64> {
    Ok(lambda_of(&factorize(n)?))
}

fn lambda_of(f: &Factorization) -> u64 {
    f.pairs().iter().fold(1, |acc, &(p, k)| {
        let part = if p == 2 {
            match k {
                1 => 1,
                2 => 2,
                _ => 1u64 << (k - 2),
            }
        } else {
            (p - 1) * p.pow(k - 1)
        };
        lcm(acc, part)
    })
}

/// ord_q(a): the least r ≥ 1 with a^r ≡ 1 (mod q), found by stripping prime
/// factors from λ(q) while the power stays 1.
pub fn multiplicative_order(a: u64, q: u64) -> Result<u64> {
    if q < 2 {
        return domain(format!("order modulus must be at least 2, got {q}"));
    }
    if gcd(a % q, q) != 1 {
        return domain(format!("gcd({a}, {q}) != 1: a has no inverse mod q"));
    }
    let lambda = carmichael_lambda(q)?;
    let mut r = lambda;
    for (p, _) in factorize(lambda)?.pairs().iter().copied() {
        while r % p == 0 && pow_mod(a, r / p, q) == 1 {
            r /= p;
        }
    }
    Ok(r)
}

/// Output scale for [`dedekind_psi_b_with`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Scale {
    Linear,
    Log,
}

/// ln of the per-prime factor (1 - p^-b)/(1 - 1/p).
pub(crate) fn log_psi_factor(p: u64, b: &XReal) -> XReal {
    let prec = b.prec();
    let num = (-XReal::u64_pow_neg(p, b)).ln_1p();
    let den = (-XReal::from_u64(p, prec).recip()).ln_1p();
    num - den
}

/// ψ_b(n) = n ∏_{p|n} (1 - p^-b)/(1 - 1/p).
pub fn dedekind_psi_b(n: u64, b: &XReal) -> Result<XReal> {
    dedekind_psi_b_with(n, b, Scale::Linear)
}

/// ψ_b(n) in the requested scale. The log scale returns ln ψ_b(n).
pub fn dedekind_psi_b_with(n: u64, b: &XReal, scale: Scale) -> Result<XReal> {
    if !(b.signum_i8() > 0) || !b.is_finite() {
        return domain(format!("psi_b requires finite b > 0, got {b}"));
    }
    let f = factorize(n)?;
    let prec = b.prec();
    match scale {
        Scale::Log => {
            let mut acc = CompensatedSum::new(prec);
            acc.add(&XReal::from_u64(n, prec).ln());
            for p in f.primes() {
                acc.add(&log_psi_factor(p, b));
            }
            Ok(acc.value())
        }
        Scale::Linear => {
            let mut v = XReal::from_u64(n, prec);
            for p in f.primes() {
                let num = 1.0 - XReal::u64_pow_neg(p, b);
                let den = 1.0 - XReal::from_u64(p, prec).recip();
                v = v * num / den;
            }
            debug_assert!(v.is_finite());
            Ok(v)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x(v: f64) -> XReal {
        XReal::from_f64(v, 128)
    }

    #[test]
    fn factorize_examples() {
        assert!(factorize(1).unwrap().pairs().is_empty());
        assert_eq!(factorize(12).unwrap().pairs(), &[(2, 2), (3, 1)]);
        let n10 = factorize(6_469_693_230).unwrap();
        let ps: Vec<u64> = n10.primes().collect();
        assert_eq!(ps, vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29]);
        assert!(n10.is_squarefree());
        assert!(factorize(0).is_err());
        assert!(factorize(1 << 63).is_err());
    }

    #[test]
    fn factorize_large_semiprime() {
        // two primes above the trial-division bound
        let (p, q) = (1_000_003u64, 998_244_353u64);
        assert_eq!(factorize(p * q).unwrap().pairs(), &[(q.min(p), 1), (q.max(p), 1)]);
        let big = 9_223_372_036_854_775_783u64; // largest prime below 2^63
        assert_eq!(factorize(big).unwrap().pairs(), &[(big, 1)]);
        let sq = 3_037_000_493u64; // prime near sqrt(2^63)
        assert_eq!(factorize(sq * sq).unwrap().pairs(), &[(sq, 2)]);
    }

    #[test]
    fn factorize_big_primorial() {
        let n30 = crate::primes::primorial_exact(30).unwrap();
        let f = factorize_big(&n30).unwrap();
        assert_eq!(f.distinct(), 30);
        assert!(f.is_squarefree());
        assert_eq!(f.primes().last(), Some(113));
        let mixed = Integer::from(1u64 << 40) * 9_223_372_036_854_775_783u64;
        assert_eq!(factorize_big(&mixed).unwrap().pairs(), &[(2, 40), (9_223_372_036_854_775_783, 1)]);
        assert!(factorize_big(&Integer::from(0)).is_err());
    }

    #[test]
    fn totient_and_mobius() {
        assert_eq!(euler_phi(1).unwrap(), 1);
        assert_eq!(euler_phi(10).unwrap(), 4);
        assert_eq!(euler_phi(30).unwrap(), 8);
        assert_eq!(mobius(1).unwrap(), 1);
        assert_eq!(mobius(4).unwrap(), 0);
        assert_eq!(mobius(6).unwrap(), 1);
        assert_eq!(mobius(30).unwrap(), -1);
    }

    #[test]
    fn carmichael_values() {
        assert_eq!(carmichael_lambda(1).unwrap(), 1);
        assert_eq!(carmichael_lambda(2).unwrap(), 1);
        assert_eq!(carmichael_lambda(4).unwrap(), 2);
        assert_eq!(carmichael_lambda(8).unwrap(), 2);
        assert_eq!(carmichael_lambda(9).unwrap(), 6);
        assert_eq!(carmichael_lambda(24).unwrap(), 2);
        assert_eq!(carmichael_lambda(1024).unwrap(), 256);
    }

    #[test]
    fn orders() {
        assert_eq!(multiplicative_order(1, 7).unwrap(), 1);
        assert_eq!(multiplicative_order(2, 7).unwrap(), 3);
        assert_eq!(multiplicative_order(2, 5).unwrap(), 4);
        assert!(multiplicative_order(2, 4).is_err());
        assert!(multiplicative_order(3, 1).is_err());
    }

    #[test]
    fn psi_examples() {
        assert_eq!(dedekind_psi_b(10, &x(2.0)).unwrap(), 18.0);
        assert_eq!(dedekind_psi_b(1, &x(2.0)).unwrap(), 1.0);
        let v = dedekind_psi_b(123_456, &x(1.0)).unwrap();
        assert!((v.to_f64() - 123_456.0).abs() < 1e-20 * 123_456.0);
        let r = dedekind_psi_b(6_469_693_230, &x(2.0)).unwrap() / 6_469_693_230.0;
        assert!((r.to_f64() - 3.876_886_385_229_737).abs() < 1e-14);
        assert!(dedekind_psi_b(10, &x(0.0)).is_err());
        assert!(dedekind_psi_b(10, &x(-1.0)).is_err());
    }

    #[test]
    fn psi_log_matches_linear() {
        let b = x(1.3);
        for n in [2u64, 360, 6_469_693_230, 999_999_999_989] {
            let lin = dedekind_psi_b(n, &b).unwrap();
            let log = dedekind_psi_b_with(n, &b, Scale::Log).unwrap().exp();
            let rel = ((&lin - &log) / &lin).abs();
            assert!(rel < 1e-35, "{n}: {rel:?}");
        }
    }
}
