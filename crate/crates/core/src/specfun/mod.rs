//! Extended-precision special functions and prime-indexed sums.
//!
//! `Li` uses the offset convention `Li(x) = ∫_2^x dt / ln t`, so `Li(2) = 0`.
//! Every integral here is taken from 2, matching the Bertrand integral
//! `B_b(x) = ∫_2^x dt / (t^b ln t)` and `I_b(x) = ∫_2^x Li(t) dt / t^{1+b}`.
//!
//! Integrals over `[2, x]` are evaluated in the variable `u = ln t`, where the
//! integrands become smooth exponentials over a short interval:
//!
//! - `Li(x)  = ∫_{ln 2}^{ln x} e^u / u du`
//! - `B_b(x) = ∫_{ln 2}^{ln x} e^{(1-b)u} / u du`
//! - `I_b(x) = ∫_{ln 2}^{ln x} Li(e^u) e^{-bu} du`

mod quad;
mod zeta;

pub use quad::{QuadResult, Quadrature, Scheme};
pub use zeta::{euler_gamma, exp_gamma, zeta_positive, zeta_real, zeta_with_error};

use crate::error::{domain, Error, Result};
use crate::primes::PrimeTable;
use crate::xreal::{compensated_sum, par_map_indexed, CompensatedSum, XReal};

fn check_upper_limit(x: &XReal) -> Result<()> {
    if !x.is_finite() || x < &2.0 {
        return domain(format!("integral upper limit must be >= 2, got {x}"));
    }
    Ok(())
}

fn check_open_unit(b: &XReal, lo: f64, what: &str) -> Result<()> {
    if !(b > &lo && b < &1.0) {
        return domain(format!("{what} requires {lo} < b < 1, got {b}"));
    }
    Ok(())
}

/// `Li(x) = ∫_2^x dt/ln t` by adaptive quadrature.
pub fn li_offset(x: &XReal, quad: &Quadrature) -> Result<QuadResult> {
    check_upper_limit(x)?;
    let prec = x.prec();
    let lo = XReal::ln2(prec);
    let hi = x.ln();
    quad.integrate(|u| u.exp() / u, &lo, &hi, prec)
}

/// `Li(x)` from the exponential-integral series
/// `Ei(z) - Ei(z0) = ln(z/z0) + Σ_{k≥1} (z^k - z0^k)/(k·k!)`
/// with `z = ln x`, `z0 = ln 2`. All terms are positive for `x ≥ 2`.
pub fn li_offset_series(x: &XReal) -> Result<XReal> {
    check_upper_limit(x)?;
    let prec = x.prec();
    let wp = prec + 32;
    let z = x.with_prec(wp).ln();
    let z0 = XReal::ln2(wp);
    let mut acc = CompensatedSum::new(wp);
    acc.add(&(&z / &z0).ln());
    let eps = XReal::exp2i(-(wp as i32), wp);
    let mut tz = XReal::one(wp);
    let mut tz0 = XReal::one(wp);
    let mut k = 1u64;
    loop {
        tz = tz * &z / (k as f64);
        tz0 = tz0 * &z0 / (k as f64);
        let term = (&tz - &tz0) / (k as f64);
        acc.add(&term);
        if k as f64 > z.to_f64() && term.abs() <= acc.value().abs() * &eps {
            break;
        }
        k += 1;
    }
    Ok(acc.value().with_prec(prec))
}

/// Bertrand integral `B_b(x) = ∫_2^x dt/(t^b ln t)` for `0 < b < 1`.
pub fn bertrand_b(b: &XReal, x: &XReal, quad: &Quadrature) -> Result<QuadResult> {
    bertrand_between(b, &XReal::from_u64(2, x.prec()), x, quad)
}

/// `∫_{x0}^{x1} dt/(t^b ln t)` for `0 < b < 1` and `2 ≤ x0 ≤ x1`.
pub fn bertrand_between(b: &XReal, x0: &XReal, x1: &XReal, quad: &Quadrature) -> Result<QuadResult> {
    check_open_unit(b, 0.0, "Bertrand integral")?;
    check_upper_limit(x0)?;
    check_upper_limit(x1)?;
    if x1 < x0 {
        return domain(format!("Bertrand integral limits out of order: {x0} > {x1}"));
    }
    let prec = b.prec().max(x1.prec());
    let lo = x0.with_prec(prec).ln();
    let hi = x1.with_prec(prec).ln();
    let c = 1.0 - b.with_prec(prec + quad::GUARD_BITS);
    quad.integrate(|u| (&c * u).exp() / u, &lo, &hi, prec)
}

/// `I_b(x) = ∫_2^x Li(t) dt / t^{1+b}` for `1/2 < b < 1`.
pub fn i_b(b: &XReal, x: &XReal, quad: &Quadrature) -> Result<QuadResult> {
    check_open_unit(b, 0.5, "I_b")?;
    check_upper_limit(x)?;
    let prec = b.prec().max(x.prec());
    let lo = XReal::ln2(prec);
    let hi = x.with_prec(prec).ln();
    let nb = -b.with_prec(prec + quad::GUARD_BITS);
    quad.integrate(
        |u| {
            let t = u.exp();
            let li = li_offset_series(&t).expect("t >= 2 inside the interval");
            li * (&nb * u).exp()
        },
        &lo,
        &hi,
        prec,
    )
}

fn primes_upto<'t>(t: &'t PrimeTable, x: u64) -> Result<&'t [u64]> {
    let k = t.count_upto(x)?;
    Ok(&t.primes()[..k])
}

/// `S_b(x) = Σ_{p≤x} p^{-b}` in ascending prime order.
pub fn prime_sum_s(b: &XReal, x: u64, t: &PrimeTable) -> Result<XReal> {
    if !(b.signum_i8() > 0) {
        return domain(format!("prime sum requires b > 0, got {b}"));
    }
    let ps = primes_upto(t, x)?;
    let terms = par_map_indexed(ps.len(), |i| XReal::u64_pow_neg(ps[i], b));
    Ok(compensated_sum(&terms, b.prec()))
}

/// `J_b(x) = ∫_2^x π(t) dt / t^{1+b}` evaluated exactly for the step function
/// π: `J_b(x) = Σ_{p≤x} (p^{-b} - x^{-b}) / b`.
pub fn j_b_closed(b: &XReal, x: u64, t: &PrimeTable) -> Result<XReal> {
    check_open_unit(b, 0.0, "J_b")?;
    if x < 2 {
        return domain(format!("J_b requires x >= 2, got {x}"));
    }
    let ps = primes_upto(t, x)?;
    let xb = XReal::u64_pow_neg(x, b);
    let terms = par_map_indexed(ps.len(), |i| XReal::u64_pow_neg(ps[i], b) - &xb);
    Ok(compensated_sum(&terms, b.prec()) / b)
}

/// `ln ∏_{p≤x} (1-1/p)^{-1} = -Σ ln(1 - 1/p)`.
pub fn log_mertens_product(x: u64, t: &PrimeTable) -> Result<XReal> {
    let prec = t.precision();
    let ps = primes_upto(t, x)?;
    let terms = par_map_indexed(ps.len(), |i| -(-XReal::from_u64(ps[i], prec).recip()).ln_1p());
    Ok(compensated_sum(&terms, prec))
}

/// `∏_{p≤x} (1-1/p)^{-1}`, as the exponential of a compensated log-sum.
pub fn mertens_product(x: u64, t: &PrimeTable) -> Result<XReal> {
    log_mertens_product(x, t).map(|l| l.exp())
}

/// Partial value of `C_b = Σ_p (ln(1 - p^-b) + p^-b)` with a certified bound
/// on the omitted tail.
#[derive(Clone, Debug)]
pub struct CbValue {
    pub value: XReal,
    pub tail_radius: XReal,
    pub primes_used: usize,
}

/// Rosser–Schoenfeld: π(t) < 1.25506 t / ln t for t > 1.
const PI_UPPER_CONST: f64 = 1.25506;

/// `C_b` over every prime in the table.
///
/// Tail bound, with `x` the largest table prime and `u = p^{-b} ≤ x^{-b}`:
/// `|ln(1-u) + u| ≤ u²/(2(1-u))`, and by partial summation with the
/// Rosser–Schoenfeld bound
/// `Σ_{p>x} p^{-2b} ≤ 2b·1.25506 ∫_x^∞ t^{-2b}/ln t dt ≤ 2b·1.25506·x^{1-2b}/((2b-1) ln x)`.
///
/// If `requested_radius` is given and the bound exceeds it, returns
/// [`Error::TailRadius`] carrying the best radius achieved.
pub fn c_b_constant(b: &XReal, t: &PrimeTable, requested_radius: Option<&XReal>) -> Result<CbValue> {
    check_open_unit(b, 0.5, "C_b")?;
    let prec = b.prec();
    let ps = t.primes();
    let terms = par_map_indexed(ps.len(), |i| {
        let u = XReal::u64_pow_neg(ps[i], b);
        (-&u).ln_1p() + u
    });
    let value = compensated_sum(&terms, prec);
    let x = t.largest();
    let xf = XReal::from_u64(x, prec);
    let u_max = XReal::u64_pow_neg(x, b);
    let two_b = b * 2.0;
    let factor = (1.0 - &u_max).recip() * 0.5;
    let sum_bound = &two_b * PI_UPPER_CONST * xf.powf(&(1.0 - &two_b)) / ((&two_b - 1.0) * xf.ln());
    let tail_radius = factor * sum_bound;
    if let Some(r) = requested_radius {
        if &tail_radius > r {
            return Err(Error::TailRadius {
                requested: r.to_sci_string(6),
                achieved: tail_radius.to_sci_string(6),
            });
        }
    }
    Ok(CbValue {
        value,
        tail_radius,
        primes_used: ps.len(),
    })
}
