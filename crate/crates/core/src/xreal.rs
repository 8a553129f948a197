//! Extended-precision real scalar and compensated accumulation.
//!
//! [`XReal`] wraps an MPFR float. Every arithmetic result is correctly
//! rounded at the larger of the operand precisions, so mixing a 128-bit
//! value with a 192-bit guard value yields a 192-bit result.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};

use rug::float::{Round, Special};
use rug::ops::Pow;
use rug::Float;

/// Default mantissa precision in bits.
pub const DEFAULT_PRECISION: u32 = 128;

/// Smallest precision accepted anywhere in the toolkit (IEEE double).
pub const MIN_PRECISION: u32 = 53;

#[derive(Clone, PartialEq, PartialOrd)]
pub struct XReal(Float);

impl XReal {
    pub fn from_f64(value: f64, prec: u32) -> Self {
        XReal(Float::with_val(prec, value))
    }

    pub fn from_u64(value: u64, prec: u32) -> Self {
        XReal(Float::with_val(prec, value))
    }

    pub fn from_i64(value: i64, prec: u32) -> Self {
        XReal(Float::with_val(prec, value))
    }

    /// Parses a decimal literal such as `"1.1"` or `"2.5e-3"`, rounding once.
    pub fn parse(text: &str, prec: u32) -> Option<Self> {
        Float::parse(text.trim())
            .ok()
            .map(|v| XReal(Float::with_val(prec, v)))
    }

    pub fn zero(prec: u32) -> Self {
        XReal(Float::with_val(prec, 0))
    }

    pub fn one(prec: u32) -> Self {
        XReal(Float::with_val(prec, 1))
    }

    pub fn infinity(prec: u32) -> Self {
        XReal(Float::with_val(prec, Special::Infinity))
    }

    pub fn neg_infinity(prec: u32) -> Self {
        XReal(Float::with_val(prec, Special::NegInfinity))
    }

    /// 2^e exactly.
    pub fn exp2i(e: i32, prec: u32) -> Self {
        XReal(Float::with_val(prec, 1) << e)
    }

    pub fn pi(prec: u32) -> Self {
        XReal(Float::with_val(prec, rug::float::Constant::Pi))
    }

    pub fn ln2(prec: u32) -> Self {
        XReal(Float::with_val(prec, rug::float::Constant::Log2))
    }

    pub fn from_float(value: Float) -> Self {
        XReal(value)
    }

    pub fn as_float(&self) -> &Float {
        &self.0
    }

    pub fn into_float(self) -> Float {
        self.0
    }

    pub fn prec(&self) -> u32 {
        self.0.prec()
    }

    /// Re-rounds to `prec` bits (round to nearest).
    pub fn with_prec(&self, prec: u32) -> Self {
        XReal(Float::with_val(prec, &self.0))
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64()
    }

    pub fn is_finite(&self) -> bool {
        self.0.is_finite()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_nan(&self) -> bool {
        self.0.is_nan()
    }

    pub fn is_infinite(&self) -> bool {
        self.0.is_infinite()
    }

    pub fn is_sign_negative(&self) -> bool {
        self.0.is_sign_negative()
    }

    /// -1, 0 or +1 (NaN maps to 0).
    pub fn signum_i8(&self) -> i8 {
        match self.0.cmp0() {
            Some(Ordering::Less) => -1,
            Some(Ordering::Greater) => 1,
            _ => 0,
        }
    }

    pub fn abs(&self) -> Self {
        XReal(self.0.clone().abs())
    }

    pub fn ln(&self) -> Self {
        XReal(self.0.clone().ln())
    }

    /// ln(1 + self), accurate for tiny arguments.
    pub fn ln_1p(&self) -> Self {
        XReal(self.0.clone().ln_1p())
    }

    pub fn exp(&self) -> Self {
        XReal(self.0.clone().exp())
    }

    pub fn exp_m1(&self) -> Self {
        XReal(self.0.clone().exp_m1())
    }

    pub fn sqrt(&self) -> Self {
        XReal(self.0.clone().sqrt())
    }

    pub fn recip(&self) -> Self {
        XReal(self.0.clone().recip())
    }

    pub fn powf(&self, exponent: &XReal) -> Self {
        let prec = self.prec().max(exponent.prec());
        XReal(Float::with_val(prec, (&self.0).pow(&exponent.0)))
    }

    pub fn powi(&self, exponent: i32) -> Self {
        XReal(Float::with_val(self.prec(), (&self.0).pow(exponent)))
    }

    /// `base^(-exponent)` for an integer base, evaluated as `exp(-exponent·ln base)`
    /// by MPFR in one correctly rounded step.
    pub fn u64_pow_neg(base: u64, exponent: &XReal) -> Self {
        let prec = exponent.prec();
        let b = Float::with_val(prec, base);
        let e = Float::with_val(prec, -&exponent.0);
        XReal(Float::with_val(prec, b.pow(&e)))
    }

    pub fn max(self, other: XReal) -> XReal {
        if other > self {
            other
        } else {
            self
        }
    }

    pub fn min(self, other: XReal) -> XReal {
        if other < self {
            other
        } else {
            self
        }
    }

    /// Unit in the last place of `self` at its own precision.
    pub fn ulp(&self) -> XReal {
        let prec = self.prec();
        if self.0.is_zero() || !self.0.is_finite() {
            return XReal(Float::with_val(prec, Special::Zero));
        }
        let exp = self.0.get_exp().expect("finite nonzero");
        let one = Float::with_val(prec, 1);
        XReal(one << (exp - prec as i32))
    }

    /// Decimal scientific string with `digits` significant digits.
    pub fn to_sci_string(&self, digits: usize) -> String {
        if self.0.is_nan() {
            return "NaN".into();
        }
        if self.0.is_infinite() {
            return if self.0.is_sign_negative() { "-inf".into() } else { "inf".into() };
        }
        if self.0.is_zero() {
            return "0".into();
        }
        let (neg, mantissa, exp) = self.0.to_sign_string_exp_round(10, Some(digits), Round::Nearest);
        let exp = exp.unwrap_or(0) - 1;
        let (lead, rest) = mantissa.split_at(1);
        let sign = if neg { "-" } else { "" };
        if rest.is_empty() {
            format!("{sign}{lead}e{exp}")
        } else {
            format!("{sign}{lead}.{rest}e{exp}")
        }
    }
}

impl fmt::Display for XReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let digits = f.precision().unwrap_or(20);
        f.write_str(&self.to_sci_string(digits))
    }
}

impl fmt::Debug for XReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "XReal({}, {}b)", self.to_sci_string(25), self.prec())
    }
}

impl PartialEq<f64> for XReal {
    fn eq(&self, other: &f64) -> bool {
        self.0 == *other
    }
}

impl PartialOrd<f64> for XReal {
    fn partial_cmp(&self, other: &f64) -> Option<Ordering> {
        self.0.partial_cmp(other)
    }
}

macro_rules! binop {
    ($trait:ident, $method:ident, $op:tt) => {
        impl<'a, 'b> $trait<&'b XReal> for &'a XReal {
            type Output = XReal;
            fn $method(self, rhs: &'b XReal) -> XReal {
                let prec = self.prec().max(rhs.prec());
                XReal(Float::with_val(prec, &self.0 $op &rhs.0))
            }
        }
        impl $trait<XReal> for XReal {
            type Output = XReal;
            fn $method(self, rhs: XReal) -> XReal {
                &self $op &rhs
            }
        }
        impl<'b> $trait<&'b XReal> for XReal {
            type Output = XReal;
            fn $method(self, rhs: &'b XReal) -> XReal {
                &self $op rhs
            }
        }
        impl<'a> $trait<XReal> for &'a XReal {
            type Output = XReal;
            fn $method(self, rhs: XReal) -> XReal {
                self $op &rhs
            }
        }
        impl $trait<f64> for &XReal {
            type Output = XReal;
            fn $method(self, rhs: f64) -> XReal {
                XReal(Float::with_val(self.prec(), &self.0 $op rhs))
            }
        }
        impl $trait<f64> for XReal {
            type Output = XReal;
            fn $method(self, rhs: f64) -> XReal {
                &self $op rhs
            }
        }
        impl $trait<&XReal> for f64 {
            type Output = XReal;
            fn $method(self, rhs: &XReal) -> XReal {
                XReal(Float::with_val(rhs.prec(), self $op &rhs.0))
            }
        }
        impl $trait<XReal> for f64 {
            type Output = XReal;
            fn $method(self, rhs: XReal) -> XReal {
                self $op &rhs
            }
        }
    };
}

binop!(Add, add, +);
binop!(Sub, sub, -);
binop!(Mul, mul, *);
binop!(Div, div, /);

impl AddAssign<&XReal> for XReal {
    fn add_assign(&mut self, rhs: &XReal) {
        *self = &*self + rhs;
    }
}

impl SubAssign<&XReal> for XReal {
    fn sub_assign(&mut self, rhs: &XReal) {
        *self = &*self - rhs;
    }
}

impl Neg for XReal {
    type Output = XReal;
    fn neg(self) -> XReal {
        XReal(-self.0)
    }
}

impl Neg for &XReal {
    type Output = XReal;
    fn neg(self) -> XReal {
        XReal(Float::with_val(self.prec(), -&self.0))
    }
}

/// Neumaier-compensated running sum.
///
/// The running error term is carried at the same precision as the sum, so the
/// final result is accurate to roughly one rounding of the exact total.
#[derive(Clone, Debug)]
pub struct CompensatedSum {
    sum: XReal,
    carry: XReal,
}

impl CompensatedSum {
    pub fn new(prec: u32) -> Self {
        CompensatedSum {
            sum: XReal::zero(prec),
            carry: XReal::zero(prec),
        }
    }

    pub fn add(&mut self, term: &XReal) {
        let t = &self.sum + term;
        if self.sum.abs() >= term.abs() {
            self.carry += &((&self.sum - &t) + term);
        } else {
            self.carry += &((term - &t) + &self.sum);
        }
        self.sum = t;
    }

    pub fn value(&self) -> XReal {
        &self.sum + &self.carry
    }
}

/// Compensated sum of `terms` in slice order.
pub fn compensated_sum(terms: &[XReal], prec: u32) -> XReal {
    let mut acc = CompensatedSum::new(prec);
    for t in terms {
        acc.add(t);
    }
    acc.value()
}

/// Compensated running prefix sums: `out[k] = terms[0] + … + terms[k]`.
pub fn compensated_prefix(terms: &[XReal], prec: u32) -> Vec<XReal> {
    let mut acc = CompensatedSum::new(prec);
    terms
        .iter()
        .map(|t| {
            acc.add(t);
            acc.value()
        })
        .collect()
}

/// Fixed chunk length used by every parallel term map in the crate. Chunk
/// boundaries never depend on the worker count.
pub const PAR_CHUNK: usize = 1024;

/// Evaluates `f(i)` for `i in 0..len` on the current rayon pool, returning the
/// values in index order. Each value is computed independently, so the output
/// is identical for any thread count.
pub fn par_map_indexed<F>(len: usize, f: F) -> Vec<XReal>
where
    F: Fn(usize) -> XReal + Sync + Send,
{
    use rayon::prelude::*;
    (0..len)
        .into_par_iter()
        .with_min_len(PAR_CHUNK)
        .map(f)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arithmetic_takes_larger_precision() {
        let a = XReal::from_f64(1.5, 64);
        let b = XReal::from_f64(2.0, 200);
        assert_eq!((&a + &b).prec(), 200);
        assert_eq!((&a * &b).to_f64(), 3.0);
    }

    #[test]
    fn exp_gamma_roundtrip_within_one_ulp() {
        let x = XReal::parse("0.5772156649015328606065120900824024310422", 128).unwrap();
        let prod = x.exp() * (-&x).exp();
        let diff = (&prod - 1.0).abs();
        assert!(diff <= XReal::one(128).ulp(), "{diff:?}");
    }

    #[test]
    fn sci_string_digits() {
        let x = XReal::parse("6469693230", 128).unwrap();
        assert_eq!(x.to_sci_string(5), "6.4697e9");
        let y = XReal::parse("-0.000611284", 128).unwrap();
        assert_eq!(y.to_sci_string(3), "-6.11e-4");
        assert_eq!(XReal::one(64).to_sci_string(1), "1e0");
    }

    #[test]
    fn compensated_sum_recovers_cancelled_terms() {
        let prec = 53;
        let big = XReal::from_f64(1e20, prec);
        let terms = vec![big.clone(), XReal::from_f64(1.0, prec), -big, XReal::from_f64(1.0, prec)];
        assert_eq!(compensated_sum(&terms, prec).to_f64(), 2.0);
    }

    #[test]
    fn prefix_matches_running_sum() {
        let terms: Vec<_> = (1..=10).map(|k| XReal::from_u64(k, 128)).collect();
        let p = compensated_prefix(&terms, 128);
        assert_eq!(p[9].to_f64(), 55.0);
        assert_eq!(p[0].to_f64(), 1.0);
    }

    #[test]
    fn ulp_scales_with_exponent() {
        let x = XReal::from_f64(1.0, 128);
        assert_eq!(x.ulp().to_f64(), 2f64.powi(-127));
        let y = XReal::from_f64(1024.0, 128);
        assert_eq!(y.ulp().to_f64(), 2f64.powi(-117));
    }
}
