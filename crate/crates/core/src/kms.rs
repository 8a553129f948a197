//! Bost–Connes KMS states on the integers and the primorial margin ε_β(q).
//!
//! For β > 1 the state restricted to the integers is
//!
//! ```text
//! φ_β(q) = q^{-β} ∏_{p | q} (1 - p^{β-1}) / (1 - p^{-1})
//! ```
//!
//! Every factor `1 - p^{β-1}` is negative, so `sign φ_β(q) = (-1)^{ω(q)}`. On a
//! primorial this rearranges to `N_q |φ_β(N_q)| = ψ_{β-1}(N_q) / N_q`, a product
//! over the first q primes that is evaluated here as a compensated log-sum
//! without ever forming `N_q`.

use rug::{Integer, Rational};

use crate::arith::{euler_phi, factorize_big, log_psi_factor, mobius};
use crate::error::{domain, Result};
use crate::primes::PrimeTable;
use crate::specfun::{exp_gamma, zeta_positive};
use crate::xreal::{compensated_prefix, compensated_sum, par_map_indexed, CompensatedSum, XReal};

/// Log-space value of φ_β(q).
#[derive(Clone, Debug)]
pub struct KmsValue {
    pub q: Integer,
    pub beta: XReal,
    /// ln |φ_β(q)|; `-inf` at the degenerate point β = 1.
    pub log_abs: XReal,
    pub sign: i8,
    /// Set when β = 1, where every factor `1 - p^0` vanishes.
    pub vanishing_factor: bool,
}

impl KmsValue {
    /// sign · exp(log_abs).
    pub fn value(&self) -> XReal {
        match self.sign {
            0 => XReal::zero(self.log_abs.prec()),
            s => self.log_abs.exp() * f64::from(s),
        }
    }
}

/// φ_β(q) for a machine integer `q ≥ 2`.
pub fn phi_beta(q: u64, beta: &XReal) -> Result<KmsValue> {
    phi_beta_big(&Integer::from(q), beta)
}

/// φ_β(q) for an arbitrary-size smooth `q ≥ 2` (exact primorials included).
pub fn phi_beta_big(q: &Integer, beta: &XReal) -> Result<KmsValue> {
    if *q < 2 {
        return domain(format!("phi_beta requires q >= 2, got {q}"));
    }
    if !beta.is_finite() || beta < &1.0 {
        return domain(format!(
            "phi_beta requires finite beta >= 1, got {beta}"
        ));
    }
    let prec = beta.prec();
    let f = factorize_big(q)?;
    if beta == &1.0 {
        return Ok(KmsValue {
            q: q.clone(),
            beta: beta.clone(),
            log_abs: XReal::neg_infinity(prec),
            sign: 0,
            vanishing_factor: true,
        });
    }
    let wp = prec + 32;
    let beta_w = beta.with_prec(wp);
    let bm1 = &beta_w - 1.0;
    let ln_q = XReal::from_float(rug::Float::with_val(wp, q)).ln();
    let mut acc = CompensatedSum::new(wp);
    acc.add(&-(&beta_w * &ln_q));
    for p in f.primes() {
        let pw = XReal::from_u64(p, wp);
        // ln|1 - p^{β-1}| = ln(p^{β-1} - 1)
        acc.add(&(&bm1 * pw.ln()).exp_m1().ln());
        acc.add(&-(-pw.recip()).ln_1p());
    }
    let sign = if f.distinct() % 2 == 0 { 1 } else { -1 };
    Ok(KmsValue {
        q: q.clone(),
        beta: beta.clone(),
        log_abs: acc.value().with_prec(prec),
        sign,
        vanishing_factor: false,
    })
}

/// φ_∞(q) = μ(q)/φ(q), exactly.
pub fn phi_infinity(q: u64) -> Result<Rational> {
    let mu = mobius(q)?;
    let phi = euler_phi(q)?;
    Ok(Rational::from((mu, phi)))
}

fn check_beta_above_one(beta: &XReal) -> Result<XReal> {
    if !beta.is_finite() || !(beta > &1.0) {
        return domain(format!("beta - 1 must be positive, got beta = {beta}"));
    }
    Ok(beta - 1.0)
}

/// Per-prime log factors `ln((1 - p^{-b})/(1 - 1/p))` for the first `q` primes.
pub(crate) fn log_psi_terms(b: &XReal, q: usize, t: &PrimeTable) -> Vec<XReal> {
    let ps = &t.primes()[..q];
    par_map_indexed(q, |i| log_psi_factor(ps[i], b))
}

/// Running sums of [`log_psi_terms`]: entry k-1 is `ln(ψ_b(N_k)/N_k)`.
pub(crate) fn log_psi_prefix(b: &XReal, q: usize, t: &PrimeTable) -> Vec<XReal> {
    compensated_prefix(&log_psi_terms(b, q, t), b.prec())
}

/// ln(N_q |φ_β(N_q)|) = ln(ψ_{β-1}(N_q)/N_q).
pub fn log_kms_primorial_ratio(q_index: usize, beta: &XReal, t: &PrimeTable) -> Result<XReal> {
    let b = check_beta_above_one(beta)?;
    t.prime(q_index)?;
    let b = b.with_prec(b.prec().max(t.precision()));
    Ok(compensated_sum(&log_psi_terms(&b, q_index, t), b.prec()))
}

/// N_q |φ_β(N_q)| = ∏_{p ≤ p_q} (1 - p^{-(β-1)})/(1 - 1/p).
pub fn kms_primorial_ratio(q_index: usize, beta: &XReal, t: &PrimeTable) -> Result<XReal> {
    log_kms_primorial_ratio(q_index, beta, t).map(|l| l.exp())
}

/// Temperature regime of a criterion row.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Regime {
    /// β > 2: the margin's positivity for all q is equivalent to RH.
    LowTemperature,
    /// 1 < β ≤ 2: evaluated, but the criterion is not RH-equivalent here.
    HighTemperature,
}

impl Regime {
    pub fn of(beta: &XReal) -> Self {
        if beta > &2.0 {
            Regime::LowTemperature
        } else {
            Regime::HighTemperature
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Regime::LowTemperature => "low-temperature",
            Regime::HighTemperature => "high-temperature; criterion not RH-equivalent here",
        }
    }
}

/// One evaluation of a primorial criterion: `epsilon = ratio - threshold`.
#[derive(Clone, Debug)]
pub struct CriterionRow {
    /// Primorial index q (or n).
    pub q: usize,
    /// p_q.
    pub p_q: u64,
    /// ln N_q = θ(p_q).
    pub log_n: XReal,
    /// Inverse temperature; `+inf` for the Nicolas (β = ∞) rows.
    pub beta: XReal,
    pub ratio: XReal,
    pub threshold: XReal,
    pub epsilon: XReal,
    pub holds: bool,
    pub regime: Regime,
}

impl CriterionRow {
    pub(crate) fn new(q: usize, t: &PrimeTable, beta: XReal, ratio: XReal, threshold: XReal) -> Self {
        let epsilon = &ratio - &threshold;
        let holds = epsilon.signum_i8() > 0;
        CriterionRow {
            q,
            p_q: t.primes()[q - 1],
            log_n: t.theta_prefix()[q - 1].clone(),
            regime: Regime::of(&beta),
            beta,
            ratio,
            threshold,
            epsilon,
            holds,
        }
    }
}

/// `e^γ / ζ(b)` at the precision of `b`, for b > 0 and b ≠ 1.
///
/// Negative for 0 < b < 1, where ζ(b) < 0.
pub fn criterion_threshold(b: &XReal) -> Result<XReal> {
    let prec = b.prec();
    Ok(exp_gamma(prec) / zeta_positive(b)?)
}

pub(crate) fn check_loglog_positive(q_index: usize) -> Result<()> {
    if q_index < 2 {
        return domain(format!(
            "primorial index {q_index} < 2: log log N_q not positive (ln N_1 = ln 2 < 1)"
        ));
    }
    Ok(())
}

/// ε_β(q) = N_q|φ_β(N_q)| / ln ln N_q − e^γ/ζ(β−1).
///
/// Accepts β > 1 with β ≠ 2 (pole of ζ(β−1)); rows with β < 2 carry
/// [`Regime::HighTemperature`].
pub fn epsilon_beta(q_index: usize, beta: &XReal, t: &PrimeTable) -> Result<CriterionRow> {
    check_loglog_positive(q_index)?;
    let b = check_beta_above_one(beta)?;
    let prec = beta.prec().max(t.precision());
    let b = b.with_prec(prec);
    let log_ratio = log_kms_primorial_ratio(q_index, &beta.with_prec(prec), t)?;
    let loglog = t.log_primorial(q_index)?.with_prec(prec).ln();
    let ratio = log_ratio.exp() / loglog;
    let threshold = criterion_threshold(&b)?;
    Ok(CriterionRow::new(q_index, t, beta.with_prec(prec), ratio, threshold))
}

/// Σ_{n ≤ N} n^{-β}, the trace of exp(-βH_0) on the first N basis states.
pub fn partition_truncated(beta: &XReal, n: u64) -> Result<XReal> {
    check_beta_above_one(beta)?;
    if n == 0 {
        return domain("truncation must keep at least one state");
    }
    let terms = par_map_indexed(n as usize, |i| XReal::u64_pow_neg(i as u64 + 1, beta));
    Ok(compensated_sum(&terms, beta.prec()))
}

/// Gibbs average of a diagonal observable with entries `diag[n-1] = m_n`:
/// Σ m_n n^{-β} / Σ n^{-β} over n ≤ N = diag.len().
pub fn gibbs_expectation(diag: &[XReal], beta: &XReal) -> Result<XReal> {
    check_beta_above_one(beta)?;
    if diag.is_empty() {
        return domain("observable must have at least one diagonal entry");
    }
    let prec = beta.prec();
    let weights = par_map_indexed(diag.len(), |i| XReal::u64_pow_neg(i as u64 + 1, beta));
    let weighted = par_map_indexed(diag.len(), |i| &diag[i] * &weights[i]);
    Ok(compensated_sum(&weighted, prec) / compensated_sum(&weights, prec))
}
