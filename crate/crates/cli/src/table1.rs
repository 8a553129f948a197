//! The ε_β(q) grid for β ∈ {2.1, 3, 10}, q ∈ {10, 10², 10³, 10⁴} and the
//! primorial magnitudes, with two-significant-figure reference values.

use primon_core::kms::{epsilon_beta, CriterionRow};
use primon_core::primes::primorial_exact;
use primon_core::{PrimeTable, Result, XReal};

pub const BETAS: [&str; 3] = ["2.1", "3", "10"];
pub const QS: [usize; 4] = [10, 100, 1_000, 10_000];

/// Reference ε grid, rows by β, normalized to `d.de±x`.
pub const REFERENCE_EPSILON: [[&str; 4]; 3] = [
    ["2.5e-1", "9.3e-2", "5.1e-2", "3.1e-2"],
    ["1.6e-1", "1.8e-2", "3.0e-3", "6.1e-4"],
    ["2.5e-1", "2.8e-2", "4.9e-3", "1.0e-3"],
];

/// Reference magnitudes of N_q. The q = 10 entry carries a wrong exponent;
/// that cell is checked against the exact primorial instead.
pub const REFERENCE_MAGNITUDE: [&str; 4] = ["6.4e10", "4.7e219", "6.7e3392", "9.1e45336"];

/// Exact N_10.
pub const N10: u64 = 6_469_693_230;

/// Two-figure forms of `mantissa·10^exp`: (rounded, truncated).
fn two_figure_forms(mantissa: &XReal, exp: i64) -> (String, String) {
    let split = |s: String| -> (String, i64) {
        let (m, e) = s.split_once('e').expect("scientific form");
        (m.to_string(), e.parse::<i64>().unwrap())
    };
    let (r, re) = split(mantissa.to_sci_string(2));
    let (t, te) = split(mantissa.to_sci_string(30));
    (format!("{r}e{}", re + exp), format!("{}e{}", &t[..3], te + exp))
}

/// True when `reference` equals the value rounded or truncated to two figures.
pub fn matches_two_figures(mantissa: &XReal, exp: i64, reference: &str) -> bool {
    let (r, t) = two_figure_forms(mantissa, exp);
    r == reference || t == reference
}

#[derive(Clone, Debug)]
pub struct EpsilonCell {
    pub beta: &'static str,
    pub row: CriterionRow,
    pub reference: &'static str,
    pub matches: bool,
}

#[derive(Clone, Debug)]
pub struct MagnitudeCell {
    pub q: usize,
    /// N_q = mantissa · 10^exponent, 1 ≤ mantissa < 10.
    pub mantissa: XReal,
    pub exponent: i64,
    pub reference: &'static str,
    pub matches: bool,
    /// Set when the reference cell was replaced by an exact check.
    pub note: Option<String>,
}

impl MagnitudeCell {
    pub fn display(&self) -> String {
        let m = self.mantissa.to_sci_string(5);
        let m = m.split_once('e').map_or(m.as_str(), |p| p.0).to_string();
        format!("{m}e{}", self.exponent)
    }
}

/// `log_n = ln N` as mantissa and decimal exponent.
pub fn decimal_magnitude(log_n: &XReal) -> (XReal, i64) {
    let prec = log_n.prec();
    let ln10 = XReal::from_u64(10, prec).ln();
    let l10 = log_n / &ln10;
    let exponent = l10.as_float().clone().floor().to_f64() as i64;
    let frac = l10 - XReal::from_i64(exponent, prec);
    ((frac * ln10).exp(), exponent)
}

pub fn epsilon_grid(t: &PrimeTable) -> Result<Vec<EpsilonCell>> {
    let prec = t.precision();
    let mut out = Vec::with_capacity(12);
    for (i, &beta) in BETAS.iter().enumerate() {
        let b = XReal::parse(beta, prec).expect("literal");
        for (j, &q) in QS.iter().enumerate() {
            let row = epsilon_beta(q, &b, t)?;
            let (m, e) = decimal_magnitude(&row.epsilon.abs().ln());
            let matches = row.epsilon > 0.0 && matches_two_figures(&m, e, REFERENCE_EPSILON[i][j]);
            out.push(EpsilonCell {
                beta,
                row,
                reference: REFERENCE_EPSILON[i][j],
                matches,
            });
        }
    }
    Ok(out)
}

pub fn magnitude_grid(t: &PrimeTable) -> Result<Vec<MagnitudeCell>> {
    let mut out = Vec::with_capacity(4);
    for (j, &q) in QS.iter().enumerate() {
        let (mantissa, exponent) = decimal_magnitude(&t.log_primorial(q)?);
        let reference = REFERENCE_MAGNITUDE[j];
        let (matches, note) = if q == 10 {
            let exact = primorial_exact(10)? == N10;
            (exact, Some(format!("exact N_10 = {N10}; reference cell {reference} has a wrong exponent")))
        } else {
            (matches_two_figures(&mantissa, exponent, reference), None)
        };
        out.push(MagnitudeCell {
            q,
            mantissa,
            exponent,
            reference,
            matches,
            note,
        });
    }
    Ok(out)
}
