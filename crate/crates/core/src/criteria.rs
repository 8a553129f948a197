//! Primorial criteria scans and the proof-function diagnostics around them.
//!
//! Every scan runs over primorial indices n and takes `ln ln N_n` as
//! `ln θ(p_n)` from the prime table, so no primorial is ever formed. Per-prime
//! log factors are mapped in parallel and folded into ordered compensated
//! prefix sums; rows are then built independently and emitted in index order.

use std::ops::RangeInclusive;

use rayon::prelude::*;

use crate::error::{domain, Result};
use crate::kms::{check_loglog_positive, criterion_threshold, log_psi_prefix, log_psi_terms, CriterionRow};
use crate::primes::PrimeTable;
use crate::specfun::{bertrand_b, bertrand_between, exp_gamma, prime_sum_s, Quadrature};
use crate::xreal::{compensated_prefix, compensated_sum, par_map_indexed, XReal, PAR_CHUNK};

/// Direction of a sampled sequence.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Trend {
    Increasing,
    Decreasing,
    Mixed,
}

/// Samples of a diagnostic quantity at increasing checkpoints.
#[derive(Clone, Debug)]
pub struct AsymptoticsReport {
    pub b: XReal,
    /// (checkpoint, value), strictly increasing in the checkpoint.
    pub samples: Vec<(u64, XReal)>,
    /// max − min over the sample values.
    pub drift: XReal,
    pub trend: Trend,
}

impl AsymptoticsReport {
    fn new(b: XReal, samples: Vec<(u64, XReal)>) -> Self {
        let prec = b.prec();
        let mut lo = samples[0].1.clone();
        let mut hi = lo.clone();
        let (mut up, mut down) = (false, false);
        for w in samples.windows(2) {
            up |= w[1].1 > w[0].1;
            down |= w[1].1 < w[0].1;
        }
        for (_, v) in &samples[1..] {
            lo = lo.min(v.clone());
            hi = hi.max(v.clone());
        }
        let trend = match (up, down) {
            (true, false) => Trend::Increasing,
            (false, true) => Trend::Decreasing,
            _ => Trend::Mixed,
        };
        AsymptoticsReport {
            drift: (hi - lo).with_prec(prec),
            b,
            samples,
            trend,
        }
    }

    /// Value at the last checkpoint.
    pub fn last(&self) -> &XReal {
        &self.samples[self.samples.len() - 1].1
    }

    /// |v_last − v_prev| / |v_prev| over the final two checkpoints; zero for a
    /// single sample.
    pub fn relative_change_last(&self) -> XReal {
        let k = self.samples.len();
        if k < 2 {
            return XReal::zero(self.b.prec());
        }
        let prev = &self.samples[k - 2].1;
        ((&self.samples[k - 1].1 - prev) / prev).abs()
    }
}

/// A run of criterion rows.
#[derive(Clone, Debug)]
pub struct ScanResult {
    pub rows: Vec<CriterionRow>,
    /// Primorial index of the first failing row.
    pub first_failure: Option<usize>,
    pub all_hold: bool,
    /// Indices in the requested range left out of the verdict.
    pub excluded: usize,
}

/// Structured record of a failing row.
#[derive(Clone, Debug)]
pub struct FailureRecord {
    pub q: usize,
    pub b: XReal,
    pub margin: XReal,
}

impl ScanResult {
    fn from_rows(rows: Vec<CriterionRow>, excluded: usize) -> Self {
        let first_failure = rows.iter().find(|r| !r.holds).map(|r| r.q);
        ScanResult {
            all_hold: first_failure.is_none(),
            rows,
            first_failure,
            excluded,
        }
    }

    /// One record per failing row; `b` is β − 1 (β itself for Nicolas rows).
    pub fn failures(&self) -> Vec<FailureRecord> {
        self.rows
            .iter()
            .filter(|r| !r.holds)
            .map(|r| FailureRecord {
                q: r.q,
                b: if r.beta.is_infinite() { r.beta.clone() } else { &r.beta - 1.0 },
                margin: r.epsilon.clone(),
            })
            .collect()
    }
}

fn working_prec(b: &XReal, t: &PrimeTable) -> u32 {
    b.prec().max(t.precision())
}

fn check_b_above_one(b: &XReal) -> Result<()> {
    if !b.is_finite() || !(b > &1.0) {
        return domain(format!("b must be > 1, got {b}"));
    }
    Ok(())
}

fn check_b_positive(b: &XReal) -> Result<()> {
    if !b.is_finite() || !(b > &0.0) {
        return domain(format!("b must be finite and > 0, got {b}"));
    }
    Ok(())
}

fn check_high_temperature(b: &XReal) -> Result<()> {
    if !(b > &0.5 && b < &1.0) {
        return domain(format!("requires 0.5 < b < 1, got {b}"));
    }
    Ok(())
}

fn check_index(q_index: usize, t: &PrimeTable) -> Result<()> {
    check_loglog_positive(q_index)?;
    t.prime(q_index).map(|_| ())
}

fn check_x(x: u64) -> Result<()> {
    if x < 2 {
        return domain(format!("x must be >= 2, got {x}"));
    }
    Ok(())
}

/// `-ln(1 - 1/p)` for the first `q` primes.
fn log_mertens_terms(q: usize, t: &PrimeTable, prec: u32) -> Vec<XReal> {
    let ps = &t.primes()[..q];
    par_map_indexed(q, |i| -(-XReal::from_u64(ps[i], prec).recip()).ln_1p())
}

fn build_rows<F>(range: RangeInclusive<usize>, f: F) -> Vec<CriterionRow>
where
    F: Fn(usize) -> CriterionRow + Sync + Send,
{
    let (lo, hi) = (*range.start(), *range.end());
    (lo..hi + 1).into_par_iter().with_min_len(PAR_CHUNK).map(f).collect()
}

/// Nicolas ratio row: `N_q/φ(N_q)/ln ln N_q` against `e^γ`. β is stored as +∞.
pub fn nicolas_check(q_index: usize, t: &PrimeTable) -> Result<CriterionRow> {
    check_index(q_index, t)?;
    let prec = t.precision();
    let log_m = compensated_sum(&log_mertens_terms(q_index, t, prec), prec);
    let ratio = log_m.exp() / t.theta_prefix()[q_index - 1].ln();
    Ok(CriterionRow::new(q_index, t, XReal::infinity(prec), ratio, exp_gamma(prec)))
}

/// Nicolas rows for n = 2..=q_max.
pub fn nicolas_scan(q_max: usize, t: &PrimeTable) -> Result<ScanResult> {
    check_index(q_max, t)?;
    let prec = t.precision();
    let prefix = compensated_prefix(&log_mertens_terms(q_max, t, prec), prec);
    let threshold = exp_gamma(prec);
    let inf = XReal::infinity(prec);
    let rows = build_rows(2..=q_max, |n| {
        let ratio = prefix[n - 1].exp() / t.theta_prefix()[n - 1].ln();
        CriterionRow::new(n, t, inf.clone(), ratio, threshold.clone())
    });
    Ok(ScanResult::from_rows(rows, 0))
}

/// `R_b(N_q) = ψ_b(N_q)/N_q / ln ln N_q` in log space, for b > 0.
pub fn ratio_r(q_index: usize, b: &XReal, t: &PrimeTable) -> Result<XReal> {
    check_b_positive(b)?;
    check_index(q_index, t)?;
    let b = b.with_prec(working_prec(b, t));
    let log_psi = compensated_sum(&log_psi_terms(&b, q_index, t), b.prec());
    Ok(log_psi.exp() / t.theta_prefix()[q_index - 1].ln())
}

/// Rows `R_b(N_n)` against `e^γ/ζ(b)` for n = 3..=q_max. β is stored as b + 1.
pub fn conjecture_scan(b: &XReal, q_max: usize, t: &PrimeTable) -> Result<ScanResult> {
    check_b_above_one(b)?;
    if q_max < 3 {
        return domain(format!("conjecture scan starts at n = 3, got q_max = {q_max}"));
    }
    t.prime(q_max)?;
    let b = b.with_prec(working_prec(b, t));
    let prefix = log_psi_prefix(&b, q_max, t);
    let threshold = criterion_threshold(&b)?;
    let beta = &b + 1.0;
    let rows = build_rows(3..=q_max, |n| {
        let ratio = prefix[n - 1].exp() / t.theta_prefix()[n - 1].ln();
        CriterionRow::new(n, t, beta.clone(), ratio, threshold.clone())
    });
    Ok(ScanResult::from_rows(rows, 0))
}

/// `ln ∏_{p≤x}(1-1/p)^{-1}` and `ln θ(x)` for `x` inside the table.
fn mertens_and_loglog(x: u64, t: &PrimeTable, prec: u32) -> Result<(usize, XReal, XReal)> {
    check_x(x)?;
    let k = t.count_upto(x)?;
    let log_m = compensated_sum(&log_mertens_terms(k, t, prec), prec);
    let loglog = t.theta_prefix()[k - 1].with_prec(prec).ln();
    Ok((k, log_m, loglog))
}

/// `ln f(x)` with `f(x) = e^γ ln θ(x) ∏_{p≤x}(1 − 1/p)`.
pub fn log_f_function(x: u64, t: &PrimeTable) -> Result<XReal> {
    let prec = t.precision();
    let (_, log_m, loglog) = mertens_and_loglog(x, t, prec)?;
    Ok(euler_gamma_at(prec) + loglog.ln() - log_m)
}

/// Nicolas's `f(x)`; `f(p_n) < 1` is the Nicolas inequality at n.
pub fn f_function(x: u64, t: &PrimeTable) -> Result<XReal> {
    log_f_function(x, t).map(|l| l.exp())
}

/// `ln g(x)` with
/// `g(x) = e^γ/ζ(b) · ln θ(x) · ∏_{p≤x}(1 − 1/p) / ∏_{p≤x}(1 − p^{-b})`.
pub fn log_g_function(x: u64, b: &XReal, t: &PrimeTable) -> Result<XReal> {
    check_b_above_one(b)?;
    check_x(x)?;
    let b = b.with_prec(working_prec(b, t));
    let k = t.count_upto(x)?;
    let log_psi = compensated_sum(&log_psi_terms(&b, k, t), b.prec());
    let loglog = t.theta_prefix()[k - 1].with_prec(b.prec()).ln();
    Ok(criterion_threshold(&b)?.ln() + loglog.ln() - log_psi)
}

/// `g(x)`; `g(p_n) < 1` is equivalent to `R_b(N_n) > e^γ/ζ(b)`.
pub fn g_function(x: u64, b: &XReal, t: &PrimeTable) -> Result<XReal> {
    log_g_function(x, b, t).map(|l| l.exp())
}

fn euler_gamma_at(prec: u32) -> XReal {
    crate::specfun::euler_gamma(prec)
}

fn check_checkpoints(points: &[u64]) -> Result<()> {
    if points.is_empty() {
        return domain("at least one checkpoint is required");
    }
    if points.windows(2).any(|w| w[0] >= w[1]) {
        return domain("checkpoints must be strictly increasing");
    }
    Ok(())
}

/// Samples `D(x) = S_b(x) − B_b(x)` at each checkpoint, `0.5 < b < 1`.
pub fn sum_vs_integral_report(
    b: &XReal,
    checkpoints: &[u64],
    t: &PrimeTable,
    quad: &Quadrature,
) -> Result<AsymptoticsReport> {
    check_high_temperature(b)?;
    check_checkpoints(checkpoints)?;
    let prec = working_prec(b, t);
    let b = b.with_prec(prec);
    let mut samples = Vec::with_capacity(checkpoints.len());
    for &x in checkpoints {
        check_x(x)?;
        let s = prime_sum_s(&b, x, t)?;
        let bb = bertrand_b(&b, &XReal::from_u64(x, prec), quad)?.value;
        samples.push((x, s - bb));
    }
    Ok(AsymptoticsReport::new(b, samples))
}

/// `ρ(n) = [ψ_b(N_n)/N_n] / [ln p_n · exp(−B_b(p_n))]` at each checkpoint
/// index n, `0.5 < b < 1`. The last sample is the estimate `K̂_b`.
pub fn k_b_estimate(b: &XReal, checkpoints: &[u64], t: &PrimeTable, quad: &Quadrature) -> Result<AsymptoticsReport> {
    check_high_temperature(b)?;
    check_checkpoints(checkpoints)?;
    let prec = working_prec(b, t);
    let b = b.with_prec(prec);
    let n_max = *checkpoints.last().unwrap() as usize;
    check_index(n_max, t)?;
    check_index(checkpoints[0] as usize, t)?;
    let prefix = log_psi_prefix(&b, n_max, t);
    let mut samples = Vec::with_capacity(checkpoints.len());
    for &n in checkpoints {
        let p = t.primes()[n as usize - 1];
        let bb = bertrand_b(&b, &XReal::from_u64(p, prec), quad)?.value;
        let log_rho = &prefix[n as usize - 1] + bb - XReal::from_u64(p, prec).ln().ln();
        samples.push((n, log_rho.exp()));
    }
    Ok(AsymptoticsReport::new(b, samples))
}

/// Checks `ψ_b(N_n)/N_n > K̂_b (1 − ε) ln ln N_n exp(−B_b(p_n))` for every n in
/// `n_range` at or above `stabilization_floor`; rows below it are counted in
/// [`ScanResult::excluded`].
///
/// `k_hat` is injected by the caller, normally `k_b_estimate(..).last()`. The
/// row ratio is the left side divided by `ln ln N_n exp(−B_b(p_n))` and the
/// threshold is `K̂_b (1 − ε)`.
pub fn lower_bound_check(
    b: &XReal,
    epsilon: &XReal,
    k_hat: &XReal,
    n_range: RangeInclusive<usize>,
    stabilization_floor: usize,
    t: &PrimeTable,
    quad: &Quadrature,
) -> Result<ScanResult> {
    check_high_temperature(b)?;
    if !(epsilon > &0.0 && epsilon < &1.0) {
        return domain(format!("epsilon must lie in (0, 1), got {epsilon}"));
    }
    if !(k_hat > &0.0) || !k_hat.is_finite() {
        return domain(format!("K_b estimate must be finite and positive, got {k_hat}"));
    }
    let (lo, hi) = (*n_range.start(), *n_range.end());
    if lo > hi {
        return domain(format!("empty range {lo}..={hi}"));
    }
    check_index(lo.max(2), t)?;
    check_index(hi, t)?;
    let prec = working_prec(b, t);
    let b = b.with_prec(prec);
    let start = lo.max(stabilization_floor).max(2);
    let excluded = (start - lo).min(hi - lo + 1);
    if start > hi {
        return Ok(ScanResult::from_rows(Vec::new(), excluded));
    }
    let prefix = log_psi_prefix(&b, hi, t);
    let threshold = k_hat.with_prec(prec) * (1.0 - epsilon.with_prec(prec));
    let beta = &b + 1.0;
    // B_b(p_n) = B_b(p_start) + Σ ∫_{p_{k-1}}^{p_k}, segments mapped in parallel
    // and folded in index order.
    let p_at = |n: usize| XReal::from_u64(t.primes()[n - 1], prec);
    let mut pieces = vec![bertrand_b(&b, &p_at(start), quad).map(|r| r.value)];
    pieces.extend(
        (start + 1..hi + 1)
            .into_par_iter()
            .with_min_len(64)
            .map(|n| bertrand_between(&b, &p_at(n - 1), &p_at(n), quad).map(|r| r.value))
            .collect::<Vec<_>>(),
    );
    let pieces = pieces.into_iter().collect::<Result<Vec<_>>>()?;
    let bertrand = compensated_prefix(&pieces, prec);
    let mut rows = Vec::with_capacity(hi - start + 1);
    for (n, bb) in (start..=hi).zip(bertrand) {
        let loglog = t.theta_prefix()[n - 1].with_prec(prec).ln();
        let ratio = (&prefix[n - 1] + bb).exp() / loglog;
        rows.push(CriterionRow::new(n, t, beta.clone(), ratio, threshold.clone()));
    }
    Ok(ScanResult::from_rows(rows, excluded))
}

/// Samples `R_b(N_n) ζ(b)/e^γ` at each checkpoint index; tends to 1 from above.
pub fn prop1_convergence(b: &XReal, checkpoints: &[u64], t: &PrimeTable) -> Result<AsymptoticsReport> {
    check_b_above_one(b)?;
    check_checkpoints(checkpoints)?;
    let prec = working_prec(b, t);
    let b = b.with_prec(prec);
    let n_max = *checkpoints.last().unwrap() as usize;
    check_index(n_max, t)?;
    check_index(checkpoints[0] as usize, t)?;
    let prefix = log_psi_prefix(&b, n_max, t);
    let threshold = criterion_threshold(&b)?;
    let samples = checkpoints
        .iter()
        .map(|&n| {
            let i = n as usize - 1;
            let r = prefix[i].exp() / t.theta_prefix()[i].ln();
            (n, r / &threshold)
        })
        .collect();
    Ok(AsymptoticsReport::new(b, samples))
}

/// Table-1 style checkpoints {10, 10², 10³, 10⁴}.
pub const DEFAULT_CHECKPOINTS: [u64; 4] = [10, 100, 1_000, 10_000];

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kms::epsilon_beta;
    use crate::specfun::{c_b_constant, mertens_product};

    const P: u32 = 128;

    fn x(v: f64) -> XReal {
        XReal::from_f64(v, P)
    }

    fn table(n: u64) -> PrimeTable {
        PrimeTable::first(n, P).unwrap()
    }

    fn rel(a: &XReal, b: &XReal) -> f64 {
        ((a - b) / b).abs().to_f64()
    }

    #[test]
    fn nicolas_small_rows() {
        let t = table(10);
        let r2 = nicolas_check(2, &t).unwrap();
        assert!((r2.threshold.to_f64() * r2.log_n.ln().to_f64() - 1.038_718_0).abs() < 1e-6);
        assert!((&r2.ratio * r2.log_n.ln() - 3.0).abs() < 1e-35);
        assert!(r2.holds && r2.beta.is_infinite());
        let r3 = nicolas_check(3, &t).unwrap();
        assert!((&r3.ratio * r3.log_n.ln() - 3.75).abs() < 1e-35);
        assert!((r3.threshold.to_f64() * r3.log_n.ln().to_f64() - 2.180_259_8).abs() < 1e-6);
        assert!(nicolas_check(1, &t).is_err());
        assert!(nicolas_check(11, &t).is_err());
    }

    #[test]
    fn ratio_r_examples() {
        let t = table(100);
        assert!((ratio_r(10, &x(2.0), &t).unwrap().to_f64() - 1.243_578_364).abs() < 1e-9);
        assert!((ratio_r(10, &x(9.0), &t).unwrap().to_f64() - 2.026_780_558).abs() < 1e-9);
        for q in [2usize, 10, 50] {
            let r1 = ratio_r(q, &x(1.0), &t).unwrap();
            let expect = t.theta_prefix()[q - 1].ln().recip();
            assert!(rel(&r1, &expect) < 1e-36);
        }
    }

    #[test]
    fn epsilon_is_ratio_minus_threshold() {
        let t = table(1000);
        for beta in ["2.1", "3", "10"] {
            let beta = XReal::parse(beta, P).unwrap();
            let b = &beta - 1.0;
            let thr = criterion_threshold(&b).unwrap();
            for q in [2usize, 10, 100, 1000] {
                let row = epsilon_beta(q, &beta, &t).unwrap();
                let direct = ratio_r(q, &b, &t).unwrap() - &thr;
                assert!((&row.epsilon - &direct).abs() <= row.epsilon.ulp());
            }
        }
    }

    #[test]
    fn conjecture_scan_boundaries() {
        let t = table(200);
        let s = conjecture_scan(&x(2.0), 200, &t).unwrap();
        assert_eq!(s.rows.first().unwrap().q, 3);
        assert_eq!(s.rows.last().unwrap().q, 200);
        assert!(s.all_hold && s.first_failure.is_none() && s.failures().is_empty());
        assert_eq!(s.rows[0].beta, 3.0);
        assert!(conjecture_scan(&x(1.0), 200, &t).is_err());
        assert!(conjecture_scan(&x(2.0), 2, &t).is_err());
        assert!(conjecture_scan(&x(2.0), 201, &t).is_err());
    }

    #[test]
    fn scan_rows_match_single_evaluations() {
        let t = table(300);
        let b = XReal::parse("1.1", P).unwrap();
        let s = conjecture_scan(&b, 300, &t).unwrap();
        for row in s.rows.iter().step_by(37) {
            assert!(rel(&row.ratio, &ratio_r(row.q, &b, &t).unwrap()) < 1e-36);
        }
        let ns = nicolas_scan(300, &t).unwrap();
        for row in ns.rows.iter().step_by(41) {
            assert_eq!(row.ratio, nicolas_check(row.q, &t).unwrap().ratio);
        }
    }

    #[test]
    fn synthetic_failure_is_recorded() {
        let t = table(20);
        let rows = (2..=20)
            .map(|n| {
                let ratio = if n == 7 { x(0.5) } else { x(2.0) };
                CriterionRow::new(n, &t, x(3.0), ratio, x(1.0))
            })
            .collect();
        let s = ScanResult::from_rows(rows, 0);
        assert!(!s.all_hold);
        assert_eq!(s.first_failure, Some(7));
        let f = s.failures();
        assert_eq!(f.len(), 1);
        assert_eq!(f[0].b, 2.0);
        assert_eq!(f[0].margin, -0.5);
    }

    #[test]
    fn g_and_f_at_29() {
        let t = table(100);
        assert!((g_function(29, &x(2.0), &t).unwrap().to_f64() - 0.870_682_72).abs() < 1e-8);
        assert!((f_function(29, &t).unwrap().to_f64() - 0.877_007_87).abs() < 1e-8);
        let m = mertens_product(29, &t).unwrap();
        let f = exp_gamma(P) * t.theta(29).unwrap().ln() / m;
        assert!(rel(&f_function(29, &t).unwrap(), &f) < 1e-35);
        assert!(g_function(1, &x(2.0), &t).is_err());
        assert!(g_function(29, &x(1.0), &t).is_err());
    }

    #[test]
    fn g_times_r_is_threshold() {
        let t = table(500);
        for b in [x(2.0), x(9.0), XReal::parse("1.1", P).unwrap()] {
            let thr = criterion_threshold(&b).unwrap();
            for n in [5usize, 50, 500] {
                let p = t.primes()[n - 1];
                let prod = g_function(p, &b, &t).unwrap() * ratio_r(n, &b, &t).unwrap();
                assert!(rel(&prod, &thr) < 1e-36, "b={b} n={n}");
            }
        }
    }

    #[test]
    fn log_g_dominates_log_f_minus_b_over_x() {
        let t = PrimeTable::up_to(10_000, P).unwrap();
        let b = x(2.0);
        for xv in [100u64, 1_000, 10_000] {
            let lg = log_g_function(xv, &b, &t).unwrap();
            let lf = log_f_function(xv, &t).unwrap();
            assert!(lg >= lf - 2.0 / xv as f64);
        }
    }

    #[test]
    fn prop1_examples() {
        let t = table(10_000);
        let r = prop1_convergence(&x(2.0), &[10_000], &t).unwrap();
        assert!((r.last().to_f64() - 1.000_564_560).abs() < 1e-9);
        let r9 = prop1_convergence(&x(9.0), &[10], &t).unwrap();
        assert!((r9.last().to_f64() - 1.140_240_6).abs() < 1e-7);
        let all = prop1_convergence(&x(2.0), &DEFAULT_CHECKPOINTS, &t).unwrap();
        assert!(all.samples.iter().all(|(_, v)| v > &1.0));
        assert_eq!(all.trend, Trend::Decreasing);
    }

    #[test]
    fn report_bookkeeping() {
        let b = x(0.75);
        let single = AsymptoticsReport::new(b.clone(), vec![(10, x(3.0))]);
        assert!(single.drift.is_zero());
        assert!(single.relative_change_last().is_zero());
        let r = AsymptoticsReport::new(b, vec![(1, x(1.0)), (2, x(3.0)), (3, x(2.0))]);
        assert_eq!(r.drift, 2.0);
        assert_eq!(r.trend, Trend::Mixed);
        assert!((r.relative_change_last() - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn sum_vs_integral_small() {
        let t = PrimeTable::up_to(10_000, P).unwrap();
        let q = Quadrature::default();
        let r = sum_vs_integral_report(&x(0.75), &[1_000, 10_000], &t, &q).unwrap();
        assert!((r.samples[0].1.to_f64() + 0.340_211).abs() < 1e-6);
        assert!((r.samples[1].1.to_f64() + 0.359_566).abs() < 1e-6);
        let one = sum_vs_integral_report(&x(0.75), &[1_000], &t, &q).unwrap();
        assert!(one.drift.is_zero());
        assert!(sum_vs_integral_report(&x(0.4), &[1_000], &t, &q).is_err());
        assert!(sum_vs_integral_report(&x(0.75), &[1_000, 100], &t, &q).is_err());
    }

    #[test]
    fn rho_decomposition() {
        let t = table(2000);
        let q = Quadrature::default();
        let b = x(0.75);
        let r = k_b_estimate(&b, &[100, 2000], &t, &q).unwrap();
        assert!(r.samples.iter().all(|(_, v)| v > &0.0));
        assert!((r.last().to_f64() - 1.380_613).abs() < 1e-6);
        let n = 2000usize;
        let p = t.primes()[n - 1];
        let sub = PrimeTable::first(n as u64, P).unwrap();
        let c = c_b_constant(&b, &sub, None).unwrap().value;
        let s = prime_sum_s(&b, p, &t).unwrap();
        let bb = bertrand_b(&b, &XReal::from_u64(p, P), &q).unwrap().value;
        let m = mertens_product(p, &t).unwrap();
        let regrouped = c.exp() * (-(s - bb)).exp() * m / XReal::from_u64(p, P).ln();
        assert!(rel(r.last(), &regrouped) < 1e-30);
    }

    #[test]
    fn lower_bound_floor_and_slack() {
        let t = table(3000);
        let q = Quadrature::default();
        let b = x(0.75);
        let k_hat = k_b_estimate(&b, &[2000, 3000], &t, &q).unwrap().last().clone();
        let s = lower_bound_check(&b, &x(0.99), &k_hat, 2..=3000, 2500, &t, &q).unwrap();
        assert!(s.all_hold);
        assert_eq!(s.excluded, 2498);
        assert_eq!(s.rows.first().unwrap().q, 2500);
        for row in s.rows.iter().step_by(97) {
            let p = XReal::from_u64(row.p_q, P);
            let bb = bertrand_b(&b, &p, &q).unwrap().value;
            let direct = (log_psi_prefix(&b, row.q, &t)[row.q - 1].clone() + bb).exp() / row.log_n.ln();
            assert!(rel(&row.ratio, &direct) < 1e-25);
        }
        let none = lower_bound_check(&b, &x(0.5), &k_hat, 10..=20, 100, &t, &q).unwrap();
        assert!(none.rows.is_empty() && none.excluded == 11);
        assert!(lower_bound_check(&b, &x(1.0), &k_hat, 10..=20, 0, &t, &q).is_err());
        assert!(lower_bound_check(&x(1.5), &x(0.5), &k_hat, 10..=20, 0, &t, &q).is_err());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(32))]

            #[test]
            fn duality_holds_for_random_b(b in 1.01f64..20.0, n in 2usize..400) {
                let t = table(400);
                let b = x(b);
                let p = t.primes()[n - 1];
                let prod = g_function(p, &b, &t).unwrap() * ratio_r(n, &b, &t).unwrap();
                prop_assert!(rel(&prod, &criterion_threshold(&b).unwrap()) < 1e-35);
            }

            #[test]
            fn ratio_r_increases_with_b(b in 1.01f64..10.0, db in 0.01f64..5.0, n in 2usize..400) {
                let t = table(400);
                prop_assert!(ratio_r(n, &x(b + db), &t).unwrap() > ratio_r(n, &x(b), &t).unwrap());
            }
        }
    }
}
