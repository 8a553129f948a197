//! Acceptance suite: one line per criterion, nonzero exit if any fails.

use std::process::Command;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use primon_cli::table1;
use primon_core::arith::{self, carmichael_lambda, euler_phi, factorize, multiplicative_order};
use primon_core::bcq;
use primon_core::criteria::{self, conjecture_scan, g_function, nicolas_scan, prop1_convergence, ratio_r};
use primon_core::kms::{criterion_threshold, kms_primorial_ratio, partition_truncated, phi_beta_big};
use primon_core::primes::{primorial_exact, PrimeTable};
use primon_core::specfun::{j_b_closed, prime_sum_s, zeta_real, Quadrature};
use primon_core::XReal;

const P: u32 = 128;
const SEED: u64 = 0x5eed_2024;

type Outcome = Result<String, String>;

fn check(ok: bool, msg: impl Into<String>) -> Outcome {
    if ok {
        Ok(msg.into())
    } else {
        Err(msg.into())
    }
}

fn rel(a: &XReal, b: &XReal) -> f64 {
    ((a - b) / b).abs().to_f64()
}

fn within(elapsed: Duration, limit_s: f64) -> bool {
    elapsed.as_secs_f64() < limit_s
}

fn x(v: f64) -> XReal {
    XReal::from_f64(v, P)
}

fn c1_table() -> Outcome {
    let start = Instant::now();
    let t = PrimeTable::first(10_000, P).map_err(|e| e.to_string())?;
    let eps = table1::epsilon_grid(&t).map_err(|e| e.to_string())?;
    let mags = table1::magnitude_grid(&t).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    let bad: Vec<String> = eps
        .iter()
        .filter(|c| !c.matches)
        .map(|c| format!("eps beta={} q={}: {} vs {}", c.beta, c.row.q, c.row.epsilon.to_sci_string(4), c.reference))
        .chain(mags.iter().filter(|m| !m.matches).map(|m| format!("N_q q={}: {}", m.q, m.display())))
        .collect();
    let n10_exact = primorial_exact(10).map_err(|e| e.to_string())? == table1::N10;
    check(
        bad.is_empty() && n10_exact && eps.len() == 12 && within(elapsed, 5.0),
        format!("12/12 epsilon, 4/4 magnitude cells (N_10 exact), {:.2}s {bad:?}", elapsed.as_secs_f64()),
    )
}

fn c2_nicolas() -> Outcome {
    let start = Instant::now();
    let t = PrimeTable::first(10_000, P).map_err(|e| e.to_string())?;
    let s = nicolas_scan(10_000, &t).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    check(
        s.all_hold && s.rows.len() == 9_999 && s.rows[0].q == 2 && within(elapsed, 2.0),
        format!("{} rows, first failure {:?}, {:.2}s", s.rows.len(), s.first_failure, elapsed.as_secs_f64()),
    )
}

fn c3_conjecture() -> Outcome {
    let start = Instant::now();
    let t = PrimeTable::first(10_000, P).map_err(|e| e.to_string())?;
    let mut notes = Vec::new();
    let mut ok = true;
    for b in ["1.1", "2", "9"] {
        let s = conjecture_scan(&XReal::parse(b, P).unwrap(), 10_000, &t).map_err(|e| e.to_string())?;
        ok &= s.all_hold && s.rows.len() == 9_998;
        notes.push(format!("b={b}: {}", s.all_hold));
    }
    let elapsed = start.elapsed();
    check(ok && within(elapsed, 5.0), format!("{} , {:.2}s", notes.join(", "), elapsed.as_secs_f64()))
}

fn c4_identities() -> Outcome {
    const DRAWS: usize = 100;
    const TOL: f64 = 1e-15;
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let t = PrimeTable::first(10_000, P).map_err(|e| e.to_string())?;
    let mut worst = [0.0f64; 5];

    for _ in 0..DRAWS {
        let b = x(rng.gen_range(0.05..0.95));
        let xv: u64 = rng.gen_range(2..=100_000);
        let s = prime_sum_s(&b, xv, &t).unwrap();
        let pi = t.count_upto(xv).unwrap() as u64;
        let rhs = XReal::from_u64(pi, P) * XReal::u64_pow_neg(xv, &b) + &b * j_b_closed(&b, xv, &t).unwrap();
        worst[0] = worst[0].max(rel(&rhs, &s));
    }
    for _ in 0..DRAWS {
        let b = x(rng.gen_range(1.01..20.0));
        let n: usize = rng.gen_range(2..=10_000);
        let prod = g_function(t.primes()[n - 1], &b, &t).unwrap() * ratio_r(n, &b, &t).unwrap();
        worst[1] = worst[1].max(rel(&prod, &criterion_threshold(&b).unwrap()));
    }
    for _ in 0..DRAWS {
        let q: u64 = rng.gen_range(1..=20);
        let beta = x(rng.gen_range(1.05..12.0));
        let n = primorial_exact(q).unwrap();
        let v = phi_beta_big(&n, &beta).unwrap();
        let ln_n = XReal::from_float(rug::Float::with_val(P + 32, &n)).ln();
        let direct = (v.log_abs.with_prec(P + 32) + ln_n).exp();
        let logspace = kms_primorial_ratio(q as usize, &beta, &t).unwrap();
        worst[2] = worst[2].max(rel(&direct, &logspace));
    }
    for _ in 0..DRAWS {
        let n: u64 = rng.gen_range(1..=1_000_000_000_000);
        let psi1 = arith::dedekind_psi_b(n, &XReal::one(P)).unwrap();
        worst[3] = worst[3].max(rel(&psi1, &XReal::from_u64(n, P)));
    }
    for _ in 0..DRAWS {
        let n: u64 = rng.gen_range(1..=1_000_000_000_000);
        let mut exact = rug::Rational::from(n);
        for p in factorize(n).unwrap().primes() {
            exact *= rug::Rational::from((p + 1, p));
        }
        let exact = XReal::from_float(rug::Float::with_val(P, &exact));
        let psi2 = arith::dedekind_psi_b(n, &x(2.0)).unwrap();
        worst[4] = worst[4].max(rel(&psi2, &exact));
    }
    check(
        worst.iter().all(|&w| w < TOL),
        format!(
            "{DRAWS} draws each; max rel err: stieltjes {:.1e}, duality {:.1e}, kms cross-path {:.1e}, psi_1 {:.1e}, psi_2 {:.1e}",
            worst[0], worst[1], worst[2], worst[3], worst[4]
        ),
    )
}

fn c5_sandwich() -> Outcome {
    let mut violations = 0u64;
    const N_MAX: u64 = 100_000;
    for b in [1.1, 2.0, 3.0, 9.0] {
        // The upper gap n²·p^{-b} must stay resolvable for the largest prime factor.
        let prec = P + (b * (N_MAX as f64).log2()).ceil() as u32;
        let b = XReal::parse(&b.to_string(), prec).unwrap();
        let inv_zeta = zeta_real(&b).unwrap().recip();
        for n in 2..=N_MAX {
            let n2 = XReal::from_u64(n, prec) * XReal::from_u64(n, prec);
            let mid = XReal::from_u64(euler_phi(n).unwrap(), prec) * arith::dedekind_psi_b(n, &b).unwrap();
            if !(n2 > mid && mid >= &n2 * &inv_zeta) {
                violations += 1;
            }
        }
    }
    check(violations == 0, format!("n^2 > phi*psi_b >= n^2/zeta(b), 2<=n<=1e5, 4 values of b: {violations} violations"))
}

fn c6_prop1() -> Outcome {
    let t = PrimeTable::first(10_000, P).map_err(|e| e.to_string())?;
    let mut notes = Vec::new();
    let mut ok = true;
    // b = β − 1 against the rightmost reference ε.
    for (i, b) in ["1.1", "2", "9"].iter().enumerate() {
        let b = XReal::parse(b, P).unwrap();
        let reference = XReal::parse(table1::REFERENCE_EPSILON[i][3], P).unwrap();
        let sample = prop1_convergence(&b, &[10_000], &t).unwrap().last().clone();
        let increment = reference * zeta_real(&b).unwrap() / primon_core::specfun::exp_gamma(P);
        let dev = ((&sample - 1.0) - &increment).abs() / &increment;
        ok &= dev < 0.05;
        notes.push(format!("b={}: {} (dev {:.2}%)", b.to_sci_string(2), sample.to_sci_string(8), dev.to_f64() * 100.0));
    }
    check(ok, notes.join(", "))
}

fn c7_partition() -> Outcome {
    let mut ok = true;
    let mut worst_ratio = 0.0f64;
    for beta in [2u32, 3, 10] {
        for n in [100u64, 10_000, 1_000_000] {
            // Precision wide enough to resolve the bound N^{1-β}/(β−1).
            let prec = P + ((beta - 1) as f64 * (n as f64).log2()).ceil() as u32;
            let b = XReal::from_u64(beta as u64, prec);
            let gap = zeta_real(&b).unwrap() - partition_truncated(&b, n).unwrap();
            let bound = XReal::from_u64(n, prec).powf(&(1.0 - &b)) / (&b - 1.0);
            ok &= gap > 0.0 && gap <= bound;
            worst_ratio = worst_ratio.max((gap / bound).to_f64());
        }
    }
    check(ok, format!("9 (beta, N) pairs, max gap/bound {worst_ratio:.6}"))
}

fn c8_quantum() -> Outcome {
    let start = Instant::now();
    let mut pairs = 0;
    let mut ok = true;
    let mut worst_res = 0.0f64;
    let mut worst_spec = 0.0f64;
    for q in 2..=50u64 {
        let phi = euler_phi(q).unwrap();
        let lambda = carmichael_lambda(q).unwrap();
        for a in (1..q).filter(|&a| arith::gcd(a, q) == 1) {
            let r = bcq::verify_pair(a, q).map_err(|e| e.to_string())?;
            let ord = multiplicative_order(a, q).unwrap();
            ok &= r.unitary && r.multiplicative && r.r == ord;
            ok &= ord <= lambda && lambda <= phi && phi < q;
            worst_res = worst_res.max(r.max_residual);
            worst_spec = worst_spec.max(r.spectrum_deviation);
            pairs += 1;
        }
    }
    ok &= worst_res < 1e-12 && worst_spec < 1e-10;
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 8);
    let ts: Vec<f64> = (0..5).map(|_| rng.gen_range(-10.0..10.0)).collect();
    let mut worst_flow = 0.0f64;
    for a in [2u64, 3, 5] {
        let f = bcq::flow_covariance_check(a, 128, &ts).map_err(|e| e.to_string())?;
        worst_flow = worst_flow.max(f.max_deviation);
    }
    ok &= worst_flow < 1e-12;
    let elapsed = start.elapsed();
    check(
        ok && within(elapsed, 10.0),
        format!(
            "{pairs} (a,q) pairs: residual {worst_res:.1e}, spectrum {worst_spec:.1e}, flow {worst_flow:.1e}, {:.2}s",
            elapsed.as_secs_f64()
        ),
    )
}

fn c9_high_temperature() -> Outcome {
    // Envelopes pinned from an independent high-precision run.
    const DRIFT_ENVELOPE: [(f64, f64); 3] = [(0.6, 0.16), (0.75, 0.04), (0.9, 0.01)];
    let quad = Quadrature::default();
    let t = PrimeTable::up_to(1_000_100, P).map_err(|e| e.to_string())?;
    let mut ok = true;
    let mut notes = Vec::new();
    for (b, envelope) in DRIFT_ENVELOPE {
        let b = x(b);
        let d = criteria::sum_vs_integral_report(&b, &[1_000, 10_000, 100_000, 1_000_000], &t, &quad)
            .map_err(|e| e.to_string())?;
        let v: Vec<f64> = d.samples.iter().map(|s| s.1.to_f64()).collect();
        let bounded = (v[3] - v[2]).abs() < (v[2] - v[0]).abs() + 1.0;
        let k = criteria::k_b_estimate(&b, &[5_000, 10_000], &t, &quad).map_err(|e| e.to_string())?;
        let change = k.relative_change_last().to_f64();
        ok &= d.drift < envelope && bounded && change < 0.05;
        notes.push(format!("b={}: drift {:.4} (<{envelope}), K change {:.2e}", b.to_sci_string(2), d.drift.to_f64(), change));
    }
    check(ok, notes.join("; "))
}

fn c10_determinism() -> Outcome {
    let bin = env!("CARGO_BIN_EXE_primon");
    let mut notes = Vec::new();
    let mut ok = true;
    for args in [
        vec!["scan", "nicolas", "--qmax", "10000"],
        vec!["scan", "conjecture", "--b", "2", "--qmax", "10000"],
        vec!["kms", "table1"],
    ] {
        let mut outputs = Vec::new();
        for threads in ["1", "4", "16"] {
            let out = Command::new(bin)
                .args(&args)
                .args(["--threads", threads, "--format", "csv"])
                .env_remove("PRIMON_CACHE")
                .output()
                .map_err(|e| e.to_string())?;
            ok &= out.status.success();
            outputs.push(out.stdout);
        }
        let same = outputs.windows(2).all(|w| w[0] == w[1]) && !outputs[0].is_empty();
        ok &= same;
        notes.push(format!("{}: {}", args[..2].join(" "), if same { "identical" } else { "DIFFERENT" }));
    }
    check(ok, format!("threads 1/4/16: {}", notes.join(", ")))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("1 table reproduction", c1_table),
        ("2 nicolas scan", c2_nicolas),
        ("3 conjecture scan", c3_conjecture),
        ("4 exact identities", c4_identities),
        ("5 sandwich bounds", c5_sandwich),
        ("6 convergence", c6_prop1),
        ("7 partition truncation", c7_partition),
        ("8 operator suite", c8_quantum),
        ("9 high-temperature diagnostics", c9_high_temperature),
        ("10 determinism", c10_determinism),
    ];
    let mut failed = 0;
    for (name, f) in criteria {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(f).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(msg) => println!("PASS criterion {name} [{secs:.2}s]: {msg}"),
            Err(msg) => {
                failed += 1;
                println!("FAIL criterion {name} [{secs:.2}s]: {msg}");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", 10 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
