//! Argument parsing and command dispatch for the `primon` binary.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;

use primon_core::arith::{self, Scale};
use primon_core::bcq::{self, PhaseMode};
use primon_core::criteria::{self, ScanResult};
use primon_core::kms::{self, CriterionRow};
use primon_core::primes::{self, load_table, save_table};
use primon_core::specfun::{self, Quadrature};
use primon_core::{PrimeTable, XReal};

use crate::config::{OutputFormat, RunConfig};
use crate::report::{num, Provenance, Report, Verdict};
use crate::table1;

/// Exit status for operational errors.
pub const EXIT_ERROR: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "primon", version, about = "Primorial criteria, KMS margins and operator checks")]
pub struct Cli {
    /// Working precision in bits.
    #[arg(long, global = true)]
    pub prec: Option<u32>,
    /// Absolute quadrature tolerance.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Prime table cache file.
    #[arg(long, global = true, env = "PRIMON_CACHE")]
    pub cache: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<OutputFormat>,
    /// Worker threads; 0 selects the default.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// TOML run configuration; flags override its values.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Prime table queries and cache building.
    #[command(subcommand)]
    Primes(PrimesCmd),
    /// Multiplicative functions of one integer.
    #[command(subcommand)]
    Arith(ArithCmd),
    /// Special functions and prime sums.
    #[command(subcommand)]
    Specfun(SpecfunCmd),
    /// KMS values and the ε grid.
    #[command(subcommand)]
    Kms(KmsCmd),
    /// Criterion scans over primorial indices.
    #[command(subcommand)]
    Scan(ScanCmd),
    /// Dense operator identities.
    #[command(subcommand)]
    Quantum(QuantumCmd),
    /// ζ(b), γ, e^γ and e^γ/ζ(b).
    Constants {
        #[arg(long, default_value = "2")]
        b: String,
    },
}

#[derive(Debug, Subcommand)]
pub enum PrimesCmd {
    /// The n-th prime.
    Nth {
        #[arg(long, value_parser = parse_count)]
        n: u64,
    },
    /// π(x).
    Count {
        #[arg(long, value_parser = parse_count)]
        x: u64,
    },
    /// Sieve the first n primes and write them to the cache file.
    Build {
        #[arg(long, value_parser = parse_count)]
        n: u64,
    },
}

#[derive(Debug, Subcommand)]
pub enum ArithCmd {
    /// Factorization and φ, μ, λ, ψ_b.
    Factor {
        #[arg(long, value_parser = parse_count)]
        n: u64,
        #[arg(long, default_value = "2")]
        b: String,
    },
    /// Multiplicative order of a mod q.
    Order {
        #[arg(long)]
        a: u64,
        #[arg(long)]
        q: u64,
    },
}

#[derive(Debug, Subcommand)]
pub enum SpecfunCmd {
    /// Li(x) = ∫_2^x dt/ln t.
    Li {
        #[arg(long)]
        x: String,
    },
    /// ζ(b), b > 0, b ≠ 1.
    Zeta {
        #[arg(long)]
        b: String,
    },
    /// B_b(x) = ∫_2^x dt/(t^b ln t).
    Bertrand {
        #[arg(long)]
        b: String,
        #[arg(long)]
        x: String,
    },
    /// I_b(x) = ∫_2^x Li(t) dt/t^{1+b}.
    Ib {
        #[arg(long)]
        b: String,
        #[arg(long)]
        x: String,
    },
    /// S_b(x) = Σ_{p≤x} p^{-b}.
    Psum {
        #[arg(long)]
        b: String,
        #[arg(long, value_parser = parse_count)]
        x: u64,
    },
    /// ∏_{p≤x} (1 − 1/p)^{-1}.
    Mertens {
        #[arg(long, value_parser = parse_count)]
        x: u64,
    },
    /// Σ_p (ln(1 − p^{-b}) + p^{-b}) over the first n primes with a tail bound.
    Cb {
        #[arg(long)]
        b: String,
        #[arg(long, value_parser = parse_count, default_value = "1000000")]
        primes: u64,
        #[arg(long)]
        radius: Option<String>,
    },
}

#[derive(Debug, Subcommand)]
pub enum KmsCmd {
    /// ε_β(q) for one (β, q).
    Epsilon {
        #[arg(long)]
        beta: String,
        #[arg(long, value_parser = parse_count)]
        q: u64,
    },
    /// φ_β(n) for one integer n ≥ 2.
    Phi {
        #[arg(long)]
        beta: String,
        #[arg(long, value_parser = parse_count)]
        n: u64,
    },
    /// The 3×4 ε grid and primorial magnitudes.
    Table1,
}

#[derive(Debug, Subcommand)]
pub enum ScanCmd {
    /// N_n/φ(N_n) > e^γ ln ln N_n for 2 ≤ n ≤ qmax.
    Nicolas {
        #[arg(long, value_parser = parse_count, default_value = "10000")]
        qmax: u64,
    },
    /// R_b(N_n) > e^γ/ζ(b) for 3 ≤ n ≤ qmax.
    Conjecture {
        #[arg(long)]
        b: String,
        #[arg(long, value_parser = parse_count, default_value = "10000")]
        qmax: u64,
    },
    /// High-temperature diagnostics for 0.5 < b < 1.
    Asymp(AsympArgs),
}

#[derive(Debug, Args)]
pub struct AsympArgs {
    #[arg(long)]
    pub b: String,
    /// Last primorial index for the K_b ratio and the lower bound.
    #[arg(long, value_parser = parse_count, default_value = "10000")]
    pub qmax: u64,
    /// Last decade checkpoint for S_b − B_b.
    #[arg(long, value_parser = parse_count, default_value = "1000000")]
    pub xmax: u64,
    /// Slack in the lower bound.
    #[arg(long, default_value = "0.05")]
    pub epsilon: String,
    /// First index counted in the lower-bound verdict; default qmax/5.
    #[arg(long, value_parser = parse_count)]
    pub floor: Option<u64>,
}

#[derive(Debug, Subcommand)]
pub enum QuantumCmd {
    /// U_a unitarity, eigenrelations, spectrum and multiplicativity.
    Verify {
        #[arg(long)]
        q: Option<u64>,
        #[arg(long)]
        a: Option<u64>,
        /// Sweep every q in 2..=max-q.
        #[arg(long)]
        max_q: Option<u64>,
    },
    /// exp(itH_0) μ_a exp(−itH_0) against a^{it} μ_a.
    Flow {
        #[arg(long)]
        a: u64,
        #[arg(long, default_value = "128")]
        n: usize,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, default_value = "0,1.7,-0.4")]
        t: Vec<f64>,
    },
    /// Diagonal of a phase operator.
    Phase {
        #[arg(long)]
        num: u64,
        #[arg(long)]
        den: u64,
        #[arg(long)]
        d: usize,
        #[arg(long)]
        clock: bool,
    },
}

/// Accepts plain integers and exact forms like `1e6`.
fn parse_count(s: &str) -> Result<u64, String> {
    if let Ok(v) = s.parse::<u64>() {
        return Ok(v);
    }
    let (m, e) = s.split_once(['e', 'E']).ok_or_else(|| format!("not an integer: {s}"))?;
    let m: u64 = m.parse().map_err(|_| format!("not an integer: {s}"))?;
    let e: u32 = e.parse().map_err(|_| format!("bad exponent in {s}"))?;
    10u64
        .checked_pow(e)
        .and_then(|p| p.checked_mul(m))
        .ok_or_else(|| format!("{s} overflows u64"))
}

/// Resolved settings shared by every command.
pub struct RunContext {
    pub config: RunConfig,
    provenance: Provenance,
}

impl RunContext {
    fn real(&self, s: &str, name: &str) -> anyhow::Result<XReal> {
        XReal::parse(s, self.config.precision_bits).ok_or_else(|| anyhow!("--{name}: not a number: {s}"))
    }

    fn quadrature(&self) -> Quadrature {
        Quadrature::with_tolerance(self.config.quadrature_tolerance)
    }

    fn provenance(&self) -> Provenance {
        self.provenance.clone()
    }

    /// The first `count` primes, from the cache when it is long enough.
    /// A missing or short cache is (re)written after sieving.
    fn table(&mut self, count: u64) -> anyhow::Result<PrimeTable> {
        let prec = self.config.precision_bits;
        let table = match &self.config.prime_cache_path {
            Some(path) if path.exists() => {
                let cached = load_table(path, prec).with_context(|| format!("prime cache {}", path.display()))?;
                if cached.len() as u64 >= count {
                    PrimeTable::from_primes(cached.primes()[..count as usize].to_vec(), prec)
                } else {
                    let fresh = PrimeTable::first(count, prec)?;
                    save_table(&fresh, path).with_context(|| format!("writing prime cache {}", path.display()))?;
                    fresh
                }
            }
            Some(path) => {
                let fresh = PrimeTable::first(count, prec)?;
                save_table(&fresh, path).with_context(|| format!("writing prime cache {}", path.display()))?;
                fresh
            }
            None => PrimeTable::first(count, prec)?,
        };
        self.provenance.table_checksum = Some(table.checksum());
        self.provenance.table_primes = Some(table.len());
        Ok(table)
    }

    /// A table whose largest prime exceeds `x`.
    fn table_covering(&mut self, x: u64) -> anyhow::Result<PrimeTable> {
        let count = primes::prime_count(x)? + 1;
        self.table(count)
    }
}

/// Resolves configuration from file, environment and flags.
pub fn resolve_config(cli: &Cli) -> anyhow::Result<RunConfig> {
    let mut cfg = match &cli.config {
        Some(p) => RunConfig::from_file(p)?,
        None => RunConfig::default(),
    };
    if let Some(p) = cli.prec {
        cfg.precision_bits = p;
    }
    if let Some(t) = cli.tol {
        cfg.quadrature_tolerance = t;
    }
    if let Some(c) = &cli.cache {
        cfg.prime_cache_path = Some(c.clone());
    }
    if let Some(f) = cli.format {
        cfg.output_format = f;
    }
    if let Some(n) = cli.threads {
        cfg.thread_count = n;
    }
    cfg.validate()?;
    Ok(cfg)
}

/// Parses `args`, runs the command and returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, diag: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_ERROR } else { 0 };
            let _ = write!(diag, "{e}");
            return code;
        }
    };
    match execute(&cli, out, diag) {
        Ok(v) => v.exit_code(),
        Err(e) => {
            let _ = writeln!(diag, "error: {e:#}");
            EXIT_ERROR
        }
    }
}

fn execute(cli: &Cli, out: &mut dyn Write, diag: &mut dyn Write) -> anyhow::Result<Verdict> {
    let config = resolve_config(cli)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.thread_count)
        .build()
        .context("building thread pool")?;
    let format = config.output_format;
    let mut ctx = RunContext {
        provenance: Provenance {
            precision_bits: config.precision_bits,
            quadrature_tolerance: config.quadrature_tolerance,
            ..Provenance::default()
        },
        config,
    };
    let report = pool.install(|| dispatch(&cli.command, &mut ctx))?;
    report.write(format, out, diag)?;
    Ok(report.verdict)
}

/// Runs one command to a report.
pub fn dispatch(cmd: &Command, ctx: &mut RunContext) -> anyhow::Result<Report> {
    match cmd {
        Command::Primes(c) => cmd_primes(c, ctx),
        Command::Arith(c) => cmd_arith(c, ctx),
        Command::Specfun(c) => cmd_specfun(c, ctx),
        Command::Kms(KmsCmd::Table1) => cmd_table1(ctx),
        Command::Kms(c) => cmd_kms(c, ctx),
        Command::Scan(ScanCmd::Asymp(a)) => cmd_asymp(a, ctx),
        Command::Scan(c) => cmd_scan(c, ctx),
        Command::Quantum(c) => cmd_quantum(c, ctx),
        Command::Constants { b } => cmd_constants(b, ctx),
    }
}

const ROW_COLUMNS: [&str; 7] = ["n", "p_n", "log_N", "ratio", "threshold", "epsilon", "holds"];

fn criterion_cells(r: &CriterionRow) -> Vec<String> {
    vec![
        r.q.to_string(),
        r.p_q.to_string(),
        num(&r.log_n),
        num(&r.ratio),
        num(&r.threshold),
        num(&r.epsilon),
        r.holds.to_string(),
    ]
}

fn scan_report(name: &str, scan: &ScanResult, ctx: &RunContext) -> Report {
    let mut rep = Report::new(name, ROW_COLUMNS.to_vec(), ctx.provenance());
    for r in &scan.rows {
        rep.push_row(criterion_cells(r));
    }
    rep.summarize("rows", scan.rows.len().to_string());
    rep.summarize("all_hold", scan.all_hold.to_string());
    rep.summarize(
        "first_failure",
        scan.first_failure.map_or_else(|| "none".to_string(), |q| q.to_string()),
    );
    for f in scan.failures() {
        rep.summarize("FAILURE", format!("q={} b={} margin={}", f.q, num(&f.b), num(&f.margin)));
    }
    if scan.excluded > 0 {
        rep.summarize("excluded_below_floor", scan.excluded.to_string());
    }
    rep.verdict = Verdict::from_bool(scan.all_hold);
    rep
}

fn index(q: u64) -> anyhow::Result<usize> {
    usize::try_from(q).map_err(|_| anyhow!("index {q} too large"))
}

fn cmd_primes(c: &PrimesCmd, ctx: &mut RunContext) -> anyhow::Result<Report> {
    match c {
        PrimesCmd::Nth { n } => {
            if *n == 0 {
                bail!("--n must be >= 1");
            }
            let mut rep = Report::new("primes nth", vec!["n", "p_n"], ctx.provenance());
            rep.push_row(vec![n.to_string(), primes::nth_prime(*n)?.to_string()]);
            Ok(rep)
        }
        PrimesCmd::Count { x } => {
            let mut rep = Report::new("primes count", vec!["x", "pi_x"], ctx.provenance());
            rep.push_row(vec![x.to_string(), primes::prime_count(*x)?.to_string()]);
            Ok(rep)
        }
        PrimesCmd::Build { n } => {
            let path = ctx
                .config
                .prime_cache_path
                .clone()
                .ok_or_else(|| anyhow!("primes build needs --cache or PRIMON_CACHE"))?;
            let t = PrimeTable::first(*n, ctx.config.precision_bits)?;
            save_table(&t, &path).with_context(|| format!("writing prime cache {}", path.display()))?;
            ctx.provenance.table_checksum = Some(t.checksum());
            ctx.provenance.table_primes = Some(t.len());
            let mut rep = Report::new("primes build", vec!["count", "largest", "theta", "checksum"], ctx.provenance());
            rep.push_row(vec![
                t.len().to_string(),
                t.largest().to_string(),
                num(t.theta_prefix().last().expect("nonempty")),
                format!("{:08x}", t.checksum()),
            ]);
            Ok(rep)
        }
    }
}

fn cmd_arith(c: &ArithCmd, ctx: &mut RunContext) -> anyhow::Result<Report> {
    match c {
        ArithCmd::Factor { n, b } => {
            let b = ctx.real(b, "b")?;
            let f = arith::factorize(*n)?;
            let mut rep = Report::new("arith factor", vec!["p", "k"], ctx.provenance());
            for &(p, k) in f.pairs() {
                rep.push_row(vec![p.to_string(), k.to_string()]);
            }
            rep.summarize("n", n.to_string());
            rep.summarize("phi", arith::euler_phi(*n)?.to_string());
            rep.summarize("mu", arith::mobius(*n)?.to_string());
            rep.summarize("lambda", arith::carmichael_lambda(*n)?.to_string());
            rep.summarize("psi_b", num(&arith::dedekind_psi_b(*n, &b)?));
            rep.summarize("log_psi_b", num(&arith::dedekind_psi_b_with(*n, &b, Scale::Log)?));
            Ok(rep)
        }
        ArithCmd::Order { a, q } => {
            let mut rep = Report::new("arith order", vec!["a", "q", "order", "lambda", "phi"], ctx.provenance());
            rep.push_row(vec![
                a.to_string(),
                q.to_string(),
                arith::multiplicative_order(*a, *q)?.to_string(),
                arith::carmichael_lambda(*q)?.to_string(),
                arith::euler_phi(*q)?.to_string(),
            ]);
            Ok(rep)
        }
    }
}

fn value_report(name: &str, value: &XReal, error: Option<&XReal>, ctx: &RunContext) -> Report {
    let mut rep = Report::new(name, vec!["value", "error_bound"], ctx.provenance());
    rep.push_row(vec![num(value), error.map_or_else(String::new, num)]);
    rep
}

fn cmd_specfun(c: &SpecfunCmd, ctx: &mut RunContext) -> anyhow::Result<Report> {
    let quad = ctx.quadrature();
    match c {
        SpecfunCmd::Li { x } => {
            let r = specfun::li_offset(&ctx.real(x, "x")?, &quad)?;
            Ok(value_report("specfun li", &r.value, Some(&r.error), ctx))
        }
        SpecfunCmd::Zeta { b } => {
            let b = ctx.real(b, "b")?;
            if b > 1.0 {
                let (v, e) = specfun::zeta_with_error(&b)?;
                Ok(value_report("specfun zeta", &v, Some(&e), ctx))
            } else {
                Ok(value_report("specfun zeta", &specfun::zeta_positive(&b)?, None, ctx))
            }
        }
        SpecfunCmd::Bertrand { b, x } => {
            let r = specfun::bertrand_b(&ctx.real(b, "b")?, &ctx.real(x, "x")?, &quad)?;
            Ok(value_report("specfun bertrand", &r.value, Some(&r.error), ctx))
        }
        SpecfunCmd::Ib { b, x } => {
            let r = specfun::i_b(&ctx.real(b, "b")?, &ctx.real(x, "x")?, &quad)?;
            Ok(value_report("specfun ib", &r.value, Some(&r.error), ctx))
        }
        SpecfunCmd::Psum { b, x } => {
            let b = ctx.real(b, "b")?;
            let t = ctx.table_covering(*x)?;
            Ok(value_report("specfun psum", &specfun::prime_sum_s(&b, *x, &t)?, None, ctx))
        }
        SpecfunCmd::Mertens { x } => {
            let t = ctx.table_covering(*x)?;
            Ok(value_report("specfun mertens", &specfun::mertens_product(*x, &t)?, None, ctx))
        }
        SpecfunCmd::Cb { b, primes, radius } => {
            let b = ctx.real(b, "b")?;
            let radius = radius.as_deref().map(|r| ctx.real(r, "radius")).transpose()?;
            let t = ctx.table(*primes)?;
            let v = specfun::c_b_constant(&b, &t, radius.as_ref())?;
            let mut rep = value_report("specfun cb", &v.value, Some(&v.tail_radius), ctx);
            rep.summarize("primes_used", v.primes_used.to_string());
            Ok(rep)
        }
    }
}

fn cmd_kms(c: &KmsCmd, ctx: &mut RunContext) -> anyhow::Result<Report> {
    match c {
        KmsCmd::Epsilon { beta, q } => {
            let beta = ctx.real(beta, "beta")?;
            let t = ctx.table(*q)?;
            let row = kms::epsilon_beta(index(*q)?, &beta, &t)?;
            let mut rep = Report::new("kms epsilon", ROW_COLUMNS.to_vec(), ctx.provenance());
            rep.push_row(criterion_cells(&row));
            rep.summarize("beta", num(&row.beta));
            rep.summarize("regime", row.regime.label());
            rep.verdict = Verdict::from_bool(row.holds);
            Ok(rep)
        }
        KmsCmd::Phi { beta, n } => {
            let v = kms::phi_beta(*n, &ctx.real(beta, "beta")?)?;
            let mut rep = Report::new("kms phi", vec!["n", "sign", "log_abs", "value"], ctx.provenance());
            rep.push_row(vec![n.to_string(), v.sign.to_string(), num(&v.log_abs), num(&v.value())]);
            if v.vanishing_factor {
                rep.summarize("vanishing_factor", "true");
            }
            Ok(rep)
        }
        KmsCmd::Table1 => unreachable!("dispatched separately"),
    }
}

/// The ε grid and magnitudes; passes iff every ε is positive.
pub fn cmd_table1(ctx: &mut RunContext) -> anyhow::Result<Report> {
    let t = ctx.table(*table1::QS.last().unwrap() as u64)?;
    let eps = table1::epsilon_grid(&t)?;
    let mags = table1::magnitude_grid(&t)?;
    let mut rep = Report::new(
        "kms table1",
        vec!["kind", "beta", "q", "p_q", "value", "display", "reference", "matches"],
        ctx.provenance(),
    );
    for m in &mags {
        rep.push_row(vec![
            "N_q".into(),
            String::new(),
            m.q.to_string(),
            t.primes()[m.q - 1].to_string(),
            m.display(),
            m.display(),
            m.reference.into(),
            m.matches.to_string(),
        ]);
    }
    for c in &eps {
        rep.push_row(vec![
            "epsilon".into(),
            c.beta.into(),
            c.row.q.to_string(),
            c.row.p_q.to_string(),
            num(&c.row.epsilon),
            c.row.epsilon.to_sci_string(2),
            c.reference.into(),
            c.matches.to_string(),
        ]);
    }
    let all_positive = eps.iter().all(|c| c.row.holds);
    let matched = eps.iter().filter(|c| c.matches).count() + mags.iter().filter(|m| m.matches).count();
    rep.summarize("all_positive", all_positive.to_string());
    rep.summarize("reference_matches", format!("{matched}/{}", eps.len() + mags.len()));
    for m in mags.iter().filter_map(|m| m.note.as_ref()) {
        rep.summarize("note", m.clone());
    }
    rep.verdict = Verdict::from_bool(all_positive);
    Ok(rep)
}

fn cmd_scan(c: &ScanCmd, ctx: &mut RunContext) -> anyhow::Result<Report> {
    match c {
        ScanCmd::Nicolas { qmax } => {
            let t = ctx.table(*qmax)?;
            let scan = criteria::nicolas_scan(index(*qmax)?, &t)?;
            Ok(scan_report("scan nicolas", &scan, ctx))
        }
        ScanCmd::Conjecture { b, qmax } => {
            let b = ctx.real(b, "b")?;
            let t = ctx.table(*qmax)?;
            let scan = criteria::conjecture_scan(&b, index(*qmax)?, &t)?;
            let mut rep = scan_report("scan conjecture", &scan, ctx);
            rep.summarize("b", num(&b));
            Ok(rep)
        }
        ScanCmd::Asymp(_) => unreachable!("dispatched separately"),
    }
}

/// Relative change of the K_b ratio accepted as stabilized.
pub const STABILIZATION_LIMIT: f64 = 0.05;

fn cmd_asymp(a: &AsympArgs, ctx: &mut RunContext) -> anyhow::Result<Report> {
    let b = ctx.real(&a.b, "b")?;
    let eps = ctx.real(&a.epsilon, "epsilon")?;
    if a.xmax < 1_000 {
        bail!("--xmax must be >= 1000");
    }
    if a.qmax < 10 {
        bail!("--qmax must be >= 10");
    }
    let quad = ctx.quadrature();
    let qmax = a.qmax;
    let t_count = qmax.max(primes::prime_count(a.xmax)? + 1);
    let t = ctx.table(t_count)?;
    let mut decades = Vec::new();
    let mut x = 1_000u64;
    while x <= a.xmax {
        decades.push(x);
        x = match x.checked_mul(10) {
            Some(v) => v,
            None => break,
        };
    }
    let drift = criteria::sum_vs_integral_report(&b, &decades, &t, &quad)?;
    let kb_points = [qmax / 5, qmax / 2, qmax];
    let kb = criteria::k_b_estimate(&b, &kb_points, &t, &quad)?;
    let floor = a.floor.unwrap_or(qmax / 5);
    let lower = criteria::lower_bound_check(&b, &eps, kb.last(), 2..=index(qmax)?, index(floor)?, &t, &quad)?;

    let mut rep = Report::new("scan asymp", vec!["section", "index", "value", "threshold", "holds"], ctx.provenance());
    for (x, d) in &drift.samples {
        rep.push_row(vec!["S_minus_B".into(), x.to_string(), num(d), String::new(), String::new()]);
    }
    for (n, r) in &kb.samples {
        rep.push_row(vec!["K_ratio".into(), n.to_string(), num(r), String::new(), String::new()]);
    }
    for r in &lower.rows {
        rep.push_row(vec![
            "lower_bound".into(),
            r.q.to_string(),
            num(&r.ratio),
            num(&r.threshold),
            r.holds.to_string(),
        ]);
    }
    let stable = kb.relative_change_last() < STABILIZATION_LIMIT;
    rep.summarize("b", num(&b));
    rep.summarize("drift", num(&drift.drift));
    rep.summarize("trend", format!("{:?}", drift.trend).to_lowercase());
    rep.summarize("k_hat", num(kb.last()));
    rep.summarize("k_relative_change", num(&kb.relative_change_last()));
    rep.summarize("k_stable", stable.to_string());
    rep.summarize("lower_bound_all_hold", lower.all_hold.to_string());
    rep.summarize("excluded_below_floor", lower.excluded.to_string());
    rep.verdict = Verdict::from_bool(stable && lower.all_hold);
    Ok(rep)
}

fn cmd_quantum(c: &QuantumCmd, ctx: &mut RunContext) -> anyhow::Result<Report> {
    match c {
        QuantumCmd::Verify { q, a, max_q } => {
            let pairs: Vec<(u64, u64)> = match (q, max_q) {
                (Some(q), None) => match a {
                    Some(a) => vec![(*a, *q)],
                    None => (1..*q).filter(|&a| arith::gcd(a, *q) == 1).map(|a| (a, *q)).collect(),
                },
                (None, Some(m)) => (2..=*m)
                    .flat_map(|q| (1..q).filter(move |&a| arith::gcd(a, q) == 1).map(move |a| (a, q)))
                    .collect(),
                _ => bail!("give exactly one of --q or --max-q"),
            };
            let reports: Vec<_> = pairs
                .par_iter()
                .map(|&(a, q)| bcq::verify_pair(a, q))
                .collect::<Result<_, _>>()?;
            let mut rep = Report::new(
                "quantum verify",
                vec!["q", "a", "r", "max_residual", "spectrum_deviation", "unitary", "multiplicative"],
                ctx.provenance(),
            );
            let mut ok = true;
            for r in &reports {
                ok &= r.unitary && r.multiplicative && r.max_residual < 1e-12 && r.spectrum_deviation < 1e-10;
                rep.push_row(vec![
                    r.q.to_string(),
                    r.a.to_string(),
                    r.r.to_string(),
                    format!("{:.3e}", r.max_residual),
                    format!("{:.3e}", r.spectrum_deviation),
                    r.unitary.to_string(),
                    r.multiplicative.to_string(),
                ]);
            }
            rep.summarize("pairs", reports.len().to_string());
            rep.summarize("all_pass", ok.to_string());
            rep.verdict = Verdict::from_bool(ok);
            Ok(rep)
        }
        QuantumCmd::Flow { a, n, t } => {
            let f = bcq::flow_covariance_check(*a, *n, t)?;
            let mut rep = Report::new("quantum flow", vec!["t", "max_deviation"], ctx.provenance());
            for (tv, d) in &f.per_t {
                rep.push_row(vec![tv.to_string(), format!("{d:.3e}")]);
            }
            rep.summarize("checked", f.checked.to_string());
            rep.summarize("clipped", f.clipped.to_string());
            rep.verdict = Verdict::from_bool(f.max_deviation < 1e-12);
            Ok(rep)
        }
        QuantumCmd::Phase { num: p, den, d, clock } => {
            let mode = if *clock { PhaseMode::Clock } else { PhaseMode::Printed };
            let op = bcq::build_phase_operator(*p, *den, *d, mode)?;
            let mut rep = Report::new("quantum phase", vec!["n", "re", "im"], ctx.provenance());
            for (i, z) in op.matrix().diagonal().iter().enumerate() {
                rep.push_row(vec![i.to_string(), format!("{:.17e}", z.re), format!("{:.17e}", z.im)]);
            }
            rep.summarize("mode", format!("{mode:?}").to_lowercase());
            Ok(rep)
        }
    }
}

fn cmd_constants(b: &str, ctx: &mut RunContext) -> anyhow::Result<Report> {
    let b = ctx.real(b, "b")?;
    let prec = ctx.config.precision_bits;
    let z = specfun::zeta_positive(&b)?;
    let eg = specfun::exp_gamma(prec);
    let mut rep = Report::new("constants", vec!["name", "value"], ctx.provenance());
    rep.push_row(vec!["b".into(), num(&b)]);
    rep.push_row(vec!["zeta_b".into(), num(&z)]);
    rep.push_row(vec!["gamma".into(), num(&specfun::euler_gamma(prec))]);
    rep.push_row(vec!["exp_gamma".into(), num(&eg)]);
    rep.push_row(vec!["exp_gamma_over_zeta_b".into(), num(&(&eg / &z))]);
    Ok(rep)
}
