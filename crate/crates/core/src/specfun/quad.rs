//! Globally adaptive Gauss–Legendre quadrature in extended precision.
//!
//! Every live interval carries two estimates: the rule applied once over the
//! interval, and the sum of the rule over its two halves. Their difference is
//! the interval's error estimate, and the interval with the largest estimate
//! is bisected next. A bisected half reuses its already-computed single-panel
//! value as its coarse estimate, so each refinement costs two new panels.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use crate::error::{Error, Result};
use crate::xreal::{CompensatedSum, XReal};

/// Guard bits added to the caller's precision while integrating.
pub const GUARD_BITS: u32 = 32;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Scheme {
    GaussLegendre { order: usize },
}

/// Quadrature settings: scheme, absolute tolerance, subdivision cap.
#[derive(Clone, Debug)]
pub struct Quadrature {
    pub scheme: Scheme,
    pub tolerance: f64,
    pub max_subdivisions: usize,
}

impl Default for Quadrature {
    fn default() -> Self {
        Quadrature {
            scheme: Scheme::GaussLegendre { order: 20 },
            tolerance: 1e-20,
            max_subdivisions: 2000,
        }
    }
}

#[derive(Clone, Debug)]
pub struct QuadResult {
    pub value: XReal,
    pub error: XReal,
    pub subdivisions: usize,
}

impl QuadResult {
    pub fn zero(prec: u32) -> Self {
        QuadResult {
            value: XReal::zero(prec),
            error: XReal::zero(prec),
            subdivisions: 0,
        }
    }
}

type Rule = Arc<Vec<(XReal, XReal)>>;

/// Nodes and weights of the `order`-point Gauss–Legendre rule on [-1, 1],
/// by Newton iteration on the Legendre recurrence.
fn gauss_legendre(order: usize, prec: u32) -> Rule {
    static CACHE: OnceLock<Mutex<HashMap<(usize, u32), Rule>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(rule) = cache.lock().unwrap().get(&(order, prec)) {
        return rule.clone();
    }
    let wp = prec + 16;
    let n = order as f64;
    let mut rule = Vec::with_capacity(order);
    for i in 0..order {
        let guess = (std::f64::consts::PI * (i as f64 + 0.75) / (n + 0.5)).cos();
        let mut x = XReal::from_f64(guess, wp);
        let mut deriv = XReal::zero(wp);
        for _ in 0..100 {
            let (p, dp) = legendre(order, &x);
            let step = &p / &dp;
            x = &x - &step;
            deriv = dp;
            if step.is_zero() || step.abs() < x.ulp().abs() * 4.0 {
                let (_, dp) = legendre(order, &x);
                deriv = dp;
                break;
            }
        }
        let one_minus = 1.0 - &x * &x;
        let w = XReal::from_f64(2.0, wp) / (one_minus * &deriv * &deriv);
        rule.push((x.with_prec(prec), w.with_prec(prec)));
    }
    let rule = Arc::new(rule);
    cache.lock().unwrap().insert((order, prec), rule.clone());
    rule
}

/// (P_n(x), P_n'(x)).
fn legendre(n: usize, x: &XReal) -> (XReal, XReal) {
    let prec = x.prec();
    let mut p0 = XReal::one(prec);
    let mut p1 = x.clone();
    for k in 2..=n {
        let kf = k as f64;
        let p2 = (x * &p1 * (2.0 * kf - 1.0) - &p0 * (kf - 1.0)) / kf;
        p0 = p1;
        p1 = p2;
    }
    let dp = (x * &p1 - &p0) * (n as f64) / (x * x - 1.0);
    (p1, dp)
}

struct Panel {
    a: XReal,
    b: XReal,
    coarse: XReal,
    left: XReal,
    right: XReal,
}

impl Panel {
    fn fine(&self) -> XReal {
        &self.left + &self.right
    }
    fn error(&self) -> XReal {
        (&self.coarse - self.fine()).abs()
    }
}

impl Quadrature {
    pub fn with_tolerance(tolerance: f64) -> Self {
        Quadrature {
            tolerance,
            ..Default::default()
        }
    }

    fn apply<F: Fn(&XReal) -> XReal>(&self, rule: &Rule, f: &F, a: &XReal, b: &XReal) -> XReal {
        let half = (b - a) * 0.5;
        let mid = (a + b) * 0.5;
        let mut acc = CompensatedSum::new(a.prec());
        for (x, w) in rule.iter() {
            acc.add(&(w * f(&(&mid + &(&half * x)))));
        }
        acc.value() * half
    }

    fn panel<F: Fn(&XReal) -> XReal>(&self, rule: &Rule, f: &F, a: XReal, b: XReal, coarse: XReal) -> Panel {
        let m = (&a + &b) * 0.5;
        let left = self.apply(rule, f, &a, &m);
        let right = self.apply(rule, f, &m, &b);
        Panel { a, b, coarse, left, right }
    }

    /// ∫_a^b f. `f` receives arguments at `prec + GUARD_BITS` bits; the value and
    /// error estimate are returned at `prec` bits.
    pub fn integrate<F>(&self, f: F, a: &XReal, b: &XReal, prec: u32) -> Result<QuadResult>
    where
        F: Fn(&XReal) -> XReal,
    {
        if a == b {
            return Ok(QuadResult::zero(prec));
        }
        let wp = prec + GUARD_BITS;
        let Scheme::GaussLegendre { order } = self.scheme;
        let rule = gauss_legendre(order, wp);
        let a = a.with_prec(wp);
        let b = b.with_prec(wp);
        let whole = self.apply(&rule, &f, &a, &b);
        let mut panels = vec![self.panel(&rule, &f, a, b, whole)];
        let mut subdivisions = 0;
        loop {
            let mut total_err = CompensatedSum::new(wp);
            let mut worst = 0;
            let mut worst_err = XReal::zero(wp);
            for (i, p) in panels.iter().enumerate() {
                let e = p.error();
                total_err.add(&e);
                if e > worst_err {
                    worst_err = e;
                    worst = i;
                }
            }
            let total_err = total_err.value();
            if total_err <= self.tolerance {
                let mut value = CompensatedSum::new(wp);
                for p in &panels {
                    value.add(&p.fine());
                }
                return Ok(QuadResult {
                    value: value.value().with_prec(prec),
                    error: total_err.with_prec(prec),
                    subdivisions,
                });
            }
            if subdivisions >= self.max_subdivisions {
                return Err(Error::Quadrature {
                    subdivisions,
                    estimate: total_err.to_sci_string(6),
                });
            }
            let p = panels.swap_remove(worst);
            let m = (&p.a + &p.b) * 0.5;
            panels.push(self.panel(&rule, &f, p.a, m.clone(), p.left));
            panels.push(self.panel(&rule, &f, m, p.b, p.right));
            subdivisions += 1;
        }
    }
}
