//! Dense toy-scale operators: modular multiplication permutations `U_a`, their
//! Fourier eigenvectors, phase operators, the logarithmic Hamiltonian `H_0`
//! and the time-evolution covariance of the isometry `μ_a`.
//!
//! Everything here is `f64` complex arithmetic on matrices of dimension at most
//! [`MAX_DIM`].

use std::f64::consts::TAU;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::arith::{gcd, multiplicative_order};
use crate::error::{domain, Error, Result};

/// Dimension cap for every dense operator.
pub const MAX_DIM: usize = 4096;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

fn check_dim(d: usize, what: &'static str) -> Result<()> {
    if d == 0 {
        return domain(format!("{what}: dimension must be positive"));
    }
    if d > MAX_DIM {
        return Err(Error::ResourceLimit {
            what,
            requested: d as u64,
            cap: MAX_DIM as u64,
        });
    }
    Ok(())
}

/// Normalized-or-not complex vector over a fixed list of basis labels.
#[derive(Clone, Debug)]
pub struct StateVector {
    labels: Vec<u64>,
    amps: Vec<Complex64>,
    norm: f64,
}

impl StateVector {
    pub fn new(labels: Vec<u64>, amps: Vec<Complex64>) -> Result<Self> {
        if labels.len() != amps.len() {
            return domain(format!("{} labels for {} amplitudes", labels.len(), amps.len()));
        }
        let norm = euclid(&amps);
        Ok(StateVector { labels, amps, norm })
    }

    /// Basis `|0⟩..|q-1⟩` of residues mod q.
    pub fn residues(q: u64, amps: Vec<Complex64>) -> Result<Self> {
        Self::new((0..q).collect(), amps)
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn labels(&self) -> &[u64] {
        &self.labels
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    /// Norm stored at construction.
    pub fn norm(&self) -> f64 {
        self.norm
    }

    pub fn recomputed_norm(&self) -> f64 {
        euclid(&self.amps)
    }

    /// ⟨self|other⟩, conjugate-linear in `self`. Labels must agree.
    pub fn inner(&self, other: &StateVector) -> Result<Complex64> {
        if self.labels != other.labels {
            return domain("inner product of vectors on different bases");
        }
        Ok(self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum())
    }

    /// ‖self − other‖. Labels must agree.
    pub fn distance(&self, other: &StateVector) -> Result<f64> {
        if self.labels != other.labels {
            return domain("distance between vectors on different bases");
        }
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt())
    }

    pub fn scaled(&self, c: Complex64) -> StateVector {
        let amps: Vec<_> = self.amps.iter().map(|a| a * c).collect();
        StateVector {
            labels: self.labels.clone(),
            norm: euclid(&amps),
            amps,
        }
    }
}

fn euclid(v: &[Complex64]) -> f64 {
    v.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
}

/// Structural tag of an operator.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OpTag {
    Permutation,
    Diagonal,
    General,
}

/// Dense square complex matrix with a structural tag.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearOperator {
    matrix: DMatrix<Complex64>,
    tag: OpTag,
}

impl LinearOperator {
    /// Wraps a matrix, checking that it satisfies `tag`.
    pub fn new(matrix: DMatrix<Complex64>, tag: OpTag) -> Result<Self> {
        if !matrix.is_square() {
            return domain("operator matrix must be square");
        }
        check_dim(matrix.nrows(), "operator dimension")?;
        let op = LinearOperator { matrix, tag };
        if !op.satisfies_tag() {
            return domain(format!("matrix does not have {tag:?} structure"));
        }
        Ok(op)
    }

    pub fn identity(d: usize) -> Result<Self> {
        check_dim(d, "operator dimension")?;
        Ok(LinearOperator {
            matrix: DMatrix::identity(d, d),
            tag: OpTag::Permutation,
        })
    }

    fn from_diagonal(diag: &[Complex64]) -> Self {
        LinearOperator {
            matrix: DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(diag)),
            tag: OpTag::Diagonal,
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn tag(&self) -> OpTag {
        self.tag
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    /// Exactly one unit entry per row and column (permutation tag), or zero
    /// off-diagonal entries (diagonal tag).
    pub fn satisfies_tag(&self) -> bool {
        let m = &self.matrix;
        let d = m.nrows();
        match self.tag {
            OpTag::General => true,
            OpTag::Diagonal => (0..d).all(|i| (0..d).all(|j| i == j || m[(i, j)] == ZERO)),
            OpTag::Permutation => {
                let unit_rows = (0..d).all(|i| {
                    let row: Vec<_> = (0..d).map(|j| m[(i, j)]).collect();
                    row.iter().filter(|&&z| z == ONE).count() == 1
                        && row.iter().all(|&z| z == ONE || z == ZERO)
                });
                let unit_cols = (0..d).all(|j| (0..d).filter(|&i| m[(i, j)] == ONE).count() == 1);
                unit_rows && unit_cols
            }
        }
    }

    pub fn adjoint(&self) -> LinearOperator {
        LinearOperator {
            matrix: self.matrix.adjoint(),
            tag: self.tag,
        }
    }

    /// `self · other`; the tag survives when both tags agree.
    pub fn compose(&self, other: &LinearOperator) -> Result<LinearOperator> {
        if self.dim() != other.dim() {
            return domain(format!("dimension mismatch {} vs {}", self.dim(), other.dim()));
        }
        if self.tag == OpTag::Permutation && other.tag == OpTag::Permutation {
            return Ok(self.compose_permutations(other));
        }
        let tag = if self.tag == other.tag { self.tag } else { OpTag::General };
        Ok(LinearOperator {
            matrix: &self.matrix * &other.matrix,
            tag,
        })
    }

    /// Row index of the unit entry in each column.
    fn unit_rows(&self) -> Vec<usize> {
        let d = self.dim();
        (0..d)
            .map(|j| (0..d).find(|&i| self.matrix[(i, j)] == ONE).expect("permutation column"))
            .collect()
    }

    /// Product of two permutation matrices, entry-exact and O(d²).
    fn compose_permutations(&self, other: &LinearOperator) -> LinearOperator {
        let d = self.dim();
        let (outer, inner) = (self.unit_rows(), other.unit_rows());
        let mut m = DMatrix::from_element(d, d, ZERO);
        for j in 0..d {
            m[(outer[inner[j]], j)] = ONE;
        }
        LinearOperator {
            matrix: m,
            tag: OpTag::Permutation,
        }
    }

    pub fn apply(&self, v: &StateVector) -> Result<StateVector> {
        if v.dim() != self.dim() {
            return domain(format!("vector of dimension {} for operator of dimension {}", v.dim(), self.dim()));
        }
        let x = nalgebra::DVector::from_column_slice(&v.amps);
        let y = &self.matrix * x;
        StateVector::new(v.labels.clone(), y.iter().copied().collect())
    }

    /// `U† U == I` entry by entry, with no tolerance.
    pub fn is_exactly_unitary(&self) -> bool {
        let d = self.dim();
        self.matrix.adjoint() * &self.matrix == DMatrix::identity(d, d)
    }

    pub fn trace(&self) -> Complex64 {
        self.matrix.trace()
    }

    /// `exp(c · self)` for a diagonal operator.
    pub fn exp_diagonal(&self, c: Complex64) -> Result<LinearOperator> {
        if self.tag != OpTag::Diagonal {
            return domain("exp_diagonal needs a diagonal-tagged operator");
        }
        let diag: Vec<_> = self.matrix.diagonal().iter().map(|h| (c * h).exp()).collect();
        Ok(Self::from_diagonal(&diag))
    }
}

fn check_unit(a: u64, q: u64) -> Result<u64> {
    if q < 2 || q as usize > MAX_DIM {
        return domain(format!("modulus must satisfy 2 <= q <= {MAX_DIM}, got {q}"));
    }
    if gcd(a, q) != 1 {
        return domain(format!("not unitary: a = {a} has no inverse mod q = {q}"));
    }
    Ok(a % q)
}

/// `U_a|n⟩ = |a n mod q⟩` on residues `0..q`.
pub fn build_ua(a: u64, q: u64) -> Result<LinearOperator> {
    let a = check_unit(a, q)?;
    let d = q as usize;
    let mut m = DMatrix::from_element(d, d, ZERO);
    for n in 0..q {
        m[(((a as u128 * n as u128) % q as u128) as usize, n as usize)] = ONE;
    }
    Ok(LinearOperator {
        matrix: m,
        tag: OpTag::Permutation,
    })
}

/// `j0, a j0, a² j0, …` mod q until the first repeat.
pub fn orbit(a: u64, q: u64, j0: u64) -> Result<Vec<u64>> {
    let a = check_unit(a, q)?;
    let start = j0 % q;
    let mut out = vec![start];
    let mut x = (a as u128 * start as u128 % q as u128) as u64;
    while x != start {
        out.push(x);
        x = (a as u128 * x as u128 % q as u128) as u64;
    }
    Ok(out)
}

/// `|u_k⟩ = r^{-1/2} Σ_j exp(-2πi k j / r) |a^j j0 mod q⟩`, with r the orbit
/// length of `j0` (equal to `ord_q(a)` when `gcd(j0, q) = 1`).
///
/// Eigenvalue under `U_a` is `exp(2πi k/r)`.
pub fn fourier_eigenvector(a: u64, q: u64, k: u64, j0: u64) -> Result<StateVector> {
    let orb = orbit(a, q, j0)?;
    let r = orb.len() as u64;
    if k >= r {
        return domain(format!("k = {k} must be below the orbit length r = {r}"));
    }
    let scale = 1.0 / (r as f64).sqrt();
    let mut amps = vec![ZERO; q as usize];
    for (j, &label) in orb.iter().enumerate() {
        let angle = -TAU * ((k * j as u64) % r) as f64 / r as f64;
        amps[label as usize] = Complex64::from_polar(scale, angle);
    }
    StateVector::residues(q, amps)
}

/// `exp(2πi k / r)`.
pub fn root_of_unity(k: u64, r: u64) -> Complex64 {
    Complex64::from_polar(1.0, TAU * (k % r) as f64 / r as f64)
}

/// `‖U_a|u_k⟩ − e^{2πik/r}|u_k⟩‖` for the orbit of `j0`.
pub fn eigen_residual(a: u64, q: u64, k: u64, j0: u64) -> Result<f64> {
    residual_with(&build_ua(a, q)?, a, q, k, j0)
}

fn residual_with(ua: &LinearOperator, a: u64, q: u64, k: u64, j0: u64) -> Result<f64> {
    let u = fourier_eigenvector(a, q, k, j0)?;
    let r = orbit(a, q, j0)?.len() as u64;
    ua.apply(&u)?.distance(&u.scaled(root_of_unity(k, r)))
}

const SPECTRAL_SHIFT: f64 = 0.5;

/// Eigenvalues of `U_a` restricted to the orbit of 1, sorted by angle in `[0, 2π)`.
pub fn orbit_spectrum(a: u64, q: u64) -> Result<Vec<Complex64>> {
    let orb = orbit(a, q, 1)?;
    let u = build_ua(a, q)?;
    let r = orb.len();
    // Unshifted QR stalls on a cyclic permutation, whose eigenvalues share one
    // modulus; the shift separates the moduli of non-conjugate pairs.
    let sub = DMatrix::from_fn(r, r, |i, j| {
        u.matrix[(orb[i] as usize, orb[j] as usize)].re + if i == j { SPECTRAL_SHIFT } else { 0.0 }
    });
    let schur = nalgebra::linalg::Schur::try_new(sub, f64::EPSILON, 10_000 * r.max(1))
        .ok_or_else(|| Error::Domain(format!("eigenvalue iteration did not converge for a={a}, q={q}")))?;
    let mut ev: Vec<Complex64> = schur
        .complex_eigenvalues()
        .iter()
        .map(|z| z - SPECTRAL_SHIFT)
        .collect();
    ev.sort_by(|x, y| angle01(x).total_cmp(&angle01(y)));
    Ok(ev)
}

fn angle01(z: &Complex64) -> f64 {
    let t = z.arg().rem_euclid(TAU);
    // Angles within rounding of 2π belong to the root 1.
    if TAU - t < 1e-9 {
        0.0
    } else {
        t
    }
}

/// Largest distance between the sorted orbit spectrum and the r-th roots of
/// unity, r = `ord_q(a)`.
pub fn spectrum_deviation(a: u64, q: u64) -> Result<f64> {
    let ev = orbit_spectrum(a, q)?;
    let r = multiplicative_order(a % q, q)?;
    if ev.len() as u64 != r {
        return Ok(f64::INFINITY);
    }
    Ok(ev
        .iter()
        .enumerate()
        .map(|(k, z)| (z - root_of_unity(k as u64, r)).norm())
        .fold(0.0, f64::max))
}

/// Phase operator conventions.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum PhaseMode {
    /// `e_δ = exp(2πi δ) · I`.
    #[default]
    Printed,
    /// `e_δ|n⟩ = exp(2πi n δ)|n⟩` for `n = 0..d`.
    Clock,
}

/// Phase operator for `δ = num/den` on dimension `d`.
pub fn build_phase_operator(num: u64, den: u64, d: usize, mode: PhaseMode) -> Result<LinearOperator> {
    if den == 0 || num >= den {
        return domain(format!("phase needs 0 <= num < den, got {num}/{den}"));
    }
    check_dim(d, "phase operator dimension")?;
    let diag: Vec<_> = (0..d as u64)
        .map(|n| match mode {
            PhaseMode::Printed => root_of_unity(num, den),
            PhaseMode::Clock => root_of_unity((n % den) * num % den, den),
        })
        .collect();
    Ok(LinearOperator::from_diagonal(&diag))
}

/// `H_0|n⟩ = ln n |n⟩` on the basis `|1⟩..|N⟩`.
pub fn build_h0(n: usize) -> Result<LinearOperator> {
    check_dim(n, "H_0 truncation")?;
    let diag: Vec<_> = (1..=n).map(|k| Complex64::new((k as f64).ln(), 0.0)).collect();
    Ok(LinearOperator::from_diagonal(&diag))
}

/// `Tr exp(-β H_0)` on the truncated space.
pub fn partition_trace(beta: f64, n: usize) -> Result<f64> {
    Ok(build_h0(n)?.exp_diagonal(Complex64::new(-beta, 0.0))?.trace().re)
}

/// Isometry `μ_a|n⟩ = |a n⟩` on `|1⟩..|N⟩`, columns with `a n > N` left zero.
pub fn build_mu(a: u64, n: usize) -> Result<LinearOperator> {
    if a < 2 {
        return domain(format!("mu_a needs a >= 2, got {a}"));
    }
    check_dim(n, "mu_a truncation")?;
    let mut m = DMatrix::from_element(n, n, ZERO);
    for k in 1..=n as u64 {
        if let Some(target) = k.checked_mul(a).filter(|&t| t <= n as u64) {
            m[(target as usize - 1, k as usize - 1)] = ONE;
        }
    }
    Ok(LinearOperator {
        matrix: m,
        tag: OpTag::General,
    })
}

/// Outcome of [`flow_covariance_check`].
#[derive(Clone, Debug)]
pub struct FlowReport {
    pub a: u64,
    pub n: usize,
    /// (t, max entry deviation) per time value.
    pub per_t: Vec<(f64, f64)>,
    pub max_deviation: f64,
    /// Basis states `n ≤ N/a` whose image stays inside the truncation.
    pub checked: usize,
    pub clipped: usize,
}

/// Compares `exp(itH_0) μ_a exp(-itH_0)` with `a^{it} μ_a` on the columns
/// `n ≤ N/a`.
pub fn flow_covariance_check(a: u64, n: usize, t_values: &[f64]) -> Result<FlowReport> {
    let mu = build_mu(a, n)?;
    let h0 = build_h0(n)?;
    let checked = n / a as usize;
    let mut per_t = Vec::with_capacity(t_values.len());
    for &t in t_values {
        let fwd = h0.exp_diagonal(Complex64::new(0.0, t))?;
        let back = h0.exp_diagonal(Complex64::new(0.0, -t))?;
        let lhs = &fwd.matrix * &mu.matrix * &back.matrix;
        let phase = Complex64::from_polar(1.0, t * (a as f64).ln());
        let rhs = &mu.matrix * phase;
        let mut dev = 0.0f64;
        for col in 0..checked {
            for row in 0..n {
                dev = dev.max((lhs[(row, col)] - rhs[(row, col)]).norm());
            }
        }
        per_t.push((t, dev));
    }
    Ok(FlowReport {
        a,
        n,
        max_deviation: per_t.iter().map(|p| p.1).fold(0.0, f64::max),
        per_t,
        checked,
        clipped: n - checked,
    })
}

/// `U_a U_b == U_{ab mod q}` as exact matrices.
pub fn multiplicativity_check(a: u64, b: u64, q: u64) -> Result<bool> {
    let ua = build_ua(a, q)?;
    let ub = build_ua(b, q)?;
    let ab = (a as u128 * b as u128 % q as u128) as u64;
    Ok(ua.compose(&ub)? == build_ua(ab, q)?)
}

/// `U_a U_b == U_b U_a` as exact matrices.
pub fn commutation_check(a: u64, b: u64, q: u64) -> Result<bool> {
    let ua = build_ua(a, q)?;
    let ub = build_ua(b, q)?;
    Ok(ua.compose(&ub)? == ub.compose(&ua)?)
}

/// Per-(a, q) verification summary.
#[derive(Clone, Debug)]
pub struct QuantumReport {
    pub q: u64,
    pub a: u64,
    pub r: u64,
    /// Largest eigenrelation residual over k < r on the orbit of 1.
    pub max_residual: f64,
    pub spectrum_deviation: f64,
    pub unitary: bool,
    /// `U_a U_b = U_{ab}` and `U_a U_b = U_b U_a` for every unit b mod q.
    pub multiplicative: bool,
}

/// Runs every `U_a` check for one pair.
pub fn verify_pair(a: u64, q: u64) -> Result<QuantumReport> {
    let ua = build_ua(a, q)?;
    let r = multiplicative_order(a % q, q)?;
    let mut max_residual = 0.0f64;
    for k in 0..r {
        max_residual = max_residual.max(residual_with(&ua, a, q, k, 1)?);
    }
    let mut multiplicative = true;
    for b in (1..q).filter(|&b| gcd(b, q) == 1) {
        let ub = build_ua(b, q)?;
        let prod = ua.compose(&ub)?;
        let ab = (a as u128 * b as u128 % q as u128) as u64;
        multiplicative &= prod == build_ua(ab, q)? && prod == ub.compose(&ua)?;
    }
    Ok(QuantumReport {
        q,
        a: a % q,
        r,
        max_residual,
        spectrum_deviation: spectrum_deviation(a, q)?,
        unitary: ua.is_exactly_unitary(),
        multiplicative,
    })
}
