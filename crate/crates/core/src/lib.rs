//! Primorial arithmetic, Bost–Connes KMS states and RH-equivalent criteria.
//!
//! Modules, bottom-up:
//!
//! - [`xreal`]: extended-precision scalar and compensated sums.
//! - [`primes`]: segmented sieve, Chebyshev θ prefix sums, primorials, table cache.
//! - [`arith`]: factorization, φ, μ, Carmichael λ, multiplicative order, ψ_b.
//! - [`specfun`]: ζ on the real axis, γ, Li, Bertrand integrals, prime sums.
//! - [`kms`]: KMS states φ_β, the margin ε_β(q), truncated partition sums.
//! - [`criteria`]: Nicolas and ψ_b criterion scans, proof functions, asymptotics.
//! - [`bcq`]: small dense-matrix checks of the operator identities.
//!
//! All prime-indexed sums run in ascending prime order with compensated
//! accumulation. Parallel work only maps independent terms, so results are
//! bit-identical for any rayon pool size.

pub mod arith;
pub mod bcq;
pub mod criteria;
pub mod error;
pub mod kms;
pub mod primes;
pub mod specfun;
pub mod xreal;

pub use error::{Error, Result};
pub use primes::PrimeTable;
pub use xreal::{XReal, DEFAULT_PRECISION};
