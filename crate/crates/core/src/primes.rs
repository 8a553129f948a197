//! Prime generation and Chebyshev θ.
//!
//! Primes come from a segmented sieve of Eratosthenes over odd numbers.
//! Segments are fixed-width windows sieved independently (in parallel when a
//! rayon pool is available) and concatenated in ascending order, so the
//! output never depends on the worker count.
//!
//! [`PrimeTable`] stores the first `n` primes together with the running sums
//! `θ(p_k) = ln p_1 + … + ln p_k = ln N_k`, where `N_k` is the k-th primorial.
//! These prefix sums are the only route to `ln N_k` in the crate: primorials
//! are never materialized except through [`primorial_exact`], which exists for
//! cross-checks at small `q`.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use rayon::prelude::*;
use rug::Integer;

use crate::error::{Error, Result};
use crate::xreal::{compensated_prefix, par_map_indexed, XReal};

/// Default segment width, in integers covered per segment.
pub const DEFAULT_SEGMENT_SIZE: usize = 1 << 20;

/// Default cap on the number of primes a table may hold.
pub const DEFAULT_MAX_COUNT: u64 = 100_000_000;

const CACHE_MAGIC: &[u8; 4] = b"PRTB";
const CACHE_VERSION: u32 = 1;

#[derive(Clone, Debug)]
pub struct SieveConfig {
    pub segment_size: usize,
    pub max_count: u64,
}

impl Default for SieveConfig {
    fn default() -> Self {
        SieveConfig {
            segment_size: DEFAULT_SEGMENT_SIZE,
            max_count: DEFAULT_MAX_COUNT,
        }
    }
}

impl SieveConfig {
    /// Largest sieve bound implied by `max_count`.
    fn max_limit(&self) -> u64 {
        nth_prime_upper_bound(self.max_count)
    }
}

/// Upper bound on p_n: `n (ln n + ln ln n)` for n ≥ 6 (Rosser).
pub fn nth_prime_upper_bound(n: u64) -> u64 {
    if n < 6 {
        return 13;
    }
    let x = n as f64;
    (x * (x.ln() + x.ln().ln())).ceil() as u64 + 1
}

/// Plain sieve of Eratosthenes up to `limit` inclusive. Used for the base
/// primes of the segmented sieve.
fn simple_sieve(limit: u64) -> Vec<u64> {
    if limit < 2 {
        return Vec::new();
    }
    let limit = limit as usize;
    let mut composite = vec![false; limit + 1];
    let mut out = Vec::new();
    for i in 2..=limit {
        if composite[i] {
            continue;
        }
        out.push(i as u64);
        let mut j = i * i;
        while j <= limit {
            composite[j] = true;
            j += i;
        }
    }
    out
}

fn isqrt(n: u64) -> u64 {
    let mut r = (n as f64).sqrt() as u64;
    while r * r > n {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    r
}

/// Odd primes in `[lo, hi)` using odd base primes; `lo` is odd.
fn sieve_segment(lo: u64, hi: u64, base: &[u64]) -> Vec<u64> {
    debug_assert!(lo % 2 == 1);
    if hi <= lo {
        return Vec::new();
    }
    // index i represents lo + 2i
    let len = ((hi - lo) as usize).div_ceil(2);
    let mut composite = vec![false; len];
    for &p in base.iter().skip(1) {
        if p * p >= hi {
            break;
        }
        let mut start = p * p;
        if start < lo {
            start = lo.div_ceil(p) * p;
        }
        if start % 2 == 0 {
            start += p;
        }
        let mut i = ((start - lo) / 2) as usize;
        let step = p as usize;
        while i < len {
            composite[i] = true;
            i += step;
        }
    }
    composite
        .iter()
        .enumerate()
        .filter(|(_, &c)| !c)
        .map(|(i, _)| lo + 2 * i as u64)
        .filter(|&v| v > 1)
        .collect()
}

/// All primes `≤ limit`, ascending.
pub fn primes_up_to(limit: u64, config: &SieveConfig) -> Result<Vec<u64>> {
    let cap = config.max_limit();
    if limit > cap {
        return Err(Error::ResourceLimit {
            what: "sieve bound",
            requested: limit,
            cap,
        });
    }
    if limit < 2 {
        return Ok(Vec::new());
    }
    let base = simple_sieve(isqrt(limit));
    let hi = limit + 1;
    let seg = (config.segment_size.max(64) as u64) & !1;
    let starts: Vec<u64> = (0..)
        .map(|k| 1 + k * seg)
        .take_while(|&s| s < hi)
        .collect();
    let chunks: Vec<Vec<u64>> = starts
        .par_iter()
        .map(|&s| sieve_segment(s, (s + seg).min(hi), &base))
        .collect();
    let mut out = Vec::with_capacity(chunks.iter().map(Vec::len).sum::<usize>() + 1);
    out.push(2);
    for c in chunks {
        out.extend(c);
    }
    Ok(out)
}

/// The first `n` primes, ascending.
pub fn first_primes(n: u64, config: &SieveConfig) -> Result<Vec<u64>> {
    if n == 0 {
        return Err(Error::Domain("prime count must be at least 1".into()));
    }
    if n > config.max_count {
        return Err(Error::ResourceLimit {
            what: "prime count",
            requested: n,
            cap: config.max_count,
        });
    }
    let mut primes = primes_up_to(nth_prime_upper_bound(n), config)?;
    primes.truncate(n as usize);
    Ok(primes)
}

/// Immutable table of the first `n` primes and their θ prefix sums.
#[derive(Clone, Debug)]
pub struct PrimeTable {
    primes: Vec<u64>,
    theta_prefix: Vec<XReal>,
    precision: u32,
    /// Every prime up to this bound is present.
    complete_to: u64,
}

impl PrimeTable {
    /// Sieves the first `n` primes with default settings.
    pub fn first(n: u64, precision: u32) -> Result<Self> {
        Self::first_with(n, precision, &SieveConfig::default())
    }

    pub fn first_with(n: u64, precision: u32, config: &SieveConfig) -> Result<Self> {
        let primes = first_primes(n, config)?;
        Ok(Self::from_primes(primes, precision))
    }

    /// All primes up to `limit` (at least one prime is required).
    pub fn up_to(limit: u64, precision: u32) -> Result<Self> {
        let primes = primes_up_to(limit, &SieveConfig::default())?;
        if primes.is_empty() {
            return Err(Error::Domain(format!("no primes up to {limit}")));
        }
        Ok(PrimeTable {
            complete_to: limit,
            ..Self::from_primes(primes, precision)
        })
    }

    /// Builds θ prefix sums for an ascending prime list.
    pub fn from_primes(primes: Vec<u64>, precision: u32) -> Self {
        let logs = par_map_indexed(primes.len(), |i| XReal::from_u64(primes[i], precision).ln());
        let theta_prefix = compensated_prefix(&logs, precision);
        let complete_to = primes.last().copied().unwrap_or(0);
        PrimeTable {
            primes,
            theta_prefix,
            precision,
            complete_to,
        }
    }

    pub fn primes(&self) -> &[u64] {
        &self.primes
    }

    pub fn theta_prefix(&self) -> &[XReal] {
        &self.theta_prefix
    }

    pub fn len(&self) -> usize {
        self.primes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.primes.is_empty()
    }

    pub fn precision(&self) -> u32 {
        self.precision
    }

    pub fn largest(&self) -> u64 {
        *self.primes.last().expect("tables are never empty")
    }

    /// p_q, 1-based.
    pub fn prime(&self, q: usize) -> Result<u64> {
        self.check_index(q)?;
        Ok(self.primes[q - 1])
    }

    fn check_index(&self, q: usize) -> Result<()> {
        if q == 0 {
            return Err(Error::Domain("primorial index must be at least 1".into()));
        }
        if q > self.primes.len() {
            return Err(Error::ResourceLimit {
                what: "primorial index beyond table",
                requested: q as u64,
                cap: self.primes.len() as u64,
            });
        }
        Ok(())
    }

    /// ln N_q = θ(p_q).
    pub fn log_primorial(&self, q: usize) -> Result<XReal> {
        self.check_index(q)?;
        Ok(self.theta_prefix[q - 1].clone())
    }

    /// Whether every prime `≤ x` is in the table.
    pub fn covers(&self, x: u64) -> bool {
        x <= self.complete_to
    }

    /// π(x) for `x` within the table range.
    pub fn count_upto(&self, x: u64) -> Result<usize> {
        if !self.covers(x) {
            return Err(Error::TableTooShort {
                needed: x,
                available: self.complete_to,
            });
        }
        Ok(self.primes.partition_point(|&p| p <= x))
    }

    /// θ(x) for `x` within the table range (zero below 2).
    pub fn theta(&self, x: u64) -> Result<XReal> {
        let k = self.count_upto(x)?;
        Ok(if k == 0 {
            XReal::zero(self.precision)
        } else {
            self.theta_prefix[k - 1].clone()
        })
    }

    /// CRC32 of the serialized cache payload; identifies the table in reports.
    pub fn checksum(&self) -> u32 {
        let bytes = self.encode_payload();
        crc32fast::hash(&bytes)
    }

    fn encode_payload(&self) -> Vec<u8> {
        let n = self.primes.len();
        let mut buf = Vec::with_capacity(16 + 16 * n);
        buf.extend_from_slice(CACHE_MAGIC);
        buf.extend_from_slice(&CACHE_VERSION.to_le_bytes());
        buf.extend_from_slice(&(n as u64).to_le_bytes());
        for &p in &self.primes {
            buf.extend_from_slice(&p.to_le_bytes());
        }
        for t in &self.theta_prefix {
            buf.extend_from_slice(&t.to_f64().to_le_bytes());
        }
        buf
    }
}

/// The first `n` primes with θ prefix sums at `precision` bits.
pub fn sieve_first(n: u64, precision: u32) -> Result<PrimeTable> {
    PrimeTable::first(n, precision)
}

/// p_n.
pub fn nth_prime(n: u64) -> Result<u64> {
    nth_prime_with(n, &SieveConfig::default())
}

pub fn nth_prime_with(n: u64, config: &SieveConfig) -> Result<u64> {
    let primes = first_primes(n, config)?;
    Ok(*primes.last().expect("n >= 1"))
}

/// π(x), the number of primes `≤ x`.
pub fn prime_count(x: u64) -> Result<u64> {
    prime_count_with(x, &SieveConfig::default())
}

pub fn prime_count_with(x: u64, config: &SieveConfig) -> Result<u64> {
    Ok(primes_up_to(x, config)?.len() as u64)
}

/// ln N_q, never materializing N_q.
pub fn log_primorial(q: u64, precision: u32) -> Result<XReal> {
    let table = sieve_first(q, precision)?;
    table.log_primorial(q as usize)
}

/// Largest index accepted by [`primorial_exact`].
pub const EXACT_PRIMORIAL_MAX: u64 = 200;

/// N_q as an exact integer, for cross-checks with `q ≤ 200`.
pub fn primorial_exact(q: u64) -> Result<Integer> {
    if q == 0 {
        return Err(Error::Domain("primorial index must be at least 1".into()));
    }
    if q > EXACT_PRIMORIAL_MAX {
        return Err(Error::ResourceLimit {
            what: "exact primorial index",
            requested: q,
            cap: EXACT_PRIMORIAL_MAX,
        });
    }
    let primes = first_primes(q, &SieveConfig::default())?;
    Ok(primes.iter().fold(Integer::from(1), |acc, &p| acc * p))
}

/// Writes the little-endian `PRTB` cache file.
pub fn save_table(table: &PrimeTable, path: &Path) -> Result<()> {
    let payload = table.encode_payload();
    let crc = crc32fast::hash(&payload);
    let mut w = BufWriter::new(File::create(path)?);
    w.write_all(&payload)?;
    w.write_all(&crc.to_le_bytes())?;
    w.flush()?;
    Ok(())
}

/// Reads a `PRTB` cache file, recomputing θ at `precision` bits.
///
/// The stored doubles are checked against the recomputed prefix sums; any
/// disagreement beyond double rounding is reported as a format error.
pub fn load_table(path: &Path, precision: u32) -> Result<PrimeTable> {
    let mut bytes = Vec::new();
    BufReader::new(File::open(path)?).read_to_end(&mut bytes)?;
    decode_table(&bytes, precision)
}

fn decode_table(bytes: &[u8], precision: u32) -> Result<PrimeTable> {
    let fmt = |m: &str| Error::Format(m.to_string());
    if bytes.len() < 20 {
        return Err(fmt("file shorter than header"));
    }
    if &bytes[0..4] != CACHE_MAGIC {
        return Err(fmt("bad magic bytes"));
    }
    let version = u32::from_le_bytes(bytes[4..8].try_into().unwrap());
    if version != CACHE_VERSION {
        return Err(Error::Format(format!("unsupported version {version}")));
    }
    let count = u64::from_le_bytes(bytes[8..16].try_into().unwrap());
    let expected = count
        .checked_mul(16)
        .and_then(|b| b.checked_add(20))
        .ok_or_else(|| fmt("count overflows file size"))?;
    if bytes.len() as u64 != expected {
        return Err(Error::Format(format!(
            "length {} does not match count {count} (expected {expected})",
            bytes.len()
        )));
    }
    if count == 0 {
        return Err(fmt("empty table"));
    }
    let payload_end = bytes.len() - 4;
    let stored_crc = u32::from_le_bytes(bytes[payload_end..].try_into().unwrap());
    if crc32fast::hash(&bytes[..payload_end]) != stored_crc {
        return Err(fmt("checksum mismatch"));
    }
    let n = count as usize;
    let word = |i: usize| -> [u8; 8] { bytes[16 + 8 * i..24 + 8 * i].try_into().unwrap() };
    let primes: Vec<u64> = (0..n).map(|i| u64::from_le_bytes(word(i))).collect();
    let stored_theta: Vec<f64> = (0..n).map(|i| f64::from_le_bytes(word(n + i))).collect();
    if primes[0] != 2 || primes.windows(2).any(|w| w[0] >= w[1]) {
        return Err(fmt("primes not strictly increasing from 2"));
    }
    let table = PrimeTable::from_primes(primes, precision);
    for (k, (s, t)) in stored_theta.iter().zip(&table.theta_prefix).enumerate() {
        let t = t.to_f64();
        if (s - t).abs() > 4.0 * f64::EPSILON * t.abs().max(1.0) {
            return Err(Error::Format(format!("theta prefix mismatch at index {k}")));
        }
    }
    if precision <= 53 {
        let theta_prefix = stored_theta
            .iter()
            .map(|&v| XReal::from_f64(v, precision))
            .collect();
        return Ok(PrimeTable {
            theta_prefix,
            ..table
        });
    }
    Ok(table)
}

/// Deterministic Miller–Rabin, exact for every `n < 2^64`.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    const SMALL: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for p in SMALL {
        if n % p == 0 {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for a in SMALL {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

pub(crate) fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub(crate) fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_prime_table() {
        let t = sieve_first(1, 128).unwrap();
        assert_eq!(t.primes(), &[2]);
        let ln2 = XReal::ln2(128);
        assert_eq!(t.theta_prefix()[0], ln2);
    }

    #[test]
    fn tenth_primorial() {
        let t = sieve_first(10, 128).unwrap();
        assert_eq!(t.largest(), 29);
        let n10 = t.log_primorial(10).unwrap().exp();
        assert!((n10.to_f64() - 6_469_693_230.0).abs() < 1e-3);
    }

    #[test]
    fn small_counts() {
        assert_eq!(prime_count(0).unwrap(), 0);
        assert_eq!(prime_count(1).unwrap(), 0);
        assert_eq!(prime_count(2).unwrap(), 1);
        assert_eq!(prime_count(30).unwrap(), 10);
        assert_eq!(nth_prime(1).unwrap(), 2);
        assert_eq!(nth_prime(100).unwrap(), 541);
        assert_eq!(nth_prime(1000).unwrap(), 7919);
    }

    #[test]
    fn tiny_segments_agree_with_default() {
        let small = SieveConfig {
            segment_size: 64,
            ..SieveConfig::default()
        };
        assert_eq!(
            primes_up_to(100_000, &small).unwrap(),
            primes_up_to(100_000, &SieveConfig::default()).unwrap()
        );
    }

    #[test]
    fn count_cap_is_enforced() {
        let cfg = SieveConfig {
            max_count: 50,
            ..SieveConfig::default()
        };
        assert!(matches!(
            first_primes(51, &cfg),
            Err(Error::ResourceLimit { requested: 51, cap: 50, .. })
        ));
        assert!(first_primes(50, &cfg).is_ok());
        assert!(matches!(first_primes(0, &cfg), Err(Error::Domain(_))));
    }

    #[test]
    fn exact_primorials() {
        assert_eq!(primorial_exact(1).unwrap(), 2);
        assert_eq!(primorial_exact(3).unwrap(), 30);
        assert_eq!(primorial_exact(10).unwrap(), 6_469_693_230u64);
        assert!(primorial_exact(201).is_err());
    }

    #[test]
    fn miller_rabin_edges() {
        assert!(!is_prime(0) && !is_prime(1));
        assert!(is_prime(2) && is_prime(3) && is_prime(37));
        assert!(!is_prime(3_215_031_751)); // strong pseudoprime to bases 2,3,5,7
        assert!(is_prime(18_446_744_073_709_551_557)); // largest prime below 2^64
        assert!(!is_prime(18_446_744_073_709_551_615));
    }

    #[test]
    fn theta_lookup() {
        let t = sieve_first(10, 128).unwrap();
        assert!(t.theta(1).unwrap().is_zero());
        assert_eq!(t.theta(10).unwrap(), t.theta_prefix()[3]);
        assert_eq!(t.count_upto(29).unwrap(), 10);
        assert!(matches!(t.count_upto(30), Err(Error::TableTooShort { .. })));
    }

    #[test]
    fn decode_rejects_short_input() {
        assert!(matches!(decode_table(b"PRTB", 128), Err(Error::Format(_))));
    }
}
