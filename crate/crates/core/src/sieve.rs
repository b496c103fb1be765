//! Segmented sieve of Eratosthenes and the prime-counting estimates used by
//! the verifier: the explicit lower bound `pi(x) >= x/(log x - 1)` (valid
//! for `x >= 5393`, with the coprime variant `pi_q(x) >= x/log x`), the
//! Brun-Titchmarsh upper bound `2x / (phi(q) log(x/q))` for primes in a
//! progression inside a window, and per-class prime spectra.
//!
//! The sieve streams over segments of odd numbers (one bit each, default
//! 2^20 odd entries per segment) and never materialises the full range.
//! Caps are explicit: a hard limit on the sieved bound and a byte cap on
//! allocations, configurable through [`SieveConfig`] or the
//! `TRIPRIME_SIEVE_MEM_BYTES` environment variable. Exceeding a cap is a
//! clean resource error, never a partial result.

use thiserror::Error;

use crate::arith::{self, BoundReport};
use crate::sumsets::{ClassSet, Group, SumsetError};

/// Environment variable overriding the sieve allocation cap, in bytes.
pub const MEMORY_CAP_ENV: &str = "TRIPRIME_SIEVE_MEM_BYTES";

#[derive(Debug, Error, PartialEq)]
pub enum SieveError {
    #[error("requested sieve limit {requested} exceeds the configured cap {cap}")]
    LimitExceeded { requested: u64, cap: u64 },
    #[error("sieve would need about {needed} bytes, above the memory cap {cap}")]
    MemoryCap { needed: u64, cap: u64 },
    #[error("window end y + x = {y} + {x} overflows")]
    WindowOverflow { y: u64, x: u64 },
    #[error("the estimate requires x >= 5393, got {0}")]
    BelowDusartRange(f64),
    #[error("need 1 <= q < x, got q = {q}, x = {x}")]
    BadProgressionWindow { q: u64, x: u64 },
    #[error("need q <= x, got q = {q}, x = {x}")]
    ModulusAboveRange { q: u64, x: u64 },
    #[error("a = {a} is not coprime to q = {q}")]
    NotCoprime { a: u64, q: u64 },
    #[error("threshold must be at least 2, got {0}")]
    ThresholdTooSmall(u64),
    #[error(transparent)]
    Arith(#[from] arith::ArithError),
    #[error(transparent)]
    Sumset(#[from] SumsetError),
}

/// Sieve resource configuration.
#[derive(Clone, Debug)]
pub struct SieveConfig {
    /// Odd entries per segment (one bit each).
    pub segment_odds: usize,
    /// Cap on bytes the sieve may allocate (base primes + one segment).
    pub memory_cap_bytes: u64,
    /// Hard cap on the sieved bound.
    pub limit_cap: u64,
}

impl Default for SieveConfig {
    fn default() -> Self {
        SieveConfig {
            segment_odds: 1 << 20,
            memory_cap_bytes: 512 << 20,
            limit_cap: 10_000_000_000,
        }
    }
}

impl SieveConfig {
    /// Default configuration with the memory cap optionally taken from
    /// [`MEMORY_CAP_ENV`].
    pub fn from_env() -> SieveConfig {
        let mut cfg = SieveConfig::default();
        if let Ok(v) = std::env::var(MEMORY_CAP_ENV) {
            if let Ok(bytes) = v.trim().parse::<u64>() {
                cfg.memory_cap_bytes = bytes;
            }
        }
        cfg
    }
}

fn isqrt(n: u64) -> u64 {
    let mut r = (n as f64).sqrt() as u64;
    while r > 0 && (r as u128) * (r as u128) > n as u128 {
        r -= 1;
    }
    while ((r + 1) as u128) * ((r + 1) as u128) <= n as u128 {
        r += 1;
    }
    r
}

/// Odd primes up to `n` by a plain bit sieve (used for base primes only).
fn small_odd_primes(n: u64) -> Vec<u64> {
    if n < 3 {
        return Vec::new();
    }
    let count = ((n - 3) / 2 + 1) as usize; // odd numbers 3, 5, ..., <= n
    let mut composite = vec![false; count];
    let mut primes = Vec::new();
    for i in 0..count {
        if composite[i] {
            continue;
        }
        let p = 3 + 2 * i as u64;
        primes.push(p);
        let mut m = p * p;
        while m <= n {
            composite[((m - 3) / 2) as usize] = true;
            m += 2 * p;
        }
    }
    primes
}

/// Streaming enumeration of the primes in `(lo, limit]`, in order, each
/// exactly once.
#[derive(Debug)]
pub struct PrimeStream {
    lo: u64,
    limit: u64,
    segment_odds: usize,
    base: Vec<u64>,
    /// Current segment: one bit per odd number, 1 = surviving.
    current: Vec<u64>,
    seg_start: u64,
    seg_count: usize,
    cursor: usize,
    next_start: u64,
    emitted_two: bool,
}

impl PrimeStream {
    fn new(lo: u64, limit: u64, cfg: &SieveConfig) -> Result<PrimeStream, SieveError> {
        if limit > cfg.limit_cap {
            return Err(SieveError::LimitExceeded {
                requested: limit,
                cap: cfg.limit_cap,
            });
        }
        let root = isqrt(limit);
        // Base bit sieve + collected primes + one segment.
        let needed = root / 16 + (root / 3 + 16) * 8 + (cfg.segment_odds as u64) / 8 + 4096;
        if needed > cfg.memory_cap_bytes {
            return Err(SieveError::MemoryCap {
                needed,
                cap: cfg.memory_cap_bytes,
            });
        }
        let base = small_odd_primes(root);
        let mut first = (lo + 1).max(3);
        if first.is_multiple_of(2) {
            first += 1;
        }
        Ok(PrimeStream {
            lo,
            limit,
            segment_odds: cfg.segment_odds.max(64),
            base,
            current: Vec::new(),
            seg_start: 0,
            seg_count: 0,
            cursor: 0,
            next_start: first,
            emitted_two: false,
        })
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    /// Fills the next segment; false when the range is exhausted.
    fn fill_segment(&mut self) -> bool {
        let start = self.next_start;
        if start > self.limit {
            return false;
        }
        let count = (((self.limit - start) / 2) as usize + 1).min(self.segment_odds);
        let words = count.div_ceil(64);
        self.current.clear();
        self.current.resize(words, u64::MAX);
        let extra = words * 64 - count;
        if extra > 0 {
            self.current[words - 1] >>= extra;
        }
        let end = start + 2 * count as u64; // exclusive
        for &p in &self.base {
            let p2 = p * p;
            if p2 >= end {
                break;
            }
            let mut m = if p2 >= start {
                p2
            } else {
                let mut m = start.div_ceil(p) * p;
                if m % 2 == 0 {
                    m += p;
                }
                m
            };
            while m < end {
                let idx = ((m - start) / 2) as usize;
                self.current[idx / 64] &= !(1 << (idx % 64));
                m += 2 * p;
            }
        }
        self.seg_start = start;
        self.seg_count = count;
        self.cursor = 0;
        self.next_start = end.max(start + 1);
        true
    }
}

impl Iterator for PrimeStream {
    type Item = u64;

    fn next(&mut self) -> Option<u64> {
        if !self.emitted_two {
            self.emitted_two = true;
            if self.lo < 2 && self.limit >= 2 {
                return Some(2);
            }
        }
        loop {
            while self.cursor < self.seg_count {
                let idx = self.cursor;
                self.cursor += 1;
                if self.current[idx / 64] & (1 << (idx % 64)) != 0 {
                    return Some(self.seg_start + 2 * idx as u64);
                }
            }
            if !self.fill_segment() {
                return None;
            }
        }
    }
}

/// All primes `p <= n`, streamed.
pub fn primes_up_to(n: u64) -> Result<PrimeStream, SieveError> {
    primes_up_to_with(n, &SieveConfig::from_env())
}

pub fn primes_up_to_with(n: u64, cfg: &SieveConfig) -> Result<PrimeStream, SieveError> {
    PrimeStream::new(0, n, cfg)
}

/// Primes in the window `(lo, hi]`, streamed.
pub fn primes_between(lo: u64, hi: u64, cfg: &SieveConfig) -> Result<PrimeStream, SieveError> {
    PrimeStream::new(lo, hi, cfg)
}

/// `pi(x)`, by streaming.
pub fn prime_count(x: u64) -> Result<u64, SieveError> {
    Ok(primes_up_to(x)?.count() as u64)
}

/// Checks `pi(x) >= x / (log x - 1)`; requires `x >= 5393`, the range on
/// which the estimate is stated.
pub fn check_dusart(x: f64) -> Result<BoundReport, SieveError> {
    if x.is_nan() || x < 5393.0 {
        return Err(SieveError::BelowDusartRange(x));
    }
    let pi = prime_count(x as u64)? as f64;
    let bound = x / (x.ln() - 1.0);
    Ok(BoundReport::ge_slack(format!("pi({x})"), pi, bound))
}

/// Exact count of primes `p <= x` coprime to `q`, with the lower-bound
/// report `pi_q(x) >= x / log x` when `x` is in the estimate's range.
#[derive(Clone, Debug)]
pub struct CoprimeCount {
    pub count: u64,
    pub report: Option<BoundReport>,
}

pub fn coprime_prime_count(x: u64, q: u64) -> Result<CoprimeCount, SieveError> {
    if q == 0 {
        return Err(SieveError::Arith(arith::ArithError::Zero));
    }
    if q > x {
        return Err(SieveError::ModulusAboveRange { q, x });
    }
    let total = prime_count(x)?;
    let shared = arith::factor(q)?.primes().filter(|&p| p <= x).count() as u64;
    let count = total - shared;
    let report = if x >= 5393 {
        let xf = x as f64;
        Some(BoundReport::ge_slack(
            format!("pi_{q}({x})"),
            count as f64,
            xf / xf.ln(),
        ))
    } else {
        None
    };
    Ok(CoprimeCount { count, report })
}

/// Counts primes `p` with `y < p <= y + x` and `p = a (mod q)` and checks
/// the Brun-Titchmarsh bound `2x / (phi(q) log(x/q))`.
pub fn check_brun_titchmarsh(y: u64, x: u64, q: u64, a: u64) -> Result<BoundReport, SieveError> {
    if q == 0 || q >= x {
        return Err(SieveError::BadProgressionWindow { q, x });
    }
    if crate::util::gcd_u64(a % q.max(1), q) != 1 {
        return Err(SieveError::NotCoprime { a, q });
    }
    let hi = y
        .checked_add(x)
        .ok_or(SieveError::WindowOverflow { y, x })?;
    let target = a % q;
    let cfg = SieveConfig::from_env();
    let count = primes_between(y, hi, &cfg)?
        .filter(|&p| p % q == target)
        .count() as u64;
    let phi = arith::euler_phi(q)? as f64;
    let bound = 2.0 * x as f64 / (phi * (x as f64 / q as f64).ln());
    Ok(BoundReport::le_slack(
        format!("#{{{y} < p <= {hi} : p = {target} mod {q}}}"),
        count as f64,
        bound,
    ))
}

/// Which invertible classes mod `q` contain primes up to a threshold, with
/// exact counts and the smallest few primes per class.
#[derive(Clone, Debug)]
pub struct ClassSpectrum {
    group: Group,
    threshold: u64,
    counts: Vec<u64>,
    nonempty: ClassSet,
    least: Vec<[Option<u64>; 3]>,
}

impl ClassSpectrum {
    pub fn group(&self) -> &Group {
        &self.group
    }

    pub fn modulus(&self) -> u64 {
        self.group.modulus()
    }

    pub fn threshold(&self) -> u64 {
        self.threshold
    }

    /// Counts per unit index.
    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn count_of(&self, residue: u64) -> Option<u64> {
        self.group.index_of(residue).map(|i| self.counts[i])
    }

    /// The set of classes containing at least one prime.
    pub fn nonempty(&self) -> &ClassSet {
        &self.nonempty
    }

    /// Total number of counted primes, `pi_q(threshold)`.
    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// Least prime in the class of `residue`, if any.
    pub fn least_prime(&self, residue: u64) -> Option<u64> {
        self.group.index_of(residue).and_then(|i| self.least[i][0])
    }

    /// Up to the three smallest primes in the class, by unit index.
    pub fn least_primes_at(&self, idx: usize) -> &[Option<u64>; 3] {
        &self.least[idx]
    }
}

/// Builds the spectrum of primes `p <= x` coprime to `q`.
pub fn class_spectrum(x: u64, q: u64) -> Result<ClassSpectrum, SieveError> {
    class_spectrum_with(x, q, &SieveConfig::from_env())
}

pub fn class_spectrum_with(x: u64, q: u64, cfg: &SieveConfig) -> Result<ClassSpectrum, SieveError> {
    if q == 0 {
        return Err(SieveError::Arith(arith::ArithError::Zero));
    }
    if x < 2 {
        return Err(SieveError::ThresholdTooSmall(x));
    }
    let group = Group::units(q)?;
    let ugs = group.unit_structure().expect("units group");
    let n = ugs.phi() as usize;
    let mut counts = vec![0u64; n];
    let mut least = vec![[None; 3]; n];
    let mut nonempty = ClassSet::empty(&group);
    for p in primes_up_to_with(x, cfg)? {
        if let Some(idx) = ugs.index_of(p % q.max(1)) {
            counts[idx] += 1;
            nonempty.insert_index(idx);
            if let Some(slot) = least[idx].iter_mut().find(|s| s.is_none()) {
                *slot = Some(p);
            }
        }
    }
    Ok(ClassSpectrum {
        group,
        threshold: x,
        counts,
        nonempty,
        least,
    })
}
