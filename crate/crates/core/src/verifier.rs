//! End-to-end verification of the triple-prime coverage statement: for a
//! modulus `q` and a prime threshold `P`, build the set `A` of classes
//! containing a prime `p <= P`, form `A*A*A` on the unit group, and check
//! that every invertible class is reached. On top of plain coverage the
//! module produces explicit witnesses (deterministic least-prime policy),
//! minimal thresholds per modulus with the exact `P^3 <= q^16` comparison,
//! the nine-row small-modulus table and the vacuity check below `29^3`.

use std::collections::BTreeMap;

use num_bigint::BigUint;
use rayon::prelude::*;
use thiserror::Error;

use crate::arith::{self, BoundReport, Relation};
use crate::sieve::{self, ClassSpectrum, SieveConfig};
use crate::sumsets::{product_set, ClassSet, Group, SumsetError};
use crate::util::floor_pow_16_3;

#[derive(Debug, Error, PartialEq)]
pub enum VerifyError {
    #[error("modulus must be at least {1}, got {0}")]
    ModulusTooSmall(u64, u64),
    #[error("threshold must be at least 2, got {0}")]
    ThresholdTooSmall(u64),
    #[error("{class} is not an invertible class modulo {q}")]
    NotAUnit { class: u64, q: u64 },
    #[error("class {class} mod {q} is not covered at threshold {p} ({missing} classes missing)")]
    ClassNotCovered {
        q: u64,
        p: u64,
        class: u64,
        missing: u64,
    },
    #[error("coverage for q = {q} not reached below the prime cap {cap}")]
    ResourceCap { q: u64, cap: u64 },
    #[error("(q, X) = ({q}, {x}) is outside the regime: {reason}")]
    OutsideRegime { q: u64, x: u64, reason: String },
    #[error(transparent)]
    Sieve(#[from] sieve::SieveError),
    #[error(transparent)]
    Sumset(#[from] SumsetError),
    #[error(transparent)]
    Arith(#[from] arith::ArithError),
}

/// A triple of primes certifying that one class is covered.
#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct Witness {
    pub modulus: u64,
    pub class: u64,
    pub primes: [u64; 3],
    pub threshold: u64,
}

impl Witness {
    /// Re-checks every invariant independently of how the witness was
    /// found: the entries are primes up to the threshold, coprime to the
    /// modulus, sorted, and their product lies in the class.
    pub fn validate(&self) -> Result<(), String> {
        let [p1, p2, p3] = self.primes;
        if !(p1 <= p2 && p2 <= p3) {
            return Err(format!("primes not sorted: {:?}", self.primes));
        }
        for p in self.primes {
            if !arith::is_prime(p) {
                return Err(format!("{p} is not prime"));
            }
            if p > self.threshold {
                return Err(format!("{p} exceeds threshold {}", self.threshold));
            }
            if crate::util::gcd_u64(p % self.modulus.max(1), self.modulus) != 1 {
                return Err(format!("{p} shares a factor with {}", self.modulus));
            }
        }
        let q = self.modulus.max(1) as u128;
        let prod = (p1 as u128 % q) * (p2 as u128 % q) % q * (p3 as u128 % q) % q;
        if prod != (self.class as u128) % q {
            return Err(format!(
                "{p1}*{p2}*{p3} = {prod} mod {}, expected {}",
                self.modulus, self.class
            ));
        }
        Ok(())
    }
}

/// Options for [`coverage_with`].
#[derive(Clone, Copy, Debug, Default)]
pub struct CoverageOptions {
    pub witnesses: bool,
    /// Use primes strictly below the threshold instead of `p <= P`.
    pub strict_below: bool,
    /// Demand three pairwise distinct primes.
    pub distinct_primes: bool,
}

/// Result of one coverage computation.
#[derive(Clone, Debug)]
pub struct CoverageResult {
    pub modulus: u64,
    pub threshold: u64,
    /// Largest prime actually admitted (equals `threshold`, or
    /// `threshold - 1` under the strict reading).
    pub effective_limit: u64,
    pub covered: bool,
    pub missing: ClassSet,
    pub witnesses: Option<BTreeMap<u64, Witness>>,
}

impl CoverageResult {
    pub fn missing_residues(&self) -> Vec<u64> {
        self.missing.residues()
    }
}

/// Coverage of all invertible classes mod `q` by products of exactly three
/// primes `p <= P` (repetition allowed).
pub fn coverage(q: u64, p: u64) -> Result<CoverageResult, VerifyError> {
    coverage_with(q, p, CoverageOptions::default())
}

pub fn coverage_with(q: u64, p: u64, opts: CoverageOptions) -> Result<CoverageResult, VerifyError> {
    if q == 0 {
        return Err(VerifyError::ModulusTooSmall(q, 1));
    }
    if p < 2 {
        return Err(VerifyError::ThresholdTooSmall(p));
    }
    let effective = if opts.strict_below { p - 1 } else { p };
    let group = Group::units(q)?;
    if effective < 2 {
        // No primes admitted at all.
        return Ok(CoverageResult {
            modulus: q,
            threshold: p,
            effective_limit: effective,
            covered: false,
            missing: ClassSet::full(&group),
            witnesses: opts.witnesses.then(BTreeMap::new),
        });
    }
    let spectrum = sieve::class_spectrum(effective, q)?;
    if opts.distinct_primes {
        // A class counts as covered only if a witness with three pairwise
        // distinct primes exists; decided per class by direct search.
        let mut wmap = BTreeMap::new();
        let mut miss = ClassSet::empty(&group);
        let entries = distinct_entries(&spectrum);
        for idx in 0..group.order() as usize {
            match find_distinct_witness(&group, &spectrum, &entries, idx, effective) {
                Some(w) => {
                    wmap.insert(group.element(idx), w);
                }
                None => miss.insert_index(idx),
            }
        }
        return Ok(CoverageResult {
            modulus: q,
            threshold: p,
            effective_limit: effective,
            covered: miss.is_empty(),
            missing: miss,
            witnesses: opts.witnesses.then_some(wmap),
        });
    }
    let (aaa, aa) = triple_product(spectrum.nonempty())?;
    let mut witnesses = None;
    if opts.witnesses {
        let reps = sorted_reps(&spectrum);
        let mut map = BTreeMap::new();
        for idx in 0..group.order() as usize {
            if aaa.contains_index(idx) {
                let w = find_witness(&group, &spectrum, &reps, &aa, idx, effective)
                    .expect("class in A*A*A must decompose");
                map.insert(group.element(idx), w);
            }
        }
        witnesses = Some(map);
    }
    Ok(CoverageResult {
        modulus: q,
        threshold: p,
        effective_limit: effective,
        covered: aaa.is_full(),
        missing: aaa.complement(),
        witnesses,
    })
}

fn triple_product(a: &ClassSet) -> Result<(ClassSet, ClassSet), VerifyError> {
    let aa = product_set(a, a)?;
    let aaa = product_set(&aa, a)?;
    Ok((aaa, aa))
}

/// Classes of `A` with their least prime, sorted by that prime.
fn sorted_reps(spectrum: &ClassSpectrum) -> Vec<(u64, usize)> {
    let mut reps: Vec<(u64, usize)> = (0..spectrum.counts().len())
        .filter_map(|i| spectrum.least_primes_at(i)[0].map(|p| (p, i)))
        .collect();
    reps.sort_unstable();
    reps
}

/// Deterministic witness for class index `b`: the lexicographically least
/// sorted triple of least-prime class representatives whose product hits
/// the class.
fn find_witness(
    group: &Group,
    spectrum: &ClassSpectrum,
    reps: &[(u64, usize)],
    aa: &ClassSet,
    b: usize,
    threshold: u64,
) -> Option<Witness> {
    for &(p1, c1) in reps {
        // Remaining part must be a product of two classes of A.
        let rest = group.mul(b, group.inv(c1));
        if !aa.contains_index(rest) {
            continue;
        }
        for &(p2, c2) in reps.iter().skip_while(|&&(p, _)| p < p1) {
            let c3 = group.mul(rest, group.inv(c2));
            if let Some(p3) = spectrum.least_primes_at(c3)[0] {
                if p3 >= p2 {
                    return Some(Witness {
                        modulus: group.modulus(),
                        class: group.element(b),
                        primes: [p1, p2, p3],
                        threshold,
                    });
                }
            }
        }
    }
    None
}

/// Flattened (prime, class) pairs over the up-to-three least primes per
/// class, sorted by prime. Primes are globally distinct.
fn distinct_entries(spectrum: &ClassSpectrum) -> Vec<(u64, usize)> {
    let mut entries: Vec<(u64, usize)> = (0..spectrum.counts().len())
        .flat_map(|i| {
            spectrum
                .least_primes_at(i)
                .iter()
                .flatten()
                .map(move |&p| (p, i))
                .collect::<Vec<_>>()
        })
        .collect();
    entries.sort_unstable();
    entries
}

fn find_distinct_witness(
    group: &Group,
    spectrum: &ClassSpectrum,
    entries: &[(u64, usize)],
    b: usize,
    threshold: u64,
) -> Option<Witness> {
    for (i, &(p1, c1)) in entries.iter().enumerate() {
        let rest = group.mul(b, group.inv(c1));
        for &(p2, c2) in &entries[i + 1..] {
            let c3 = group.mul(rest, group.inv(c2));
            for &p3 in spectrum.least_primes_at(c3).iter().flatten() {
                if p3 > p2 {
                    return Some(Witness {
                        modulus: group.modulus(),
                        class: group.element(b),
                        primes: [p1, p2, p3],
                        threshold,
                    });
                }
            }
        }
    }
    None
}

/// Deterministic witness that class `a` is covered at threshold `p`.
pub fn witness(q: u64, p: u64, a: u64) -> Result<Witness, VerifyError> {
    if q == 0 {
        return Err(VerifyError::ModulusTooSmall(q, 1));
    }
    if p < 2 {
        return Err(VerifyError::ThresholdTooSmall(p));
    }
    let group = Group::units(q)?;
    let idx = group
        .index_of(a % q)
        .ok_or(VerifyError::NotAUnit { class: a, q })?;
    let spectrum = sieve::class_spectrum(p, q)?;
    let (aaa, aa) = triple_product(spectrum.nonempty())?;
    if !aaa.contains_index(idx) {
        return Err(VerifyError::ClassNotCovered {
            q,
            p,
            class: a % q,
            missing: aaa.complement().len(),
        });
    }
    let reps = sorted_reps(&spectrum);
    let w =
        find_witness(&group, &spectrum, &reps, &aa, idx, p).expect("covered class must decompose");
    debug_assert!(w.validate().is_ok());
    Ok(w)
}

/// Scan result for one modulus: the minimal prime threshold under the
/// inclusive reading, the strict-reading variant, and the exact comparison
/// against `floor(q^(16/3))`.
#[derive(Clone, Debug, PartialEq)]
pub struct ScanRecord {
    pub q: u64,
    /// Least prime `P` such that primes `p <= P` cover every class.
    pub p_min: u64,
    /// Least boundary `B` (a prime) such that primes strictly below `B`
    /// cover every class: the prime after `p_min`.
    pub p_min_strict: u64,
    /// `floor(q^(16/3))`, exact.
    pub theorem_bound: u128,
    /// `p_min^3 <= q^16`, decided in exact integer arithmetic.
    pub within_bound: bool,
    /// `p_min / q^(16/3)`, for display.
    pub margin_ratio: f64,
}

#[derive(Clone, Copy, Debug)]
pub struct ScanOptions {
    /// Abort (resource error) if coverage is not reached by this prime.
    pub prime_cap: u64,
}

impl Default for ScanOptions {
    fn default() -> Self {
        ScanOptions {
            prime_cap: 100_000_000,
        }
    }
}

/// Finds the minimal prime threshold for `q` by incremental prime
/// addition: each new class updates `A*A` and `A*A*A` by one translated-OR
/// pass each; a full recomputation cross-checks the incremental state every
/// 64 insertions and at the end.
pub fn minimal_prime_threshold(q: u64) -> Result<ScanRecord, VerifyError> {
    minimal_prime_threshold_with(q, ScanOptions::default())
}

pub fn minimal_prime_threshold_with(q: u64, opts: ScanOptions) -> Result<ScanRecord, VerifyError> {
    if q < 2 {
        return Err(VerifyError::ModulusTooSmall(q, 2));
    }
    let group = Group::units(q)?;
    let cfg = SieveConfig::from_env();
    let mut a = ClassSet::empty(&group);
    let mut aa = ClassSet::empty(&group);
    let mut aaa = ClassSet::empty(&group);
    let mut additions = 0u32;
    let mut prev_prime = 0u64;
    let mut p_min = None;

    let mut lo = 0u64;
    let mut chunk = (4 * q + 64).max(256);
    'outer: while lo < opts.prime_cap {
        let hi = (lo + chunk).min(opts.prime_cap);
        for p in sieve::primes_between(lo, hi, &cfg)? {
            if let Some(idx) = group.index_of(p % q) {
                if !a.contains_index(idx) {
                    a.insert_index(idx);
                    aa.or_translate(&a, idx);
                    aaa.or_translate(&aa, idx);
                    additions += 1;
                    if additions.is_multiple_of(64) {
                        let (aaa2, aa2) = triple_product(&a)?;
                        assert!(
                            aa == aa2 && aaa == aaa2,
                            "incremental state diverged, q={q}"
                        );
                    }
                    if aaa.is_full() {
                        p_min = Some(p);
                        break 'outer;
                    }
                }
            }
            prev_prime = p;
        }
        lo = hi;
        chunk *= 2;
    }
    let p_min = p_min.ok_or(VerifyError::ResourceCap {
        q,
        cap: opts.prime_cap,
    })?;

    // Final cross-checks against the non-incremental route.
    let spectrum = sieve::class_spectrum(p_min, q)?;
    assert!(
        *spectrum.nonempty() == a,
        "incremental class set diverged from the spectrum, q={q}"
    );
    let (aaa2, _) = triple_product(&a)?;
    assert!(aaa2.is_full(), "final recomputation disagrees, q={q}");
    if prev_prime >= 2 {
        let before = coverage(q, prev_prime)?;
        assert!(!before.covered, "coverage already held below p_min, q={q}");
    }

    let mut next = p_min + 1;
    while !arith::is_prime(next) {
        next += 1;
    }
    let theorem_bound_big = floor_pow_16_3(q);
    let theorem_bound = u128::try_from(&theorem_bound_big).expect("q^(16/3) fits in u128");
    let within_bound = BigUint::from(p_min).pow(3) <= BigUint::from(q).pow(16);
    Ok(ScanRecord {
        q,
        p_min,
        p_min_strict: next,
        theorem_bound,
        within_bound,
        margin_ratio: p_min as f64 / theorem_bound as f64,
    })
}

/// Minimal thresholds over a range of moduli, computed in parallel and
/// returned in increasing `q` order.
pub fn scan_range(q_lo: u64, q_hi: u64) -> Result<Vec<ScanRecord>, VerifyError> {
    (q_lo..=q_hi)
        .into_par_iter()
        .map(minimal_prime_threshold)
        .collect()
}

/// One row of the small-modulus table: the claimed sufficient prime and
/// what the scan measured.
#[derive(Clone, Debug)]
pub struct TableRow {
    pub q: u64,
    pub p: u64,
    pub covered: bool,
    pub p_min: u64,
}

impl TableRow {
    pub fn ok(&self) -> bool {
        self.covered && self.p_min <= self.p
    }

    pub fn reports(&self) -> Vec<BoundReport> {
        vec![
            BoundReport::exact(
                format!("coverage(q={}, P={})", self.q, self.p),
                if self.covered { 1.0 } else { 0.0 },
                1.0,
                Relation::GreaterEq,
                self.covered,
            ),
            BoundReport::exact(
                format!("p_min({}) <= {}", self.q, self.p),
                self.p_min as f64,
                self.p as f64,
                Relation::LessEq,
                self.p_min <= self.p,
            ),
        ]
    }
}

#[derive(Clone, Debug)]
pub struct SmallCaseTable {
    pub rows: Vec<TableRow>,
    pub vacuity: BoundReport,
}

impl SmallCaseTable {
    pub fn all_ok(&self) -> bool {
        self.rows.iter().all(TableRow::ok) && self.vacuity.satisfied
    }
}

/// The claimed sufficient thresholds for q = 2..=10.
pub const SMALL_CASES: [(u64, u64); 9] = [
    (2, 3),
    (3, 7),
    (4, 5),
    (5, 19),
    (6, 11),
    (7, 29),
    (8, 23),
    (9, 23),
    (10, 19),
];

/// Verifies sufficiency of the nine small-modulus rows and compares each
/// against the measured minimal threshold; includes the vacuity check.
pub fn small_case_table() -> Result<SmallCaseTable, VerifyError> {
    let mut rows = Vec::with_capacity(SMALL_CASES.len());
    for (q, p) in SMALL_CASES {
        let cov = coverage(q, p)?;
        let scan = minimal_prime_threshold(q)?;
        rows.push(TableRow {
            q,
            p,
            covered: cov.covered,
            p_min: scan.p_min,
        });
    }
    Ok(SmallCaseTable {
        rows,
        vacuity: vacuity_check(),
    })
}

/// Below `29^3` the constraint `q <= x^(1/16)` admits no modulus at all:
/// `29^3 - 1 < 2^16`, exactly.
pub fn vacuity_check() -> BoundReport {
    let x: u64 = 29 * 29 * 29 - 1;
    let two_16: u64 = 1 << 16;
    BoundReport::exact(
        "29^3 - 1 < 2^16 (no q >= 2 admissible below 29^3)",
        x as f64,
        two_16 as f64,
        Relation::LessEq,
        x < two_16,
    )
}

/// Checks `|A(X, q)| >= ceil(13/32 * phi(q))` with exact rational
/// arithmetic. The regime preconditions (`X >= 5393` and `q^16 <= X^3`)
/// are enforced unless waived.
pub fn density_check(q: u64, x: u64, waive_regime: bool) -> Result<BoundReport, VerifyError> {
    if q == 0 {
        return Err(VerifyError::ModulusTooSmall(q, 1));
    }
    if !waive_regime {
        if x < 5393 {
            return Err(VerifyError::OutsideRegime {
                q,
                x,
                reason: "X < 5393, below the prime-count estimate's range".into(),
            });
        }
        if BigUint::from(q).pow(16) > BigUint::from(x).pow(3) {
            return Err(VerifyError::OutsideRegime {
                q,
                x,
                reason: "q^16 > X^3, outside q <= X^(3/16)".into(),
            });
        }
    }
    let spectrum = sieve::class_spectrum(x, q)?;
    let size = spectrum.nonempty().len();
    let phi = spectrum.group().order();
    Ok(BoundReport::exact(
        format!("|A({x}, {q})| vs 13/32 phi"),
        size as f64,
        13.0 * phi as f64 / 32.0,
        Relation::GreaterEq,
        32 * size >= 13 * phi,
    ))
}
