//! Real (quadratic) Dirichlet characters modulo `q` and the analytic
//! estimates attached to them.
//!
//! A character is stored as a sign assignment on the unit-group generators
//! (uniform for every modulus, fundamental discriminant or not; the Jacobi
//! symbol survives only as a cross-check oracle in tests). On top of the
//! evaluation table the module provides:
//!
//! * interval character sums with the `phi(q)/2` bound,
//! * certified values of `L(1,chi)` as intervals `[lo, hi]` obtained from a
//!   partial sum with rigorous tail radius `phi(q)/(2N)`,
//! * the lower bound `L(1,chi) >= pi/(4 phi(q)) - pi/phi(q)^2` and its
//!   verification against the certified interval,
//! * the divisor-sum identity `sum_{n<=x}(1*chi)(n) = sum_{d<=x} chi(d)
//!   floor(x/d)` with the square-count lower bound and the conditional
//!   `sqrt(x) f0(q)` upper bound,
//! * the truncated series check `1 + S(alpha) >= sqrt(pi)/(2 sqrt(alpha))`,
//! * least primes in the kernel of a character, with the `q^4` bound.
//!
//! Resource caps are explicit everywhere; an undecidable check is reported
//! as [`CheckOutcome::Inconclusive`], never as a silent pass.

use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arith::{self, BoundReport, UnitGroupStructure};
use crate::sieve::{self, SieveConfig};
use crate::util::{mul_mod, KahanSum};

/// Default cap on the number of series terms for L-sums and S(alpha).
pub const DEFAULT_TERM_CAP: u64 = 10_000_000;

#[derive(Debug, Error, PartialEq)]
pub enum CharError {
    #[error("the principal character is rejected by analytic operations")]
    Principal,
    #[error("tolerance must be positive and finite, got {0}")]
    BadTolerance(f64),
    #[error("alpha must be positive and finite, got {0}")]
    BadAlpha(f64),
    #[error("empty interval: lo = {lo} > hi = {hi}")]
    BadInterval { lo: i64, hi: i64 },
    #[error("needs {needed} series terms, above the configured cap {cap}")]
    TermCap { needed: u64, cap: u64 },
    #[error("modulus {0} is too small, need q >= {1}")]
    SmallModulus(u64, u64),
    #[error("no prime with chi(p) = 1 found up to {cap} for modulus {q} (lemma counterexample?)")]
    KernelPrimeNotFound { q: u64, cap: u128 },
    #[error(transparent)]
    Arith(#[from] arith::ArithError),
    #[error(transparent)]
    Sieve(#[from] sieve::SieveError),
}

/// Tri-state outcome of a checked inequality under resource caps.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckOutcome {
    Satisfied,
    Violated,
    Inconclusive,
}

impl std::fmt::Display for CheckOutcome {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CheckOutcome::Satisfied => write!(f, "satisfied"),
            CheckOutcome::Violated => write!(f, "VIOLATED"),
            CheckOutcome::Inconclusive => write!(f, "inconclusive"),
        }
    }
}

/// A real Dirichlet character modulo `q`: completely multiplicative,
/// `q`-periodic, valued in {-1, 0, 1}, zero exactly off the units.
#[derive(Clone, Debug)]
pub struct QuadraticCharacter {
    group: Arc<UnitGroupStructure>,
    signs: Vec<i8>,
    mask: u64,
    principal: bool,
    values: Vec<i8>,
}

impl PartialEq for QuadraticCharacter {
    fn eq(&self, other: &Self) -> bool {
        self.modulus() == other.modulus() && self.values == other.values
    }
}

impl QuadraticCharacter {
    fn build(group: Arc<UnitGroupStructure>, signs: Vec<i8>, mask: u64) -> QuadraticCharacter {
        let q = group.modulus();
        let mut values = vec![0i8; q.max(1) as usize];
        let gens = group.generators();
        let k = gens.len();
        let mut digits = vec![0u64; k];
        let mut element = 1 % q.max(1);
        let mut sign = 1i8;
        // Odometer over exponent vectors: every micro-step multiplies the
        // element by one generator and the sign by that generator's sign
        // (wrap-around included, since g^order = 1 and signs at -1 occur
        // only on even orders).
        for _ in 0..group.phi() {
            values[element as usize] = sign;
            let mut i = 0;
            while i < k {
                digits[i] += 1;
                element = mul_mod(element, gens[i].element, q);
                sign *= signs[i];
                if digits[i] < gens[i].order {
                    break;
                }
                digits[i] = 0;
                i += 1;
            }
        }
        QuadraticCharacter {
            group,
            signs,
            mask,
            principal: mask == 0,
            values,
        }
    }

    pub fn modulus(&self) -> u64 {
        self.group.modulus()
    }

    pub fn is_principal(&self) -> bool {
        self.principal
    }

    /// Stable identifier: modulus plus the sign pattern over even-order
    /// generators in canonical order.
    pub fn id(&self) -> String {
        format!("q{}.{}", self.modulus(), self.mask)
    }

    pub fn group(&self) -> &Arc<UnitGroupStructure> {
        &self.group
    }

    /// Signs on the unit-group generators.
    pub fn signs(&self) -> &[i8] {
        &self.signs
    }

    /// One period of values, indexed by residue.
    pub fn values(&self) -> &[i8] {
        &self.values
    }

    #[inline]
    pub fn eval(&self, n: i64) -> i32 {
        let q = self.modulus().max(1) as i128;
        self.values[(n as i128).rem_euclid(q) as usize] as i32
    }

    #[inline]
    pub fn eval_u64(&self, n: u64) -> i32 {
        self.values[(n % self.modulus().max(1)) as usize] as i32
    }

    pub fn phi(&self) -> u64 {
        self.group.phi()
    }
}

/// All real characters mod `q` (the 2-torsion of the dual group), principal
/// first. The count is `2^t` with `t` the number of even-order generators.
pub fn real_characters(q: u64) -> Result<Vec<QuadraticCharacter>, CharError> {
    let group = Arc::new(arith::unit_group(q)?);
    let even: Vec<usize> = group
        .generators()
        .iter()
        .enumerate()
        .filter(|(_, g)| g.order % 2 == 0)
        .map(|(i, _)| i)
        .collect();
    let k = group.generators().len();
    let mut out = Vec::with_capacity(1 << even.len());
    for mask in 0..(1u64 << even.len()) {
        let mut signs = vec![1i8; k];
        for (bit, &pos) in even.iter().enumerate() {
            if mask >> bit & 1 == 1 {
                signs[pos] = -1;
            }
        }
        out.push(QuadraticCharacter::build(group.clone(), signs, mask));
    }
    Ok(out)
}

/// Interval sum together with its `phi(q)/2` bound report.
#[derive(Clone, Debug)]
pub struct IntervalSum {
    pub sum: i64,
    pub report: BoundReport,
}

/// Exact `sum_{lo <= n <= hi} chi(n)` for a non-principal character,
/// compared against `phi(q)/2`. Any finite interval is allowed; the value
/// is reduced through full periods, which sum to zero.
pub fn interval_char_sum(
    chi: &QuadraticCharacter,
    lo: i64,
    hi: i64,
) -> Result<IntervalSum, CharError> {
    if chi.is_principal() {
        return Err(CharError::Principal);
    }
    if lo > hi || lo == i64::MIN {
        return Err(CharError::BadInterval { lo, hi });
    }
    let q = chi.modulus() as i64;
    // prefix[r] = chi(1) + ... + chi(r); full periods vanish, so the
    // cumulative sum up to any integer m is prefix[m mod q].
    let mut prefix = vec![0i64; q as usize];
    for r in 1..q as usize {
        prefix[r] = prefix[r - 1] + chi.values()[r] as i64;
    }
    let cum = |m: i64| prefix[m.rem_euclid(q) as usize];
    let sum = cum(hi) - cum(lo - 1);
    let phi = chi.phi();
    let report = BoundReport::exact(
        format!("|sum chi on [{lo},{hi}]|, chi = {}", chi.id()),
        sum.unsigned_abs() as f64,
        phi as f64 / 2.0,
        arith::Relation::LessEq,
        2 * sum.unsigned_abs() <= phi,
    );
    Ok(IntervalSum { sum, report })
}

/// An interval guaranteed to contain a real quantity.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CertifiedValue {
    pub lo: f64,
    pub hi: f64,
}

impl CertifiedValue {
    pub fn new(lo: f64, hi: f64) -> CertifiedValue {
        assert!(lo <= hi, "certified interval needs lo <= hi");
        CertifiedValue { lo, hi }
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn contains(&self, v: f64) -> bool {
        self.lo <= v && v <= self.hi
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }
}

/// Certified `L(1,chi)` with the default term cap.
pub fn l_one_certified(chi: &QuadraticCharacter, tol: f64) -> Result<CertifiedValue, CharError> {
    l_one_certified_capped(chi, tol, DEFAULT_TERM_CAP)
}

/// Certified `L(1,chi)` from the partial sum `sum_{d<=N} chi(d)/d` with
/// rigorous tail radius `phi(q)/(2N)`; `N` is chosen so that tail plus
/// summation rounding stays below `tol/2`, giving an interval of width at
/// most `tol`.
pub fn l_one_certified_capped(
    chi: &QuadraticCharacter,
    tol: f64,
    cap: u64,
) -> Result<CertifiedValue, CharError> {
    if chi.is_principal() {
        return Err(CharError::Principal);
    }
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(CharError::BadTolerance(tol));
    }
    let q = chi.modulus();
    let phi = chi.phi();
    // Tail radius phi/(2N) <= tol/2.04 leaves room for rounding.
    let needed = (1.02 * phi as f64 / tol).ceil() as u64;
    let blocks = needed.div_ceil(q);
    let n = blocks * q;
    if n > cap {
        return Err(CharError::TermCap { needed: n, cap });
    }
    // Nonzero offsets within one period, as floats.
    let terms: Vec<(f64, f64)> = chi
        .values()
        .iter()
        .enumerate()
        .skip(1)
        .filter(|(_, &v)| v != 0)
        .map(|(r, &v)| (r as f64, v as f64))
        .collect();
    // Four independent accumulators break the dependency chain.
    let mut lanes = [KahanSum::new(); 4];
    let mut rot = 0usize;
    for k in 0..blocks {
        let base = (k * q) as f64;
        for &(off, s) in &terms {
            lanes[rot & 3].add(s / (base + off));
            rot = rot.wrapping_add(1);
        }
    }
    let value: f64 = lanes.iter().map(KahanSum::value).sum();
    let abs: f64 = lanes.iter().map(KahanSum::abs_sum).sum();
    let tail = phi as f64 / (2.0 * n as f64);
    let round = 8.0 * f64::EPSILON * abs + f64::MIN_POSITIVE;
    let radius = tail + round;
    let out = CertifiedValue::new(value - radius, value + radius);
    debug_assert!(out.width() <= tol);
    Ok(out)
}

/// The lower bound `pi/(4 phi(q)) - pi/phi(q)^2` for `L(1,chi)` at a
/// non-principal quadratic character mod `q`.
pub fn gelfond_lower_bound(q: u64) -> Result<f64, CharError> {
    let phi = arith::euler_phi(q)? as f64;
    Ok(std::f64::consts::PI / (4.0 * phi) - std::f64::consts::PI / (phi * phi))
}

/// Verification record for the `L(1,chi)` lower bound.
#[derive(Clone, Debug)]
pub struct GelfondReport {
    pub modulus: u64,
    pub char_id: String,
    pub bound: f64,
    pub interval: Option<CertifiedValue>,
    pub outcome: CheckOutcome,
}

pub fn check_gelfond(chi: &QuadraticCharacter) -> Result<GelfondReport, CharError> {
    check_gelfond_capped(chi, 1e-6, DEFAULT_TERM_CAP)
}

/// Checks that the certified `L(1,chi)` interval sits above the bound,
/// narrowing the interval until it decides or the cap is reached.
pub fn check_gelfond_capped(
    chi: &QuadraticCharacter,
    tol: f64,
    cap: u64,
) -> Result<GelfondReport, CharError> {
    if chi.is_principal() {
        return Err(CharError::Principal);
    }
    let bound = gelfond_lower_bound(chi.modulus())?;
    let mut tol = tol;
    let mut interval = None;
    let outcome = loop {
        match l_one_certified_capped(chi, tol, cap) {
            Ok(iv) => {
                interval = Some(iv);
                if iv.lo >= bound + 1e-12 {
                    break CheckOutcome::Satisfied;
                }
                if iv.hi < bound {
                    break CheckOutcome::Violated;
                }
                tol /= 4.0;
            }
            Err(CharError::TermCap { .. }) => break CheckOutcome::Inconclusive,
            Err(e) => return Err(e),
        }
    };
    Ok(GelfondReport {
        modulus: chi.modulus(),
        char_id: chi.id(),
        bound,
        interval,
        outcome,
    })
}

/// Record of the divisor-sum identity and its bounds at one `(chi, x)`.
#[derive(Clone, Debug)]
pub struct DivisorSumReport {
    pub modulus: u64,
    pub char_id: String,
    pub x: u64,
    /// `sum_{n<=x} (1*chi)(n)` by direct divisor sums.
    pub direct: i64,
    /// The same sum via `sum_{d<=x} chi(d) floor(x/d)`.
    pub hyperbola: i64,
    pub identity_ok: bool,
    /// `#{m <= sqrt(x) : gcd(m,q) = 1}`, a lower bound for the sum.
    pub square_count: u64,
    pub lower_ok: bool,
    /// True when no prime `p <= x` has `chi(p) = 1`.
    pub kernel_free: bool,
    /// The `sqrt(x) f0(q)` upper bound, checked only when `kernel_free`.
    pub pintz: Option<BoundReport>,
}

impl DivisorSumReport {
    pub fn all_ok(&self) -> bool {
        self.identity_ok && self.lower_ok && self.pintz.as_ref().is_none_or(|r| r.satisfied)
    }
}

/// Computes `sum_{n<=x} (1*chi)(n)` two ways, checks the square-count lower
/// bound, and when no prime up to `x` lies in the kernel of `chi` also
/// checks the `sqrt(x) f0(q)` upper bound.
pub fn divisor_sum_check(chi: &QuadraticCharacter, x: u64) -> Result<DivisorSumReport, CharError> {
    if chi.is_principal() {
        return Err(CharError::Principal);
    }
    if x == 0 {
        return Err(CharError::Arith(arith::ArithError::Zero));
    }
    let q = chi.modulus();
    // Direct route: sieve of divisors.
    let mut conv = vec![0i32; x as usize + 1];
    for d in 1..=x {
        let c = chi.eval_u64(d);
        if c == 0 {
            continue;
        }
        let mut m = d;
        while m <= x {
            conv[m as usize] += c;
            m += d;
        }
    }
    let direct: i64 = conv[1..].iter().map(|&v| v as i64).sum();
    // Hyperbola route.
    let hyperbola: i64 = (1..=x)
        .map(|d| chi.eval_u64(d) as i64 * (x / d) as i64)
        .sum();
    let root = (1..).take_while(|m| m * m <= x).last().unwrap_or(0);
    let square_count = (1..=root)
        .filter(|&m| crate::util::gcd_u64(m, q) == 1)
        .count() as u64;
    let kernel_free = sieve::primes_up_to(x)?.all(|p| chi.eval_u64(p) != 1);
    let pintz = if kernel_free {
        let bound = (x as f64).sqrt() * arith::f0(q.max(2))?;
        Some(BoundReport::le_slack(
            format!("sum_(n<={x}) (1*chi)(n), chi = {}", chi.id()),
            direct as f64,
            bound,
        ))
    } else {
        None
    };
    Ok(DivisorSumReport {
        modulus: q,
        char_id: chi.id(),
        x,
        direct,
        hyperbola,
        identity_ok: direct == hyperbola,
        square_count,
        lower_ok: direct >= square_count as i64,
        kernel_free,
        pintz,
    })
}

/// Record of the truncated check `1 + S(alpha) >= sqrt(pi)/(2 sqrt(alpha))`.
#[derive(Clone, Debug)]
pub struct SeriesReport {
    pub modulus: u64,
    pub char_id: String,
    pub alpha: f64,
    /// Partial sum of `S(alpha)`; a lower bound up to rounding, since all
    /// convolution terms are nonnegative.
    pub partial: f64,
    /// Rigorous upper bound for the truncation tail.
    pub tail_bound: f64,
    pub rhs: f64,
    pub terms: u64,
    pub outcome: CheckOutcome,
}

pub fn gelfond_series_check(
    chi: &QuadraticCharacter,
    alpha: f64,
) -> Result<SeriesReport, CharError> {
    gelfond_series_check_capped(chi, alpha, DEFAULT_TERM_CAP)
}

/// Evaluates `S(alpha) = sum_n (1*chi)(n) e^(-n alpha)` truncated at `M`
/// terms with the geometric tail bound `sum_{n>M} n e^(-n alpha)`, and
/// checks `1 + S(alpha) >= sqrt(pi) / (2 sqrt(alpha))`.
pub fn gelfond_series_check_capped(
    chi: &QuadraticCharacter,
    alpha: f64,
    cap: u64,
) -> Result<SeriesReport, CharError> {
    if chi.is_principal() {
        return Err(CharError::Principal);
    }
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(CharError::BadAlpha(alpha));
    }
    let rhs = std::f64::consts::PI.sqrt() / (2.0 * alpha.sqrt());
    // Terms beyond ~46/alpha contribute below e^-46 * poly, far under any
    // slack used here.
    let mut m = ((46.0 / alpha).ceil() as u64).clamp(64, cap);
    loop {
        let (partial, round) = series_partial(chi, alpha, m);
        let tail = series_tail_bound(alpha, m);
        let lower = 1.0 + partial - round;
        let upper = 1.0 + partial + tail + round;
        let outcome = if lower >= rhs + 1e-12 {
            CheckOutcome::Satisfied
        } else if upper < rhs {
            CheckOutcome::Violated
        } else if m >= cap {
            CheckOutcome::Inconclusive
        } else {
            m = (m * 2).min(cap);
            continue;
        };
        return Ok(SeriesReport {
            modulus: chi.modulus(),
            char_id: chi.id(),
            alpha,
            partial,
            tail_bound: tail,
            rhs,
            terms: m,
            outcome,
        });
    }
}

fn series_partial(chi: &QuadraticCharacter, alpha: f64, m: u64) -> (f64, f64) {
    // (1*chi)(n) for n <= m by a divisor sieve, then weighted by e^(-n a).
    let mut conv = vec![0i32; m as usize + 1];
    for d in 1..=m {
        let c = chi.eval_u64(d);
        if c == 0 {
            continue;
        }
        let mut k = d;
        while k <= m {
            conv[k as usize] += c;
            k += d;
        }
    }
    let mut sum = KahanSum::new();
    for n in 1..=m {
        let c = conv[n as usize];
        debug_assert!(c >= 0, "1*chi is nonnegative");
        if c != 0 {
            sum.add(c as f64 * (-(n as f64) * alpha).exp());
        }
    }
    // Rounding radius: compensated-summation error plus one exp and one
    // multiply rounding per term (generous factor).
    (sum.value(), 2.0 * sum.rounding_radius() + f64::MIN_POSITIVE)
}

/// Upper bound on `sum_{n>m} n e^(-n alpha)` (each `(1*chi)(n) <= n`):
/// `r^(m+1) ((m+1)(1-r) + r) / (1-r)^2` with `r = e^(-alpha)`, inflated for
/// floating evaluation.
fn series_tail_bound(alpha: f64, m: u64) -> f64 {
    let r = (-alpha).exp();
    if r >= 1.0 {
        return f64::INFINITY;
    }
    let one_minus = 1.0 - r;
    let exact =
        r.powf(m as f64 + 1.0) * ((m as f64 + 1.0) * one_minus + r) / (one_minus * one_minus);
    exact * (1.0 + 1e-9) + f64::MIN_POSITIVE
}

/// Least prime in the kernel of a quadratic character, with the `q^4`
/// bound of the lemma.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KernelPrimeResult {
    pub modulus: u64,
    pub char_id: String,
    pub prime: u64,
    pub bound: u128,
    pub within_bound: bool,
}

pub fn least_kernel_prime(chi: &QuadraticCharacter) -> Result<KernelPrimeResult, CharError> {
    least_kernel_prime_capped(chi, None)
}

/// Streams primes until `chi(p) = 1`; the search cap defaults to `q^4`.
/// Exhausting the cap is an error (it would contradict the lemma).
pub fn least_kernel_prime_capped(
    chi: &QuadraticCharacter,
    cap: Option<u64>,
) -> Result<KernelPrimeResult, CharError> {
    if chi.is_principal() {
        return Err(CharError::Principal);
    }
    let q = chi.modulus();
    if q < 3 {
        return Err(CharError::SmallModulus(q, 3));
    }
    let bound = (q as u128).pow(4);
    let search_cap = cap.map(u128::from).unwrap_or(bound);
    let cfg = SieveConfig::from_env();
    let mut lo = 0u64;
    let mut chunk = 4096u128;
    while (lo as u128) < search_cap {
        let hi = ((lo as u128 + chunk).min(search_cap)) as u64;
        chunk *= 2;
        for p in sieve::primes_between(lo, hi, &cfg)? {
            if chi.eval_u64(p) == 1 {
                return Ok(KernelPrimeResult {
                    modulus: q,
                    char_id: chi.id(),
                    prime: p,
                    bound,
                    within_bound: (p as u128) <= bound,
                });
            }
        }
        lo = hi;
    }
    Err(CharError::KernelPrimeNotFound { q, cap: search_cap })
}

/// Least prime `p = 1 (mod q)`.
pub fn least_prime_one_mod_q(q: u64) -> Result<u64, CharError> {
    if q < 2 {
        return Err(CharError::SmallModulus(q, 2));
    }
    let mut n = q + 1;
    loop {
        if arith::is_prime(n) {
            return Ok(n);
        }
        n += q;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn nonprincipal(q: u64) -> Vec<QuadraticCharacter> {
        real_characters(q)
            .unwrap()
            .into_iter()
            .filter(|c| !c.is_principal())
            .collect()
    }

    #[test]
    fn character_counts() {
        assert_eq!(real_characters(5).unwrap().len(), 2);
        let c8 = real_characters(8).unwrap();
        assert_eq!(c8.len(), 4);
        assert_eq!(c8.iter().filter(|c| !c.is_principal()).count(), 3);
        let c1 = real_characters(1).unwrap();
        assert_eq!(c1.len(), 1);
        assert!(c1[0].is_principal());
        assert_eq!(c1[0].eval(12345), 1);
        // Only the principal character exists mod 2.
        assert_eq!(real_characters(2).unwrap().len(), 1);
    }

    #[test]
    fn count_is_two_to_even_generators() {
        for q in 1..=500u64 {
            let g = arith::unit_group(q).unwrap();
            let t = g.generators().iter().filter(|g| g.order % 2 == 0).count();
            assert_eq!(real_characters(q).unwrap().len(), 1 << t, "q={q}");
        }
    }

    #[test]
    fn characters_distinct_as_functions() {
        for q in 1..=500u64 {
            let chars = real_characters(q).unwrap();
            for i in 0..chars.len() {
                for j in i + 1..chars.len() {
                    assert_ne!(chars[i], chars[j], "q={q} i={i} j={j}");
                }
            }
        }
    }

    #[test]
    fn eval_examples() {
        let c4 = nonprincipal(4).remove(0);
        assert_eq!(c4.eval(3), -1);
        assert_eq!(c4.eval(1), 1);
        assert_eq!(c4.eval(2), 0);
        assert_eq!(c4.eval(-1), -1); // chi(-1) = chi(3)
        let c7 = nonprincipal(7).remove(0);
        assert_eq!(c7.eval(2), 1); // 2 = 3^2 mod 7
        for chi in real_characters(45).unwrap() {
            assert_eq!(chi.eval(1), 1);
        }
    }

    #[test]
    fn multiplicative_periodic_zero_off_units() {
        for q in 1..=500u64 {
            for chi in real_characters(q).unwrap() {
                let v = chi.values();
                for m in 0..q {
                    assert_eq!(
                        v[m as usize] != 0,
                        crate::util::gcd_u64(m, q) == 1,
                        "q={q} m={m}"
                    );
                    for n in 0..q {
                        let mn = (m * n) % q.max(1);
                        assert_eq!(
                            v[mn as usize],
                            v[m as usize] * v[n as usize],
                            "q={q} m={m} n={n}"
                        );
                    }
                }
                // Periodicity via eval.
                assert_eq!(chi.eval(3), chi.eval(3 + q as i64));
                // Full-period sum vanishes for non-principal chi.
                if !chi.is_principal() {
                    let s: i64 = v.iter().map(|&x| x as i64).sum();
                    assert_eq!(s, 0, "q={q}");
                }
            }
        }
    }

    #[test]
    fn legendre_matches_jacobi_oracle() {
        for q in (3..200u64).filter(|&q| arith::is_prime(q)) {
            let chi = nonprincipal(q).remove(0);
            for a in 0..q {
                assert_eq!(
                    chi.eval_u64(a),
                    arith::jacobi(a as i64, q).unwrap(),
                    "q={q} a={a}"
                );
            }
        }
    }

    #[test]
    fn interval_sum_examples() {
        let c4 = nonprincipal(4).remove(0);
        let r = interval_char_sum(&c4, 1, 4).unwrap();
        assert_eq!(r.sum, 0);
        assert!(r.report.satisfied);

        let c7 = nonprincipal(7).remove(0);
        let r = interval_char_sum(&c7, 1, 3).unwrap();
        assert_eq!(r.sum, 1); // 1 + 1 - 1, QRs are {1,2,4}
        assert_eq!(r.report.bound, 3.0);
        assert!(r.report.satisfied);

        let principal = real_characters(7).unwrap().remove(0);
        assert_eq!(
            interval_char_sum(&principal, 1, 3).unwrap_err(),
            CharError::Principal
        );
        assert!(matches!(
            interval_char_sum(&c7, 5, 2),
            Err(CharError::BadInterval { .. })
        ));
    }

    #[test]
    fn interval_sums_exhaustive_small() {
        // Oracle: direct evaluation over the interval, including intervals
        // far from [1, q] (periodic reduction must agree).
        for q in 3..=60u64 {
            for chi in nonprincipal(q) {
                for lo in 1..=q as i64 {
                    for hi in lo..=q as i64 {
                        let direct: i64 = (lo..=hi).map(|n| chi.eval(n) as i64).sum();
                        let r = interval_char_sum(&chi, lo, hi).unwrap();
                        assert_eq!(r.sum, direct, "q={q} [{lo},{hi}]");
                        assert!(r.report.satisfied, "bound violated q={q} [{lo},{hi}]");
                    }
                }
                let r = interval_char_sum(&chi, -17, 3 * q as i64 + 5).unwrap();
                let direct: i64 = (-17..=3 * q as i64 + 5).map(|n| chi.eval(n) as i64).sum();
                assert_eq!(r.sum, direct);
            }
        }
    }

    #[test]
    fn l_one_classical_values() {
        let c4 = nonprincipal(4).remove(0);
        let iv = l_one_certified(&c4, 1e-6).unwrap();
        assert!(iv.width() <= 1e-6);
        assert!(iv.contains(PI / 4.0));

        let c3 = nonprincipal(3).remove(0);
        let iv = l_one_certified(&c3, 1e-6).unwrap();
        assert!(iv.contains(PI / (3.0 * 3f64.sqrt())));

        // Alternating-series oracle for chi mod 4: consecutive Leibniz
        // partial sums bracket pi/4.
        let mut below = 0.0f64;
        let mut above = 0.0f64;
        let mut s = 0.0f64;
        for k in 0..200_000u64 {
            let term = if k % 2 == 0 { 1.0 } else { -1.0 } / (2 * k + 1) as f64;
            s += term;
            if k % 2 == 0 {
                above = s;
            } else {
                below = s;
            }
        }
        let iv4 = l_one_certified(&c4, 1e-6).unwrap();
        assert!(iv4.hi >= below && iv4.lo <= above);
    }

    #[test]
    fn l_one_mod_163() {
        let chi = nonprincipal(163).remove(0);
        let iv = l_one_certified_capped(&chi, 1e-4, 100_000_000).unwrap();
        assert!(iv.width() <= 1e-4);
        assert!(iv.contains(PI / 163f64.sqrt()));
    }

    #[test]
    fn l_one_intervals_nested() {
        for q in [3u64, 4, 163] {
            let chi = nonprincipal(q).remove(0);
            let wide = l_one_certified_capped(&chi, 1e-3, 100_000_000).unwrap();
            let narrow = l_one_certified_capped(&chi, 1e-5, 100_000_000).unwrap();
            assert!(wide.lo <= narrow.lo && narrow.hi <= wide.hi, "q={q}");
        }
    }

    #[test]
    fn l_one_errors() {
        let principal = real_characters(4).unwrap().remove(0);
        assert_eq!(
            l_one_certified(&principal, 1e-6).unwrap_err(),
            CharError::Principal
        );
        let c4 = nonprincipal(4).remove(0);
        assert!(matches!(
            l_one_certified(&c4, -1.0),
            Err(CharError::BadTolerance(_))
        ));
        assert!(matches!(
            l_one_certified_capped(&c4, 1e-12, 1000),
            Err(CharError::TermCap { .. })
        ));
    }

    #[test]
    fn gelfond_bound_values() {
        // q = 4: phi = 2, bound = pi/8 - pi/4 < 0.
        assert!(gelfond_lower_bound(4).unwrap() < 0.0);
        let b = gelfond_lower_bound(163).unwrap();
        assert!((b - 0.004728).abs() < 1e-5);
    }

    #[test]
    fn check_gelfond_examples() {
        let c4 = nonprincipal(4).remove(0);
        let r = check_gelfond(&c4).unwrap();
        assert_eq!(r.outcome, CheckOutcome::Satisfied);

        let c163 = nonprincipal(163).remove(0);
        let r = check_gelfond_capped(&c163, 1e-4, 100_000_000).unwrap();
        assert_eq!(r.outcome, CheckOutcome::Satisfied);
        assert!(r.interval.unwrap().lo > r.bound);
    }

    #[test]
    fn check_gelfond_small_sweep() {
        for q in 3..=100u64 {
            for chi in nonprincipal(q) {
                let r = check_gelfond_capped(&chi, 1e-4, 200_000_000).unwrap();
                assert_eq!(r.outcome, CheckOutcome::Satisfied, "q={q} chi={}", chi.id());
            }
        }
    }

    #[test]
    fn check_gelfond_inconclusive_on_tiny_cap() {
        let chi = nonprincipal(163).remove(0);
        let r = check_gelfond_capped(&chi, 1e-6, 100).unwrap();
        assert_eq!(r.outcome, CheckOutcome::Inconclusive);
    }

    #[test]
    fn divisor_sum_examples() {
        let c4 = nonprincipal(4).remove(0);
        let r = divisor_sum_check(&c4, 10).unwrap();
        assert_eq!(r.direct, 9);
        assert_eq!(r.hyperbola, 9);
        assert!(r.identity_ok && r.lower_ok);

        let r1 = divisor_sum_check(&c4, 1).unwrap();
        assert_eq!(r1.direct, 1);

        // chi mod 5: least kernel prime is 11 > 10, so Pintz applies.
        let c5 = nonprincipal(5).remove(0);
        let r = divisor_sum_check(&c5, 10).unwrap();
        assert!(r.kernel_free);
        assert_eq!(r.direct, 4);
        let pintz = r.pintz.as_ref().unwrap();
        assert!(pintz.satisfied);
        assert!((pintz.bound - 10f64.sqrt() * arith::f0(5).unwrap()).abs() < 1e-9);

        // At x = 11 the kernel prime 11 kills the hypothesis.
        let r = divisor_sum_check(&c5, 11).unwrap();
        assert!(!r.kernel_free);
        assert!(r.pintz.is_none());
    }

    #[test]
    fn divisor_sum_identity_sweep() {
        for q in 3..=100u64 {
            for chi in nonprincipal(q) {
                for x in [1u64, 2, 10, 100, 1000, 10_000] {
                    let r = divisor_sum_check(&chi, x).unwrap();
                    assert!(r.identity_ok, "identity q={q} x={x}");
                    assert!(r.lower_ok, "square bound q={q} x={x}");
                    if let Some(p) = &r.pintz {
                        assert!(p.satisfied, "pintz q={q} x={x}");
                    }
                }
            }
        }
    }

    #[test]
    fn series_check_examples() {
        let c3 = nonprincipal(3).remove(0);
        let r = gelfond_series_check(&c3, 1.0).unwrap();
        assert_eq!(r.outcome, CheckOutcome::Satisfied);
        assert!((r.rhs - 0.8862).abs() < 1e-3);

        let c4 = nonprincipal(4).remove(0);
        let r = gelfond_series_check(&c4, 0.1).unwrap();
        assert_eq!(r.outcome, CheckOutcome::Satisfied);
        assert!((r.rhs - 2.8025).abs() < 1e-3);

        // The proof's own choice alpha = pi / phi(q)^2 at q = 5.
        let c5 = nonprincipal(5).remove(0);
        let alpha = PI / 16.0;
        let r = gelfond_series_check(&c5, alpha).unwrap();
        assert_eq!(r.outcome, CheckOutcome::Satisfied);

        assert!(matches!(
            gelfond_series_check(&c5, 0.0),
            Err(CharError::BadAlpha(_))
        ));
    }

    #[test]
    fn series_check_inconclusive_on_tiny_cap() {
        // rhs ~ 886 while 128 terms reach a partial sum near 100: the
        // truncation cannot decide either way.
        let c4 = nonprincipal(4).remove(0);
        let r = gelfond_series_check_capped(&c4, 1e-6, 128).unwrap();
        assert_eq!(r.outcome, CheckOutcome::Inconclusive);
    }

    #[test]
    fn kernel_prime_examples() {
        let c5 = nonprincipal(5).remove(0);
        let r = least_kernel_prime(&c5).unwrap();
        assert_eq!(r.prime, 11);
        assert!(r.within_bound);
        assert_eq!(r.bound, 625);

        assert_eq!(
            least_kernel_prime(&nonprincipal(3).remove(0))
                .unwrap()
                .prime,
            7
        );
        assert_eq!(
            least_kernel_prime(&nonprincipal(4).remove(0))
                .unwrap()
                .prime,
            5
        );

        // Equal characters give the same result.
        let again = least_kernel_prime(&nonprincipal(5).remove(0)).unwrap();
        assert_eq!(again, r);
    }

    #[test]
    fn least_prime_one_mod_q_matches_brute_force() {
        // Independent oracle: trial-division primality on the progression.
        let naive_is_prime = |n: u64| {
            n >= 2
                && (2..n)
                    .take_while(|d| d * d <= n)
                    .all(|d| !n.is_multiple_of(d))
        };
        for q in 2..=30u64 {
            let mut expect = q + 1;
            while !naive_is_prime(expect) {
                expect += q;
            }
            assert_eq!(least_prime_one_mod_q(q).unwrap(), expect, "q={q}");
        }
        assert_eq!(least_prime_one_mod_q(2).unwrap(), 3);
        assert_eq!(least_prime_one_mod_q(7).unwrap(), 29);
        assert_eq!(least_prime_one_mod_q(13).unwrap(), 53);
        // 13 = 12 + 1 is prime, so the least for q = 12 is 13.
        assert_eq!(least_prime_one_mod_q(12).unwrap(), 13);
        assert!(least_prime_one_mod_q(1).is_err());
    }
}
