//! Exact integer arithmetic underneath every other module: factorization,
//! Euler's phi, the sieve weight `f0(q)`, the Jacobi symbol, deterministic
//! primality, and the structure of the unit group `(Z/qZ)^*` as generators
//! with orders obtained from the CRT decomposition of `q`.
//!
//! Everything here is pure and immutable after construction; values can be
//! shared freely across worker threads.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::util::{gcd_u64, mul_mod, pow_mod};

/// Direction of a checked inequality.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Relation {
    #[serde(rename = "<=")]
    LessEq,
    #[serde(rename = ">=")]
    GreaterEq,
}

impl std::fmt::Display for Relation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Relation::LessEq => write!(f, "<="),
            Relation::GreaterEq => write!(f, ">="),
        }
    }
}

/// Outcome of comparing a computed quantity against a bound.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub quantity: String,
    pub computed: f64,
    pub bound: f64,
    pub relation: Relation,
    pub satisfied: bool,
}

/// Absolute slack applied to floating-point comparisons, always in the
/// direction that makes the check stricter: a rounding error must never
/// hide a genuine violation.
pub const FLOAT_SLACK: f64 = 1e-9;

impl BoundReport {
    /// `computed <= bound`, compared as given (use for exact values).
    pub fn le(quantity: impl Into<String>, computed: f64, bound: f64) -> Self {
        BoundReport {
            quantity: quantity.into(),
            computed,
            bound,
            relation: Relation::LessEq,
            satisfied: computed <= bound,
        }
    }

    /// `computed >= bound`, compared as given (use for exact values).
    pub fn ge(quantity: impl Into<String>, computed: f64, bound: f64) -> Self {
        BoundReport {
            quantity: quantity.into(),
            computed,
            bound,
            relation: Relation::GreaterEq,
            satisfied: computed >= bound,
        }
    }

    /// `computed <= bound` where the bound came from floating arithmetic;
    /// the comparison is tightened by [`FLOAT_SLACK`].
    pub fn le_slack(quantity: impl Into<String>, computed: f64, bound: f64) -> Self {
        BoundReport {
            quantity: quantity.into(),
            computed,
            bound,
            relation: Relation::LessEq,
            satisfied: computed <= bound - FLOAT_SLACK,
        }
    }

    /// `computed >= bound`, tightened by [`FLOAT_SLACK`].
    pub fn ge_slack(quantity: impl Into<String>, computed: f64, bound: f64) -> Self {
        BoundReport {
            quantity: quantity.into(),
            computed,
            bound,
            relation: Relation::GreaterEq,
            satisfied: computed >= bound + FLOAT_SLACK,
        }
    }

    /// Report whose truth value was decided by exact (integer) arithmetic;
    /// `computed`/`bound` are only for display.
    pub fn exact(
        quantity: impl Into<String>,
        computed: f64,
        bound: f64,
        relation: Relation,
        satisfied: bool,
    ) -> Self {
        BoundReport {
            quantity: quantity.into(),
            computed,
            bound,
            relation,
            satisfied,
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ArithError {
    #[error("input must be nonzero")]
    Zero,
    #[error("modulus {0} is below the smallest admissible value {1}")]
    ModulusTooSmall(u64, u64),
    #[error("the Jacobi symbol requires an odd positive modulus, got {0}")]
    NonOddModulus(u64),
}

/// Prime factorization `n = prod p^e`, primes in increasing order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Factorization {
    n: u64,
    factors: Vec<(u64, u32)>,
}

impl Factorization {
    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn factors(&self) -> &[(u64, u32)] {
        &self.factors
    }

    /// Distinct prime divisors, increasing.
    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        self.factors.iter().map(|&(p, _)| p)
    }
}

/// Trial division with a mod-30 wheel. Exact for the full `u64` range,
/// intended for desk-scale inputs (the verifier never factors beyond ~10^6).
pub fn factor(n: u64) -> Result<Factorization, ArithError> {
    if n == 0 {
        return Err(ArithError::Zero);
    }
    let mut rest = n;
    let mut factors = Vec::new();
    for p in [2u64, 3, 5] {
        if rest.is_multiple_of(p) {
            let mut e = 0u32;
            while rest.is_multiple_of(p) {
                rest /= p;
                e += 1;
            }
            factors.push((p, e));
        }
    }
    const WHEEL: [u64; 8] = [4, 2, 4, 2, 4, 6, 2, 6];
    let mut d = 7u64;
    let mut w = 0usize;
    while d.checked_mul(d).is_some_and(|dd| dd <= rest) {
        if rest.is_multiple_of(d) {
            let mut e = 0u32;
            while rest.is_multiple_of(d) {
                rest /= d;
                e += 1;
            }
            factors.push((d, e));
        }
        d += WHEEL[w];
        w = (w + 1) % WHEEL.len();
    }
    if rest > 1 {
        factors.push((rest, 1));
    }
    Ok(Factorization { n, factors })
}

/// Euler's totient, via `phi(n) = n * prod_{p | n} (1 - 1/p)`.
pub fn euler_phi(n: u64) -> Result<u64, ArithError> {
    let f = factor(n)?;
    let mut phi = 1u64;
    for &(p, e) in f.factors() {
        phi *= p.pow(e - 1) * (p - 1);
    }
    Ok(phi)
}

/// The multiplicative weight `f0(q) = prod_{p | q} (1 - 1/sqrt(p))^-1`.
///
/// Computed in doubles; the relative error stays far below 1e-12 (one
/// square root, one division and one multiplication per prime divisor).
pub fn f0(q: u64) -> Result<f64, ArithError> {
    if q < 2 {
        return Err(ArithError::ModulusTooSmall(q, 2));
    }
    let mut acc = 1.0f64;
    for p in factor(q)?.primes() {
        acc *= 1.0 / (1.0 - 1.0 / (p as f64).sqrt());
    }
    Ok(acc)
}

/// Checks `f0(q) <= 3.32 * sqrt(q)`.
pub fn check_f0_bound(q: u64) -> Result<BoundReport, ArithError> {
    let value = f0(q)?;
    let bound = 3.32 * (q as f64).sqrt();
    Ok(BoundReport::le_slack(format!("f0({q})"), value, bound))
}

/// Jacobi symbol `(a|n)` for odd positive `n`; fully multiplicative in `n`,
/// with `(a|1) = 1`.
pub fn jacobi(a: i64, n: u64) -> Result<i32, ArithError> {
    if n == 0 || n.is_multiple_of(2) {
        return Err(ArithError::NonOddModulus(n));
    }
    let mut num = (a as i128).rem_euclid(n as i128) as u64;
    let mut den = n;
    let mut sign = 1i32;
    while num != 0 {
        while num.is_multiple_of(2) {
            num /= 2;
            if matches!(den % 8, 3 | 5) {
                sign = -sign;
            }
        }
        std::mem::swap(&mut num, &mut den);
        if num % 4 == 3 && den % 4 == 3 {
            sign = -sign;
        }
        num %= den;
    }
    Ok(if den == 1 { sign } else { 0 })
}

/// Deterministic Miller-Rabin, valid for all `u64`.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == p {
            return true;
        }
        if n.is_multiple_of(p) {
            return false;
        }
    }
    let mut d = n - 1;
    let mut s = 0u32;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
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

/// Modular inverse by extended Euclid; `None` when `gcd(a, m) > 1`.
pub fn mod_inverse(a: u64, m: u64) -> Option<u64> {
    if m == 1 {
        return Some(0);
    }
    let (mut t, mut new_t) = (0i128, 1i128);
    let (mut r, mut new_r) = (m as i128, (a % m) as i128);
    while new_r != 0 {
        let quot = r / new_r;
        (t, new_t) = (new_t, t - quot * new_t);
        (r, new_r) = (new_r, r - quot * new_r);
    }
    if r != 1 {
        return None;
    }
    Some(t.rem_euclid(m as i128) as u64)
}

/// One generator of the unit group, with its multiplicative order.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Generator {
    pub element: u64,
    pub order: u64,
}

/// Exponent-vector lookup tables are precomputed only up to this group
/// order; larger groups fall back to per-component discrete logarithms.
pub const EXP_TABLE_MAX: u64 = 1 << 20;

/// The group `(Z/qZ)^*` presented as independent generators with orders,
/// one cyclic factor per CRT component (primitive roots at odd prime
/// powers, the pair `{-1, 5}` at powers of two >= 8).
///
/// Units are indexed in increasing residue order; for `q = 1` the single
/// unit is the residue `0`.
#[derive(Clone, Debug)]
pub struct UnitGroupStructure {
    modulus: u64,
    phi: u64,
    generators: Vec<Generator>,
    /// CRT data per generator: (prime power, local generator, local order),
    /// used by the on-demand discrete-log path.
    components: Vec<(u64, u64, u64)>,
    units: Vec<u64>,
    index_of: Vec<u32>,
    exp_rank: Option<Vec<u64>>,
}

const NO_UNIT: u32 = u32::MAX;

impl UnitGroupStructure {
    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn phi(&self) -> u64 {
        self.phi
    }

    pub fn generators(&self) -> &[Generator] {
        &self.generators
    }

    /// Units in increasing residue order.
    pub fn units(&self) -> &[u64] {
        &self.units
    }

    pub fn is_unit(&self, r: u64) -> bool {
        self.index_of(r).is_some()
    }

    /// Index of a residue in the unit enumeration.
    pub fn index_of(&self, r: u64) -> Option<usize> {
        let r = r % self.modulus.max(1);
        match self.index_of[r as usize] {
            NO_UNIT => None,
            i => Some(i as usize),
        }
    }

    pub fn unit_at(&self, idx: usize) -> u64 {
        self.units[idx]
    }

    pub fn identity_index(&self) -> usize {
        self.index_of(1 % self.modulus).expect("identity is a unit")
    }

    /// Product of two units, by index.
    #[inline]
    pub fn mul_idx(&self, i: usize, j: usize) -> usize {
        let r = mul_mod(self.units[i], self.units[j], self.modulus);
        self.index_of[r as usize] as usize
    }

    /// Inverse of a unit, by index.
    pub fn inv_idx(&self, i: usize) -> usize {
        let r = mod_inverse(self.units[i], self.modulus).expect("unit is invertible");
        self.index_of[r as usize] as usize
    }

    /// Mixed-radix rank of the exponent vector of `r` with respect to the
    /// generator list (little-endian: the first generator varies fastest).
    pub fn exponent_rank(&self, r: u64) -> Option<u64> {
        let idx = self.index_of(r)?;
        if let Some(table) = &self.exp_rank {
            return Some(table[idx]);
        }
        // On-demand path: discrete logarithm per CRT component.
        let mut rank = 0u64;
        let mut stride = 1u64;
        for (gi, &(pk, _, order)) in self.components.iter().enumerate() {
            let digit = self.component_digit(gi, pk, self.units[idx] % pk);
            rank += digit * stride;
            stride *= order;
        }
        Some(rank)
    }

    /// Exponent vector of `r`: `r = prod generators[i].element ^ v[i]`.
    pub fn exponent_vector(&self, r: u64) -> Option<Vec<u64>> {
        let rank = self.exponent_rank(r)?;
        Some(self.decode_rank(rank))
    }

    pub fn decode_rank(&self, mut rank: u64) -> Vec<u64> {
        self.generators
            .iter()
            .map(|g| {
                let d = rank % g.order;
                rank /= g.order;
                d
            })
            .collect()
    }

    fn component_digit(&self, gi: usize, pk: u64, local: u64) -> u64 {
        let (_, gen, order) = self.components[gi];
        if pk.is_multiple_of(2) && pk >= 8 {
            // One of the two generators of the 2-part.
            if gen == pk - 1 {
                // Sign generator -1: digit is 0 iff local is in <5>,
                // i.e. local == 1 mod 4.
                return if local % 4 == 1 { 0 } else { 1 };
            }
            // Generator 5: strip the sign first.
            let v = if local % 4 == 1 { local } else { pk - local };
            return discrete_log(5, v, pk, order).expect("unit lies in <5>");
        }
        discrete_log(gen, local, pk, order).expect("generator generates the component")
    }
}

/// Baby-step giant-step in the cyclic group generated by `base` mod `m`.
fn discrete_log(base: u64, target: u64, m: u64, order: u64) -> Option<u64> {
    use std::collections::HashMap;
    let steps = (order as f64).sqrt().ceil() as u64 + 1;
    let mut baby = HashMap::with_capacity(steps as usize);
    let mut cur = 1 % m;
    for j in 0..steps {
        baby.entry(cur).or_insert(j);
        cur = mul_mod(cur, base, m);
    }
    let giant = pow_mod(mod_inverse(base, m)?, steps, m);
    let mut gamma = target % m;
    for i in 0..=steps {
        if let Some(&j) = baby.get(&gamma) {
            let x = i * steps + j;
            if x < order {
                return Some(x);
            }
        }
        gamma = mul_mod(gamma, giant, m);
    }
    None
}

fn primitive_root_mod_p(p: u64) -> u64 {
    if p == 2 {
        return 1;
    }
    let phi = p - 1;
    let fac = factor(phi).expect("phi > 0");
    'cand: for g in 2..p {
        for r in fac.primes() {
            if pow_mod(g, phi / r, p) == 1 {
                continue 'cand;
            }
        }
        return g;
    }
    unreachable!("every odd prime has a primitive root");
}

/// Local generators of `(Z/p^e)^*` as (element, order) pairs.
fn component_generators(p: u64, e: u32) -> Vec<(u64, u64)> {
    let pk = p.pow(e);
    if p == 2 {
        return match e {
            1 => vec![],
            2 => vec![(3, 2)],
            _ => vec![(pk - 1, 2), (5, pk / 4)],
        };
    }
    let mut g = primitive_root_mod_p(p);
    if e > 1 && pow_mod(g, p - 1, p * p) == 1 {
        g += p;
    }
    let order = pk / p * (p - 1);
    vec![(g % pk, order)]
}

/// Computes the generator/order decomposition of `(Z/qZ)^*`.
pub fn unit_group(q: u64) -> Result<UnitGroupStructure, ArithError> {
    unit_group_with_table_limit(q, EXP_TABLE_MAX)
}

/// As [`unit_group`], with an explicit threshold on the group order up to
/// which the exponent-rank table is precomputed.
pub fn unit_group_with_table_limit(
    q: u64,
    table_limit: u64,
) -> Result<UnitGroupStructure, ArithError> {
    if q == 0 {
        return Err(ArithError::Zero);
    }
    let fac = factor(q)?;
    let mut generators = Vec::new();
    let mut components = Vec::new();
    for &(p, e) in fac.factors() {
        let pk = p.pow(e);
        let rest = q / pk;
        for (g_local, order) in component_generators(p, e) {
            // CRT lift: congruent to the local generator in this component,
            // congruent to 1 everywhere else.
            let lifted = if rest == 1 {
                g_local
            } else {
                crt_pair(g_local, pk, 1, rest)
            };
            generators.push(Generator {
                element: lifted,
                order,
            });
            components.push((pk, g_local, order));
        }
    }
    let phi = generators.iter().map(|g| g.order).product::<u64>();

    let mut units = Vec::with_capacity(phi as usize);
    let mut index_of = vec![NO_UNIT; q.max(1) as usize];
    for r in 0..q.max(1) {
        if gcd_u64(r, q) == 1 {
            index_of[r as usize] = units.len() as u32;
            units.push(r);
        }
    }
    debug_assert_eq!(units.len() as u64, phi);

    let exp_rank = if phi <= table_limit {
        let mut table = vec![0u64; phi as usize];
        // Odometer walk over all exponent vectors: each micro-step
        // multiplies by one generator, wrap-around included (g^order = 1).
        let k = generators.len();
        let mut digits = vec![0u64; k];
        let mut element = 1 % q.max(1);
        for rank in 0..phi {
            table[index_of[element as usize] as usize] = rank;
            let mut i = 0;
            while i < k {
                digits[i] += 1;
                element = mul_mod(element, generators[i].element, q);
                if digits[i] < generators[i].order {
                    break;
                }
                digits[i] = 0;
                i += 1;
            }
        }
        Some(table)
    } else {
        None
    };

    Ok(UnitGroupStructure {
        modulus: q,
        phi,
        generators,
        components,
        units,
        index_of,
        exp_rank,
    })
}

/// Two-term CRT: the unique `x mod mn` with `x = a mod m`, `x = b mod n`.
fn crt_pair(a: u64, m: u64, b: u64, n: u64) -> u64 {
    let inv = mod_inverse(m % n, n).expect("moduli are coprime");
    let diff = (b + n - a % n) % n;
    a + m * mul_mod(diff, inv, n)
}
