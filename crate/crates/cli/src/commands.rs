//! One function per subcommand, each producing report records plus an
//! aggregate status.

use triprime_core::arith::{check_f0_bound, BoundReport, Relation};
use triprime_core::characters::{check_gelfond_capped, least_kernel_prime, real_characters};
use triprime_core::sieve;
use triprime_core::sumsets::{kneser_check, ClassSet, Group};
use triprime_core::util::{gcd_u64, DetRng};
use triprime_core::verifier::{coverage_with, scan_range, small_case_table, CoverageOptions};

use crate::config::RunConfig;
use crate::output::{CheckOut, KernelOut, LValueOut, Real, Record, SuiteOut, WitnessOut};

/// Aggregate run status, mapped to the process exit code.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum RunStatus {
    Pass,
    Inconclusive,
    Fail,
}

impl RunStatus {
    pub fn merge(self, other: RunStatus) -> RunStatus {
        self.max(other)
    }

    pub fn exit_code(self) -> i32 {
        match self {
            RunStatus::Pass => 0,
            RunStatus::Fail => 1,
            RunStatus::Inconclusive => 2,
        }
    }
}

fn status_of(records: &[Record]) -> RunStatus {
    let mut s = RunStatus::Pass;
    for r in records {
        if r.any_failed() {
            s = s.merge(RunStatus::Fail);
        } else if r.any_inconclusive() {
            s = s.merge(RunStatus::Inconclusive);
        }
    }
    s
}

pub type CmdResult = Result<(Vec<Record>, RunStatus), Box<dyn std::error::Error>>;

/// `verify q P`: coverage, optional witnesses.
pub fn cmd_verify(q: u64, p: u64, cfg: &RunConfig) -> CmdResult {
    let cov = coverage_with(
        q,
        p,
        CoverageOptions {
            witnesses: cfg.witness,
            strict_below: cfg.strict_below,
            distinct_primes: cfg.distinct_primes,
        },
    )?;
    let mut rec = Record::new(q);
    rec.p = Some(p);
    rec.covered = Some(cov.covered);
    rec.missing = cov.missing_residues();
    if let Some(map) = &cov.witnesses {
        rec.witnesses = map.values().map(WitnessOut::from).collect();
    }
    let status = status_of(std::slice::from_ref(&rec));
    Ok((vec![rec], status))
}

/// `scan q_lo q_hi`: one ScanRecord per modulus, parallel, ordered.
pub fn cmd_scan(q_lo: u64, q_hi: u64, cfg: &RunConfig) -> CmdResult {
    let scans = scan_range(q_lo, q_hi)?;
    let mut records = Vec::with_capacity(scans.len());
    for s in scans {
        let mut rec = Record::new(s.q);
        rec.p_min = Some(s.p_min);
        rec.p_min_strict = Some(s.p_min_strict);
        rec.theorem_bound = Some(s.theorem_bound);
        rec.margin_ratio = Some(Real::new(s.margin_ratio));
        rec.covered = Some(true);
        rec.bound_checks.push(CheckOut::from(&BoundReport::exact(
            format!("p_min({})^3 <= q^16", s.q),
            s.p_min as f64,
            s.theorem_bound as f64,
            Relation::LessEq,
            s.within_bound,
        )));
        if cfg.witness {
            let cov = coverage_with(
                s.q,
                s.p_min,
                CoverageOptions {
                    witnesses: true,
                    ..Default::default()
                },
            )?;
            if let Some(map) = &cov.witnesses {
                rec.witnesses = map.values().map(WitnessOut::from).collect();
            }
        }
        records.push(rec);
    }
    let status = status_of(&records);
    Ok((records, status))
}

/// `table`: the nine sufficiency rows plus the vacuity check (reported on
/// a synthetic q = 0 record).
pub fn cmd_table() -> CmdResult {
    let table = small_case_table()?;
    let mut records = Vec::new();
    for row in &table.rows {
        let mut rec = Record::new(row.q);
        rec.p = Some(row.p);
        rec.p_min = Some(row.p_min);
        rec.covered = Some(row.covered);
        rec.bound_checks = row.reports().iter().map(CheckOut::from).collect();
        records.push(rec);
    }
    let mut vac = Record::new(0);
    vac.bound_checks.push(CheckOut::from(&table.vacuity));
    records.push(vac);
    let status = status_of(&records);
    Ok((records, status))
}

/// `lbound q`: certified L(1,chi) and the lower-bound verdict for every
/// non-principal real character mod q.
pub fn cmd_lbound(q: u64, cfg: &RunConfig) -> CmdResult {
    let mut rec = Record::new(q);
    let mut values = Vec::new();
    for chi in real_characters(q)? {
        if chi.is_principal() {
            continue;
        }
        let report = check_gelfond_capped(&chi, cfg.tolerance, cfg.max_terms)?;
        values.push(LValueOut::new(
            report.char_id,
            report.interval,
            report.bound,
            report.outcome,
        ));
    }
    rec.l_values = Some(values);
    let status = status_of(std::slice::from_ref(&rec));
    Ok((vec![rec], status))
}

/// `kernel-prime q`: least kernel prime per non-principal real character.
pub fn cmd_kernel_prime(q: u64) -> CmdResult {
    let mut rec = Record::new(q);
    let mut out = Vec::new();
    for chi in real_characters(q)? {
        if chi.is_principal() {
            continue;
        }
        let r = least_kernel_prime(&chi)?;
        out.push(KernelOut {
            character: r.char_id,
            prime: r.prime,
            bound: r.bound,
            within_bound: r.within_bound,
        });
    }
    rec.kernel_primes = Some(out);
    let status = status_of(std::slice::from_ref(&rec));
    Ok((vec![rec], status))
}

/// `lemmas`: the five seeded property suites.
pub fn cmd_lemmas(cfg: &RunConfig) -> CmdResult {
    let mut suites = Vec::new();

    // f0(q) <= 3.32 sqrt(q) over a sweep.
    {
        let limit = cfg.limit.clamp(2, 5_000_000);
        let mut failures = 0u64;
        for q in 2..=limit {
            if !check_f0_bound(q)?.satisfied {
                failures += 1;
            }
        }
        suites.push(suite("f0-bound", limit - 1, failures));
    }

    // Interval character sums over all subintervals of [1, q], q <= 300.
    {
        let mut cases = 0u64;
        let mut failures = 0u64;
        for q in 3..=300u64 {
            for chi in real_characters(q)? {
                if chi.is_principal() {
                    continue;
                }
                let phi = chi.phi();
                let mut prefix = vec![0i64; q as usize + 1];
                for r in 1..=q as usize {
                    prefix[r] = prefix[r - 1] + chi.values()[r % q as usize] as i64;
                }
                for lo in 1..=q as usize {
                    for hi in lo..=q as usize {
                        cases += 1;
                        if 2 * (prefix[hi] - prefix[lo - 1]).unsigned_abs() > phi {
                            failures += 1;
                        }
                    }
                }
            }
        }
        suites.push(suite("interval-char-sum", cases, failures));
    }

    // Brun-Titchmarsh on seeded random windows.
    {
        let mut rng = DetRng::new(cfg.seed);
        let mut failures = 0u64;
        for _ in 0..cfg.samples {
            let x = rng.range(2, 1_000_000);
            let q = rng.range(1, x - 1);
            let a = loop {
                let a = rng.below(q);
                if gcd_u64(a, q) == 1 {
                    break a;
                }
            };
            let y = rng.range(0, 1_000_000);
            if !sieve::check_brun_titchmarsh(y, x, q, a)?.satisfied {
                failures += 1;
            }
        }
        suites.push(suite("brun-titchmarsh", cfg.samples, failures));
    }

    // pi(x) >= x/(log x - 1) on [5393, limit], with the coprime variant.
    {
        let limit = cfg.limit.max(5393);
        let moduli = [2u64, 6, 30, 210];
        let mut pi = 0u64;
        let mut pi_q = [0u64; 4];
        let mut primes = sieve::primes_up_to(limit)?.peekable();
        let mut cases = 0u64;
        let mut failures = 0u64;
        for x in 2..=limit {
            while primes.peek().is_some_and(|&p| p <= x) {
                let p = primes.next().unwrap();
                pi += 1;
                for (k, &q) in moduli.iter().enumerate() {
                    if q % p != 0 {
                        pi_q[k] += 1;
                    }
                }
            }
            if x >= 5393 {
                cases += 1;
                let xf = x as f64;
                if (pi as f64) < xf / (xf.ln() - 1.0) + 1e-9 {
                    failures += 1;
                }
                for pq in pi_q {
                    if (pq as f64) < xf / xf.ln() + 1e-9 {
                        failures += 1;
                    }
                }
            }
        }
        suites.push(suite("prime-count-bounds", cases, failures));
    }

    // Kneser's inequality on seeded random pairs.
    {
        let mut rng = DetRng::new(cfg.seed ^ 0x6b6e_6573_6572);
        let mut failures = 0u64;
        for round in 0..cfg.samples {
            let n = rng.range(1, 60);
            let group = if round % 2 == 0 {
                Group::units(n)?
            } else {
                Group::cyclic(n)
            };
            let order = group.order();
            let mut a = ClassSet::empty(&group);
            let mut b = ClassSet::empty(&group);
            for _ in 0..=rng.below(order) {
                a.insert_index(rng.below(order) as usize);
            }
            for _ in 0..=rng.below(order) {
                b.insert_index(rng.below(order) as usize);
            }
            if a.is_empty() {
                a.insert_index(rng.below(order) as usize);
            }
            if b.is_empty() {
                b.insert_index(rng.below(order) as usize);
            }
            if !kneser_check(&a, &b)?.satisfied {
                failures += 1;
            }
        }
        suites.push(suite("kneser", cfg.samples, failures));
    }

    let mut rec = Record::new(0);
    rec.suites = Some(suites);
    let status = status_of(std::slice::from_ref(&rec));
    Ok((vec![rec], status))
}

fn suite(name: &str, cases: u64, failures: u64) -> SuiteOut {
    SuiteOut {
        suite: name.into(),
        cases,
        failures,
        status: if failures == 0 { "pass" } else { "FAIL" }.into(),
    }
}
