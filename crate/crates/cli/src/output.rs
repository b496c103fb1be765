//! Report records and their three encodings (text, JSON, CSV).
//!
//! JSON is canonical: fixed field order (struct order), reals rounded to 12
//! significant digits at construction, one object per line. Parsing a line
//! into [`Record`] and re-serializing reproduces the bytes.

use serde::{Deserialize, Serialize};
use triprime_core::arith::{BoundReport, Relation};
use triprime_core::characters::{CertifiedValue, CheckOutcome};
use triprime_core::verifier::Witness;

/// An f64 pinned to 12 significant digits so serialized output never
/// carries formatting drift.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Real(f64);

impl Real {
    pub fn new(v: f64) -> Real {
        if v == 0.0 || !v.is_finite() {
            return Real(v);
        }
        Real(format!("{v:.11e}").parse().expect("formatted float parses"))
    }

    pub fn get(&self) -> f64 {
        self.0
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WitnessOut {
    pub class: u64,
    pub p1: u64,
    pub p2: u64,
    pub p3: u64,
}

impl From<&Witness> for WitnessOut {
    fn from(w: &Witness) -> Self {
        WitnessOut {
            class: w.class,
            p1: w.primes[0],
            p2: w.primes[1],
            p3: w.primes[2],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckOut {
    pub name: String,
    pub computed: Real,
    pub bound: Real,
    pub relation: Relation,
    pub satisfied: bool,
}

impl From<&BoundReport> for CheckOut {
    fn from(r: &BoundReport) -> Self {
        CheckOut {
            name: r.quantity.clone(),
            computed: Real::new(r.computed),
            bound: Real::new(r.bound),
            relation: r.relation,
            satisfied: r.satisfied,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LValueOut {
    pub character: String,
    /// Absent when the term cap prevented computing an interval.
    pub lo: Option<Real>,
    pub hi: Option<Real>,
    pub bound: Real,
    pub outcome: CheckOutcome,
}

impl LValueOut {
    pub fn new(
        character: String,
        iv: Option<CertifiedValue>,
        bound: f64,
        outcome: CheckOutcome,
    ) -> Self {
        LValueOut {
            character,
            lo: iv.map(|i| Real::new(i.lo)),
            hi: iv.map(|i| Real::new(i.hi)),
            bound: Real::new(bound),
            outcome,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KernelOut {
    pub character: String,
    pub prime: u64,
    pub bound: u128,
    pub within_bound: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteOut {
    pub suite: String,
    pub cases: u64,
    pub failures: u64,
    pub status: String,
}

/// One report record. `verify` fills `p`; `scan` fills `p_min`; `table`
/// uses both; `lbound`/`kernel-prime`/`lemmas` fill their sections.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Record {
    pub q: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p_min: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p_min_strict: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theorem_bound: Option<u128>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub margin_ratio: Option<Real>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub covered: Option<bool>,
    pub missing: Vec<u64>,
    pub witnesses: Vec<WitnessOut>,
    pub bound_checks: Vec<CheckOut>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub l_values: Option<Vec<LValueOut>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kernel_primes: Option<Vec<KernelOut>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub suites: Option<Vec<SuiteOut>>,
}

impl Record {
    pub fn new(q: u64) -> Record {
        Record {
            q,
            p: None,
            p_min: None,
            p_min_strict: None,
            theorem_bound: None,
            margin_ratio: None,
            covered: None,
            missing: Vec::new(),
            witnesses: Vec::new(),
            bound_checks: Vec::new(),
            l_values: None,
            kernel_primes: None,
            suites: None,
        }
    }

    /// True when something in the record definitely failed (inconclusive
    /// outcomes are not failures; they map to their own exit code).
    pub fn any_failed(&self) -> bool {
        self.covered == Some(false)
            || self.bound_checks.iter().any(|c| !c.satisfied)
            || self
                .l_values
                .as_ref()
                .is_some_and(|v| v.iter().any(|l| l.outcome == CheckOutcome::Violated))
            || self
                .kernel_primes
                .as_ref()
                .is_some_and(|v| v.iter().any(|k| !k.within_bound))
            || self
                .suites
                .as_ref()
                .is_some_and(|v| v.iter().any(|s| s.failures > 0))
    }

    pub fn any_inconclusive(&self) -> bool {
        self.l_values
            .as_ref()
            .is_some_and(|v| v.iter().any(|l| l.outcome == CheckOutcome::Inconclusive))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Text,
    Json,
    Csv,
}

pub fn emit(
    records: &[Record],
    format: Format,
    out: &mut impl std::io::Write,
) -> std::io::Result<()> {
    match format {
        Format::Json => {
            for r in records {
                writeln!(out, "{}", serde_json::to_string(r).expect("serializable"))?;
            }
        }
        Format::Csv => {
            writeln!(
                out,
                "q,p,p_min,p_min_strict,theorem_bound,covered,missing,witnesses,checks,l_values,kernel_primes,suites"
            )?;
            for r in records {
                writeln!(out, "{}", csv_row(r))?;
            }
        }
        Format::Text => {
            for r in records {
                text_block(r, out)?;
            }
        }
    }
    Ok(())
}

fn opt<T: std::fmt::Display>(v: &Option<T>) -> String {
    v.as_ref().map(|x| x.to_string()).unwrap_or_default()
}

fn csv_row(r: &Record) -> String {
    let missing = r
        .missing
        .iter()
        .map(|m| m.to_string())
        .collect::<Vec<_>>()
        .join(";");
    let witnesses = r
        .witnesses
        .iter()
        .map(|w| format!("{}:{}*{}*{}", w.class, w.p1, w.p2, w.p3))
        .collect::<Vec<_>>()
        .join(";");
    let checks = r
        .bound_checks
        .iter()
        .map(|c| {
            format!(
                "{}={}",
                c.name.replace(',', " "),
                if c.satisfied { "ok" } else { "FAIL" }
            )
        })
        .collect::<Vec<_>>()
        .join(";");
    let l_values = r
        .l_values
        .as_ref()
        .map(|v| {
            v.iter()
                .map(|l| {
                    format!(
                        "{}:[{};{}]:{}",
                        l.character,
                        opt(&l.lo.map(|x| x.get())),
                        opt(&l.hi.map(|x| x.get())),
                        l.outcome
                    )
                })
                .collect::<Vec<_>>()
                .join(";")
        })
        .unwrap_or_default();
    let kernels = r
        .kernel_primes
        .as_ref()
        .map(|v| {
            v.iter()
                .map(|k| {
                    format!(
                        "{}:{}:{}",
                        k.character,
                        k.prime,
                        if k.within_bound { "ok" } else { "FAIL" }
                    )
                })
                .collect::<Vec<_>>()
                .join(";")
        })
        .unwrap_or_default();
    let suites = r
        .suites
        .as_ref()
        .map(|v| {
            v.iter()
                .map(|s| format!("{}:{}/{}:{}", s.suite, s.failures, s.cases, s.status))
                .collect::<Vec<_>>()
                .join(";")
        })
        .unwrap_or_default();
    format!(
        "{},{},{},{},{},{},{},{},{},{},{},{}",
        r.q,
        opt(&r.p),
        opt(&r.p_min),
        opt(&r.p_min_strict),
        opt(&r.theorem_bound),
        opt(&r.covered),
        missing,
        witnesses,
        checks,
        l_values,
        kernels,
        suites
    )
}

fn text_block(r: &Record, out: &mut impl std::io::Write) -> std::io::Result<()> {
    let mut head = format!("q={}", r.q);
    if let Some(p) = r.p {
        head += &format!("  P={p}");
    }
    if let Some(p) = r.p_min {
        head += &format!("  p_min={p}");
    }
    if let Some(p) = r.p_min_strict {
        head += &format!("  p_min_strict={p}");
    }
    if let Some(b) = r.theorem_bound {
        head += &format!("  bound=floor(q^(16/3))={b}");
    }
    if let Some(m) = r.margin_ratio {
        head += &format!("  margin={:.3e}", m.get());
    }
    if let Some(c) = r.covered {
        head += &format!("  covered={c}");
    }
    writeln!(out, "{head}")?;
    if !r.missing.is_empty() {
        writeln!(out, "  missing classes: {:?}", r.missing)?;
    }
    for w in &r.witnesses {
        writeln!(
            out,
            "  class {:>6}: {} * {} * {}",
            w.class, w.p1, w.p2, w.p3
        )?;
    }
    for c in &r.bound_checks {
        writeln!(
            out,
            "  [{}] {}  ({} {} {})",
            if c.satisfied { "ok" } else { "FAIL" },
            c.name,
            c.computed.get(),
            c.relation,
            c.bound.get()
        )?;
    }
    for l in r.l_values.iter().flatten() {
        match (l.lo, l.hi) {
            (Some(lo), Some(hi)) => writeln!(
                out,
                "  [{}] L(1,{}) in [{:.9}, {:.9}], lower bound {:.9}",
                l.outcome,
                l.character,
                lo.get(),
                hi.get(),
                l.bound.get()
            )?,
            _ => writeln!(
                out,
                "  [{}] L(1,{}): no interval under the term cap, lower bound {:.9}",
                l.outcome,
                l.character,
                l.bound.get()
            )?,
        }
    }
    for k in r.kernel_primes.iter().flatten() {
        writeln!(
            out,
            "  [{}] least kernel prime of {}: {} (bound {})",
            if k.within_bound { "ok" } else { "FAIL" },
            k.character,
            k.prime,
            k.bound
        )?;
    }
    for s in r.suites.iter().flatten() {
        writeln!(
            out,
            "  [{}] suite {}: {} cases, {} failures",
            s.status, s.suite, s.cases, s.failures
        )?;
    }
    Ok(())
}
