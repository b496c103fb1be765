//! Run configuration: defaults, optional JSON config file, CLI overrides.

use serde::Deserialize;

use crate::output::Format;

/// Fully resolved configuration for one run.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub format: Format,
    pub seed: u64,
    pub threads: usize,
    pub tolerance: f64,
    pub max_terms: u64,
    pub sieve_mem_bytes: Option<u64>,
    pub witness: bool,
    pub strict_below: bool,
    pub distinct_primes: bool,
    pub samples: u64,
    pub limit: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            format: Format::Text,
            seed: 0,
            threads: 0, // 0 = rayon default
            tolerance: 1e-6,
            max_terms: triprime_core::characters::DEFAULT_TERM_CAP,
            sieve_mem_bytes: None,
            witness: false,
            strict_below: false,
            distinct_primes: false,
            samples: 10_000,
            limit: 1_000_000,
        }
    }
}

/// Config-file payload; every field optional, mirroring the flags.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub format: Option<String>,
    pub seed: Option<u64>,
    pub threads: Option<usize>,
    pub tolerance: Option<f64>,
    pub max_terms: Option<u64>,
    pub sieve_mem_bytes: Option<u64>,
    pub witness: Option<bool>,
    pub strict_below: Option<bool>,
    pub distinct_primes: Option<bool>,
    pub samples: Option<u64>,
    pub limit: Option<u64>,
}

pub fn parse_format(s: &str) -> Result<Format, String> {
    match s {
        "text" => Ok(Format::Text),
        "json" => Ok(Format::Json),
        "csv" => Ok(Format::Csv),
        other => Err(format!("unknown format {other:?} (use text|json|csv)")),
    }
}

impl RunConfig {
    /// Layering: defaults, then the config file, then explicit flags
    /// (applied by the caller after this).
    pub fn apply_file(&mut self, file: FileConfig) -> Result<(), String> {
        if let Some(f) = file.format {
            self.format = parse_format(&f)?;
        }
        if let Some(v) = file.seed {
            self.seed = v;
        }
        if let Some(v) = file.threads {
            self.threads = v;
        }
        if let Some(v) = file.tolerance {
            self.tolerance = v;
        }
        if let Some(v) = file.max_terms {
            self.max_terms = v;
        }
        if let Some(v) = file.sieve_mem_bytes {
            self.sieve_mem_bytes = Some(v);
        }
        if let Some(v) = file.witness {
            self.witness = v;
        }
        if let Some(v) = file.strict_below {
            self.strict_below = v;
        }
        if let Some(v) = file.distinct_primes {
            self.distinct_primes = v;
        }
        if let Some(v) = file.samples {
            self.samples = v;
        }
        if let Some(v) = file.limit {
            self.limit = v;
        }
        Ok(())
    }
}
