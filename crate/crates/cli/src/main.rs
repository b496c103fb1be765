//! `triprime` — verification runs for products of three primes in
//! arithmetic progressions.
//!
//! Exit codes: 0 all assertions passed, 1 at least one failed,
//! 2 inconclusive under the configured caps, 64 usage error.

use clap::error::ErrorKind;
use clap::{ArgAction, Parser, Subcommand};

use triprime_cli::commands::{self, CmdResult};
use triprime_cli::config::{parse_format, FileConfig, RunConfig};
use triprime_cli::output;

const EX_USAGE: i32 = 64;
const EX_SOFTWARE: i32 = 70;

#[derive(Parser, Debug)]
#[command(
    name = "triprime",
    about = "Verifies coverage of residue classes by products of three primes, \
             with the supporting sieve, character and sumset checks",
    version
)]
struct Cli {
    /// Output format: text, json (one object per line) or csv.
    #[arg(long, global = true, value_parser = parse_format_arg)]
    format: Option<output::Format>,

    /// Seed for the randomized property suites.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Worker threads for parallel scans (0 = automatic).
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Width of certified L(1,chi) intervals.
    #[arg(long, global = true)]
    tolerance: Option<f64>,

    /// Cap on series terms for certified values.
    #[arg(long, global = true)]
    max_terms: Option<u64>,

    /// Sieve memory cap in bytes (also: TRIPRIME_SIEVE_MEM_BYTES).
    #[arg(long, global = true)]
    sieve_mem: Option<u64>,

    /// Optional JSON config file mirroring these flags.
    #[arg(long, global = true)]
    config: Option<std::path::PathBuf>,

    /// Emit witnesses (verify, scan).
    #[arg(long, global = true, action = ArgAction::SetTrue)]
    witness: bool,

    /// Read "below x^(1/3)" strictly: admit primes p < P instead of p <= P.
    #[arg(long, global = true, action = ArgAction::SetTrue)]
    strict_below: bool,

    /// Require three pairwise distinct primes.
    #[arg(long, global = true, action = ArgAction::SetTrue)]
    distinct_primes: bool,

    /// Sample count for randomized suites (lemmas).
    #[arg(long, global = true)]
    samples: Option<u64>,

    /// Sweep limit for exhaustive suites (lemmas).
    #[arg(long, global = true)]
    limit: Option<u64>,

    #[command(subcommand)]
    command: Command,
}

fn parse_format_arg(s: &str) -> Result<output::Format, String> {
    parse_format(s)
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check that every invertible class mod q is a product of three
    /// primes up to P.
    Verify { q: u64, p: u64 },
    /// Minimal prime thresholds for a range of moduli.
    Scan { q_lo: u64, q_hi: u64 },
    /// The nine small-modulus sufficiency rows and the vacuity check.
    Table,
    /// Certified L(1,chi) lower-bound reports for all real characters
    /// mod q.
    Lbound { q: u64 },
    /// Least prime in the kernel of each real character mod q.
    KernelPrime { q: u64 },
    /// Seeded property suites: f0 bound, interval character sums,
    /// Brun-Titchmarsh, prime-count bounds, Kneser.
    Lemmas,
}

fn build_config(cli: &Cli) -> Result<RunConfig, String> {
    let mut cfg = RunConfig::default();
    if let Some(path) = &cli.config {
        let text = std::fs::read_to_string(path)
            .map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
        let file: FileConfig =
            serde_json::from_str(&text).map_err(|e| format!("bad config file: {e}"))?;
        cfg.apply_file(file)?;
    }
    if let Some(f) = cli.format {
        cfg.format = f;
    }
    if let Some(v) = cli.seed {
        cfg.seed = v;
    }
    if let Some(v) = cli.threads {
        cfg.threads = v;
    }
    if let Some(v) = cli.tolerance {
        if !(v > 0.0 && v.is_finite()) {
            return Err(format!("tolerance must be positive, got {v}"));
        }
        cfg.tolerance = v;
    }
    if let Some(v) = cli.max_terms {
        cfg.max_terms = v;
    }
    if let Some(v) = cli.sieve_mem {
        cfg.sieve_mem_bytes = Some(v);
    }
    if cli.witness {
        cfg.witness = true;
    }
    if cli.strict_below {
        cfg.strict_below = true;
    }
    if cli.distinct_primes {
        cfg.distinct_primes = true;
    }
    if let Some(v) = cli.samples {
        cfg.samples = v;
    }
    if let Some(v) = cli.limit {
        cfg.limit = v;
    }
    Ok(cfg)
}

/// Semantic argument validation; failures are usage errors (exit 64).
fn validate_args(cli: &Cli) -> Result<(), String> {
    match cli.command {
        Command::Verify { q, p } => {
            if q == 0 {
                return Err("verify: q must be at least 1".into());
            }
            if p < 2 {
                return Err("verify: P must be at least 2".into());
            }
        }
        Command::Scan { q_lo, q_hi } => {
            if q_lo < 2 || q_lo > q_hi {
                return Err(format!("scan: need 2 <= q_lo <= q_hi, got {q_lo} {q_hi}"));
            }
        }
        Command::Lbound { q } | Command::KernelPrime { q } => {
            if q == 0 {
                return Err("q must be at least 1".into());
            }
        }
        Command::Table | Command::Lemmas => {}
    }
    Ok(())
}

fn run(cli: &Cli, cfg: &RunConfig) -> CmdResult {
    match cli.command {
        Command::Verify { q, p } => commands::cmd_verify(q, p, cfg),
        Command::Scan { q_lo, q_hi } => commands::cmd_scan(q_lo, q_hi, cfg),
        Command::Table => commands::cmd_table(),
        Command::Lbound { q } => commands::cmd_lbound(q, cfg),
        Command::KernelPrime { q } => commands::cmd_kernel_prime(q),
        Command::Lemmas => commands::cmd_lemmas(cfg),
    }
}

/// Resource-capped runs are inconclusive (exit 2), anything else is an
/// internal error (exit 70).
fn classify_error(e: &(dyn std::error::Error + 'static)) -> i32 {
    use triprime_core::characters::CharError;
    use triprime_core::sieve::SieveError;
    use triprime_core::verifier::VerifyError;
    if let Some(s) = e.downcast_ref::<SieveError>() {
        return match s {
            SieveError::MemoryCap { .. } | SieveError::LimitExceeded { .. } => 2,
            _ => EX_SOFTWARE,
        };
    }
    if let Some(c) = e.downcast_ref::<CharError>() {
        return match c {
            CharError::TermCap { .. } | CharError::Sieve(SieveError::MemoryCap { .. }) => 2,
            _ => EX_SOFTWARE,
        };
    }
    if let Some(v) = e.downcast_ref::<VerifyError>() {
        return match v {
            VerifyError::ResourceCap { .. }
            | VerifyError::Sieve(SieveError::MemoryCap { .. })
            | VerifyError::Sieve(SieveError::LimitExceeded { .. }) => 2,
            _ => EX_SOFTWARE,
        };
    }
    EX_SOFTWARE
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            print!("{e}");
            std::process::exit(0);
        }
        Err(e) => {
            eprint!("{e}");
            std::process::exit(EX_USAGE);
        }
    };
    if let Err(msg) = validate_args(&cli) {
        eprintln!("triprime: {msg}");
        std::process::exit(EX_USAGE);
    }
    let cfg = match build_config(&cli) {
        Ok(cfg) => cfg,
        Err(msg) => {
            eprintln!("triprime: {msg}");
            std::process::exit(EX_USAGE);
        }
    };
    if let Some(bytes) = cfg.sieve_mem_bytes {
        std::env::set_var(triprime_core::sieve::MEMORY_CAP_ENV, bytes.to_string());
    }
    if cfg.threads > 0 {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(cfg.threads)
            .build_global()
        {
            eprintln!("triprime: thread pool: {e}");
            std::process::exit(EX_SOFTWARE);
        }
    }
    match run(&cli, &cfg) {
        Ok((records, status)) => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            if let Err(e) = output::emit(&records, cfg.format, &mut lock) {
                if e.kind() == std::io::ErrorKind::BrokenPipe {
                    std::process::exit(status.exit_code());
                }
                eprintln!("triprime: write: {e}");
                std::process::exit(EX_SOFTWARE);
            }
            std::process::exit(status.exit_code());
        }
        Err(e) => {
            eprintln!("triprime: {e}");
            std::process::exit(classify_error(e.as_ref()));
        }
    }
}
