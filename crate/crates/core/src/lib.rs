//! Desk-scale verification toolkit for an explicit theorem on products of
//! three primes in arithmetic progressions: whenever `q <= x^(1/16)`, every
//! invertible residue class `a` modulo `q` contains a product of exactly
//! three primes, each at most `x^(1/3)`.
//!
//! The crate is organised around the ingredients of the proof:
//!
//! * [`arith`] — exact integer arithmetic: factorization, Euler phi, the
//!   Jacobi symbol, unit-group structure via CRT, and the sieve weight
//!   `f0(q)`.
//! * [`sieve`] — segmented prime generation, prime-counting estimates
//!   (the Brun-Titchmarsh inequality, the `pi(x) >= x/(log x - 1)` bound)
//!   and per-class prime spectra.
//! * [`characters`] — real quadratic Dirichlet characters, interval
//!   character sums, certified values of `L(1,chi)`, the Gel'fond-style
//!   lower bound and least kernel primes.
//! * [`sumsets`] — bit-vector product sets on the unit group, stabilizers,
//!   Kneser's inequality and the stabilizer-index case analysis.
//! * [`verifier`] — end-to-end coverage of all classes by triple-prime
//!   products, explicit witnesses, minimal thresholds and the small-modulus
//!   hand table.
//!
//! All checks distinguish three outcomes: a bound verified, a bound
//! violated (which for the theorem-backed checks indicates a bug), and
//! "inconclusive" when a configured resource cap prevented a decision.

pub mod arith;
pub mod characters;
pub mod sieve;
pub mod sumsets;
pub mod util;
pub mod verifier;

pub use arith::{BoundReport, Factorization, Relation, UnitGroupStructure};
pub use characters::{CertifiedValue, KernelPrimeResult, QuadraticCharacter};
pub use sieve::{ClassSpectrum, PrimeStream, SieveConfig};
pub use sumsets::{ClassSet, Group, Subgroup};
pub use verifier::{CoverageResult, ScanRecord, Witness};
