//! Library side of the `triprime` binary: run configuration, subcommand
//! implementations and report encodings. Kept as a lib so integration
//! tests can parse records with the exact schema the binary emits.

pub mod commands;
pub mod config;
pub mod output;
