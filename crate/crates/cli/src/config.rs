use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use iwasawa_core::bernoulli::is_odd_prime;

use crate::error::CliError;

pub const CACHE_ENV: &str = "IWASAWA_CACHE_DIR";

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Clone, Debug, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Spectrum reports for every prime in a range.
    Scan {
        #[arg(long)]
        pmin: u64,
        #[arg(long)]
        pmax: u64,
        #[arg(long, default_value_t = 1)]
        nmax: u32,
        /// Floor for the Smith normal form precision.
        #[arg(long)]
        precision: Option<u32>,
    },
    /// Full spectrum report for one prime.
    Analyze {
        #[arg(short, long = "prime")]
        p: u64,
        #[arg(long, default_value_t = 1)]
        nmax: u32,
        #[arg(long)]
        precision: Option<u32>,
    },
    /// Certified zero of the difference operator applied to L_p.
    Zero {
        #[arg(short, long = "prime")]
        p: u64,
        #[arg(short, long = "index")]
        i: u64,
        #[arg(long, default_value_t = 4)]
        precision: u32,
    },
    /// Bernoulli congruence certificate.
    Congruence {
        #[arg(short, long = "prime")]
        p: u64,
        #[arg(short, long = "index")]
        i: u64,
        #[arg(short)]
        n: u32,
        #[arg(long)]
        precision: Option<u32>,
    },
    /// Quick invariant suites.
    Selftest,
}

#[derive(Clone, Debug, PartialEq, Eq, Parser)]
#[command(name = "iwasawa", version, about = "Iwasawa invariants and Bernoulli congruences of irregular primes")]
pub struct RunConfig {
    #[command(subcommand)]
    pub command: Command,

    /// Directory of the persistent approximant cache.
    #[arg(long, global = true, env = CACHE_ENV)]
    pub cache: Option<PathBuf>,

    /// Report destination; standard output when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,

    /// Worker threads for `scan`.
    #[arg(long, global = true, default_value_t = 1)]
    pub jobs: usize,

    /// Known irregular pairs ("p k" per line) to cross-check against.
    #[arg(long, global = true)]
    pub pairs: Option<PathBuf>,
}

fn require_prime(p: u64) -> Result<(), CliError> {
    if is_odd_prime(p) {
        Ok(())
    } else {
        Err(CliError::Usage(format!("{p} is not an odd prime")))
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), CliError> {
        if self.jobs == 0 {
            return Err(CliError::Usage("--jobs must be at least 1".into()));
        }
        match self.command {
            Command::Scan { pmin, pmax, .. } => {
                if pmin > pmax {
                    return Err(CliError::Usage(format!("empty range {pmin}..={pmax}")));
                }
            }
            Command::Analyze { p, .. } => require_prime(p)?,
            Command::Zero { p, i, .. } | Command::Congruence { p, i, .. } => {
                require_prime(p)?;
                if i % 2 == 0 || i < 3 || i + 2 > p {
                    return Err(CliError::Usage(format!("index {i} must be odd in [3, p - 2]")));
                }
            }
            Command::Selftest => {}
        }
        Ok(())
    }

    pub fn command_name(&self) -> &'static str {
        match self.command {
            Command::Scan { .. } => "scan",
            Command::Analyze { .. } => "analyze",
            Command::Zero { .. } => "zero",
            Command::Congruence { .. } => "congruence",
            Command::Selftest => "selftest",
        }
    }
}
