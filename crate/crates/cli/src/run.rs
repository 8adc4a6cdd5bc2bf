use std::fs;
use std::sync::Arc;
use std::time::Instant;

use iwasawa_core::bernoulli::{crosscheck_pairs, irregular_scan, is_odd_prime, parse_known_pairs, PairMismatch};
use iwasawa_core::congruence::{verify_congruence, CongruenceCertificate, Verdict};
use iwasawa_core::iwasawa::{find_s0, ApproximantCache, ZeroCertificate};
use iwasawa_core::structure::{spectrum_report, ReportOptions, SpectrumReport};
use iwasawa_core::Padic;
use log::{info, warn};
use rayon::prelude::*;
use serde::Serialize;

use crate::cache::{CacheStats, DiskCache};
use crate::config::{Command, Format, RunConfig};
use crate::error::CliError;
use crate::selftest::{run_selftest, SelftestPayload};

/// Schema version of emitted documents.
pub const DOCUMENT_SCHEMA_VERSION: u32 = 1;

/// Bundled table of known irregular pairs.
pub const KNOWN_PAIRS: &str = include_str!("../data/irregular_pairs.txt");

#[derive(Clone, Debug, Serialize)]
pub struct Document<T: Serialize> {
    pub schema_version: u32,
    pub command: &'static str,
    pub payload: T,
    /// Excluded from determinism comparisons.
    pub metadata: Metadata,
}

#[derive(Clone, Debug, Serialize)]
pub struct Metadata {
    pub tool_version: &'static str,
    pub elapsed_ms: u128,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cache: Option<CacheStats>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SpectrumPayload {
    pub reports: Vec<SpectrumReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pairs_crosscheck: Option<Vec<PairMismatch>>,
}

/// Exit status and rendered report of one command.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub exit_code: u8,
    pub rendered: String,
}

enum Payload {
    Spectrum(SpectrumPayload),
    Zero(Box<ZeroCertificate>),
    Congruence(Box<CongruenceCertificate>),
    Selftest(SelftestPayload),
}

/// Execute a validated configuration. Reports go to `--out` or the returned
/// string; diagnostics go to the log.
pub fn run_command(config: &RunConfig) -> Result<Outcome, CliError> {
    config.validate()?;
    let start = Instant::now();
    let cache = match &config.cache {
        Some(dir) => {
            let c = Arc::new(DiskCache::open(dir)?);
            ApproximantCache::global().set_store(Some(c.clone()));
            Some(c)
        }
        None => None,
    };
    let result = execute(config);
    ApproximantCache::global().set_store(None);
    let (payload, exit_code) = result?;

    let metadata = Metadata {
        tool_version: env!("CARGO_PKG_VERSION"),
        elapsed_ms: start.elapsed().as_millis(),
        cache: cache.map(|c| c.stats()),
    };
    let rendered = match config.format {
        Format::Json => render_json(config.command_name(), payload, metadata)?,
        Format::Csv => render_csv(&payload)?,
    };
    if let Some(path) = &config.out {
        fs::write(path, &rendered).map_err(|e| CliError::io(path, e))?;
    }
    Ok(Outcome { exit_code, rendered })
}

fn execute(config: &RunConfig) -> Result<(Payload, u8), CliError> {
    match config.command {
        Command::Scan { pmin, pmax, nmax, precision } => {
            let primes: Vec<u64> = (pmin..=pmax).filter(|&p| is_odd_prime(p)).collect();
            spectrum(config, &primes, ReportOptions { n_max: nmax, precision, ..ReportOptions::default() })
        }
        Command::Analyze { p, nmax, precision } => {
            spectrum(config, &[p], ReportOptions { n_max: nmax, precision, ..ReportOptions::default() })
        }
        Command::Zero { p, i, precision } => {
            let u = Padic::from_i64(p, precision.max(1), p as i64 - 1)?;
            let z = find_s0(p, i, &u, precision)?;
            Ok((Payload::Zero(Box::new(z)), 0))
        }
        Command::Congruence { p, i, n, precision } => {
            let c = verify_congruence(p, i, n, precision)?;
            let code = if c.verdict == Verdict::Pass { 0 } else { 1 };
            if code == 1 {
                warn!("congruence valuation {} is below the required {}", c.valuation, c.required);
            }
            Ok((Payload::Congruence(Box::new(c)), code))
        }
        Command::Selftest => {
            let s = run_selftest();
            let code = if s.checks.iter().all(|c| c.passed) { 0 } else { 1 };
            Ok((Payload::Selftest(s), code))
        }
    }
}

fn spectrum(config: &RunConfig, primes: &[u64], options: ReportOptions) -> Result<(Payload, u8), CliError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.jobs)
        .build()
        .map_err(|e| CliError::Usage(format!("cannot start {} workers: {e}", config.jobs)))?;
    let reports: Vec<SpectrumReport> = pool.install(|| {
        primes
            .par_iter()
            .map(|&p| {
                info!("analysing p = {p}");
                spectrum_report(p, &options)
            })
            .collect::<Result<Vec<_>, _>>()
    })?;
    for r in &reports {
        for e in &r.errors {
            warn!("p = {}: {} unavailable: {}", r.prime, e.field, e.message);
        }
    }

    let pairs_crosscheck = match &config.pairs {
        None => None,
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
            let table = parse_known_pairs(&text)?;
            let covered = table.iter().map(|&(p, _)| p).max().unwrap_or(0);
            let mut mismatches = Vec::new();
            for &p in primes.iter().filter(|&&p| p <= covered) {
                mismatches.extend(crosscheck_pairs(p, &irregular_scan(p)?, &table));
            }
            Some(mismatches)
        }
    };
    let checks_pass = reports.iter().all(|r| r.flags.checks.values().all(|&ok| ok));
    let pairs_pass = pairs_crosscheck.as_ref().map_or(true, Vec::is_empty);
    let code = if checks_pass && pairs_pass { 0 } else { 1 };
    Ok((Payload::Spectrum(SpectrumPayload { reports, pairs_crosscheck }), code))
}

fn render_json(command: &'static str, payload: Payload, metadata: Metadata) -> Result<String, CliError> {
    fn doc<T: Serialize>(command: &'static str, payload: T, metadata: Metadata) -> Result<String, CliError> {
        let d = Document { schema_version: DOCUMENT_SCHEMA_VERSION, command, payload, metadata };
        Ok(serde_json::to_string_pretty(&d)? + "\n")
    }
    match payload {
        Payload::Spectrum(p) => doc(command, p, metadata),
        Payload::Zero(z) => doc(command, z, metadata),
        Payload::Congruence(c) => doc(command, c, metadata),
        Payload::Selftest(s) => doc(command, s, metadata),
    }
}

fn render_csv(payload: &Payload) -> Result<String, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    match payload {
        Payload::Spectrum(s) => {
            w.write_record(["prime", "r0", "lambda", "nu", "km_verdict", "irregular", "checks_pass"])?;
            for r in &s.reports {
                let pairs: Vec<String> = r
                    .irregular
                    .iter()
                    .map(|e| format!("{}:{}:{}:{}", e.k, e.i, opt(e.s), opt(e.lambda)))
                    .collect();
                w.write_record([
                    r.prime.to_string(),
                    r.r0.to_string(),
                    opt(r.lambda_total),
                    opt(r.nu),
                    opt(r.km_verdict),
                    pairs.join(";"),
                    r.all_checks_pass().to_string(),
                ])?;
            }
        }
        Payload::Zero(z) => {
            w.write_record(["n", "t_n"])?;
            for (n, t) in &z.t {
                w.write_record([n.to_string(), t.to_string()])?;
            }
        }
        Payload::Congruence(c) => {
            w.write_record(["k", "exponent", "residue", "path"])?;
            for t in &c.terms {
                let path = serde_json::to_value(t.path)?;
                w.write_record([t.k.to_string(), t.exponent.to_string(), t.residue.to_string(), path.as_str().unwrap_or("").to_owned()])?;
            }
        }
        Payload::Selftest(s) => {
            w.write_record(["check", "passed"])?;
            for c in &s.checks {
                w.write_record([c.name.to_owned(), c.passed.to_string()])?;
            }
        }
    }
    let bytes = w.into_inner().map_err(|e| CliError::Serialize(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| CliError::Serialize(e.to_string()))
}

fn opt<T: ToString>(x: Option<T>) -> String {
    x.map_or_else(String::new, |v| v.to_string())
}
