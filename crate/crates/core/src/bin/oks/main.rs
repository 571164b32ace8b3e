//! `oks`: command-line front end for the sparsifier, bounds and experiments.
//!
//! Exit codes: 0 success, 1 usage or input error, 2 a checked inequality
//! or tolerance failed.

mod commands;
mod config;

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, CommandFactory, FromArgMatches, Parser, Subcommand};
use serde::Serialize;

use oks_core::harness::{content_hash, RunManifest};
use oks_core::io::save_dictionary;
use oks_core::{Dictionary, Result};

#[derive(Parser, Debug)]
#[command(name = "oks", version, about = "Online kernel sparsification toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Table of log ν_k for a spectrum.
    Esp(commands::EspArgs),
    /// Dictionary-size tail bound and sample threshold.
    Bound(commands::BoundArgs),
    /// Stream points through the sparsifier and save the dictionary.
    OksRun(commands::OksRunArgs),
    /// Monte Carlo estimate of E[det G_k].
    McGram(commands::McGramArgs),
    /// Monte Carlo estimate of E[(det G_k)^m] against its bound.
    McMoment(commands::McMomentArgs),
    /// Monte Carlo estimate of P[k*_n >= k] against its bound.
    KstarTail(commands::KstarTailArgs),
    /// Dictionary growth over a long stream.
    Growth(commands::GrowthArgs),
    /// Sparsifier dictionary versus a random subset of equal size.
    Nystrom(commands::NystromArgs),
    /// Least squares on dictionary features.
    Regress(commands::RegressArgs),
    /// Empirical spectrum of a sampled Gram matrix.
    SpectrumEst(commands::SpectrumEstArgs),
}

/// Flags shared by every subcommand.
#[derive(Args, Debug, Clone, Default)]
pub struct Common {
    /// Flat `key = value` file; its entries override flags.
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Print the effective configuration in config-file form and exit.
    #[arg(long)]
    dump_config: bool,
    /// CSV destination; also writes `<out>.manifest.json`. Stdout otherwise.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

/// What a subcommand produced.
#[derive(Default)]
pub struct Report {
    pub csv: String,
    pub seed: Option<u64>,
    /// Files whose contents feed the input hash.
    pub inputs: Vec<PathBuf>,
    /// False when a checked inequality or tolerance failed.
    pub passed: bool,
    pub results: BTreeMap<String, String>,
    pub dictionary: Option<Dictionary>,
}

impl Report {
    pub fn new(csv: String) -> Self {
        Report { csv, passed: true, ..Default::default() }
    }
}

fn execute<A: Serialize>(name: &str, args: &A, common: &Common, run: impl FnOnce() -> Result<Report>) -> Result<bool> {
    let params = config::entries(args);
    let text = config::render(&params);
    if common.dump_config {
        print!("{text}");
        return Ok(true);
    }
    let start = Instant::now();
    let report = run()?;
    for (k, v) in &report.results {
        eprintln!("{k}: {v}");
    }
    let Some(out) = &common.out else {
        print!("{}", report.csv);
        return Ok(report.passed);
    };

    std::fs::write(out, &report.csv)?;
    let mut outputs = vec![out.display().to_string()];
    if let Some(dict) = &report.dictionary {
        let (c, j) = (out.with_extension("dict.csv"), out.with_extension("dict.json"));
        save_dictionary(dict, &c, &j)?;
        outputs.push(c.display().to_string());
        outputs.push(j.display().to_string());
    }
    let mut hashed = text.into_bytes();
    for path in &report.inputs {
        hashed.extend(std::fs::read(path)?);
    }
    let manifest = RunManifest {
        command: name.to_string(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        parameters: params,
        seed: report.seed,
        input_hash: content_hash(&hashed),
        outputs,
        results: report.results,
        wall_time_seconds: start.elapsed().as_secs_f64(),
    };
    manifest.write(&out.with_extension("manifest.json"))?;
    Ok(report.passed)
}

fn dispatch(cli: Cli) -> Result<bool> {
    use Command::*;
    match cli.command {
        Esp(a) => execute("esp", &a, &a.common, || a.run()),
        Bound(a) => execute("bound", &a, &a.common, || a.run()),
        OksRun(a) => execute("oks-run", &a, &a.common, || a.run()),
        McGram(a) => execute("mc-gram", &a, &a.common, || a.run()),
        McMoment(a) => execute("mc-moment", &a, &a.common, || a.run()),
        KstarTail(a) => execute("kstar-tail", &a, &a.common, || a.run()),
        Growth(a) => execute("growth", &a, &a.common, || a.run()),
        Nystrom(a) => execute("nystrom", &a, &a.common, || a.run()),
        Regress(a) => execute("regress", &a, &a.common, || a.run()),
        SpectrumEst(a) => execute("spectrum-est", &a, &a.common, || a.run()),
    }
}

fn main() -> ExitCode {
    let argv = match config::expand(std::env::args().collect()) {
        Ok(a) => a,
        Err(msg) => {
            eprintln!("error: {msg}");
            return ExitCode::from(1);
        }
    };
    let cmd = Cli::command().mut_subcommands(|s| s.args_override_self(true));
    let cli = match cmd.try_get_matches_from(argv).and_then(|m| Cli::from_arg_matches(&m)) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match dispatch(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("check failed");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
