//! `mle-threshold-lab`: config-driven runs of the curve, table and
//! threshold computations.

mod commands;
mod config;

use clap::{Parser, ValueEnum};
use commands::{Artifact, ErrorRecord};
use config::ExperimentConfig;
use mle_threshold::{Error, Result};
use serde::Serialize;
use sha2::{Digest, Sha256};
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Subcommand {
    /// Bandwidths, mean frequency and partition of the pulse (JSON).
    SignalInfo,
    /// CRLB, simulated RMSE and peak hit counts per carrier and SNR (CSV).
    Table1,
    /// Simulated and modelled probabilities of intervals 0 and 1 (CSV).
    ProbCurves,
    /// Per-interval standard deviation of the estimate (CSV).
    IntervalStd,
    /// MSE-versus-SNR curves in long format (CSV).
    Curves,
    /// Thresholds extracted from every curve (JSON).
    Thresholds,
}

impl Subcommand {
    fn name(self) -> &'static str {
        match self {
            Subcommand::SignalInfo => "signal-info",
            Subcommand::Table1 => "table1",
            Subcommand::ProbCurves => "prob-curves",
            Subcommand::IntervalStd => "interval-std",
            Subcommand::Curves => "curves",
            Subcommand::Thresholds => "thresholds",
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "mle-threshold-lab", version, about)]
struct Cli {
    #[arg(value_enum)]
    subcommand: Subcommand,
    /// Experiment configuration. `table1` accepts several, one per carrier.
    #[arg(long, required = true)]
    config: Vec<PathBuf>,
    /// Output directory (created if missing).
    #[arg(long)]
    out: PathBuf,
    /// Overrides `sim.seed`.
    #[arg(long)]
    seed: Option<u64>,
    /// Overrides `sim.trials`.
    #[arg(long)]
    trials: Option<usize>,
    /// Print wall time to stderr.
    #[arg(long)]
    timing: bool,
}

#[derive(Serialize)]
struct ConfigRecord {
    file: String,
    sha256: String,
    sim_seed: u64,
    sim_trials: usize,
    mvn_seed: u64,
    /// The configuration as used, overrides applied.
    resolved: String,
}

#[derive(Serialize)]
struct FileRecord {
    file: String,
    sha256: String,
    bytes: usize,
}

#[derive(Serialize)]
struct Manifest {
    tool: &'static str,
    version: &'static str,
    subcommand: &'static str,
    seed_override: Option<u64>,
    trials_override: Option<usize>,
    configs: Vec<ConfigRecord>,
    outputs: Vec<FileRecord>,
}

#[derive(Serialize)]
struct ErrorReport<'a> {
    subcommand: Option<&'a str>,
    error: ErrorRecord,
}

fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

fn configure_threads() -> Result<()> {
    let Ok(v) = std::env::var("MLE_LAB_THREADS") else {
        return Ok(());
    };
    match v.trim().parse::<usize>() {
        Ok(n) if n > 0 => {
            mle_threshold::par::configure_threads(n);
            Ok(())
        }
        _ => Err(Error::Config(format!("MLE_LAB_THREADS must be a positive integer, got {v:?}"))),
    }
}

fn load_configs(cli: &Cli) -> Result<(Vec<ExperimentConfig>, Vec<ConfigRecord>)> {
    if cli.config.len() > 1 && cli.subcommand != Subcommand::Table1 {
        return Err(Error::Config(format!("{} takes exactly one --config", cli.subcommand.name())));
    }
    let mut cfgs = Vec::new();
    let mut records = Vec::new();
    for path in &cli.config {
        let (mut cfg, bytes) = ExperimentConfig::load(path)?;
        if let Some(s) = cli.seed {
            cfg.sim.seed = s;
        }
        if let Some(t) = cli.trials {
            cfg.sim.trials = t;
        }
        cfg.validate()?;
        records.push(ConfigRecord {
            file: path.file_name().map(|f| f.to_string_lossy().into_owned()).unwrap_or_default(),
            sha256: sha256_hex(&bytes),
            sim_seed: cfg.sim.seed,
            sim_trials: cfg.sim.trials,
            mvn_seed: cfg.mvn.seed,
            resolved: cfg.to_toml(),
        });
        cfgs.push(cfg);
    }
    Ok((cfgs, records))
}

fn compute(sub: Subcommand, cfgs: &[ExperimentConfig]) -> Result<Vec<Artifact>> {
    match sub {
        Subcommand::SignalInfo => commands::signal_info(&cfgs[0]),
        Subcommand::Table1 => commands::table1(cfgs),
        Subcommand::ProbCurves => commands::prob_curves(&cfgs[0]),
        Subcommand::IntervalStd => commands::interval_std(&cfgs[0]),
        Subcommand::Curves => commands::curves(&cfgs[0]),
        Subcommand::Thresholds => commands::thresholds(&cfgs[0]),
    }
}

/// Writes everything into a staging directory inside `out` and only then
/// moves the files into place, so a failed run leaves no partial outputs.
fn publish(out: &Path, files: &[Artifact]) -> Result<()> {
    let stage = out.join(format!(".staging-{}", std::process::id()));
    let result = (|| -> Result<()> {
        fs::create_dir_all(&stage)?;
        for f in files {
            fs::write(stage.join(&f.name), &f.bytes)?;
        }
        for f in files {
            fs::rename(stage.join(&f.name), out.join(&f.name))?;
        }
        Ok(())
    })();
    let _ = fs::remove_dir_all(&stage);
    if result.is_err() {
        for f in files {
            let _ = fs::remove_file(out.join(&f.name));
        }
    }
    result
}

fn run(cli: &Cli) -> Result<()> {
    let start = Instant::now();
    configure_threads()?;
    let (cfgs, config_records) = load_configs(cli)?;
    let mut files = compute(cli.subcommand, &cfgs)?;
    let manifest = Manifest {
        tool: env!("CARGO_PKG_NAME"),
        version: env!("CARGO_PKG_VERSION"),
        subcommand: cli.subcommand.name(),
        seed_override: cli.seed,
        trials_override: cli.trials,
        configs: config_records,
        outputs: files
            .iter()
            .map(|f| FileRecord { file: f.name.clone(), sha256: sha256_hex(&f.bytes), bytes: f.bytes.len() })
            .collect(),
    };
    let mut bytes = serde_json::to_vec_pretty(&manifest).expect("JSON serialisation");
    bytes.push(b'\n');
    files.push(Artifact { name: format!("manifest_{}.json", manifest.subcommand), bytes });

    let created = !cli.out.exists();
    fs::create_dir_all(&cli.out)?;
    if let Err(e) = publish(&cli.out, &files) {
        if created {
            let _ = fs::remove_dir(&cli.out);
        }
        return Err(e);
    }
    if cli.timing {
        eprintln!("wall time: {:.3} s", start.elapsed().as_secs_f64());
    }
    Ok(())
}

fn report(sub: Option<&str>, error: ErrorRecord) {
    let r = ErrorReport { subcommand: sub, error };
    eprintln!("{}", serde_json::to_string(&r).expect("JSON serialisation"));
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            let msg = e.render().to_string();
            let first = msg.lines().next().unwrap_or_default().trim_start_matches("error: ").to_string();
            report(None, ErrorRecord { kind: "usage", threshold: None, message: first });
            return ExitCode::from(2);
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            report(Some(cli.subcommand.name()), ErrorRecord::from_error(&e));
            ExitCode::from(if matches!(e, Error::Config(_)) { 2 } else { 1 })
        }
    }
}
