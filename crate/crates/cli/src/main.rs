//! `imc`: build, check and measure countable Markov partitions for
//! semigroups of expanding circle maps.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod config;
mod json;
mod manifest;
mod stages;

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use induced_markov::{Error, Result};

use config::{parse_stages, RunConfig, Stage};
use manifest::Manifest;
use stages::Outcome;

#[derive(Parser)]
#[command(name = "imc", version, about = "Countable Markov partitions for semigroups of expanding circle maps")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    opts: Options,
}

#[derive(Args)]
struct Options {
    /// Run configuration (TOML).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory for artifacts.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    /// Seed for every random draw (overrides the config).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Comma-separated stages for `report`.
    #[arg(long, global = true, value_delimiter = ',')]
    stages: Option<Vec<String>>,
    /// Uncovered-mass tolerance and measure convergence tolerance.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Histogram bins for density estimates (power of two).
    #[arg(long, global = true)]
    bins: Option<usize>,
    /// Longest periodic word used for pressure.
    #[arg(long, global = true)]
    nmax: Option<usize>,
    /// `constant <c>`, `log-derivative [t]` or `coordinate`.
    #[arg(long, global = true)]
    potential: Option<String>,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Check local expansion and topological mixing.
    Verify,
    /// Build the countable Markov partition and check its structure.
    Partition,
    /// Check the inducing scheme and the symbolic coding.
    InduceCheck,
    /// Pressure, Gibbs measure and equilibrium checks.
    Thermo,
    /// Invariant densities, entropy and the lifted stationary measure.
    Measures,
    /// Run several stages and write a summary.
    Report,
}

fn load(opts: &Options) -> Result<RunConfig> {
    let path = opts
        .config
        .as_deref()
        .ok_or_else(|| Error::InvalidInput("--config is required".into()))?;
    let mut cfg = RunConfig::load(path)?;
    if let Some(s) = opts.seed {
        cfg.seed = s;
    }
    if let Some(t) = opts.tol {
        cfg.tol = t;
    }
    if let Some(b) = opts.bins {
        cfg.bins = b;
    }
    if let Some(n) = opts.nmax {
        cfg.n_max = n;
    }
    if let Some(p) = &opts.potential {
        cfg.potential = p.parse()?;
    }
    if let Some(s) = &opts.stages {
        cfg.stages = parse_stages(s)?;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn run_stage(stage: Stage, cfg: &RunConfig, out: &Path, manifest: &mut Manifest) -> Result<Outcome> {
    let start = Instant::now();
    let o = stages::run(stage, cfg, out)?;
    manifest.record(out, stage.name(), start.elapsed().as_secs_f64(), o.failures.is_empty(), &o.artifacts)?;
    manifest.save(out)?;
    Ok(o)
}

fn print_outcome(stage: Stage, o: &Outcome) {
    for (k, v) in &o.summary {
        println!("{stage}: {k} = {v}");
    }
    for f in &o.failures {
        eprintln!("{stage}: FAIL: {f}");
    }
}

fn report(cfg: &RunConfig, out: &Path, manifest: &mut Manifest) -> Result<bool> {
    let mut text = String::new();
    let _ = writeln!(text, "config sha256 {}", manifest.config_sha256);
    let _ = writeln!(text, "system sha256 {}", manifest.system_sha256);
    let _ = writeln!(text, "seed {}", cfg.seed);
    let mut failed: Vec<Stage> = Vec::new();
    for &stage in &cfg.stages {
        let _ = writeln!(text);
        if let Some(r) = stage.requires().filter(|r| failed.contains(r)) {
            let _ = writeln!(text, "[{stage}] skipped: {r} failed");
            failed.push(stage);
            continue;
        }
        let o = match run_stage(stage, cfg, out, manifest) {
            Ok(o) => o,
            Err(e) if e.is_mathematical() => Outcome {
                failures: vec![e.to_string()],
                ..Outcome::default()
            },
            Err(e) => return Err(e),
        };
        print_outcome(stage, &o);
        let verdict = if o.failures.is_empty() { "pass" } else { "FAIL" };
        let _ = writeln!(text, "[{stage}] {verdict}");
        for (k, v) in &o.summary {
            let _ = writeln!(text, "  {k} = {v}");
        }
        for f in &o.failures {
            let _ = writeln!(text, "  failure: {f}");
        }
        if !o.failures.is_empty() {
            failed.push(stage);
        }
    }
    std::fs::write(out.join("report.txt"), text)?;
    Ok(failed.is_empty())
}

fn execute(cmd: Command, opts: &Options) -> Result<bool> {
    let cfg = load(opts)?;
    std::fs::create_dir_all(&opts.out)?;
    let mut manifest = Manifest::load_or_new(&opts.out, &cfg);
    let stage = match cmd {
        Command::Verify => Stage::Verify,
        Command::Partition => Stage::Partition,
        Command::InduceCheck => Stage::InduceCheck,
        Command::Thermo => Stage::Thermo,
        Command::Measures => Stage::Measures,
        Command::Report => return report(&cfg, &opts.out, &mut manifest),
    };
    let o = run_stage(stage, &cfg, &opts.out, &mut manifest)?;
    print_outcome(stage, &o);
    Ok(o.failures.is_empty())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli.command, &cli.opts) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_mathematical() { 1 } else { 2 })
        }
    }
}
