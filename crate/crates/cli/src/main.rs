//! `ccx`: graph enumeration, expansion coefficients, equations of state and
//! the validation suites.

mod commands;
mod output;
mod validate;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use canonical_cluster::config::{Config, RunConfig};
use clap::{Parser, Subcommand};

use commands::GraphKind;
use output::{Format, Report};
use validate::Suite;

#[derive(Parser, Debug)]
#[command(name = "ccx", version, about = "Canonical cluster expansion toolkit")]
struct Cli {
    /// Configuration file with `[section]` headers and `key = value` lines.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Overrides one entry, `section.key=value`; repeatable.
    #[arg(long = "set", global = true, value_name = "SECTION.KEY=VALUE")]
    overrides: Vec<String>,
    /// Seed for every Monte Carlo estimate.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads; defaults to one per core.
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Output file instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value = "csv")]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Lists labeled graphs on `{1..n}` in canonical text form.
    Enumerate {
        #[arg(value_enum)]
        kind: GraphKind,
        n: usize,
    },
    /// Coefficients of the free-energy expansion, one row per order.
    Coeffs,
    /// Irreducible coefficients, virial coefficients and a pressure table.
    Virial,
    /// Free-energy density over the density grid.
    FreeEnergy,
    /// Convergence condition for a polymer-system file.
    KpCheck,
    /// Runs a validation suite and prints PASS or FAIL per check.
    Validate {
        #[arg(value_enum, default_value = "all")]
        suite: Suite,
    },
}

fn load_config(cli: &Cli, fallback: &str) -> Result<(Config, Option<PathBuf>)> {
    let (mut config, base) = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            let config = Config::parse(&text).with_context(|| format!("in {}", path.display()))?;
            (config, path.parent().map(Path::to_path_buf))
        }
        None => (Config::parse(fallback)?, None),
    };
    for assignment in &cli.overrides {
        config.set(assignment)?;
    }
    if let Some(seed) = cli.seed {
        config.set(&format!("integrals.seed={seed}"))?;
    }
    Ok((config, base))
}

fn emit(cli: &Cli, text: &str) -> Result<()> {
    match &cli.out {
        Some(path) => std::fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            stdout.flush()?;
            Ok(())
        }
    }
}

fn emit_report(cli: &Cli, report: &Report) -> Result<()> {
    emit(cli, &report.render(cli.format))
}

fn run(cli: &Cli) -> Result<bool> {
    if let Some(workers) = cli.workers {
        rayon::ThreadPoolBuilder::new()
            .num_threads(workers.max(1))
            .build_global()
            .context("starting the worker pool")?;
    }
    if let Command::Enumerate { kind, n } = &cli.command {
        let graphs = commands::enumerate(*kind, *n)?;
        let mut text = String::new();
        for g in &graphs {
            text.push_str(&g.to_string());
            text.push('\n');
        }
        emit(cli, &text)?;
        let count = format!("count={}", graphs.len());
        if cli.out.is_some() {
            println!("{count}");
        } else {
            eprintln!("{count}");
        }
        return Ok(true);
    }
    let fallback = match cli.command {
        Command::Validate { .. } => validate::DEFAULT_CONFIG,
        _ => "",
    };
    let (config, base) = load_config(cli, fallback)?;
    let run = RunConfig::from_config(&config)?;
    let pass = match &cli.command {
        Command::Enumerate { .. } => unreachable!(),
        Command::Coeffs => {
            emit_report(cli, &commands::coeffs(&config, &run)?)?;
            true
        }
        Command::Virial => {
            emit_report(cli, &commands::virial(&config, &run)?)?;
            true
        }
        Command::FreeEnergy => {
            emit_report(cli, &commands::free_energy(&config, &run)?)?;
            true
        }
        Command::KpCheck => {
            let (report, pass) = commands::kp_check(&config, &run, base.as_deref())?;
            emit_report(cli, &report)?;
            pass
        }
        Command::Validate { suite } => {
            let (report, pass) = validate::validate(*suite, &run, base.as_deref())?;
            emit_report(cli, &report)?;
            if cli.out.is_some() {
                println!("{}", if pass { "PASS" } else { "FAIL" });
            }
            pass
        }
    };
    Ok(pass)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
