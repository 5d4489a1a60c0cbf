//! Command-line front end: verification suites, Bethe solving, dense
//! spectra and the twisted-product expansion table.
//!
//! The JSON report written by `verify --report <path>` is byte-identical
//! for identical (config, seed); wall times appear only in the summary
//! table on standard output.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use bethe_twist::bethe::{dense_spectrum, solve_bethe, SolveOptions};
use bethe_twist::config::RunConfig;
use bethe_twist::expansion::expansion_terms;
use bethe_twist::kernel::label_name;
use bethe_twist::sampling::{rng_for_check, sample_distinct_params};
use bethe_twist::scalar::{Mode, Scalar};
use bethe_twist::suite::{run_suite, Suite};
use bethe_twist::{Error, Result};

#[derive(Parser)]
#[command(
    name = "bethe-twist",
    version,
    about = "Verification toolkit for twisted Bethe vectors of the rational XXX spin chain"
)]
struct Cli {
    /// JSON configuration file; built-in defaults apply when omitted
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Arithmetic mode override: exact | float
    #[arg(long, global = true)]
    mode: Option<String>,
    /// Master seed override for the per-check random streams
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Tolerance override for float-mode residuals
    #[arg(long, global = true)]
    tolerance: Option<f64>,
    /// Write the JSON check report to this path (verify)
    #[arg(long, global = true)]
    report: Option<PathBuf>,
    /// Chain length override
    #[arg(long, global = true)]
    length: Option<usize>,
    /// Magnon count override
    #[arg(long, global = true)]
    magnons: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a verification suite; exit 0 only when every check passes
    Verify {
        /// all | identities | rtt | twist | bethe | expansion | appendix
        #[arg(long, default_value = "all")]
        suite: String,
    },
    /// Solve the Bethe equations and print the certified roots as JSON
    SolveBethe,
    /// Dense transfer-matrix spectrum at a point, sorted by (re, im)
    Spectrum {
        /// Real spectral point z
        #[arg(long, default_value_t = 1.0)]
        point: f64,
    },
    /// Print the expansion of the twisted creation product over plain ones
    Expand,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn effective_config(cli: &Cli) -> Result<RunConfig> {
    let mut config = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if let Some(mode) = &cli.mode {
        config.mode = match mode.as_str() {
            "exact" => Mode::Exact,
            "float" => Mode::Float,
            other => {
                return Err(Error::Config(format!(
                    "mode: expected 'exact' or 'float', got '{other}'"
                )))
            }
        };
    }
    if let Some(seed) = cli.seed {
        config.seed = seed;
    }
    if let Some(tolerance) = cli.tolerance {
        config.tolerance = tolerance;
    }
    if let Some(length) = cli.length {
        config.override_length(length);
    }
    if let Some(magnons) = cli.magnons {
        config.magnons = magnons;
    }
    config.check()?;
    Ok(config)
}

fn run(cli: Cli) -> Result<ExitCode> {
    let config = effective_config(&cli)?;
    match &cli.command {
        Command::Verify { suite } => {
            let suite: Suite = suite.parse()?;
            let report = run_suite(&config, suite)?;
            print!("{}", report.summary_table());
            if let Some(path) = &cli.report {
                report.write_json(path)?;
                println!("report written to {}", path.display());
            }
            Ok(if report.all_pass() {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            })
        }
        Command::SolveBethe => {
            let model = config.build_model()?;
            let mut rng = rng_for_check(config.seed, "solve-bethe-cmd");
            let outcome = solve_bethe(&model, config.magnons, &mut rng, &SolveOptions::default())?;
            let accepted: Vec<serde_json::Value> = outcome
                .accepted
                .iter()
                .map(|acc| {
                    serde_json::json!({
                        "roots": acc.roots.iter().map(pair).collect::<Vec<_>>(),
                        "algebraic_residual": format!("{:.3e}", acc.algebraic_residual),
                        "eigen_residual": format!("{:.3e}", acc.eigen_residual),
                        "eigenvalue": pair(&acc.eigenvalue),
                    })
                })
                .collect();
            let doc = serde_json::json!({
                "length": model.length(),
                "magnons": config.magnons,
                "attempts": outcome.attempts,
                "converged": outcome.converged,
                "accepted": accepted,
            });
            println!("{}", serde_json::to_string_pretty(&doc)?);
            Ok(ExitCode::SUCCESS)
        }
        Command::Spectrum { point } => {
            let model = config.build_model()?;
            let z = Scalar::real(*point);
            let spectrum = dense_spectrum(&model, &z)?;
            let doc: Vec<serde_json::Value> = spectrum.iter().map(pair).collect();
            println!("{}", serde_json::to_string_pretty(&doc)?);
            Ok(ExitCode::SUCCESS)
        }
        Command::Expand => {
            let model = config.build_model()?;
            let twist = config.build_twist()?;
            let mut rng = rng_for_check(config.seed, "expand-cmd");
            let us = sample_distinct_params(
                &mut rng,
                config.magnons,
                model.coupling(),
                model.inhomogeneities().as_slice(),
                config.mode,
            )?;
            println!("twisted product over plain products, {} parameters:", us.len());
            for (k, u) in us.iter().enumerate() {
                println!("  u_{k} = {u}");
            }
            let terms = expansion_terms(&model, &twist, &us)?;
            println!(
                "{:<12} {:<12} {:<12} {:<14} weight",
                label_name(0),
                label_name(1),
                label_name(2),
                "twist powers"
            );
            for term in &terms {
                println!(
                    "{:<12} {:<12} {:<12} {:<14} {}",
                    index_list(&term.block_i),
                    index_list(&term.block_ii),
                    index_list(&term.block_iii),
                    format!("k11^{} k12^{}", term.k11_power, term.k12_power),
                    term.weight
                );
            }
            println!(
                "{} rows; retained block {} multiplies B(retained)|0>",
                terms.len(),
                label_name(2)
            );
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn pair(s: &Scalar) -> serde_json::Value {
    let z = s.to_complex64();
    serde_json::json!([z.re, z.im])
}

fn index_list(indices: &[usize]) -> String {
    if indices.is_empty() {
        return "-".to_string();
    }
    let parts: Vec<String> = indices.iter().map(|i| format!("u_{i}")).collect();
    parts.join(",")
}
