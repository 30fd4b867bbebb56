//! `emhd1d`: command-line surface of the laboratory.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use emhd1d_cli::labs::{blowup_lab, galerkin_lab, picard_lab, BlowupArgs, GalerkinArgs, PicardArgs};
use emhd1d_cli::runner::{execute_run, load_config};
use emhd1d_cli::sweep::{run_sweep, SweepSpec};
use emhd1d_cli::verify::run_suites;
use emhd1d_cli::{EXIT_CHECK_FAILED, EXIT_OK, EXIT_USAGE};

#[derive(Parser)]
#[command(
    name = "emhd1d",
    version,
    about = "Pseudo-spectral laboratory for one-dimensional nonlocal transport models",
    after_help = "Exit codes: 0 ok, 1 failed verification, 2 usage error, \
                  3 numeric failure, 10 scientific finding (blow-up stop / resolution loss)."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evolve one configuration into a self-describing artifact directory.
    Run {
        /// Config file (flat key = value), or a manifest.json to replay.
        #[arg(long)]
        config: PathBuf,
        /// Output directory (default: '<config stem>-out').
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Re-measure an invariant suite and report each check.
    Verify {
        /// operators | conservation | scaling | lemmas | picard | galerkin |
        /// blowup | all
        #[arg(long)]
        suite: String,
    },
    /// Execute a Cartesian parameter sweep with per-cell run directories.
    Sweep {
        /// Sweep spec file (run-config template + sweep_* axes + output_root).
        #[arg(long)]
        spec: PathBuf,
        /// Concurrent worker budget.
        #[arg(long, default_value_t = 1)]
        workers: usize,
    },
    /// Iteration lab: successive-approximation distances and contraction
    /// ratios against the direct solver.
    Picard {
        /// Grid size.
        #[arg(long, default_value_t = 128)]
        n: usize,
        /// Spectral decay of the random datum.
        #[arg(long, default_value_t = 2.2)]
        decay: f64,
        /// Seed of the random datum.
        #[arg(long, default_value_t = 12)]
        seed: u64,
        /// Interaction coefficient.
        #[arg(long, default_value_t = 1.0)]
        a: f64,
        /// Transport coefficient.
        #[arg(long, default_value_t = 1.0)]
        b: f64,
        /// Dissipation order.
        #[arg(long, default_value_t = 2.2)]
        alpha: f64,
        /// Dissipation strength.
        #[arg(long, default_value_t = 1.0)]
        mu: f64,
        /// Horizon.
        #[arg(long, default_value_t = 0.05)]
        t_end: f64,
        /// Mesh steps.
        #[arg(long, default_value_t = 200)]
        steps: usize,
        /// Iterates past the semigroup seed.
        #[arg(long, default_value_t = 8)]
        iterates: usize,
    },
    /// Coefficient-ODE lab: weighted functional, fitted cubic inequality,
    /// and optional cross-check against the truncated solver.
    Galerkin {
        /// Truncation order.
        #[arg(long, default_value_t = 32)]
        n_max: i64,
        /// Dissipation order.
        #[arg(long, default_value_t = 1.0)]
        alpha: f64,
        /// Dissipation strength.
        #[arg(long, default_value_t = 0.0)]
        mu: f64,
        /// Horizon.
        #[arg(long, default_value_t = 0.15)]
        t_end: f64,
        /// Fixed step.
        #[arg(long, default_value_t = 1e-4)]
        dt: f64,
        /// Weight exponent of the diagnostic functional.
        #[arg(long, default_value_t = 8)]
        weight: i32,
        /// Also integrate the truncated solver and report the discrepancy.
        #[arg(long)]
        cross_check: bool,
        /// Write the fitted-term series to this CSV file.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Collapse lab: evolve the odd profile and assess the singularity
    /// indicators.
    Blowup {
        /// Grid size.
        #[arg(long, default_value_t = 4096)]
        n: usize,
        /// Dissipation order.
        #[arg(long, default_value_t = 1.5)]
        alpha: f64,
        /// Dissipation strength (0 = collapse regime).
        #[arg(long, default_value_t = 0.0)]
        mu: f64,
        /// Courant constant.
        #[arg(long, default_value_t = 0.1)]
        cfl: f64,
        /// Horizon (resolution loss usually ends the run first).
        #[arg(long, default_value_t = 0.02)]
        t_end: f64,
        /// Output directory.
        #[arg(long, default_value = "blowup-out")]
        out: PathBuf,
    },
}

fn dispatch(cli: Cli) -> anyhow::Result<i32> {
    match cli.command {
        Command::Run { config, out } => {
            let cfg = load_config(&config)?;
            let out = out.unwrap_or_else(|| {
                let stem = config
                    .file_stem()
                    .map(|s| s.to_string_lossy().into_owned())
                    .unwrap_or_else(|| "run".to_string());
                PathBuf::from(format!("{stem}-out"))
            });
            let outcome = execute_run(&cfg, &out)?;
            println!(
                "{} (resolved until t = {}); artifacts in {}",
                outcome.termination,
                outcome
                    .resolved_until
                    .map_or("n/a".to_string(), |t| format!("{t:?}")),
                out.display()
            );
            Ok(outcome.exit_code)
        }
        Command::Verify { suite } => {
            let reports = run_suites(&suite)?;
            let mut all = true;
            for report in &reports {
                let n_pass = report.checks.iter().filter(|c| c.pass).count();
                eprintln!(
                    "suite {}: {}/{} checks passed ({:.2} s)",
                    report.suite,
                    n_pass,
                    report.checks.len(),
                    report.seconds
                );
                for c in &report.checks {
                    eprintln!(
                        "  {} {}: measured {:.6e} (requirement {})",
                        if c.pass { "PASS" } else { "FAIL" },
                        c.name,
                        c.measured,
                        c.requirement
                    );
                }
                all &= report.passed();
            }
            let json = serde_json::json!({
                "schema": emhd1d_cli::config::SCHEMA_VERSION,
                "passed": all,
                "suites": reports.iter().map(|r| r.to_json()).collect::<Vec<_>>(),
            });
            println!("{}", serde_json::to_string_pretty(&json)?);
            Ok(if all { EXIT_OK } else { EXIT_CHECK_FAILED })
        }
        Command::Sweep { spec, workers } => {
            let spec = SweepSpec::load(&spec)?;
            let outcome = run_sweep(&spec, workers)?;
            println!(
                "{} cells; summary at {}",
                outcome.cells,
                outcome.root.join("summary.csv").display()
            );
            Ok(outcome.exit_code)
        }
        Command::Picard {
            n,
            decay,
            seed,
            a,
            b,
            alpha,
            mu,
            t_end,
            steps,
            iterates,
        } => {
            let report = picard_lab(&PicardArgs {
                n,
                decay,
                seed,
                a,
                b,
                alpha,
                mu,
                t_end,
                steps,
                iterates,
            })?;
            println!("{}", serde_json::to_string_pretty(&report)?);
            Ok(EXIT_OK)
        }
        Command::Galerkin {
            n_max,
            alpha,
            mu,
            t_end,
            dt,
            weight,
            cross_check,
            csv,
        } => {
            let report = galerkin_lab(&GalerkinArgs {
                n_max,
                alpha,
                mu,
                t_end,
                dt,
                weight,
                cross_check,
                csv,
            })?;
            println!("{}", serde_json::to_string_pretty(&report)?);
            Ok(EXIT_OK)
        }
        Command::Blowup {
            n,
            alpha,
            mu,
            cfl,
            t_end,
            out,
        } => {
            let (verdict, code) = blowup_lab(
                &BlowupArgs {
                    n,
                    alpha,
                    mu,
                    cfl,
                    t_end,
                },
                &out,
            )?;
            println!("{}", serde_json::to_string_pretty(&verdict)?);
            Ok(code)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_USAGE as u8)
        }
    }
}
