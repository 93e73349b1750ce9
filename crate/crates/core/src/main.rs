use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use hardy_core::suite::{
    emit_tables, list_catalog, run_suite, RunOptions, TableFormat, VerificationReport,
};
use hardy_core::Error;

#[derive(Parser)]
#[command(
    name = "hardy",
    version,
    about = "Verify Hardy-type inequalities on model manifolds"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a suite config and write the JSON report and CSV tables.
    Run {
        config: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        tol_disc: Option<f64>,
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
    /// List models, weights and inequality kinds.
    List,
    /// Re-emit a saved report as CSV tables or canonical JSON.
    Emit {
        report: PathBuf,
        #[arg(long, value_enum)]
        format: Format,
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

fn exit_for(e: &Error) -> ExitCode {
    eprintln!("error: {e}");
    if e.is_config() {
        ExitCode::from(2)
    } else {
        ExitCode::from(3)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::List => {
            print!("{}", list_catalog());
            ExitCode::SUCCESS
        }
        Command::Run {
            config,
            seed,
            tol_disc,
            out_dir,
        } => {
            let opts = RunOptions {
                seed,
                tol_disc,
                out_dir,
            };
            match run_suite(&config, &opts) {
                Ok((report, dir)) => {
                    let s = report.summary;
                    println!(
                        "{} checks: {} pass, {} fail, {} trivial; {} hypothesis-failed; report in {}",
                        s.n_checks,
                        s.n_pass,
                        s.n_fail,
                        s.n_trivial,
                        s.n_hypothesis_failed,
                        dir.display()
                    );
                    if report.passed() {
                        ExitCode::SUCCESS
                    } else {
                        ExitCode::from(1)
                    }
                }
                Err(e) => exit_for(&e),
            }
        }
        Command::Emit {
            report,
            format,
            out_dir,
        } => {
            let text = match std::fs::read_to_string(&report) {
                Ok(t) => t,
                Err(e) => {
                    return exit_for(&Error::Io {
                        path: report,
                        source: e,
                    })
                }
            };
            let parsed = match VerificationReport::from_json(&text) {
                Ok(r) => r,
                Err(e) => return exit_for(&e),
            };
            let dir =
                out_dir.unwrap_or_else(|| report.parent().map(PathBuf::from).unwrap_or_default());
            let format = match format {
                Format::Csv => TableFormat::Csv,
                Format::Json => TableFormat::Json,
            };
            match emit_tables(&parsed, format, &dir) {
                Ok(paths) => {
                    for p in paths {
                        println!("{}", p.display());
                    }
                    ExitCode::SUCCESS
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::from(3)
                }
            }
        }
    }
}
