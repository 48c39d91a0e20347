//! `expgeo`: norms, charts, divergences, gradient flows and Boltzmann
//! estimates from the command line.
//!
//! Densities and variables are JSON objects `{"weights": [...], "values": [...]}`
//! given inline or as file paths. Exit status is 0 on success, 2 for invalid
//! input and 1 for numeric failures.

mod commands;
mod io;

use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use expgeo::young::YoungPairKind;

use commands::{FlowField, GChoice};
use io::{CliError, CliResult};

#[derive(Parser)]
#[command(name = "expgeo", version, about = "Exponential-manifold geometry toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    A,
    B,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum Field {
    Expectation,
    Entropy,
}

#[derive(Clone, Copy, ValueEnum)]
enum G {
    Invariant,
    V1sq,
    Logf,
    CustomPolynomial,
}

#[derive(Subcommand)]
enum Command {
    /// Luxemburg norm of a variable under a density.
    Norm {
        #[arg(long)]
        density: String,
        #[arg(long)]
        variable: String,
        #[arg(long, value_enum, default_value = "a")]
        kind: Kind,
        /// Use the conjugate Young function.
        #[arg(long)]
        conjugate: bool,
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
    },
    /// Exponential chart `s_p(q)` or its inverse `e_p(u)`.
    Chart {
        #[arg(long)]
        base: String,
        #[arg(long, conflicts_with = "coordinate")]
        density: Option<String>,
        #[arg(long)]
        coordinate: Option<String>,
    },
    /// KL divergence directly and through a chart.
    Kl {
        #[arg(long)]
        q1: String,
        #[arg(long)]
        q2: String,
        /// Chart center; uniform when omitted.
        #[arg(long)]
        base: Option<String>,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Entropy `E_q[ln q]`.
    Entropy {
        #[arg(long)]
        density: String,
    },
    /// Gradient flow of the expectation or entropy functional.
    Flow {
        #[arg(long, value_enum)]
        field: Field,
        /// Random variable for the expectation field.
        #[arg(long)]
        f: Option<String>,
        #[arg(long)]
        p0: String,
        #[arg(long, default_value_t = 1.0)]
        t: f64,
        #[arg(long, default_value_t = 1e-3)]
        step: f64,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
    },
    /// Monte Carlo weak form of the Boltzmann operator.
    Boltzmann {
        #[arg(long)]
        spec: String,
        #[arg(long, value_enum)]
        g: G,
        /// Monomials `[{"coef": c, "pow": [i, j, k]}, ...]` for `custom-polynomial`.
        #[arg(long)]
        poly: Option<String>,
        #[arg(long, default_value_t = 100_000)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn workers_from_env() -> CliResult<Option<usize>> {
    match std::env::var("EXPGEO_THREADS") {
        Ok(s) => match s.trim().parse::<usize>() {
            Ok(w) if w > 0 => Ok(Some(w)),
            _ => Err(CliError::Validation(format!(
                "EXPGEO_THREADS must be a positive integer, got {s:?}"
            ))),
        },
        Err(_) => Ok(None),
    }
}

fn run(cli: Cli) -> CliResult<()> {
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    match cli.command {
        Command::Norm {
            density,
            variable,
            kind,
            conjugate,
            tol,
        } => {
            let kind = match kind {
                Kind::A => YoungPairKind::A,
                Kind::B => YoungPairKind::B,
            };
            commands::norm(&mut out, &density, &variable, commands::young_function(kind, conjugate), tol)
        }
        Command::Chart {
            base,
            density,
            coordinate,
        } => commands::chart_cmd(&mut out, &base, density.as_deref(), coordinate.as_deref()),
        Command::Kl {
            q1,
            q2,
            base,
            tol,
            format,
        } => commands::kl(&mut out, &q1, &q2, base.as_deref(), tol, matches!(format, Format::Csv)),
        Command::Entropy { density } => commands::entropy(&mut out, &density),
        Command::Flow {
            field,
            f,
            p0,
            t,
            step,
            format,
        } => {
            let field = match (field, f) {
                (Field::Expectation, Some(f)) => FlowField::Expectation(f),
                (Field::Expectation, None) => {
                    return Err(CliError::Validation("--f is required for the expectation field".into()))
                }
                (Field::Entropy, _) => FlowField::Entropy,
            };
            commands::flow(&mut out, field, &p0, t, step, matches!(format, Format::Csv))
        }
        Command::Boltzmann {
            spec,
            g,
            poly,
            n,
            seed,
        } => {
            let g = match (g, poly) {
                (G::Invariant, _) => GChoice::Invariant,
                (G::V1sq, _) => GChoice::V1Squared,
                (G::Logf, _) => GChoice::LogDensity,
                (G::CustomPolynomial, Some(p)) => GChoice::Polynomial(p),
                (G::CustomPolynomial, None) => {
                    return Err(CliError::Validation("--poly is required for custom-polynomial".into()))
                }
            };
            if n == 0 {
                return Err(CliError::Validation("--n must be at least 1".into()));
            }
            commands::boltzmann(&mut out, &spec, g, n, seed, workers_from_env()?)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("expgeo: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
