use clap::{Args, Parser, Subcommand};
use psgeo::report::{self, Tolerances};
use psgeo::surfspec;
use std::path::PathBuf;
use std::process::ExitCode;

/// Surface geometry batch harness: evaluate a parametrized surface over a
/// grid, cross-check every bracket-side quantity against the classical
/// route, and emit reports.
#[derive(Parser)]
#[command(name = "psgeo", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CommonArgs {
    /// Surface spec file.
    spec: PathBuf,
    /// Density override: `one`, `sqrt_g`, or an expression in u1, u2.
    #[arg(long)]
    rho: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Run every invariant at every grid point and report deviations.
    Check {
        #[command(flatten)]
        common: CommonArgs,
        /// Override a named tolerance, e.g. `--tol k_poisson_vs_classical=1e-7`.
        /// Repeatable.
        #[arg(long, value_name = "NAME=VALUE")]
        tol: Vec<String>,
        /// Also write the machine-readable report here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write a CSV table of curvature quantities over the grid.
    Table {
        #[command(flatten)]
        common: CommonArgs,
        /// Output path; standard output if omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the full digest of a single parameter point.
    Point {
        #[command(flatten)]
        common: CommonArgs,
        /// Parameter point as `u1,u2`.
        #[arg(long, value_name = "A,B")]
        u: String,
    },
}

fn input_err(msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(2)
}

fn load(common: &CommonArgs) -> Result<(psgeo::SurfaceSpec, surfspec::GridSpec), String> {
    let (mut surface, grid) = surfspec::load_spec(&common.spec).map_err(|e| e.to_string())?;
    if let Some(rho) = &common.rho {
        surface.density = surfspec::parse_density(rho).map_err(|e| e.to_string())?;
    }
    Ok((surface, grid))
}

fn write_out(path: &PathBuf, content: &str) -> Result<(), String> {
    std::fs::write(path, content).map_err(|e| format!("cannot write {}: {e}", path.display()))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Check { common, tol, out } => {
            let (surface, grid) = match load(&common) {
                Ok(v) => v,
                Err(e) => return input_err(e),
            };
            let mut tols = Tolerances::default();
            for spec in &tol {
                let Some((name, value)) = spec.split_once('=') else {
                    return input_err(format!("--tol expects NAME=VALUE, got `{spec}`"));
                };
                let value: f64 = match value.parse() {
                    Ok(v) => v,
                    Err(_) => return input_err(format!("--tol {name}: `{value}` is not a number")),
                };
                if let Err(e) = tols.set(name.trim(), value) {
                    return input_err(e);
                }
            }
            let report = match report::run_checks(&surface, &grid, &tols) {
                Ok(r) => r,
                Err(e) => return input_err(e),
            };
            print!("{}", report.render_text());
            if let Some(path) = out {
                if let Err(e) = write_out(&path, &report.render_machine()) {
                    return input_err(e);
                }
            }
            if report.passed() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Command::Table { common, out } => {
            let (surface, grid) = match load(&common) {
                Ok(v) => v,
                Err(e) => return input_err(e),
            };
            let table = match report::write_table(&surface, &grid) {
                Ok(t) => t,
                Err(e) => return input_err(e),
            };
            match out {
                Some(path) => {
                    if let Err(e) = write_out(&path, &table) {
                        return input_err(e);
                    }
                }
                None => print!("{table}"),
            }
            ExitCode::SUCCESS
        }
        Command::Point { common, u } => {
            let (surface, _) = match load(&common) {
                Ok(v) => v,
                Err(e) => return input_err(e),
            };
            let parts: Vec<&str> = u.split(',').collect();
            let point: Option<[f64; 2]> = match parts.as_slice() {
                [a, b] => match (a.trim().parse(), b.trim().parse()) {
                    (Ok(a), Ok(b)) => Some([a, b]),
                    _ => None,
                },
                _ => None,
            };
            let Some(point) = point else {
                return input_err(format!("--u expects two numbers `a,b`, got `{u}`"));
            };
            match report::point_digest(&surface, point) {
                Ok(digest) => {
                    print!("{digest}");
                    ExitCode::SUCCESS
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::from(1)
                }
            }
        }
    }
}
