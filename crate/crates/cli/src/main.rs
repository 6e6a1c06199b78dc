//! `sl2r`: distances, ball and prism volumes, sphere meshes and packing
//! sweeps from the command line.
//!
//! Results go to stdout (or `--out`) as JSON, CSV or OBJ. Failures print a
//! JSON object on stderr and exit with 1 for usage errors and 2 for domain or
//! solver errors.

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::output::CliError;

#[derive(Debug, Parser)]
#[command(name = "sl2r", version, about = "Geometry workbench for the universal cover of SL(2,R)")]
struct Cli {
    #[command(flatten)]
    global: GlobalOpts,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct GlobalOpts {
    /// Relative quadrature tolerance (absolute tolerance is a tenth of it).
    /// Overrides SL2R_QUAD_TOL.
    #[arg(long, global = true)]
    pub tol: Option<f64>,

    /// Seed for randomized computations.
    #[arg(long, global = true, default_value_t = 42)]
    pub seed: u64,

    /// Write the main output to this file (atomically) instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Output format; each command accepts a subset.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
    Obj,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Geodesic distance from the origin to a point.
    Distance(commands::DistanceArgs),
    /// Volume of the geodesic ball of radius rho.
    Ballvol(commands::BallvolArgs),
    /// Triangulated geodesic sphere as an OBJ mesh.
    SphereMesh(commands::SphereMeshArgs),
    /// Prism tile, generators and relation report for (p, q).
    Prism(commands::PrismArgs),
    /// Optimal ball packing for (p, q).
    Pack(commands::PackArgs),
    /// Packings over a range of (p, q).
    Sweep(commands::SweepArgs),
}

fn run(cli: Cli) -> Result<(), CliError> {
    let g = &cli.global;
    match &cli.command {
        Command::Distance(a) => commands::distance(g, a),
        Command::Ballvol(a) => commands::ballvol(g, a),
        Command::SphereMesh(a) => commands::sphere_mesh(g, a),
        Command::Prism(a) => commands::prism(g, a),
        Command::Pack(a) => commands::pack(g, a),
        Command::Sweep(a) => commands::sweep(g, a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            // --help and --version
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => return CliError::Usage(e.render().to_string().trim_end().to_string()).report(),
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => e.report(),
    }
}
