//! `multipack`: bounds curves, radius reports, code construction and
//! verification, tail estimates and rate functions from the command line.

mod commands;
mod manifest;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Parser)]
#[command(name = "multipack", version, about = "Average-radius multiple packing toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write capacity-bound curves on a geometric noise grid as CSV.
    Bounds(BoundsArgs),
    /// Report Chebyshev, average or p-relaxed radius of a list file.
    Radius(RadiusArgs),
    /// Sample, expurgate and write a finite code.
    Construct(ConstructArgs),
    /// Exhaustively check a code or constellation for bad lists.
    Verify(VerifyArgs),
    /// Monte Carlo tail probability of the average squared radius.
    Tail(TailArgs),
    /// Cramér rate of the average squared radius on the cube.
    Ratefn(RatefnArgs),
}

#[derive(Args, Serialize)]
pub struct BoundsArgs {
    /// List size.
    #[arg(long = "L", required_unless_present = "multi_l", conflicts_with = "multi_l")]
    #[serde(rename = "L")]
    pub list_len: Option<usize>,
    /// Comma-separated list sizes; writes one file per value.
    #[arg(long = "multi-L", value_delimiter = ',')]
    #[serde(rename = "multi_L")]
    pub multi_l: Vec<usize>,
    #[arg(long = "N-min")]
    #[serde(rename = "N_min")]
    pub noise_min: f64,
    #[arg(long = "N-max")]
    #[serde(rename = "N_max")]
    pub noise_max: f64,
    #[arg(long, default_value_t = 50)]
    pub steps: usize,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum RadiusMode {
    Cheb,
    Avg,
    P,
}

#[derive(Args, Serialize)]
pub struct RadiusArgs {
    /// Point file (`# n=<dim>` header, one comma-separated point per line).
    pub input: PathBuf,
    #[arg(long, value_enum, default_value_t = RadiusMode::Avg)]
    pub mode: RadiusMode,
    #[arg(long, default_value_t = 2.0)]
    pub p: f64,
    #[arg(long, default_value_t = 1e-12)]
    pub tol: f64,
}

#[derive(Args, Serialize)]
pub struct ConstructArgs {
    #[arg(long = "n")]
    pub n: usize,
    #[arg(long = "L")]
    #[serde(rename = "L")]
    pub list_len: usize,
    #[arg(long = "N")]
    #[serde(rename = "N")]
    pub noise: f64,
    /// Cube half-width; defaults to max(n^2, 4 sqrt(nN)).
    #[arg(long = "K")]
    #[serde(rename = "K")]
    pub half_width: Option<f64>,
    #[arg(long, default_value_t = -0.1, allow_negative_numbers = true)]
    pub rate_margin: f64,
    #[arg(long)]
    pub seed: u64,
    /// Explicit code size; skips the enumeration budget.
    #[arg(long = "M")]
    #[serde(rename = "M")]
    pub size: Option<usize>,
    /// Write the raw sample without removing bad lists.
    #[arg(long)]
    pub no_expurgate: bool,
    /// Tile the expurgated code and record period and gap in the output.
    #[arg(long)]
    pub tile: bool,
    /// Guard gap for `--tile`; defaults to just above the smallest safe gap.
    #[arg(long, requires = "tile")]
    pub gap: Option<f64>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args, Serialize)]
pub struct VerifyArgs {
    /// Code file written by `construct`.
    pub code: PathBuf,
    /// Check the tiled constellation inside a window instead of the finite code.
    #[arg(long)]
    pub as_constellation: bool,
    /// Window radius around the origin; defaults to the base tile plus interaction range.
    #[arg(long, requires = "as_constellation")]
    pub window: Option<f64>,
}

#[derive(Args, Serialize)]
pub struct TailArgs {
    #[arg(long = "L")]
    #[serde(rename = "L")]
    pub list_len: usize,
    #[arg(long = "n")]
    pub n: usize,
    #[arg(long = "K")]
    #[serde(rename = "K")]
    pub half_width: f64,
    #[arg(long = "N")]
    #[serde(rename = "N")]
    pub noise: f64,
    #[arg(long)]
    pub samples: u64,
    #[arg(long)]
    pub seed: u64,
    #[arg(long, default_value_t = 64)]
    pub quad_order: usize,
    /// Also write the CSV row (with header) to this file.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Serialize)]
pub struct RatefnArgs {
    #[arg(long = "L")]
    #[serde(rename = "L")]
    pub list_len: usize,
    #[arg(long = "K")]
    #[serde(rename = "K")]
    pub half_width: f64,
    #[arg(long = "N")]
    #[serde(rename = "N")]
    pub noise: f64,
    #[arg(long, default_value_t = 64)]
    pub quad_order: usize,
}

fn configure_threads() -> anyhow::Result<()> {
    let Ok(raw) = std::env::var("MULTIPACK_THREADS") else {
        return Ok(());
    };
    let threads: usize =
        raw.trim().parse().map_err(|_| anyhow::anyhow!("MULTIPACK_THREADS must be a count, got `{raw}`"))?;
    rayon::ThreadPoolBuilder::new().num_threads(threads).build_global()?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = configure_threads().and_then(|()| match cli.command {
        Command::Bounds(a) => commands::bounds(&a),
        Command::Radius(a) => commands::radius(&a),
        Command::Construct(a) => commands::construct(&a),
        Command::Verify(a) => commands::verify(&a),
        Command::Tail(a) => commands::tail(&a),
        Command::Ratefn(a) => commands::ratefn(&a),
    });
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
