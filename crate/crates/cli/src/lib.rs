//! `circlepat` command-line front end.
//!
//! Every subcommand writes a JSON report (to `--out` or stdout) that starts
//! with the invocation. Failures are reported on stderr and as a JSON error
//! document, with exit codes 0 ok, 1 domain, 2 I/O or usage, 3 resource cap,
//! 4 numeric budget.

pub mod commands;
pub mod error;
pub mod output;
pub mod svg;

use std::path::PathBuf;

use circlepat::geometry::Background;
use circlepat::solver::Method;
use clap::{Args, Parser, Subcommand};
use serde::Serialize;

pub use error::{exit, CliError};

#[derive(Debug, Parser)]
#[command(name = "circlepat", version, about = "Circle patterns on triangulated surfaces")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Parse a triangulation and report its combinatorics and topology.
    Validate(ValidateArgs),
    /// Build a finite abelian cover and write it with a cell-map sidecar.
    Cover(CoverArgs),
    /// Curvatures, triangle angles and the Gauss–Bonnet check for given radii.
    Curvature(CurvatureArgs),
    /// Subset-inequality feasibility of a curvature target, on the cover and on the base.
    Kat(KatArgs),
    /// Find radii with prescribed curvature.
    Solve(SolveArgs),
    /// Draw one three-circle configuration as SVG.
    RenderTriple(RenderArgs),
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    pub file: PathBuf,
    /// Report path (stdout when omitted).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CoverArgs {
    pub file: PathBuf,
    /// Mod-p homology cover for this prime.
    #[arg(long, conflicts_with_all = ["auto", "voltages"])]
    pub p: Option<u32>,
    /// Smallest prime up to P_MAX with a simplicial cover (default mode, P_MAX = 31).
    #[arg(long, value_name = "P_MAX", num_args = 0..=1, default_missing_value = "31", conflicts_with = "voltages")]
    pub auto: Option<u32>,
    /// Explicit voltage file: `group p k`, then `volt <edge> <c1> … <ck>`.
    #[arg(long)]
    pub voltages: Option<PathBuf>,
    /// Path for the cover triangulation; the sidecar goes to `<out>.sidecar.json`.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Report path (stdout when omitted).
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CurvatureArgs {
    pub file: PathBuf,
    /// Radii file (`<vertex> <value>` lines) or one constant radius.
    #[arg(long, default_value = "1")]
    pub radii: String,
    #[arg(long, default_value = "euclidean")]
    pub bg: Background,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct KatArgs {
    pub file: PathBuf,
    /// Target curvature file or constant, on base vertices.
    #[arg(long = "K", value_name = "K", default_value = "0", allow_hyphen_values = true)]
    pub k: String,
    #[arg(long, default_value = "euclidean")]
    pub bg: Background,
    /// `auto` or a voltage file.
    #[arg(long, default_value = "auto")]
    pub cover: String,
    #[arg(long, default_value_t = 31)]
    pub p_max: u32,
    /// Largest vertex count for exhaustive subset enumeration.
    #[arg(long, default_value_t = circlepat::kat::DEFAULT_SUBSET_CAP)]
    pub cap: usize,
    /// Also require `K_v < 2π` at every vertex.
    #[arg(long)]
    pub cone_positivity: bool,
    /// Violations listed per check.
    #[arg(long, default_value_t = circlepat::kat::DEFAULT_MAX_LISTED)]
    pub max_listed: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    pub file: PathBuf,
    /// Target curvature file or constant, on base vertices.
    #[arg(long = "K", value_name = "K", allow_hyphen_values = true)]
    pub k: String,
    #[arg(long, default_value = "euclidean")]
    pub bg: Background,
    #[arg(long, default_value = "newton")]
    pub method: Method,
    /// Seed for the perturbed start of cover solves.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Pre-check on and also solve over a cover: `auto` or a voltage file.
    #[arg(long)]
    pub cover: Option<String>,
    #[arg(long, default_value_t = 31)]
    pub p_max: u32,
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    /// Iteration budget (default 200 for newton, 10^6 for flow).
    #[arg(long)]
    pub max_iter: Option<usize>,
    /// Starting radii, file or constant (default 1).
    #[arg(long)]
    pub init: Option<String>,
    /// Do not fall back to the flow when Newton stalls.
    #[arg(long)]
    pub no_fallback: bool,
    /// Report path (stdout when omitted).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Radii output file (default: the report path with extension `.radii`).
    #[arg(long)]
    pub radii_out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct RenderArgs {
    #[arg(allow_negative_numbers = true)]
    pub r_i: f64,
    #[arg(allow_negative_numbers = true)]
    pub r_j: f64,
    #[arg(allow_negative_numbers = true)]
    pub r_k: f64,
    /// Angle on the edge opposite circle i.
    #[arg(allow_negative_numbers = true)]
    pub phi_i: f64,
    #[arg(allow_negative_numbers = true)]
    pub phi_j: f64,
    #[arg(allow_negative_numbers = true)]
    pub phi_k: f64,
    #[arg(long)]
    pub out: PathBuf,
    /// Report path (stdout when omitted).
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Serialize)]
struct ErrorReport<'a> {
    invocation: output::Invocation,
    error: &'a CliError,
}

fn report_path(cmd: &Command) -> Option<&std::path::Path> {
    match cmd {
        Command::Validate(a) => a.out.as_deref(),
        Command::Cover(a) => a.report.as_deref(),
        Command::Curvature(a) => a.out.as_deref(),
        Command::Kat(a) => a.out.as_deref(),
        Command::Solve(a) => a.out.as_deref(),
        Command::RenderTriple(a) => a.report.as_deref(),
    }
}

/// Runs one command line and returns the process exit code.
pub fn run(argv: Vec<String>) -> i32 {
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { exit::IO } else { exit::OK };
            let _ = e.print();
            return code;
        }
    };
    let inv = output::Invocation::new(&argv);
    match commands::dispatch(&cli.command, &inv) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            let doc = ErrorReport {
                invocation: inv,
                error: &err,
            };
            if output::emit(report_path(&cli.command), &doc).is_err() {
                print!("{}", output::to_json(&doc));
            }
            err.exit_code
        }
    }
}
