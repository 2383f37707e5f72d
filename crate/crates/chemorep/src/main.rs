//! Command-line driver: single runs, convergence sweeps and the
//! homogeneous stability study.

use chemorep::config::{parse_config, parse_mesh_list, parse_method, Mode, Overrides};
use chemorep::workflows::dispatch;
use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "chemorep",
    about = "Energy-stable finite-element solver for a chemo-repulsion model \
             with quadratic production"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Single manufactured-solution run on one mesh.
    Run(CommonArgs),
    /// Convergence sweep over a mesh list; writes error/order tables.
    Converge(CommonArgs),
    /// Homogeneous run checking energy decrease and mass conservation.
    Stability(CommonArgs),
}

#[derive(Args)]
struct CommonArgs {
    /// TOML config file; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Mesh subdivisions, e.g. 40 or 40,50,60,70,80.
    #[arg(long)]
    m: Option<String>,
    /// Time step.
    #[arg(long)]
    k: Option<f64>,
    /// Final time (T/k must be an integer).
    #[arg(long = "T")]
    t_final: Option<f64>,
    /// Nonlinear method: picard or newton.
    #[arg(long)]
    method: Option<String>,
    /// Nonlinear stopping tolerance.
    #[arg(long)]
    tol: Option<f64>,
    /// Relative residual for the linear solves.
    #[arg(long)]
    linear_tol: Option<f64>,
    /// Nonlinear iteration cap.
    #[arg(long)]
    max_nl_iter: Option<usize>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Snapshot stride (0 = final state only).
    #[arg(long)]
    snapshots: Option<usize>,
    /// Include the n = 0 record in l-infinity time aggregates.
    #[arg(long)]
    include_step0_linf: Option<bool>,
    /// Include the n = 0 record in l2 time aggregates.
    #[arg(long)]
    include_step0_l2: Option<bool>,
}

fn build_overrides(mode: Mode, args: &CommonArgs) -> chemorep::Result<Overrides> {
    Ok(Overrides {
        mode: Some(mode),
        meshes: match &args.m {
            Some(s) => Some(parse_mesh_list(s)?),
            None => None,
        },
        k: args.k,
        t_final: args.t_final,
        method: match &args.method {
            Some(s) => Some(parse_method(s)?),
            None => None,
        },
        tol: args.tol,
        max_nl_iter: args.max_nl_iter,
        linear_tol: args.linear_tol,
        out_dir: args.out.clone(),
        snapshots: args.snapshots,
        include_step0_linf: args.include_step0_linf,
        include_step0_l2: args.include_step0_l2,
    })
}

fn run() -> chemorep::Result<bool> {
    let cli = Cli::parse();
    let (mode, args) = match &cli.command {
        Command::Run(a) => (Mode::Run, a),
        Command::Converge(a) => (Mode::Converge, a),
        Command::Stability(a) => (Mode::Stability, a),
    };
    let file_text = match &args.config {
        Some(path) => Some(
            std::fs::read_to_string(path).map_err(|e| chemorep::Error::Io {
                path: path.display().to_string(),
                message: e.to_string(),
            })?,
        ),
        None => None,
    };
    let overrides = build_overrides(mode, args)?;
    let config = parse_config(file_text.as_deref(), &overrides)?;
    let mut log = std::io::stdout();
    dispatch(&config, &mut log)
}

fn main() -> ExitCode {
    match run() {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
