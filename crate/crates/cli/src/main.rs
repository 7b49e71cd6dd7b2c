mod artifacts;
mod commands;
mod failure;
mod svg;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

/// Rotation sets, entropy functions and periodic-orbit growth for
/// vector-valued potentials on subshifts of finite type.
#[derive(Debug, Parser, Serialize)]
#[command(name = "rotset", version)]
pub struct Cli {
    /// Directory for artifacts and manifest.json. Without it results go to
    /// stdout only.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args, Serialize)]
pub struct Inputs {
    /// System spec JSON file.
    #[arg(long)]
    pub system: PathBuf,
    /// Potential spec JSON file.
    #[arg(long)]
    pub potential: PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct Newton {
    /// Gradient residual at which Newton stops.
    #[arg(long, default_value_t = 1e-11)]
    pub tol: f64,
    #[arg(long, default_value_t = 200)]
    pub max_iter: usize,
    /// Required distance from the target to the polytope boundary.
    #[arg(long, default_value_t = 1e-9)]
    pub margin: f64,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Auto,
    Enumerate,
    Dp,
}

#[derive(Debug, Args, Serialize)]
pub struct Counting {
    #[arg(long, value_enum, default_value_t = Mode::Auto)]
    pub mode: Mode,
    /// DP grid step (default: the coarsest 1/L, L <= 64, fitting the table).
    #[arg(long)]
    pub q: Option<f64>,
    #[arg(long, default_value_t = 100_000_000)]
    pub enum_budget: u128,
    #[arg(long, default_value_t = 2_000_000_000)]
    pub dp_budget: u128,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Estimator {
    Per,
    Word,
    Both,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PerorbitCommand {
    /// Histogram of rotation vectors of the fixed points of the n-th power.
    Census {
        #[command(flatten)]
        inputs: Inputs,
        #[arg(long)]
        n: usize,
        /// Bin width is `--q` (default 0.25); DP mode also uses it as the grid step.
        #[command(flatten)]
        counting: Counting,
    },
    /// Periodic points with rotation vector in an open ball, for each n.
    Ball {
        #[command(flatten)]
        inputs: Inputs,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        w: Vec<f64>,
        #[arg(long)]
        r: f64,
        /// Periods, comma separated.
        #[arg(long, value_delimiter = ',', required = true)]
        n: Vec<usize>,
        #[command(flatten)]
        counting: Counting,
    },
    /// Exponential growth rate of the ball counts over n = 1..=n-max.
    Growth {
        #[command(flatten)]
        inputs: Inputs,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        w: Vec<f64>,
        #[arg(long)]
        r: f64,
        #[arg(long, default_value_t = 22)]
        n_max: usize,
        #[arg(long, value_enum, default_value_t = Estimator::Both)]
        estimator: Estimator,
        #[command(flatten)]
        counting: Counting,
    },
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum GalleryCommand {
    /// The run-length gallery system on d symbols.
    Example2 {
        /// JSON file with the full parameter set; flags override it.
        #[arg(long)]
        spec: Option<PathBuf>,
        #[arg(long)]
        d: Option<usize>,
        #[arg(long = "K")]
        depth: Option<usize>,
        #[arg(long)]
        alpha: Option<usize>,
        #[arg(long)]
        rho: Option<f64>,
        /// Level curves to overlay, as norms of T.
        #[arg(long = "R", value_delimiter = ',', default_values_t = vec![1.0, 2.0, 4.0])]
        radii: Vec<f64>,
        #[arg(long, default_value_t = 128)]
        samples: usize,
        /// Sampled prefix pairs for the Lipschitz check (needs --seed).
        #[arg(long, default_value_t = 0, requires = "seed")]
        lipschitz_pairs: usize,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value_t = 20)]
        max_period: usize,
    },
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    /// Vertices of the rotation set (CSV, one vertex per line).
    Rotset {
        #[command(flatten)]
        inputs: Inputs,
        /// Simple-cycle cap before switching to support queries.
        #[arg(long, default_value_t = 1_000_000)]
        cycle_cap: usize,
        /// Initial direction count for support queries.
        #[arg(long, default_value_t = 64)]
        directions: usize,
    },
    /// Support function with a witness periodic orbit.
    Support {
        #[command(flatten)]
        inputs: Inputs,
        /// Direction; repeat the flag for several.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, num_args = 1, action = clap::ArgAction::Append)]
        u: Vec<f64>,
        /// Evenly spread directions instead of --u.
        #[arg(long, conflicts_with = "u")]
        grid: Option<usize>,
    },
    /// Pressure Q(T), its gradient and optionally its Hessian.
    Pressure {
        #[command(flatten)]
        inputs: Inputs,
        #[arg(long = "T", value_delimiter = ',', allow_hyphen_values = true, required = true)]
        t: Vec<f64>,
        #[arg(long)]
        hessian: bool,
    },
    /// Entropy H(w) of a rotation vector.
    Entropy {
        #[command(flatten)]
        inputs: Inputs,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        w: Vec<f64>,
        #[command(flatten)]
        newton: Newton,
    },
    /// H on a grid of interior points.
    Profile {
        #[command(flatten)]
        inputs: Inputs,
        /// Points per axis across the bounding box of the rotation set.
        #[arg(long, default_value_t = 21)]
        grid: usize,
        #[command(flatten)]
        newton: Newton,
    },
    /// Level curves {grad Q(T) : |T| = R}.
    Levels {
        #[command(flatten)]
        inputs: Inputs,
        #[arg(long = "R", value_delimiter = ',', required = true)]
        radii: Vec<f64>,
        #[arg(long, default_value_t = 128)]
        samples: usize,
    },
    /// Periodic-orbit counts and growth rates.
    #[command(subcommand)]
    Perorbit(PerorbitCommand),
    /// Staged planar construction for a convex target.
    Construct {
        /// Boundary spec JSON file.
        #[arg(long)]
        boundary: PathBuf,
        #[arg(long, default_value_t = 2)]
        stages: usize,
    },
    /// Gallery systems.
    #[command(subcommand)]
    Gallery(GalleryCommand),
    /// Runs the acceptance criteria and prints a pass/fail table.
    Verify {
        /// Smaller trial counts and a shallower gallery.
        #[arg(long)]
        quick: bool,
        /// Criteria to run, comma separated (default: all).
        #[arg(long, value_delimiter = ',')]
        only: Vec<usize>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let f = failure::describe(&e);
            let json = serde_json::to_string(&f).unwrap_or_else(|_| f.to_string());
            eprintln!("{json}");
            if let Some(dir) = &cli.out {
                let _ = std::fs::create_dir_all(dir);
                let _ = std::fs::write(dir.join("error.json"), format!("{json}\n"));
            }
            ExitCode::from(1)
        }
    }
}
