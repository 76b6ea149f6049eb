use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Svg,
    Both,
}

impl Format {
    pub fn json(self) -> bool {
        matches!(self, Format::Json | Format::Both)
    }

    pub fn svg(self) -> bool {
        matches!(self, Format::Svg | Format::Both)
    }
}

/// Flags shared by every subcommand. Precedence: flag, then `PILLOW_*`
/// environment variable, then the default.
#[derive(Debug, Clone, Args)]
pub struct Global {
    /// Seed for every multistart stream.
    #[arg(long, global = true, env = "PILLOW_SEED", default_value_t = 0)]
    pub seed: u64,
    /// Newton tolerance on relator residuals.
    #[arg(long, global = true, env = "PILLOW_TOL", default_value_t = 1e-10)]
    pub tol: f64,
    /// Meridian-angle grid step in radians.
    #[arg(long, global = true, env = "PILLOW_STEP", default_value_t = 0.005)]
    pub step: f64,
    /// Output directory for artifacts.
    #[arg(long, global = true, env = "PILLOW_OUT", default_value = "out")]
    pub out: PathBuf,
    /// Which artifacts to write.
    #[arg(long, global = true, env = "PILLOW_FORMAT", value_enum, default_value_t = Format::Both)]
    pub format: Format,
}

#[derive(Debug, Parser)]
#[command(name = "pillowcase", version, about = "SU(2) representation varieties of knot exteriors in the pillowcase")]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Trace the pillowcase image of a knot's representation variety.
    Charvar {
        /// trefoil, unknot, torus:p,q or a presentation JSON file.
        #[arg(long)]
        knot: String,
        /// Random restarts per grid point.
        #[arg(long, default_value_t = 64)]
        restarts: usize,
    },
    /// Shearing maps: fit, apply, perturbed critical sets.
    #[command(subcommand)]
    Shear(ShearCommand),
    /// Irreducible representations of the splice of two knot exteriors.
    Splice {
        #[arg(long)]
        left: String,
        #[arg(long)]
        right: String,
        #[arg(long, default_value_t = 64)]
        restarts: usize,
        /// Exit with code 2 when no witness is found.
        #[arg(long)]
        expect_nonempty: bool,
    },
    /// Surgery-triangle calculus.
    #[command(subcommand)]
    Triangle(TriangleCommand),
}

#[derive(Debug, Subcommand)]
pub enum ShearCommand {
    /// Fit a shear program mapping {β = π} onto a target path from P to Q.
    Fit {
        /// Target curve JSON.
        #[arg(long)]
        target: PathBuf,
        /// Maximum number of steps.
        #[arg(long, default_value_t = 40)]
        budget: usize,
        /// Accepted Hausdorff distance to the target.
        #[arg(long, default_value_t = 0.05)]
        distance: f64,
    },
    /// Apply a program to a curve.
    Apply {
        #[arg(long)]
        program: PathBuf,
        #[arg(long)]
        curve: PathBuf,
    },
    /// Representations whose boundary image lies on the sheared line.
    Critical {
        #[arg(long)]
        knot: String,
        /// Program JSON; the empty program when omitted.
        #[arg(long)]
        program: Option<PathBuf>,
        #[arg(long, default_value_t = 64)]
        restarts: usize,
        /// Exit with code 2 when the set is empty.
        #[arg(long)]
        expect_nonempty: bool,
    },
}

#[derive(Debug, Subcommand)]
pub enum TriangleCommand {
    /// Saturate an axiom file and print the derivation.
    Run {
        #[arg(long)]
        axioms: PathBuf,
        /// Slope window [-N, N]; overrides the file.
        #[arg(long)]
        window: Option<i64>,
    },
}
