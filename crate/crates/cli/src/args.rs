//! Command-line definitions.

use std::path::PathBuf;

use clap::{ArgGroup, Args, Parser, Subcommand};
use nmm_core::{PotentialSpec, C64};
use serde::Serialize;

#[derive(Parser, Debug)]
#[command(name = "nmm", version, about = "Normal matrix model numerics", args_override_self = true)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Polynomial curve from harmonic moments or from map coefficients.
    Curve(CurveArgs),
    /// Orthogonal polynomials, recursion, zeros and density profile.
    Ortho(OrthoArgs),
    /// Metropolis sampling of the eigenvalue gas.
    Gas(GasArgs),
    /// Finite-difference check of a dispersionless Toda flow.
    Toda(TodaArgs),
    /// Exact and sampled level-spacing table for the Gaussian disc.
    Levelspacing(LevelSpacingArgs),
    /// Run the acceptance suite.
    Check(CheckArgs),
}

impl Command {
    pub fn common(&self) -> &Common {
        match self {
            Command::Curve(a) => &a.common,
            Command::Ortho(a) => &a.common,
            Command::Gas(a) => &a.common,
            Command::Toda(a) => &a.common,
            Command::Levelspacing(a) => &a.common,
            Command::Check(a) => &a.common,
        }
    }
}

#[derive(Args, Debug, Serialize)]
pub struct Common {
    /// Output directory, created if missing.
    #[arg(long, default_value = ".")]
    #[serde(skip)]
    pub out: PathBuf,
    /// Flat `key = value` file; flags on the command line take precedence.
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
}

/// Parses `re` or `re,im`.
pub fn parse_complex(s: &str) -> Result<C64, String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let num = |p: &str| p.parse::<f64>().map_err(|e| format!("`{p}`: {e}"));
    let z = match parts.as_slice() {
        [re] => C64::new(num(re)?, 0.0),
        [re, im] => C64::new(num(re)?, num(im)?),
        _ => return Err(format!("expected `re` or `re,im`, got `{s}`")),
    };
    if z.re.is_finite() && z.im.is_finite() {
        Ok(z)
    } else {
        Err(format!("non-finite value `{s}`"))
    }
}

/// Area and exterior harmonic moments `t_1..t_6`.
#[derive(Args, Debug, Serialize)]
pub struct MomentArgs {
    /// Area parameter, the droplet has area `pi t0`.
    #[arg(long)]
    pub t0: f64,
    #[arg(long, value_parser = parse_complex)]
    pub t1: Option<C64>,
    #[arg(long, value_parser = parse_complex)]
    pub t2: Option<C64>,
    #[arg(long, value_parser = parse_complex)]
    pub t3: Option<C64>,
    #[arg(long, value_parser = parse_complex)]
    pub t4: Option<C64>,
    #[arg(long, value_parser = parse_complex)]
    pub t5: Option<C64>,
    #[arg(long, value_parser = parse_complex)]
    pub t6: Option<C64>,
}

impl MomentArgs {
    /// `t[k-1] = t_k`, trailing zeros dropped.
    pub fn harmonics(&self) -> Vec<C64> {
        let mut t: Vec<C64> = [self.t1, self.t2, self.t3, self.t4, self.t5, self.t6]
            .iter()
            .map(|x| x.unwrap_or_default())
            .collect();
        while t.last().is_some_and(|x| x.norm() == 0.0) {
            t.pop();
        }
        t
    }

    pub fn potential(&self, n: usize) -> nmm_core::Result<PotentialSpec> {
        PotentialSpec::new(self.t0, self.harmonics(), n)
    }
}

#[derive(Args, Debug, Serialize)]
#[command(group(ArgGroup::new("source").required(true).args(["from_moments", "from_coeffs"])))]
pub struct CurveArgs {
    /// Moments as `t0=VALUE tK=VALUE ...`; complex values as `re,im`.
    #[arg(long, num_args = 1.., value_name = "KEY=VALUE")]
    pub from_moments: Option<Vec<String>>,
    /// Coefficients as `r=VALUE aJ=VALUE ...`.
    #[arg(long, num_args = 1.., value_name = "KEY=VALUE")]
    pub from_coeffs: Option<Vec<String>>,
    /// Boundary samples written to boundary.csv.
    #[arg(long, default_value_t = 512)]
    pub nodes: usize,
    /// Newton tolerance on the moment mismatch.
    #[arg(long, default_value_t = 1e-13)]
    pub tol: f64,
    #[arg(long, default_value_t = 100)]
    pub max_iter: usize,
    /// Interior moments `v_1..v_K` reported.
    #[arg(long, default_value_t = 5)]
    pub interior: usize,
    /// Accept curves that do not enclose the origin.
    #[arg(long)]
    pub shifted: bool,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug, Serialize)]
pub struct OrthoArgs {
    #[command(flatten)]
    pub moments: MomentArgs,
    /// Matrix size.
    #[arg(long = "N")]
    pub n: usize,
    /// Highest polynomial degree.
    #[arg(long)]
    pub n_max: usize,
    /// Radial quadrature nodes.
    #[arg(long, default_value_t = 200)]
    pub n_r: usize,
    /// Angular nodes; defaults to a size set by `n_max`.
    #[arg(long)]
    pub n_theta: Option<usize>,
    /// Disc cut-off radius; defaults to one set by the potential and `n_max`.
    #[arg(long)]
    pub cutoff: Option<f64>,
    /// Degrees whose zeros are written, comma separated; defaults to `n_max`.
    #[arg(long, value_delimiter = ',')]
    pub zeros: Vec<usize>,
    /// Samples of the density profile along the real axis.
    #[arg(long, default_value_t = 201)]
    pub profile_points: usize,
    /// Orthogonalise across all degrees even when the potential has a rotation symmetry.
    #[arg(long)]
    pub no_symmetry: bool,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug, Serialize)]
pub struct GasArgs {
    #[command(flatten)]
    pub moments: MomentArgs,
    /// Number of eigenvalues.
    #[arg(long = "N")]
    pub n: usize,
    /// Total sweeps including burn-in.
    #[arg(long)]
    pub steps: usize,
    /// Burn-in sweeps; defaults to `steps / 10`.
    #[arg(long)]
    pub burn_in: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Initial proposal scale; defaults to `0.5 sqrt(t0 / N)`.
    #[arg(long)]
    pub scale: Option<f64>,
    /// Cut-off radius; defaults to `max(6 sqrt(t0), 3 * outer radius)`.
    #[arg(long)]
    pub cutoff: Option<f64>,
    /// Histogram bins per axis.
    #[arg(long, default_value_t = 200)]
    pub bins: usize,
    /// Batches for the standard errors.
    #[arg(long, default_value_t = 50)]
    pub batches: usize,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug, Serialize)]
pub struct TodaArgs {
    #[command(flatten)]
    pub moments: MomentArgs,
    /// Flow index `k`.
    #[arg(long)]
    pub flow: usize,
    /// Finite-difference step; defaults to `1e-4 max(1, |t_k|)`.
    #[arg(long)]
    pub epsilon: Option<f64>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug, Serialize)]
pub struct LevelSpacingArgs {
    #[arg(long)]
    pub t0: f64,
    #[arg(long = "N")]
    pub n: usize,
    /// The disc has radius `sqrt(x / N)`.
    #[arg(long)]
    pub x: f64,
    /// Sweeps per chain for a Monte Carlo comparison; 0 skips it.
    #[arg(long, default_value_t = 0)]
    pub mc_steps: usize,
    #[arg(long, default_value_t = 4)]
    pub chains: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug, Serialize)]
pub struct CheckArgs {
    /// Criteria to run, comma separated; all by default.
    #[arg(long, value_delimiter = ',')]
    pub only: Vec<usize>,
    #[command(flatten)]
    pub common: Common,
}
