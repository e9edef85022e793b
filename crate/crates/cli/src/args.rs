use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "eikinetic", version, about = "Kinetic-formulation checks for unit-norm gradient fields")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Sample a ground-truth field and write it as VFLD.
    Generate(GenerateArgs),
    /// Distributional kinetic residuals over a direction set.
    Residual(ResidualArgs),
    /// Planar kinetic residuals with the tangent xi-perp.
    Residual2d(ResidualArgs),
    /// Residuals over equatorial directions only (xi_N = 0).
    Weak(ResidualArgs),
    /// Constant / vortex classification through characteristic lines.
    Classify(ClassifyArgs),
    /// Cross-sectional trace of a field on a segment.
    Trace(TraceArgs),
    /// Umbilicity of a level set of a scalar field.
    Umbilic(UmbilicArgs),
    /// Degree of a unit field on a circle or sphere.
    Degree(DegreeArgs),
    /// Line energy of a field, or a sweep over regularized vortices (CSV).
    Energy(EnergyArgs),
    /// Sharp and smoothed entropy residuals of a planar field.
    Entropy(EntropyArgs),
    /// Curl symmetry, reduction to N-1 dimensions and the stream-form check.
    Reduce(ReduceArgs),
    /// Bundle the JSON results of a directory into one summary.
    Report(ReportArgs),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Kind {
    Vortex,
    Constant,
    Rotational,
    VortexLine,
    CircleGradient,
    RegularizedVortex,
    /// Fast-marched distance to a point (scalar).
    Distance,
    /// Signed distance to an axis-aligned ellipsoid (scalar).
    Ellipsoid,
    /// Fast-marched distance to a parabola arc (2D scalar).
    Parabola,
    /// Fast-marched distance to a circle (2D scalar).
    Circle,
}

#[derive(Args, Debug, Clone)]
pub struct GridArgs {
    #[arg(long, default_value_t = 2)]
    pub dim: usize,
    /// Nodes per axis: one value for all axes or one per axis.
    #[arg(long, value_delimiter = ',', default_value = "64")]
    pub shape: Vec<usize>,
    /// Box lower corner per axis (or one value); defaults depend on the kind.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub lo: Option<Vec<f64>>,
    /// Box upper corner per axis (or one value).
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub hi: Option<Vec<f64>>,
}

#[derive(Args, Debug, Clone, Default)]
pub struct PlotArgs {
    /// Write an SVG plot (heatmap plus quiver for vector fields).
    #[arg(long)]
    pub svg: Option<PathBuf>,
    /// Slice for N >= 3 plots, as `axis=value`.
    #[arg(long)]
    pub slice: Option<String>,
}

#[derive(Args, Debug)]
pub struct GenerateArgs {
    #[arg(long, value_enum)]
    pub kind: Kind,
    #[command(flatten)]
    pub grid: GridArgs,
    /// Center, seed point or axis point.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub center: Option<Vec<f64>>,
    #[arg(long, default_value_t = 1, allow_hyphen_values = true)]
    pub sign: i32,
    /// Direction of the constant field (normalized).
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub w: Option<Vec<f64>>,
    /// Circle radius, or disk radius of the regularized vortex.
    #[arg(long, default_value_t = 0.5)]
    pub radius: f64,
    #[arg(long, value_delimiter = ',')]
    pub axes: Option<Vec<f64>>,
    /// Core scale of the regularized vortex.
    #[arg(long, default_value_t = 0.1)]
    pub eps: f64,
    /// Exact-distance band around curves before fast marching.
    #[arg(long, default_value_t = 0.3)]
    pub band: f64,
    #[arg(long, short)]
    pub out: PathBuf,
    #[command(flatten)]
    pub plot: PlotArgs,
}

#[derive(Args, Debug, Clone)]
pub struct InputArgs {
    pub input: PathBuf,
    /// Field name inside the VFLD file.
    #[arg(long)]
    pub field: Option<String>,
    /// Write the JSON result here instead of stdout.
    #[arg(long)]
    pub json: Option<PathBuf>,
    #[command(flatten)]
    pub plot: PlotArgs,
}

#[derive(Args, Debug, Clone)]
pub struct DirectionArgs {
    /// Number of directions; defaults to 64 (2D), 200 (3D), 1000 (4D).
    #[arg(long)]
    pub count: Option<usize>,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
}

#[derive(Args, Debug)]
pub struct ResidualArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub directions: DirectionArgs,
    /// Single direction instead of a direction set (normalized).
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub xi: Option<Vec<f64>>,
    /// Tangents per direction; defaults to N-1.
    #[arg(long)]
    pub tangents: Option<usize>,
    #[arg(long, default_value_t = 20)]
    pub phi_count: usize,
    #[arg(long, default_value_t = 0.3)]
    pub phi_radius: f64,
}

#[derive(Args, Debug)]
pub struct ClassifyArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[arg(long, default_value_t = 200)]
    pub samples: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, default_value_t = 1e-6)]
    pub tol: f64,
}

#[derive(Args, Debug)]
pub struct TraceArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub a: Vec<f64>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub b: Vec<f64>,
    /// Radii in grid units; defaults to 8,4.
    #[arg(long, value_delimiter = ',')]
    pub radii: Option<Vec<f64>>,
    #[arg(long, default_value_t = 0.1)]
    pub tol: f64,
}

#[derive(Args, Debug)]
pub struct UmbilicArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[arg(long, allow_hyphen_values = true)]
    pub alpha: f64,
    #[arg(long, default_value_t = 200)]
    pub samples: usize,
    #[arg(long, default_value_t = 0.02)]
    pub tol: f64,
}

#[derive(Args, Debug)]
pub struct DegreeArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub center: Option<Vec<f64>>,
    #[arg(long, default_value_t = 0.5)]
    pub radius: f64,
}

#[derive(Args, Debug)]
pub struct EnergyArgs {
    /// Field to evaluate; without it, sweep regularized vortices.
    pub input: Option<PathBuf>,
    #[arg(long)]
    pub field: Option<String>,
    #[arg(long, value_delimiter = ',', default_value = "0.2,0.1,0.05")]
    pub eps: Vec<f64>,
    /// Nodes per axis of the sweep grid on [-1,1]^2.
    #[arg(long, default_value_t = 257)]
    pub shape: usize,
    #[arg(long, default_value_t = 1.0)]
    pub disk_radius: f64,
    /// Write CSV here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct EntropyArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, default_value = "1,0")]
    pub xi: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_value = "4,8,16")]
    pub k: Vec<f64>,
    #[arg(long, default_value_t = 20)]
    pub phi_count: usize,
    #[arg(long, default_value_t = 0.2)]
    pub phi_radius: f64,
}

#[derive(Args, Debug)]
pub struct ReduceArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[arg(long, default_value_t = 1e-6)]
    pub floor: f64,
    #[arg(long, default_value_t = 1e-6)]
    pub tol: f64,
    /// Also write the reduced field as VFLD.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct ReportArgs {
    pub dir: PathBuf,
    /// Run the built-in battery into `dir` first.
    #[arg(long)]
    pub battery: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}
