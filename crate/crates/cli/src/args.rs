use clap::{Args, Parser, Subcommand, ValueEnum};

/// Seed used by the oracles when neither `--seed` nor `TMOMENT_SEED` is given.
pub const DEFAULT_SEED: u64 = 20_240_917;

#[derive(Debug, Parser)]
#[command(name = "tmoment", version, about = "Moments of generalized Student's t-distributions")]
pub struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    pub format: Format,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Plain,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Moment of the 1-D generalized t.
    #[command(name = "one-d")]
    OneD(OneDArgs),
    /// Mixed moment of the n-D generalized t.
    Multi(MultiArgs),
    /// Un-normalized moment over a rectangle.
    Truncated(TruncArgs),
    /// Formula value next to an independent numerical estimate.
    Oracle {
        #[command(subcommand)]
        target: Target,
    },
    /// Formula against oracle with a pass/fail verdict (exit 1 on failure).
    Verify {
        #[command(subcommand)]
        target: Target,
    },
    /// Print the JSON schema of the response document.
    Schema,
}

#[derive(Debug, Subcommand)]
pub enum Target {
    #[command(name = "one-d")]
    OneD {
        #[command(flatten)]
        args: OneDArgs,
        #[command(flatten)]
        oracle: OracleArgs,
    },
    Multi {
        #[command(flatten)]
        args: MultiArgs,
        #[command(flatten)]
        oracle: OracleArgs,
    },
    Truncated {
        #[command(flatten)]
        args: TruncArgs,
        #[command(flatten)]
        oracle: OracleArgs,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Kind {
    Raw,
    Central,
    Abs,
    CentralAbs,
}

impl From<Kind> for tmoment::MomentKind {
    fn from(k: Kind) -> Self {
        match k {
            Kind::Raw => tmoment::MomentKind::Raw,
            Kind::Central => tmoment::MomentKind::Central,
            Kind::Abs => tmoment::MomentKind::Abs,
            Kind::CentralAbs => tmoment::MomentKind::CentralAbs,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Corrected,
    Literal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Convention {
    /// The matrix enters the quadratic form directly.
    Precision,
    /// Covariance-like scale matrix; its inverse is used as the precision.
    Scale,
}

#[derive(Debug, Clone, Args)]
pub struct OneDArgs {
    #[arg(long, value_enum, default_value_t = Kind::Raw)]
    pub kind: Kind,
    /// Moment order: a nonnegative integer, or a real number with `--real-order`.
    #[arg(long)]
    pub k: String,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub mu: f64,
    /// Precision-like parameter (larger is tighter).
    #[arg(long, conflicts_with = "scale", allow_negative_numbers = true)]
    pub sigma: Option<f64>,
    /// Conventional scale `s`; converted to `sigma = 1/s²`.
    #[arg(long, allow_negative_numbers = true)]
    pub scale: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub nu: f64,
    /// Accept a real order for the absolute kinds.
    #[arg(long)]
    pub real_order: bool,
}

#[derive(Debug, Clone, Args)]
pub struct MatrixArgs {
    /// Comma-separated location vector (defaults to zeros).
    #[arg(long, allow_hyphen_values = true)]
    pub mu: Option<String>,
    /// `identity` or a JSON array of rows.
    #[arg(long, conflicts_with = "sigma_file")]
    pub sigma_mat: Option<String>,
    /// File holding the matrix as a JSON array of rows.
    #[arg(long)]
    pub sigma_file: Option<std::path::PathBuf>,
    #[arg(long, value_enum, default_value_t = Convention::Precision)]
    pub matrix_convention: Convention,
    #[arg(long, allow_negative_numbers = true)]
    pub nu: f64,
}

#[derive(Debug, Clone, Args)]
pub struct MultiArgs {
    #[arg(long, value_enum, default_value_t = Kind::Raw)]
    pub kind: Kind,
    /// Comma-separated exponents, one per coordinate.
    #[arg(long)]
    pub k: String,
    #[command(flatten)]
    pub params: MatrixArgs,
    #[arg(long, value_enum, default_value_t = ModeArg::Corrected)]
    pub mode: ModeArg,
}

#[derive(Debug, Clone, Args)]
pub struct TruncArgs {
    /// Comma-separated exponents, one per coordinate.
    #[arg(long)]
    pub k: String,
    #[command(flatten)]
    pub params: MatrixArgs,
    /// Comma-separated lower bounds; `-inf` allowed. Defaults to all `-inf`.
    #[arg(long, allow_hyphen_values = true)]
    pub lower: Option<String>,
    /// Comma-separated upper bounds; `inf` allowed. Defaults to all `inf`.
    #[arg(long, allow_hyphen_values = true)]
    pub upper: Option<String>,
    #[arg(long, value_enum, default_value_t = ModeArg::Corrected)]
    pub mode: ModeArg,
}

#[derive(Debug, Clone, Args)]
pub struct OracleArgs {
    /// Monte Carlo draws.
    #[arg(long, default_value_t = 1_000_000)]
    pub samples: usize,
    #[arg(long, env = "TMOMENT_SEED", default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Quadrature error target (absolute and relative).
    #[arg(long, default_value_t = 1e-12)]
    pub tol: f64,
    /// Relative pass threshold for quadrature comparisons. Defaults to 1e-9,
    /// or 1e-7 for truncated moments.
    #[arg(long)]
    pub rtol: Option<f64>,
    /// Pass threshold for Monte Carlo comparisons, in standard errors.
    #[arg(long, default_value_t = 4.0)]
    pub n_se: f64,
}
