use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "mvfrac", version, about = "Matrix-variate fractional integrals: evaluation, sampling, verification")]
pub struct Cli {
    /// key=value file mirroring the flags; flags on the command line win.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,

    /// Write the JSON output here instead of stdout.
    #[arg(long, global = true, value_name = "PATH")]
    pub output: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate one library operation and print a JSON record.
    #[command(subcommand)]
    Eval(EvalCommand),
    /// Run an oracle-comparison suite; exit 1 when it fails.
    Verify(VerifyArgs),
    /// Draw seeded samples as JSON lines.
    Sample(SampleArgs),
}

/// Symmetric matrix input: `--z` inline JSON, `--eigs` for a diagonal matrix,
/// or a `"Z"` entry of `--file`.
#[derive(Debug, Args, Clone, Default)]
pub struct ZArg {
    /// Symmetric matrix as a JSON array of rows.
    #[arg(long, allow_hyphen_values = true)]
    pub z: Option<String>,
    /// Eigenvalues of a diagonal matrix, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub eigs: Option<Vec<f64>>,
    /// JSON object with matrix entries "Z", "A", "B".
    #[arg(long, value_name = "PATH")]
    pub file: Option<PathBuf>,
}

/// The `A` (p x p) and `B` (r x r) of the rectangular transform. Identity when absent.
#[derive(Debug, Args, Clone, Default)]
pub struct RectArg {
    #[arg(long)]
    pub r: usize,
    /// `A` as a JSON array of rows.
    #[arg(long = "amat")]
    pub amat: Option<String>,
    /// `B` as a JSON array of rows.
    #[arg(long = "bmat")]
    pub bmat: Option<String>,
}

#[derive(Debug, Subcommand)]
pub enum EvalCommand {
    /// log Γ_p(α).
    Gamma {
        #[arg(long)]
        p: usize,
        #[arg(long, allow_hyphen_values = true)]
        alpha: f64,
    },
    /// log B_p(α, β).
    Beta {
        #[arg(long)]
        p: usize,
        #[arg(long, allow_hyphen_values = true)]
        alpha: f64,
        #[arg(long, allow_hyphen_values = true)]
        beta: f64,
    },
    /// Generalized Pochhammer symbol (a)_K.
    Pochhammer {
        #[arg(long, allow_hyphen_values = true)]
        a: f64,
        /// Partition, e.g. "2,1".
        #[arg(long)]
        k: String,
    },
    /// Zonal polynomial C_K(Z).
    Zonal {
        #[arg(long)]
        k: String,
        #[command(flatten)]
        z: ZArg,
    },
    /// Truncated pFq(a; b; Z).
    Hyper {
        /// Upper parameters, comma separated.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        num: Vec<f64>,
        /// Lower parameters, comma separated.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        den: Vec<f64>,
        #[arg(long, default_value_t = 25)]
        kmax: usize,
        #[arg(long, default_value_t = 1e-10)]
        tail_tol: f64,
        #[command(flatten)]
        z: ZArg,
    },
    /// Fractional integral of |Z|^η in closed form.
    FracintPower {
        #[arg(long)]
        alpha: f64,
        #[arg(long, allow_hyphen_values = true, default_value_t = 0.0)]
        eta: f64,
        #[command(flatten)]
        rect: RectArg,
        #[command(flatten)]
        z: ZArg,
    },
    /// Fractional integral of C_K(Z) in closed form.
    FracintZonal {
        #[arg(long)]
        alpha: f64,
        #[arg(long)]
        k: String,
        #[command(flatten)]
        rect: RectArg,
        #[command(flatten)]
        z: ZArg,
    },
    /// Gauss-kernel operator applied to |Z|^η.
    Saigo {
        #[arg(long, allow_hyphen_values = true)]
        a: f64,
        #[arg(long, allow_hyphen_values = true)]
        b: f64,
        #[arg(long, allow_hyphen_values = true)]
        c: f64,
        #[arg(long, allow_hyphen_values = true, default_value_t = 0.0)]
        eta: f64,
        #[arg(long)]
        alpha: f64,
        #[arg(long, default_value_t = 25)]
        kmax: usize,
        #[command(flatten)]
        rect: RectArg,
        #[command(flatten)]
        z: ZArg,
    },
    /// |I + (q-1)Z|^{-1/(q-1)} and, with --k, (q-1)^k (1/(q-1))_K.
    Pathway {
        #[arg(long)]
        q: f64,
        #[arg(long)]
        k: Option<String>,
        #[command(flatten)]
        z: ZArg,
    },
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, value_enum)]
    pub suite: SuiteArg,
    #[arg(long)]
    pub samples: Option<u64>,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    #[arg(long)]
    pub p: Option<usize>,
    #[arg(long)]
    pub r1: Option<usize>,
    #[arg(long)]
    pub r2: Option<usize>,
    #[arg(long)]
    pub kmax: Option<usize>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum SuiteArg {
    Euler,
    Binomial,
    Fracpower,
    Fraczonal,
    Saigo,
    Beta,
    Sumdensity,
    Pathway,
}

#[derive(Debug, Args)]
pub struct SampleArgs {
    #[arg(value_enum)]
    pub kind: SampleKind,
    #[arg(long)]
    pub p: usize,
    #[arg(long)]
    pub n: u64,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    /// Shape of the matrix gamma law.
    #[arg(long)]
    pub shape: Option<f64>,
    /// Columns of the rectangular exponential draw.
    #[arg(long)]
    pub r: Option<usize>,
    #[arg(long = "amat")]
    pub amat: Option<String>,
    #[arg(long = "bmat")]
    pub bmat: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SampleKind {
    MatrixGamma,
    RectExponential,
    UniformUnitCone,
}
