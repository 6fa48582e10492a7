use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "conproj",
    version,
    about = "Conic projections and regularization methods for SDP"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// More log output on stderr (repeatable).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    pub verbose: u8,

    /// Only print errors.
    #[arg(short, long, global = true, conflicts_with = "verbose")]
    pub quiet: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Project a point onto the feasible set of an SDPA or native JSON problem.
    Project(ProjectArgs),
    /// Solve a linear conic program given as SDPA or native JSON.
    Solve(SolveArgs),
    /// Nearest correlation matrix of a dense matrix file.
    Nearcorr(NearcorrArgs),
    /// Check whether a polynomial is a sum of squares.
    SosCheck(SosCheckArgs),
    /// Lower bound on the global minimum of a polynomial.
    Polymin(PolyminArgs),
    /// Lovász theta number of a DIMACS graph.
    Theta(ThetaArgs),
    /// Write random or named instances.
    Gen(GenArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ProjSolver {
    Dykstra,
    Admm,
    Alternating,
    FixedMetric,
    QuasiNewton,
    Ssnewton,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ConicSolver {
    /// One fixed-metric step per outer iteration.
    Simple,
    FixedMetric,
    QuasiNewton,
    Ssnewton,
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Stopping tolerance (solver-specific default).
    #[arg(long, value_parser = positive_f64)]
    pub tol: Option<f64>,

    /// Iteration cap (outer iterations for the conic solvers).
    #[arg(long)]
    pub max_iter: Option<usize>,

    /// Recorded in the report; used by `gen`.
    #[arg(long)]
    pub seed: Option<u64>,

    /// Write the JSON report here instead of stdout.
    #[arg(long, short)]
    pub out: Option<PathBuf>,

    /// Write the computed solution to this file.
    #[arg(long)]
    pub solution: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct ConicOpts {
    #[arg(long, value_enum, default_value_t = ConicSolver::Simple)]
    pub solver: ConicSolver,

    /// Initial prox parameter.
    #[arg(long, default_value_t = 1.0, value_parser = positive_f64)]
    pub t0: f64,

    /// Rebalance the prox parameter from the residual ratio.
    #[arg(long)]
    pub balance: bool,
}

#[derive(Debug, Clone, Args)]
pub struct ProjectArgs {
    /// `.dat-s` or `.json` problem.
    pub problem: PathBuf,

    /// Point to project, whitespace separated in ambient order; defaults
    /// to the problem's objective vector.
    #[arg(long)]
    pub center: Option<PathBuf>,

    #[arg(long, value_enum, default_value_t = ProjSolver::QuasiNewton)]
    pub solver: ProjSolver,

    /// Penalty of the alternating direction method.
    #[arg(long, default_value_t = 1.0, value_parser = positive_f64)]
    pub beta: f64,

    /// Mirror lower-triangle SDPA entries instead of rejecting them.
    #[arg(long)]
    pub lenient: bool,

    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Args)]
pub struct SolveArgs {
    pub problem: PathBuf,

    #[arg(long)]
    pub lenient: bool,

    #[command(flatten)]
    pub conic: ConicOpts,

    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Args)]
pub struct NearcorrArgs {
    /// Dense matrix, one row per line.
    pub matrix: PathBuf,

    #[arg(long, value_enum, default_value_t = ProjSolver::Ssnewton)]
    pub solver: ProjSolver,

    #[arg(long, default_value_t = 1.0, value_parser = positive_f64)]
    pub beta: f64,

    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Args)]
pub struct SosCheckArgs {
    /// Polynomial text file.
    pub polynomial: PathBuf,

    /// Degree of the monomial basis; defaults to half the polynomial degree.
    #[arg(long)]
    pub degree: Option<u32>,

    #[command(flatten)]
    pub conic: ConicOpts,

    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Args)]
pub struct PolyminArgs {
    pub polynomial: PathBuf,

    #[command(flatten)]
    pub conic: ConicOpts,

    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Args)]
pub struct ThetaArgs {
    /// DIMACS `.col` edge file.
    pub graph: PathBuf,

    #[command(flatten)]
    pub conic: ConicOpts,

    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GenKind {
    /// SOS feasibility problem with a planted Gram matrix (SDPA).
    Sos,
    /// Random coercive polynomial (polynomial text).
    Polymin,
    /// The structured test polynomial (polynomial text).
    Structured,
    Motzkin,
    /// Unit-diagonal indefinite matrix (dense matrix).
    Nearcorr,
    /// G(n, p) random graph (DIMACS).
    Graph,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Rank {
    Full,
    One,
}

#[derive(Debug, Clone, Args)]
pub struct GenArgs {
    #[arg(value_enum)]
    pub kind: GenKind,

    #[arg(long, default_value_t = 3)]
    pub nvars: usize,

    #[arg(long, default_value_t = 2)]
    pub degree: u32,

    #[arg(long, value_enum, default_value_t = Rank::Full)]
    pub rank: Rank,

    /// Matrix dimension or vertex count.
    #[arg(long, default_value_t = 10)]
    pub n: usize,

    /// Edge probability.
    #[arg(long, default_value_t = 0.5)]
    pub prob: f64,

    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    /// Number of instances; instance `i` uses seed `seed + i`. With more
    /// than one, `--out` names a directory.
    #[arg(long, default_value_t = 1)]
    pub count: usize,

    /// Output file (or directory for batches); stdout when omitted.
    #[arg(long, short)]
    pub out: Option<PathBuf>,
}

fn positive_f64(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(format!("must be a positive number, got {s}"))
    }
}
