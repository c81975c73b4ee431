//! Command-line front end: `pwls <subcommand> [flags]`.
//!
//! Machine-readable output goes to stdout, diagnostics to stderr.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use pwls::boussinesq::WarmStart;
use pwls::generators::GenKind;
use pwls::Method;

#[derive(Debug, Parser)]
#[command(
    name = "pwls",
    version,
    about = "Solvers for the piecewise linear system x⁺ + Tx = b"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Solve a system and print the report as JSON.
    Solve(SolveArgs),
    /// Report structural properties of T (symmetry, definiteness, dominance).
    Analyze(AnalyzeArgs),
    /// Convert between PWLS, absolute value equation and QP forms.
    Transform(TransformArgs),
    /// Write a generated or built-in instance as a problem bundle.
    Generate(GenerateArgs),
    /// Time all methods on a grid of generated problems.
    Bench(BenchArgs),
    /// Simulate the drained aquifer day by day.
    Boussinesq(BoussinesqArgs),
}

/// A problem given either by a manifest or by a matrix and a right-hand side.
#[derive(Debug, Args)]
struct Input {
    /// Bundle manifest (manifest.json).
    #[arg(long, conflicts_with_all = ["matrix", "rhs"], required_unless_present = "matrix")]
    manifest: Option<PathBuf>,
    /// Matrix Market file holding T.
    #[arg(long, requires = "rhs")]
    matrix: Option<PathBuf>,
    /// Matrix Market or plain-text file holding b.
    #[arg(long, requires = "matrix")]
    rhs: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SolverFlags {
    #[arg(long, default_value = "newton")]
    method: Method,
    /// Stop once ‖F(x)‖₂ is at or below this.
    #[arg(long, default_value_t = 1e-5)]
    tol: f64,
    #[arg(long = "max-iter", default_value_t = 1000)]
    max_iter: usize,
}

#[derive(Debug, Args)]
struct SolveArgs {
    #[command(flatten)]
    input: Input,
    #[command(flatten)]
    solver: SolverFlags,
    /// Starting point; defaults to zero.
    #[arg(long)]
    x0: Option<PathBuf>,
    /// Record the sign pattern of every iterate.
    #[arg(long)]
    trace: bool,
    /// Also write the report to this file.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct AnalyzeArgs {
    #[command(flatten)]
    input: Input,
    /// Enumerate all solutions by orthant search (n ≤ 20).
    #[arg(long = "brute-force")]
    brute_force: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Conversion {
    /// PWLS (T, b) to AVE (−2T − I, −2b).
    PwlsToAve,
    /// AVE (T̂, b̂) back to PWLS.
    AveToPwls,
    /// QP (Q, q) with x ≥ 0 to PWLS ((Q − I)⁻¹, −(Q − I)⁻¹q).
    QpToPwls,
}

#[derive(Debug, Args)]
struct TransformArgs {
    #[command(flatten)]
    input: Input,
    #[arg(long, value_enum)]
    to: Conversion,
    /// Output bundle directory.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct GenerateArgs {
    #[arg(long, required_unless_present = "canonical")]
    kind: Option<GenKind>,
    #[arg(long, required_unless_present = "canonical")]
    n: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Off-diagonal fill fraction (sparse only).
    #[arg(long)]
    density: Option<f64>,
    /// Built-in instance: spd_3cycle or diagdom_nosolution.
    #[arg(long, conflicts_with_all = ["kind", "n", "density"])]
    canonical: Option<String>,
    /// Output bundle directory.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct BenchArgs {
    /// Grid spec as JSON ({"kind", "n", "count", "seed", ...}); replaces
    /// --kind, --n, --count, --seed and --density.
    #[arg(long, conflicts_with_all = ["kind", "n", "count", "seed", "density"])]
    grid: Option<PathBuf>,
    #[arg(long, default_value = "sparse")]
    kind: GenKind,
    #[arg(long, default_value_t = 1000)]
    n: usize,
    /// Number of problems, with seeds seed, seed+1, ….
    #[arg(long, default_value_t = 10)]
    count: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    density: Option<f64>,
    /// Comma-separated methods; all by default.
    #[arg(long, value_delimiter = ',')]
    methods: Vec<Method>,
    #[arg(long, default_value_t = 1e-5)]
    tol: f64,
    #[arg(long = "max-iter", default_value_t = 1000)]
    max_iter: usize,
    /// Timed solves per (problem, method); the median is kept.
    #[arg(long, default_value_t = 3)]
    repeats: usize,
    /// Worker threads; 0 uses all cores.
    #[arg(long, default_value_t = 0)]
    jobs: usize,
    /// Directory for records.csv and profile.csv.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct BoussinesqArgs {
    /// Half grid size; the grid has (2N+1)² nodes.
    #[arg(long = "N", default_value_t = 25)]
    n_half: usize,
    #[arg(long, default_value_t = 7)]
    days: usize,
    #[arg(long, default_value = "newton")]
    method: Method,
    /// previous-day or refine:<levels.json from a run at N/2>.
    #[arg(long = "warm-start", default_value = "previous-day")]
    warm_start: WarmStart,
    #[arg(long, default_value_t = 1e-5)]
    tol: f64,
    /// The splitting methods need tens of thousands of sweeps per day.
    #[arg(long = "max-iter", default_value_t = 1_000_000)]
    max_iter: usize,
    /// Directory for days.json, levels.json and profile.csv.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let outcome = match cli.command {
        Command::Solve(a) => commands::solve(a),
        Command::Analyze(a) => commands::analyze(a),
        Command::Transform(a) => commands::transform(a),
        Command::Generate(a) => commands::generate(a),
        Command::Bench(a) => commands::bench(a),
        Command::Boussinesq(a) => commands::boussinesq(a),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
