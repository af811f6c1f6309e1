//! `graphnls`: ground states, Gagliardo-Nirenberg constants and critical
//! thresholds on periodic metric graphs from the command line.

mod commands;
mod svg;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use graphnls_core::graph::BoundaryCondition;
use serde::Deserialize;

#[derive(Debug, Parser)]
#[command(name = "graphnls", version, about = "NLS ground states on periodic metric graphs")]
struct Cli {
    /// JSON file with default values for the job flags; flags given on the command line win.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Terminal points, critical-power mass threshold and assumption (H) of a spec.
    Check(JobArgs),
    /// Mass-constrained ground state by preconditioned gradient flow.
    Solve(JobArgs),
    /// Maximize a Gagliardo-Nirenberg quotient.
    Gn {
        #[command(flatten)]
        job: JobArgs,
        #[arg(long, value_enum, default_value_t = GnKind::Gn1d)]
        kind: GnKind,
        /// Restarts from distinct vertex and edge classes.
        #[arg(long)]
        restarts: Option<usize>,
        /// Rounds of local mesh refinement around the peak.
        #[arg(long)]
        refine_rounds: Option<usize>,
    },
    /// Critical mass for fixed α or defocusing threshold for fixed μ.
    Threshold {
        #[command(flatten)]
        job: JobArgs,
        #[arg(long, value_enum)]
        target: Target,
        /// Also classify each bisection probe with the full solver.
        #[arg(long)]
        solver_check: bool,
    },
    /// Regime classification over a (μ, α) grid, written as one CSV.
    Sweep(JobArgs),
    /// Trial functions and their energy tables.
    Competitor {
        #[command(flatten)]
        job: JobArgs,
        #[arg(long, value_enum)]
        kind: CompetitorKind,
        /// Frequencies for edge solitons, e.g. `1,4,16,64`.
        #[arg(long)]
        lambdas: Option<String>,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum GnKind {
    Gn1d,
    GnInf,
    Interdim,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Target {
    MuCrit,
    AlphaBar,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum CompetitorKind {
    Tent,
    EdgeSoliton,
    Soliton,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
enum Bc {
    Dirichlet,
    Neumann,
}

impl From<Bc> for BoundaryCondition {
    fn from(b: Bc) -> Self {
        match b {
            Bc::Dirichlet => BoundaryCondition::Dirichlet,
            Bc::Neumann => BoundaryCondition::Neumann,
        }
    }
}

/// Flags shared by every command. The same keys are accepted in `--config`.
#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct JobArgs {
    /// Bundled spec name or path to a spec JSON file.
    #[arg(long)]
    spec: Option<String>,
    #[arg(long)]
    p: Option<f64>,
    #[arg(long)]
    q: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    alpha: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    mu: Option<f64>,
    /// `start:stop:step` or a comma-separated list.
    #[arg(long)]
    mu_range: Option<String>,
    /// `start:stop:step` or a comma-separated list.
    #[arg(long, allow_hyphen_values = true)]
    alpha_range: Option<String>,
    /// Truncation radius.
    #[arg(long)]
    n: Option<usize>,
    /// Mesh spacing.
    #[arg(long)]
    h: Option<f64>,
    #[arg(long, value_enum)]
    bc: Option<Bc>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    emit_svg: bool,
    /// Energy tolerance for solves, ascent tolerance for `gn`, relative
    /// bracket width for `threshold`.
    #[arg(long)]
    tol: Option<f64>,
}

impl JobArgs {
    /// Command-line values over config-file values.
    fn over(self, base: JobArgs) -> JobArgs {
        JobArgs {
            spec: self.spec.or(base.spec),
            p: self.p.or(base.p),
            q: self.q.or(base.q),
            alpha: self.alpha.or(base.alpha),
            mu: self.mu.or(base.mu),
            mu_range: self.mu_range.or(base.mu_range),
            alpha_range: self.alpha_range.or(base.alpha_range),
            n: self.n.or(base.n),
            h: self.h.or(base.h),
            bc: self.bc.or(base.bc),
            seed: self.seed.or(base.seed),
            out: self.out.or(base.out),
            emit_svg: self.emit_svg || base.emit_svg,
            tol: self.tol.or(base.tol),
        }
    }
}

/// Failure with its exit code.
#[derive(Debug)]
pub enum Failure {
    Config(String),
    Spec(String),
    Maxiter(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Config(_) => 2,
            Failure::Spec(_) => 3,
            Failure::Maxiter(_) => 4,
        }
    }

    fn report(&self) -> serde_json::Value {
        let (kind, message) = match self {
            Failure::Config(m) => ("config", m),
            Failure::Spec(m) => ("spec", m),
            Failure::Maxiter(m) => ("maxiter", m),
        };
        serde_json::json!({ "error": kind, "message": message, "exit_code": self.code() })
    }
}

impl From<graphnls_core::Error> for Failure {
    fn from(e: graphnls_core::Error) -> Self {
        use graphnls_core::Error as E;
        match e {
            E::UnknownVertex(_)
            | E::DuplicateVertex(_)
            | E::DuplicateEdge(_)
            | E::MissingEndpoint(_)
            | E::InvalidLength { .. }
            | E::HalflineInPeriodic(_)
            | E::ShiftDimension { .. }
            | E::UnsupportedDimension(_)
            | E::EmptySpec
            | E::Disconnected
            | E::NotCanonical(_)
            | E::UnknownSpec(_) => Failure::Spec(e.to_string()),
            E::LinearSolve(_) => Failure::Maxiter(e.to_string()),
            _ => Failure::Config(e.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Config(e.to_string())
    }
}

fn load_config(path: Option<&PathBuf>) -> Result<JobArgs, Failure> {
    let Some(path) = path else { return Ok(JobArgs::default()) };
    let text = std::fs::read_to_string(path).map_err(|e| Failure::Config(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Failure::Config(format!("{}: {e}", path.display())))
}

fn init_threads() -> Result<(), Failure> {
    if let Ok(v) = std::env::var("GRAPHNLS_THREADS") {
        let n: usize = v
            .parse()
            .ok()
            .filter(|&n| n > 0)
            .ok_or_else(|| Failure::Config(format!("GRAPHNLS_THREADS must be a positive integer, got `{v}`")))?;
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| Failure::Config(e.to_string()))?;
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), Failure> {
    init_threads()?;
    let base = load_config(cli.config.as_ref())?;
    match cli.command {
        Command::Check(job) => commands::check(&job.over(base)),
        Command::Solve(job) => commands::solve(&job.over(base)),
        Command::Gn { job, kind, restarts, refine_rounds } => commands::gn(&job.over(base), kind, restarts, refine_rounds),
        Command::Threshold { job, target, solver_check } => commands::threshold(&job.over(base), target, solver_check),
        Command::Sweep(job) => commands::sweep(&job.over(base)),
        Command::Competitor { job, kind, lambdas } => commands::competitor(&job.over(base), kind, lambdas.as_deref()),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            // --help and --version
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let f = Failure::Config(e.to_string().trim().to_string());
            eprintln!("{}", f.report());
            return ExitCode::from(f.code());
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("{}", f.report());
            ExitCode::from(f.code())
        }
    }
}
