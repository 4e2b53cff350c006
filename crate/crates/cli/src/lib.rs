//! Command-line front end for `torus-splines`.
//!
//! Subcommands:
//!
//! - `green`: samples of a Green's function or the two-knot spline
//!   `g_L - g_L(· - π)`, peak-normalized unless `--raw`.
//! - `spline`: samples of a spline file.
//! - `admissible`: sampling and L2 verdicts for a list of operators.
//! - `reconstruct`: TV-regularized solve of a problem file.
//! - `tikhonov`: the quadratic closed form on the same problem.
//! - `compare`: both solvers as a table.
//!
//! Exit codes: 0 on success, 2 on invalid input, 3 on solver or output
//! failure. `TORUS_SPLINES_THREADS` caps the worker pool.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use torus_splines::fourier::{default_bandwidth, default_grid_size, sobolev_norm, synthesize};
use torus_splines::io::{format_solution, format_spline, read_problem_file, read_spline_file, ProblemSpec};
use torus_splines::measurement::{l2_admissible, sampling_admissible};
use torus_splines::solver::{extract_spline, lambda_max, solve_tikhonov, solve_tv, Extraction, DEFAULT_THRESHOLD};
use torus_splines::{Error, GridFunction, OperatorSpec, Smoothing, SymbolTable};

pub mod emit;

pub use emit::Format;

pub const THREADS_VAR: &str = "TORUS_SPLINES_THREADS";

const SUMMARY_HEADER: &str = "method,objective,data_fit,regularizer,knots,l2_error";

#[derive(Debug, Parser)]
#[command(name = "torus-splines", version, about = "Periodic L-splines on the torus")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum SmoothingArg {
    None,
    Fejer,
}

impl From<SmoothingArg> for Smoothing {
    fn from(s: SmoothingArg) -> Self {
        match s {
            SmoothingArg::None => Smoothing::None,
            SmoothingArg::Fejer => Smoothing::Fejer,
        }
    }
}

#[derive(Debug, clap::Args)]
struct SampleArgs {
    /// Samples per axis (default: smallest power of two >= 2K + 2)
    #[arg(long)]
    grid: Option<usize>,
    #[arg(long, value_enum, default_value = "none")]
    smoothing: SmoothingArg,
    /// Output file (default: stdout)
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Sample a Green's function or the two-knot spline
    Green {
        /// Operator, e.g. `sobolev:alpha=2,gamma=2`
        #[arg(long)]
        op: String,
        #[arg(long, default_value_t = 1)]
        dim: usize,
        /// Frequency cutoff K (default depends on the dimension)
        #[arg(long)]
        bandwidth: Option<usize>,
        /// Emit g_L - g_L(· - π) instead of g_L
        #[arg(long)]
        two_knot: bool,
        /// Skip the peak normalization
        #[arg(long)]
        raw: bool,
        #[command(flatten)]
        sample: SampleArgs,
    },
    /// Sample a spline file
    Spline {
        #[arg(long)]
        spline: PathBuf,
        #[arg(long)]
        bandwidth: Option<usize>,
        #[command(flatten)]
        sample: SampleArgs,
    },
    /// Sampling and L2 admissibility of operators
    Admissible {
        #[arg(long, required = true)]
        op: Vec<String>,
        #[arg(long, default_value_t = 1)]
        dim: usize,
        #[arg(long)]
        bandwidth: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// TV-regularized reconstruction
    Reconstruct {
        #[arg(long)]
        problem: PathBuf,
        /// Solution file (weights, null coefficients, diagnostics)
        #[arg(long)]
        out: Option<PathBuf>,
        /// Extracted spline file
        #[arg(long)]
        spline_out: Option<PathBuf>,
        /// Relative threshold for active grid cells
        #[arg(long, default_value_t = DEFAULT_THRESHOLD)]
        threshold: f64,
        /// Print the smallest λ with an all-zero solution and stop
        #[arg(long)]
        lambda_max: bool,
    },
    /// Tikhonov closed-form reconstruction
    Tikhonov {
        #[arg(long)]
        problem: PathBuf,
        #[command(flatten)]
        sample: SampleArgs,
    },
    /// TV and Tikhonov side by side
    Compare {
        #[arg(long)]
        problem: PathBuf,
        #[arg(long, default_value_t = DEFAULT_THRESHOLD)]
        threshold: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn validation(message: impl Into<String>) -> Self {
        Self {
            code: 2,
            message: message.into(),
        }
    }

    fn output(path: &Path, e: std::io::Error) -> Self {
        Self {
            code: 3,
            message: format!("cannot write {}: {e}", path.display()),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Self {
            code: if e.is_solver_failure() { 3 } else { 2 },
            message: e.to_string(),
        }
    }
}

type CliResult<T = ()> = std::result::Result<T, Failure>;

/// Parses `argv` (program name first), runs the subcommand and returns the
/// exit code. Messages go to stderr.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match configure_threads().and_then(|()| dispatch(cli.command)) {
        Ok(()) => 0,
        Err(f) => {
            eprintln!("error: {}", f.message);
            f.code
        }
    }
}

fn configure_threads() -> CliResult {
    let Ok(value) = std::env::var(THREADS_VAR) else {
        return Ok(());
    };
    let n: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| Failure::validation(format!("{THREADS_VAR} must be a positive integer, got '{value}'")))?;
    // A second call in the same process finds the pool already built.
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}

fn dispatch(command: Command) -> CliResult {
    match command {
        Command::Green {
            op,
            dim,
            bandwidth,
            two_knot,
            raw,
            sample,
        } => green(&op, dim, bandwidth, two_knot, raw, &sample),
        Command::Spline {
            spline,
            bandwidth,
            sample,
        } => spline_samples(&spline, bandwidth, &sample),
        Command::Admissible {
            op,
            dim,
            bandwidth,
            out,
        } => admissible(&op, dim, bandwidth, out.as_deref()),
        Command::Reconstruct {
            problem,
            out,
            spline_out,
            threshold,
            lambda_max: only_lambda,
        } => reconstruct(&problem, out.as_deref(), spline_out.as_deref(), threshold, only_lambda),
        Command::Tikhonov { problem, sample } => tikhonov(&problem, &sample),
        Command::Compare {
            problem,
            threshold,
            out,
        } => compare(&problem, threshold, out.as_deref()),
    }
}

fn write_output(path: Option<&Path>, text: &str) -> CliResult {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| Failure::output(p, e)),
        None => std::io::stdout()
            .lock()
            .write_all(text.as_bytes())
            .map_err(|e| Failure::output(Path::new("<stdout>"), e)),
    }
}

fn sample_table(table: &SymbolTable, sample: &SampleArgs) -> CliResult<GridFunction> {
    let n = sample.grid.unwrap_or_else(|| default_grid_size(table.bandwidth()));
    Ok(synthesize(table, n, sample.smoothing.into())?)
}

fn emit_samples(grid: &GridFunction, sample: &SampleArgs) -> CliResult {
    write_output(sample.out.as_deref(), &emit::render(grid, sample.format))
}

fn green(op: &str, dim: usize, bandwidth: Option<usize>, two_knot: bool, raw: bool, sample: &SampleArgs) -> CliResult {
    let k = bandwidth.unwrap_or_else(|| default_bandwidth(dim));
    let op = OperatorSpec::parse(op, dim, k)?;
    let g = op.green_table(k)?;
    let table = if two_knot {
        let half = vec![std::f64::consts::PI; dim];
        SymbolTable::linear_combination(1.0, &g, -1.0, &g.shifted(&half))?
    } else {
        g
    };
    let mut grid = sample_table(&table, sample)?;
    if !raw {
        let peak = grid.max();
        if !(peak > 0.0) {
            return Err(Failure::validation(
                "samples have no positive peak to normalize by; use --raw",
            ));
        }
        grid = grid.scaled(1.0 / peak);
    }
    emit_samples(&grid, sample)
}

fn spline_samples(path: &Path, bandwidth: Option<usize>, sample: &SampleArgs) -> CliResult {
    let spline = read_spline_file(path, bandwidth)?;
    let k = bandwidth.unwrap_or_else(|| default_bandwidth(spline.operator().dim()));
    let grid = sample_table(&spline.table(k)?, sample)?;
    emit_samples(&grid, sample)
}

fn admissible(ops: &[String], dim: usize, bandwidth: Option<usize>, out: Option<&Path>) -> CliResult {
    let k = bandwidth.unwrap_or_else(|| default_bandwidth(dim));
    let mut text = String::new();
    for s in ops {
        let op = OperatorSpec::parse(s, dim, k)?;
        let _ = writeln!(text, "{op}");
        let _ = writeln!(text, "  sampling: {}", sampling_admissible(&op));
        let _ = writeln!(text, "  l2: {}", l2_admissible(&op));
    }
    write_output(out, &text)
}

fn load_problem(path: &Path) -> CliResult<ProblemSpec> {
    let spec = read_problem_file(path)?;
    if spec.problem.has_warnings()? {
        eprintln!(
            "warning: spatial sampling is not known to be admissible for {}",
            spec.problem.op
        );
    }
    Ok(spec)
}

fn l2_error(spec: &ProblemSpec, table: &SymbolTable) -> CliResult<String> {
    let Some(truth) = &spec.truth else {
        return Ok("-".into());
    };
    let t = truth.table(table.bandwidth())?;
    let diff = SymbolTable::linear_combination(1.0, table, -1.0, &t)?;
    Ok(format!("{:.12e}", sobolev_norm(&diff, 0.0)))
}

fn tv_run(spec: &ProblemSpec, threshold: f64) -> CliResult<(torus_splines::Solution, Extraction, String)> {
    let solution = solve_tv(&spec.problem, &spec.config)?;
    if !solution.diagnostics.converged {
        eprintln!(
            "warning: TV solver stopped after {} iterations without meeting the tolerance",
            solution.diagnostics.iterations
        );
    }
    let ex = extract_spline(&spec.problem, &solution, threshold)?;
    if ex.exceeds_measurements {
        eprintln!("warning: extracted spline has more knots than measurements");
    }
    let err = l2_error(spec, &ex.spline.table(spec.problem.bandwidth)?)?;
    let row = format!(
        "tv,{:.12e},{:.12e},{:.12e},{},{err}",
        ex.objective.objective,
        ex.objective.data_fit,
        ex.objective.reg_value,
        ex.spline.innovations().len()
    );
    Ok((solution, ex, row))
}

fn tikhonov_run(spec: &ProblemSpec) -> CliResult<(SymbolTable, String)> {
    let t = solve_tikhonov(&spec.problem)?;
    let err = l2_error(spec, &t.table)?;
    let row = format!(
        "tikhonov,{:.12e},{:.12e},{:.12e},-,{err}",
        t.objective, t.data_fit, t.penalty
    );
    Ok((t.table, row))
}

fn reconstruct(
    path: &Path,
    out: Option<&Path>,
    spline_out: Option<&Path>,
    threshold: f64,
    only_lambda: bool,
) -> CliResult {
    let spec = load_problem(path)?;
    if only_lambda {
        return write_output(None, &format!("lambda_max,{:.12e}\n", lambda_max(&spec.problem)?));
    }
    if !(0.0..1.0).contains(&threshold) {
        return Err(Failure::validation(format!(
            "threshold must lie in [0, 1), got {threshold}"
        )));
    }
    let (solution, ex, row) = tv_run(&spec, threshold)?;
    if let Some(p) = out {
        write_output(Some(p), &format_solution(&spec.problem, &solution)?)?;
    }
    if let Some(p) = spline_out {
        write_output(Some(p), &format_spline(&ex.spline, Some(spec.problem.bandwidth))?)?;
    }
    write_output(None, &format!("{SUMMARY_HEADER}\n{row}\n"))
}

fn tikhonov(path: &Path, sample: &SampleArgs) -> CliResult {
    let spec = load_problem(path)?;
    let (table, row) = tikhonov_run(&spec)?;
    if sample.out.is_some() {
        emit_samples(&sample_table(&table, sample)?, sample)?;
    }
    write_output(None, &format!("{SUMMARY_HEADER}\n{row}\n"))
}

fn compare(path: &Path, threshold: f64, out: Option<&Path>) -> CliResult {
    let spec = load_problem(path)?;
    if !(0.0..1.0).contains(&threshold) {
        return Err(Failure::validation(format!(
            "threshold must lie in [0, 1), got {threshold}"
        )));
    }
    let (_, _, tv) = tv_run(&spec, threshold)?;
    let (_, tik) = tikhonov_run(&spec)?;
    write_output(out, &format!("{SUMMARY_HEADER}\n{tv}\n{tik}\n"))
}
