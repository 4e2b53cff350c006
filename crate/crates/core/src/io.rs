//! Text formats: spline, problem and solution files (TOML) and profile grids.
//!
//! A spline file:
//!
//! ```toml
//! operator = "dpow:n=2"
//! dim = 1
//! knots = [[0.0], [3.141592653589793]]
//! weights = [1.0, -1.0]
//! null = [{ k = [0], re = 0.5, im = 0.0 }]
//! ```
//!
//! A problem file names the operator, grid and measurements, and either lists
//! the data `y` or generates it from a truth spline:
//!
//! ```toml
//! operator = "sobolev:alpha=2,gamma=2"
//! dim = 1
//! bandwidth = 64
//! grid = 32
//! lambda = 0.01
//! functionals = ["spatial:x=0.5", "fourier:k=1,part=re"]
//!
//! [generator]
//! truth = "truth.toml"
//! noise_sigma = 0.01
//! seed = 7
//!
//! [solver]
//! max_iter = 50000
//! ```
//!
//! Relative file names inside a file are resolved against its directory.

use std::path::{Path, PathBuf};

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fourier::{default_bandwidth, FreqIndex, GridFunction};
use crate::measurement::{measure, Functional};
use crate::operators::OperatorSpec;
use crate::solver::{Diagnostics, ReconProblem, Solution, SolverConfig};
use crate::spline::{Innovations, Spline};

/// `path` relative to `base` unless absolute.
pub fn resolve(base: Option<&Path>, path: &str) -> PathBuf {
    let p = Path::new(path);
    match base {
        Some(b) if p.is_relative() => b.join(p),
        _ => p.to_path_buf(),
    }
}

fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

fn parent(path: &Path) -> Option<&Path> {
    path.parent().filter(|p| !p.as_os_str().is_empty())
}

fn from_toml<T: serde::de::DeserializeOwned>(text: &str, what: &str) -> Result<T> {
    toml::from_str(text).map_err(|e| Error::Parse(format!("{what}: {e}")))
}

fn to_toml<T: Serialize>(value: &T) -> Result<String> {
    toml::to_string(value).map_err(|e| Error::Parse(e.to_string()))
}

/// Reads a grid file: header `dim n`, then `n^d` whitespace-separated reals
/// in row-major order.
pub fn read_grid_file(path: impl AsRef<Path>) -> Result<GridFunction> {
    let path = path.as_ref();
    parse_grid(&read_text(path)?).map_err(|e| match e {
        Error::Parse(m) => Error::Parse(format!("{}: {m}", path.display())),
        other => other,
    })
}

pub fn parse_grid(text: &str) -> Result<GridFunction> {
    let mut tokens = text.split_whitespace();
    let mut header = |name: &str| -> Result<usize> {
        let t = tokens
            .next()
            .ok_or_else(|| Error::Parse(format!("missing {name} in grid header")))?;
        t.parse()
            .map_err(|_| Error::Parse(format!("invalid {name} '{t}' in grid header")))
    };
    let dim = header("dim")?;
    let n = header("n")?;
    let values = tokens
        .map(|t| {
            t.parse::<f64>()
                .map_err(|_| Error::Parse(format!("invalid sample '{t}'")))
        })
        .collect::<Result<Vec<_>>>()?;
    GridFunction::new(dim, n, values)
}

/// Writes a grid in the format read by [`read_grid_file`].
pub fn write_grid_file(path: impl AsRef<Path>, grid: &GridFunction) -> Result<()> {
    let mut out = format!("{} {}\n", grid.dim(), grid.samples_per_axis());
    for v in grid.values() {
        out.push_str(&format!("{v:e}\n"));
    }
    write_text(path.as_ref(), &out)
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct NullEntry {
    k: Vec<i64>,
    re: f64,
    #[serde(default)]
    im: f64,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SplineFile {
    operator: String,
    dim: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    bandwidth: Option<usize>,
    #[serde(default)]
    knots: Vec<Vec<f64>>,
    #[serde(default)]
    weights: Vec<f64>,
    #[serde(default)]
    null: Vec<NullEntry>,
}

/// Parses a spline file. `bandwidth` overrides the file's value as the
/// precomputed range of radial-Green operators.
pub fn parse_spline(text: &str, base: Option<&Path>, bandwidth: Option<usize>) -> Result<Spline> {
    let f: SplineFile = from_toml(text, "spline file")?;
    let k = bandwidth.or(f.bandwidth).unwrap_or_else(|| default_bandwidth(f.dim));
    let op = OperatorSpec::parse_in(&f.operator, f.dim, k, base)?;
    let innov = Innovations::new(f.dim, f.knots, f.weights)?;
    let null = f
        .null
        .iter()
        .map(|e| Ok((FreqIndex::new(&e.k)?, Complex64::new(e.re, e.im))))
        .collect::<Result<Vec<_>>>()?;
    Spline::new(op, innov, null)
}

pub fn read_spline_file(path: impl AsRef<Path>, bandwidth: Option<usize>) -> Result<Spline> {
    let path = path.as_ref();
    parse_spline(&read_text(path)?, parent(path), bandwidth)
}

/// Serializes a spline; every conjugate pair of null coefficients is written
/// out explicitly.
pub fn format_spline(spline: &Spline, bandwidth: Option<usize>) -> Result<String> {
    let f = SplineFile {
        operator: spline.operator().to_string(),
        dim: spline.operator().dim(),
        bandwidth,
        knots: spline.innovations().knots().to_vec(),
        weights: spline.innovations().weights().to_vec(),
        null: spline
            .null_coeffs()
            .iter()
            .map(|(k, v)| NullEntry {
                k: k.components().to_vec(),
                re: v.re,
                im: v.im,
            })
            .collect(),
    };
    to_toml(&f)
}

pub fn write_spline_file(path: impl AsRef<Path>, spline: &Spline, bandwidth: Option<usize>) -> Result<()> {
    write_text(path.as_ref(), &format_spline(spline, bandwidth)?)
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct GeneratorSection {
    truth: String,
    #[serde(default)]
    noise_sigma: f64,
    #[serde(default)]
    seed: u64,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct SolverSection {
    max_iter: Option<usize>,
    rel_tol: Option<f64>,
    grad_tol: Option<f64>,
    null_penalty: Option<f64>,
    power_iterations: Option<usize>,
    safety: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ProblemFile {
    operator: String,
    dim: usize,
    bandwidth: Option<usize>,
    grid: usize,
    lambda: f64,
    functionals: Vec<String>,
    y: Option<Vec<f64>>,
    generator: Option<GeneratorSection>,
    #[serde(default)]
    solver: SolverSection,
}

/// A parsed problem file.
#[derive(Clone, Debug)]
pub struct ProblemSpec {
    pub problem: ReconProblem,
    pub config: SolverConfig,
    /// The generating spline, when the data come from a `[generator]` block.
    pub truth: Option<Spline>,
}

/// Measurements of `spline` with optional Gaussian noise from a seeded
/// ChaCha stream.
pub fn generate_data(
    spline: &Spline,
    functionals: &[Functional],
    bandwidth: usize,
    noise_sigma: f64,
    seed: u64,
) -> Result<Vec<f64>> {
    if !(noise_sigma >= 0.0 && noise_sigma.is_finite()) {
        return Err(Error::Problem(format!(
            "noise_sigma must be nonnegative, got {noise_sigma}"
        )));
    }
    let table = spline.table(bandwidth)?;
    let noise = Normal::new(0.0, noise_sigma).map_err(|e| Error::Problem(e.to_string()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    functionals
        .iter()
        .map(|nu| Ok(measure(nu, &table)? + noise.sample(&mut rng)))
        .collect()
}

pub fn parse_problem(text: &str, base: Option<&Path>) -> Result<ProblemSpec> {
    let f: ProblemFile = from_toml(text, "problem file")?;
    let bandwidth = f.bandwidth.unwrap_or_else(|| default_bandwidth(f.dim));
    let op = OperatorSpec::parse_in(&f.operator, f.dim, bandwidth, base)?;
    let functionals = f
        .functionals
        .iter()
        .map(|s| Functional::parse_in(s, f.dim, base))
        .collect::<Result<Vec<_>>>()?;
    let mut truth_spline = None;
    let y = match (f.y, f.generator) {
        (Some(y), None) => y,
        (None, Some(g)) => {
            let truth = read_spline_file(resolve(base, &g.truth), Some(bandwidth))?;
            if truth.operator().dim() != f.dim {
                return Err(Error::Problem("truth spline dimension differs from the problem".into()));
            }
            let y = generate_data(&truth, &functionals, bandwidth, g.noise_sigma, g.seed)?;
            truth_spline = Some(truth);
            y
        }
        _ => {
            return Err(Error::Parse(
                "problem file needs exactly one of 'y' or [generator]".into(),
            ))
        }
    };
    let d = SolverConfig::default();
    let s = f.solver;
    let config = SolverConfig {
        max_iter: s.max_iter.unwrap_or(d.max_iter),
        rel_tol: s.rel_tol.unwrap_or(d.rel_tol),
        grad_tol: s.grad_tol.unwrap_or(d.grad_tol),
        null_penalty: s.null_penalty.unwrap_or(d.null_penalty),
        power_iterations: s.power_iterations.unwrap_or(d.power_iterations),
        safety: s.safety.unwrap_or(d.safety),
    };
    config.validate()?;
    let problem = ReconProblem::new(op, functionals, y, f.lambda, f.grid, bandwidth)?;
    Ok(ProblemSpec {
        problem,
        config,
        truth: truth_spline,
    })
}

pub fn read_problem_file(path: impl AsRef<Path>) -> Result<ProblemSpec> {
    let path = path.as_ref();
    parse_problem(&read_text(path)?, parent(path))
}

#[derive(Debug, Serialize)]
struct DiagnosticsSection {
    objective: f64,
    data_fit: f64,
    reg_value: f64,
    null_penalty: f64,
    null_residual: f64,
    iterations: usize,
    converged: bool,
    warning: bool,
    lipschitz: f64,
}

impl From<&Diagnostics> for DiagnosticsSection {
    fn from(d: &Diagnostics) -> Self {
        Self {
            objective: d.objective,
            data_fit: d.data_fit,
            reg_value: d.reg_value,
            null_penalty: d.null_penalty,
            null_residual: d.null_residual,
            iterations: d.iterations,
            converged: d.converged,
            warning: d.warning,
            lipschitz: d.lipschitz,
        }
    }
}

#[derive(Debug, Serialize)]
struct SolutionFile {
    operator: String,
    grid: usize,
    lambda: f64,
    weights: Vec<f64>,
    null_coeffs: Vec<f64>,
    diagnostics: DiagnosticsSection,
}

/// Serializes a TV solution as TOML key-value lines.
pub fn format_solution(problem: &ReconProblem, solution: &Solution) -> Result<String> {
    to_toml(&SolutionFile {
        operator: problem.op.to_string(),
        grid: problem.grid,
        lambda: problem.lambda,
        weights: solution.weights.clone(),
        null_coeffs: solution.null_coeffs.clone(),
        diagnostics: (&solution.diagnostics).into(),
    })
}

pub fn write_solution_file(path: impl AsRef<Path>, problem: &ReconProblem, solution: &Solution) -> Result<()> {
    write_text(path.as_ref(), &format_solution(problem, solution)?)
}
