use nalgebra::{DMatrix, DVector, SymmetricEigen, SVD};
use num_complex::Complex64;

use super::{null_measurements, ObjectiveValue, ReconProblem, Solution};
use crate::error::{Error, Result};
use crate::spline::{null_real_basis, wrap_angle, Innovations, Spline};

/// Default relative threshold `|a_i| > threshold·‖a‖∞` for active cells.
pub const DEFAULT_THRESHOLD: f64 = 1e-4;

/// A sparse spline read off a grid solution.
#[derive(Clone, Debug)]
pub struct Extraction {
    pub spline: Spline,
    /// Objective of the refitted spline (data fit plus `λ‖w‖₁`).
    pub objective: ObjectiveValue,
    /// Real null-basis coefficients of the spline.
    pub null_coeffs: Vec<f64>,
    /// Number of grid cells above the threshold.
    pub active: usize,
    /// Whether adjacent cells were merged in the returned candidate.
    pub merged: bool,
    /// The spline has more knots than there are measurements.
    pub exceeds_measurements: bool,
}

/// `A[m, j] = ν_m(g_L(· - x_j))` for arbitrary knots.
pub(crate) fn knot_columns(problem: &ReconProblem, knots: &[Vec<f64>]) -> Result<DMatrix<f64>> {
    let green = problem.op.green_table(problem.bandwidth)?;
    let duals: Vec<Vec<Complex64>> = problem
        .functionals
        .iter()
        .map(|nu| green.indices().map(|k| nu.dual_coeff(&k)).collect())
        .collect();
    let mut out = DMatrix::zeros(problem.functionals.len(), knots.len());
    for (j, x) in knots.iter().enumerate() {
        let shifted: Vec<Complex64> = green
            .iter()
            .map(|(k, p)| p * Complex64::from_polar(1.0, -k.phase(x)))
            .collect();
        for (m, d) in duals.iter().enumerate() {
            out[(m, j)] = d.iter().zip(&shifted).map(|(a, b)| a * b).sum::<Complex64>().re;
        }
    }
    Ok(out)
}

/// Real rows of `M` for the given knots.
fn annihilation_rows(problem: &ReconProblem, knots: &[Vec<f64>]) -> DMatrix<f64> {
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for k in problem
        .op
        .null_frequencies()
        .iter()
        .filter(|k| k.is_zero() || k.is_canonical())
    {
        let phases: Vec<f64> = knots.iter().map(|x| k.phase(x)).collect();
        rows.push(phases.iter().map(|t| t.cos()).collect());
        if !k.is_zero() {
            rows.push(phases.iter().map(|t| t.sin()).collect());
        }
    }
    DMatrix::from_fn(rows.len(), knots.len(), |r, j| rows[r][j])
}

/// Orthonormal basis of `{w : M w = 0}`.
fn constraint_null_basis(m: &DMatrix<f64>) -> DMatrix<f64> {
    let j = m.ncols();
    if m.nrows() == 0 {
        return DMatrix::identity(j, j);
    }
    let eig = SymmetricEigen::new(m.transpose() * m);
    let scale = eig.eigenvalues.amax().max(1.0);
    let keep: Vec<usize> = (0..j).filter(|&i| eig.eigenvalues[i] <= 1e-10 * scale).collect();
    DMatrix::from_fn(j, keep.len(), |r, c| eig.eigenvectors[(r, keep[c])])
}

struct Refit {
    knots: Vec<Vec<f64>>,
    weights: Vec<f64>,
    null_coeffs: Vec<f64>,
    objective: ObjectiveValue,
}

fn pinv_solve(h: &DMatrix<f64>, rhs: &DVector<f64>) -> Result<DVector<f64>> {
    let svd = SVD::new(h.clone(), true, true);
    let tol = 1e-12 * svd.singular_values.amax();
    svd.solve(rhs, tol)
        .map_err(|e| Error::Solver(format!("refit least squares failed: {e}")))
}

/// Minimizes `‖y - A_X w - B c‖² + λ sᵀw` subject to `M_X w = 0` for fixed
/// signs `s`, dropping knots whose weight changes sign until consistent.
fn refit(problem: &ReconProblem, b: &DMatrix<f64>, mut knots: Vec<Vec<f64>>, mut signs: Vec<f64>) -> Result<Refit> {
    let y = DVector::from_column_slice(&problem.y);
    let lambda = problem.lambda;
    loop {
        let (w, c) = if knots.is_empty() {
            let c = if b.ncols() == 0 {
                DVector::zeros(0)
            } else {
                pinv_solve(b, &y)?
            };
            (DVector::zeros(0), c)
        } else {
            let ax = knot_columns(problem, &knots)?;
            let z = constraint_null_basis(&annihilation_rows(problem, &knots));
            let r = z.ncols();
            let n0 = b.ncols();
            let mut h = DMatrix::zeros(y.len(), r + n0);
            h.view_mut((0, 0), (y.len(), r)).copy_from(&(&ax * &z));
            h.view_mut((0, r), (y.len(), n0)).copy_from(b);
            let mut q = DVector::zeros(r + n0);
            q.rows_mut(0, r)
                .copy_from(&(z.transpose() * DVector::from_column_slice(&signs)));
            let rhs = h.transpose() * &y - q * (0.5 * lambda);
            let v = pinv_solve(&(h.transpose() * &h), &rhs)?;
            (&z * v.rows(0, r), v.rows(r, n0).into_owned())
        };
        let flipped: Vec<usize> = (0..knots.len()).filter(|&j| w[j] * signs[j] <= 0.0).collect();
        if flipped.is_empty() {
            let ax = knot_columns(problem, &knots)?;
            let data_fit = (&y - &ax * &w - b * &c).norm_squared();
            let reg_value = w.iter().map(|v| v.abs()).sum::<f64>();
            return Ok(Refit {
                knots,
                weights: w.iter().copied().collect(),
                null_coeffs: c.iter().copied().collect(),
                objective: ObjectiveValue {
                    objective: data_fit + lambda * reg_value,
                    data_fit,
                    reg_value,
                },
            });
        }
        for &j in flipped.iter().rev() {
            knots.remove(j);
            signs.remove(j);
        }
    }
}

fn find(parent: &mut [usize], mut i: usize) -> usize {
    while parent[i] != i {
        parent[i] = parent[parent[i]];
        i = parent[i];
    }
    i
}

/// Groups active cells that are grid neighbours with equal sign.
fn clusters(problem: &ReconProblem, active: &[usize], a: &[f64]) -> Vec<Vec<usize>> {
    let n = problem.grid;
    let d = problem.dim();
    let mut parent: Vec<usize> = (0..active.len()).collect();
    let pos = |i: usize| active.binary_search(&i).ok();
    for (p, &i) in active.iter().enumerate() {
        let mut stride = 1;
        for _ in 0..d {
            let coord = (i / stride) % n;
            let next = i - coord * stride + ((coord + 1) % n) * stride;
            if let Some(q) = pos(next) {
                if q != p && a[i].signum() == a[next].signum() {
                    let (rp, rq) = (find(&mut parent, p), find(&mut parent, q));
                    parent[rp] = rq;
                }
            }
            stride *= n;
        }
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut roots: Vec<usize> = Vec::new();
    for (p, &cell) in active.iter().enumerate() {
        let r = find(&mut parent, p);
        match roots.iter().position(|&x| x == r) {
            Some(g) => groups[g].push(cell),
            None => {
                roots.push(r);
                groups.push(vec![cell]);
            }
        }
    }
    groups
}

fn circular_centroid(points: &[Vec<f64>], weights: &[f64]) -> Vec<f64> {
    let d = points[0].len();
    (0..d)
        .map(|axis| {
            let (s, c) = points.iter().zip(weights).fold((0.0, 0.0), |(s, c), (x, w)| {
                (s + w * x[axis].sin(), c + w * x[axis].cos())
            });
            wrap_angle(s.atan2(c))
        })
        .collect()
}

/// Turns grid weights into a spline with few knots.
///
/// Cells with `|a_i| > threshold·‖a‖∞` are kept. Two candidates are
/// refitted: the kept cells as they are, and runs of adjacent same-sign cells
/// merged into their weighted circular centroid. Each refit minimizes the
/// objective over the weights for fixed signs with `M w = 0` imposed
/// exactly. The candidate with at most `M` knots and the lowest objective
/// wins; if both exceed `M` knots the lower objective wins and the result is
/// flagged.
pub fn extract_spline(problem: &ReconProblem, solution: &Solution, threshold: f64) -> Result<Extraction> {
    problem.validate()?;
    let a = &solution.weights;
    if a.len() != problem.num_knots() || a.iter().any(|v| !v.is_finite()) {
        return Err(Error::Shape("solution weights do not match the problem grid".into()));
    }
    let basis = null_real_basis(&problem.op)?;
    let b = null_measurements(problem, &basis);
    let peak = a.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    let active: Vec<usize> = (0..a.len())
        .filter(|&i| peak > 0.0 && a[i].abs() > threshold * peak)
        .collect();

    let unmerged = refit(
        problem,
        &b,
        active.iter().map(|&i| problem.knot(i)).collect(),
        active.iter().map(|&i| a[i].signum()).collect(),
    )?;
    let groups = clusters(problem, &active, a);
    let mut candidates = vec![(unmerged, false)];
    if groups.len() < active.len() {
        let knots = groups
            .iter()
            .map(|g| {
                let pts: Vec<Vec<f64>> = g.iter().map(|&i| problem.knot(i)).collect();
                let w: Vec<f64> = g.iter().map(|&i| a[i].abs()).collect();
                circular_centroid(&pts, &w)
            })
            .collect();
        let signs = groups
            .iter()
            .map(|g| g.iter().map(|&i| a[i]).sum::<f64>().signum())
            .collect();
        candidates.push((refit(problem, &b, knots, signs)?, true));
    }
    let m = problem.functionals.len();
    let best = candidates
        .into_iter()
        .min_by(|(x, _), (y, _)| {
            let key = |r: &Refit| (r.knots.len() > m, r.objective.objective);
            let (kx, ky) = (key(x), key(y));
            kx.0.cmp(&ky.0).then(kx.1.total_cmp(&ky.1))
        })
        .expect("at least one candidate");
    let (fit, merged) = best;
    let keep: Vec<usize> = (0..fit.weights.len()).filter(|&j| fit.weights[j] != 0.0).collect();
    let innov = Innovations::new(
        problem.dim(),
        keep.iter().map(|&j| fit.knots[j].clone()).collect(),
        keep.iter().map(|&j| fit.weights[j]).collect(),
    )?;
    let spline = Spline::with_real_null(problem.op.clone(), innov, &fit.null_coeffs)?;
    Ok(Extraction {
        exceeds_measurements: keep.len() > m,
        spline,
        objective: fit.objective,
        null_coeffs: fit.null_coeffs,
        active: active.len(),
        merged,
    })
}
