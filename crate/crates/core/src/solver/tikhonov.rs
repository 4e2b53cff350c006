use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::{dual_row, null_measurements, ReconProblem};
use crate::error::{Error, Result};
use crate::fourier::SymbolTable;
use crate::spline::null_real_basis;

fn lattice_index(k: &crate::fourier::FreqIndex, bandwidth: usize) -> usize {
    let side = 2 * bandwidth + 1;
    k.components()
        .iter()
        .fold(0, |acc, &c| acc * side + (c + bandwidth as i64) as usize)
}

/// Closed-form minimizer of `‖y - ν(f)‖² + λ‖L f‖₂²`.
#[derive(Clone, Debug, PartialEq)]
pub struct TikhonovSolution {
    /// Expansion coefficients `a_m` of `f = Σ_m a_m h_L * ν_m + p`.
    pub coeffs: Vec<f64>,
    /// Coefficients of `p` on the real null basis.
    pub null_coeffs: Vec<f64>,
    pub table: SymbolTable,
    pub data_fit: f64,
    /// `‖L f‖₂² = aᵀ G a`.
    pub penalty: f64,
    pub objective: f64,
}

/// Solves the augmented system `[G + λI, B; Bᵀ, 0] [a; c] = [y; 0]` with
/// `G[m, m'] = Σ_{k ∉ N_L} d_m[k] |L̂[k]|⁻² conj(d_m'[k])`.
pub fn solve_tikhonov(problem: &ReconProblem) -> Result<TikhonovSolution> {
    problem.validate()?;
    let op = &problem.op;
    let dim = op.dim();
    let k_max = problem.bandwidth;
    let pseudo = op.pseudo_table(k_max)?;
    let h: Vec<f64> = pseudo.coeffs().iter().map(|p| p.norm_sqr()).collect();
    let duals: Vec<Vec<Complex64>> = problem
        .functionals
        .iter()
        .map(|nu| dual_row(nu, dim, k_max).into_iter().map(|(_, d)| d).collect())
        .collect();
    let m = duals.len();
    let gram = DMatrix::from_fn(m, m, |i, j| {
        duals[i]
            .iter()
            .zip(&duals[j])
            .zip(&h)
            .map(|((a, b), w)| a * b.conj() * *w)
            .sum::<Complex64>()
            .re
    });
    let basis = null_real_basis(op)?;
    let n0 = basis.len();
    let b = null_measurements(problem, &basis);

    let mut system = DMatrix::zeros(m + n0, m + n0);
    system.view_mut((0, 0), (m, m)).copy_from(&gram);
    for i in 0..m {
        system[(i, i)] += problem.lambda;
    }
    system.view_mut((0, m), (m, n0)).copy_from(&b);
    system.view_mut((m, 0), (n0, m)).copy_from(&b.transpose());
    let mut rhs = DVector::zeros(m + n0);
    rhs.rows_mut(0, m).copy_from_slice(&problem.y);
    let sol = system
        .lu()
        .solve(&rhs)
        .filter(|s| s.iter().all(|v| v.is_finite()))
        .ok_or_else(|| Error::Solver("augmented Tikhonov system is singular".into()))?;
    let a = sol.rows(0, m).into_owned();
    let c = sol.rows(m, n0).into_owned();

    let table = SymbolTable::hermitian_from_fn(dim, k_max, |k| {
        let idx = lattice_index(&k, k_max);
        let smooth: Complex64 = duals
            .iter()
            .zip(a.iter())
            .map(|(d, &am)| d[idx].conj() * am)
            .sum::<Complex64>()
            * h[idx];
        let p: Complex64 = basis.iter().zip(c.iter()).map(|(e, &cn)| e.coeff(&k) * cn).sum();
        smooth + p
    })?;
    let fit = &gram * &a + &b * &c;
    let data_fit = (DVector::from_column_slice(&problem.y) - fit).norm_squared();
    let penalty = a.dot(&(&gram * &a));
    Ok(TikhonovSolution {
        coeffs: a.iter().copied().collect(),
        null_coeffs: c.iter().copied().collect(),
        table,
        data_fit,
        penalty,
        objective: data_fit + problem.lambda * penalty,
    })
}
