//! Periodic L-splines `f = Σ_j a_j g_L(· - x_j) + p` with `p` in the null
//! space of `L`.
//!
//! The weights of a spline must satisfy `M a = 0`, where
//! `M[n, j] = exp(-i<k_n, x_j>)` runs over the null frequencies `k_n`.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fourier::{check_dim, FreqIndex, SymbolTable};
use crate::operators::OperatorSpec;

const TAU: f64 = 2.0 * PI;
const DUPLICATE_TOL: f64 = TAU * 1e-9;
const VALIDATION_TOL: f64 = 1e-9;

/// Wraps an angle into `[0, 2π)`.
pub fn wrap_angle(x: f64) -> f64 {
    let w = x.rem_euclid(TAU);
    if w >= TAU {
        0.0
    } else {
        w
    }
}

/// Euclidean distance on the torus `(ℝ / 2πℤ)^d`.
pub fn torus_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| {
            let d = (x - y).rem_euclid(TAU);
            d.min(TAU - d).powi(2)
        })
        .sum::<f64>()
        .sqrt()
}

fn phase(k: &FreqIndex, x: &[f64]) -> Complex64 {
    Complex64::from_polar(1.0, -k.phase(x))
}

/// Knots and weights of a spline.
#[derive(Clone, Debug, PartialEq)]
pub struct Innovations {
    dim: usize,
    knots: Vec<Vec<f64>>,
    weights: Vec<f64>,
}

impl Innovations {
    /// Knots are wrapped into `[0, 2π)^d`. Rejects knots closer than
    /// `2π·1e-9`, zero or non-finite weights and length mismatches.
    pub fn new(dim: usize, knots: Vec<Vec<f64>>, weights: Vec<f64>) -> Result<Self> {
        check_dim(dim)?;
        if knots.len() != weights.len() {
            return Err(Error::Innovations(format!(
                "{} knots but {} weights",
                knots.len(),
                weights.len()
            )));
        }
        let mut wrapped = Vec::with_capacity(knots.len());
        for x in knots {
            if x.len() != dim {
                return Err(Error::Innovations(format!(
                    "knot has {} coordinates, expected {dim}",
                    x.len()
                )));
            }
            if x.iter().any(|v| !v.is_finite()) {
                return Err(Error::Innovations("knot coordinates must be finite".into()));
            }
            wrapped.push(x.into_iter().map(wrap_angle).collect::<Vec<_>>());
        }
        if let Some(w) = weights.iter().find(|w| **w == 0.0 || !w.is_finite()) {
            return Err(Error::Innovations(format!(
                "weights must be nonzero and finite, got {w}"
            )));
        }
        for i in 0..wrapped.len() {
            for j in 0..i {
                if torus_distance(&wrapped[i], &wrapped[j]) < DUPLICATE_TOL {
                    return Err(Error::Innovations(format!(
                        "knots {j} and {i} coincide ({:?})",
                        wrapped[i]
                    )));
                }
            }
        }
        Ok(Self {
            dim,
            knots: wrapped,
            weights,
        })
    }

    pub fn empty(dim: usize) -> Result<Self> {
        Self::new(dim, Vec::new(), Vec::new())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn knots(&self) -> &[Vec<f64>] {
        &self.knots
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Total variation of the innovation measure, `Σ |a_j|`.
    pub fn l1_norm(&self) -> f64 {
        self.weights.iter().map(|w| w.abs()).sum()
    }

    /// All knots moved by `s`.
    pub fn shifted(&self, s: &[f64]) -> Result<Self> {
        let knots = self
            .knots
            .iter()
            .map(|x| x.iter().zip(s).map(|(a, b)| a + b).collect())
            .collect();
        Self::new(self.dim, knots, self.weights.clone())
    }

    /// `Σ_j a_j exp(-i<k, x_j>)`, the Fourier coefficient of `L f` at `k`.
    pub fn transform(&self, k: &FreqIndex) -> Complex64 {
        self.knots
            .iter()
            .zip(&self.weights)
            .map(|(x, &a)| phase(k, x) * a)
            .sum()
    }
}

/// `M[n, j] = exp(-i<k_n, x_j>)` for null frequencies `k_n` and knots `x_j`.
pub fn innovation_matrix(knots: &[Vec<f64>], null_freqs: &[FreqIndex]) -> DMatrix<Complex64> {
    DMatrix::from_fn(null_freqs.len(), knots.len(), |n, j| phase(&null_freqs[n], &knots[j]))
}

fn check_dims(op: &OperatorSpec, innov: &Innovations) -> Result<()> {
    if op.dim() != innov.dim() {
        return Err(Error::Shape(format!(
            "operator has dimension {}, innovations have {}",
            op.dim(),
            innov.dim()
        )));
    }
    Ok(())
}

/// Checks `‖M a‖∞ <= 1e-9·‖a‖₁`. Returns the residual, or
/// [`Error::Annihilation`] when the weights do not annihilate the null space.
pub fn validate_innovations(op: &OperatorSpec, innov: &Innovations) -> Result<f64> {
    check_dims(op, innov)?;
    let residual = op
        .null_frequencies()
        .iter()
        .map(|k| innov.transform(k).norm())
        .fold(0.0, f64::max);
    let threshold = VALIDATION_TOL * innov.l1_norm();
    if residual > threshold {
        return Err(Error::Annihilation { residual, threshold });
    }
    Ok(residual)
}

/// One real basis function of the null space.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NullElement {
    Constant,
    Cos(FreqIndex),
    Sin(FreqIndex),
}

impl NullElement {
    /// Fourier coefficient of the element at `k`.
    pub fn coeff(&self, k: &FreqIndex) -> Complex64 {
        match self {
            Self::Constant => {
                if k.is_zero() {
                    Complex64::new(1.0, 0.0)
                } else {
                    Complex64::default()
                }
            }
            Self::Cos(f) => {
                if k == f || *k == -*f {
                    Complex64::new(0.5, 0.0)
                } else {
                    Complex64::default()
                }
            }
            Self::Sin(f) => {
                if k == f {
                    Complex64::new(0.0, -0.5)
                } else if *k == -*f {
                    Complex64::new(0.0, 0.5)
                } else {
                    Complex64::default()
                }
            }
        }
    }

    /// Value at a point.
    pub fn evaluate(&self, x: &[f64]) -> f64 {
        match self {
            Self::Constant => 1.0,
            Self::Cos(f) => f.phase(x).cos(),
            Self::Sin(f) => f.phase(x).sin(),
        }
    }
}

/// Real trigonometric basis of the null space of a real operator: the
/// constant when `0 ∈ N_L`, and `cos`, `sin` for each pair `±k`.
pub fn null_real_basis(op: &OperatorSpec) -> Result<Vec<NullElement>> {
    if !op.is_real() {
        return Err(Error::Operator(format!(
            "{op} is not a real operator; its null space has no real basis"
        )));
    }
    let mut basis = Vec::new();
    for k in op.null_frequencies() {
        if k.is_zero() {
            basis.push(NullElement::Constant);
        } else if k.is_canonical() {
            basis.push(NullElement::Cos(*k));
            basis.push(NullElement::Sin(*k));
        }
    }
    Ok(basis)
}

/// Complex null coefficients `(k, p̂[k])` of `Σ_n c_n b_n`, sorted by frequency.
pub fn null_coeffs_from_real(dim: usize, basis: &[NullElement], c: &[f64]) -> Result<Vec<(FreqIndex, Complex64)>> {
    let mut freqs: Vec<FreqIndex> = Vec::new();
    for b in basis {
        match b {
            NullElement::Constant => freqs.push(FreqIndex::zero(dim)?),
            NullElement::Cos(k) | NullElement::Sin(k) => freqs.extend([*k, -*k]),
        }
    }
    freqs.sort();
    freqs.dedup();
    Ok(freqs
        .into_iter()
        .map(|k| {
            let v = basis.iter().zip(c).map(|(b, &cn)| b.coeff(&k) * cn).sum();
            (k, v)
        })
        .collect())
}

/// Sorts, checks membership in `N_L` and completes the hermitian pairing of
/// null coefficients for real operators.
fn normalize_null(op: &OperatorSpec, entries: Vec<(FreqIndex, Complex64)>) -> Result<Vec<(FreqIndex, Complex64)>> {
    let mut out: Vec<(FreqIndex, Complex64)> = Vec::with_capacity(entries.len());
    for (k, v) in entries {
        if k.dim() != op.dim() || !op.is_null_frequency(&k) {
            return Err(Error::Innovations(format!(
                "null coefficient at {k}, which is not a null frequency of {op}"
            )));
        }
        if !(v.re.is_finite() && v.im.is_finite()) {
            return Err(Error::Innovations(format!("null coefficient at {k} is not finite")));
        }
        if out.iter().any(|(f, _)| *f == k) {
            return Err(Error::Innovations(format!("duplicate null coefficient at {k}")));
        }
        out.push((k, v));
    }
    if op.is_real() {
        let snapshot = out.clone();
        for (k, v) in &snapshot {
            let mirror = -*k;
            match snapshot.iter().find(|(f, _)| *f == mirror) {
                Some((_, w)) => {
                    if (w - v.conj()).norm() > 1e-12 * v.norm().max(1.0) {
                        return Err(Error::Innovations(format!(
                            "null coefficients at {k} and {mirror} are not conjugate"
                        )));
                    }
                }
                None => out.push((mirror, v.conj())),
            }
        }
        for (k, v) in out.iter_mut() {
            if k.is_zero() {
                if v.im.abs() > 1e-12 * v.norm().max(1.0) {
                    return Err(Error::Innovations("null coefficient at 0 must be real".into()));
                }
                v.im = 0.0;
            }
        }
        // Canonical entries are authoritative; the mirror is its exact conjugate.
        let canon: Vec<(FreqIndex, Complex64)> = out.iter().filter(|(k, _)| k.is_canonical()).copied().collect();
        for (k, v) in out.iter_mut() {
            if !k.is_zero() && !k.is_canonical() {
                if let Some((_, c)) = canon.iter().find(|(f, _)| *f == -*k) {
                    *v = c.conj();
                }
            }
        }
    }
    out.sort_by_key(|e| e.0);
    Ok(out)
}

/// A periodic L-spline.
#[derive(Clone, Debug, PartialEq)]
pub struct Spline {
    op: OperatorSpec,
    innov: Innovations,
    null: Vec<(FreqIndex, Complex64)>,
}

impl Spline {
    /// Builds a spline, rejecting weights that violate `M a = 0` and null
    /// coefficients outside `N_L`. For real operators missing conjugate
    /// partners of null coefficients are filled in.
    pub fn new(op: OperatorSpec, innov: Innovations, null: Vec<(FreqIndex, Complex64)>) -> Result<Self> {
        validate_innovations(&op, &innov)?;
        let null = normalize_null(&op, null)?;
        Ok(Self { op, innov, null })
    }

    /// Spline whose null part is `Σ_n c_n b_n` over [`null_real_basis`].
    pub fn with_real_null(op: OperatorSpec, innov: Innovations, c: &[f64]) -> Result<Self> {
        let basis = null_real_basis(&op)?;
        if c.len() != basis.len() {
            return Err(Error::Shape(format!(
                "{} null coefficients for a null basis of size {}",
                c.len(),
                basis.len()
            )));
        }
        let null = null_coeffs_from_real(op.dim(), &basis, c)?;
        Self::new(op, innov, null)
    }

    pub fn operator(&self) -> &OperatorSpec {
        &self.op
    }

    pub fn innovations(&self) -> &Innovations {
        &self.innov
    }

    pub fn null_coeffs(&self) -> &[(FreqIndex, Complex64)] {
        &self.null
    }

    fn null_coeff(&self, k: &FreqIndex) -> Complex64 {
        self.null
            .binary_search_by(|(f, _)| f.cmp(k))
            .map(|i| self.null[i].1)
            .unwrap_or_default()
    }

    /// Fourier table `p̂seudo[k]·Σ_j a_j e^{-i<k,x_j>} + p̂[k]` over `[-K, K]^d`.
    pub fn table(&self, bandwidth: usize) -> Result<SymbolTable> {
        let pseudo = self.op.pseudo_table(bandwidth)?;
        let coeff = |k: FreqIndex| pseudo.coeff(&k) * self.innov.transform(&k) + self.null_coeff(&k);
        if self.op.is_real() {
            SymbolTable::hermitian_from_fn(self.op.dim(), bandwidth, coeff)
        } else {
            SymbolTable::from_fn(self.op.dim(), bandwidth, coeff)
        }
    }

    /// `max_k |L̂[k] f̂[k] - Σ_j a_j e^{-i<k,x_j>}|` over `[-K, K]^d`.
    pub fn annihilation_residual(&self, bandwidth: usize) -> Result<f64> {
        annihilation_check(&self.op, &self.innov, &self.null, bandwidth)
    }
}

/// Free form of [`Spline::table`].
pub fn spline_table(spline: &Spline, bandwidth: usize) -> Result<SymbolTable> {
    spline.table(bandwidth)
}

/// `L f` as a per-frequency product `L̂[k] f̂[k]`.
pub fn apply_operator(op: &OperatorSpec, table: &SymbolTable) -> Result<SymbolTable> {
    if op.dim() != table.dim() {
        return Err(Error::Shape(format!(
            "operator has dimension {}, table has {}",
            op.dim(),
            table.dim()
        )));
    }
    let symbol = op.symbol_table(table.bandwidth())?;
    Ok(table.map(|k, c| symbol.coeff(&k) * c))
}

/// Largest deviation of `L f` from the innovation sum over `‖k‖∞ <= K`,
/// the origin included. Works on arbitrary weights, so a residual on `N_L`
/// exposes weights that violate `M a = 0`.
pub fn annihilation_check(
    op: &OperatorSpec,
    innov: &Innovations,
    null: &[(FreqIndex, Complex64)],
    bandwidth: usize,
) -> Result<f64> {
    check_dims(op, innov)?;
    let symbol = op.symbol_table(bandwidth)?;
    let pseudo = op.pseudo_table(bandwidth)?;
    let mut worst = 0.0_f64;
    for (k, l) in symbol.iter() {
        let shot = innov.transform(&k);
        let p = null.iter().find(|(f, _)| *f == k).map(|(_, v)| *v).unwrap_or_default();
        let f = pseudo.coeff(&k) * shot + p;
        worst = worst.max((l * f - shot).norm());
    }
    Ok(worst)
}
