//! Frequency-lattice bookkeeping and truncated Fourier synthesis on the torus.
//!
//! A periodic function on `T^d = R^d / 2πZ^d` is represented by its Fourier
//! sequence truncated to the cube `[-K, K]^d`, with the convention
//!
//! ```text
//! f̂[k] = (2π)^{-d} ∫ f(x) e^{-i<k,x>} dx,      f = Σ_k f̂[k] e^{i<k,x>}.
//! ```
//!
//! Under this convention the Dirac comb has all coefficients equal to one and
//! the bilinear pairing `(2π)^{-d} ∫ f g` reads `Σ_k f̂[k] ĝ[-k]`.

use std::f64::consts::TAU;
use std::fmt;
use std::ops::Neg;

use num_complex::Complex64;
use rustfft::{FftDirection, FftPlanner};

use crate::error::{Error, Result};

/// Largest supported ambient dimension.
pub const MAX_DIM: usize = 3;

pub(crate) fn check_dim(dim: usize) -> Result<()> {
    if (1..=MAX_DIM).contains(&dim) {
        Ok(())
    } else {
        Err(Error::Dimension(dim))
    }
}

/// A point of the frequency lattice `Z^d`, `d ∈ {1, 2, 3}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FreqIndex {
    dim: u8,
    comps: [i64; MAX_DIM],
}

impl FreqIndex {
    pub fn new(components: &[i64]) -> Result<Self> {
        check_dim(components.len())?;
        let mut comps = [0; MAX_DIM];
        comps[..components.len()].copy_from_slice(components);
        Ok(Self {
            dim: components.len() as u8,
            comps,
        })
    }

    /// Univariate frequency.
    pub fn d1(k: i64) -> Self {
        Self {
            dim: 1,
            comps: [k, 0, 0],
        }
    }

    pub fn zero(dim: usize) -> Result<Self> {
        check_dim(dim)?;
        Ok(Self {
            dim: dim as u8,
            comps: [0; MAX_DIM],
        })
    }

    pub fn dim(&self) -> usize {
        self.dim as usize
    }

    pub fn components(&self) -> &[i64] {
        &self.comps[..self.dim()]
    }

    pub fn is_zero(&self) -> bool {
        self.comps == [0; MAX_DIM]
    }

    pub fn norm_sq(&self) -> i64 {
        self.components().iter().map(|k| k * k).sum()
    }

    pub fn norm(&self) -> f64 {
        (self.norm_sq() as f64).sqrt()
    }

    /// `max_a |k_a|`.
    pub fn max_abs(&self) -> i64 {
        self.components().iter().map(|k| k.abs()).max().unwrap_or(0)
    }

    /// The inner product `<k, x>`.
    pub fn phase(&self, x: &[f64]) -> f64 {
        self.components().iter().zip(x).map(|(&k, &xa)| k as f64 * xa).sum()
    }

    /// True when the first nonzero component is positive. Exactly one of
    /// `k`, `-k` is canonical for `k != 0`.
    pub fn is_canonical(&self) -> bool {
        self.components().iter().find(|&&c| c != 0).is_some_and(|&c| c > 0)
    }
}

impl Neg for FreqIndex {
    type Output = FreqIndex;

    fn neg(self) -> FreqIndex {
        let mut comps = self.comps;
        for c in &mut comps {
            *c = -*c;
        }
        FreqIndex { dim: self.dim, comps }
    }
}

impl fmt::Display for FreqIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.components().iter().map(|c| c.to_string()).collect();
        if parts.len() == 1 {
            write!(f, "{}", parts[0])
        } else {
            write!(f, "({})", parts.join(", "))
        }
    }
}

/// Iterates the cube `[-K, K]^d` in row-major order (first axis slowest).
pub fn lattice(dim: usize, bandwidth: usize) -> impl Iterator<Item = FreqIndex> {
    let side = 2 * bandwidth + 1;
    let total = side.pow(dim as u32);
    let k = bandwidth as i64;
    (0..total).map(move |mut flat| {
        let mut comps = [0i64; MAX_DIM];
        for a in (0..dim).rev() {
            comps[a] = (flat % side) as i64 - k;
            flat /= side;
        }
        FreqIndex { dim: dim as u8, comps }
    })
}

/// Truncated Fourier sequence over `[-K, K]^d`.
#[derive(Clone, Debug, PartialEq)]
pub struct SymbolTable {
    dim: usize,
    bandwidth: usize,
    coeffs: Vec<Complex64>,
    hermitian: bool,
}

impl SymbolTable {
    pub fn zeros(dim: usize, bandwidth: usize) -> Result<Self> {
        check_dim(dim)?;
        Ok(Self {
            dim,
            bandwidth,
            coeffs: vec![Complex64::new(0.0, 0.0); (2 * bandwidth + 1).pow(dim as u32)],
            hermitian: true,
        })
    }

    /// Builds a table from an arbitrary coefficient function. The hermitian
    /// flag is set only if `c[-k] == conj(c[k])` holds exactly.
    pub fn from_fn(dim: usize, bandwidth: usize, mut f: impl FnMut(FreqIndex) -> Complex64) -> Result<Self> {
        let mut table = Self::zeros(dim, bandwidth)?;
        for (slot, k) in table.coeffs.iter_mut().zip(lattice(dim, bandwidth)) {
            *slot = f(k);
        }
        table.hermitian = table.check_hermitian();
        Ok(table)
    }

    /// Builds a hermitian table: `f` is evaluated on the canonical half of the
    /// lattice (and at the origin, where only the real part is kept) and the
    /// other half is filled by conjugation.
    pub fn hermitian_from_fn(dim: usize, bandwidth: usize, mut f: impl FnMut(FreqIndex) -> Complex64) -> Result<Self> {
        let mut table = Self::zeros(dim, bandwidth)?;
        let len = table.coeffs.len();
        let center = len / 2;
        for (i, k) in lattice(dim, bandwidth).enumerate().skip(center) {
            let v = f(k);
            if i == center {
                table.coeffs[i] = Complex64::new(v.re, 0.0);
            } else {
                table.coeffs[i] = v;
                table.coeffs[len - 1 - i] = v.conj();
            }
        }
        Ok(table)
    }

    /// The Dirac comb: every coefficient equal to one.
    pub fn dirac_comb(dim: usize, bandwidth: usize) -> Result<Self> {
        Self::hermitian_from_fn(dim, bandwidth, |_| Complex64::new(1.0, 0.0))
    }

    pub fn constant(dim: usize, bandwidth: usize, value: f64) -> Result<Self> {
        let mut t = Self::zeros(dim, bandwidth)?;
        let c = t.coeffs.len() / 2;
        t.coeffs[c] = Complex64::new(value, 0.0);
        Ok(t)
    }

    /// `cos(<k, x>)`.
    pub fn cosine(k: FreqIndex, bandwidth: usize) -> Result<Self> {
        Self::real_mode(k, bandwidth, Complex64::new(0.5, 0.0))
    }

    /// `sin(<k, x>)`.
    pub fn sine(k: FreqIndex, bandwidth: usize) -> Result<Self> {
        Self::real_mode(k, bandwidth, Complex64::new(0.0, -0.5))
    }

    fn real_mode(k: FreqIndex, bandwidth: usize, c: Complex64) -> Result<Self> {
        if k.max_abs() > bandwidth as i64 {
            return Err(Error::Shape(format!("frequency {k} outside bandwidth {bandwidth}")));
        }
        let mut t = Self::zeros(k.dim(), bandwidth)?;
        if k.is_zero() {
            let center = t.coeffs.len() / 2;
            t.coeffs[center] = Complex64::new(2.0 * c.re, 0.0);
            return Ok(t);
        }
        let i = t.offset(&k).expect("checked above");
        let j = t.offset(&-k).expect("checked above");
        t.coeffs[i] = c;
        t.coeffs[j] = c.conj();
        Ok(t)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn bandwidth(&self) -> usize {
        self.bandwidth
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermitian
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Coefficients in row-major lattice order.
    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn indices(&self) -> impl Iterator<Item = FreqIndex> {
        lattice(self.dim, self.bandwidth)
    }

    pub fn iter(&self) -> impl Iterator<Item = (FreqIndex, Complex64)> + '_ {
        self.indices().zip(self.coeffs.iter().copied())
    }

    fn offset(&self, k: &FreqIndex) -> Option<usize> {
        if k.dim() != self.dim || k.max_abs() > self.bandwidth as i64 {
            return None;
        }
        let side = 2 * self.bandwidth + 1;
        Some(
            k.components()
                .iter()
                .fold(0, |acc, &c| acc * side + (c + self.bandwidth as i64) as usize),
        )
    }

    pub fn get(&self, k: &FreqIndex) -> Option<Complex64> {
        self.offset(k).map(|i| self.coeffs[i])
    }

    /// Coefficient at `k`, zero outside the retained lattice.
    pub fn coeff(&self, k: &FreqIndex) -> Complex64 {
        self.get(k).unwrap_or_default()
    }

    /// Overwrites one coefficient; the hermitian flag is recomputed.
    pub fn set(&mut self, k: &FreqIndex, value: Complex64) -> Result<()> {
        let i = self
            .offset(k)
            .ok_or_else(|| Error::Shape(format!("frequency {k} outside table")))?;
        self.coeffs[i] = value;
        self.hermitian = self.check_hermitian();
        Ok(())
    }

    fn check_hermitian(&self) -> bool {
        let n = self.coeffs.len();
        (0..=n / 2).all(|i| self.coeffs[n - 1 - i] == self.coeffs[i].conj())
    }

    /// Per-coefficient map; the hermitian flag is recomputed.
    pub fn map(&self, mut f: impl FnMut(FreqIndex, Complex64) -> Complex64) -> Self {
        let coeffs = self.iter().map(|(k, c)| f(k, c)).collect();
        let mut out = Self {
            dim: self.dim,
            bandwidth: self.bandwidth,
            coeffs,
            hermitian: false,
        };
        out.hermitian = out.check_hermitian();
        out
    }

    /// `alpha * a + beta * b` for tables of identical shape.
    pub fn linear_combination(alpha: f64, a: &Self, beta: f64, b: &Self) -> Result<Self> {
        a.check_same_shape(b)?;
        let coeffs: Vec<Complex64> = a
            .coeffs
            .iter()
            .zip(&b.coeffs)
            .map(|(x, y)| x * alpha + y * beta)
            .collect();
        let mut out = Self {
            dim: a.dim,
            bandwidth: a.bandwidth,
            coeffs,
            hermitian: false,
        };
        out.hermitian = out.check_hermitian();
        Ok(out)
    }

    pub fn scaled(&self, s: f64) -> Self {
        self.map(|_, c| c * s)
    }

    /// The table of `f(· - s)`.
    pub fn shifted(&self, s: &[f64]) -> Self {
        self.map(|k, c| c * Complex64::from_polar(1.0, -k.phase(s)))
    }

    /// Truncates or zero-pads to a new bandwidth.
    pub fn with_bandwidth(&self, bandwidth: usize) -> Self {
        let mut out = Self::zeros(self.dim, bandwidth).expect("dimension already validated");
        for (slot, k) in out.coeffs.iter_mut().zip(lattice(self.dim, bandwidth)) {
            *slot = self.coeff(&k);
        }
        out.hermitian = out.check_hermitian();
        out
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub(crate) fn check_same_shape(&self, other: &Self) -> Result<()> {
        if self.dim != other.dim || self.bandwidth != other.bandwidth {
            return Err(Error::Shape(format!(
                "tables differ: (d={}, K={}) vs (d={}, K={})",
                self.dim, self.bandwidth, other.dim, other.bandwidth
            )));
        }
        Ok(())
    }

    /// Direct evaluation `Σ_k c[k] e^{i<k,x>}` at an arbitrary point.
    pub fn evaluate(&self, x: &[f64]) -> Complex64 {
        self.iter()
            .map(|(k, c)| c * Complex64::from_polar(1.0, k.phase(x)))
            .sum()
    }
}

/// Samples of a real function on the uniform grid `x_j = 2πj/n` per axis,
/// stored row-major (first axis slowest).
#[derive(Clone, Debug, PartialEq)]
pub struct GridFunction {
    dim: usize,
    n: usize,
    values: Vec<f64>,
}

impl GridFunction {
    pub fn new(dim: usize, n: usize, values: Vec<f64>) -> Result<Self> {
        check_dim(dim)?;
        if n == 0 || values.len() != n.pow(dim as u32) {
            return Err(Error::Shape(format!(
                "expected {}^{} samples, got {}",
                n,
                dim,
                values.len()
            )));
        }
        Ok(Self { dim, n, values })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn samples_per_axis(&self) -> usize {
        self.n
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    /// Grid coordinate `2πj/n`.
    pub fn coordinate(&self, j: usize) -> f64 {
        TAU * j as f64 / self.n as f64
    }

    /// Per-axis grid indices of the flat sample `flat`.
    pub fn multi_index(&self, mut flat: usize) -> [usize; MAX_DIM] {
        let mut idx = [0; MAX_DIM];
        for a in (0..self.dim).rev() {
            idx[a] = flat % self.n;
            flat /= self.n;
        }
        idx
    }

    /// Sample points (radians) paired with their values, row-major.
    pub fn points(&self) -> impl Iterator<Item = (Vec<f64>, f64)> + '_ {
        self.values.iter().enumerate().map(move |(flat, &v)| {
            let idx = self.multi_index(flat);
            let x = idx[..self.dim].iter().map(|&j| self.coordinate(j)).collect();
            (x, v)
        })
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self {
            dim: self.dim,
            n: self.n,
            values: self.values.iter().map(|v| v * s).collect(),
        }
    }
}

/// Frequency weighting applied before synthesis.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Smoothing {
    #[default]
    None,
    /// Per-axis triangular weights `1 - |k_a| / (K + 1)`.
    Fejer,
}

impl Smoothing {
    pub fn weight(self, k: &FreqIndex, bandwidth: usize) -> f64 {
        match self {
            Smoothing::None => 1.0,
            Smoothing::Fejer => k
                .components()
                .iter()
                .map(|&c| 1.0 - c.unsigned_abs() as f64 / (bandwidth as f64 + 1.0))
                .product(),
        }
    }
}

/// Smallest power of two `n >= 2K + 2`.
pub fn default_grid_size(bandwidth: usize) -> usize {
    (2 * bandwidth + 2).next_power_of_two()
}

/// Default bandwidth per dimension.
pub fn default_bandwidth(dim: usize) -> usize {
    match dim {
        1 => 512,
        2 => 64,
        _ => 32,
    }
}

fn check_grid(n: usize, bandwidth: usize) -> Result<()> {
    if !n.is_power_of_two() {
        return Err(Error::GridSize {
            n,
            reason: "not a power of two".into(),
        });
    }
    if n < 2 * bandwidth + 2 {
        return Err(Error::GridSize {
            n,
            reason: format!("must be at least 2K+2 = {}", 2 * bandwidth + 2),
        });
    }
    Ok(())
}

/// In-place multidimensional FFT over a row-major `n^d` buffer.
/// `Inverse` computes the unnormalized sum `Σ X[k] e^{+2πi jk/n}`.
pub(crate) fn fft_nd(buf: &mut [Complex64], dim: usize, n: usize, direction: FftDirection) {
    let mut planner = FftPlanner::new();
    let fft = planner.plan_fft(n, direction);
    let mut line = vec![Complex64::default(); n];
    let mut scratch = vec![Complex64::default(); fft.get_inplace_scratch_len()];
    for axis in 0..dim {
        let stride = n.pow((dim - 1 - axis) as u32);
        let block = stride * n;
        for outer in (0..buf.len()).step_by(block) {
            for inner in 0..stride {
                let base = outer + inner;
                for (j, slot) in line.iter_mut().enumerate() {
                    *slot = buf[base + j * stride];
                }
                fft.process_with_scratch(&mut line, &mut scratch);
                for (j, v) in line.iter().enumerate() {
                    buf[base + j * stride] = *v;
                }
            }
        }
    }
}

fn wrap_index(k: i64, n: usize) -> usize {
    k.rem_euclid(n as i64) as usize
}

pub(crate) fn grid_offset(k: &FreqIndex, n: usize) -> usize {
    k.components().iter().fold(0, |acc, &c| acc * n + wrap_index(c, n))
}

/// Samples `Σ_k w(k) c[k] e^{i<k, x_j>}` on the uniform grid with `n`
/// samples per axis via FFT.
///
/// ```
/// use torus_splines::fourier::{synthesize, FreqIndex, Smoothing, SymbolTable};
/// use num_complex::Complex64;
///
/// let mut t = SymbolTable::zeros(1, 4).unwrap();
/// t.set(&FreqIndex::d1(1), Complex64::new(0.5, 0.0)).unwrap();
/// t.set(&FreqIndex::d1(-1), Complex64::new(0.5, 0.0)).unwrap();
/// let g = synthesize(&t, 16, Smoothing::None).unwrap();
/// assert!((g.values()[4] - (std::f64::consts::PI / 2.0).cos()).abs() < 1e-12);
/// ```
pub fn synthesize(table: &SymbolTable, n: usize, smoothing: Smoothing) -> Result<GridFunction> {
    if !table.is_hermitian() {
        return Err(Error::NotHermitian);
    }
    check_grid(n, table.bandwidth())?;
    let dim = table.dim();
    let mut buf = vec![Complex64::default(); n.pow(dim as u32)];
    for (k, c) in table.iter() {
        buf[grid_offset(&k, n)] = c * smoothing.weight(&k, table.bandwidth());
    }
    fft_nd(&mut buf, dim, n, FftDirection::Inverse);
    GridFunction::new(dim, n, buf.into_iter().map(|z| z.re).collect())
}

/// Fourier coefficients of grid samples, `|k_a| <= K`, computed by the
/// trapezoidal rule (forward FFT divided by `n^d`). Requires `n >= 2K + 2`;
/// the result is symmetrized to be exactly hermitian.
pub fn analyze(grid: &GridFunction, bandwidth: usize) -> Result<SymbolTable> {
    let n = grid.samples_per_axis();
    check_grid(n, bandwidth)?;
    let dim = grid.dim();
    let mut buf: Vec<Complex64> = grid.values().iter().map(|&v| Complex64::new(v, 0.0)).collect();
    fft_nd(&mut buf, dim, n, FftDirection::Forward);
    let norm = 1.0 / buf.len() as f64;
    SymbolTable::hermitian_from_fn(dim, bandwidth, |k| {
        let a = buf[grid_offset(&k, n)];
        let b = buf[grid_offset(&-k, n)].conj();
        (a + b) * (0.5 * norm)
    })
}

/// The bilinear pairing `(2π)^{-d} ∫ f g = Σ_k f̂[k] ĝ[-k]`.
pub fn pair(f: &SymbolTable, g: &SymbolTable) -> Result<Complex64> {
    f.check_same_shape(g)?;
    // g's lattice is symmetric, so ĝ[-k] is the mirrored flat index.
    let n = g.coeffs.len();
    Ok(f.coeffs.iter().enumerate().map(|(i, a)| a * g.coeffs[n - 1 - i]).sum())
}

/// `( Σ_k (1 + |k|²)^τ |f̂[k]|² )^{1/2}` over the retained lattice.
pub fn sobolev_norm(table: &SymbolTable, tau: f64) -> f64 {
    table
        .iter()
        .map(|(k, c)| (1.0 + k.norm_sq() as f64).powf(tau) * c.norm_sqr())
        .sum::<f64>()
        .sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn cos_table(bandwidth: usize) -> SymbolTable {
        SymbolTable::cosine(FreqIndex::d1(1), bandwidth).unwrap()
    }

    #[test]
    fn lattice_order_is_row_major() {
        let ks: Vec<_> = lattice(2, 1).map(|k| k.components().to_vec()).collect();
        assert_eq!(ks.len(), 9);
        assert_eq!(ks[0], vec![-1, -1]);
        assert_eq!(ks[1], vec![-1, 0]);
        assert_eq!(ks[4], vec![0, 0]);
        assert_eq!(ks[8], vec![1, 1]);
    }

    #[test]
    fn mirrored_offset_is_negation() {
        let t = SymbolTable::zeros(3, 2).unwrap();
        for (i, k) in t.indices().enumerate() {
            assert_eq!(t.offset(&-k), Some(t.len() - 1 - i));
        }
    }

    #[test]
    fn constant_table_synthesizes_constant() {
        let t = SymbolTable::constant(2, 3, 2.5).unwrap();
        let g = synthesize(&t, 8, Smoothing::None).unwrap();
        assert!(g.values().iter().all(|&v| (v - 2.5).abs() < 1e-14));
    }

    #[test]
    fn single_mode_is_cosine() {
        let g = synthesize(&cos_table(5), 32, Smoothing::None).unwrap();
        for (x, v) in g.points() {
            assert!((v - x[0].cos()).abs() < 1e-12);
        }
    }

    #[test]
    fn synthesis_rejects_bad_input() {
        let t = cos_table(5);
        assert!(matches!(
            synthesize(&t, 24, Smoothing::None),
            Err(Error::GridSize { .. })
        ));
        assert!(matches!(
            synthesize(&t, 8, Smoothing::None),
            Err(Error::GridSize { .. })
        ));
        let mut skew = t.clone();
        skew.set(&FreqIndex::d1(2), Complex64::new(1.0, 0.0)).unwrap();
        assert!(!skew.is_hermitian());
        assert!(matches!(
            synthesize(&skew, 16, Smoothing::None),
            Err(Error::NotHermitian)
        ));
    }

    #[test]
    fn sawtooth_converges_to_pi_minus_x() {
        let k_max = 2048;
        let t = SymbolTable::hermitian_from_fn(1, k_max, |k| {
            let k = k.components()[0];
            if k == 0 {
                Complex64::default()
            } else {
                Complex64::new(0.0, -1.0 / k as f64)
            }
        })
        .unwrap();
        let g = synthesize(&t, 8192, Smoothing::None).unwrap();
        for (x, v) in g.points() {
            if x[0] > 0.5 && x[0] < TAU - 0.5 {
                assert!((v - (PI - x[0])).abs() < 2e-3, "x={} v={}", x[0], v);
            }
        }
    }

    #[test]
    fn pairing_examples() {
        let k = FreqIndex::d1(3);
        let mut e = SymbolTable::zeros(1, 4).unwrap();
        e.set(&k, Complex64::new(1.0, 0.0)).unwrap();
        let mut e_neg = SymbolTable::zeros(1, 4).unwrap();
        e_neg.set(&-k, Complex64::new(1.0, 0.0)).unwrap();
        assert_eq!(pair(&e, &e_neg).unwrap(), Complex64::new(1.0, 0.0));

        let c = cos_table(4);
        assert!((pair(&c, &c).unwrap() - Complex64::new(0.5, 0.0)).norm() < 1e-15);

        let comb = SymbolTable::dirac_comb(1, 4).unwrap();
        let g = SymbolTable::from_fn(1, 4, |k| Complex64::new(k.components()[0] as f64, 1.0)).unwrap();
        let total: Complex64 = g.coeffs().iter().sum();
        assert_eq!(pair(&comb, &g).unwrap(), total);

        let other = SymbolTable::zeros(1, 5).unwrap();
        assert!(pair(&c, &other).is_err());
    }

    #[test]
    fn sobolev_norm_examples() {
        assert_eq!(sobolev_norm(&SymbolTable::zeros(2, 3).unwrap(), 1.5), 0.0);
        let k0 = FreqIndex::new(&[1, 2]).unwrap();
        let mut t = SymbolTable::zeros(2, 3).unwrap();
        t.set(&k0, Complex64::new(1.0, 0.0)).unwrap();
        assert!((sobolev_norm(&t, 1.0) - 6f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn fejer_weight_is_triangular() {
        let k = FreqIndex::new(&[2, -1]).unwrap();
        let w = Smoothing::Fejer.weight(&k, 3);
        assert!((w - 0.5 * 0.75).abs() < 1e-15);
        assert_eq!(Smoothing::None.weight(&k, 3), 1.0);
    }

    #[test]
    fn default_grid_covers_band() {
        assert_eq!(default_grid_size(512), 2048);
        assert_eq!(default_grid_size(3), 8);
        assert_eq!(default_bandwidth(2), 64);
    }
}
