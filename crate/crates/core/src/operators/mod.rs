//! Spline-admissible operators described by their Fourier symbols.
//!
//! An operator acts on `e_k` by multiplication with its symbol `L̂[k]`. The
//! catalog covers integer and fractional derivatives, exponential shifts,
//! harmonic and modulated operators, fractional Laplacians, Sobolev
//! operators, radial-Green operators (Matérn and compactly supported
//! profiles) and separable products of univariate factors.
//!
//! Every operator here has finitely many null frequencies
//! `N_L = {k : L̂[k] = 0}` and a pseudoinverse acting per frequency as
//! `1/L̂[k]` off `N_L` and `0` on it.

pub(crate) mod grammar;
pub mod radial;

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fourier::{check_dim, lattice, FreqIndex, SymbolTable};

pub use radial::{matern_radial, radial_green_coeffs, RadialGreen, RadialProfile};

/// Operator family and its parameters.
#[derive(Clone, Debug, PartialEq)]
pub enum Family {
    /// `D^N`, symbol `(ik)^N`.
    DerivativePower { order: u32 },
    /// `(D + α Id)^γ`, symbol `(ik + α)^γ` (principal branch).
    ExponentialShift { alpha: f64, gamma: f64 },
    /// `D - i k₀ Id`, symbol `i(k - k₀)`. Not a real operator unless `k₀ = 0`.
    ModulatedDerivative { k0: i64 },
    /// `Δ + |k₀|² Id`, symbol `|k₀|² - |k|²`.
    HarmonicPair { k0: FreqIndex },
    /// Weyl fractional derivative `D^γ`, symbol `|k|^γ e^{iπγ sign(k)/2}`.
    FractionalDerivative { gamma: f64 },
    /// `(-Δ)^{γ/2}`, symbol `|k|^γ`.
    FractionalLaplacian { gamma: f64 },
    /// `(α² Id - Δ)^{γ/2}`, symbol `(α² + |k|²)^{γ/2}`.
    Sobolev { alpha: f64, gamma: f64 },
    /// Operator whose Green's function is a restricted radial profile;
    /// symbol `1/ĝ[k]`.
    RadialGreen(RadialGreen),
    /// Product of univariate factors, one per axis.
    Separable(Vec<OperatorSpec>),
}

/// A spline-admissible operator on `T^d`.
#[derive(Clone, Debug, PartialEq)]
pub struct OperatorSpec {
    dim: usize,
    family: Family,
    null: Vec<FreqIndex>,
}

/// Max deviations of the per-frequency pseudoinverse relations.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct PseudoinverseReport {
    /// `max |L p L - L| / max(|L|, 1)`
    pub lpl: f64,
    /// `max |p L p - p| / max(|p|, 1)`
    pub plp: f64,
    /// `max |Im(L p)|`
    pub lp_self_adjoint: f64,
    /// `max |Im(p L)|`
    pub pl_self_adjoint: f64,
}

impl PseudoinverseReport {
    pub fn max(&self) -> f64 {
        self.lpl
            .max(self.plp)
            .max(self.lp_self_adjoint)
            .max(self.pl_self_adjoint)
    }
}

fn is_integer(x: f64) -> bool {
    x.fract() == 0.0 && x.abs() < 64.0
}

fn check_positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::Operator(format!("{name} must be positive and finite, got {v}")))
    }
}

impl OperatorSpec {
    fn build(dim: usize, family: Family) -> Result<Self> {
        check_dim(dim)?;
        let mut op = Self {
            dim,
            family,
            null: Vec::new(),
        };
        op.null = op.compute_null_frequencies();
        Ok(op)
    }

    fn univariate(family: Family) -> Result<Self> {
        Self::build(1, family)
    }

    pub fn derivative_power(order: u32) -> Result<Self> {
        if order == 0 {
            return Err(Error::Operator("derivative order must be at least 1".into()));
        }
        Self::univariate(Family::DerivativePower { order })
    }

    pub fn exponential_shift(alpha: f64, gamma: f64) -> Result<Self> {
        check_positive("gamma", gamma)?;
        if !alpha.is_finite() {
            return Err(Error::Operator("alpha must be finite".into()));
        }
        if alpha < 0.0 && !is_integer(gamma) {
            return Err(Error::Operator(
                "negative alpha with non-integer gamma has a non-real symbol at k = 0".into(),
            ));
        }
        Self::univariate(Family::ExponentialShift { alpha, gamma })
    }

    pub fn modulated_derivative(k0: i64) -> Result<Self> {
        Self::univariate(Family::ModulatedDerivative { k0 })
    }

    pub fn harmonic_pair(k0: FreqIndex) -> Result<Self> {
        Self::build(k0.dim(), Family::HarmonicPair { k0 })
    }

    pub fn fractional_derivative(gamma: f64) -> Result<Self> {
        check_positive("gamma", gamma)?;
        Self::univariate(Family::FractionalDerivative { gamma })
    }

    pub fn fractional_laplacian(dim: usize, gamma: f64) -> Result<Self> {
        check_positive("gamma", gamma)?;
        Self::build(dim, Family::FractionalLaplacian { gamma })
    }

    pub fn sobolev(dim: usize, alpha: f64, gamma: f64) -> Result<Self> {
        check_positive("gamma", gamma)?;
        if alpha == 0.0 || !alpha.is_finite() {
            return Err(Error::Operator("Sobolev operators require alpha != 0".into()));
        }
        Self::build(dim, Family::Sobolev { alpha, gamma })
    }

    /// Matérn operator; `ĝ[k]` cached for `|k| <= bandwidth`.
    pub fn matern(beta: f64, epsilon: f64, bandwidth: usize) -> Result<Self> {
        let green = RadialGreen::new(RadialProfile::Matern { beta }, epsilon, beta, bandwidth)?;
        Self::univariate(Family::RadialGreen(green))
    }

    /// Radial-Green operator with an arbitrary profile and declared smoothness `beta`.
    pub fn radial_green(profile: RadialProfile, epsilon: f64, beta: f64, bandwidth: usize) -> Result<Self> {
        let green = RadialGreen::new(profile, epsilon, beta, bandwidth)?;
        Self::univariate(Family::RadialGreen(green))
    }

    /// Separable product of univariate factors with trivial null spaces.
    pub fn separable(factors: Vec<OperatorSpec>) -> Result<Self> {
        check_dim(factors.len())?;
        for f in &factors {
            if f.dim != 1 {
                return Err(Error::Operator("separable factors must be univariate".into()));
            }
            if !f.null.is_empty() {
                return Err(Error::Operator(format!(
                    "separable factor {f} has a nontrivial null space; the product's null space would be infinite-dimensional"
                )));
            }
        }
        Self::build(factors.len(), Family::Separable(factors))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    /// True when the symbol satisfies `L̂[-k] = conj(L̂[k])`, i.e. the
    /// operator maps real functions to real functions.
    pub fn is_real(&self) -> bool {
        match &self.family {
            Family::ModulatedDerivative { k0 } => *k0 == 0,
            Family::Separable(f) => f.iter().all(|f| f.is_real()),
            _ => true,
        }
    }

    /// Largest `|k|∞` at which the symbol is available, if limited.
    pub fn max_frequency(&self) -> Option<i64> {
        match &self.family {
            Family::RadialGreen(g) => Some(g.max_frequency()),
            Family::Separable(f) => f.iter().filter_map(|f| f.max_frequency()).min(),
            _ => None,
        }
    }

    fn check_freq(&self, k: &FreqIndex) -> Result<()> {
        if k.dim() != self.dim {
            return Err(Error::Shape(format!(
                "frequency {k} has dimension {}, operator has {}",
                k.dim(),
                self.dim
            )));
        }
        Ok(())
    }

    /// The Fourier symbol `L̂[k]`.
    pub fn symbol(&self, k: &FreqIndex) -> Result<Complex64> {
        self.check_freq(k)?;
        let c = k.components();
        Ok(match &self.family {
            Family::DerivativePower { order } => Complex64::new(0.0, c[0] as f64).powu(*order),
            Family::ExponentialShift { alpha, gamma } => {
                let z = Complex64::new(*alpha, c[0] as f64);
                if is_integer(*gamma) {
                    z.powi(*gamma as i32)
                } else {
                    z.powf(*gamma)
                }
            }
            Family::ModulatedDerivative { k0 } => Complex64::new(0.0, (c[0] - k0) as f64),
            Family::HarmonicPair { k0 } => Complex64::new((k0.norm_sq() - k.norm_sq()) as f64, 0.0),
            Family::FractionalDerivative { gamma } => {
                if c[0] == 0 {
                    Complex64::default()
                } else {
                    let sign = c[0].signum() as f64;
                    Complex64::from_polar((c[0].abs() as f64).powf(*gamma), PI * gamma * sign / 2.0)
                }
            }
            Family::FractionalLaplacian { gamma } => Complex64::new((k.norm_sq() as f64).powf(gamma / 2.0), 0.0),
            Family::Sobolev { alpha, gamma } => {
                Complex64::new((alpha * alpha + k.norm_sq() as f64).powf(gamma / 2.0), 0.0)
            }
            Family::RadialGreen(g) => {
                let v = g.kernel_coeff(c[0]).ok_or_else(|| Error::OutOfRange {
                    k: k.to_string(),
                    max: g.max_frequency(),
                })?;
                Complex64::new(1.0 / v, 0.0)
            }
            Family::Separable(factors) => {
                let mut prod = Complex64::new(1.0, 0.0);
                for (f, &ka) in factors.iter().zip(c) {
                    prod *= f.symbol(&FreqIndex::d1(ka))?;
                }
                prod
            }
        })
    }

    fn compute_null_frequencies(&self) -> Vec<FreqIndex> {
        let zero = FreqIndex::zero(self.dim).expect("dimension validated");
        match &self.family {
            Family::DerivativePower { .. }
            | Family::FractionalDerivative { .. }
            | Family::FractionalLaplacian { .. } => vec![zero],
            Family::ExponentialShift { alpha, .. } => {
                if *alpha == 0.0 {
                    vec![zero]
                } else {
                    vec![]
                }
            }
            Family::ModulatedDerivative { k0 } => vec![FreqIndex::d1(*k0)],
            Family::HarmonicPair { k0 } => {
                let r2 = k0.norm_sq();
                let radius = k0.max_abs() as usize;
                lattice(self.dim, radius).filter(|k| k.norm_sq() == r2).collect()
            }
            Family::Sobolev { .. } | Family::RadialGreen(_) | Family::Separable(_) => vec![],
        }
    }

    /// The finite set `N_L`, sorted.
    pub fn null_frequencies(&self) -> &[FreqIndex] {
        &self.null
    }

    pub fn is_null_frequency(&self, k: &FreqIndex) -> bool {
        self.null.binary_search(k).is_ok()
    }

    /// Pseudoinverse symbol: `1/L̂[k]` off `N_L`, `0` on it.
    pub fn pseudo_symbol(&self, k: &FreqIndex) -> Result<Complex64> {
        if self.is_null_frequency(k) {
            self.check_freq(k)?;
            return Ok(Complex64::default());
        }
        Ok(self.symbol(k)?.inv())
    }

    /// Declared spectral growth `γ` (`|L̂[k]| ≍ |k|^γ`); `None` for
    /// anisotropic separable products.
    pub fn spectral_growth(&self) -> Option<f64> {
        match &self.family {
            Family::DerivativePower { order } => Some(*order as f64),
            Family::ExponentialShift { gamma, .. }
            | Family::FractionalDerivative { gamma }
            | Family::FractionalLaplacian { gamma }
            | Family::Sobolev { gamma, .. } => Some(*gamma),
            Family::ModulatedDerivative { .. } => Some(1.0),
            Family::HarmonicPair { .. } => Some(2.0),
            Family::RadialGreen(g) => Some(2.0 * (g.beta - 0.5)),
            Family::Separable(_) => None,
        }
    }

    /// Table of `L̂[k]` over `[-K, K]^d`.
    pub fn symbol_table(&self, bandwidth: usize) -> Result<SymbolTable> {
        self.table_of(bandwidth, |k| self.symbol(k))
    }

    /// Table of the pseudoinverse symbol over `[-K, K]^d`.
    pub fn pseudo_table(&self, bandwidth: usize) -> Result<SymbolTable> {
        self.table_of(bandwidth, |k| self.pseudo_symbol(k))
    }

    fn table_of(&self, bandwidth: usize, f: impl Fn(&FreqIndex) -> Result<Complex64>) -> Result<SymbolTable> {
        if let Some(max) = self.max_frequency() {
            if bandwidth as i64 > max {
                return Err(Error::OutOfRange {
                    k: bandwidth.to_string(),
                    max,
                });
            }
        }
        let mut err = None;
        let mut eval = |k: FreqIndex| match f(&k) {
            Ok(v) => v,
            Err(e) => {
                err.get_or_insert(e);
                Complex64::default()
            }
        };
        let table = if self.is_real() {
            SymbolTable::hermitian_from_fn(self.dim, bandwidth, &mut eval)?
        } else {
            SymbolTable::from_fn(self.dim, bandwidth, &mut eval)?
        };
        match err {
            Some(e) => Err(e),
            None => Ok(table),
        }
    }

    /// The Green's function `g_L = L†Ш` truncated to `[-K, K]^d`.
    pub fn green_table(&self, bandwidth: usize) -> Result<SymbolTable> {
        self.pseudo_table(bandwidth)
    }

    /// Checks the pseudoinverse relations frequency by frequency.
    pub fn verify_pseudoinverse(&self, bandwidth: usize) -> Result<PseudoinverseReport> {
        let l = self.symbol_table(bandwidth)?;
        let p = self.pseudo_table(bandwidth)?;
        verify_pseudoinverse_tables(&l, &p)
    }
}

/// Per-frequency check of `L p L = L`, `p L p = p` and the realness of
/// `L p` and `p L` for explicit symbol tables.
pub fn verify_pseudoinverse_tables(symbol: &SymbolTable, pseudo: &SymbolTable) -> Result<PseudoinverseReport> {
    symbol.check_same_shape(pseudo)?;
    let mut r = PseudoinverseReport::default();
    for (&l, &p) in symbol.coeffs().iter().zip(pseudo.coeffs()) {
        r.lpl = r.lpl.max((l * p * l - l).norm() / l.norm().max(1.0));
        r.plp = r.plp.max((p * l * p - p).norm() / p.norm().max(1.0));
        r.lp_self_adjoint = r.lp_self_adjoint.max((l * p).im.abs());
        r.pl_self_adjoint = r.pl_self_adjoint.max((p * l).im.abs());
    }
    Ok(r)
}
