//! Linear measurement functionals and admissibility analysis.
//!
//! A functional is a spatial sample `f(x₀)`, the real or imaginary part of a
//! Fourier coefficient, or pairing against a square-integrable profile.
//! Every functional acts on a truncated table through complex weights
//! `d[k]` with `ν(f) = Σ_k d[k] f̂[k]` whenever `f` is real.

use std::fmt;
use std::path::Path;

use nalgebra::{DMatrix, SVD};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fourier::{analyze, check_dim, lattice, pair, FreqIndex, SymbolTable};
use crate::operators::grammar::Params;
use crate::operators::{Family, OperatorSpec};
use crate::spline::null_real_basis;

/// Real or imaginary part of a Fourier coefficient.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Part {
    Re,
    Im,
}

/// A measurement functional.
#[derive(Clone, Debug, PartialEq)]
pub enum Functional {
    /// `f(x₀)`.
    Spatial(Vec<f64>),
    /// `Re f̂[k]` or `Im f̂[k]`.
    Fourier { k: FreqIndex, part: Part },
    /// `(2π)^{-d} ∫ φ f` for a real profile `φ` given by its table.
    Profile { table: SymbolTable, source: Option<String> },
}

impl Functional {
    pub fn spatial(x: &[f64]) -> Result<Self> {
        check_dim(x.len())?;
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::Functional("sample location must be finite".into()));
        }
        Ok(Self::Spatial(x.to_vec()))
    }

    pub fn fourier(k: FreqIndex, part: Part) -> Result<Self> {
        if part == Part::Im && k.is_zero() {
            return Err(Error::Functional("imaginary part at k = 0 is identically zero".into()));
        }
        Ok(Self::Fourier { k, part })
    }

    pub fn profile(table: SymbolTable) -> Result<Self> {
        if !table.is_hermitian() {
            return Err(Error::Functional("profile must be a real function".into()));
        }
        Ok(Self::Profile { table, source: None })
    }

    pub fn dim(&self) -> usize {
        match self {
            Self::Spatial(x) => x.len(),
            Self::Fourier { k, .. } => k.dim(),
            Self::Profile { table, .. } => table.dim(),
        }
    }

    pub fn is_spatial(&self) -> bool {
        matches!(self, Self::Spatial(_))
    }

    /// Weight `d[k]` with `ν(f) = Σ_k d[k] f̂[k]` for real `f`.
    pub fn dual_coeff(&self, k: &FreqIndex) -> Complex64 {
        match self {
            Self::Spatial(x) => Complex64::from_polar(1.0, k.phase(x)),
            Self::Fourier { k: k0, part } => {
                let hit = (k == k0) as u8 as f64;
                let mirror = (*k == -*k0) as u8 as f64;
                match part {
                    Part::Re => Complex64::new(0.5 * (hit + mirror), 0.0),
                    Part::Im => Complex64::new(0.0, -0.5 * (hit - mirror)),
                }
            }
            Self::Profile { table, .. } => table.coeff(&-*k),
        }
    }

    fn check_dim(&self, dim: usize) -> Result<()> {
        if self.dim() != dim {
            return Err(Error::Shape(format!(
                "functional has dimension {}, expected {dim}",
                self.dim()
            )));
        }
        Ok(())
    }

    /// Parses `spatial:x=..[,y=..,z=..]`, `fourier:k=..[,..],part=re|im` or
    /// `profile:file=..`. Profile files hold samples on a uniform grid and are
    /// converted to a table with the largest alias-free bandwidth.
    pub fn parse(text: &str, dim: usize) -> Result<Self> {
        Self::parse_in(text, dim, None)
    }

    /// As [`Functional::parse`], resolving relative file names against `base`.
    pub fn parse_in(text: &str, dim: usize, base: Option<&Path>) -> Result<Self> {
        let text = text.trim();
        let (kind, body) = text
            .split_once(':')
            .ok_or_else(|| Error::Parse(format!("functional '{text}' lacks a 'kind:' prefix")))?;
        let kind = kind.trim().to_ascii_lowercase();
        let p = Params::parse(&kind, body)?;
        let f = match kind.as_str() {
            "spatial" => {
                let axes = ["x", "y", "z"];
                p.check_keys(&axes[..dim.min(3)])?;
                let x = axes[..dim.min(3)]
                    .iter()
                    .map(|a| p.num::<f64>(a))
                    .collect::<Result<Vec<_>>>()?;
                Self::spatial(&x)?
            }
            "fourier" => {
                p.check_keys(&["k", "part"])?;
                let k: Vec<i64> = p
                    .list("k")?
                    .ok_or_else(|| Error::Parse("fourier: missing 'k'".into()))?;
                let part = match p.string("part")?.to_ascii_lowercase().as_str() {
                    "re" => Part::Re,
                    "im" => Part::Im,
                    other => return Err(Error::Parse(format!("fourier: part must be re or im, got '{other}'"))),
                };
                Self::fourier(FreqIndex::new(&k)?, part)?
            }
            "profile" => {
                p.check_keys(&["file"])?;
                let path = p.string("file")?;
                let grid = crate::io::read_grid_file(crate::io::resolve(base, &path))?;
                let bandwidth = (grid.samples_per_axis() / 2).saturating_sub(1);
                Self::Profile {
                    table: analyze(&grid, bandwidth)?,
                    source: Some(path),
                }
            }
            other => return Err(Error::Parse(format!("unknown functional kind '{other}'"))),
        };
        f.check_dim(dim)?;
        Ok(f)
    }
}

impl fmt::Display for Functional {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Spatial(x) => {
                let parts: Vec<String> = ["x", "y", "z"].iter().zip(x).map(|(a, v)| format!("{a}={v}")).collect();
                write!(f, "spatial:{}", parts.join(","))
            }
            Self::Fourier { k, part } => {
                let c: Vec<String> = k.components().iter().map(|c| c.to_string()).collect();
                let part = match part {
                    Part::Re => "re",
                    Part::Im => "im",
                };
                write!(f, "fourier:k={},part={part}", c.join(","))
            }
            Self::Profile { source, .. } => write!(f, "profile:file={}", source.as_deref().unwrap_or("<memory>")),
        }
    }
}

/// `ν(f)` for a real table.
pub fn measure(nu: &Functional, table: &SymbolTable) -> Result<f64> {
    nu.check_dim(table.dim())?;
    Ok(match nu {
        Functional::Spatial(x) => table.evaluate(x).re,
        Functional::Fourier { k, part } => {
            let c = table.coeff(k);
            match part {
                Part::Re => c.re,
                Part::Im => c.im,
            }
        }
        Functional::Profile { table: profile, .. } => {
            if profile.bandwidth() < table.bandwidth() {
                return Err(Error::Functional(format!(
                    "profile bandwidth {} is below table bandwidth {}",
                    profile.bandwidth(),
                    table.bandwidth()
                )));
            }
            pair(&profile.with_bandwidth(table.bandwidth()), table)?.re
        }
    })
}

/// A measurement-matrix entry and whether it rests on an undecided
/// sampling-admissibility verdict.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Column {
    pub value: f64,
    pub warning: bool,
}

/// Checks that `nu` may be applied to splines of `op`. Spatial samples are
/// refused for operators that are not sampling-admissible; an undecided
/// verdict yields a warning.
pub fn check_functional(nu: &Functional, op: &OperatorSpec) -> Result<bool> {
    nu.check_dim(op.dim())?;
    if !nu.is_spatial() {
        return Ok(false);
    }
    let v = sampling_admissible(op);
    match v.status {
        Verdict::Yes => Ok(false),
        Verdict::Indeterminate => Ok(true),
        Verdict::No => Err(Error::SamplingRefused(format!("{op} is not sampling-admissible ({v})"))),
    }
}

/// `⟨ν, g_L(· - t)⟩` truncated to `[-K, K]^d`.
pub fn measurement_column(nu: &Functional, op: &OperatorSpec, t: &[f64], bandwidth: usize) -> Result<Column> {
    let warning = check_functional(nu, op)?;
    if t.len() != op.dim() {
        return Err(Error::Shape(format!(
            "knot has {} coordinates, expected {}",
            t.len(),
            op.dim()
        )));
    }
    let green = op.green_table(bandwidth)?;
    let value: Complex64 = green
        .iter()
        .map(|(k, p)| nu.dual_coeff(&k) * p * Complex64::from_polar(1.0, -k.phase(t)))
        .sum();
    Ok(Column {
        value: value.re,
        warning,
    })
}

/// Three-valued admissibility decision.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Yes,
    No,
    Indeterminate,
}

/// Which rule decided a verdict.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Basis {
    Ell1Criterion,
    Ell2Criterion,
    GrowthCriterion,
    FamilyOverride,
    NoCriterion,
}

#[derive(Clone, Debug, PartialEq)]
pub struct AdmissibilityVerdict {
    pub status: Verdict,
    pub basis: Basis,
    pub note: String,
}

impl AdmissibilityVerdict {
    fn new(status: Verdict, basis: Basis, note: impl Into<String>) -> Self {
        Self {
            status,
            basis,
            note: note.into(),
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Yes => "Yes",
            Verdict::No => "No",
            Verdict::Indeterminate => "Indeterminate",
        })
    }
}

impl fmt::Display for Basis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Basis::Ell1Criterion => "ell1-criterion",
            Basis::Ell2Criterion => "ell2-criterion",
            Basis::GrowthCriterion => "growth-criterion",
            Basis::FamilyOverride => "family-override",
            Basis::NoCriterion => "no-criterion",
        })
    }
}

impl fmt::Display for AdmissibilityVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ({})", self.status, self.basis)
    }
}

fn threshold_verdict(yes: bool, note: String) -> AdmissibilityVerdict {
    let status = if yes { Verdict::Yes } else { Verdict::No };
    AdmissibilityVerdict::new(status, Basis::FamilyOverride, note)
}

fn combine_factors(verdicts: Vec<AdmissibilityVerdict>) -> AdmissibilityVerdict {
    let status = if verdicts.iter().all(|v| v.status == Verdict::Yes) {
        Verdict::Yes
    } else if verdicts.iter().any(|v| v.status == Verdict::No) {
        Verdict::No
    } else {
        Verdict::Indeterminate
    };
    let notes: Vec<String> = verdicts.iter().map(|v| v.to_string()).collect();
    AdmissibilityVerdict::new(status, Basis::FamilyOverride, format!("factors: {}", notes.join("; ")))
}

/// Bandwidths for the partial-sum tail test: sums at `K` and `2K`.
fn tail_bandwidth(dim: usize) -> usize {
    match dim {
        1 => 16384,
        2 => 256,
        _ => 32,
    }
}

const TAIL_RATIO: f64 = 1.01;

/// Partial sums of `|p̂[k]|^power` over the cubes of half-width `K` and `2K`.
fn partial_sums(op: &OperatorSpec, bandwidth: usize, power: i32) -> Option<(f64, f64)> {
    let (mut inner, mut outer) = (0.0, 0.0);
    for k in lattice(op.dim(), 2 * bandwidth) {
        let v = op.pseudo_symbol(&k).ok()?.norm().powi(power);
        outer += v;
        if k.max_abs() <= bandwidth as i64 {
            inner += v;
        }
    }
    Some((inner, outer))
}

fn generic_sampling(op: &OperatorSpec) -> AdmissibilityVerdict {
    let bandwidth = tail_bandwidth(op.dim());
    let ratio = |power| partial_sums(op, bandwidth, power).map(|(a, b)| if a > 0.0 { b / a } else { 1.0 });
    match (ratio(1), ratio(2)) {
        (Some(r1), _) if r1 <= TAIL_RATIO => AdmissibilityVerdict::new(
            Verdict::Yes,
            Basis::Ell1Criterion,
            format!("sum |p[k]| tail ratio {r1:.4} at K={bandwidth}"),
        ),
        (_, Some(r2)) if r2 > TAIL_RATIO => AdmissibilityVerdict::new(
            Verdict::No,
            Basis::Ell2Criterion,
            format!("sum |p[k]|^2 tail ratio {r2:.4} at K={bandwidth}"),
        ),
        _ => AdmissibilityVerdict::new(
            Verdict::Indeterminate,
            Basis::NoCriterion,
            "pseudoinverse symbol is square-summable but not numerically summable",
        ),
    }
}

/// Decides whether `f ↦ f(x₀)` is a valid measurement for splines of `op`.
///
/// Known families are decided by closed-form rules; anything else falls back
/// to numerical partial-sum tests on `Σ|p̂[k]|` (summable ⇒ Yes) and
/// `Σ|p̂[k]|²` (divergent ⇒ No).
pub fn sampling_admissible(op: &OperatorSpec) -> AdmissibilityVerdict {
    let d = op.dim();
    match op.family() {
        Family::DerivativePower { order } => threshold_verdict(
            *order > 1,
            format!("univariate, gamma = {order}, admissible iff gamma > 1"),
        ),
        Family::ExponentialShift { gamma, .. } | Family::FractionalDerivative { gamma } => threshold_verdict(
            *gamma > 1.0,
            format!("univariate, gamma = {gamma}, admissible iff gamma > 1"),
        ),
        Family::FractionalLaplacian { gamma } | Family::Sobolev { gamma, .. } => {
            if d == 1 {
                threshold_verdict(
                    *gamma > 1.0,
                    format!("univariate, gamma = {gamma}, admissible iff gamma > 1"),
                )
            } else if *gamma > d as f64 {
                threshold_verdict(true, format!("gamma = {gamma} > d = {d}"))
            } else if *gamma <= d as f64 / 2.0 {
                threshold_verdict(false, format!("gamma = {gamma} <= d/2 = {}", d as f64 / 2.0))
            } else {
                AdmissibilityVerdict::new(
                    Verdict::Indeterminate,
                    Basis::FamilyOverride,
                    format!("d/2 < gamma = {gamma} <= d: conjectured not admissible, unproven"),
                )
            }
        }
        Family::RadialGreen(_) => threshold_verdict(true, "radial Green's function is continuous".into()),
        Family::Separable(factors) => combine_factors(factors.iter().map(sampling_admissible).collect()),
        Family::ModulatedDerivative { .. } | Family::HarmonicPair { .. } => generic_sampling(op),
    }
}

/// Decides whether every square-integrable function is a valid measurement,
/// i.e. whether `Σ|p̂[k]|² < ∞`.
pub fn l2_admissible(op: &OperatorSpec) -> AdmissibilityVerdict {
    let d = op.dim() as f64;
    match op.family() {
        Family::RadialGreen(_) => AdmissibilityVerdict::new(
            Verdict::Yes,
            Basis::FamilyOverride,
            "sampling-admissible, hence square-summable",
        ),
        Family::Separable(factors) => combine_factors(factors.iter().map(l2_admissible).collect()),
        family => {
            let gamma = op.spectral_growth().expect("non-separable families declare a growth");
            let basis = match family {
                Family::ModulatedDerivative { .. } | Family::HarmonicPair { .. } => Basis::GrowthCriterion,
                _ => Basis::FamilyOverride,
            };
            let status = if gamma > d / 2.0 { Verdict::Yes } else { Verdict::No };
            AdmissibilityVerdict::new(
                status,
                basis,
                format!("gamma = {gamma}, admissible iff gamma > d/2 = {}", d / 2.0),
            )
        }
    }
}

fn numerical_rank(singular: impl Iterator<Item = f64>) -> usize {
    let s: Vec<f64> = singular.collect();
    let max = s.iter().copied().fold(0.0, f64::max);
    if max == 0.0 {
        return 0;
    }
    s.iter().filter(|&&v| v > 1e-10 * max).count()
}

/// True when the functionals separate the null space of `op`.
pub fn nullspace_injectivity(functionals: &[Functional], op: &OperatorSpec) -> Result<bool> {
    for nu in functionals {
        nu.check_dim(op.dim())?;
    }
    let null = op.null_frequencies();
    if null.is_empty() {
        return Ok(true);
    }
    if functionals.is_empty() {
        return Ok(false);
    }
    if op.is_real() {
        let basis = null_real_basis(op)?;
        let m = DMatrix::from_fn(functionals.len(), basis.len(), |i, j| {
            let nu = &functionals[i];
            let b = &basis[j];
            null.iter().map(|k| nu.dual_coeff(k) * b.coeff(k)).sum::<Complex64>().re
        });
        Ok(numerical_rank(SVD::new(m, false, false).singular_values.iter().copied()) == basis.len())
    } else {
        let m = DMatrix::from_fn(functionals.len(), null.len(), |i, j| {
            functionals[i].dual_coeff(&null[j])
        });
        Ok(numerical_rank(SVD::new(m, false, false).singular_values.iter().copied()) == null.len())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn d1(k: i64) -> FreqIndex {
        FreqIndex::d1(k)
    }

    #[test]
    fn measure_examples() {
        let cos = SymbolTable::cosine(d1(1), 8).unwrap();
        assert!((measure(&Functional::spatial(&[0.0]).unwrap(), &cos).unwrap() - 1.0).abs() < 1e-15);
        let c = SymbolTable::constant(1, 8, 3.5).unwrap();
        let f0 = Functional::fourier(d1(0), Part::Re).unwrap();
        assert_eq!(measure(&f0, &c).unwrap(), 3.5);
        let sin = SymbolTable::sine(d1(2), 8).unwrap();
        let im = Functional::fourier(d1(2), Part::Im).unwrap();
        assert_eq!(measure(&im, &sin).unwrap(), -0.5);
    }

    #[test]
    fn dual_coefficients_reproduce_measure() {
        let t = SymbolTable::hermitian_from_fn(1, 6, |k| {
            let c = k.components()[0] as f64;
            Complex64::new(1.0 / (1.0 + c * c), 0.3 * c / (2.0 + c * c))
        })
        .unwrap();
        let prof = Functional::profile(SymbolTable::cosine(d1(3), 6).unwrap()).unwrap();
        for nu in [
            Functional::spatial(&[0.4]).unwrap(),
            Functional::fourier(d1(0), Part::Re).unwrap(),
            Functional::fourier(d1(2), Part::Re).unwrap(),
            Functional::fourier(d1(-2), Part::Im).unwrap(),
            prof,
        ] {
            let via_dual: Complex64 = t.iter().map(|(k, c)| nu.dual_coeff(&k) * c).sum();
            let direct = measure(&nu, &t).unwrap();
            assert!(
                (via_dual.re - direct).abs() < 1e-14 && via_dual.im.abs() < 1e-14,
                "{nu}"
            );
        }
    }

    #[test]
    fn functional_validation() {
        assert!(Functional::fourier(d1(0), Part::Im).is_err());
        let mut t = SymbolTable::zeros(1, 4).unwrap();
        t.set(&d1(1), Complex64::new(1.0, 0.0)).unwrap();
        assert!(Functional::profile(t).is_err());
        let small = Functional::profile(SymbolTable::constant(1, 2, 1.0).unwrap()).unwrap();
        assert!(measure(&small, &SymbolTable::zeros(1, 4).unwrap()).is_err());
    }

    #[test]
    fn grammar_round_trip() {
        for (text, dim) in [
            ("spatial:x=0.5", 1),
            ("spatial:x=0.5,y=1.25", 2),
            ("fourier:k=3,part=re", 1),
            ("fourier:k=1,-2,part=im", 2),
        ] {
            let f = Functional::parse(text, dim).unwrap();
            assert_eq!(f.to_string(), text);
        }
        assert!(Functional::parse("spatial:x=1", 2).is_err());
        assert!(Functional::parse("fourier:k=0,part=im", 1).is_err());
        assert!(Functional::parse("fourier:k=1,part=both", 1).is_err());
        assert!(Functional::parse("delta:x=1", 1).is_err());
    }

    #[test]
    fn column_examples() {
        let op = OperatorSpec::sobolev(1, 2.0, 2.0).unwrap();
        let x0 = 0.9;
        let col = measurement_column(&Functional::spatial(&[x0]).unwrap(), &op, &[x0], 32).unwrap();
        let expected: f64 = (-32..=32).map(|k| 1.0 / (4.0 + (k * k) as f64)).sum();
        assert!((col.value - expected).abs() < 1e-14);
        assert!(!col.warning);
        let t = 0.7;
        let nu = Functional::fourier(d1(3), Part::Re).unwrap();
        let col = measurement_column(&nu, &op, &[t], 32).unwrap();
        let closed = (op.pseudo_symbol(&d1(3)).unwrap() * Complex64::from_polar(1.0, -3.0 * t)).re;
        assert!((col.value - closed).abs() < 1e-15);
        let d2 = OperatorSpec::derivative_power(2).unwrap();
        let nu0 = Functional::fourier(d1(0), Part::Re).unwrap();
        assert_eq!(measurement_column(&nu0, &d2, &[t], 16).unwrap().value, 0.0);
        let d = OperatorSpec::derivative_power(1).unwrap();
        assert!(matches!(
            measurement_column(&Functional::spatial(&[0.0]).unwrap(), &d, &[PI], 16),
            Err(Error::SamplingRefused(_))
        ));
    }

    #[test]
    fn sampling_examples() {
        let v = sampling_admissible(&OperatorSpec::fractional_derivative(1.5).unwrap());
        assert_eq!((v.status, v.basis), (Verdict::Yes, Basis::FamilyOverride));
        assert_eq!(v.to_string(), "Yes (family-override)");
        assert_eq!(
            sampling_admissible(&OperatorSpec::derivative_power(1).unwrap()).status,
            Verdict::No
        );
        assert_eq!(
            sampling_admissible(&OperatorSpec::fractional_laplacian(2, 1.0).unwrap()).status,
            Verdict::No
        );
        assert_eq!(
            sampling_admissible(&OperatorSpec::fractional_laplacian(2, 1.5).unwrap()).status,
            Verdict::Indeterminate
        );
    }

    #[test]
    fn generic_sampling_test() {
        let h = sampling_admissible(&OperatorSpec::harmonic_pair(d1(2)).unwrap());
        assert_eq!((h.status, h.basis), (Verdict::Yes, Basis::Ell1Criterion));
        let m = sampling_admissible(&OperatorSpec::modulated_derivative(1).unwrap());
        assert_eq!(m.status, Verdict::Indeterminate);
    }

    #[test]
    fn l2_examples() {
        assert_eq!(
            l2_admissible(&OperatorSpec::fractional_derivative(0.6).unwrap()).status,
            Verdict::Yes
        );
        assert_eq!(
            l2_admissible(&OperatorSpec::fractional_derivative(0.5).unwrap()).status,
            Verdict::No
        );
        assert_eq!(
            l2_admissible(&OperatorSpec::fractional_laplacian(2, 1.0).unwrap()).status,
            Verdict::No
        );
        let m = OperatorSpec::matern(2.5, 1.0, 16).unwrap();
        assert_eq!(l2_admissible(&m).status, Verdict::Yes);
    }

    #[test]
    fn injectivity_examples() {
        let op = OperatorSpec::derivative_power(3).unwrap();
        let with_mean = vec![
            Functional::fourier(d1(0), Part::Re).unwrap(),
            Functional::fourier(d1(2), Part::Re).unwrap(),
        ];
        assert!(nullspace_injectivity(&with_mean, &op).unwrap());
        let without = vec![Functional::fourier(d1(1), Part::Re).unwrap()];
        assert!(!nullspace_injectivity(&without, &op).unwrap());
        let sob = OperatorSpec::sobolev(1, 1.0, 2.0).unwrap();
        assert!(nullspace_injectivity(&[], &sob).unwrap());
        let h = OperatorSpec::harmonic_pair(d1(2)).unwrap();
        let one_phase = vec![Functional::spatial(&[0.0]).unwrap()];
        assert!(!nullspace_injectivity(&one_phase, &h).unwrap());
        let two = vec![
            Functional::spatial(&[0.0]).unwrap(),
            Functional::spatial(&[0.5]).unwrap(),
        ];
        assert!(nullspace_injectivity(&two, &h).unwrap());
    }
}
