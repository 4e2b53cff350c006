//! Radial profiles restricted to the circle and the Fourier coefficients of
//! the resulting periodic kernels.
//!
//! A profile `G: [0, ∞) → R` and a scale `ε > 0` define the periodic kernel
//! `g(x) = G(ε^{-1} sqrt(2 - 2 cos x))`, the restriction of the planar radial
//! function `G(|·|/ε)` to the unit circle. When `G` reproduces a Sobolev space
//! of the plane, the coefficients of `g` are positive and decay like
//! `(1 + ε|k|)^{-2(β - 1/2)}`, so `1/ĝ[k]` is the symbol of an invertible
//! operator whose Green's function is `g`.

use std::f64::consts::TAU;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::FftDirection;
use statrs::function::gamma::gamma;

use crate::error::{Error, Result};
use crate::fourier::{fft_nd, SymbolTable};

/// Step of the trapezoidal rule used for `K_ν`.
const BESSEL_STEP: f64 = 0.05;

/// Modified Bessel function of the second kind `K_ν(x)`, `x > 0`, from the
/// integral `K_ν(x) = ∫_0^∞ exp(-x cosh t) cosh(νt) dt`.
///
/// The integrand is entire and decays doubly exponentially, so the
/// trapezoidal rule converges geometrically in the step size.
pub fn bessel_k(nu: f64, x: f64) -> f64 {
    assert!(x > 0.0, "bessel_k requires x > 0");
    let integrand = |t: f64| (-x * t.cosh() + nu.abs() * t).exp() * 0.5 * (1.0 + (-2.0 * nu.abs() * t).exp());
    // Peak of the integrand sits near sinh(t) = ν/x.
    let t_peak = (nu.abs() / x).asinh();
    let mut sum = 0.5 * integrand(0.0);
    let mut j = 1usize;
    loop {
        let t = j as f64 * BESSEL_STEP;
        let term = integrand(t);
        sum += term;
        if t > t_peak && term <= 1e-18 * sum {
            break;
        }
        j += 1;
    }
    sum * BESSEL_STEP
}

fn factorial(n: u64) -> f64 {
    (1..=n).map(|i| i as f64).product()
}

/// Half-integer order `S_{m+1/2}` in closed form.
fn matern_half_integer(m: u64, r: f64) -> f64 {
    let s = (2.0 * m as f64 + 1.0).sqrt();
    let scale = factorial(m) / factorial(2 * m);
    let poly: f64 = (0..=m)
        .map(|i| factorial(m + i) / (factorial(i) * factorial(m - i)) * (2.0 * s * r).powi((m - i) as i32))
        .sum();
    (-s * r).exp() * scale * poly
}

/// Matérn function of order `β - 1`, normalized so that `S(0) = 1`:
///
/// `S(r) = 2^{2-β} / Γ(β-1) · (sqrt(2(β-1)) r)^{β-1} K_{β-1}(sqrt(2(β-1)) r)`.
///
/// Half-integer orders (`β ∈ {3/2, 5/2, ...}`) use the exponential-times-
/// polynomial closed form.
pub fn matern_radial(beta: f64, r: f64) -> Result<f64> {
    if !(beta > 1.0) || !beta.is_finite() {
        return Err(Error::Operator(format!("Matérn profile requires beta > 1, got {beta}")));
    }
    if r < 0.0 || !r.is_finite() {
        return Err(Error::Operator(format!(
            "radius must be finite and nonnegative, got {r}"
        )));
    }
    if r == 0.0 {
        return Ok(1.0);
    }
    let m = beta - 1.5;
    if m >= 0.0 && m.fract() == 0.0 && m <= 20.0 {
        return Ok(matern_half_integer(m as u64, r));
    }
    let nu = beta - 1.0;
    let z = (2.0 * nu).sqrt() * r;
    if z > 700.0 {
        return Ok(0.0);
    }
    // Combine in log space; z^ν K_ν(z) under- and overflows separately.
    let log_val = (1.0 - nu) * std::f64::consts::LN_2 - gamma(nu).ln() + nu * z.ln() + bessel_k(nu, z).ln();
    Ok(log_val.exp())
}

/// Radial profile `G` of a radial-Green operator.
#[derive(Clone, Debug, PartialEq)]
pub enum RadialProfile {
    /// Matérn function of order `β - 1`.
    Matern { beta: f64 },
    /// `Σ_i c_i r^i` on `[0, 1)`, identically zero for `r >= 1`.
    CompactPolynomial { coeffs: Vec<f64> },
    /// Uniform samples of `G` on `[0, radius]`, linearly interpolated and
    /// zero beyond `radius`. `source` is only used for display.
    Tabulated {
        radius: f64,
        samples: Vec<f64>,
        source: Option<String>,
    },
}

impl RadialProfile {
    /// The compact example profile `(1 - r)_+^4 (4r + 1)`.
    pub fn compact_example() -> Self {
        RadialProfile::CompactPolynomial {
            coeffs: vec![1.0, 0.0, -10.0, 20.0, -15.0, 4.0],
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            RadialProfile::Matern { beta } => matern_radial(*beta, 0.0).map(|_| ()),
            RadialProfile::CompactPolynomial { coeffs } => {
                if coeffs.is_empty() || coeffs.iter().any(|c| !c.is_finite()) {
                    return Err(Error::Operator("compact profile needs finite coefficients".into()));
                }
                Ok(())
            }
            RadialProfile::Tabulated { radius, samples, .. } => {
                if !(*radius > 0.0) || samples.len() < 2 || samples.iter().any(|s| !s.is_finite()) {
                    return Err(Error::Operator(
                        "tabulated profile needs a positive radius and at least two finite samples".into(),
                    ));
                }
                Ok(())
            }
        }
    }

    pub fn evaluate(&self, r: f64) -> f64 {
        match self {
            RadialProfile::Matern { beta } => matern_radial(*beta, r).unwrap_or(f64::NAN),
            RadialProfile::CompactPolynomial { coeffs } => {
                if r >= 1.0 {
                    0.0
                } else {
                    coeffs.iter().rev().fold(0.0, |acc, c| acc * r + c)
                }
            }
            RadialProfile::Tabulated { radius, samples, .. } => {
                if r >= *radius {
                    return 0.0;
                }
                let pos = r / radius * (samples.len() - 1) as f64;
                let i = (pos.floor() as usize).min(samples.len() - 2);
                let w = pos - i as f64;
                samples[i] * (1.0 - w) + samples[i + 1] * w
            }
        }
    }

    /// Support radius of `G`, if compact.
    pub fn support(&self) -> Option<f64> {
        match self {
            RadialProfile::Matern { .. } => None,
            RadialProfile::CompactPolynomial { .. } => Some(1.0),
            RadialProfile::Tabulated { radius, .. } => Some(*radius),
        }
    }
}

impl fmt::Display for RadialProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RadialProfile::Matern { beta } => write!(f, "matern(beta={beta})"),
            RadialProfile::CompactPolynomial { coeffs } => {
                let c: Vec<String> = coeffs.iter().map(|c| c.to_string()).collect();
                write!(f, "compact(coeffs={})", c.join(","))
            }
            RadialProfile::Tabulated { source, samples, .. } => match source {
                Some(s) => write!(f, "tabulated(file={s})"),
                None => write!(f, "tabulated({} samples)", samples.len()),
            },
        }
    }
}

/// The periodic kernel `g(x) = G(ε^{-1} sqrt(2 - 2cos x))`.
pub fn periodic_kernel(profile: &RadialProfile, epsilon: f64, x: f64) -> f64 {
    // sqrt(2 - 2cos x) = 2|sin(x/2)|, which avoids cancellation near x = 0.
    let chord = 2.0 * (0.5 * x).sin().abs();
    profile.evaluate(chord / epsilon)
}

/// Number of trapezoidal nodes used for a coefficient table of bandwidth `K`.
pub fn quadrature_nodes(bandwidth: usize) -> usize {
    (8 * bandwidth).max(8192).next_power_of_two()
}

/// Fourier coefficients `ĝ[k]`, `|k| <= K`, of the periodic kernel by the
/// trapezoidal rule on `quadrature_nodes(K)` points. Every coefficient must be
/// strictly positive.
pub fn radial_green_coeffs(profile: &RadialProfile, epsilon: f64, bandwidth: usize) -> Result<SymbolTable> {
    profile.validate()?;
    if !(epsilon > 0.0) || !epsilon.is_finite() {
        return Err(Error::Operator(format!("eps must be positive, got {epsilon}")));
    }
    let n = quadrature_nodes(bandwidth);
    let mut buf: Vec<Complex64> = (0..n)
        .map(|j| Complex64::new(periodic_kernel(profile, epsilon, TAU * j as f64 / n as f64), 0.0))
        .collect();
    if buf.iter().any(|z| !z.re.is_finite()) {
        return Err(Error::Operator("radial profile produced non-finite samples".into()));
    }
    fft_nd(&mut buf, 1, n, FftDirection::Forward);
    let scale = 1.0 / n as f64;
    // g is even, so the coefficients are real; keep the real part.
    let coeffs: Vec<f64> = (0..=bandwidth).map(|k| buf[k].re * scale).collect();
    if let Some((k, &v)) = coeffs.iter().enumerate().find(|(_, v)| !(**v > 0.0)) {
        return Err(Error::NotPositiveDefinite {
            index: k as i64,
            value: v,
            eps: epsilon,
        });
    }
    SymbolTable::hermitian_from_fn(1, bandwidth, |k| {
        Complex64::new(coeffs[k.components()[0].unsigned_abs() as usize], 0.0)
    })
}

/// Cached radial-Green data shared between clones of an operator.
#[derive(Clone, Debug)]
pub struct RadialGreen {
    pub profile: RadialProfile,
    pub epsilon: f64,
    /// Smoothness parameter; spectral growth is `2(β - 1/2)`.
    pub beta: f64,
    coeffs: Arc<Vec<f64>>,
}

impl PartialEq for RadialGreen {
    fn eq(&self, other: &Self) -> bool {
        self.profile == other.profile
            && self.epsilon == other.epsilon
            && self.beta == other.beta
            && self.coeffs.len() == other.coeffs.len()
    }
}

impl RadialGreen {
    /// Precomputes `ĝ[k]` for `|k| <= bandwidth`.
    pub fn new(profile: RadialProfile, epsilon: f64, beta: f64, bandwidth: usize) -> Result<Self> {
        if !(beta > 1.0) {
            return Err(Error::Operator(format!(
                "radial operators require beta > 1, got {beta}"
            )));
        }
        let table = radial_green_coeffs(&profile, epsilon, bandwidth)?;
        let coeffs = (0..=bandwidth as i64)
            .map(|k| table.coeff(&crate::fourier::FreqIndex::d1(k)).re)
            .collect();
        Ok(Self {
            profile,
            epsilon,
            beta,
            coeffs: Arc::new(coeffs),
        })
    }

    pub fn max_frequency(&self) -> i64 {
        self.coeffs.len() as i64 - 1
    }

    /// `ĝ[k]`, or `None` outside the cached range.
    pub fn kernel_coeff(&self, k: i64) -> Option<f64> {
        self.coeffs.get(k.unsigned_abs() as usize).copied()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fourier::FreqIndex;

    #[test]
    fn matern_examples() {
        assert!((matern_radial(1.5, 1.0).unwrap() - (-1f64).exp()).abs() < 1e-15);
        let s3 = 3f64.sqrt();
        assert!((matern_radial(2.5, 1.0).unwrap() - (-s3).exp() * (1.0 + s3)).abs() < 1e-15);
        for beta in [1.2, 1.5, 2.5, 3.7] {
            assert_eq!(matern_radial(beta, 0.0).unwrap(), 1.0);
        }
        assert!(matern_radial(1.0, 0.5).is_err());
        assert!(matern_radial(0.3, 0.5).is_err());
    }

    #[test]
    fn bessel_route_matches_closed_form() {
        // K_{1/2}(x) = sqrt(π/(2x)) e^{-x}
        for x in [0.01, 0.3, 1.0, 5.0, 30.0] {
            let exact = (std::f64::consts::PI / (2.0 * x)).sqrt() * (-x).exp();
            assert!((bessel_k(0.5, x) / exact - 1.0).abs() < 1e-12, "x={x}");
        }
        // The integral route must agree with the half-integer closed forms.
        for beta in [1.5_f64, 2.5, 3.5, 4.5] {
            let nu = beta - 1.0;
            for r in [1e-3, 0.1, 0.7, 2.0, 6.0] {
                let z = (2.0 * nu).sqrt() * r;
                let via_bessel = 2f64.powf(1.0 - nu) / gamma(nu) * z.powf(nu) * bessel_k(nu, z);
                let closed = matern_radial(beta, r).unwrap();
                assert!((via_bessel - closed).abs() < 1e-10, "beta={beta} r={r}");
            }
        }
    }

    #[test]
    fn non_half_integer_matern_is_continuous_at_origin() {
        let v = matern_radial(2.2, 1e-9).unwrap();
        assert!((v - 1.0).abs() < 1e-6);
        assert!(matern_radial(2.2, 1.0).unwrap() < 1.0);
    }

    #[test]
    fn compact_profile_vanishes_outside_unit_radius() {
        let p = RadialProfile::compact_example();
        assert_eq!(p.evaluate(1.0), 0.0);
        assert_eq!(p.evaluate(3.0), 0.0);
        assert!((p.evaluate(0.0) - 1.0).abs() < 1e-15);
        let r: f64 = 0.4;
        assert!((p.evaluate(r) - (1.0 - r).powi(4) * (4.0 * r + 1.0)).abs() < 1e-14);
    }

    #[test]
    fn matern_coefficients_positive_and_decreasing() {
        let t = radial_green_coeffs(&RadialProfile::Matern { beta: 1.5 }, 1.0, 256).unwrap();
        let mut prev = f64::INFINITY;
        for k in 0..=256 {
            let v = t.coeff(&FreqIndex::d1(k)).re;
            assert!(v > 0.0 && v < prev, "k={k}");
            prev = v;
        }
    }

    #[test]
    fn cache_range_is_enforced() {
        let g = RadialGreen::new(RadialProfile::Matern { beta: 2.5 }, 1.0, 2.5, 16).unwrap();
        assert_eq!(g.max_frequency(), 16);
        assert!(g.kernel_coeff(-16).is_some());
        assert!(g.kernel_coeff(17).is_none());
    }

    #[test]
    fn tabulated_profile_interpolates() {
        let p = RadialProfile::Tabulated {
            radius: 2.0,
            samples: vec![1.0, 0.5, 0.0],
            source: None,
        };
        assert!((p.evaluate(0.5) - 0.75).abs() < 1e-15);
        assert_eq!(p.evaluate(2.5), 0.0);
    }
}
