//! Text form of operators: `family:key=value,key=value`.
//!
//! Families: `dpow:n`, `expshift:alpha,gamma`, `moddiff:k0`, `fracd:gamma`,
//! `fraclap:gamma`, `sobolev:alpha,gamma`, `harmonic:k0` (one value per
//! axis), `matern:beta,eps`, `compact:eps[,beta][,coeffs]`,
//! `tabulated:file,eps,beta` and `sep(f1;f2[;f3])`. Family names and keys
//! are case-insensitive. A bare value continues the list of the preceding
//! key, e.g. `harmonic:k0=1,2`.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use super::{Family, OperatorSpec, RadialProfile};
use crate::error::{Error, Result};
use crate::fourier::FreqIndex;

/// Parsed `key=value[,value...]` pairs.
pub(crate) struct Params {
    context: String,
    values: BTreeMap<String, Vec<String>>,
}

impl Params {
    pub(crate) fn parse(context: &str, body: &str) -> Result<Self> {
        let mut values: BTreeMap<String, Vec<String>> = BTreeMap::new();
        let mut last: Option<String> = None;
        for token in body.split(',').map(str::trim).filter(|t| !t.is_empty()) {
            match token.split_once('=') {
                Some((k, v)) => {
                    let key = k.trim().to_ascii_lowercase();
                    if values.contains_key(&key) {
                        return Err(Error::Parse(format!("{context}: duplicate key '{key}'")));
                    }
                    values.insert(key.clone(), vec![v.trim().to_string()]);
                    last = Some(key);
                }
                None => {
                    let key = last
                        .as_ref()
                        .ok_or_else(|| Error::Parse(format!("{context}: value '{token}' without a key")))?;
                    values.get_mut(key).expect("inserted above").push(token.to_string());
                }
            }
        }
        Ok(Self {
            context: context.to_string(),
            values,
        })
    }

    pub(crate) fn check_keys(&self, allowed: &[&str]) -> Result<()> {
        match self.values.keys().find(|k| !allowed.contains(&k.as_str())) {
            Some(k) => Err(Error::Parse(format!(
                "{}: unknown key '{k}' (expected one of {})",
                self.context,
                allowed.join(", ")
            ))),
            None => Ok(()),
        }
    }

    pub(crate) fn raw(&self, key: &str) -> Option<&[String]> {
        self.values.get(key).map(Vec::as_slice)
    }

    fn single(&self, key: &str) -> Result<Option<&str>> {
        match self.raw(key) {
            None => Ok(None),
            Some([v]) => Ok(Some(v.as_str())),
            Some(_) => Err(Error::Parse(format!("{}: '{key}' takes a single value", self.context))),
        }
    }

    pub(crate) fn string(&self, key: &str) -> Result<String> {
        self.single(key)?
            .map(str::to_string)
            .ok_or_else(|| Error::Parse(format!("{}: missing '{key}'", self.context)))
    }

    pub(crate) fn opt_num<T: FromStr>(&self, key: &str) -> Result<Option<T>> {
        self.single(key)?
            .map(|v| {
                v.parse::<T>()
                    .map_err(|_| Error::Parse(format!("{}: invalid value '{v}' for '{key}'", self.context)))
            })
            .transpose()
    }

    pub(crate) fn num<T: FromStr>(&self, key: &str) -> Result<T> {
        self.opt_num(key)?
            .ok_or_else(|| Error::Parse(format!("{}: missing '{key}'", self.context)))
    }

    pub(crate) fn list<T: FromStr>(&self, key: &str) -> Result<Option<Vec<T>>> {
        self.raw(key)
            .map(|vals| {
                vals.iter()
                    .map(|v| {
                        v.parse::<T>()
                            .map_err(|_| Error::Parse(format!("{}: invalid value '{v}' for '{key}'", self.context)))
                    })
                    .collect()
            })
            .transpose()
    }
}

fn require_univariate(family: &str, dim: usize) -> Result<()> {
    if dim != 1 {
        return Err(Error::Parse(format!(
            "'{family}' is univariate; use sep(...) for dimension {dim}"
        )));
    }
    Ok(())
}

fn read_tabulated(path: &str, base: Option<&Path>) -> Result<RadialProfile> {
    let resolved = crate::io::resolve(base, path);
    let text = std::fs::read_to_string(&resolved).map_err(|e| Error::io(&resolved, e))?;
    let nums: Vec<f64> = text
        .split_whitespace()
        .map(|t| {
            t.parse::<f64>()
                .map_err(|_| Error::Parse(format!("{path}: invalid number '{t}'")))
        })
        .collect::<Result<_>>()?;
    let (radius, samples) = nums
        .split_first()
        .ok_or_else(|| Error::Parse(format!("{path}: empty profile file")))?;
    let profile = RadialProfile::Tabulated {
        radius: *radius,
        samples: samples.to_vec(),
        source: Some(path.to_string()),
    };
    profile.validate()?;
    Ok(profile)
}

impl OperatorSpec {
    /// Parses the text form. `bandwidth` sets the cached frequency range of
    /// radial-Green operators.
    ///
    /// ```
    /// use torus_splines::operators::OperatorSpec;
    /// let op = OperatorSpec::parse("Sobolev:alpha=2,gamma=2", 1, 64).unwrap();
    /// assert_eq!(op.to_string(), "sobolev:alpha=2,gamma=2");
    /// assert!(OperatorSpec::parse("sobolev:alpha=2,gama=2", 1, 64).is_err());
    /// ```
    pub fn parse(text: &str, dim: usize, bandwidth: usize) -> Result<Self> {
        Self::parse_in(text, dim, bandwidth, None)
    }

    /// As [`OperatorSpec::parse`], resolving relative file names against `base`.
    pub fn parse_in(text: &str, dim: usize, bandwidth: usize, base: Option<&Path>) -> Result<Self> {
        let text = text.trim();
        let lower = text.to_ascii_lowercase();
        if lower.starts_with("sep(") {
            if !text.ends_with(')') {
                return Err(Error::Parse(format!("unterminated sep(...) in '{text}'")));
            }
            let factors = text[4..text.len() - 1]
                .split(';')
                .map(|f| Self::parse_in(f, 1, bandwidth, base))
                .collect::<Result<Vec<_>>>()?;
            if factors.len() != dim {
                return Err(Error::Parse(format!(
                    "sep(...) has {} factors but dimension is {dim}",
                    factors.len()
                )));
            }
            return Self::separable(factors);
        }
        let (family, body) = text.split_once(':').unwrap_or((text, ""));
        let family = family.trim().to_ascii_lowercase();
        let p = Params::parse(&family, body)?;
        match family.as_str() {
            "dpow" => {
                p.check_keys(&["n"])?;
                require_univariate(&family, dim)?;
                Self::derivative_power(p.num("n")?)
            }
            "expshift" => {
                p.check_keys(&["alpha", "gamma"])?;
                require_univariate(&family, dim)?;
                Self::exponential_shift(p.num("alpha")?, p.opt_num("gamma")?.unwrap_or(1.0))
            }
            "moddiff" => {
                p.check_keys(&["k0"])?;
                require_univariate(&family, dim)?;
                Self::modulated_derivative(p.num("k0")?)
            }
            "fracd" => {
                p.check_keys(&["gamma"])?;
                require_univariate(&family, dim)?;
                Self::fractional_derivative(p.num("gamma")?)
            }
            "fraclap" => {
                p.check_keys(&["gamma"])?;
                Self::fractional_laplacian(dim, p.num("gamma")?)
            }
            "sobolev" => {
                p.check_keys(&["alpha", "gamma"])?;
                Self::sobolev(dim, p.num("alpha")?, p.num("gamma")?)
            }
            "harmonic" => {
                p.check_keys(&["k0"])?;
                let k0: Vec<i64> = p
                    .list("k0")?
                    .ok_or_else(|| Error::Parse("harmonic: missing 'k0'".into()))?;
                if k0.len() != dim {
                    return Err(Error::Parse(format!(
                        "harmonic: k0 has {} components, dimension is {dim}",
                        k0.len()
                    )));
                }
                Self::harmonic_pair(FreqIndex::new(&k0)?)
            }
            "matern" => {
                p.check_keys(&["beta", "eps"])?;
                require_univariate(&family, dim)?;
                Self::matern(p.num("beta")?, p.num("eps")?, bandwidth)
            }
            "compact" => {
                p.check_keys(&["eps", "beta", "coeffs"])?;
                require_univariate(&family, dim)?;
                let profile = match p.list::<f64>("coeffs")? {
                    Some(coeffs) => RadialProfile::CompactPolynomial { coeffs },
                    None => RadialProfile::compact_example(),
                };
                Self::radial_green(profile, p.num("eps")?, p.opt_num("beta")?.unwrap_or(2.5), bandwidth)
            }
            "tabulated" => {
                p.check_keys(&["file", "eps", "beta"])?;
                require_univariate(&family, dim)?;
                let profile = read_tabulated(&p.string("file")?, base)?;
                Self::radial_green(profile, p.num("eps")?, p.num("beta")?, bandwidth)
            }
            other => Err(Error::Parse(format!("unknown operator family '{other}'"))),
        }
    }
}

impl fmt::Display for OperatorSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.family {
            Family::DerivativePower { order } => write!(f, "dpow:n={order}"),
            Family::ExponentialShift { alpha, gamma } => write!(f, "expshift:alpha={alpha},gamma={gamma}"),
            Family::ModulatedDerivative { k0 } => write!(f, "moddiff:k0={k0}"),
            Family::HarmonicPair { k0 } => {
                let c: Vec<String> = k0.components().iter().map(|c| c.to_string()).collect();
                write!(f, "harmonic:k0={}", c.join(","))
            }
            Family::FractionalDerivative { gamma } => write!(f, "fracd:gamma={gamma}"),
            Family::FractionalLaplacian { gamma } => write!(f, "fraclap:gamma={gamma}"),
            Family::Sobolev { alpha, gamma } => write!(f, "sobolev:alpha={alpha},gamma={gamma}"),
            Family::RadialGreen(g) => match &g.profile {
                RadialProfile::Matern { beta } => write!(f, "matern:beta={beta},eps={}", g.epsilon),
                RadialProfile::CompactPolynomial { coeffs } => {
                    let c: Vec<String> = coeffs.iter().map(|c| c.to_string()).collect();
                    write!(f, "compact:eps={},beta={},coeffs={}", g.epsilon, g.beta, c.join(","))
                }
                RadialProfile::Tabulated { source, .. } => write!(
                    f,
                    "tabulated:file={},eps={},beta={}",
                    source.as_deref().unwrap_or("<memory>"),
                    g.epsilon,
                    g.beta
                ),
            },
            Family::Separable(factors) => {
                let parts: Vec<String> = factors.iter().map(|x| x.to_string()).collect();
                write!(f, "sep({})", parts.join(";"))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_every_family() {
        let cases = [
            ("dpow:n=2", 1),
            ("expshift:alpha=1,gamma=1.5", 1),
            ("moddiff:k0=3", 1),
            ("fracd:gamma=1.5", 1),
            ("fraclap:gamma=2", 2),
            ("sobolev:alpha=2,gamma=2", 3),
            ("harmonic:k0=1,2", 2),
            ("matern:beta=2.5,eps=1", 1),
            ("compact:eps=1,beta=2.5,coeffs=1,0,-10,20,-15,4", 1),
            ("sep(expshift:alpha=1,gamma=1.5;expshift:alpha=1,gamma=1.5)", 2),
        ];
        for (text, dim) in cases {
            let op = OperatorSpec::parse(text, dim, 32).unwrap();
            assert_eq!(op.dim(), dim);
            assert_eq!(op.to_string(), text, "display must round-trip");
            let again = OperatorSpec::parse(&op.to_string(), dim, 32).unwrap();
            assert_eq!(again, op);
        }
    }

    #[test]
    fn case_insensitive() {
        let op = OperatorSpec::parse("FRACD:Gamma=1.5", 1, 8).unwrap();
        assert_eq!(op.to_string(), "fracd:gamma=1.5");
        assert!(OperatorSpec::parse("SEP(Sobolev:alpha=1,gamma=2)", 1, 8).is_ok());
    }

    #[test]
    fn rejects_bad_text() {
        for (text, dim) in [
            ("dpow:n=2,m=3", 1),
            ("dpow:n=2", 2),
            ("dpow", 1),
            ("wavelet:a=1", 1),
            ("harmonic:k0=1", 2),
            ("sep(dpow:n=1;sobolev:alpha=1,gamma=1)", 2),
            ("sep(sobolev:alpha=1,gamma=1)", 2),
            ("sobolev:alpha=x,gamma=2", 1),
            ("sobolev:alpha=1,alpha=2,gamma=2", 1),
            ("sep(sobolev:alpha=1,gamma=1", 1),
        ] {
            assert!(OperatorSpec::parse(text, dim, 8).is_err(), "{text}");
        }
    }
}
