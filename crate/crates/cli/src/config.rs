//! Job configuration: a hand-written TOML file, parsed and validated before
//! any computation starts.

use std::fmt;
use std::path::Path;

use serde::Deserialize;
use stickel_core::groups::Elem;
use stickel_core::quadfield::{Place, QuadExtension, QuadField, RationalExtension, RayClassGroup};
use stickel_core::stickring::FrobeniusSide;

/// A configuration problem, tagged with the offending field.
#[derive(Debug)]
pub struct ConfigError {
    pub field: String,
    pub message: String,
}

impl ConfigError {
    pub fn new(field: impl Into<String>, message: impl Into<String>) -> Self {
        ConfigError { field: field.into(), message: message.into() }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.field.is_empty() {
            write!(f, "{}", self.message)
        } else {
            write!(f, "{}: {}", self.field, self.message)
        }
    }
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobConfig {
    pub field: Option<FieldSpec>,
    #[serde(default)]
    pub places: PlaceSpec,
    pub k: Option<KSpec>,
    #[serde(default)]
    pub zeta: ZetaSpec,
    #[serde(default)]
    pub options: Options,
    pub distcheck: Option<DistSpec>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldSpec {
    /// `"Q"` or `"quadratic"`.
    pub base: String,
    /// ℚ path: `K ⊆ ℚ(μ_f)` with `f` the conductor.
    pub conductor: Option<u64>,
    /// ℚ path: residues generating `Gal(ℚ(μ_f)/K)`.
    #[serde(default)]
    pub kernel_residues: Vec<u64>,
    /// Quadratic path: `F = ℚ(√D)`.
    #[serde(rename = "D")]
    pub d: Option<i64>,
    pub modulus: Option<ModulusSpec>,
    /// Quadratic path: ray-class labels generating `Gal(F^𝔪/K)`.
    #[serde(default)]
    pub kernel: Vec<Vec<u64>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModulusSpec {
    pub hnf: [[i64; 2]; 2],
}

/// A prime as `p` (over ℚ) or `[p, i]`: the `i`-th prime above `p`.
#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum PrimeSpec {
    Rational(u64),
    Split([u64; 2]),
}

impl PrimeSpec {
    fn parts(&self) -> (u64, u64) {
        match self {
            PrimeSpec::Rational(p) => (*p, 0),
            PrimeSpec::Split([p, i]) => (*p, *i),
        }
    }
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlaceSpec {
    #[serde(default, rename = "S")]
    pub s: Vec<PrimeSpec>,
    #[serde(default, rename = "T")]
    pub t: Vec<PrimeSpec>,
    /// Second smoothing set for `--gcd-trick`.
    #[serde(default, rename = "T_alt")]
    pub t_alt: Vec<PrimeSpec>,
    /// Exceptional places `𝔭`; defaults to all of `S`.
    pub exceptional: Option<Vec<PrimeSpec>>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum KSpec {
    One(u32),
    List(Vec<u32>),
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ZetaSpec {
    /// ℚ path: residues `a mod f`. Quadratic path: ray-class labels.
    pub classes: Option<Vec<ClassSpec>>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum ClassSpec {
    Residue(i64),
    Label(Vec<u64>),
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Options {
    /// `"inverse"` (default) or `"direct"`: which Frobenius generator of
    /// `𝓘_v^(k)` decides the asserted verdict.
    pub frobenius_side: Option<String>,
    pub gcd_trick: Option<bool>,
    pub experimental_arch_p: Option<bool>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DistSpec {
    pub n: Option<usize>,
    pub m: Option<u32>,
    pub trials: Option<u32>,
}

pub fn load(path: &Path) -> Result<JobConfig, ConfigError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| ConfigError::new("", format!("cannot read {}: {e}", path.display())))?;
    parse(&text)
}

pub fn parse(text: &str) -> Result<JobConfig, ConfigError> {
    toml::from_str(text).map_err(|e| {
        let msg = e.message().to_string();
        let loc = e.span().map(|s| {
            let line = text[..s.start].matches('\n').count() + 1;
            format!("line {line}")
        });
        ConfigError::new(loc.unwrap_or_default(), msg)
    })
}

/// The extension named by a config, on either base field.
#[derive(Clone, Debug)]
pub enum Extension {
    Rational(RationalExtension),
    Quadratic(QuadExtension),
}

impl JobConfig {
    pub fn field(&self) -> Result<&FieldSpec, ConfigError> {
        self.field.as_ref().ok_or_else(|| ConfigError::new("field", "missing [field] table"))
    }

    pub fn k_values(&self) -> Result<Vec<u32>, ConfigError> {
        let ks = match &self.k {
            None => vec![0],
            Some(KSpec::One(k)) => vec![*k],
            Some(KSpec::List(ks)) => ks.clone(),
        };
        if ks.is_empty() {
            return Err(ConfigError::new("k", "empty list"));
        }
        if let Some(k) = ks.iter().find(|&&k| k > 12) {
            return Err(ConfigError::new("k", format!("{k} exceeds the supported range 0..=12")));
        }
        Ok(ks)
    }

    pub fn frobenius_side(&self) -> Result<FrobeniusSide, ConfigError> {
        match self.options.frobenius_side.as_deref() {
            None | Some("inverse") => Ok(FrobeniusSide::Inverse),
            Some("direct") => Ok(FrobeniusSide::Direct),
            Some(other) => Err(ConfigError::new(
                "options.frobenius_side",
                format!("expected \"inverse\" or \"direct\", got {other:?}"),
            )),
        }
    }
}

impl FieldSpec {
    pub fn quadratic_field(&self) -> Result<QuadField, ConfigError> {
        let d = self.d.ok_or_else(|| ConfigError::new("field.D", "required for a quadratic base"))?;
        QuadField::new(d).map_err(|e| ConfigError::new("field.D", e.to_string()))
    }

    /// The ray class group of the configured modulus (quadratic path).
    pub fn ray(&self) -> Result<RayClassGroup, ConfigError> {
        let f = self.quadratic_field()?;
        let [[a, b], [z, c]] = self.modulus.as_ref().map(|m| m.hnf).unwrap_or([[1, 0], [0, 1]]);
        if z != 0 {
            return Err(ConfigError::new("field.modulus.hnf", "lower-left entry must be 0"));
        }
        let m = f.ideal_from_hnf(a, b, c).map_err(|e| ConfigError::new("field.modulus.hnf", e.to_string()))?;
        RayClassGroup::new(&f, &m).map_err(|e| ConfigError::new("field.modulus", e.to_string()))
    }

    pub fn extension(&self) -> Result<Extension, ConfigError> {
        match self.base.as_str() {
            "Q" => {
                let f = self.conductor.ok_or_else(|| ConfigError::new("field.conductor", "required for base Q"))?;
                RationalExtension::new(f, &self.kernel_residues)
                    .map(Extension::Rational)
                    .map_err(|e| ConfigError::new("field.kernel_residues", e.to_string()))
            }
            "quadratic" => {
                let ray = self.ray()?;
                let mut gens = Vec::new();
                for (i, label) in self.kernel.iter().enumerate() {
                    gens.push(check_label(ray.group().invariants(), label, &format!("field.kernel[{i}]"))?);
                }
                let kernel = ray.group().closure(&gens);
                Ok(Extension::Quadratic(QuadExtension::new(ray, kernel)))
            }
            other => Err(ConfigError::new("field.base", format!("expected \"Q\" or \"quadratic\", got {other:?}"))),
        }
    }
}

/// A class label must have one entry per invariant factor, each reduced.
pub fn check_label(invariants: &[u64], label: &[u64], field: &str) -> Result<Elem, ConfigError> {
    if label.len() != invariants.len() || label.iter().zip(invariants).any(|(x, d)| x >= d) {
        return Err(ConfigError::new(
            field,
            format!("invalid class label {label:?} for a group with invariants {invariants:?}"),
        ));
    }
    Ok(label.to_vec())
}

impl Extension {
    pub fn resolve(&self, specs: &[PrimeSpec], field: &str) -> Result<Vec<Place>, ConfigError> {
        let mut out = Vec::with_capacity(specs.len());
        for (i, spec) in specs.iter().enumerate() {
            let (p, idx) = spec.parts();
            let at = format!("{field}[{i}]");
            if p < 2 || !(2..p).take_while(|q| q * q <= p).all(|q| p % q != 0) {
                return Err(ConfigError::new(at, format!("{p} is not prime")));
            }
            let place = match self {
                Extension::Rational(_) if idx == 0 => Place::Rational(p),
                Extension::Rational(_) => {
                    return Err(ConfigError::new(at, "over Q a prime has no splitting index"));
                }
                Extension::Quadratic(ext) => {
                    let split = ext.field().prime_split(p);
                    let data = split.get(idx as usize).ok_or_else(|| {
                        ConfigError::new(&at, format!("{p} has {} prime(s) above it, index {idx}", split.len()))
                    })?;
                    Place::Prime(data.ideal.clone())
                }
            };
            if out.contains(&place) {
                return Err(ConfigError::new(at, format!("{place} listed twice")));
            }
            out.push(place);
        }
        Ok(out)
    }
}
