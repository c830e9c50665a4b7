//! Text inputs: parameter literals, grids and the TOML family file.
//!
//! A family file holds named families and optional run defaults:
//!
//! ```toml
//! [run]
//! family = "shifted"
//! n = 200
//!
//! [family.shifted]
//! kind = "theta-shift"
//! theta = "1"
//! delta = -2
//!
//! [family.gas]
//! kind = "spatial"
//! alpha = 0
//! eps = ["0", "log(2)"]
//! ```

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde::Serialize;

use crate::asymptotics::SingularityClass;
use crate::catalog::{alpha_exp, ewens, exp_weight_family, polylog_family, theta_shift, WeightFamily};
use crate::diagnostics::KSelector;
use crate::error::{Error, Result};
use crate::generalized::{spatial_family, AlphaSpec, ExpPolynomial, GeneralizedWeights, LogParam, SpatialModel};
use crate::scalar::parse_rational;

/// Longest accepted grid.
pub const MAX_GRID_LEN: usize = 1000;
/// Largest accepted `n`.
pub const MAX_N: usize = 1_000_000;
/// Largest magnitude accepted for a real parameter.
pub const MAX_PARAM: f64 = 1e6;

fn config_err(msg: impl Into<String>) -> Error {
    Error::Config(msg.into())
}

/// An exact rational literal such as `2`, `-0.5`, `1/3` or `2.5e-1`.
pub fn parse_param(s: &str) -> Result<BigRational> {
    let q = parse_rational(s).ok_or_else(|| config_err(format!("not a number: {s:?}")))?;
    let f = q.to_f64().unwrap_or(f64::INFINITY);
    if !f.is_finite() || f.abs() > MAX_PARAM {
        return Err(config_err(format!("{s:?} is out of range (|x| ≤ {MAX_PARAM})")));
    }
    Ok(q)
}

pub fn parse_real(s: &str) -> Result<f64> {
    Ok(parse_param(s)?.to_f64().expect("range checked"))
}

fn parse_size(s: &str) -> Result<usize> {
    let n: usize = s
        .trim()
        .parse()
        .map_err(|_| config_err(format!("not a positive integer: {s:?}")))?;
    if n == 0 || n > MAX_N {
        return Err(config_err(format!("n = {n} is outside 1..={MAX_N}")));
    }
    Ok(n)
}

/// Comma-separated sizes, e.g. `100,300,1000`.
pub fn parse_n_grid(s: &str) -> Result<Vec<usize>> {
    let grid = s
        .split(',')
        .map(parse_size)
        .collect::<Result<Vec<_>>>()?;
    if grid.len() > MAX_GRID_LEN {
        return Err(config_err(format!("grid longer than {MAX_GRID_LEN}")));
    }
    Ok(grid)
}

/// Comma-separated reals, e.g. `0,0.5,-0.5`.
pub fn parse_s_grid(s: &str) -> Result<Vec<f64>> {
    let grid = s.split(',').map(parse_real).collect::<Result<Vec<_>>>()?;
    if grid.len() > MAX_GRID_LEN {
        return Err(config_err(format!("grid longer than {MAX_GRID_LEN}")));
    }
    Ok(grid)
}

/// A real literal or `log(x)` for a positive rational `x`.
pub fn parse_log_param(s: &str) -> Result<LogParam> {
    let t = s.trim();
    if let Some(inner) = t.strip_prefix("log(").and_then(|r| r.strip_suffix(')')) {
        let ratio = parse_param(inner)?;
        return LogParam::log_of(ratio).map_err(|e| config_err(e.to_string()));
    }
    Ok(LogParam::float(parse_real(t)?))
}

/// Lattice energies: comma-separated [`parse_log_param`] literals.
pub fn parse_eps(s: &str) -> Result<Vec<LogParam>> {
    let eps = s.split(',').map(parse_log_param).collect::<Result<Vec<_>>>()?;
    if eps.len() > MAX_GRID_LEN {
        return Err(config_err(format!("more than {MAX_GRID_LEN} lattice points")));
    }
    Ok(eps)
}

/// `17`, `auto` (the mean), or `auto+3sigma` / `auto-1.5sigma`.
pub fn parse_k_spec(s: &str) -> Result<KSelector> {
    let t = s.trim();
    let Some(rest) = t.strip_prefix("auto") else {
        return Ok(KSelector::Fixed { k: parse_size(t)? });
    };
    if rest.is_empty() {
        return Ok(KSelector::MeanPlusSigma { sigmas: 0.0 });
    }
    let body = rest
        .strip_suffix("sigma")
        .ok_or_else(|| config_err(format!("expected auto±<x>sigma, got {s:?}")))?;
    let sigmas = match body.strip_prefix('+') {
        Some(x) => parse_real(x)?,
        None => match body.strip_prefix('-') {
            Some(x) => -parse_real(x)?,
            None => return Err(config_err(format!("expected a sign after auto in {s:?}"))),
        },
    };
    Ok(KSelector::MeanPlusSigma { sigmas })
}

/// A family definition with its parameters parsed but not yet built.
#[derive(Debug, Clone, PartialEq)]
pub enum FamilySpec {
    Ewens { theta: BigRational },
    ThetaShift { theta: BigRational, delta: BigRational },
    Polylog { delta: BigRational },
    ExpWeight { c: f64, theta_exp: f64 },
    AlphaExp { alpha: f64, delta: Option<f64> },
    Spatial { model: SpatialModel },
    ExpPolynomial { poly: ExpPolynomial },
}

pub const FAMILY_KINDS: [&str; 7] = [
    "ewens",
    "theta-shift",
    "polylog",
    "exp-weight",
    "alpha-exp",
    "spatial",
    "exp-polynomial",
];

/// Raw parameter values as text, from flags or from a config table.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct FamilyParams {
    pub theta: Option<String>,
    pub delta: Option<String>,
    pub c: Option<String>,
    pub theta_exp: Option<String>,
    /// One value, or one per cycle length.
    pub alpha: Option<Vec<String>>,
    pub eps: Option<Vec<String>>,
    /// `b_2, …, b_d` of an exp-polynomial.
    pub poly: Option<Vec<String>>,
    pub truncation_note: Option<String>,
}

fn required<'a>(value: &'a Option<String>, kind: &str, key: &str) -> Result<&'a str> {
    value
        .as_deref()
        .ok_or_else(|| config_err(format!("family {kind} needs {key}")))
}

fn one() -> BigRational {
    BigRational::from_integer(BigInt::from(1))
}

impl FamilySpec {
    pub fn from_params(kind: &str, p: &FamilyParams) -> Result<Self> {
        let theta_or_one = || p.theta.as_deref().map(parse_param).transpose().map(|t| t.unwrap_or_else(one));
        let spec = match kind {
            "ewens" => FamilySpec::Ewens { theta: theta_or_one()? },
            "theta-shift" => FamilySpec::ThetaShift {
                theta: theta_or_one()?,
                delta: match &p.delta {
                    Some(d) => parse_param(d)?,
                    None => BigRational::from_integer(BigInt::from(-2)),
                },
            },
            "polylog" => FamilySpec::Polylog {
                delta: parse_param(required(&p.delta, kind, "delta")?)?,
            },
            "exp-weight" => FamilySpec::ExpWeight {
                c: parse_real(required(&p.c, kind, "c")?)?,
                theta_exp: parse_real(required(&p.theta_exp, kind, "theta-exp")?)?,
            },
            "alpha-exp" => {
                let alpha = match p.alpha.as_deref() {
                    Some([a]) => parse_real(a)?,
                    Some(_) => return Err(config_err("alpha-exp takes a single alpha")),
                    None => return Err(config_err("family alpha-exp needs alpha")),
                };
                FamilySpec::AlphaExp {
                    alpha,
                    delta: p.delta.as_deref().map(parse_real).transpose()?,
                }
            }
            "spatial" => {
                let alpha = match p.alpha.as_deref() {
                    None => AlphaSpec::Constant(LogParam::float(0.0)),
                    Some([a]) => AlphaSpec::Constant(parse_log_param(a)?),
                    Some(seq) => AlphaSpec::Sequence(
                        seq.iter().map(|a| parse_log_param(a)).collect::<Result<_>>()?,
                    ),
                };
                let eps = p
                    .eps
                    .as_ref()
                    .ok_or_else(|| config_err("family spatial needs eps"))?
                    .iter()
                    .map(|e| parse_log_param(e))
                    .collect::<Result<Vec<_>>>()?;
                if eps.len() > MAX_GRID_LEN {
                    return Err(config_err(format!("more than {MAX_GRID_LEN} lattice points")));
                }
                let note = p.truncation_note.clone().unwrap_or_else(|| format!("{} stored points", eps.len()));
                FamilySpec::Spatial {
                    model: SpatialModel::new(alpha, eps, note).map_err(|e| config_err(e.to_string()))?,
                }
            }
            "exp-polynomial" => {
                let higher = p
                    .poly
                    .iter()
                    .flatten()
                    .map(|b| parse_param(b))
                    .collect::<Result<Vec<_>>>()?;
                if higher.len() > 64 {
                    return Err(config_err("exp-polynomial degree above 65"));
                }
                FamilySpec::ExpPolynomial {
                    poly: ExpPolynomial::new(theta_or_one()?, higher).map_err(|e| config_err(e.to_string()))?,
                }
            }
            other => {
                return Err(config_err(format!(
                    "unknown family {other:?}; expected one of {}",
                    FAMILY_KINDS.join(", ")
                )))
            }
        };
        Ok(spec)
    }

    pub fn build(&self) -> Result<Family> {
        let weighted = |r: Result<WeightFamily>| r.map(Family::Weighted);
        match self {
            FamilySpec::Ewens { theta } => weighted(ewens(theta.clone())),
            FamilySpec::ThetaShift { theta, delta } => weighted(theta_shift(theta.clone(), delta.clone())),
            FamilySpec::Polylog { delta } => weighted(polylog_family(delta.clone())),
            FamilySpec::ExpWeight { c, theta_exp } => weighted(exp_weight_family(*c, *theta_exp)),
            FamilySpec::AlphaExp { alpha, delta } => weighted(alpha_exp(*alpha, *delta)),
            FamilySpec::Spatial { model } => weighted(spatial_family(model)),
            FamilySpec::ExpPolynomial { poly } => Ok(Family::Generalized(GeneralizedFamily {
                weights: poly.weights(),
                class: Some(poly.class()?),
            })),
        }
    }
}

/// A measure of either kind, ready for computation.
#[derive(Debug, Clone)]
pub enum Family {
    Weighted(WeightFamily),
    Generalized(GeneralizedFamily),
}

#[derive(Debug, Clone)]
pub struct GeneralizedFamily {
    pub weights: GeneralizedWeights,
    pub class: Option<SingularityClass>,
}

impl Family {
    pub fn name(&self) -> &str {
        match self {
            Family::Weighted(f) => f.name(),
            Family::Generalized(g) => g.weights.name(),
        }
    }
}

/// Run defaults from the `[run]` table; command-line flags take precedence.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct RunDefaults {
    pub family: Option<String>,
    pub n: Option<usize>,
    pub n_grid: Option<Vec<usize>>,
    pub b: Option<usize>,
    pub seed: Option<u64>,
    pub backend: Option<String>,
    pub format: Option<String>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Config {
    pub families: BTreeMap<String, FamilySpec>,
    /// The text each configured family was defined with.
    pub definitions: BTreeMap<String, NamedFamily>,
    pub run: RunDefaults,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NamedFamily {
    pub kind: String,
    pub params: FamilyParams,
}

impl FamilyParams {
    /// `self` with every field set in `other` replaced.
    pub fn overridden_by(&self, other: &FamilyParams) -> FamilyParams {
        FamilyParams {
            theta: other.theta.clone().or_else(|| self.theta.clone()),
            delta: other.delta.clone().or_else(|| self.delta.clone()),
            c: other.c.clone().or_else(|| self.c.clone()),
            theta_exp: other.theta_exp.clone().or_else(|| self.theta_exp.clone()),
            alpha: other.alpha.clone().or_else(|| self.alpha.clone()),
            eps: other.eps.clone().or_else(|| self.eps.clone()),
            poly: other.poly.clone().or_else(|| self.poly.clone()),
            truncation_note: other.truncation_note.clone().or_else(|| self.truncation_note.clone()),
        }
    }

    pub fn is_empty(&self) -> bool {
        *self == FamilyParams::default()
    }
}

/// Scalar config value as text: strings verbatim, numbers in decimal.
fn value_text(v: &toml::Value, key: &str) -> Result<String> {
    match v {
        toml::Value::String(s) => Ok(s.clone()),
        toml::Value::Integer(i) => Ok(i.to_string()),
        toml::Value::Float(f) if f.is_finite() => Ok(format!("{f:?}")),
        _ => Err(config_err(format!("{key} must be a number or a string"))),
    }
}

fn value_list(v: &toml::Value, key: &str) -> Result<Vec<String>> {
    match v {
        toml::Value::Array(items) => {
            if items.len() > MAX_GRID_LEN {
                return Err(config_err(format!("{key} has more than {MAX_GRID_LEN} entries")));
            }
            items.iter().map(|x| value_text(x, key)).collect()
        }
        other => Ok(vec![value_text(other, key)?]),
    }
}

fn value_usize(v: &toml::Value, key: &str) -> Result<usize> {
    match v {
        toml::Value::Integer(i) if *i >= 1 && (*i as u64) <= MAX_N as u64 => Ok(*i as usize),
        _ => Err(config_err(format!("{key} must be an integer in 1..={MAX_N}"))),
    }
}

fn family_from_table(name: &str, table: &toml::Table) -> Result<(FamilySpec, NamedFamily)> {
    let kind = match table.get("kind") {
        Some(toml::Value::String(k)) => k.clone(),
        _ => return Err(config_err(format!("family {name:?} needs a string `kind`"))),
    };
    let mut params = FamilyParams::default();
    for (key, value) in table {
        match key.as_str() {
            "kind" => {}
            "theta" => params.theta = Some(value_text(value, key)?),
            "delta" => params.delta = Some(value_text(value, key)?),
            "c" => params.c = Some(value_text(value, key)?),
            "theta_exp" | "theta-exp" => params.theta_exp = Some(value_text(value, key)?),
            "alpha" => params.alpha = Some(value_list(value, key)?),
            "eps" => params.eps = Some(value_list(value, key)?),
            "b" => params.poly = Some(value_list(value, key)?),
            "truncation_note" => params.truncation_note = Some(value_text(value, key)?),
            other => return Err(config_err(format!("family {name:?}: unknown key {other:?}"))),
        }
    }
    let spec = FamilySpec::from_params(&kind, &params).map_err(|e| named_err(name, e))?;
    Ok((spec, NamedFamily { kind, params }))
}

fn named_err(name: &str, e: Error) -> Error {
    match e {
        Error::Config(msg) => config_err(format!("family {name:?}: {msg}")),
        other => other,
    }
}

fn run_from_table(table: &toml::Table) -> Result<RunDefaults> {
    let mut run = RunDefaults::default();
    for (key, value) in table {
        match key.as_str() {
            "family" => run.family = Some(value_text(value, key)?),
            "n" => run.n = Some(value_usize(value, key)?),
            "n_grid" | "n-grid" => {
                let toml::Value::Array(items) = value else {
                    return Err(config_err("n_grid must be an array"));
                };
                if items.len() > MAX_GRID_LEN {
                    return Err(config_err(format!("n_grid longer than {MAX_GRID_LEN}")));
                }
                run.n_grid = Some(items.iter().map(|v| value_usize(v, key)).collect::<Result<_>>()?);
            }
            "b" => run.b = Some(value_usize(value, key)?),
            "seed" => match value {
                toml::Value::Integer(i) if *i >= 0 => run.seed = Some(*i as u64),
                _ => return Err(config_err("seed must be a nonnegative integer")),
            },
            "backend" => run.backend = Some(value_text(value, key)?),
            "format" => run.format = Some(value_text(value, key)?),
            other => return Err(config_err(format!("[run]: unknown key {other:?}"))),
        }
    }
    Ok(run)
}

/// Parses a family file. Families are validated but not built.
pub fn parse_config(text: &str) -> Result<Config> {
    let root: toml::Table = toml::from_str(text).map_err(|e| config_err(e.to_string()))?;
    let mut config = Config::default();
    for (key, value) in &root {
        match (key.as_str(), value) {
            ("run", toml::Value::Table(t)) => config.run = run_from_table(t)?,
            ("family", toml::Value::Table(fams)) => {
                for (name, def) in fams {
                    let toml::Value::Table(t) = def else {
                        return Err(config_err(format!("family {name:?} must be a table")));
                    };
                    let (spec, def) = family_from_table(name, t)?;
                    config.families.insert(name.clone(), spec);
                    config.definitions.insert(name.clone(), def);
                }
            }
            (other, _) => return Err(config_err(format!("unknown top-level entry {other:?}"))),
        }
    }
    Ok(config)
}

impl Config {
    /// Looks up `name` among the configured families, then among the
    /// built-in kinds. Values in `overrides` replace configured ones.
    pub fn resolve(&self, name: &str, overrides: &FamilyParams) -> Result<FamilySpec> {
        match (self.families.get(name), self.definitions.get(name)) {
            (Some(spec), _) if overrides.is_empty() => Ok(spec.clone()),
            (_, Some(def)) => FamilySpec::from_params(&def.kind, &def.params.overridden_by(overrides))
                .map_err(|e| named_err(name, e)),
            _ => FamilySpec::from_params(name, overrides),
        }
    }
}
