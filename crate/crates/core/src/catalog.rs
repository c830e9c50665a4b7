//! Named weight families with their analytic classification.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::asymptotics::{theta_shift_constant, ShiftMode, SingularityClass};
use crate::error::{Error, Result};
use crate::scalar::Surd;
use crate::special::riemann_zeta;
use crate::weights::WeightSequence;

/// Where a family stands with respect to the singularity-analysis estimators.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum Classification {
    Class { class: SingularityClass },
    /// Neither of the supported classes; estimators refuse.
    Unsupported { reason: String },
    /// Asymptotic behaviour not known.
    Open { reason: String },
    ZeroRadius,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    Ewens,
    ThetaShift,
    Polylog,
    ExpWeight,
    AlphaExp,
    Spatial,
    Custom,
}

#[derive(Debug, Clone)]
pub struct WeightFamily {
    pub weights: WeightSequence,
    pub classification: Classification,
    pub provenance: Provenance,
}

impl WeightFamily {
    pub fn new(weights: WeightSequence, classification: Classification, provenance: Provenance) -> Self {
        let weights = match &classification {
            Classification::Class { class } => weights.with_singularity(class.clone()),
            _ => weights,
        };
        WeightFamily {
            weights,
            classification,
            provenance,
        }
    }

    pub fn name(&self) -> &str {
        self.weights.name()
    }

    /// The declared class, or the reason the estimators cannot use one.
    pub fn class(&self) -> Result<&SingularityClass> {
        match &self.classification {
            Classification::Class { class } => Ok(class),
            Classification::Unsupported { reason } => Err(Error::UnsupportedClass(format!("{}: {reason}", self.name()))),
            Classification::Open { reason } => Err(Error::UnsupportedClass(format!("{}: open case, {reason}", self.name()))),
            Classification::ZeroRadius => Err(Error::UnsupportedClass(format!(
                "{}: g has radius of convergence 0",
                self.name()
            ))),
        }
    }

    pub fn main_term_zero(&self) -> bool {
        self.class().map(|c| c.main_term_zero()).unwrap_or(false)
    }
}

fn rational_label(q: &BigRational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

fn to_f64(q: &BigRational) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

/// `2q` when it is an integer that fits an `i64`.
fn twice_as_int(q: &BigRational) -> Option<i64> {
    let twice = q * BigRational::from_integer(BigInt::from(2));
    if twice.is_integer() {
        twice.numer().to_i64()
    } else {
        None
    }
}

/// `m ↦ m^δ`, exact whenever `2δ` is an integer.
fn power_weights(name: String, delta: &BigRational) -> WeightSequence {
    let d = to_f64(delta);
    match twice_as_int(delta) {
        Some(p) => WeightSequence::exact_with_approx(
            name,
            move |m| Surd::pow_half(m as u64, p),
            move |m| (m as f64).powf(d),
        ),
        None => WeightSequence::approx(name, move |m| (m as f64).powf(d)),
    }
}

/// `θ_m ≡ θ`: class `F(1, θ)` with `K = 0`.
pub fn ewens(theta: BigRational) -> Result<WeightFamily> {
    if theta.is_negative() {
        return Err(Error::Usage(format!("ewens needs θ ≥ 0, got {theta}")));
    }
    let name = format!("ewens({})", rational_label(&theta));
    let classification = Classification::Class {
        class: SingularityClass::f(1.0, to_f64(&theta), 0.0)?,
    };
    Ok(WeightFamily::new(
        WeightSequence::constant(name, theta),
        classification,
        Provenance::Ewens,
    ))
}

/// `θ_m = θ + m^δ` with `δ < 0`, so `K = Σ m^{δ−1} = ζ(1−δ)`.
///
/// For `δ < −1` the shifts are absolutely summable and the class is
/// `F(1, θ)`. For `−1 ≤ δ < 0` only `Σ |θ_m − θ|/m` converges and the class
/// is `eF(1, θ, −δ)`.
pub fn theta_shift(theta: BigRational, delta: BigRational) -> Result<WeightFamily> {
    if theta.is_negative() {
        return Err(Error::Usage(format!("theta-shift needs θ ≥ 0, got {theta}")));
    }
    let name = format!("theta-shift({},{})", rational_label(&theta), rational_label(&delta));
    let d = to_f64(&delta);
    let base = Surd::rational(theta.clone());
    let base_f = to_f64(&theta);
    let weights = match twice_as_int(&delta) {
        Some(p) => WeightSequence::exact_with_approx(
            name.clone(),
            move |m| base.clone() + Surd::pow_half(m as u64, p),
            move |m| base_f + (m as f64).powf(d),
        ),
        None => WeightSequence::approx(name.clone(), move |m| base_f + (m as f64).powf(d)),
    };
    if d >= 0.0 {
        return Ok(WeightFamily::new(
            weights,
            Classification::Unsupported {
                reason: format!("Σ|θ_m − θ|/m diverges for δ = {d}"),
            },
            Provenance::ThetaShift,
        ));
    }
    let k_const = riemann_zeta(1.0 - d)?;
    let class = if d < -1.0 {
        SingularityClass::f(1.0, base_f, k_const)?
    } else {
        SingularityClass::ef(1.0, base_f, k_const, -d)?
    };
    Ok(WeightFamily::new(weights, Classification::Class { class }, Provenance::ThetaShift))
}

/// `θ_m = m^{−δ}`, so `g_Θ = Σ t^m/m^{1+δ} = Li_{1+δ}`.
///
/// `δ > 0` gives class `F(1, 0)` with `K = ζ(1+δ)` and a vanishing main
/// term; `δ = 0` is Ewens with `θ = 1`; `δ < 0` has neither class.
pub fn polylog_family(delta: BigRational) -> Result<WeightFamily> {
    if delta.is_zero() {
        let mut fam = ewens(One::one())?;
        fam.provenance = Provenance::Polylog;
        return Ok(fam);
    }
    let name = format!("polylog({})", rational_label(&delta));
    let weights = power_weights(name, &-delta.clone());
    let d = to_f64(&delta);
    let classification = if d > 0.0 {
        Classification::Class {
            class: SingularityClass::f(1.0, 0.0, riemann_zeta(1.0 + d)?)?,
        }
    } else {
        Classification::Unsupported {
            reason: "Li_{1+δ} with δ < 0 is in neither F nor eF".into(),
        }
    };
    Ok(WeightFamily::new(weights, classification, Provenance::Polylog))
}

/// `K = Σ_{k≥1} c^k/k! · ζ(1 − kθ)` for `θ < 0`.
fn exp_weight_constant(c: f64, theta_exp: f64) -> Result<f64> {
    let mut sum = 0.0;
    let mut coef = 1.0;
    for k in 1..200 {
        coef *= c / k as f64;
        let term = coef * riemann_zeta(1.0 - k as f64 * theta_exp)?;
        sum += term;
        if term.abs() <= 1e-17 * sum.abs().max(1e-300) && k as f64 > c.abs() {
            return Ok(sum);
        }
    }
    Err(Error::Convergence(format!("exp-weight constant for c = {c}")))
}

/// `θ_m = exp(c·m^{θ_exp})`.
pub fn exp_weight_family(c: f64, theta_exp: f64) -> Result<WeightFamily> {
    if !c.is_finite() || !theta_exp.is_finite() {
        return Err(Error::Usage("exp-weight parameters must be finite".into()));
    }
    let name = format!("exp-weight({c},{theta_exp})");
    if c == 0.0 {
        let mut fam = ewens(One::one())?;
        fam.provenance = Provenance::ExpWeight;
        return Ok(fam);
    }
    let weights = WeightSequence::approx(name, move |m| (c * (m as f64).powf(theta_exp)).exp());
    let classification = if theta_exp < 0.0 {
        Classification::Class {
            class: SingularityClass::f(1.0, 1.0, exp_weight_constant(c, theta_exp)?)?,
        }
    } else if theta_exp == 0.0 {
        Classification::Class {
            class: SingularityClass::f(1.0, c.exp(), 0.0)?,
        }
    } else if theta_exp < 1.0 {
        if c < 0.0 {
            Classification::Unsupported {
                reason: "g tends to a constant at t = 1 with no logarithmic singularity".into(),
            }
        } else {
            Classification::Open {
                reason: "c > 0 and 0 < θ < 1".into(),
            }
        }
    } else if theta_exp == 1.0 {
        // g = −log(1 − t e^c)
        Classification::Class {
            class: SingularityClass::f((-c).exp(), 1.0, 0.0)?,
        }
    } else if c > 0.0 {
        Classification::ZeroRadius
    } else {
        Classification::Unsupported {
            reason: "g is entire (infinite radius of convergence)".into(),
        }
    };
    Ok(WeightFamily::new(weights, classification, Provenance::ExpWeight))
}

/// `θ_m = e^{−α_m}` with `α_m = α + m^δ` (or `α_m ≡ α` without `δ`).
///
/// The limit is `θ = e^{−α}` and `K = Σ (e^{−α_m} − e^{−α})/m` is summed
/// numerically.
pub fn alpha_exp(alpha: f64, delta: Option<f64>) -> Result<WeightFamily> {
    if !alpha.is_finite() || delta.is_some_and(|d| !d.is_finite()) {
        return Err(Error::Usage("alpha-exp parameters must be finite".into()));
    }
    let name = match delta {
        Some(d) => format!("alpha-exp({alpha},{d})"),
        None => format!("alpha-exp({alpha})"),
    };
    let shift = move |m: usize| delta.map_or(0.0, |d| (m as f64).powf(d));
    let weights = WeightSequence::approx(name, move |m| (-(alpha + shift(m))).exp());
    let theta = (-alpha).exp();
    let classification = match delta {
        None => Classification::Class {
            class: SingularityClass::f(1.0, theta, 0.0)?,
        },
        Some(d) if d >= 0.0 => Classification::Unsupported {
            reason: format!("Σ|α_m − α|/m diverges for δ = {d}"),
        },
        Some(d) => {
            let mode = if d < -1.0 { ShiftMode::Absolute } else { ShiftMode::PerM };
            let shift = theta_shift_constant(&weights, theta, mode)?;
            let class = if d < -1.0 {
                SingularityClass::f(1.0, theta, shift.k_const)?
            } else {
                SingularityClass::ef(1.0, theta, shift.k_const, -d)?
            };
            Classification::Class { class }
        }
    };
    Ok(WeightFamily::new(weights, classification, Provenance::AlphaExp))
}

/// Weights with no declared class.
pub fn custom(weights: WeightSequence) -> WeightFamily {
    WeightFamily::new(
        weights,
        Classification::Unsupported {
            reason: "no class declared".into(),
        },
        Provenance::Custom,
    )
}
