//! Singularity-analysis estimates for coefficients of `exp(w·g(t))`,
//! asymptotics of `h_n`, the mod-Poisson limit of `K_{0n}`, large deviation
//! main terms, and the shift constant `K = Σ (θ_m − θ)/m`.
//!
//! All estimators work in double precision and take the analytic class of
//! `g` as declared metadata.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::special::{complex_gamma, ln_gamma, recip_gamma};
use crate::weights::WeightSequence;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ClassKind {
    /// `g = θ log(1/(1−t/r)) + K + O(t−r)` in a slit disk.
    F,
    /// `g = θ log(1/(1−t/r)) + g_0` with `[t^n]g_0 = O(r^{−n} n^{−1−γ})`.
    EF { gamma: f64 },
}

/// Error rate attached to the finite-`n` laws of a class.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ErrorRate {
    /// `O(1/n)`.
    InverseN,
    /// `O(log n / n^γ)`.
    LogOverPower(f64),
    /// Convergence without a rate (`o(1)`).
    Unspecified,
}

impl ErrorRate {
    pub fn label(&self) -> String {
        match self {
            ErrorRate::InverseN => "O(1/n)".into(),
            ErrorRate::LogOverPower(g) => format!("O(log(n)/n^{g})"),
            ErrorRate::Unspecified => "o(1)".into(),
        }
    }

    pub fn value(&self, n: usize) -> Option<f64> {
        let n = n as f64;
        match self {
            ErrorRate::InverseN => Some(1.0 / n),
            ErrorRate::LogOverPower(g) => Some(n.ln() / n.powf(*g)),
            ErrorRate::Unspecified => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SingularityClass {
    pub kind: ClassKind,
    pub radius: f64,
    /// Strength of the logarithmic singularity.
    pub theta: f64,
    /// Constant term of the expansion at the singularity.
    pub k_const: f64,
    /// `(R, φ)` of the slit domain, when known.
    pub geometry: Option<(f64, f64)>,
    pub error_rate: ErrorRate,
}

impl SingularityClass {
    pub fn f(radius: f64, theta: f64, k_const: f64) -> Result<Self> {
        Self::validate(radius, theta)?;
        Ok(SingularityClass {
            kind: ClassKind::F,
            radius,
            theta,
            k_const,
            geometry: None,
            error_rate: ErrorRate::InverseN,
        })
    }

    pub fn ef(radius: f64, theta: f64, k_const: f64, gamma: f64) -> Result<Self> {
        Self::validate(radius, theta)?;
        if !(gamma > 0.0 && gamma <= 1.0) {
            return Err(Error::Usage(format!("eF needs 0 < γ ≤ 1, got {gamma}")));
        }
        Ok(SingularityClass {
            kind: ClassKind::EF { gamma },
            radius,
            theta,
            k_const,
            geometry: None,
            error_rate: ErrorRate::LogOverPower(gamma),
        })
    }

    fn validate(radius: f64, theta: f64) -> Result<()> {
        if !(radius > 0.0) {
            return Err(Error::Usage(format!("radius must be positive, got {radius}")));
        }
        if !(theta >= 0.0) {
            return Err(Error::Usage(format!("θ must be nonnegative, got {theta}")));
        }
        Ok(())
    }

    pub fn with_error_rate(mut self, rate: ErrorRate) -> Self {
        self.error_rate = rate;
        self
    }

    pub fn with_geometry(mut self, big_r: f64, phi: f64) -> Self {
        self.geometry = Some((big_r, phi));
        self
    }

    /// `Γ(θw)` has a pole at `w = 1`, so the leading coefficient term vanishes.
    pub fn main_term_zero(&self) -> bool {
        self.theta == 0.0
    }

    /// Class of `g(ρt)`: singularity at `r/ρ`, same `θ` and `K`.
    pub fn rescaled(&self, rho: f64) -> Self {
        let mut out = self.clone();
        out.radius = self.radius / rho;
        out.geometry = self.geometry.map(|(big_r, phi)| (big_r / rho, phi));
        out
    }
}

/// Main term of `[t^n] e^{w g(t)} S(t, w)`:
/// `e^{Kw} n^{wθ−1} r^{−n} S(r, w)/Γ(θw)`, which is 0 at the poles of `Γ`.
pub fn hwang_estimate(cls: &SingularityClass, s_at_r: Complex64, n: usize, w: Complex64) -> Result<Complex64> {
    if n == 0 {
        return Err(Error::Usage("hwang_estimate needs n ≥ 1".into()));
    }
    let nf = n as f64;
    let log_mag = cls.k_const * w + (w * cls.theta - 1.0) * nf.ln() - nf * cls.radius.ln();
    Ok(log_mag.exp() * s_at_r * recip_gamma(w * cls.theta))
}

/// `h_n ≈ e^K n^{θ−1} / (r^n Γ(θ))`.
pub fn asymptotic_hn(cls: &SingularityClass, n: usize) -> Result<f64> {
    if cls.main_term_zero() {
        return Err(Error::UnsupportedClass(
            "θ = 0: the leading term of h_n vanishes".into(),
        ));
    }
    if n == 0 {
        return Err(Error::Usage("asymptotic_hn needs n ≥ 1".into()));
    }
    let nf = n as f64;
    let log_h = cls.k_const + (cls.theta - 1.0) * nf.ln() - nf * cls.radius.ln() - ln_gamma(cls.theta);
    Ok(log_h.exp())
}

/// Limiting function `Γ(θ)/Γ(θe^{is})` of the mod-Poisson convergence of `K_{0n}`.
pub fn mod_poisson_limit(theta: f64, s: f64) -> Result<Complex64> {
    if !(theta > 0.0) {
        return Err(Error::Usage(format!("mod-Poisson limit needs θ > 0, got {theta}")));
    }
    let g = complex_gamma(Complex64::new(theta, 0.0))?;
    Ok(g * recip_gamma(Complex64::from_polar(theta, s)))
}

/// `I(x) = x log x − x + 1`, the Fenchel–Legendre transform of `e^z − 1`.
pub fn poisson_rate_function(x: f64) -> f64 {
    if x == 0.0 {
        1.0
    } else {
        x * x.ln() - x + 1.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LargeDeviation {
    pub k: usize,
    /// `t_n = K + θ log n`.
    pub t_n: f64,
    /// `x = k / t_n`.
    pub x: f64,
    /// `e^{−t_n} t_n^k / k!`.
    pub poisson_pmf: f64,
    /// `Γ(θ)/(Γ(x)Γ(θx))`.
    pub correction: f64,
    /// `poisson_pmf · correction`.
    pub estimate: f64,
    /// `Γ(θ)/Γ(θx)`, the factor implied by the characteristic-function
    /// asymptotics of `K_{0n}` itself.
    pub correction_char_fn: f64,
    pub rate_function: f64,
    /// Saddle point `h = log x`.
    pub saddle: f64,
}

/// Main term `e^{−t_n} t_n^k/k! · Γ(θ)/(Γ(x)Γ(θx))` for the point
/// probabilities of the cycle count, with `t_n = K + θ log n`, `x = k/t_n`.
pub fn large_deviation_estimate(theta: f64, k_const: f64, n: usize, k: usize) -> Result<LargeDeviation> {
    if !(theta > 0.0) {
        return Err(Error::Usage(format!("need θ > 0, got {theta}")));
    }
    if k == 0 || n == 0 {
        return Err(Error::Usage("need k ≥ 1 and n ≥ 1".into()));
    }
    let t_n = k_const + theta * (n as f64).ln();
    if !(t_n > 0.0) {
        return Err(Error::Usage(format!("t_n = {t_n} must be positive")));
    }
    let kf = k as f64;
    let x = kf / t_n;
    let poisson_pmf = (-t_n + kf * t_n.ln() - ln_gamma(kf + 1.0)).exp();
    let ln_gamma_theta = ln_gamma(theta);
    let correction = (ln_gamma_theta - ln_gamma(x) - ln_gamma(theta * x)).exp();
    let correction_char_fn = (ln_gamma_theta - ln_gamma(theta * x)).exp();
    Ok(LargeDeviation {
        k,
        t_n,
        x,
        poisson_pmf,
        correction,
        estimate: poisson_pmf * correction,
        correction_char_fn,
        rate_function: poisson_rate_function(x),
        saddle: x.ln(),
    })
}

/// Which summability condition on `θ_m − θ` is asserted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ShiftMode {
    /// `Σ |θ_m − θ|/m < ∞`; expansion error only `o(1)`.
    PerM,
    /// `Σ |θ_m − θ| < ∞`; expansion error `O(t − 1)`.
    Absolute,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ShiftConstant {
    /// `K = Σ_{m≥1} (θ_m − θ)/m`.
    pub k_const: f64,
    /// Change of the tail-corrected sum over the last doubling of the
    /// number of terms.
    pub tail_bound: f64,
    /// Fitted exponent `p` in `|θ_m − θ| ≈ C m^{−p}` (infinite when the
    /// differences vanish).
    pub decay_exponent: f64,
    pub terms_summed: usize,
}

impl ShiftConstant {
    /// Class `F(1, θ)` for absolutely summable shifts; `eF(1, θ, γ)` with
    /// `γ = min(p, 1)` otherwise.
    pub fn class(&self, theta: f64, mode: ShiftMode) -> Result<SingularityClass> {
        match mode {
            ShiftMode::Absolute => SingularityClass::f(1.0, theta, self.k_const),
            ShiftMode::PerM => {
                let gamma = self.decay_exponent.min(1.0);
                Ok(SingularityClass::ef(1.0, theta, self.k_const, gamma)?
                    .with_error_rate(ErrorRate::Unspecified))
            }
        }
    }
}

const SHIFT_MIN_TERMS: usize = 1 << 10;
const SHIFT_MAX_TERMS: usize = 1 << 22;
const SHIFT_TOL: f64 = 1e-11;

/// `K = Σ (θ_m − θ)/m` with a power-law tail estimate.
///
/// Terms are summed in doubling blocks. After each block the decay exponent
/// of `|θ_m − θ|` is fitted from the last two block ends and the tail
/// `Σ_{m>M}` is approximated by the integral of the fitted power law from
/// `M + 1/2`. The result is accepted once two consecutive tail-corrected
/// sums agree. Fails when the fitted decay violates the asserted condition.
pub fn theta_shift_constant(seq: &WeightSequence, theta_limit: f64, mode: ShiftMode) -> Result<ShiftConstant> {
    let diff = |m: usize| seq.value_f64(m) - theta_limit;
    let required = match mode {
        ShiftMode::PerM => 0.0,
        ShiftMode::Absolute => 1.0,
    };
    let mut sum = 0.0;
    let mut comp = 0.0;
    let mut m_done = 0;
    let mut upper = SHIFT_MIN_TERMS;
    let mut previous: Option<f64> = None;
    loop {
        for m in m_done + 1..=upper {
            // Kahan summation
            let y = diff(m) / m as f64 - comp;
            let t = sum + y;
            comp = (t - sum) - y;
            sum = t;
        }
        m_done = upper;
        let (a_hi, a_lo) = (diff(upper).abs(), diff(upper / 2).abs());
        let p = if a_hi == 0.0 {
            f64::INFINITY
        } else if a_lo == 0.0 {
            0.0
        } else {
            (a_lo / a_hi).ln() / 2f64.ln()
        };
        if p <= required + 0.02 {
            return Err(Error::Convergence(format!(
                "|θ_m − θ| decays like m^-{p:.3}; the {mode:?} summability condition fails"
            )));
        }
        // Σ_{m>M} a_M (M/m)^p / m ≈ a_M M^p (M + 1/2)^{−p} / p
        let mf = upper as f64;
        let tail = if p.is_finite() {
            diff(upper) * (mf / (mf + 0.5)).powf(p) / p
        } else {
            0.0
        };
        let estimate = sum + tail;
        let change = previous.map_or(f64::INFINITY, |prev| (estimate - prev).abs());
        if tail == 0.0 || change <= SHIFT_TOL * estimate.abs().max(1.0) {
            return Ok(ShiftConstant {
                k_const: estimate,
                tail_bound: if tail == 0.0 { 0.0 } else { change },
                decay_exponent: p,
                terms_summed: m_done,
            });
        }
        if upper >= SHIFT_MAX_TERMS {
            return Err(Error::Convergence(format!(
                "partial sums still moving by {change:e} after {upper} terms"
            )));
        }
        previous = Some(estimate);
        upper *= 2;
    }
}
