//! Numerical continuation of `g(t) = Σ_{k≥1} φ(k)(−t)^k` through the
//! contour integral
//!
//! `g(t) = −1/(2πi) ∫_{1/2−i∞}^{1/2+i∞} φ(z) t^z π/sin(πz) dz`,
//!
//! valid for `φ` of exponential type `A < π` and `|arg t| < π − A`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Quadrature result and an estimate of the truncation error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LindelofValue {
    pub value: Complex64,
    pub truncation_error: f64,
}

/// Trapezoid rule on `Re z = 1/2`, `|Im z| ≤ half_height`, with spacing `step`.
///
/// The integrand decays like `e^{−(π − |arg t|)|Im z|}` times the growth of
/// `φ`; the truncation estimate integrates that envelope beyond the cut.
pub fn lindelof_eval(
    phi: impl Fn(Complex64) -> Complex64,
    t: Complex64,
    half_height: f64,
    step: f64,
) -> Result<LindelofValue> {
    if !(half_height > 0.0 && step > 0.0) || t.norm() == 0.0 {
        return Err(Error::Usage("need half_height > 0, step > 0 and t ≠ 0".into()));
    }
    let log_t = t.ln();
    let decay = PI - log_t.im.abs();
    if decay <= 1e-3 {
        return Err(Error::Convergence(format!("arg t = {} leaves no decay", log_t.im)));
    }
    // −1/(2πi)·π/sin(πz)·dz with dz = i·dy reduces to −1/2 · … / sin(πz) dy.
    let integrand = |y: f64| {
        let z = Complex64::new(0.5, y);
        -0.5 * phi(z) * (z * log_t).exp() / (PI * z).sin()
    };
    let steps = (half_height / step).ceil() as i64;
    let h = half_height / steps as f64;
    let mut sum = Complex64::new(0.0, 0.0);
    for j in -steps..=steps {
        let weight = if j.abs() == steps { 0.5 } else { 1.0 };
        sum += weight * integrand(j as f64 * h);
    }
    let value = sum * h;
    let edge = integrand(half_height).norm() + integrand(-half_height).norm();
    let truncation_error = edge / decay;
    if !value.re.is_finite() || !value.im.is_finite() || !truncation_error.is_finite() {
        return Err(Error::Convergence("integrand overflowed".into()));
    }
    if truncation_error > 1e-3 * value.norm().max(1.0) {
        return Err(Error::Convergence(format!(
            "integrand has not decayed at height {half_height}: tail ≈ {truncation_error:e}"
        )));
    }
    Ok(LindelofValue {
        value,
        truncation_error,
    })
}

/// [`lindelof_eval`] with the cut height chosen so the envelope
/// `|t|^{1/2} e^{−(π−|arg t|)y}` falls below `tol`.
pub fn lindelof_auto(phi: impl Fn(Complex64) -> Complex64, t: Complex64, tol: f64) -> Result<LindelofValue> {
    let decay = PI - t.arg().abs();
    if decay <= 1e-3 {
        return Err(Error::Convergence(format!("arg t = {} leaves no decay", t.arg())));
    }
    let scale = t.norm().sqrt().max(1.0);
    let half_height = ((scale / tol).ln() + 4.0) / decay;
    lindelof_eval(phi, t, half_height.max(4.0), 0.02)
}

/// `Li_s(z)` anywhere off `[1, ∞)`: direct series for `|z| ≤ 1/2`, the
/// contour integral with `φ(w) = w^{−s}` and `t = −z` elsewhere.
pub fn polylog(s: f64, z: Complex64) -> Result<Complex64> {
    if z.norm() <= 0.5 {
        return crate::special::polylog_series(s, z);
    }
    if z.im == 0.0 && z.re >= 1.0 {
        return Err(Error::Usage("polylog branch cut [1, ∞)".into()));
    }
    let minus_t = -z;
    lindelof_auto(|w| (-s * w.ln()).exp(), minus_t, 1e-14).map(|v| v.value)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn inverse_identity_inside_and_outside_the_disk() {
        let phi = |z: Complex64| 1.0 / z;
        for t in [c(0.5, 0.0), c(3.0, 0.0), Complex64::from_polar(10.0, PI / 4.0)] {
            let v = lindelof_auto(phi, t, 1e-13).unwrap();
            let expected = -(1.0 + t).ln();
            assert!((v.value - expected).norm() < 1e-10, "t={t}: {} vs {expected}", v.value);
            assert!(v.truncation_error < 1e-10);
        }
    }

    #[test]
    fn dilog_against_direct_series() {
        let phi = |z: Complex64| 1.0 / (z * z);
        for t in [c(-0.45, 0.2), c(0.3, 0.4), c(-0.2, -0.6)] {
            let v = lindelof_auto(phi, t, 1e-13).unwrap();
            // Σ (−t)^k / k², summed directly
            let mut direct = c(0.0, 0.0);
            let mut power = c(1.0, 0.0);
            for k in 1..4000 {
                power *= -t;
                direct += power / (k * k) as f64;
            }
            assert!((v.value - direct).norm() < 1e-8, "t={t}");
        }
    }

    #[test]
    fn no_decay_is_a_convergence_failure() {
        let r = lindelof_eval(|z| 1.0 / z, c(-2.0, 1e-12), 10.0, 0.05);
        assert!(matches!(r, Err(Error::Convergence(_))));
        let short = lindelof_eval(|z| 1.0 / z, Complex64::from_polar(5.0, 3.0), 2.0, 0.05);
        assert!(matches!(short, Err(Error::Convergence(_))));
    }

    #[test]
    fn polylog_continuation() {
        let li2_minus1 = polylog(2.0, c(-1.0, 0.0)).unwrap();
        assert!((li2_minus1.re + PI * PI / 12.0).abs() < 1e-10);
        let li1 = polylog(1.0, c(-3.0, 0.0)).unwrap();
        assert!((li1.re + 4f64.ln()).abs() < 1e-10);
        assert!(polylog(2.0, c(2.0, 0.0)).is_err());
    }
}
