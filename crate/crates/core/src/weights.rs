//! Cycle weight sequences `m ↦ θ_m`.

use std::fmt;
use std::sync::Arc;

use num_rational::BigRational;

use crate::asymptotics::SingularityClass;
use crate::error::{Error, Result};
use crate::scalar::{Scalar, ScalarKind, Surd};
use crate::series::TruncatedSeries;

type ExactRule = Arc<dyn Fn(usize) -> Surd + Send + Sync>;
type ApproxRule = Arc<dyn Fn(usize) -> f64 + Send + Sync>;

/// A nonnegative weight sequence, evaluated lazily.
///
/// Every sequence has a floating rule. Sequences whose values are rational
/// or half-integer powers of integers also carry an exact rule, which the
/// exact backends use.
#[derive(Clone)]
pub struct WeightSequence {
    name: String,
    exact: Option<ExactRule>,
    approx: ApproxRule,
    singularity: Option<SingularityClass>,
}

impl fmt::Debug for WeightSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("WeightSequence")
            .field("name", &self.name)
            .field("exact", &self.exact.is_some())
            .field("singularity", &self.singularity)
            .finish()
    }
}

impl WeightSequence {
    /// Sequence with an exact rule; the floating rule is derived from it.
    pub fn exact(name: impl Into<String>, rule: impl Fn(usize) -> Surd + Send + Sync + 'static) -> Self {
        let exact: ExactRule = Arc::new(rule);
        let derived = exact.clone();
        WeightSequence {
            name: name.into(),
            exact: Some(exact),
            approx: Arc::new(move |m| derived(m).to_f64()),
            singularity: None,
        }
    }

    /// Sequence with an exact rule and a separately supplied floating rule.
    pub fn exact_with_approx(
        name: impl Into<String>,
        rule: impl Fn(usize) -> Surd + Send + Sync + 'static,
        approx: impl Fn(usize) -> f64 + Send + Sync + 'static,
    ) -> Self {
        WeightSequence {
            name: name.into(),
            exact: Some(Arc::new(rule)),
            approx: Arc::new(approx),
            singularity: None,
        }
    }

    pub fn approx(name: impl Into<String>, rule: impl Fn(usize) -> f64 + Send + Sync + 'static) -> Self {
        WeightSequence {
            name: name.into(),
            exact: None,
            approx: Arc::new(rule),
            singularity: None,
        }
    }

    pub fn constant(name: impl Into<String>, theta: BigRational) -> Self {
        let value = Surd::rational(theta);
        WeightSequence::exact(name, move |_| value.clone())
    }

    pub fn with_singularity(mut self, class: SingularityClass) -> Self {
        self.singularity = Some(class);
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn singularity(&self) -> Option<&SingularityClass> {
        self.singularity.as_ref()
    }

    pub fn is_exact(&self) -> bool {
        self.exact.is_some()
    }

    pub fn value_f64(&self, m: usize) -> f64 {
        (self.approx)(m)
    }

    pub fn value_exact(&self, m: usize) -> Option<Surd> {
        self.exact.as_ref().map(|rule| rule(m))
    }

    /// `θ_m` in the requested backend.
    pub fn value<S: Scalar>(&self, m: usize) -> Result<S> {
        if S::KIND == ScalarKind::Double {
            if let Some(v) = S::from_approx(self.value_f64(m)) {
                return Ok(v);
            }
        }
        let exact = self
            .value_exact(m)
            .ok_or_else(|| Error::NotExact(self.name.clone()))?;
        S::from_exact(&exact).ok_or_else(|| Error::NotExact(self.name.clone()))
    }

    /// `θ_1..θ_n`, checked nonnegative.
    pub fn values<S: Scalar>(&self, n: usize) -> Result<Vec<S>> {
        (1..=n)
            .map(|m| {
                let v = self.value::<S>(m)?;
                if v.to_f64() < 0.0 {
                    return Err(Error::Usage(format!(
                        "{}: weight θ_{m} is negative",
                        self.name
                    )));
                }
                Ok(v)
            })
            .collect()
    }

    /// `g_Θ(t) = Σ_{k=1}^{N} θ_k t^k / k`.
    pub fn g_series<S: Scalar>(&self, order: usize) -> Result<TruncatedSeries<S>> {
        let values = self.values::<S>(order)?;
        Ok(TruncatedSeries::from_fn(order, |k| values[k - 1].div_int(k as i64)))
    }

    /// The sequence `θ_m ρ^m` (floating rule only).
    ///
    /// Cycle-type laws are unchanged under this substitution because
    /// `Σ m·C_m = n` makes the extra factor `ρ^n` cancel.
    pub fn rescaled(&self, rho: f64) -> WeightSequence {
        let base = self.approx.clone();
        let mut out = WeightSequence::approx(format!("{}*rho^m", self.name), move |m| {
            base(m) * rho.powi(m as i32)
        });
        if let Some(cls) = &self.singularity {
            out.singularity = Some(cls.rescaled(rho));
        }
        out
    }
}
