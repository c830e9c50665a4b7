//! The generalized weighted measure `P_F[σ] ∝ Π_m F_m(C_m(σ))` with
//! `F_m(0) = 1`.
//!
//! Its normalization has the generating function `Π_m EG(F_m, t^m/m)`, where
//! `EG(A, x) = Σ_k A(k) x^k / k!`. Two families are built in: exp-polynomial
//! weights, whose EG series is `exp(P(x))` for every `m`, and the fixed-lattice
//! spatial model, which reduces to a weighted measure with effective weights.

use std::fmt;
use std::sync::{Arc, Mutex};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;

use crate::asymptotics::SingularityClass;
use crate::catalog::{Classification, Provenance, WeightFamily};
use crate::error::{Error, Result};
use crate::measure::{enumerate_tuples, joint_support_size, JOINT_SUPPORT_LIMIT};
use crate::partitions::{for_each_partition, normalize, CycleTypeOracle, Partition, DEFAULT_ENUMERATION_LIMIT};
use crate::pmf::Pmf;
use crate::scalar::{Scalar, ScalarKind, Surd};
use crate::series::{BivariateSeries, TruncatedSeries};
use crate::special::riemann_zeta;
use crate::weights::WeightSequence;

type ExactEg = Arc<dyn Fn(usize, usize) -> Surd + Send + Sync>;
type ApproxEg = Arc<dyn Fn(usize, usize) -> f64 + Send + Sync>;

/// Weights `F_m(k)`, stored through their EG coefficients `F_m(k)/k!`.
///
/// Keeping `F_m(k)/k!` rather than `F_m(k)` lets the floating rule stay in
/// range for large `k`.
#[derive(Clone)]
pub struct GeneralizedWeights {
    name: String,
    exact: Option<ExactEg>,
    approx: ApproxEg,
}

impl fmt::Debug for GeneralizedWeights {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GeneralizedWeights")
            .field("name", &self.name)
            .field("exact", &self.exact.is_some())
            .finish()
    }
}

fn factorial(k: usize) -> BigRational {
    let mut acc = BigInt::from(1);
    for j in 2..=k {
        acc *= j;
    }
    BigRational::from_integer(acc)
}

fn rzero() -> BigRational {
    Zero::zero()
}

fn q_f64(q: &BigRational) -> f64 {
    ToPrimitive::to_f64(q).unwrap_or(f64::NAN)
}

fn ln_factorial(k: usize) -> f64 {
    crate::special::ln_gamma(k as f64 + 1.0)
}

impl GeneralizedWeights {
    /// Weights given by an exact rule for `F_m(k)`.
    pub fn exact(name: impl Into<String>, rule: impl Fn(usize, usize) -> Surd + Send + Sync + 'static) -> Self {
        let rule = Arc::new(rule);
        let approx_rule = rule.clone();
        GeneralizedWeights {
            name: name.into(),
            exact: Some(Arc::new(move |m, k| {
                rule(m, k).scale(&factorial(k).recip())
            })),
            approx: Arc::new(move |m, k| {
                let v = approx_rule(m, k).to_f64();
                if v == 0.0 {
                    0.0
                } else {
                    (v.ln() - ln_factorial(k)).exp()
                }
            }),
        }
    }

    /// Weights given by a floating rule for `F_m(k)`.
    pub fn approx(name: impl Into<String>, rule: impl Fn(usize, usize) -> f64 + Send + Sync + 'static) -> Self {
        GeneralizedWeights {
            name: name.into(),
            exact: None,
            approx: Arc::new(move |m, k| {
                let v = rule(m, k);
                if v == 0.0 {
                    0.0
                } else {
                    (v.ln() - ln_factorial(k)).exp()
                }
            }),
        }
    }

    /// `F_m(k) = θ_m^k`, the weighted measure `P_Θ`.
    pub fn from_theta(theta: &WeightSequence) -> Self {
        let exact = theta.is_exact().then(|| {
            let theta = theta.clone();
            Arc::new(move |m: usize, k: usize| {
                let base = theta.value_exact(m).expect("exact weights");
                let mut acc = Surd::one();
                for _ in 0..k {
                    acc = acc * base.clone();
                }
                acc.scale(&factorial(k).recip())
            }) as ExactEg
        });
        let approx_theta = theta.clone();
        GeneralizedWeights {
            name: format!("{}^k", theta.name()),
            exact,
            approx: Arc::new(move |m, k| {
                let base = approx_theta.value_f64(m);
                if k == 0 {
                    1.0
                } else if base == 0.0 {
                    0.0
                } else {
                    (k as f64 * base.ln() - ln_factorial(k)).exp()
                }
            }),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn is_exact(&self) -> bool {
        self.exact.is_some()
    }

    /// `F_m(k)/k!` in the requested backend.
    pub fn eg_coeff<S: Scalar>(&self, m: usize, k: usize) -> Result<S> {
        if S::KIND == ScalarKind::Double {
            if let Some(v) = S::from_approx((self.approx)(m, k)) {
                return Ok(v);
            }
        }
        let exact = self.exact.as_ref().ok_or_else(|| Error::NotExact(self.name.clone()))?;
        let v = exact(m, k);
        S::from_exact(&v).ok_or_else(|| Error::NotExact(self.name.clone()))
    }

    /// `F_m(k)` in double precision.
    pub fn value_f64(&self, m: usize, k: usize) -> f64 {
        let eg = (self.approx)(m, k);
        if eg == 0.0 {
            0.0
        } else {
            (eg.ln() + ln_factorial(k)).exp()
        }
    }

    /// `F_m(k)` exactly, when an exact rule exists.
    pub fn value_exact(&self, m: usize, k: usize) -> Option<Surd> {
        self.exact.as_ref().map(|rule| rule(m, k).scale(&factorial(k)))
    }

    /// `F_m(0) = 1` and `F_m(k) ≥ 0` for all `m·k ≤ n`.
    fn check<S: Scalar>(&self, n: usize) -> Result<()> {
        for m in 1..=n {
            if self.eg_coeff::<S>(m, 0)? != S::one() {
                return Err(Error::Usage(format!("{}: F_{m}(0) must be 1", self.name)));
            }
            for k in 1..=n / m {
                if self.eg_coeff::<S>(m, k)?.to_f64() < 0.0 {
                    return Err(Error::Usage(format!("{}: F_{m}({k}) is negative", self.name)));
                }
            }
        }
        Ok(())
    }
}

/// `EG(F_m, x) = Σ_{k≤x_trunc} F_m(k) x^k / k!`.
pub fn eg_series<S: Scalar>(weights: &GeneralizedWeights, m: usize, x_trunc: usize) -> Result<TruncatedSeries<S>> {
    let coeffs = (0..=x_trunc)
        .map(|k| weights.eg_coeff::<S>(m, k))
        .collect::<Result<Vec<_>>>()?;
    Ok(TruncatedSeries::new(coeffs, x_trunc))
}

/// Coefficients of `EG(F_m, t^m/m)` at `t^{mk}`, `k = 0..=order/m`.
fn substituted<S: Scalar>(weights: &GeneralizedWeights, m: usize, order: usize) -> Result<Vec<S>> {
    let mut out = Vec::with_capacity(order / m + 1);
    let mut m_pow = S::one();
    for k in 0..=order / m {
        out.push(weights.eg_coeff::<S>(m, k)?.checked_div(&m_pow).expect("m^k ≠ 0"));
        m_pow = m_pow * S::from_int(m as i64);
    }
    Ok(out)
}

/// `acc · EG(F_m, t^m/m)` truncated at `t^order`, using the sparsity of the
/// second factor.
fn mul_sparse<S: Scalar>(acc: &[S], m: usize, factor: &[S]) -> Vec<S> {
    let order = acc.len() - 1;
    let mut out = vec![S::zero(); order + 1];
    for (i, a) in acc.iter().enumerate() {
        if a.is_zero() {
            continue;
        }
        for (k, f) in factor.iter().enumerate() {
            let idx = i + m * k;
            if idx > order {
                break;
            }
            if !f.is_zero() {
                out[idx] = out[idx].clone() + a.clone() * f.clone();
            }
        }
    }
    out
}

/// `Π_{m ∈ lengths} EG(F_m, t^m/m)` truncated at `t^order`.
fn eg_product<S: Scalar>(
    weights: &GeneralizedWeights,
    order: usize,
    lengths: impl Iterator<Item = usize>,
) -> Result<Vec<S>> {
    let mut acc = vec![S::zero(); order + 1];
    acc[0] = S::one();
    for m in lengths {
        let factor = substituted::<S>(weights, m, order)?;
        acc = mul_sparse(&acc, m, &factor);
    }
    Ok(acc)
}

/// `h_0(F), …, h_N(F)` from `Σ h_n(F) t^n = Π_m EG(F_m, t^m/m)`.
pub fn generalized_normalization<S: Scalar>(weights: &GeneralizedWeights, order: usize) -> Result<Vec<S>> {
    weights.check::<S>(order)?;
    eg_product(weights, order, 1..=order)
}

/// Joint law of `(C_1, …, C_b)` under `P_F` on `S_n`:
///
/// `P[C = c] = Π_{m≤b} F_m(c_m)/(c_m! m^{c_m}) · [t^{n−Σ m c_m}] Π_{m>b} EG(F_m, t^m/m) / h_n(F)`.
pub fn generalized_joint_cycle_pmf<S: Scalar>(
    weights: &GeneralizedWeights,
    n: usize,
    b: usize,
) -> Result<Pmf<Vec<usize>, S>> {
    if b == 0 || b > n {
        return Err(Error::Usage(format!("need 1 ≤ b ≤ n, got b={b}, n={n}")));
    }
    let size = joint_support_size(n, b);
    if size > JOINT_SUPPORT_LIMIT {
        return Err(Error::Resource(format!("joint law for n={n}, b={b} has {size:.3e} tuples")));
    }
    let h = generalized_normalization::<S>(weights, n)?;
    let tail = eg_product::<S>(weights, n, b + 1..=n)?;
    let heads = (1..=b)
        .map(|m| substituted::<S>(weights, m, n))
        .collect::<Result<Vec<_>>>()?;
    let mut raw = Vec::new();
    let mut counts = vec![0usize; b];
    enumerate_tuples(0, n, &mut counts, &mut |counts, used| {
        let mut w = tail[n - used].clone();
        if !w.is_zero() {
            for (m, &c) in counts.iter().enumerate() {
                w = w * heads[m][c].clone();
            }
        }
        raw.push((counts.to_vec(), w));
    });
    normalize(raw, &h[n], weights.name(), n)
}

/// `Π_m EG(F_m, u·t^m/m)`: the `u^k t^n` coefficient is `h_n(F)·P[K_0n = k]`.
pub fn generalized_cycle_series<S: Scalar>(weights: &GeneralizedWeights, order: usize) -> Result<BivariateSeries<S>> {
    weights.check::<S>(order)?;
    let mut rows: Vec<Vec<S>> = (0..=order).map(|i| vec![S::zero(); i + 1]).collect();
    rows[0][0] = S::one();
    for m in 1..=order {
        let factor = substituted::<S>(weights, m, order)?;
        let mut next: Vec<Vec<S>> = (0..=order).map(|i| vec![S::zero(); i + 1]).collect();
        for (i, row) in rows.iter().enumerate() {
            for (j, a) in row.iter().enumerate() {
                if a.is_zero() {
                    continue;
                }
                for (k, f) in factor.iter().enumerate() {
                    let idx = i + m * k;
                    if idx > order {
                        break;
                    }
                    if !f.is_zero() {
                        next[idx][j + k] = next[idx][j + k].clone() + a.clone() * f.clone();
                    }
                }
            }
        }
        rows = next;
    }
    Ok(BivariateSeries::from_rows(rows))
}

/// Law of the number of cycles under `P_F`.
pub fn generalized_total_cycles_pmf<S: Scalar>(weights: &GeneralizedWeights, n: usize) -> Result<Pmf<usize, S>> {
    if n == 0 {
        return Err(Error::Usage("generalized_total_cycles_pmf needs n ≥ 1".into()));
    }
    let series = generalized_cycle_series::<S>(weights, n)?;
    let row = series.row(n);
    let total = row.iter().fold(S::zero(), |acc, c| acc + c.clone());
    let raw = row.iter().cloned().enumerate().skip(1).collect();
    normalize(raw, &total, weights.name(), n)
}

/// The cycle-type law under `P_F` by enumeration:
/// weight `Π_m F_m(c_m)/(c_m! m^{c_m})` per partition.
pub fn brute_force_generalized_pmf<S: Scalar>(weights: &GeneralizedWeights, n: usize) -> Result<CycleTypeOracle<S>> {
    if n == 0 {
        return Err(Error::Usage("brute force needs n ≥ 1".into()));
    }
    let mut raw = Vec::new();
    let mut total = S::zero();
    let mut failure = None;
    for_each_partition(n, DEFAULT_ENUMERATION_LIMIT, |parts| {
        let lambda = Partition::new(parts.to_vec()).expect("enumerated partition");
        let counts = lambda.cycle_counts();
        let mut w = S::one();
        for (idx, &c) in counts.iter().enumerate() {
            if c == 0 {
                continue;
            }
            let m = idx + 1;
            match weights.eg_coeff::<S>(m, c) {
                Ok(eg) => {
                    let denom = (0..c).fold(S::one(), |acc, _| acc * S::from_int(m as i64));
                    w = w * eg.checked_div(&denom).expect("m^c ≠ 0");
                }
                Err(e) => failure = Some(e),
            }
        }
        total = total.clone() + w.clone();
        raw.push((lambda, w));
    })?;
    if let Some(e) = failure {
        return Err(e);
    }
    let pmf = normalize(raw, &total, weights.name(), n)?;
    Ok(CycleTypeOracle {
        pmf,
        normalization: total,
    })
}

/// `EG(F_m, x) = exp(P(x))` for every `m`, with
/// `P(x) = θx + Σ_{k=2}^{d} b_k x^k`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExpPolynomial {
    pub theta: BigRational,
    /// `b_2, …, b_d`.
    pub higher: Vec<BigRational>,
}

struct EgCache {
    exact: Vec<BigRational>,
    approx: Vec<f64>,
}

impl ExpPolynomial {
    pub fn new(theta: BigRational, higher: Vec<BigRational>) -> Result<Self> {
        if theta <= rzero() {
            return Err(Error::Usage(format!("exp-polynomial needs θ > 0, got {theta}")));
        }
        if higher.iter().any(|b| *b < rzero()) {
            return Err(Error::Usage("exp-polynomial needs every b_k ≥ 0".into()));
        }
        Ok(ExpPolynomial { theta, higher })
    }

    /// `[x^j] P`.
    fn poly_coeff(&self, j: usize) -> BigRational {
        match j {
            1 => self.theta.clone(),
            j if j >= 2 && j - 2 < self.higher.len() => self.higher[j - 2].clone(),
            _ => rzero(),
        }
    }

    fn label(&self) -> String {
        let mut s = format!("exp-polynomial({}", self.theta);
        for b in &self.higher {
            s.push_str(&format!(",{b}"));
        }
        s.push(')');
        s
    }

    /// `F_m(k) = k!·[x^k] exp(P(x))`, the same for every `m`.
    ///
    /// Coefficients of `exp(P)` are produced by `k a_k = Σ_j j p_j a_{k−j}`
    /// and cached as they are first requested.
    pub fn weights(&self) -> GeneralizedWeights {
        let degree = self.higher.len() + 1;
        let p: Vec<BigRational> = (0..=degree).map(|j| self.poly_coeff(j)).collect();
        let p_f: Vec<f64> = p.iter().map(q_f64).collect();
        let cache = Arc::new(Mutex::new(EgCache {
            exact: vec![BigRational::from_integer(BigInt::from(1))],
            approx: vec![1.0],
        }));
        let exact_cache = cache.clone();
        let exact_p = p.clone();
        let exact = move |_m: usize, k: usize| {
            let mut c = exact_cache.lock().expect("cache lock");
            while c.exact.len() <= k {
                let n = c.exact.len();
                let mut acc = rzero();
                for (j, pj) in exact_p.iter().enumerate().take(n + 1).skip(1) {
                    if !Zero::is_zero(pj) {
                        acc += pj * BigRational::from_integer(BigInt::from(j)) * &c.exact[n - j];
                    }
                }
                let next = acc / BigRational::from_integer(BigInt::from(n));
                c.exact.push(next);
            }
            Surd::rational(c.exact[k].clone())
        };
        let approx = move |_m: usize, k: usize| {
            let mut c = cache.lock().expect("cache lock");
            while c.approx.len() <= k {
                let n = c.approx.len();
                let mut acc = 0.0;
                for (j, pj) in p_f.iter().enumerate().take(n + 1).skip(1) {
                    acc += pj * j as f64 * c.approx[n - j];
                }
                c.approx.push(acc / n as f64);
            }
            c.approx[k]
        };
        GeneralizedWeights {
            name: self.label(),
            exact: Some(Arc::new(exact)),
            approx: Arc::new(approx),
        }
    }

    /// `log Σ h_n(F) t^n = θ Σ t^m/m + Σ_k b_k Σ_j t^{kj}/j^k`.
    pub fn log_normalization_series<S: Scalar>(&self, order: usize) -> Result<TruncatedSeries<S>> {
        let to_s = |q: &BigRational| {
            S::from_exact(&Surd::rational(q.clone())).ok_or_else(|| Error::NotExact(self.label()))
        };
        let theta = to_s(&self.theta)?;
        let mut coeffs: Vec<S> = (0..=order)
            .map(|n| if n == 0 { S::zero() } else { theta.div_int(n as i64) })
            .collect();
        for (idx, b) in self.higher.iter().enumerate() {
            let k = idx + 2;
            let b = to_s(b)?;
            for j in 1..=order / k {
                let denom = (0..k).fold(S::one(), |acc, _| acc * S::from_int(j as i64));
                let term = b.checked_div(&denom).expect("j^k ≠ 0");
                coeffs[k * j] = coeffs[k * j].clone() + term;
            }
        }
        Ok(TruncatedSeries::new(coeffs, order))
    }

    /// Class `F(1, θ)` with `K = Σ_k b_k ζ(k)`.
    pub fn class(&self) -> Result<SingularityClass> {
        let mut k_const = 0.0;
        for (idx, b) in self.higher.iter().enumerate() {
            k_const += q_f64(b) * riemann_zeta((idx + 2) as f64)?;
        }
        SingularityClass::f(1.0, q_f64(&self.theta), k_const)
    }
}

/// A real parameter `x` together with `e^{−x}` when that is rational, as for
/// `x = log(p/q)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LogParam {
    pub value: f64,
    #[serde(skip)]
    pub exp_neg: Option<BigRational>,
}

impl LogParam {
    pub fn float(value: f64) -> Self {
        LogParam {
            value,
            exp_neg: (value == 0.0).then(|| BigRational::from_integer(BigInt::from(1))),
        }
    }

    /// `log(ratio)`; `e^{−x}` is then `1/ratio` exactly.
    pub fn log_of(ratio: BigRational) -> Result<Self> {
        if ratio <= rzero() {
            return Err(Error::Usage(format!("log needs a positive argument, got {ratio}")));
        }
        Ok(LogParam {
            value: q_f64(&ratio).ln(),
            exp_neg: Some(ratio.recip()),
        })
    }

    fn exp_neg_f64(&self) -> f64 {
        (-self.value).exp()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", content = "values", rename_all = "kebab-case")]
pub enum AlphaSpec {
    Constant(LogParam),
    /// `α_1, …, α_L`; the last value repeats for `m > L`.
    Sequence(Vec<LogParam>),
}

impl AlphaSpec {
    fn at(&self, m: usize) -> &LogParam {
        match self {
            AlphaSpec::Constant(a) => a,
            AlphaSpec::Sequence(v) => &v[(m - 1).min(v.len() - 1)],
        }
    }

    fn limit(&self) -> &LogParam {
        match self {
            AlphaSpec::Constant(a) => a,
            AlphaSpec::Sequence(v) => v.last().expect("nonempty alpha sequence"),
        }
    }
}

/// Spatial random permutations on a fixed, finite lattice.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpatialModel {
    pub alpha: AlphaSpec,
    /// Energies `ε(k)` over the stored lattice points, with multiplicity.
    pub eps: Vec<LogParam>,
    pub truncation_note: String,
}

impl SpatialModel {
    pub fn new(alpha: AlphaSpec, eps: Vec<LogParam>, truncation_note: impl Into<String>) -> Result<Self> {
        if eps.is_empty() {
            return Err(Error::Usage("the spatial model needs at least one lattice point".into()));
        }
        if let AlphaSpec::Sequence(v) = &alpha {
            if v.is_empty() {
                return Err(Error::Usage("alpha sequence is empty".into()));
            }
        }
        if eps.iter().chain(alpha_params(&alpha)).any(|p| !p.value.is_finite()) {
            return Err(Error::Usage("spatial parameters must be finite".into()));
        }
        Ok(SpatialModel {
            alpha,
            eps,
            truncation_note: truncation_note.into(),
        })
    }

    fn is_exact(&self) -> bool {
        self.eps.iter().chain(alpha_params(&self.alpha)).all(|p| p.exp_neg.is_some())
    }

    fn label(&self) -> String {
        let eps: Vec<String> = self.eps.iter().map(|e| format!("{:.6}", e.value)).collect();
        format!("spatial(alpha={:.6},eps=[{}])", self.alpha.at(1).value, eps.join(","))
    }
}

fn alpha_params(alpha: &AlphaSpec) -> Box<dyn Iterator<Item = &LogParam> + '_> {
    match alpha {
        AlphaSpec::Constant(a) => Box::new(std::iter::once(a)),
        AlphaSpec::Sequence(v) => Box::new(v.iter()),
    }
}

fn rational_pow(q: &BigRational, m: usize) -> BigRational {
    q.pow(m as i32)
}

/// `θ'_m = e^{−α_m} Σ_k e^{−ε(k) m}`: the spatial measure is `P_{Θ'}`.
pub fn spatial_effective_weights(model: &SpatialModel) -> WeightSequence {
    let approx_model = model.clone();
    let approx = move |m: usize| {
        let s: f64 = approx_model.eps.iter().map(|e| (-e.value * m as f64).exp()).sum();
        approx_model.alpha.at(m).exp_neg_f64() * s
    };
    if model.is_exact() {
        let exact_model = model.clone();
        WeightSequence::exact_with_approx(
            model.label(),
            move |m| {
                let mut s = rzero();
                for e in &exact_model.eps {
                    s += rational_pow(e.exp_neg.as_ref().expect("exact eps"), m);
                }
                let a = exact_model.alpha.at(m).exp_neg.clone().expect("exact alpha");
                Surd::rational(a * s)
            },
            approx,
        )
    } else {
        WeightSequence::approx(model.label(), approx)
    }
}

/// `F_m(c) = (e^{−α_m} Σ_k e^{−ε(k) m})^c`.
pub fn spatial_generalized_weights(model: &SpatialModel) -> GeneralizedWeights {
    let mut w = GeneralizedWeights::from_theta(&spatial_effective_weights(model));
    w.name = model.label();
    w
}

/// Class of `g^{(α)}(t) = Σ_m e^{−α_m} t^m/m`: `F(1, e^{−α})` with
/// `K = Σ_m (e^{−α_m} − e^{−α})/m`, a finite sum since `α_m` is eventually
/// constant.
pub fn spatial_alpha_class(model: &SpatialModel) -> Result<SingularityClass> {
    let limit = model.alpha.limit().exp_neg_f64();
    let k_const = match &model.alpha {
        AlphaSpec::Constant(_) => 0.0,
        AlphaSpec::Sequence(v) => v
            .iter()
            .enumerate()
            .map(|(i, a)| (a.exp_neg_f64() - limit) / (i + 1) as f64)
            .sum(),
    };
    SingularityClass::f(1.0, limit, k_const)
}

/// `g^{(α)}(x) = Σ_m e^{−α_m} x^m / m` for `|x|` below the radius `r`.
fn g_alpha(model: &SpatialModel, r: f64, x: f64) -> Result<f64> {
    let ratio = x.abs() / r;
    if ratio >= 1.0 {
        return Err(Error::Usage("g^(α) evaluated outside its disk".into()));
    }
    let mut sum = 0.0;
    let mut power = 1.0;
    for m in 1..1_000_000 {
        power *= x;
        let term = model.alpha.at(m).exp_neg_f64() * power / m as f64;
        sum += term;
        if term.abs() <= 1e-17 * sum.abs().max(1e-300) {
            return Ok(sum);
        }
    }
    Err(Error::Convergence(format!("g^(α) at {x}")))
}

/// Class of `g^{(α,ξ)}(t) = Σ_k g^{(α)}(e^{−ε(k)} t)`.
///
/// With `r̃ = min_k e^{ε(k)}` and `A` the number of lattice points attaining
/// it, the class is `F(r̃ r, A θ)`; the constant collects `A` copies of the
/// base constant and `g^{(α)}(e^{−ε(k)} r̃ r)` for the other points.
pub fn spatial_class_params(model: &SpatialModel, base: &SingularityClass) -> Result<SingularityClass> {
    let eps_min = model
        .eps
        .iter()
        .map(|e| e.value)
        .fold(f64::INFINITY, f64::min);
    let is_min = |e: f64| (e - eps_min).abs() <= 1e-12 * eps_min.abs().max(1.0);
    let multiplicity = model.eps.iter().filter(|e| is_min(e.value)).count();
    let r_tilde = eps_min.exp();
    let radius = r_tilde * base.radius;
    let mut k_const = multiplicity as f64 * base.k_const;
    for e in model.eps.iter().filter(|e| !is_min(e.value)) {
        k_const += g_alpha(model, base.radius, (-e.value).exp() * radius)?;
    }
    SingularityClass::f(radius, multiplicity as f64 * base.theta, k_const)
}

/// The spatial model as a weighted family over its effective weights.
pub fn spatial_family(model: &SpatialModel) -> Result<WeightFamily> {
    let base = spatial_alpha_class(model)?;
    let class = spatial_class_params(model, &base)?;
    Ok(WeightFamily::new(
        spatial_effective_weights(model),
        Classification::Class { class },
        Provenance::Spatial,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::{joint_cycle_pmf, normalization_constants, total_cycles_pmf};

    type Q = BigRational;

    fn q(n: i64, d: i64) -> Q {
        Q::new(BigInt::from(n), BigInt::from(d))
    }

    fn sq(n: i64, d: i64) -> Surd {
        Surd::rational(q(n, d))
    }

    fn constant(n: i64) -> WeightSequence {
        WeightSequence::constant("c", q(n, 1))
    }

    #[test]
    fn eg_series_examples() {
        let theta = GeneralizedWeights::from_theta(&constant(3));
        let s = eg_series::<Q>(&theta, 1, 3).unwrap();
        assert_eq!(s.coeffs(), &[q(1, 1), q(3, 1), q(9, 2), q(9, 2)]);
        let ones = GeneralizedWeights::exact("ones", |_, _| Surd::one());
        let s = eg_series::<Q>(&ones, 2, 3).unwrap();
        assert_eq!(s.coeffs(), &[q(1, 1), q(1, 1), q(1, 2), q(1, 6)]);
        let fact = GeneralizedWeights::exact("fact", |_, k| Surd::rational(factorial(k)));
        let s = eg_series::<Q>(&fact, 1, 4).unwrap();
        assert!(s.coeffs().iter().all(|c| *c == q(1, 1)));
    }

    #[test]
    fn normalization_reductions() {
        let theta = GeneralizedWeights::from_theta(&constant(2));
        let h = generalized_normalization::<Q>(&theta, 12).unwrap();
        assert_eq!(h, normalization_constants::<Q>(&constant(2), 12).unwrap());
        let ones = GeneralizedWeights::exact("ones", |_, _| Surd::one());
        let h = generalized_normalization::<Q>(&ones, 12).unwrap();
        assert!(h.iter().all(|x| *x == q(1, 1)));
        for n in 1..=12 {
            assert_eq!(brute_force_generalized_pmf::<Q>(&ones, n).unwrap().normalization, q(1, 1));
        }
        let linear = ExpPolynomial::new(q(1, 1), vec![]).unwrap();
        let h = generalized_normalization::<Q>(&linear.weights(), 10).unwrap();
        assert!(h.iter().all(|x| *x == q(1, 1)));
    }

    #[test]
    fn joint_two_partitions() {
        // F_1(2) = 5, F_2(1) = 3
        let f = GeneralizedWeights::exact("f", |m, k| match (m, k) {
            (_, 0) => Surd::one(),
            (1, 2) => sq(5, 1),
            (2, 1) => sq(3, 1),
            _ => sq(7, 1),
        });
        let pmf = generalized_joint_cycle_pmf::<Q>(&f, 2, 2).unwrap();
        let h2 = q(5, 2) + q(3, 2);
        assert_eq!(pmf.mass(&vec![2, 0]), q(5, 2) / h2.clone());
        assert_eq!(pmf.mass(&vec![0, 1]), q(3, 2) / h2);
        let one = generalized_joint_cycle_pmf::<Q>(&f, 1, 1).unwrap();
        assert_eq!(one.mass(&vec![1]), q(1, 1));
    }

    #[test]
    fn total_cycles_examples() {
        let ones = GeneralizedWeights::exact("ones", |_, _| Surd::one());
        let pmf = generalized_total_cycles_pmf::<Q>(&ones, 3).unwrap();
        assert_eq!(pmf.entries(), &[(1, q(1, 3)), (2, q(1, 2)), (3, q(1, 6))]);
        let twos = GeneralizedWeights::from_theta(&constant(2));
        let pmf = generalized_total_cycles_pmf::<Q>(&twos, 2).unwrap();
        assert_eq!(pmf.entries(), &[(1, q(1, 3)), (2, q(2, 3))]);
        assert_eq!(generalized_total_cycles_pmf::<Q>(&twos, 1).unwrap().entries(), &[(1, q(1, 1))]);
    }

    #[test]
    fn theta_reduction_matches_weighted_measure() {
        let theta = WeightSequence::exact("shift", |m| sq(1, 1) + sq(1, (m * m) as i64));
        let f = GeneralizedWeights::from_theta(&theta);
        for n in 1..=10 {
            assert_eq!(
                generalized_total_cycles_pmf::<Q>(&f, n).unwrap(),
                total_cycles_pmf::<Q>(&theta, n).unwrap()
            );
            for b in 1..=n.min(3) {
                assert_eq!(
                    generalized_joint_cycle_pmf::<Q>(&f, n, b).unwrap(),
                    joint_cycle_pmf::<Q>(&theta, n, b).unwrap()
                );
            }
        }
    }

    #[test]
    fn exp_polynomial_values_and_two_paths() {
        let p = ExpPolynomial::new(q(1, 1), vec![q(1, 1)]).unwrap();
        let w = p.weights();
        assert_eq!(w.value_exact(4, 0).unwrap(), sq(1, 1));
        assert_eq!(w.value_exact(4, 1).unwrap(), sq(1, 1));
        assert_eq!(w.value_exact(1, 2).unwrap(), sq(3, 1));
        let direct = p.log_normalization_series::<Q>(20).unwrap().exp().unwrap();
        let via_eg = generalized_normalization::<Q>(&w, 20).unwrap();
        assert_eq!(direct.coeffs(), via_eg.as_slice());
        let approx = generalized_normalization::<f64>(&w, 20).unwrap();
        for (a, b) in approx.iter().zip(&via_eg) {
            assert!((a - q_f64(b)).abs() <= 1e-12 * q_f64(b));
        }
        let cls = p.class().unwrap();
        assert!((cls.k_const - riemann_zeta(2.0).unwrap()).abs() < 1e-12);
        assert!(ExpPolynomial::new(q(0, 1), vec![]).is_err());
        assert!(ExpPolynomial::new(q(1, 1), vec![q(-1, 1)]).is_err());
    }

    #[test]
    fn spatial_weights() {
        let single = SpatialModel::new(AlphaSpec::Constant(LogParam::float(0.0)), vec![LogParam::float(0.0)], "").unwrap();
        let w = spatial_effective_weights(&single);
        assert!(w.is_exact());
        assert!((1..10).all(|m| w.value_exact(m).unwrap() == Surd::one()));

        let two = vec![LogParam::float(0.0), LogParam::log_of(q(2, 1)).unwrap()];
        let model = SpatialModel::new(AlphaSpec::Constant(LogParam::float(0.0)), two.clone(), "").unwrap();
        let w = spatial_effective_weights(&model);
        assert_eq!(w.value_exact(3).unwrap(), sq(9, 8));

        let alpha = LogParam::log_of(q(3, 1)).unwrap();
        let model = SpatialModel::new(AlphaSpec::Constant(alpha), two, "").unwrap();
        let w = spatial_effective_weights(&model);
        assert_eq!(w.value_exact(1).unwrap(), sq(1, 2));
        assert!((w.value_f64(2) - (-(3f64.ln())).exp() * 1.25).abs() < 1e-15);

        let h_f = generalized_normalization::<Q>(&spatial_generalized_weights(&model), 15).unwrap();
        let h_theta = normalization_constants::<Q>(&w, 15).unwrap();
        assert_eq!(h_f, h_theta);
    }

    #[test]
    fn spatial_classes() {
        let zero = || LogParam::float(0.0);
        let single = SpatialModel::new(AlphaSpec::Constant(zero()), vec![zero()], "").unwrap();
        let base = spatial_alpha_class(&single).unwrap();
        assert_eq!(spatial_class_params(&single, &base).unwrap(), base);

        let log2 = LogParam::log_of(q(2, 1)).unwrap();
        let model = SpatialModel::new(AlphaSpec::Constant(zero()), vec![zero(), zero(), log2], "").unwrap();
        let cls = spatial_class_params(&model, &base).unwrap();
        assert_eq!(cls.theta, 2.0);
        assert_eq!(cls.radius, 1.0);
        // g^(0)(1/2) = log 2
        assert!((cls.k_const - 2f64.ln()).abs() < 1e-14);

        let shifted = SpatialModel::new(AlphaSpec::Constant(zero()), vec![LogParam::log_of(q(3, 2)).unwrap()], "").unwrap();
        let fam = spatial_family(&shifted).unwrap();
        assert!((fam.class().unwrap().radius - 1.5).abs() < 1e-15);
        // the double path rescales by the radius, θ'_m r^m = 1
        let pmf = total_cycles_pmf::<f64>(&fam.weights, 5).unwrap();
        let exact = total_cycles_pmf::<Q>(&fam.weights, 5).unwrap();
        for ((_, a), (_, b)) in pmf.entries().iter().zip(exact.entries()) {
            assert!((a - q_f64(b)).abs() < 1e-14);
        }
    }

    #[test]
    fn rejects_bad_weights() {
        let bad = GeneralizedWeights::exact("bad", |_, k| if k == 0 { sq(2, 1) } else { Surd::one() });
        assert!(generalized_normalization::<Q>(&bad, 3).is_err());
        assert!(SpatialModel::new(AlphaSpec::Constant(LogParam::float(0.0)), vec![], "").is_err());
    }
}
