//! Distances between integer laws and convergence reports comparing exact
//! finite-`n` laws with their Poisson, normal and mod-Poisson limits.

use std::fmt::Write as _;

use num_complex::Complex64;
use serde::Serialize;
use statrs::function::erf::erfc;

use crate::asymptotics::{large_deviation_estimate, mod_poisson_limit, LargeDeviation};
use crate::catalog::WeightFamily;
use crate::error::{Error, Result};
use crate::format::format_f64;
use crate::measure::{joint_cycle_pmf, total_cycles_pmf};
use crate::pmf::Pmf;
use crate::special::ln_gamma;

/// Poisson mass beyond this cumulative level is dropped and carried as
/// missing mass.
pub const POISSON_TRUNCATION: f64 = 1e-15;

/// Sizes used when a report is requested without an explicit grid.
pub const DEFAULT_N_GRID: [usize; 5] = [50, 100, 200, 400, 800];

/// Poisson(`lambda`) up to cumulative mass `1 − 1e−15`.
pub fn poisson_pmf(lambda: f64) -> Result<Pmf<usize, f64>> {
    if !(lambda >= 0.0) || !lambda.is_finite() {
        return Err(Error::Usage(format!("Poisson mean must be finite and ≥ 0, got {lambda}")));
    }
    if lambda == 0.0 {
        return Ok(Pmf::new(vec![(0, 1.0)]));
    }
    let mut entries = Vec::new();
    let mut cumulative = 0.0;
    let ln_lambda = lambda.ln();
    for k in 0usize.. {
        let p = (-lambda + k as f64 * ln_lambda - ln_gamma(k as f64 + 1.0)).exp();
        cumulative += p;
        entries.push((k, p));
        if k as f64 > lambda && (cumulative >= 1.0 - POISSON_TRUNCATION || p == 0.0) {
            break;
        }
    }
    Ok(Pmf::new(entries))
}

fn missing(p: &Pmf<usize, f64>) -> f64 {
    (1.0 - p.total()).max(0.0)
}

/// Walks the union of both supports in increasing order.
fn merged(p: &Pmf<usize, f64>, q: &Pmf<usize, f64>) -> Vec<(usize, f64, f64)> {
    let (a, b) = (p.entries(), q.entries());
    let (mut i, mut j) = (0, 0);
    let mut out = Vec::with_capacity(a.len() + b.len());
    while i < a.len() || j < b.len() {
        let ka = a.get(i).map(|e| e.0);
        let kb = b.get(j).map(|e| e.0);
        match (ka, kb) {
            (Some(x), Some(y)) if x == y => {
                out.push((x, a[i].1, b[j].1));
                i += 1;
                j += 1;
            }
            (Some(x), Some(y)) if x < y => {
                out.push((x, a[i].1, 0.0));
                i += 1;
            }
            (Some(x), None) => {
                out.push((x, a[i].1, 0.0));
                i += 1;
            }
            (_, Some(y)) => {
                out.push((y, 0.0, b[j].1));
                j += 1;
            }
            (None, None) => unreachable!(),
        }
    }
    out
}

/// `sup_j |p{j} − q{j}|`, plus the larger missing mass of the two laws.
pub fn d_loc(p: &Pmf<usize, f64>, q: &Pmf<usize, f64>) -> f64 {
    let sup = merged(p, q)
        .into_iter()
        .map(|(_, a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    sup + missing(p).max(missing(q))
}

/// `sup_j |P[X ≤ j] − Q[Y ≤ j]|`, plus the larger missing mass.
pub fn d_k(p: &Pmf<usize, f64>, q: &Pmf<usize, f64>) -> f64 {
    let (mut fp, mut fq) = (0.0, 0.0);
    let mut sup: f64 = 0.0;
    for (_, a, b) in merged(p, q) {
        fp += a;
        fq += b;
        sup = sup.max((fp - fq).abs());
    }
    sup + missing(p).max(missing(q))
}

/// Total variation `½ Σ_j |p{j} − q{j}|`, plus half of both missing masses.
pub fn tv(p: &Pmf<usize, f64>, q: &Pmf<usize, f64>) -> f64 {
    let sum: f64 = merged(p, q).into_iter().map(|(_, a, b)| (a - b).abs()).sum();
    0.5 * (sum + missing(p) + missing(q))
}

/// Standard normal CDF.
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * erfc(-x / std::f64::consts::SQRT_2)
}

/// Kolmogorov distance between the law of `(X − center)/scale` and `N(0, 1)`.
///
/// The supremum of a step CDF against a continuous one is attained at a jump,
/// on one side or the other, so both one-sided limits are checked.
pub fn d_k_normal(p: &Pmf<usize, f64>, center: f64, scale: f64) -> f64 {
    let mut below = 0.0;
    let mut sup: f64 = 0.0;
    for &(k, mass) in p.entries() {
        let phi = normal_cdf((k as f64 - center) / scale);
        sup = sup.max((below - phi).abs());
        below += mass;
        sup = sup.max((below - phi).abs());
    }
    sup + missing(p)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Metric {
    #[serde(rename = "d_loc")]
    DLoc,
    #[serde(rename = "d_K")]
    DK,
    Tv,
    SupPointwise,
    SupCharFn,
}

impl Metric {
    pub fn label(&self) -> &'static str {
        match self {
            Metric::DLoc => "d_loc",
            Metric::DK => "d_K",
            Metric::Tv => "tv",
            Metric::SupPointwise => "sup-pointwise",
            Metric::SupCharFn => "sup-char-fn",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ReportKind {
    PoissonVector,
    ModPoisson,
    Clt,
    PoissonK,
}

/// Distances of one metric over a grid of sizes, with a reference rate.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonReport {
    pub family: String,
    pub kind: ReportKind,
    pub metric: Metric,
    /// Distinguishes reports of the same metric, e.g. two normalizations.
    pub variant: Option<String>,
    pub n_values: Vec<usize>,
    pub values: Vec<f64>,
    /// Least-squares slope of `log value` against `log n`.
    pub fitted_slope: Option<f64>,
    pub reference_rate: String,
    pub reference_rate_values: Vec<Option<f64>>,
}

impl ComparisonReport {
    #[allow(clippy::too_many_arguments)]
    fn new(
        family: &WeightFamily,
        kind: ReportKind,
        metric: Metric,
        variant: Option<String>,
        n_values: &[usize],
        values: Vec<f64>,
        reference_rate: String,
        reference: impl Fn(usize) -> Option<f64>,
    ) -> Self {
        ComparisonReport {
            family: family.name().to_string(),
            kind,
            metric,
            variant,
            n_values: n_values.to_vec(),
            fitted_slope: fitted_slope(n_values, &values),
            reference_rate_values: n_values.iter().map(|&n| reference(n)).collect(),
            values,
            reference_rate,
        }
    }

    pub fn metric_label(&self) -> String {
        match &self.variant {
            Some(v) => format!("{}[{v}]", self.metric.label()),
            None => self.metric.label().to_string(),
        }
    }

    /// Nonincreasing up to at most one step that grows by no more than `slack`
    /// (relative).
    pub fn nonincreasing(&self, slack: f64) -> bool {
        let mut violations = 0;
        for w in self.values.windows(2) {
            if w[1] > w[0] {
                violations += 1;
                if violations > 1 || w[1] > w[0] * (1.0 + slack) {
                    return false;
                }
            }
        }
        true
    }

    pub fn strictly_decreasing(&self) -> bool {
        self.values.windows(2).all(|w| w[1] < w[0])
    }

    /// `value / reference` per size; `None` where the reference is unknown.
    pub fn normalized(&self) -> Vec<Option<f64>> {
        self.values
            .iter()
            .zip(&self.reference_rate_values)
            .map(|(v, r)| r.filter(|r| *r > 0.0 && r.is_finite()).map(|r| v / r))
            .collect()
    }

    /// Rows `n,metric,value,reference_rate_value`, without a header.
    pub fn csv_rows(&self) -> String {
        let mut out = String::new();
        let metric = self.metric_label();
        for ((n, v), r) in self.n_values.iter().zip(&self.values).zip(&self.reference_rate_values) {
            let r = r.map(format_f64).unwrap_or_default();
            writeln!(out, "{n},{metric},{},{r}", format_f64(*v)).expect("write to String");
        }
        out
    }
}

pub const CSV_HEADER: &str = "n,metric,value,reference_rate_value";

pub fn reports_to_csv(reports: &[ComparisonReport]) -> String {
    let mut out = format!("{CSV_HEADER}\n");
    for r in reports {
        out.push_str(&r.csv_rows());
    }
    out
}

/// Slope of the least-squares line through `(log n, log value)`; needs at
/// least two points with positive values.
pub fn fitted_slope(n_values: &[usize], values: &[f64]) -> Option<f64> {
    if n_values.len() < 2 || values.iter().any(|v| !(*v > 0.0)) || n_values.contains(&0) {
        return None;
    }
    let xs: Vec<f64> = n_values.iter().map(|&n| (n as f64).ln()).collect();
    let ys: Vec<f64> = values.iter().map(|v| v.ln()).collect();
    let len = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / len;
    let my = ys.iter().sum::<f64>() / len;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    Some(sxy / sxx)
}

fn require_grid(n_values: &[usize]) -> Result<()> {
    if n_values.is_empty() || n_values.contains(&0) {
        return Err(Error::Usage("the n grid must be nonempty with every n ≥ 1".into()));
    }
    Ok(())
}

fn require_positive_theta(family: &WeightFamily) -> Result<f64> {
    let theta = family.class()?.theta;
    if !(theta > 0.0) {
        return Err(Error::UnsupportedClass(format!(
            "{}: this report needs θ > 0",
            family.name()
        )));
    }
    Ok(theta)
}

/// Total variation and sup-pointwise distance between the joint law of
/// `(C_1, …, C_b)` and independent Poisson variables with means
/// `θ_m r^m / m`.
///
/// The pointwise rate of the limit theorem is reported as the reference; the
/// supremum is taken over the finite support of the exact law.
pub fn poisson_vector_report(family: &WeightFamily, b: usize, n_values: &[usize]) -> Result<Vec<ComparisonReport>> {
    require_grid(n_values)?;
    if b == 0 || b > 4 {
        return Err(Error::Usage(format!("poisson-vector needs 1 ≤ b ≤ 4, got {b}")));
    }
    let class = family.class()?;
    let means: Vec<f64> = (1..=b)
        .map(|m| family.weights.value_f64(m) * class.radius.powi(m as i32) / m as f64)
        .collect();
    let ln_means: Vec<f64> = means.iter().map(|m| m.ln()).collect();
    let poisson_at = |counts: &[usize]| -> f64 {
        let mut ln_p = 0.0;
        for (m, &c) in counts.iter().enumerate() {
            if means[m] == 0.0 {
                if c > 0 {
                    return 0.0;
                }
                continue;
            }
            ln_p += -means[m] + c as f64 * ln_means[m] - ln_gamma(c as f64 + 1.0);
        }
        ln_p.exp()
    };
    let mut tv_values = Vec::new();
    let mut sup_values = Vec::new();
    for &n in n_values {
        let joint = joint_cycle_pmf::<f64>(&family.weights, n, b.min(n))?;
        let mut abs_sum = 0.0;
        let mut covered = 0.0;
        let mut sup: f64 = 0.0;
        for (counts, p) in joint.entries() {
            let mut full = counts.clone();
            full.resize(b, 0);
            let q = poisson_at(&full);
            covered += q;
            abs_sum += (p - q).abs();
            sup = sup.max((p - q).abs());
        }
        // Poisson mass on tuples with Σ m c_m > n, where the exact law is 0
        tv_values.push(0.5 * (abs_sum + (1.0 - covered).max(0.0)));
        sup_values.push(sup);
    }
    let rate = class.error_rate;
    let label = format!("{} pointwise bound", rate.label());
    Ok(vec![
        ComparisonReport::new(
            family,
            ReportKind::PoissonVector,
            Metric::Tv,
            None,
            n_values,
            tv_values,
            label.clone(),
            |n| rate.value(n),
        ),
        ComparisonReport::new(
            family,
            ReportKind::PoissonVector,
            Metric::SupPointwise,
            None,
            n_values,
            sup_values,
            label,
            |n| rate.value(n),
        ),
    ])
}

/// Characteristic function `E[e^{isX}]` of an integer law.
pub fn char_fn(p: &Pmf<usize, f64>, s: f64) -> Complex64 {
    p.entries()
        .iter()
        .map(|&(k, mass)| Complex64::from_polar(mass, s * k as f64))
        .sum()
}

/// `sup_s |exp(λ_n(1 − e^{is})) E[e^{isK_0n}] − Γ(θ)/Γ(θe^{is})|` with
/// `λ_n = K + θ log n`.
///
/// When `K ≠ 0` a second report uses `λ_n = θ log n`, the parameter without
/// the constant.
pub fn mod_poisson_report(family: &WeightFamily, n_values: &[usize], s_grid: &[f64]) -> Result<Vec<ComparisonReport>> {
    require_grid(n_values)?;
    if s_grid.is_empty() || s_grid.iter().any(|s| !s.is_finite()) {
        return Err(Error::Usage("the s grid must be nonempty and finite".into()));
    }
    let theta = require_positive_theta(family)?;
    let class = family.class()?;
    let limits: Vec<Complex64> = s_grid
        .iter()
        .map(|&s| mod_poisson_limit(theta, s))
        .collect::<Result<_>>()?;
    let mut with_k = Vec::new();
    let mut without_k = Vec::new();
    for &n in n_values {
        let law = total_cycles_pmf::<f64>(&family.weights, n)?;
        let log_n = (n as f64).ln();
        let residual = |lambda: f64| {
            s_grid
                .iter()
                .zip(&limits)
                .map(|(&s, limit)| {
                    let e = Complex64::from_polar(1.0, s);
                    let scaled = (lambda * (1.0 - e)).exp() * char_fn(&law, s);
                    (scaled - limit).norm()
                })
                .fold(0.0, f64::max)
        };
        with_k.push(residual(class.k_const + theta * log_n));
        without_k.push(residual(theta * log_n));
    }
    let rate = class.error_rate;
    let mut reports = vec![ComparisonReport::new(
        family,
        ReportKind::ModPoisson,
        Metric::SupCharFn,
        Some("lambda=K+theta*log(n)".into()),
        n_values,
        with_k,
        rate.label(),
        |n| rate.value(n),
    )];
    if class.k_const != 0.0 {
        reports.push(ComparisonReport::new(
            family,
            ReportKind::ModPoisson,
            Metric::SupCharFn,
            Some("lambda=theta*log(n)".into()),
            n_values,
            without_k,
            "none".into(),
            |_| None,
        ));
    }
    Ok(reports)
}

/// Kolmogorov distance between `(K_0n − θ log n)/σ_n` and `N(0, 1)`, for
/// `σ_n = √(θ log n)` and, as a second report, `σ_n = θ√(log n)`.
pub fn clt_report(family: &WeightFamily, n_values: &[usize]) -> Result<Vec<ComparisonReport>> {
    require_grid(n_values)?;
    if n_values.contains(&1) {
        return Err(Error::Usage("the CLT report needs n ≥ 2".into()));
    }
    let theta = require_positive_theta(family)?;
    let mut primary = Vec::new();
    let mut alternative = Vec::new();
    for &n in n_values {
        let law = total_cycles_pmf::<f64>(&family.weights, n)?;
        let log_n = (n as f64).ln();
        let center = theta * log_n;
        primary.push(d_k_normal(&law, center, (theta * log_n).sqrt()));
        alternative.push(d_k_normal(&law, center, theta * log_n.sqrt()));
    }
    Ok(vec![
        ComparisonReport::new(
            family,
            ReportKind::Clt,
            Metric::DK,
            Some("scale=sqrt(theta*log(n))".into()),
            n_values,
            primary,
            "o(1)".into(),
            |_| None,
        ),
        ComparisonReport::new(
            family,
            ReportKind::Clt,
            Metric::DK,
            Some("scale=theta*sqrt(log(n))".into()),
            n_values,
            alternative,
            "o(1)".into(),
            |_| None,
        ),
    ])
}

/// `d_loc` and `d_K` between `K_0n` and Poisson(`K + θ log n`), against the
/// reference curves `1/log n` and `1/√(log n)`.
pub fn poisson_k_approx_report(family: &WeightFamily, n_values: &[usize]) -> Result<Vec<ComparisonReport>> {
    require_grid(n_values)?;
    let theta = require_positive_theta(family)?;
    let k_const = family.class()?.k_const;
    let mut loc = Vec::new();
    let mut kol = Vec::new();
    for &n in n_values {
        let law = total_cycles_pmf::<f64>(&family.weights, n)?;
        let reference = poisson_pmf(k_const + theta * (n as f64).ln())?;
        loc.push(d_loc(&law, &reference));
        kol.push(d_k(&law, &reference));
    }
    let inv_log = |n: usize| (n > 1).then(|| 1.0 / (n as f64).ln());
    let inv_sqrt_log = |n: usize| (n > 1).then(|| 1.0 / (n as f64).ln().sqrt());
    Ok(vec![
        ComparisonReport::new(
            family,
            ReportKind::PoissonK,
            Metric::DLoc,
            None,
            n_values,
            loc,
            "O(1/log(n))".into(),
            inv_log,
        ),
        ComparisonReport::new(
            family,
            ReportKind::PoissonK,
            Metric::DK,
            None,
            n_values,
            kol,
            "O(1/sqrt(log(n)))".into(),
            inv_sqrt_log,
        ),
    ])
}

/// Which point `k` of the cycle-count law to examine.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "mode", rename_all = "kebab-case")]
pub enum KSelector {
    Fixed { k: usize },
    /// `round(E[K_0n] + sigmas·sd(K_0n))` under the exact law.
    MeanPlusSigma { sigmas: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LargeDeviationRow {
    pub n: usize,
    pub mean: f64,
    pub sd: f64,
    pub exact: f64,
    pub relative_error: f64,
    #[serde(flatten)]
    pub estimate: LargeDeviation,
}

/// Main-term estimate of `P[K_0n = k]` next to the exact value.
pub fn large_deviation_report(family: &WeightFamily, n: usize, selector: KSelector) -> Result<LargeDeviationRow> {
    let theta = require_positive_theta(family)?;
    let k_const = family.class()?.k_const;
    let law = total_cycles_pmf::<f64>(&family.weights, n)?;
    let mean = law.mean();
    let sd = law.variance().sqrt();
    let k = match selector {
        KSelector::Fixed { k } => k,
        KSelector::MeanPlusSigma { sigmas } => {
            let target = (mean + sigmas * sd).round();
            if !(target >= 1.0) {
                return Err(Error::Usage(format!("selected k = {target} is below 1")));
            }
            target as usize
        }
    };
    if k == 0 || k > n {
        return Err(Error::Usage(format!("k must lie in 1..={n}, got {k}")));
    }
    let estimate = large_deviation_estimate(theta, k_const, n, k)?;
    let exact = law.mass(&k);
    Ok(LargeDeviationRow {
        n,
        mean,
        sd,
        exact,
        relative_error: (estimate.estimate - exact).abs() / exact,
        estimate,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::ewens;
    use num_bigint::BigInt;
    use num_rational::BigRational;

    fn ewens_f(n: i64, d: i64) -> WeightFamily {
        ewens(BigRational::new(BigInt::from(n), BigInt::from(d))).unwrap()
    }

    fn point(k: usize) -> Pmf<usize, f64> {
        Pmf::new(vec![(k, 1.0)])
    }

    #[test]
    fn distance_examples() {
        let p = poisson_pmf(1.0).unwrap();
        assert_eq!(d_loc(&point(0), &point(0)), 0.0);
        assert_eq!(d_k(&point(3), &point(3)), 0.0);
        assert_eq!(d_loc(&point(0), &point(1)), 1.0);
        assert_eq!(d_k(&point(0), &point(1)), 1.0);
        let uniform = Pmf::new(vec![(0, 0.5), (1, 0.5)]);
        assert_eq!(d_k(&uniform, &point(0)), 0.5);
        assert!(d_loc(&p, &p) < 1e-14);
    }

    #[test]
    fn poisson_distance_matches_term_by_term() {
        let p = poisson_pmf(1.0).unwrap();
        let q = poisson_pmf(1.1).unwrap();
        // p_k = p_{k−1}·λ/k, independent of the log-gamma path
        let mut a = (-1.0f64).exp();
        let mut b = (-1.1f64).exp();
        let mut loc: f64 = (a - b).abs();
        let (mut ca, mut cb) = (a, b);
        let mut kol: f64 = (ca - cb).abs();
        for k in 1..60 {
            a *= 1.0 / k as f64;
            b *= 1.1 / k as f64;
            ca += a;
            cb += b;
            loc = loc.max((a - b).abs());
            kol = kol.max((ca - cb).abs());
        }
        assert!((d_loc(&p, &q) - loc).abs() < 1e-12);
        assert!((d_k(&p, &q) - kol).abs() < 1e-12);
    }

    #[test]
    fn standard_inequalities() {
        let laws = [
            poisson_pmf(0.3).unwrap(),
            poisson_pmf(2.0).unwrap(),
            Pmf::new(vec![(0, 0.2), (2, 0.3), (5, 0.5)]),
            total_cycles_pmf::<f64>(&ewens_f(1, 1).weights, 30).unwrap(),
        ];
        for p in &laws {
            for q in &laws {
                let t = tv(p, q);
                assert!(d_loc(p, q) <= 2.0 * t + 1e-14);
                assert!(d_k(p, q) <= t + 1e-14);
                assert!((d_loc(p, q) - d_loc(q, p)).abs() < 1e-15);
                assert!((d_k(p, q) - d_k(q, p)).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn poisson_truncation() {
        let p = poisson_pmf(5.0).unwrap();
        assert!(1.0 - p.total() <= 1e-15 + 1e-16);
        assert_eq!(poisson_pmf(0.0).unwrap().entries(), &[(0, 1.0)]);
        assert!(poisson_pmf(-1.0).is_err());
    }

    #[test]
    fn normal_kolmogorov_of_point_mass() {
        // A point mass at the center is off by 1/2 on both sides.
        assert!((d_k_normal(&point(4), 4.0, 1.0) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn poisson_vector_ewens() {
        let fam = ewens_f(1, 1);
        let reports = poisson_vector_report(&fam, 1, &[5, 10]).unwrap();
        assert_eq!(reports.len(), 2);
        let fam2 = ewens_f(2, 1);
        let reports = poisson_vector_report(&fam2, 2, &[25, 50, 100, 200]).unwrap();
        assert!(reports[0].strictly_decreasing(), "{:?}", reports[0].values);
        assert!(poisson_vector_report(&fam2, 5, &[25]).is_err());
    }

    #[test]
    fn mod_poisson_at_zero_is_exact() {
        let fam = ewens_f(2, 1);
        let reports = mod_poisson_report(&fam, &[10, 50], &[0.0]).unwrap();
        assert_eq!(reports.len(), 1);
        assert!(reports[0].values.iter().all(|v| *v <= 1e-12));
    }

    #[test]
    fn clt_single_entry() {
        let fam = ewens_f(1, 1);
        let reports = clt_report(&fam, &[50]).unwrap();
        assert_eq!(reports[0].values.len(), 1);
        assert_eq!(reports[0].fitted_slope, None);
    }

    #[test]
    fn poisson_k_at_n_one() {
        let fam = ewens_f(1, 1);
        let reports = poisson_k_approx_report(&fam, &[1]).unwrap();
        // K_01 = 1 against Poisson(0) = δ_0
        assert_eq!(reports[0].values, vec![1.0]);
        assert_eq!(reports[0].reference_rate_values, vec![None]);
    }

    #[test]
    fn trend_checks() {
        let fam = ewens_f(1, 1);
        let mut r = poisson_k_approx_report(&fam, &[10, 20]).unwrap().remove(0);
        r.values = vec![1.0, 0.8, 0.82, 0.5];
        assert!(r.nonincreasing(0.05));
        r.values = vec![1.0, 0.8, 0.9, 0.5];
        assert!(!r.nonincreasing(0.05));
        r.values = vec![1.0, 1.01, 0.9, 0.95];
        assert!(!r.nonincreasing(0.05));
    }

    #[test]
    fn csv_layout() {
        let fam = ewens_f(1, 1);
        let reports = clt_report(&fam, &[10]).unwrap();
        let csv = reports_to_csv(&reports);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], CSV_HEADER);
        assert!(lines[1].starts_with("10,d_K[scale=sqrt(theta*log(n))],"));
        assert!(lines[1].ends_with(','));
    }

    #[test]
    fn large_deviation_row() {
        let fam = ewens_f(1, 1);
        let row = large_deviation_report(&fam, 200, KSelector::MeanPlusSigma { sigmas: 2.0 }).unwrap();
        assert!(row.exact > 0.0 && row.estimate.estimate > 0.0);
        assert!(large_deviation_report(&fam, 10, KSelector::Fixed { k: 11 }).is_err());
    }
}
