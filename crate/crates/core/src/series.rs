//! Truncated power series in `t`, and bivariate series whose `t`-coefficients
//! are polynomials in a marking variable `u`.
//!
//! All series carry a fixed truncation order `N` and store exactly `N + 1`
//! coefficients. Nothing beyond `t^N` is ever read or produced.

use crate::error::{usage, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedSeries<S> {
    coeffs: Vec<S>,
}

impl<S: Scalar> TruncatedSeries<S> {
    /// Builds a series of order `order`, padding or truncating `coeffs`.
    pub fn new(mut coeffs: Vec<S>, order: usize) -> Self {
        coeffs.resize(order + 1, S::zero());
        TruncatedSeries { coeffs }
    }

    pub fn zero(order: usize) -> Self {
        Self::new(Vec::new(), order)
    }

    pub fn one(order: usize) -> Self {
        Self::new(vec![S::one()], order)
    }

    /// `Σ_{k=1}^{N} f(k) t^k`.
    pub fn from_fn(order: usize, mut f: impl FnMut(usize) -> S) -> Self {
        let coeffs = (0..=order)
            .map(|k| if k == 0 { S::zero() } else { f(k) })
            .collect();
        TruncatedSeries { coeffs }
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[S] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<S> {
        self.coeffs
    }

    /// `[t^n]`, zero beyond the truncation order.
    pub fn coeff(&self, n: usize) -> S {
        self.coeffs.get(n).cloned().unwrap_or_else(S::zero)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_order(other)?;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a.clone() + b.clone())
            .collect();
        Ok(TruncatedSeries { coeffs })
    }

    pub fn scale(&self, c: &S) -> Self {
        TruncatedSeries {
            coeffs: self.coeffs.iter().map(|a| a.clone() * c.clone()).collect(),
        }
    }

    /// Cauchy product truncated at the common order.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_order(other)?;
        let n = self.order();
        let mut out = vec![S::zero(); n + 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs[..=n - i].iter().enumerate() {
                if !b.is_zero() {
                    out[i + j] = out[i + j].clone() + a.clone() * b.clone();
                }
            }
        }
        Ok(TruncatedSeries { coeffs: out })
    }

    /// `exp(g)` for `g(0) = 0`, from `n·H_n = Σ_{k=1}^{n} k·g_k·H_{n−k}`.
    pub fn exp(&self) -> Result<Self> {
        if !self.coeffs[0].is_zero() {
            return Err(usage("exp needs a series with zero constant term"));
        }
        let n_max = self.order();
        let weighted: Vec<S> = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(k, g)| g.clone() * S::from_int(k as i64))
            .collect();
        let mut h = Vec::with_capacity(n_max + 1);
        h.push(S::one());
        for n in 1..=n_max {
            let mut acc = S::zero();
            for k in 1..=n {
                if !weighted[k].is_zero() && !h[n - k].is_zero() {
                    acc = acc + weighted[k].clone() * h[n - k].clone();
                }
            }
            h.push(acc.div_int(n as i64));
        }
        Ok(TruncatedSeries { coeffs: h })
    }

    /// `log(h)` for `h(0) = 1`, the inverse of [`TruncatedSeries::exp`]:
    /// `n·g_n = n·h_n − Σ_{k=1}^{n−1} k·g_k·h_{n−k}`.
    pub fn log(&self) -> Result<Self> {
        if self.coeffs[0] != S::one() {
            return Err(usage("log needs a series with constant term 1"));
        }
        let n_max = self.order();
        let mut g: Vec<S> = vec![S::zero(); n_max + 1];
        for n in 1..=n_max {
            let mut acc = self.coeffs[n].clone() * S::from_int(n as i64);
            for k in 1..n {
                if !g[k].is_zero() && !self.coeffs[n - k].is_zero() {
                    acc = acc - g[k].clone() * S::from_int(k as i64) * self.coeffs[n - k].clone();
                }
            }
            g[n] = acc.div_int(n as i64);
        }
        Ok(TruncatedSeries { coeffs: g })
    }

    fn check_order(&self, other: &Self) -> Result<()> {
        if self.order() != other.order() {
            return Err(usage(format!(
                "truncation orders differ: {} vs {}",
                self.order(),
                other.order()
            )));
        }
        Ok(())
    }
}

/// Series in `t` whose coefficient at `t^n` is a polynomial in `u`.
///
/// When built from `exp(u·g)` with `g(0) = 0`, the `u`-degree at `t^n` is at
/// most `n`. A degree cap keeps only the lowest powers of `u`; the retained
/// coefficients are exact because the recurrence only raises `u`-degrees.
#[derive(Debug, Clone, PartialEq)]
pub struct BivariateSeries<S> {
    rows: Vec<Vec<S>>,
}

impl<S: Scalar> BivariateSeries<S> {
    pub fn order(&self) -> usize {
        self.rows.len() - 1
    }

    /// Polynomial in `u` at `t^n`, lowest degree first.
    pub fn row(&self, n: usize) -> &[S] {
        &self.rows[n]
    }

    /// `[t^n u^k]`.
    pub fn coeff(&self, n: usize, k: usize) -> S {
        self.rows
            .get(n)
            .and_then(|r| r.get(k))
            .cloned()
            .unwrap_or_else(S::zero)
    }

    /// Substitutes `u = value`, giving a univariate series.
    pub fn eval_u(&self, value: &S) -> TruncatedSeries<S> {
        let coeffs = self
            .rows
            .iter()
            .map(|row| {
                row.iter()
                    .rev()
                    .fold(S::zero(), |acc, c| acc * value.clone() + c.clone())
            })
            .collect();
        TruncatedSeries { coeffs }
    }

    pub(crate) fn from_rows(rows: Vec<Vec<S>>) -> Self {
        BivariateSeries { rows }
    }
}

/// `exp(u·g(t))` as a bivariate series.
pub fn bv_exp_wg<S: Scalar>(g: &TruncatedSeries<S>) -> Result<BivariateSeries<S>> {
    bv_exp_wg_capped(g, None)
}

/// As [`bv_exp_wg`], keeping only `u`-degrees `≤ max_degree`.
///
/// Row `n` satisfies `n·H_n(u) = u·Σ_{k=1}^{n} k·g_k·H_{n−k}(u)`.
pub fn bv_exp_wg_capped<S: Scalar>(
    g: &TruncatedSeries<S>,
    max_degree: Option<usize>,
) -> Result<BivariateSeries<S>> {
    if !g.coeffs()[0].is_zero() {
        return Err(usage("exp needs a series with zero constant term"));
    }
    let n_max = g.order();
    let weighted: Vec<S> = g
        .coeffs()
        .iter()
        .enumerate()
        .map(|(k, c)| c.clone() * S::from_int(k as i64))
        .collect();
    let mut rows: Vec<Vec<S>> = Vec::with_capacity(n_max + 1);
    rows.push(vec![S::one()]);
    for n in 1..=n_max {
        let width = max_degree.map_or(n, |d| d.min(n)) + 1;
        let mut acc = vec![S::zero(); width];
        for k in 1..=n {
            let w = &weighted[k];
            if w.is_zero() {
                continue;
            }
            for (j, c) in rows[n - k].iter().enumerate() {
                if j + 1 >= width {
                    break;
                }
                if !c.is_zero() {
                    acc[j + 1] = acc[j + 1].clone() + w.clone() * c.clone();
                }
            }
        }
        rows.push(acc.into_iter().map(|c| c.div_int(n as i64)).collect());
    }
    Ok(BivariateSeries { rows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    type Q = BigRational;

    fn q(n: i64, d: i64) -> Q {
        Q::from_ratio(n, d)
    }

    fn series(vals: &[(i64, i64)], order: usize) -> TruncatedSeries<Q> {
        TruncatedSeries::new(vals.iter().map(|&(n, d)| q(n, d)).collect(), order)
    }

    #[test]
    fn mul_examples() {
        let a = series(&[(1, 1), (1, 1)], 2);
        let b = series(&[(1, 1), (-1, 1)], 2);
        assert_eq!(a.mul(&b).unwrap(), series(&[(1, 1), (0, 1), (-1, 1)], 2));

        let geo = series(&[(1, 1); 4], 3);
        assert_eq!(geo.mul(&geo).unwrap(), series(&[(1, 1), (2, 1), (3, 1), (4, 1)], 3));

        let t = series(&[(0, 1), (1, 1)], 1);
        assert_eq!(t.mul(&t).unwrap(), TruncatedSeries::zero(1));
    }

    #[test]
    fn mismatched_orders_rejected() {
        let a = TruncatedSeries::<Q>::one(2);
        let b = TruncatedSeries::<Q>::one(3);
        assert!(a.mul(&b).is_err());
        assert!(a.add(&b).is_err());
    }

    #[test]
    fn exp_examples() {
        let t = series(&[(0, 1), (1, 1)], 4);
        assert_eq!(
            t.exp().unwrap(),
            series(&[(1, 1), (1, 1), (1, 2), (1, 6), (1, 24)], 4)
        );
        assert_eq!(TruncatedSeries::<Q>::zero(5).exp().unwrap(), TruncatedSeries::one(5));

        // 2·log(1/(1−t)) exponentiates to (1−t)^{-2}; compare against the
        // square of the geometric series.
        let g = TruncatedSeries::from_fn(3, |k| q(2, k as i64));
        let geo = series(&[(1, 1); 4], 3);
        assert_eq!(g.exp().unwrap(), geo.mul(&geo).unwrap());
        assert_eq!(g.exp().unwrap(), series(&[(1, 1), (2, 1), (3, 1), (4, 1)], 3));
    }

    #[test]
    fn exp_rejects_constant_term() {
        assert!(TruncatedSeries::<Q>::one(3).exp().is_err());
        assert!(bv_exp_wg(&TruncatedSeries::<Q>::one(3)).is_err());
    }

    #[test]
    fn log_examples() {
        assert_eq!(TruncatedSeries::<Q>::one(4).log().unwrap(), TruncatedSeries::zero(4));
        let one_plus_t = series(&[(1, 1), (1, 1)], 3);
        assert_eq!(
            one_plus_t.log().unwrap(),
            series(&[(0, 1), (1, 1), (-1, 2), (1, 3)], 3)
        );
        let g = series(&[(0, 1), (3, 1), (-1, 1), (1, 7)], 3);
        assert_eq!(g.exp().unwrap().log().unwrap(), g);
        assert!(series(&[(2, 1)], 3).log().is_err());
    }

    #[test]
    fn bivariate_examples() {
        let t = series(&[(0, 1), (1, 1)], 3);
        let bv = bv_exp_wg(&t).unwrap();
        for n in 0..=3usize {
            let fact: i64 = (1..=n as i64).product();
            for k in 0..=n {
                let expected = if k == n { q(1, fact) } else { q(0, 1) };
                assert_eq!(bv.coeff(n, k), expected);
            }
        }

        let g = TruncatedSeries::from_fn(2, |k| q(1, k as i64));
        let bv = bv_exp_wg(&g).unwrap();
        assert_eq!(bv.row(2), &[q(0, 1), q(1, 2), q(1, 2)]);

        let g = TruncatedSeries::from_fn(6, |k| q(k as i64 + 2, 3 * k as i64));
        let bv = bv_exp_wg(&g).unwrap();
        assert_eq!(bv.eval_u(&q(1, 1)), g.exp().unwrap());
    }

    #[test]
    fn degree_cap_keeps_low_coefficients() {
        let g = TruncatedSeries::from_fn(12, |k| q(3, k as i64));
        let full = bv_exp_wg(&g).unwrap();
        let capped = bv_exp_wg_capped(&g, Some(4)).unwrap();
        for n in 0..=12 {
            for k in 0..=4.min(n) {
                assert_eq!(full.coeff(n, k), capped.coeff(n, k));
            }
            assert!(capped.row(n).len() <= 5);
        }
    }

    #[test]
    fn double_backend_round_trip() {
        let g = TruncatedSeries::from_fn(40, |k| 0.7 / k as f64 + 0.1 * (k as f64).sin());
        let back = g.exp().unwrap().log().unwrap();
        for (a, b) in g.coeffs().iter().zip(back.coeffs()) {
            assert!((a - b).abs() <= 1e-12 * a.abs().max(1e-300), "{a} vs {b}");
        }
    }
}
