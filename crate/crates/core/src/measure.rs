//! Exact finite-`n` laws under the weighted measure
//! `P_Θ[σ] ∝ Π_m θ_m^{C_m(σ)}`.
//!
//! Everything here is read off the generating function
//! `Σ h_n t^n = exp(g_Θ(t))` and its refinements, using the series backend of
//! the caller's choice.

use std::borrow::Cow;

use crate::error::{Error, Result};
use crate::partitions::normalize;
use crate::pmf::Pmf;
use crate::scalar::{Scalar, ScalarKind};
use crate::series::{bv_exp_wg, bv_exp_wg_capped, TruncatedSeries};
use crate::weights::WeightSequence;

/// Mass allowed to fall outside a degree-capped double computation.
const DOUBLE_MASS_SLACK: f64 = 1e-13;

/// Largest support enumerated by [`joint_cycle_pmf`].
pub const JOINT_SUPPORT_LIMIT: f64 = 2e7;

/// Number of tuples `(c_1..c_b)` with `Σ m·c_m ≤ n`.
pub(crate) fn joint_support_size(n: usize, b: usize) -> f64 {
    // ways[s] = tuples over the lengths seen so far using exactly s
    let mut ways = vec![0.0f64; n + 1];
    ways[0] = 1.0;
    for m in 1..=b {
        for s in m..=n {
            ways[s] += ways[s - m];
        }
    }
    ways.iter().sum()
}

/// `h_0, …, h_N` from `n·h_n = Σ_{k=1}^{n} θ_k·h_{n−k}`.
pub fn normalization_constants<S: Scalar>(theta: &WeightSequence, order: usize) -> Result<Vec<S>> {
    Ok(theta.g_series::<S>(order)?.exp()?.into_coeffs())
}

/// Weights used for law computations in double precision: rescaled by the
/// radius of convergence when it is known, which keeps `h_n` representable.
pub(crate) fn working_weights<S: Scalar>(theta: &WeightSequence) -> Cow<'_, WeightSequence> {
    if S::KIND == ScalarKind::Double {
        if let Some(r) = theta.singularity().map(|c| c.radius) {
            if r.is_finite() && r > 0.0 && r != 1.0 {
                return Cow::Owned(theta.rescaled(r));
            }
        }
    }
    Cow::Borrowed(theta)
}

fn positive_normalization<S: Scalar>(h: &[S], n: usize, name: &str) -> Result<()> {
    if h[n].is_zero() {
        return Err(Error::Degenerate(format!("{name}: h_{n} = 0")));
    }
    Ok(())
}

/// Joint law of `(C_1, …, C_b)` on `S_n`:
///
/// `P[C = c] = Π_{m≤b} (θ_m/m)^{c_m}/c_m! · [t^{n−Σ m c_m}] exp(Σ_{m>b} θ_m t^m/m) / h_n`.
///
/// The support lists every tuple with `Σ m·c_m ≤ n`, including those of mass 0.
pub fn joint_cycle_pmf<S: Scalar>(theta: &WeightSequence, n: usize, b: usize) -> Result<Pmf<Vec<usize>, S>> {
    if b == 0 || b > n {
        return Err(Error::Usage(format!("need 1 ≤ b ≤ n, got b={b}, n={n}")));
    }
    let size = joint_support_size(n, b);
    if size > JOINT_SUPPORT_LIMIT {
        return Err(Error::Resource(format!("joint law for n={n}, b={b} has {size:.3e} tuples")));
    }
    let theta = working_weights::<S>(theta);
    let values = theta.values::<S>(n)?;
    let g = theta.g_series::<S>(n)?;
    let h = g.exp()?.into_coeffs();
    positive_normalization(&h, n, theta.name())?;
    let tail = TruncatedSeries::from_fn(n, |k| if k > b { g.coeff(k) } else { S::zero() })
        .exp()?
        .into_coeffs();

    // powers[m-1][c] = (θ_m/m)^c / c!
    let powers: Vec<Vec<S>> = (1..=b)
        .map(|m| {
            let rate = values[m - 1].div_int(m as i64);
            let mut row = vec![S::one()];
            for c in 1..=n / m {
                let next = row[c - 1].clone() * rate.clone();
                row.push(next.div_int(c as i64));
            }
            row
        })
        .collect();

    let mut raw = Vec::new();
    let mut counts = vec![0usize; b];
    enumerate_tuples(0, n, &mut counts, &mut |counts, used| {
        let mut w = tail[n - used].clone();
        if !w.is_zero() {
            for (m, &c) in counts.iter().enumerate() {
                w = w * powers[m][c].clone();
            }
        }
        raw.push((counts.to_vec(), w));
    });
    normalize(raw, &h[n], theta.name(), n)
}

pub(crate) fn enumerate_tuples(
    idx: usize,
    budget: usize,
    counts: &mut Vec<usize>,
    visit: &mut impl FnMut(&[usize], usize),
) {
    let b = counts.len();
    if idx == b {
        let used: usize = counts.iter().enumerate().map(|(m, c)| (m + 1) * c).sum();
        visit(counts, used);
        return;
    }
    let m = idx + 1;
    for c in 0..=budget / m {
        counts[idx] = c;
        enumerate_tuples(idx + 1, budget - m * c, counts, visit);
    }
    counts[idx] = 0;
}

/// Law of the number of cycles `K_{0n}`: `P[K = k] = [t^n u^k] exp(u·g_Θ(t)) / h_n`.
///
/// Exact backends return the full support `1..=n`. The double backend caps the
/// `u`-degree adaptively and stops once the retained mass is within `1e-13` of
/// one; the omitted upper tail is below that.
pub fn total_cycles_pmf<S: Scalar>(theta: &WeightSequence, n: usize) -> Result<Pmf<usize, S>> {
    if n == 0 {
        return Err(Error::Usage("total_cycles_pmf needs n ≥ 1".into()));
    }
    let theta = working_weights::<S>(theta);
    let g = theta.g_series::<S>(n)?;
    let h = g.exp()?.into_coeffs();
    positive_normalization(&h, n, theta.name())?;
    let row = match S::KIND {
        ScalarKind::Exact => bv_exp_wg(&g)?.row(n).to_vec(),
        ScalarKind::Double => {
            let mut cap = 64.min(n);
            loop {
                let row = bv_exp_wg_capped(&g, Some(cap))?.row(n).to_vec();
                let mass: f64 = row.iter().map(|c| c.to_f64()).sum::<f64>() / h[n].to_f64();
                if cap >= n || mass >= 1.0 - DOUBLE_MASS_SLACK {
                    break row;
                }
                cap = (cap * 2).min(n);
            }
        }
    };
    let raw = row.into_iter().enumerate().skip(1).collect();
    normalize(raw, &h[n], theta.name(), n)
}

/// `E[C_m] = (θ_m/m)·h_{n−m}/h_n` for `m = 1..=n`.
pub fn expected_cycle_counts<S: Scalar>(theta: &WeightSequence, n: usize) -> Result<Vec<S>> {
    let theta = working_weights::<S>(theta);
    let values = theta.values::<S>(n)?;
    let h = normalization_constants::<S>(&theta, n)?;
    positive_normalization(&h, n, theta.name())?;
    Ok((1..=n)
        .map(|m| {
            let num = values[m - 1].div_int(m as i64) * h[n - m].clone();
            num.checked_div(&h[n]).expect("nonzero normalization")
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::partitions::{brute_force_cycle_type_pmf, brute_force_k_pmf};
    use crate::scalar::Surd;
    use num_rational::BigRational;

    type Q = BigRational;

    fn q(n: i64, d: i64) -> Q {
        Q::from_ratio(n, d)
    }

    fn constant(n: i64, d: i64) -> WeightSequence {
        WeightSequence::constant(format!("ewens({n}/{d})"), q(n, d))
    }

    #[test]
    fn normalization_examples() {
        let h1 = normalization_constants::<Q>(&constant(1, 1), 12).unwrap();
        assert!(h1.iter().all(|h| *h == q(1, 1)));
        let h2 = normalization_constants::<Q>(&constant(2, 1), 12).unwrap();
        for (n, h) in h2.iter().enumerate() {
            assert_eq!(*h, q(n as i64 + 1, 1));
        }
        for n in 1..=12 {
            let oracle = brute_force_cycle_type_pmf::<Q>(&constant(2, 1), n).unwrap();
            assert_eq!(oracle.normalization, h2[n]);
        }
        let h0 = normalization_constants::<Q>(&constant(5, 7), 0).unwrap();
        assert_eq!(h0, vec![q(1, 1)]);
    }

    #[test]
    fn joint_examples() {
        let one = constant(1, 1);
        let p = joint_cycle_pmf::<Q>(&one, 3, 1).unwrap();
        assert_eq!(
            p.entries(),
            &[(vec![0], q(1, 3)), (vec![1], q(1, 2)), (vec![2], q(0, 1)), (vec![3], q(1, 6))]
        );
        let p = joint_cycle_pmf::<Q>(&one, 2, 2).unwrap();
        assert_eq!(p.mass(&vec![2, 0]), q(1, 2));
        assert_eq!(p.mass(&vec![0, 1]), q(1, 2));
        assert_eq!(p.total(), q(1, 1));
        let p = joint_cycle_pmf::<Q>(&constant(3, 4), 1, 1).unwrap();
        assert_eq!(p.entries(), &[(vec![0], q(0, 1)), (vec![1], q(1, 1))]);
        assert!(joint_cycle_pmf::<Q>(&one, 3, 4).is_err());
        assert!(joint_cycle_pmf::<Q>(&one, 3, 0).is_err());
    }

    #[test]
    fn joint_marginals_are_consistent() {
        let theta = WeightSequence::exact("1+1/m", |m| Surd::from_ratio(m as i64 + 1, m as i64));
        let b3 = joint_cycle_pmf::<Q>(&theta, 9, 3).unwrap();
        let b1 = joint_cycle_pmf::<Q>(&theta, 9, 1).unwrap();
        assert_eq!(b3.map_keys(|c| vec![c[0]]), b1);
    }

    #[test]
    fn total_cycles_examples() {
        let p = total_cycles_pmf::<Q>(&constant(1, 1), 3).unwrap();
        assert_eq!(p.entries(), &[(1, q(1, 3)), (2, q(1, 2)), (3, q(1, 6))]);
        let p = total_cycles_pmf::<Q>(&constant(1, 1), 1).unwrap();
        assert_eq!(p.entries(), &[(1, q(1, 1))]);
        let p = total_cycles_pmf::<Q>(&constant(2, 1), 2).unwrap();
        assert_eq!(p.entries(), &[(1, q(1, 3)), (2, q(2, 3))]);
    }

    #[test]
    fn total_cycles_match_oracle() {
        let theta = WeightSequence::exact("mixed", |m| Surd::from_ratio((m % 3) as i64 + 1, 2));
        for n in 1..=10 {
            assert_eq!(total_cycles_pmf::<Q>(&theta, n).unwrap(), brute_force_k_pmf::<Q>(&theta, n).unwrap());
        }
    }

    #[test]
    fn uniform_k_law_is_stirling_over_factorial() {
        // |s(n,k)| from s(n+1,k) = n·s(n,k) + s(n,k−1)
        let mut row = vec![num_bigint::BigInt::from(1)];
        let mut factorial = num_bigint::BigInt::from(1);
        for n in 1..=20usize {
            let mut next = vec![num_bigint::BigInt::from(0); n + 1];
            for (k, s) in row.iter().enumerate() {
                next[k] += s * (n - 1);
                next[k + 1] += s;
            }
            row = next;
            factorial *= n;
            let p = total_cycles_pmf::<Q>(&constant(1, 1), n).unwrap();
            for k in 1..=n {
                assert_eq!(p.mass(&k), Q::new(row[k].clone(), factorial.clone()), "n={n} k={k}");
            }
        }
    }

    #[test]
    fn expected_counts_examples() {
        let e = expected_cycle_counts::<Q>(&constant(1, 1), 7).unwrap();
        for (m, v) in e.iter().enumerate() {
            assert_eq!(*v, q(1, m as i64 + 1));
        }
        let e = expected_cycle_counts::<Q>(&constant(2, 1), 2).unwrap();
        assert_eq!(e, vec![q(4, 3), q(1, 3)]);
        let e = expected_cycle_counts::<Q>(&constant(9, 2), 1).unwrap();
        assert_eq!(e, vec![q(1, 1)]);
    }

    #[test]
    fn degenerate_when_hn_vanishes() {
        let only_two = WeightSequence::exact("only-2", |m| Surd::from_int(i64::from(m == 2)));
        assert!(matches!(total_cycles_pmf::<Q>(&only_two, 3), Err(Error::Degenerate(_))));
        assert!(total_cycles_pmf::<Q>(&only_two, 4).is_ok());
        assert!(matches!(expected_cycle_counts::<Q>(&only_two, 5), Err(Error::Degenerate(_))));
    }

    #[test]
    fn double_total_cycles_is_normalized_at_large_n() {
        let p = total_cycles_pmf::<f64>(&WeightSequence::approx("ewens", |_| 1.0), 3000).unwrap();
        assert!((p.total() - 1.0).abs() < 1e-12);
        let harmonic: f64 = (1..=3000).map(|j| 1.0 / j as f64).sum();
        assert!((p.mean() - harmonic).abs() < 1e-9);
    }
}
