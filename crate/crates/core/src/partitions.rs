//! Integer partitions and the brute-force cycle-type oracle.
//!
//! Every exact distribution computed elsewhere is checked against the sums
//! over partitions produced here. A permutation with cycle type `λ ⊢ n`
//! belongs to a conjugacy class of size `n!/z_λ`, so the weighted measure of
//! the class is `Π θ_{λ_i} / (h_n z_λ)`.

use num_bigint::BigUint;
use num_traits::One;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::pmf::Pmf;
use crate::scalar::Scalar;
use crate::weights::WeightSequence;

/// Largest `n` enumerated by default; `p(80) ≈ 1.6·10^7`.
pub const DEFAULT_ENUMERATION_LIMIT: usize = 80;

/// A partition `λ_1 ≥ λ_2 ≥ … ≥ λ_l > 0`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct Partition {
    parts: Vec<usize>,
}

impl Partition {
    pub fn new(parts: Vec<usize>) -> Result<Self> {
        if parts.contains(&0) {
            return Err(Error::Usage("partition parts must be positive".into()));
        }
        if parts.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::Usage("partition parts must be nonincreasing".into()));
        }
        Ok(Partition { parts })
    }

    /// Sorts arbitrary positive cycle lengths into a partition.
    pub fn from_cycle_lengths(mut lengths: Vec<usize>) -> Result<Self> {
        lengths.sort_unstable_by(|a, b| b.cmp(a));
        Partition::new(lengths)
    }

    pub fn empty() -> Self {
        Partition { parts: Vec::new() }
    }

    pub fn parts(&self) -> &[usize] {
        &self.parts
    }

    /// `|λ|`.
    pub fn size(&self) -> usize {
        self.parts.iter().sum()
    }

    /// `l(λ)`, the number of cycles.
    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    /// `c_m(λ)`, the number of parts equal to `m`.
    pub fn multiplicity(&self, m: usize) -> usize {
        self.parts.iter().filter(|&&p| p == m).count()
    }

    /// `(c_1, …, c_n)` with `n = |λ|`.
    pub fn cycle_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.size()];
        for &p in &self.parts {
            counts[p - 1] += 1;
        }
        counts
    }
}

/// All partitions of `n` in lexicographically descending order.
pub fn enumerate_partitions(n: usize) -> Result<Vec<Partition>> {
    enumerate_partitions_with_limit(n, DEFAULT_ENUMERATION_LIMIT)
}

pub fn enumerate_partitions_with_limit(n: usize, limit: usize) -> Result<Vec<Partition>> {
    let mut out = Vec::new();
    for_each_partition(n, limit, |parts| out.push(Partition { parts: parts.to_vec() }))?;
    Ok(out)
}

/// Streams the partitions of `n` (descending lexicographic order) to `visit`.
pub fn for_each_partition(n: usize, limit: usize, mut visit: impl FnMut(&[usize])) -> Result<()> {
    if n > limit {
        return Err(Error::Resource(format!(
            "partition enumeration of n={n} exceeds the limit {limit}"
        )));
    }
    let mut stack = Vec::with_capacity(n);
    fill(n, n, &mut stack, &mut visit);
    Ok(())
}

fn fill(remaining: usize, max_part: usize, stack: &mut Vec<usize>, visit: &mut impl FnMut(&[usize])) {
    if remaining == 0 {
        visit(stack);
        return;
    }
    for part in (1..=max_part.min(remaining)).rev() {
        stack.push(part);
        fill(remaining - part, part, stack, visit);
        stack.pop();
    }
}

/// `z_λ = Π_m m^{c_m} c_m!`.
pub fn z_of(lambda: &Partition) -> BigUint {
    let mut z = BigUint::one();
    let mut prev = 0;
    let mut run = 0u64;
    for &p in lambda.parts() {
        if p == prev {
            run += 1;
        } else {
            run = 1;
            prev = p;
        }
        z *= BigUint::from(p) * BigUint::from(run);
    }
    z
}

/// Size of the conjugacy class of cycle type `λ`, `|λ|!/z_λ`.
pub fn class_size(lambda: &Partition) -> BigUint {
    let factorial: BigUint = (1..=lambda.size()).map(BigUint::from).product();
    factorial / z_of(lambda)
}

/// Oracle output: the cycle-type law and its normalization.
#[derive(Debug, Clone)]
pub struct CycleTypeOracle<S> {
    pub pmf: Pmf<Partition, S>,
    /// `h_n = Σ_{λ⊢n} Π θ_{λ_i} / z_λ`.
    pub normalization: S,
}

/// `Π_m (θ_m/m)^{c_m}/c_m!`, evaluated part by part.
fn unnormalized_weight<S: Scalar>(parts: &[usize], theta: &[S]) -> S {
    let mut w = S::one();
    let mut prev = 0;
    let mut run = 0i64;
    for &p in parts {
        if p == prev {
            run += 1;
        } else {
            run = 1;
            prev = p;
        }
        w = w * theta[p - 1].clone();
        w = w.div_int(p as i64 * run);
    }
    w
}

/// The law of the cycle type under `P_Θ` on `S_n`, by enumeration.
pub fn brute_force_cycle_type_pmf<S: Scalar>(theta: &WeightSequence, n: usize) -> Result<CycleTypeOracle<S>> {
    if n == 0 {
        return Err(Error::Usage("brute force needs n ≥ 1".into()));
    }
    let values = theta.values::<S>(n)?;
    let mut raw = Vec::new();
    let mut total = S::zero();
    for_each_partition(n, DEFAULT_ENUMERATION_LIMIT, |parts| {
        let w = unnormalized_weight(parts, &values);
        total = total.clone() + w.clone();
        raw.push((Partition { parts: parts.to_vec() }, w));
    })?;
    let pmf = normalize(raw, &total, theta.name(), n)?;
    Ok(CycleTypeOracle {
        pmf,
        normalization: total,
    })
}

/// `h_n = Σ_{λ⊢n} Π θ_{λ_i} / z_λ` alone, without building the law.
pub fn brute_force_normalization<S: Scalar>(theta: &WeightSequence, n: usize) -> Result<S> {
    let values = theta.values::<S>(n.max(1))?;
    let mut total = S::zero();
    for_each_partition(n, DEFAULT_ENUMERATION_LIMIT, |parts| {
        let w = unnormalized_weight(parts, &values);
        total = std::mem::replace(&mut total, S::zero()) + w;
    })?;
    Ok(total)
}

/// The law of the number of cycles `K_{0n}`, by enumeration.
pub fn brute_force_k_pmf<S: Scalar>(theta: &WeightSequence, n: usize) -> Result<Pmf<usize, S>> {
    Ok(brute_force_cycle_type_pmf::<S>(theta, n)?.pmf.map_keys(Partition::len))
}

pub(crate) fn normalize<K: Ord + Clone, S: Scalar>(
    raw: Vec<(K, S)>,
    total: &S,
    name: &str,
    n: usize,
) -> Result<Pmf<K, S>> {
    if total.is_zero() {
        return Err(Error::Degenerate(format!("{name}: every cycle type of n={n} has weight 0")));
    }
    let entries = raw
        .into_iter()
        .map(|(k, w)| {
            let p = w.checked_div(total).expect("nonzero normalization");
            (k, p)
        })
        .collect();
    Ok(Pmf::new(entries))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;
    use crate::scalar::Surd;

    type Q = BigRational;

    fn q(n: i64, d: i64) -> Q {
        Q::from_ratio(n, d)
    }

    fn p(parts: &[usize]) -> Partition {
        Partition::new(parts.to_vec()).unwrap()
    }

    /// Euler's pentagonal-number recurrence, independent of the enumerator.
    fn partition_count(n: usize) -> u64 {
        let mut table = vec![0u64; n + 1];
        table[0] = 1;
        for m in 1..=n {
            let mut total: i64 = 0;
            for k in 1.. {
                let k = k as i64;
                let g1 = (k * (3 * k - 1) / 2) as usize;
                if g1 > m {
                    break;
                }
                let sign = if k % 2 == 1 { 1 } else { -1 };
                total += sign * table[m - g1] as i64;
                let g2 = (k * (3 * k + 1) / 2) as usize;
                if g2 <= m {
                    total += sign * table[m - g2] as i64;
                }
            }
            table[m] = total as u64;
        }
        table[n]
    }

    #[test]
    fn small_enumerations() {
        assert_eq!(enumerate_partitions(0).unwrap(), vec![Partition::empty()]);
        assert_eq!(
            enumerate_partitions(4).unwrap(),
            vec![p(&[4]), p(&[3, 1]), p(&[2, 2]), p(&[2, 1, 1]), p(&[1, 1, 1, 1])]
        );
        assert_eq!(enumerate_partitions(10).unwrap().len(), 42);
        assert_eq!(partition_count(10), 42);
    }

    #[test]
    fn counts_match_pentagonal_recurrence() {
        for n in 0..=60 {
            let mut count = 0u64;
            for_each_partition(n, 80, |_| count += 1).unwrap();
            assert_eq!(count, partition_count(n), "n={n}");
        }
    }

    #[test]
    fn normalization_only_matches_full_oracle() {
        let theta = WeightSequence::exact("2+1/m", |m| Surd::from_int(2) + Surd::from_ratio(1, m as i64));
        for n in 0..=9 {
            let h: Q = brute_force_normalization(&theta, n).unwrap();
            if n > 0 {
                assert_eq!(h, brute_force_cycle_type_pmf::<Q>(&theta, n).unwrap().normalization);
            } else {
                assert_eq!(h, Q::from_integer(1.into()));
            }
        }
    }

    #[test]
    fn enumeration_limit() {
        assert!(matches!(enumerate_partitions(81), Err(Error::Resource(_))));
        assert!(enumerate_partitions_with_limit(12, 10).is_err());
    }

    #[test]
    fn invalid_partitions() {
        assert!(Partition::new(vec![1, 2]).is_err());
        assert!(Partition::new(vec![2, 0]).is_err());
        assert_eq!(Partition::from_cycle_lengths(vec![1, 3, 2]).unwrap(), p(&[3, 2, 1]));
    }

    #[test]
    fn z_and_class_sizes() {
        assert_eq!(z_of(&p(&[1, 1, 1])), BigUint::from(6u32));
        assert_eq!(class_size(&p(&[1, 1, 1])), BigUint::from(1u32));
        assert_eq!(z_of(&p(&[2, 1])), BigUint::from(2u32));
        assert_eq!(class_size(&p(&[2, 1])), BigUint::from(3u32));
        assert_eq!(z_of(&p(&[3])), BigUint::from(3u32));
        assert_eq!(class_size(&p(&[3])), BigUint::from(2u32));
        assert_eq!(z_of(&p(&[2, 2, 1])), BigUint::from(8u32));
    }

    #[test]
    fn inverse_z_sums_to_one() {
        for n in 0..=40 {
            let mut total = Q::from_int(0);
            for_each_partition(n, 80, |parts| {
                let z = z_of(&Partition { parts: parts.to_vec() });
                total = total.clone() + Q::new(1.into(), z.into());
            })
            .unwrap();
            assert_eq!(total, Q::from_int(1), "n={n}");
        }
    }

    #[test]
    fn uniform_s3() {
        let theta = WeightSequence::constant("one", q(1, 1));
        let oracle = brute_force_cycle_type_pmf::<Q>(&theta, 3).unwrap();
        assert_eq!(oracle.normalization, q(1, 1));
        assert_eq!(
            oracle.pmf.entries(),
            &[(p(&[1, 1, 1]), q(1, 6)), (p(&[2, 1]), q(1, 2)), (p(&[3]), q(1, 3))]
        );
        assert!(oracle.pmf.validate(0.0).is_ok());
    }

    #[test]
    fn zero_weight_removes_classes() {
        let theta = WeightSequence::exact("no-2", |m| {
            crate::scalar::Surd::from_int(if m == 2 { 0 } else { 1 })
        });
        let oracle = brute_force_cycle_type_pmf::<Q>(&theta, 3).unwrap();
        assert_eq!(oracle.pmf.mass(&p(&[1, 1, 1])), q(1, 3));
        assert_eq!(oracle.pmf.mass(&p(&[2, 1])), q(0, 1));
        assert_eq!(oracle.pmf.mass(&p(&[3])), q(2, 3));
    }

    #[test]
    fn constant_two_at_n2() {
        let theta = WeightSequence::constant("two", q(2, 1));
        let oracle = brute_force_cycle_type_pmf::<Q>(&theta, 2).unwrap();
        assert_eq!(oracle.normalization, q(3, 1));
        assert_eq!(oracle.pmf.entries(), &[(p(&[1, 1]), q(2, 3)), (p(&[2]), q(1, 3))]);
    }

    #[test]
    fn k_pmf_examples() {
        let one = WeightSequence::constant("one", q(1, 1));
        let k2 = brute_force_k_pmf::<Q>(&one, 2).unwrap();
        assert_eq!(k2.entries(), &[(1, q(1, 2)), (2, q(1, 2))]);
        let k3 = brute_force_k_pmf::<Q>(&one, 3).unwrap();
        assert_eq!(k3.entries(), &[(1, q(1, 3)), (2, q(1, 2)), (3, q(1, 6))]);
        let odd = WeightSequence::constant("seven", q(7, 3));
        assert_eq!(brute_force_k_pmf::<Q>(&odd, 1).unwrap().entries(), &[(1, q(1, 1))]);
    }

    #[test]
    fn all_zero_is_degenerate() {
        let zero = WeightSequence::constant("zero", q(0, 1));
        assert!(matches!(brute_force_cycle_type_pmf::<Q>(&zero, 3), Err(Error::Degenerate(_))));
    }
}
