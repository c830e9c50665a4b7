use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;

use cyclemeter_core::config::{parse_n_grid, parse_param};
use cyclemeter_core::measure::{normalization_constants, total_cycles_pmf};
use cyclemeter_core::partitions::brute_force_k_pmf;
use cyclemeter_core::sampler::{cycle_type_of, rng_for, CycleSampler};
use cyclemeter_core::{Scalar, Surd, TruncatedSeries, WeightSequence};

type Q = BigRational;

fn q(n: i64, d: i64) -> Q {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn ratio() -> impl Strategy<Value = Q> {
    (-20i64..=20, 1i64..=9).prop_map(|(n, d)| q(n, d))
}

fn positive_ratio() -> impl Strategy<Value = (i64, i64)> {
    (1i64..=12, 1i64..=6)
}

fn series(order: usize, zero_constant: bool) -> impl Strategy<Value = TruncatedSeries<Q>> {
    prop::collection::vec(ratio(), order + 1).prop_map(move |mut c| {
        if zero_constant {
            c[0] = q(0, 1);
        }
        TruncatedSeries::new(c, order)
    })
}

fn weights(values: Vec<(i64, i64)>) -> WeightSequence {
    WeightSequence::exact("random", move |m| {
        let (n, d) = values[(m - 1) % values.len()];
        Surd::from_ratio(n, d)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn log_inverts_exp(f in series(8, true)) {
        let back = f.exp().unwrap().log().unwrap();
        prop_assert_eq!(back.coeffs(), f.coeffs());
    }

    #[test]
    fn mul_commutes(a in series(7, false), b in series(7, false)) {
        let (ab, ba) = (a.mul(&b).unwrap(), b.mul(&a).unwrap());
        prop_assert_eq!(ab.coeffs(), ba.coeffs());
    }

    #[test]
    fn exp_turns_sums_into_products(a in series(6, true), b in series(6, true)) {
        let lhs = a.add(&b).unwrap().exp().unwrap();
        let rhs = a.exp().unwrap().mul(&b.exp().unwrap()).unwrap();
        prop_assert_eq!(lhs.coeffs(), rhs.coeffs());
    }

    #[test]
    fn recurrence_and_k_law_match_enumeration(values in prop::collection::vec(positive_ratio(), 1..6), n in 1usize..9) {
        let theta = weights(values);
        let h = normalization_constants::<Q>(&theta, n).unwrap();
        for m in 1..=n {
            let rhs: Q = (1..=m).map(|k| theta.value::<Q>(k).unwrap() * h[m - k].clone()).sum();
            prop_assert_eq!(Q::from_integer(BigInt::from(m)) * &h[m], rhs);
        }
        let law = total_cycles_pmf::<Q>(&theta, n).unwrap();
        prop_assert_eq!(law.total(), q(1, 1));
        prop_assert_eq!(law, brute_force_k_pmf::<Q>(&theta, n).unwrap());
    }

    #[test]
    fn sampled_permutations_are_bijections(values in prop::collection::vec(positive_ratio(), 1..4), n in 1usize..15, seed: u64) {
        let sampler = CycleSampler::new(&weights(values), n).unwrap();
        let mut rng = rng_for(seed, 0);
        let perm = sampler.sample_permutation(&mut rng);
        let mut sorted = perm.clone();
        sorted.sort_unstable();
        prop_assert_eq!(sorted, (1..=n).collect::<Vec<_>>());
        prop_assert_eq!(cycle_type_of(&perm).unwrap().size(), n);
        let again = sampler.sample_permutation(&mut rng_for(seed, 0));
        prop_assert_eq!(perm, again);
    }

    #[test]
    fn fractions_parse_exactly(n in -10_000i64..10_000, d in 1i64..10_000) {
        prop_assert_eq!(parse_param(&format!("{n}/{d}")).unwrap(), q(n, d));
    }

    #[test]
    fn grids_round_trip(grid in prop::collection::vec(1usize..100_000, 1..20)) {
        let text: Vec<String> = grid.iter().map(usize::to_string).collect();
        prop_assert_eq!(parse_n_grid(&text.join(",")).unwrap(), grid);
    }

    #[test]
    fn parsers_never_panic(s in "\\PC{0,40}") {
        let _ = parse_param(&s);
        let _ = parse_n_grid(&s);
        let _ = cyclemeter_core::config::parse_eps(&s);
        let _ = cyclemeter_core::config::parse_k_spec(&s);
        let _ = cyclemeter_core::config::parse_config(&s);
    }
}

#[test]
fn scalar_backends_agree_on_small_law() {
    let theta = weights(vec![(1, 2), (3, 1), (2, 3)]);
    let exact = total_cycles_pmf::<Q>(&theta, 10).unwrap();
    let approx = total_cycles_pmf::<f64>(&theta, 10).unwrap();
    for (k, p) in exact.entries() {
        assert!((p.to_f64() - approx.mass(k)).abs() < 1e-14);
    }
}
