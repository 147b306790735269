mod common;

use std::collections::BTreeSet;

use common::{family_strategy, uni};
use itertools::Itertools;
use proptest::prelude::*;
use rainbowlab::randmatch::*;
use rainbowlab::{Family, TupleMultiset, Universe};

fn all_matchings(u: Universe) -> Vec<PerfectMatching> {
    let n = u.n();
    (0..u.k() - 1)
        .map(|_| (1..=n).permutations(n as usize).collect::<Vec<_>>())
        .multi_cartesian_product()
        .map(|perms| PerfectMatching::new(u, perms).unwrap())
        .collect()
}

#[test]
fn ranks_biject_onto_all_matchings() {
    for (n, k) in [(2, 2), (3, 2), (3, 3), (4, 2), (2, 4)] {
        let u = uni(n, k);
        let all = all_matchings(u);
        assert_eq!(num_bigint::BigUint::from(all.len()), matching_count(n, k));
        let ranks: BTreeSet<u64> = all.iter().map(|m| m.rank().unwrap()).collect();
        assert_eq!(ranks, (0..all.len() as u64).collect());
        for m in &all {
            m.check().unwrap();
            let cells: BTreeSet<(u32, u32)> = m.members().iter().flat_map(|t| t.cells().collect::<Vec<_>>()).collect();
            assert_eq!(cells.len() as u32, n * k);
        }
    }
}

#[test]
fn malformed_permutations_are_rejected() {
    let u = uni(3, 2);
    assert!(PerfectMatching::new(u, vec![vec![1, 1, 2]]).is_err());
    assert!(PerfectMatching::new(u, vec![vec![1, 2]]).is_err());
    assert!(PerfectMatching::new(u, vec![vec![1, 2, 3], vec![1, 2, 3]]).is_err());
    assert!(PerfectMatching::new(u, vec![vec![0, 1, 2]]).is_err());
}

#[test]
fn tail_bound_reference_value() {
    let direct = 2.0 * f64::exp(-25.0 / (0.1 * 100.0 / 2.0 + 10.0));
    assert!((tail_bound(0.1, 100, 5.0) - direct).abs() < 1e-15);
    assert!((tail_bound(0.1, 100, 5.0) - 0.377751).abs() < 5e-7);
}

#[test]
fn histogram_independent_of_workers() {
    let u = uni(12, 3);
    let mut rng = substream(3, 0);
    let g = random_family(u, 0.25, &mut rng).unwrap();
    let one = count_histogram(&g, 3 * CHUNK as u64 + 17, 9, 1);
    let four = count_histogram(&g, 3 * CHUNK as u64 + 17, 9, 4);
    assert_eq!(one, four);
    assert_eq!(one.iter().sum::<u64>(), 3 * CHUNK as u64 + 17);
    let a = mc_tail(&g, 5000, &[1.0, 2.0], 9, 1).unwrap();
    let b = mc_tail(&g, 5000, &[1.0, 2.0], 9, 3).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.to_csv().lines().next().unwrap(), CSV_HEADER);
}

#[test]
fn empirical_mean_near_expectation() {
    let u = uni(20, 3);
    let g = random_family(u, 0.3, &mut substream(1, 0)).unwrap();
    let r = mc_tail(&g, 20000, &[2.0], 4, 2).unwrap();
    assert!((r.empirical_mean - r.expected_count).abs() < 0.1, "{r:?}");
    assert!(r.within_bound(3.0));
}

#[test]
fn random_family_has_requested_size() {
    let u = uni(10, 3);
    for alpha in [0.0, 0.1, 0.5, 1.0] {
        let f = random_family(u, alpha, &mut substream(0, 0)).unwrap();
        assert_eq!(f.len(), (alpha * 1000.0).round() as usize);
    }
    assert!(random_family(u, 1.5, &mut substream(0, 0)).is_err());
}

#[test]
fn uniformity_report_shape() {
    let r = uniformity_test(uni(3, 2), 6000, 2, 2).unwrap();
    assert_eq!(r.classes, 6);
    assert_eq!(r.dof, 5);
    assert_eq!(r.observed.iter().sum::<u64>(), 6000);
    assert!(r.p_value > 1e-4);
    assert!(uniformity_test(uni(1, 2), 10, 0, 1).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn intersection_is_additive(
        (a, b, seed) in (2u32..=6, 2u32..=3).prop_flat_map(|(n, k)| {
            let u = uni(n, k);
            (family_strategy(u), family_strategy(u), any::<u64>())
        })
    ) {
        let u = a.universe();
        let m = sample_matching(u, &mut substream(seed, 0));
        let union = a.union(&b).unwrap();
        let common = a.intersection(&b).unwrap();
        let ia = intersect_count(&m, &a).unwrap();
        let ib = intersect_count(&m, &b).unwrap();
        prop_assert_eq!(intersect_count(&m, &union).unwrap() + intersect_count(&m, &common).unwrap(), ia + ib);
        let naive = m.members().iter().filter(|t| a.contains(t)).count() as u64;
        prop_assert_eq!(ia, naive);
        let mut multi = TupleMultiset::from(&a);
        for t in b.iter() {
            multi.add(&t, 1).unwrap();
        }
        prop_assert_eq!(intersect_count(&m, &multi).unwrap(), ia + ib);
    }

    #[test]
    fn layers_sum_to_the_multiset(
        (entries, n) in (2u32..=5).prop_flat_map(|n| (prop::collection::vec((prop::collection::vec(1..=n, 2), 0u64..4), 0..20), Just(n)))
    ) {
        let u = uni(n, 2);
        let mut g = TupleMultiset::empty(u);
        for (coords, c) in &entries {
            g.add(&rainbowlab::Tuple::new(coords.clone()), *c).unwrap();
        }
        let layers = g.layers();
        prop_assert_eq!(layers.len() as u64, g.max_multiplicity());
        for t in u.tuples() {
            prop_assert_eq!(layers.iter().filter(|l| l.contains(&t)).count() as u64, g.multiplicity(&t));
        }
        let check = layer_check(&g, 10.0);
        prop_assert_eq!(check.total, g.total());
        prop_assert!(check.holds, "{:?}", check);
    }

    #[test]
    fn sampled_matchings_are_valid((n, k) in (1u32..=8, 2u32..=4), seed in any::<u64>()) {
        let m = sample_matching(uni(n, k), &mut substream(seed, 1));
        prop_assert!(m.check().is_ok());
        let full = Family::full(uni(n, k));
        prop_assert_eq!(intersect_count(&m, &full).unwrap(), n as u64);
    }
}
