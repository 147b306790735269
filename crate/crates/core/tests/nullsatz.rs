mod common;

use common::*;
use itertools::Itertools;
use num_bigint::BigInt;
use num_traits::Zero;
use proptest::prelude::*;
use rainbowlab::nullsatz::*;
use rainbowlab::sequence::{Status, VerifyOptions};
use rainbowlab::{Family, SearchBudget};

#[test]
fn squared_coefficients_match_expansion() {
    for s in 1..=4 {
        let poly = naive_expand(s, 2);
        let bound = 2 * (s as u32 - 1);
        for e in (0..s).map(|_| 0..=bound).multi_cartesian_product() {
            let expected = poly.get(&e).cloned().unwrap_or_else(BigInt::zero);
            let got = squared_coeff(&e);
            assert_eq!(got.value, expected, "e = {e:?}");
            if let Some((a, b)) = &got.witness {
                let sum: Vec<u32> = a.iter().zip(b).map(|(x, y)| x + y).collect();
                assert_eq!(sum, e);
                assert!(PermutationPair::new(a.clone(), b.clone()).is_ok());
            }
        }
    }
}

#[test]
fn squared_coefficients_at_five_variables() {
    let poly = naive_expand(5, 2);
    let mut rng = rainbowlab::randmatch::substream(11, 0);
    let keys: Vec<_> = poly.keys().cloned().sorted().collect();
    for _ in 0..60 {
        let e = &keys[rand::Rng::random_range(&mut rng, 0..keys.len())];
        assert_eq!(&squared_coeff(e).value, &poly[e], "e = {e:?}");
    }
    assert!(squared_coeff(&[8, 0, 0, 0, 0]).value.is_zero());
}

#[test]
fn vandermonde_matches_expansion() {
    for s in 1..=4usize {
        let poly = naive_expand(s, 1);
        for a in (0..s).map(|_| 0..s as u32).multi_cartesian_product() {
            let expected = poly.get(&a).cloned().unwrap_or_else(BigInt::zero);
            assert_eq!(BigInt::from(vandermonde_coeff(&a)), expected, "a = {a:?}");
        }
    }
}

#[test]
fn witness_is_lexicographically_first() {
    for e in [vec![1, 1], vec![2, 2, 2], vec![1, 3, 2], vec![3, 3, 3, 3]] {
        let s = e.len() as u32;
        let first = (0..s).permutations(s as usize).find(|a| {
            let b: Vec<i64> = e.iter().zip(a).map(|(&x, &y)| x as i64 - y as i64).collect();
            b.iter().all(|&v| v >= 0) && PermutationPair::new(a.clone(), b.iter().map(|&v| v as u32).collect()).is_ok()
        });
        assert_eq!(squared_coeff(&e).witness.map(|w| w.0), first, "e = {e:?}");
    }
}

#[test]
fn modular_coefficients_agree() {
    for e in [vec![1, 1], vec![2, 2, 2], vec![1, 3, 2], vec![3, 3, 3, 3], vec![4, 4, 4, 4, 4]] {
        let v = squared_coeff(&e).value;
        for p in [2u64, 3, 5, 7, 101, 1_000_000_007] {
            let m = BigInt::from(p);
            let expected: u64 = (((&v % &m) + &m) % &m).try_into().unwrap();
            assert_eq!(coeff_mod_p(&e, p).unwrap(), expected);
        }
    }
}

#[test]
fn provenance_product_is_a_unit() {
    for s in 1..=4u32 {
        for a in (0..s).permutations(s as usize) {
            for b in (0..s).permutations(s as usize) {
                let pp = PermutationPair::new(a.clone(), b.clone()).unwrap();
                let (spec, prov) = sequence_from_perms(3, &pp).unwrap();
                assert_eq!(prov.product_coeff.abs(), 1);
                assert_eq!(prov.squared_coeff, squared_coeff(&prov.e).value);
                let f: Vec<u64> = prov.e.iter().map(|&x| 3 * x as u64).collect();
                assert_eq!(spec.thresholds(), &f[..]);
            }
        }
    }
}

#[test]
fn polynomial_sequences_are_satisfying_for_two_families() {
    for a in (0..2u32).permutations(2) {
        for b in (0..2u32).permutations(2) {
            let pp = PermutationPair::new(a.clone(), b.clone()).unwrap();
            let (v, _) =
                verify_polynomial_sequence(3, &pp, &SearchBudget::unlimited(), &VerifyOptions::default()).unwrap();
            assert_eq!(v.status, Status::Satisfying, "{a:?} {b:?}");
        }
    }
}

#[test]
fn grid_degree_is_side_length() {
    for n in 1..=5i64 {
        let grid: Vec<(i64, i64)> = (1..=n).cartesian_product(1..=n).collect();
        assert_eq!(deg_set(&PointSet2D::from_integers(grid.clone())).unwrap() as i64, n);
        assert_eq!(naive_degree(&grid) as i64, n);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(120))]

    #[test]
    fn degree_matches_oracle(points in prop::collection::btree_set((-4i64..=4, -4i64..=4), 1..14)) {
        let pts: Vec<_> = points.into_iter().collect();
        prop_assert_eq!(deg_set(&PointSet2D::from_integers(pts.clone())).unwrap(), naive_degree(&pts));
    }

    #[test]
    fn degree_is_monotone(
        points in prop::collection::btree_set((-3i64..=3, -3i64..=3), 2..12),
        drop in any::<prop::sample::Index>(),
    ) {
        let pts: Vec<_> = points.into_iter().collect();
        let mut sub = pts.clone();
        sub.remove(drop.index(sub.len()));
        prop_assert!(deg_set(&PointSet2D::from_integers(sub)).unwrap() <= deg_set(&PointSet2D::from_integers(pts)).unwrap());
    }

    #[test]
    fn vanishing_degree_bounds_family_size(f in (1u32..=5).prop_flat_map(|n| family_strategy(uni(n, 2)))) {
        let r = sz_check(&f).unwrap();
        prop_assert!(r.holds, "{:?}", r);
        prop_assert_eq!(r.size, f.len());
        if !f.is_empty() {
            let pts: Vec<(i64, i64)> = f.iter().map(|t| (t.get(1) as i64, t.get(2) as i64)).collect();
            prop_assert_eq!(r.degree, Some(naive_degree(&pts)));
        }
    }
}

#[test]
fn empty_family_degree_is_unset() {
    let r = sz_check(&Family::empty(uni(3, 2))).unwrap();
    assert_eq!((r.degree, r.bound, r.holds), (None, None, true));
}
