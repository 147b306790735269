mod common;

use common::*;
use proptest::prelude::*;
use rainbowlab::search::find_rainbow;
use rainbowlab::sequence::{
    falsify_random, is_satisfying, minimal_c_search, validate_witness, SequenceSpec, Status, VerifyOptions,
};
use rainbowlab::{SearchBudget, Universe};

fn opts(symmetry: bool, workers: usize) -> VerifyOptions {
    VerifyOptions { strategy: "backtrack".into(), workers, symmetry }
}

fn tiny_case() -> impl Strategy<Value = (Universe, Vec<u64>)> {
    prop_oneof![Just(uni(2, 2)), Just(uni(2, 1)), Just(uni(3, 1)), Just(uni(3, 2)), Just(uni(2, 3))].prop_flat_map(
        |u| {
            let max_s = if u.size() <= 4 { 3 } else { 2 };
            prop::collection::vec(0..u.size(), 1..=max_s).prop_map(move |f| (u, f))
        },
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(120))]

    #[test]
    fn verdict_and_witness_match_brute_force((u, f) in tiny_case()) {
        let spec = SequenceSpec::new(u, f.clone()).unwrap();
        let v = is_satisfying(&spec, &SearchBudget::unlimited(), &VerifyOptions::default()).unwrap();
        let brute = brute_counterexample(u, &f);
        match brute {
            None => prop_assert_eq!(v.status, Status::Satisfying),
            Some(expected) => {
                prop_assert_eq!(v.status, Status::NotSatisfying);
                let w = v.witness.unwrap();
                validate_witness(&spec, &w).unwrap();
                prop_assert_eq!(w.families(), expected.families());
            }
        }
    }

    #[test]
    fn symmetry_and_workers_do_not_change_the_answer((u, f) in tiny_case()) {
        let spec = SequenceSpec::new(u, f).unwrap();
        let base = is_satisfying(&spec, &SearchBudget::unlimited(), &opts(false, 1)).unwrap();
        for (sym, w) in [(true, 1), (true, 4), (false, 3)] {
            let v = is_satisfying(&spec, &SearchBudget::unlimited(), &opts(sym, w)).unwrap();
            prop_assert_eq!(v.status, base.status);
            prop_assert_eq!(
                v.witness.as_ref().map(|s| s.families().to_vec()),
                base.witness.as_ref().map(|s| s.families().to_vec())
            );
        }
    }

    #[test]
    fn raising_thresholds_keeps_satisfying((u, f) in tiny_case(), bump in 0usize..3) {
        let spec = SequenceSpec::new(u, f.clone()).unwrap();
        let v = is_satisfying(&spec, &SearchBudget::unlimited(), &VerifyOptions::default()).unwrap();
        prop_assume!(v.status == Status::Satisfying);
        let mut g = f;
        let i = bump % g.len();
        g[i] += 1;
        let w = is_satisfying(&SequenceSpec::new(u, g).unwrap(), &SearchBudget::unlimited(), &VerifyOptions::default())
            .unwrap();
        prop_assert_eq!(w.status, Status::Satisfying);
    }
}

#[test]
fn symmetry_pruning_is_exact_on_every_tiny_sequence() {
    for u in [uni(2, 2), uni(3, 2), uni(2, 3), uni(3, 1)] {
        let size = u.size();
        for f1 in 0..size.min(6) {
            for f2 in 0..size.min(6) {
                let spec = SequenceSpec::new(u, vec![f1, f2]).unwrap();
                let a = is_satisfying(&spec, &SearchBudget::unlimited(), &opts(true, 1)).unwrap();
                let b = is_satisfying(&spec, &SearchBudget::unlimited(), &opts(false, 1)).unwrap();
                assert_eq!(a.status, b.status, "{u} f=({f1},{f2})");
                assert_eq!(a.witness, b.witness, "{u} f=({f1},{f2})");
                assert!(a.systems <= b.systems);
            }
        }
    }
}

#[test]
fn minimal_offset_for_two_by_two() {
    let m = minimal_c_search(uni(2, 2), 2, &SearchBudget::unlimited(), &VerifyOptions::default()).unwrap();
    assert_eq!(m.c, Some(1));
    let w = m.witness_below.unwrap();
    assert!(find_rainbow(&w, &SearchBudget::unlimited()).is_none());
}

#[test]
fn random_falsification_finds_and_validates() {
    let spec = SequenceSpec::new(uni(3, 2), vec![0, 3]).unwrap();
    let w = falsify_random(&spec, 11, 5000).expect("(0,3) is far from satisfying");
    validate_witness(&spec, &w).unwrap();
    assert_eq!(falsify_random(&spec, 11, 5000), Some(w));
    let good = SequenceSpec::new(uni(3, 2), vec![6, 6]).unwrap();
    assert_eq!(falsify_random(&good, 11, 200), None);
}

#[test]
fn budget_exhaustion_is_unknown() {
    let spec = SequenceSpec::new(uni(3, 2), vec![6, 6, 6]).unwrap();
    let v = is_satisfying(&spec, &SearchBudget::nodes(50), &VerifyOptions::default()).unwrap();
    assert_eq!(v.status, Status::Unknown);
}
