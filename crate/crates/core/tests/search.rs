mod common;

use common::*;
use proptest::prelude::*;
use rainbowlab::io::{format_system, parse_system};
use rainbowlab::randmatch::{sample_matching, substream};
use rainbowlab::search::{construct_stripe, greedy_extract, saturate, strategies, SearchOutcome};
use rainbowlab::{Family, FamilySystem, SearchBudget};

fn budget() -> SearchBudget {
    SearchBudget::unlimited()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn strategies_agree_with_naive_oracle(system in system_strategy(4)) {
        let expected = naive_rainbow(&system).is_some();
        for name in strategies().names() {
            let reg = strategies();
            let outcome = reg.get(name).unwrap().search(&system, &mut budget().meter());
            match outcome {
                SearchOutcome::Found(m) => {
                    prop_assert!(expected, "{name} found a matching the oracle missed");
                    prop_assert!(m.validate(&system).is_ok());
                }
                SearchOutcome::NoneExists => prop_assert!(!expected, "{name} missed a matching"),
                SearchOutcome::BudgetExhausted => prop_assert!(false, "unlimited budget ran out"),
            }
        }
    }

    #[test]
    fn file_format_round_trips(system in system_strategy(4)) {
        let text = format_system(&system);
        prop_assert_eq!(parse_system(&text).unwrap(), system.clone());
        let with = system.clone().with_thresholds(vec![7; system.s()]).unwrap();
        prop_assert_eq!(parse_system(&format_system(&with)).unwrap(), with);
    }

    #[test]
    fn saturation_is_maximal(system in sparse_system_strategy(3)) {
        prop_assume!(naive_rainbow(&system).is_none());
        let sat = saturate(&system, &budget()).unwrap();
        prop_assert!(system.is_pointwise_subset(&sat));
        prop_assert!(naive_rainbow(&sat).is_none());
        let u = sat.universe();
        for i in 0..sat.s() {
            for t in u.tuples().filter(|t| !sat.family(i).contains(t)) {
                let mut grown = sat.family(i).clone();
                grown.insert(&t).unwrap();
                prop_assert!(naive_rainbow(&sat.replace(i, grown).unwrap()).is_some(), "{t} could still be added");
            }
        }
    }

    #[test]
    fn greedy_extraction_is_valid(system in system_strategy(3), seed in any::<u64>()) {
        let m = sample_matching(system.universe(), &mut substream(seed, 0));
        if let Ok(r) = greedy_extract(&m, &system) {
            prop_assert!(r.validate(&system).is_ok());
        }
    }
}

#[test]
fn saturates_the_small_example() {
    let u = uni(2, 2);
    let sys =
        FamilySystem::new(u, vec![Family::of(u, &[&[1, 1], &[1, 2], &[2, 1]]), Family::of(u, &[&[1, 1]])]).unwrap();
    assert_eq!(saturate(&sys, &budget()).unwrap(), sys);
    let with_rainbow = FamilySystem::new(u, vec![Family::of(u, &[&[1, 1]]), Family::of(u, &[&[2, 2]])]).unwrap();
    assert!(saturate(&with_rainbow, &budget()).is_err());
}

#[test]
fn stripe_copies_have_no_rainbow_matching() {
    for (n, k, s) in [(3, 2, 2), (3, 2, 3), (4, 2, 3), (3, 3, 3), (2, 3, 3)] {
        let u = uni(n, k);
        let stripe = construct_stripe(u, s).unwrap();
        assert_eq!(stripe.len() as u64, (s as u64 - 1) * u.hyperplane_size());
        let sys = FamilySystem::new(u, vec![stripe; s as usize]).unwrap();
        assert!(naive_rainbow(&sys).is_none(), "n={n} k={k} s={s}");
    }
}

#[test]
fn extraction_succeeds_when_each_prefix_is_hit() {
    let u = uni(4, 2);
    let full = Family::full(u);
    let sys = FamilySystem::new(u, vec![full.clone(), full.clone(), full]).unwrap();
    let m = sample_matching(u, &mut substream(3, 0));
    let r = greedy_extract(&m, &sys).unwrap();
    assert!(r.validate(&sys).is_ok());
}
