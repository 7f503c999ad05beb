use inc_sim::ofmo::{brute_force_ofmo, knapsack_ofmo, objective, OfmoProblem, BRUTE_FORCE_MAX_USERS};
use proptest::prelude::*;

#[test]
fn knapsack_examples() {
    let p = OfmoProblem { scores: vec![0.9, -0.2, 0.5, 0.7], capacity: 2 };
    assert_eq!(knapsack_ofmo(&p), vec![true, false, false, true]);
    let none = OfmoProblem { scores: vec![-0.1, -0.5], capacity: 2 };
    assert_eq!(knapsack_ofmo(&none), vec![false, false]);
    let zero = OfmoProblem { scores: vec![0.0, 0.3], capacity: 0 };
    assert_eq!(knapsack_ofmo(&zero), vec![false, false]);
}

#[test]
fn ties_prefer_exclusion() {
    let p = OfmoProblem { scores: vec![0.0, 0.0, 0.4], capacity: 3 };
    assert_eq!(knapsack_ofmo(&p), vec![false, false, true]);
}

#[test]
fn brute_force_rejects_large_inputs() {
    let p = OfmoProblem { scores: vec![0.1; BRUTE_FORCE_MAX_USERS + 1], capacity: 3 };
    assert!(brute_force_ofmo(&p).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]
    #[test]
    fn knapsack_matches_enumeration(
        scores in prop::collection::vec(-1.0f64..1.0, 1..=15),
        cap in 0usize..16,
    ) {
        let cap = cap.min(scores.len());
        let p = OfmoProblem { scores: scores.clone(), capacity: cap };
        let dp = knapsack_ofmo(&p);
        let bf = brute_force_ofmo(&p).unwrap();
        prop_assert!(dp.iter().filter(|&&b| b).count() <= cap);
        prop_assert_eq!(objective(&scores, &dp), objective(&scores, &bf));
    }
}
