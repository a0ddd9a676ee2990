//! Randomized box-enlargement scenarios checked against the brute-force
//! postcondition oracle: seed containment, disjointness from every rule, and
//! per-face maximality.

use boxrules_core::cfsbe::{enlarge_box, ExpansionOrder};
use boxrules_core::oracle::{check_enlarged_box, random_disjoint_scenario};
use boxrules_core::rng::Rng;

#[test]
fn thousand_randomized_scenarios_pass_the_oracle() {
    let mut rng = Rng::seed_from_u64(0xB0C5);
    let mut checked = 0;
    while checked < 1000 {
        let dims = 2 + rng.index(2); // 2 or 3 dimensions
        let scenario = random_disjoint_scenario(dims, 5, &mut rng);
        let order = ExpansionOrder::random(dims, &mut rng);
        let result = enlarge_box(&scenario.rules, &scenario.seed, &order)
            .expect("scenario satisfies the preconditions");
        if let Err(reason) = check_enlarged_box(&result, &scenario.rules, &scenario.seed) {
            panic!(
                "oracle violation after {checked} scenarios: {reason}\nrules: {:?}\nseed: {:?}\norder: {:?}",
                scenario.rules, scenario.seed, order
            );
        }
        checked += 1;
    }
}

#[test]
fn finite_bounds_come_from_rule_bounds() {
    let mut rng = Rng::seed_from_u64(0xFACE);
    for _ in 0..300 {
        let dims = 2 + rng.index(2);
        let scenario = random_disjoint_scenario(dims, 5, &mut rng);
        let order = ExpansionOrder::random(dims, &mut rng);
        let result = enlarge_box(&scenario.rules, &scenario.seed, &order).unwrap();
        for d in 0..dims {
            for bound in [result.test(d).lower(), result.test(d).upper()] {
                if bound.is_finite() {
                    let found = scenario.rules.iter().any(|r| {
                        r.antecedent().test(d).lower() == bound
                            || r.antecedent().test(d).upper() == bound
                    });
                    assert!(found, "finite bound {bound} on dim {d} is not a rule bound");
                }
            }
        }
    }
}

#[test]
fn enlargement_is_deterministic() {
    let mut rng = Rng::seed_from_u64(7);
    let scenario = random_disjoint_scenario(3, 5, &mut rng);
    let order = ExpansionOrder::new(vec![2, 0, 1]).unwrap();
    let a = enlarge_box(&scenario.rules, &scenario.seed, &order).unwrap();
    let b = enlarge_box(&scenario.rules, &scenario.seed, &order).unwrap();
    assert_eq!(a, b);
}
