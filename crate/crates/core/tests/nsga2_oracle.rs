//! Selection machinery against the O(n^2) brute-force dominance oracle.

use boxrules_core::metrics::pareto_front;
use boxrules_core::nsga2::{crowding_distance, non_dominated_sort, select_survivors, FitnessTuple};
use boxrules_core::oracle::{fronts_naive, non_dominated_naive, random_population};
use boxrules_core::rng::Rng;

use proptest::prelude::*;

fn fitness_strategy() -> impl Strategy<Value = Vec<FitnessTuple>> {
    prop::collection::vec((0..=100u32, 1..=30usize), 1..=50).prop_map(|raw| {
        raw.into_iter()
            .map(|(f, s)| FitnessTuple::new(f as f64 / 100.0, s))
            .collect()
    })
}

proptest! {
    #[test]
    fn sort_matches_the_brute_force_oracle(pop in fitness_strategy()) {
        prop_assert_eq!(non_dominated_sort(&pop), fronts_naive(&pop));
    }

    #[test]
    fn pareto_front_matches_the_oracle(pop in fitness_strategy()) {
        prop_assert_eq!(pareto_front(&pop), non_dominated_naive(&pop));
    }

    #[test]
    fn front_membership_survives_monotone_rescaling(pop in fitness_strategy()) {
        // dominance depends only on the order of the objective values
        let rescaled: Vec<FitnessTuple> = pop
            .iter()
            .map(|f| FitnessTuple { fscore: f.fscore / 2.0 + 0.25, size: f.size * 3 })
            .collect();
        prop_assert_eq!(non_dominated_sort(&pop), non_dominated_sort(&rescaled));
    }

    #[test]
    fn selection_never_trades_front_one_away(
        pop in fitness_strategy(),
        target_fraction in 0.1f64..=1.0,
    ) {
        let target = ((pop.len() as f64 * target_fraction) as usize).max(1);
        let survivors = select_survivors(&pop, target).unwrap();
        prop_assert_eq!(survivors.len(), target);

        let fronts = non_dominated_sort(&pop);
        let first_front = &fronts[0];
        let takes_later = survivors.iter().any(|i| !first_front.contains(i));
        if takes_later {
            for member in first_front {
                prop_assert!(
                    survivors.contains(member),
                    "front-1 member {} dropped while a later front was admitted",
                    member
                );
            }
        }
    }

    #[test]
    fn crowding_assigns_infinity_to_objective_extremes(pop in fitness_strategy()) {
        let fronts = non_dominated_sort(&pop);
        for front_idx in fronts {
            let members: Vec<FitnessTuple> = front_idx.iter().map(|&i| pop[i]).collect();
            let d = crowding_distance(&members);
            prop_assert_eq!(d.len(), members.len());
            // the best-fscore and smallest-size members sit on sort
            // boundaries, so at least one member must be unbounded
            let best_f = members.iter().map(|m| m.fscore).fold(f64::NEG_INFINITY, f64::max);
            let best_pos = members
                .iter()
                .enumerate()
                .filter(|(_, m)| m.fscore == best_f)
                .map(|(i, _)| i)
                .next_back()
                .unwrap();
            prop_assert_eq!(d[best_pos], f64::INFINITY);
        }
    }
}

#[test]
fn five_hundred_seeded_populations_match_exactly() {
    let mut rng = Rng::seed_from_u64(0x5E1EC7);
    for _ in 0..500 {
        let pop = random_population(50, &mut rng);
        assert_eq!(non_dominated_sort(&pop), fronts_naive(&pop));
        assert_eq!(pareto_front(&pop), non_dominated_naive(&pop));
    }
}
