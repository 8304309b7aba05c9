mod common;

use common::*;
use pag_core::rational::int;
use pag_core::{
    indifferent, indifferent_with, strongly_prefers, weakly_prefers, CountryId,
    IndifferenceReading, StrategyMatrix,
};
use proptest::prelude::*;

fn example_pair() -> (pag_core::Environment, StrategyMatrix, StrategyMatrix) {
    let env = example_a();
    let u = StrategyMatrix::from_entries(
        &env,
        [
            (CountryId(0), CountryId(1), int(8)),
            (CountryId(1), CountryId(0), int(6)),
            (CountryId(2), CountryId(2), int(1)),
        ],
    )
    .unwrap();
    let v = StrategyMatrix::from_entries(
        &env,
        [
            (CountryId(0), CountryId(1), int(6)),
            (CountryId(0), CountryId(0), int(2)),
            (CountryId(1), CountryId(0), int(6)),
            (CountryId(2), CountryId(2), int(1)),
        ],
    )
    .unwrap();
    (env, u, v)
}

#[test]
fn example_predicates() {
    let (env, u, v) = example_pair();
    let three = CountryId(2);
    assert!(weakly_prefers(&env, three, &u, &v).unwrap());
    assert!(!weakly_prefers(&env, three, &v, &u).unwrap());
    assert!(!indifferent(&env, three, &u, &v).unwrap());
    assert!(strongly_prefers(&env, CountryId(1), &u, &v).unwrap());
    assert!(!strongly_prefers(&env, CountryId(1), &v, &u).unwrap());
}

#[test]
fn literal_reading_compares_own_state() {
    let (env, u, _) = example_pair();
    // country 3 is safe but its friend 2 is unsafe, so the literal reading
    // fails even for identical matrices
    assert!(indifferent(&env, CountryId(2), &u, &u).unwrap());
    assert!(!indifferent_with(&env, CountryId(2), &u, &u, IndifferenceReading::Literal).unwrap());
}

#[test]
fn outside_changes_do_not_matter() {
    // 1-2 friends, 3-4 adversaries: country 1 never sees 3
    let env = pag_core::Environment::new(
        labelled(&[int(1), int(1), int(1), int(2)]),
        [
            (CountryId(0), CountryId(1), pag_core::Relation::Friend),
            (CountryId(2), CountryId(3), pag_core::Relation::Adversary),
        ],
    )
    .unwrap();
    let u = StrategyMatrix::all_on_self(&env);
    let v = StrategyMatrix::from_entries(
        &env,
        [
            (CountryId(0), CountryId(0), int(1)),
            (CountryId(1), CountryId(1), int(1)),
            (CountryId(2), CountryId(2), int(1)),
            (CountryId(3), CountryId(2), int(2)),
        ],
    )
    .unwrap();
    assert_ne!(oracle_states(&env, &u)[2], oracle_states(&env, &v)[2]);
    assert!(indifferent(&env, CountryId(0), &u, &v).unwrap());
    assert!(!indifferent(&env, CountryId(3), &u, &v).unwrap());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn reflexive_and_consistent(
        (env, u) in instance(6, 8, 1),
        w in proptest::collection::vec(proptest::collection::vec(0u32..4, 6), 6),
    ) {
        let v = proportional_matrix(&env, &w);
        for i in env.ids() {
            prop_assert!(weakly_prefers(&env, i, &u, &u).unwrap());
            prop_assert!(indifferent(&env, i, &u, &u).unwrap());
            prop_assert!(!strongly_prefers(&env, i, &u, &u).unwrap());
            prop_assert!(!(strongly_prefers(&env, i, &u, &v).unwrap() && strongly_prefers(&env, i, &v, &u).unwrap()));
            prop_assert_eq!(indifferent(&env, i, &u, &v).unwrap(), indifferent(&env, i, &v, &u).unwrap());
            if indifferent(&env, i, &u, &v).unwrap() {
                prop_assert!(weakly_prefers(&env, i, &u, &v).unwrap() && weakly_prefers(&env, i, &v, &u).unwrap());
            }
        }
    }
}
