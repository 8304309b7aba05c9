mod common;

use common::*;
use pag_core::io::{parse_scenario, write_scenario};
use pag_core::{CountryId, Error, UtilityForm};
use proptest::prelude::*;

#[test]
fn example_friend_sets() {
    let a = example_a();
    let b = example_b();
    let three = CountryId(2);
    assert_eq!(a.friends_of(three).unwrap().len(), 3);
    assert!(a.adversaries_of(three).unwrap().is_empty());
    assert_eq!(
        b.friends_of(three).unwrap().into_iter().collect::<Vec<_>>(),
        vec![CountryId(0), three]
    );
    assert_eq!(b.add_friend(CountryId(1), three).unwrap(), a);
    assert!(matches!(
        a.add_friend(CountryId(1), three),
        Err(Error::AlreadyFriends { .. })
    ));
}

#[test]
fn single_powerless_country() {
    let (env, _) =
        parse_scenario(r#"{"countries": [{"label": "solo", "power": "0"}], "relations": []}"#)
            .unwrap();
    assert_eq!(env.friends_of(CountryId(0)).unwrap().len(), 1);
}

#[test]
fn self_relation_rejected() {
    let text = r#"{"countries": [{"label": "1", "power": 1}], "relations": [{"a": "1", "b": "1", "sign": "friend"}]}"#;
    assert!(matches!(
        parse_scenario(text),
        Err(Error::SelfRelation { .. })
    ));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn friend_and_adversary_sets_are_consistent(env in env_strategy(8, 6, 5)) {
        for i in env.ids() {
            let f = env.friends_of(i).unwrap();
            let a = env.adversaries_of(i).unwrap();
            prop_assert!(f.contains(&i));
            prop_assert!(f.is_disjoint(&a));
            for j in env.ids().filter(|&j| j != i) {
                prop_assert_eq!(f.contains(&j), env.friends_of(j).unwrap().contains(&i));
                prop_assert_eq!(a.contains(&j), env.adversaries_of(j).unwrap().contains(&i));
            }
        }
    }

    #[test]
    fn scenario_round_trip(env in env_strategy(7, 9, 4), raw in raw_values(), form in form_strategy()) {
        let model = model_from(env.len(), &raw, form);
        let text = write_scenario(&env, Some(&model));
        let (env2, model2) = parse_scenario(&text).unwrap();
        let canonical = env.canonicalized();
        prop_assert_eq!(&env2, &canonical);
        prop_assert_eq!(write_scenario(&env2, Some(&model2)), text);
        for i in env.ids() {
            let k = env2.id_of(env.label(i)).unwrap();
            prop_assert_eq!(model.table.own(i), model2.table.own(k));
        }
        prop_assert_eq!(model2.form, form);
    }

    #[test]
    fn default_model_is_not_written(env in env_strategy(5, 4, 1)) {
        let model = pag_core::UtilityModel::default_for(&env);
        let text = write_scenario(&env, Some(&model));
        prop_assert!(!text.contains("utilities"));
        let (_, parsed) = parse_scenario(&text).unwrap();
        prop_assert_eq!(parsed.form, UtilityForm::Additive);
    }
}
