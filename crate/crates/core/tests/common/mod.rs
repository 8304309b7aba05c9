#![allow(dead_code)]

use num_traits::Zero;
use pag_core::rational::{int, ratio};
use pag_core::{
    Country, CountryId, Environment, PairValues, PairwiseTable, Rational, Relation, State,
    StrategyMatrix, UtilityForm, UtilityModel,
};
use proptest::prelude::*;

pub fn labelled(powers: &[Rational]) -> Vec<Country> {
    powers
        .iter()
        .enumerate()
        .map(|(k, p)| Country::new(format!("c{k}"), p.clone()))
        .collect()
}

pub fn relations_from_codes(n: usize, codes: &[u8]) -> Vec<(CountryId, CountryId, Relation)> {
    let mut out = Vec::new();
    let mut k = 0;
    for a in 0..n {
        for b in a + 1..n {
            match codes[k] % 3 {
                0 => out.push((CountryId(a), CountryId(b), Relation::Friend)),
                1 => out.push((CountryId(a), CountryId(b), Relation::Adversary)),
                _ => {}
            }
            k += 1;
        }
    }
    out
}

pub fn example_a() -> Environment {
    Environment::new(
        vec![
            Country::new("1", int(8)),
            Country::new("2", int(6)),
            Country::new("3", int(1)),
        ],
        [
            (CountryId(0), CountryId(1), Relation::Adversary),
            (CountryId(1), CountryId(2), Relation::Friend),
            (CountryId(0), CountryId(2), Relation::Friend),
        ],
    )
    .unwrap()
}

pub fn example_b() -> Environment {
    example_a()
        .with_relation(CountryId(1), CountryId(2), Some(Relation::Adversary))
        .unwrap()
}

/// `t_32^F(1) = 1`, `t_32^A(1) = 2`, defaults elsewhere.
pub fn example_model() -> UtilityModel {
    let mut table = PairwiseTable::new(3);
    table
        .set_pair(
            CountryId(2),
            CountryId(1),
            Relation::Adversary,
            PairValues::new(int(2), int(0)),
        )
        .unwrap();
    UtilityModel::new(table, UtilityForm::Additive)
}

/// Environment with powers `units / d`.
pub fn env_strategy(max_n: usize, max_units: i64, d: i64) -> impl Strategy<Value = Environment> {
    (1..=max_n).prop_flat_map(move |n| {
        (
            proptest::collection::vec(0..=max_units, n),
            proptest::collection::vec(any::<u8>(), n * (n - 1) / 2),
        )
            .prop_map(move |(units, codes)| {
                let powers: Vec<Rational> = units.iter().map(|&u| ratio(u, d)).collect();
                Environment::new(labelled(&powers), relations_from_codes(n, &codes)).unwrap()
            })
    })
}

/// Row `i` splits `p_i` over its allowed columns in proportion to `weights[i]`.
pub fn proportional_matrix(env: &Environment, weights: &[Vec<u32>]) -> StrategyMatrix {
    let n = env.len();
    let mut rows = vec![vec![Rational::zero(); n]; n];
    for i in env.ids() {
        let cols = env.allowed_columns(i);
        let w: Vec<i64> = cols.iter().map(|c| weights[i.0][c.0] as i64).collect();
        let total: i64 = w.iter().sum();
        if total == 0 {
            rows[i.0][i.0] = env.power(i).clone();
            continue;
        }
        for (c, wc) in cols.iter().zip(w) {
            rows[i.0][c.0] = env.power(i) * ratio(wc, total);
        }
    }
    StrategyMatrix::validate(env, rows).unwrap()
}

/// Row `i` places its `p_i · d` grid units by `choices[i]`, one column pick per unit.
pub fn grid_matrix(env: &Environment, d: i64, choices: &[Vec<usize>]) -> StrategyMatrix {
    let n = env.len();
    let mut rows = vec![vec![Rational::zero(); n]; n];
    for i in env.ids() {
        let cols = env.allowed_columns(i);
        let units: i64 = (env.power(i) * int(d)).to_integer().try_into().unwrap();
        for k in 0..units as usize {
            let c = cols[choices[i.0].get(k).copied().unwrap_or(0) % cols.len()];
            rows[i.0][c.0] += ratio(1, d);
        }
    }
    StrategyMatrix::validate(env, rows).unwrap()
}

pub fn instance(
    max_n: usize,
    max_units: i64,
    d: i64,
) -> impl Strategy<Value = (Environment, StrategyMatrix)> {
    env_strategy(max_n, max_units, d).prop_flat_map(|env| {
        let n = env.len();
        proptest::collection::vec(proptest::collection::vec(0u32..4, n), n)
            .prop_map(move |w| (env.clone(), proportional_matrix(&env, &w)))
    })
}

pub fn grid_instance(
    max_n: usize,
    max_units: i64,
    d: i64,
) -> impl Strategy<Value = (Environment, StrategyMatrix)> {
    env_strategy(max_n, max_units, d).prop_flat_map(move |env| {
        let n = env.len();
        proptest::collection::vec(proptest::collection::vec(0usize..16, max_units as usize), n)
            .prop_map(move |c| (env.clone(), grid_matrix(&env, d, &c)))
    })
}

fn values(fav: i64, unfav: i64) -> PairValues {
    PairValues::new(int(fav.max(unfav)), int(fav.min(unfav)))
}

/// A full table from a flat list of small integers.
pub fn model_from(n: usize, raw: &[(i64, i64)], form: UtilityForm) -> UtilityModel {
    let mut table = PairwiseTable::new(n);
    let mut it = raw.iter().cycle();
    for i in 0..n {
        let &(a, b) = it.next().unwrap();
        table.set_own(CountryId(i), values(a + 1, b)).unwrap();
        for j in (0..n).filter(|&j| j != i) {
            for sign in [Relation::Friend, Relation::Adversary] {
                let &(a, b) = it.next().unwrap();
                table
                    .set_pair(CountryId(i), CountryId(j), sign, values(a, b))
                    .unwrap();
            }
        }
    }
    UtilityModel::new(table, form)
}

pub fn form_strategy() -> impl Strategy<Value = UtilityForm> {
    prop_oneof![
        Just(UtilityForm::Basic),
        Just(UtilityForm::FriendsFirst),
        Just(UtilityForm::Additive)
    ]
}

pub fn raw_values() -> impl Strategy<Value = Vec<(i64, i64)>> {
    proptest::collection::vec((0i64..4, 0i64..4), 1..40)
}

// ---------------------------------------------------------------------------
// oracles written from the definitions, independent of the library internals

pub fn oracle_sigma_tau(env: &Environment, u: &StrategyMatrix) -> (Vec<Rational>, Vec<Rational>) {
    let n = env.len();
    let cell = |i: usize, j: usize| u.get(CountryId(i), CountryId(j)).clone();
    let mut sigma = vec![Rational::zero(); n];
    let mut tau = vec![Rational::zero(); n];
    for i in 0..n {
        sigma[i] += cell(i, i);
        for j in (0..n).filter(|&j| j != i) {
            match env.relation(CountryId(i), CountryId(j)) {
                Some(Relation::Friend) => sigma[i] += cell(j, i),
                Some(Relation::Adversary) => {
                    sigma[i] += cell(i, j);
                    tau[i] += cell(j, i);
                }
                None => {}
            }
        }
    }
    (sigma, tau)
}

pub fn oracle_states(env: &Environment, u: &StrategyMatrix) -> Vec<State> {
    let (s, t) = oracle_sigma_tau(env, u);
    s.iter()
        .zip(&t)
        .map(|(s, t)| match s.cmp(t) {
            std::cmp::Ordering::Greater => State::Safe,
            std::cmp::Ordering::Equal => State::Precarious,
            std::cmp::Ordering::Less => State::Unsafe,
        })
        .collect()
}

pub fn oracle_utility(env: &Environment, model: &UtilityModel, x: &[State], i: usize) -> Rational {
    let own = model.table.own(CountryId(i));
    if x[i] == State::Unsafe {
        return own.unfavorable.clone();
    }
    let mut total = own.favorable.clone();
    let (mut friends, mut adversaries, mut realized) =
        (Rational::zero(), Rational::zero(), Rational::zero());
    let mut all_friends = true;
    for j in (0..env.len()).filter(|&j| j != i) {
        let Some(sign) = env.relation(CountryId(i), CountryId(j)) else {
            continue;
        };
        let v = model.table.pair(CountryId(i), CountryId(j), sign);
        let good = match sign {
            Relation::Friend => x[j] != State::Unsafe,
            Relation::Adversary => x[j] != State::Safe,
        };
        realized += if good { &v.favorable } else { &v.unfavorable };
        match (sign, good) {
            (Relation::Friend, true) => friends += &v.favorable,
            (Relation::Friend, false) => all_friends = false,
            (Relation::Adversary, true) => adversaries += &v.favorable,
            (Relation::Adversary, false) => {}
        }
    }
    match model.form {
        UtilityForm::Additive => total += realized,
        UtilityForm::Basic => total += friends + adversaries,
        UtilityForm::FriendsFirst => {
            total += friends;
            if all_friends {
                total += adversaries;
            }
        }
    }
    total
}

pub fn compositions(total: i64, parts: usize) -> Vec<Vec<i64>> {
    if parts == 1 {
        return vec![vec![total]];
    }
    (0..=total)
        .flat_map(|first| {
            compositions(total - first, parts - 1)
                .into_iter()
                .map(move |mut rest| {
                    rest.insert(0, first);
                    rest
                })
        })
        .collect()
}

/// Best utility of `i` over every row on the `1/d` grid, others fixed.
pub fn brute_force_best(
    env: &Environment,
    model: &UtilityModel,
    u: &StrategyMatrix,
    i: CountryId,
    d: i64,
) -> Rational {
    let cols = env.allowed_columns(i);
    let units: i64 = (env.power(i) * int(d)).to_integer().try_into().unwrap();
    compositions(units, cols.len())
        .into_iter()
        .map(|comp| {
            let mut row = vec![Rational::zero(); env.len()];
            for (c, k) in cols.iter().zip(comp) {
                row[c.0] = ratio(k, d);
            }
            let v = u.with_row(i, row).unwrap();
            oracle_utility(env, model, &oracle_states(env, &v), i.0)
        })
        .max()
        .unwrap()
}
