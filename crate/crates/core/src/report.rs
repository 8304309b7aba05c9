//! JSON renderings of results. Every rational is a `"num/den"` string and
//! per-country data is keyed by label, so output is stable byte for byte.

use std::collections::BTreeMap;

use serde_json::{json, Value};

use crate::analysis::{
    ConstructedPair, NecessaryCondition, ParadoxReport, PoAReport, SurvivalReport, WelfareBounds,
};
use crate::environment::{CountryId, Environment};
use crate::equilibrium::{BestResponse, Dynamics, EquilibriumSet};
use crate::error::Result;
use crate::io::{allocation_to_value, scenario_to_value};
use crate::mechanics::{states, total_support, total_threat, StrategyMatrix};
use crate::rational::{format_rational, Rational};
use crate::utility::{total_utility, total_welfare, UtilityModel};

fn r(value: &Rational) -> Value {
    Value::String(format_rational(value))
}

fn labels(env: &Environment, ids: impl IntoIterator<Item = CountryId>) -> Value {
    let mut out: Vec<&str> = ids.into_iter().map(|c| env.label(c)).collect();
    out.sort();
    json!(out)
}

fn row_value(env: &Environment, row: &[Rational]) -> Value {
    let cells: BTreeMap<&str, String> = env
        .ids()
        .filter(|j| !num_traits::Zero::is_zero(&row[j.0]))
        .map(|j| (env.label(j), format_rational(&row[j.0])))
        .collect();
    json!(cells)
}

/// `σ`, `τ` and the state of every country.
pub fn states_report(env: &Environment, u: &StrategyMatrix) -> Result<Value> {
    let x = states(env, u)?;
    let mut countries = serde_json::Map::new();
    for i in env.ids() {
        countries.insert(
            env.label(i).to_string(),
            json!({
                "sigma": r(&total_support(env, u, i)?),
                "tau": r(&total_threat(env, u, i)?),
                "state": x[i.0],
            }),
        );
    }
    Ok(json!({ "countries": countries }))
}

/// Allocation, states and welfare of one matrix.
pub fn outcome_value(env: &Environment, model: &UtilityModel, u: &StrategyMatrix) -> Result<Value> {
    let x = states(env, u)?;
    let mut per_country = serde_json::Map::new();
    for i in env.ids() {
        per_country.insert(
            env.label(i).to_string(),
            json!({ "state": x[i.0], "utility": r(&total_utility(env, model, u, i)?) }),
        );
    }
    Ok(json!({
        "allocation": allocation_to_value(u),
        "countries": per_country,
        "welfare": r(&total_welfare(env, model, u)?),
    }))
}

pub fn best_response_report(
    env: &Environment,
    model: &UtilityModel,
    u: &StrategyMatrix,
    br: &BestResponse,
) -> Result<Value> {
    let options: Vec<Value> = br
        .witness_rows
        .iter()
        .zip(&br.target_sets)
        .map(|(row, t)| {
            json!({
                "row": row_value(env, row),
                "survives": t.survives,
                "favorable_friends": labels(env, t.friends.iter().copied()),
                "favorable_adversaries": labels(env, t.adversaries.iter().copied()),
            })
        })
        .collect();
    Ok(json!({
        "country": env.label(br.country),
        "current_utility": r(&total_utility(env, model, u, br.country)?),
        "value": r(&br.value),
        "canonical_row": row_value(env, br.canonical_row()),
        "options": options,
    }))
}

pub fn equilibrium_set_report(
    env: &Environment,
    model: &UtilityModel,
    set: &EquilibriumSet,
) -> Result<Value> {
    let equilibria = set
        .equilibria
        .iter()
        .map(|u| outcome_value(env, model, u))
        .collect::<Result<Vec<_>>>()?;
    Ok(json!({
        "grid_denominator": set.grid_denominator,
        "search_space": set.search_space.to_string(),
        "exhaustive_over_grid": set.exhaustive_over_grid,
        "count": set.equilibria.len(),
        "equilibria": equilibria,
    }))
}

pub fn dynamics_report(env: &Environment, model: &UtilityModel, d: &Dynamics) -> Result<Value> {
    let trajectory: Vec<Value> = d.trajectory.iter().map(allocation_to_value).collect();
    Ok(json!({
        "converged": d.converged,
        "rounds": d.rounds,
        "steps": d.trajectory.len() - 1,
        "final": outcome_value(env, model, d.last())?,
        "trajectory": trajectory,
    }))
}

pub fn paradox_report(p: &ParadoxReport) -> Value {
    json!({
        "country": p.env_small.label(p.country),
        "mode": p.mode.as_str(),
        "grid_denominator": p.grid_denominator,
        "welfare_fewer_friends": r(&p.welfare_small),
        "welfare_more_friends": r(&p.welfare_large),
        "paradox": p.paradox,
    })
}

pub fn necessary_condition_value(env: &Environment, nc: &NecessaryCondition) -> Value {
    json!({
        "holds": nc.holds,
        "witnesses": labels(env, nc.witnesses.iter().copied()),
    })
}

pub fn survival_report(env_large: &Environment, s: &SurvivalReport) -> Value {
    json!({
        "country": env_large.label(s.country),
        "equilibria_fewer_friends": s.equilibria_small,
        "equilibria_more_friends": s.equilibria_large,
        "survives_fewer_friends": s.survives_small,
        "survives_more_friends": s.survives_large,
        "implication_holds": s.implication_holds,
        "counterexample": s.counterexample.as_ref().map(allocation_to_value),
    })
}

pub fn bounds_value(b: &WelfareBounds) -> Value {
    json!({ "a": r(&b.a), "b": r(&b.b), "lower": r(&b.lower), "upper": r(&b.upper) })
}

pub fn poa_report(p: &PoAReport) -> Value {
    json!({
        "grid_denominator": p.grid_denominator,
        "equilibria": p.equilibria,
        "max_welfare": r(&p.max_welfare),
        "min_equilibrium_welfare": r(&p.min_equilibrium_welfare),
        "poa": p.poa.as_ref().map(r),
        "bounds": p.bounds.as_ref().map(bounds_value),
        "within_bounds": p.within_bounds,
    })
}

pub fn constructed_pair_report(pair: &ConstructedPair, model: Option<&UtilityModel>) -> Value {
    let env = &pair.more_friends;
    json!({
        "country": env.label(pair.country),
        "targets": labels(env, pair.targets.iter().copied()),
        "fewer_friends": scenario_to_value(&pair.fewer_friends, model),
        "more_friends": scenario_to_value(&pair.more_friends, model),
    })
}
