//! Sufficient conditions for weak preference, indifference and strong
//! preference between two strategy matrices, evaluated as decidable predicates.

use crate::environment::{CountryId, Environment};
use crate::error::Result;
use crate::mechanics::{states, StateVector, StrategyMatrix};

/// How the indifference condition compares states.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum IndifferenceReading {
    /// `x_j(U) = x_j(V)` for every neighbor `j`.
    #[default]
    PerNeighbor,
    /// `x_i(U) = x_j(V)` for every neighbor `j`, exactly as printed.
    Literal,
}

fn both_states(
    env: &Environment,
    u: &StrategyMatrix,
    v: &StrategyMatrix,
) -> Result<(StateVector, StateVector)> {
    Ok((states(env, u)?, states(env, v)?))
}

/// `U ⪯_i V`.
pub fn weakly_prefers(
    env: &Environment,
    i: CountryId,
    u: &StrategyMatrix,
    v: &StrategyMatrix,
) -> Result<bool> {
    let friends = env.friends_of(i)?;
    let adversaries = env.adversaries_of(i)?;
    let (xu, xv) = both_states(env, u, v)?;
    let friends_ok = friends
        .iter()
        .all(|j| xv[j.0].survives() || !xu[j.0].survives());
    let adversaries_ok = adversaries
        .iter()
        .all(|j| xv[j.0].is_down() || !xu[j.0].is_down());
    Ok(friends_ok && adversaries_ok)
}

pub fn indifferent(
    env: &Environment,
    i: CountryId,
    u: &StrategyMatrix,
    v: &StrategyMatrix,
) -> Result<bool> {
    indifferent_with(env, i, u, v, IndifferenceReading::PerNeighbor)
}

pub fn indifferent_with(
    env: &Environment,
    i: CountryId,
    u: &StrategyMatrix,
    v: &StrategyMatrix,
    reading: IndifferenceReading,
) -> Result<bool> {
    let friends = env.friends_of(i)?;
    let adversaries = env.adversaries_of(i)?;
    let (xu, xv) = both_states(env, u, v)?;
    let mut neighborhood = friends.iter().chain(adversaries.iter());
    Ok(match reading {
        IndifferenceReading::PerNeighbor => neighborhood.all(|j| xu[j.0] == xv[j.0]),
        IndifferenceReading::Literal => neighborhood.all(|j| xu[i.0] == xv[j.0]),
    })
}

/// `U ≺_i V`: `i` is unsafe under `U` and survives under `V`.
pub fn strongly_prefers(
    env: &Environment,
    i: CountryId,
    u: &StrategyMatrix,
    v: &StrategyMatrix,
) -> Result<bool> {
    env.check(i)?;
    let (xu, xv) = both_states(env, u, v)?;
    Ok(!xu[i.0].survives() && xv[i.0].survives())
}
