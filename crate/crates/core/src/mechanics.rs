//! Strategy matrices, total support, total threat, and the resulting states.

use std::fmt;
use std::sync::Arc;

use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::environment::{CountryId, Environment, Relation};
use crate::error::{Error, Result};
use crate::rational::Rational;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum State {
    Safe,
    Precarious,
    Unsafe,
}

impl State {
    pub fn classify<T: Ord>(support: &T, threat: &T) -> State {
        match support.cmp(threat) {
            std::cmp::Ordering::Greater => State::Safe,
            std::cmp::Ordering::Equal => State::Precarious,
            std::cmp::Ordering::Less => State::Unsafe,
        }
    }

    /// Safe or precarious.
    pub fn survives(self) -> bool {
        self != State::Unsafe
    }

    /// Unsafe or precarious: the favorable outcome for an adversary.
    pub fn is_down(self) -> bool {
        self != State::Safe
    }

    pub fn as_str(self) -> &'static str {
        match self {
            State::Safe => "safe",
            State::Precarious => "precarious",
            State::Unsafe => "unsafe",
        }
    }
}

impl fmt::Display for State {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

pub type StateVector = Vec<State>;

/// A validated allocation `U = [u_ij]` bound to the environment it was
/// checked against.
#[derive(Debug, Clone)]
pub struct StrategyMatrix {
    env: Arc<Environment>,
    entries: Vec<Rational>,
}

impl PartialEq for StrategyMatrix {
    fn eq(&self, other: &Self) -> bool {
        self.entries == other.entries && self.env == other.env
    }
}

impl Eq for StrategyMatrix {}

impl StrategyMatrix {
    /// Checks nonnegativity, exact row sums, and the off-neighborhood zeros.
    pub fn validate(env: &Environment, rows: Vec<Vec<Rational>>) -> Result<Self> {
        Self::validate_shared(Arc::new(env.clone()), rows)
    }

    pub(crate) fn validate_shared(env: Arc<Environment>, rows: Vec<Vec<Rational>>) -> Result<Self> {
        let n = env.len();
        if rows.len() != n || rows.iter().any(|r| r.len() != n) {
            return Err(Error::MatrixShape { expected: n });
        }
        for (i, row) in rows.iter().enumerate() {
            let ci = CountryId(i);
            let mut sum = Rational::zero();
            for (j, value) in row.iter().enumerate() {
                let cj = CountryId(j);
                if value.is_negative() {
                    return Err(Error::NegativeEntry {
                        row: env.label(ci).to_string(),
                        col: env.label(cj).to_string(),
                        value: value.clone(),
                    });
                }
                if !value.is_zero() && i != j && env.relation(ci, cj).is_none() {
                    return Err(Error::NonNeighbor {
                        row: env.label(ci).to_string(),
                        col: env.label(cj).to_string(),
                    });
                }
                sum += value;
            }
            if &sum != env.power(ci) {
                return Err(Error::RowSum {
                    row: env.label(ci).to_string(),
                    sum,
                    power: env.power(ci).clone(),
                });
            }
        }
        Ok(StrategyMatrix {
            env,
            entries: rows.into_iter().flatten().collect(),
        })
    }

    /// Builds a matrix from the listed nonzero cells; unlisted cells are zero.
    pub fn from_entries(
        env: &Environment,
        cells: impl IntoIterator<Item = (CountryId, CountryId, Rational)>,
    ) -> Result<Self> {
        let n = env.len();
        let mut rows = vec![vec![Rational::zero(); n]; n];
        for (i, j, v) in cells {
            env.check(i)?;
            env.check(j)?;
            rows[i.0][j.0] = v;
        }
        Self::validate(env, rows)
    }

    /// Every country keeps its whole power: `u_ii = p_i`.
    pub fn all_on_self(env: &Environment) -> Self {
        let n = env.len();
        let mut entries = vec![Rational::zero(); n * n];
        for i in 0..n {
            entries[i * n + i] = env.power(CountryId(i)).clone();
        }
        StrategyMatrix {
            env: Arc::new(env.clone()),
            entries,
        }
    }

    pub fn environment(&self) -> &Environment {
        &self.env
    }

    pub fn len(&self) -> usize {
        self.env.len()
    }

    pub fn is_empty(&self) -> bool {
        self.env.is_empty()
    }

    pub fn get(&self, i: CountryId, j: CountryId) -> &Rational {
        &self.entries[i.0 * self.len() + j.0]
    }

    pub fn row(&self, i: CountryId) -> &[Rational] {
        let n = self.len();
        &self.entries[i.0 * n..(i.0 + 1) * n]
    }

    pub fn rows(&self) -> Vec<Vec<Rational>> {
        self.entries
            .chunks(self.len().max(1))
            .map(<[_]>::to_vec)
            .collect()
    }

    pub(crate) fn entries(&self) -> &[Rational] {
        &self.entries
    }

    /// Replaces row `i`, re-validating the whole matrix.
    pub fn with_row(&self, i: CountryId, row: Vec<Rational>) -> Result<Self> {
        self.env.check(i)?;
        let mut rows = self.rows();
        rows[i.0] = row;
        Self::validate_shared(self.env.clone(), rows)
    }

    /// The same matrix re-checked against another environment.
    pub fn revalidate(&self, env: &Environment) -> Result<Self> {
        Self::validate(env, self.rows())
    }

    pub(crate) fn ensure_env(&self, env: &Environment) -> Result<()> {
        if *self.env == *env {
            Ok(())
        } else {
            Err(Error::EnvironmentMismatch)
        }
    }
}

/// Membership test for the set of strategy matrices of `env`.
pub fn validate_strategy(env: &Environment, rows: Vec<Vec<Rational>>) -> Result<StrategyMatrix> {
    StrategyMatrix::validate(env, rows)
}

/// `σ_i(U)`: friendly allocations into `i` (including `u_ii`) plus `i`'s own
/// allocations against its adversaries.
pub fn total_support(env: &Environment, u: &StrategyMatrix, i: CountryId) -> Result<Rational> {
    env.check(i)?;
    u.ensure_env(env)?;
    Ok(support_unchecked(env, u, i))
}

/// `τ_i(U)`: allocations by `i`'s adversaries against `i`.
pub fn total_threat(env: &Environment, u: &StrategyMatrix, i: CountryId) -> Result<Rational> {
    env.check(i)?;
    u.ensure_env(env)?;
    Ok(threat_unchecked(env, u, i))
}

pub fn state(env: &Environment, u: &StrategyMatrix, i: CountryId) -> Result<State> {
    let s = total_support(env, u, i)?;
    let t = total_threat(env, u, i)?;
    Ok(State::classify(&s, &t))
}

pub fn states(env: &Environment, u: &StrategyMatrix) -> Result<StateVector> {
    u.ensure_env(env)?;
    Ok(env
        .ids()
        .map(|i| State::classify(&support_unchecked(env, u, i), &threat_unchecked(env, u, i)))
        .collect())
}

fn support_unchecked(env: &Environment, u: &StrategyMatrix, i: CountryId) -> Rational {
    let mut total = u.get(i, i).clone();
    for j in env.ids().filter(|&j| j != i) {
        match env.relation(i, j) {
            Some(Relation::Friend) => total += u.get(j, i),
            Some(Relation::Adversary) => total += u.get(i, j),
            None => {}
        }
    }
    total
}

fn threat_unchecked(env: &Environment, u: &StrategyMatrix, i: CountryId) -> Rational {
    env.adversaries(i)
        .into_iter()
        .fold(Rational::zero(), |acc, j| acc + u.get(j, i))
}
