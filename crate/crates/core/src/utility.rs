//! Two-valued pairwise utilities and the utility forms built from them.
//!
//! The table keeps separate values for each ordered pair `(i, j)` under both
//! relation signs, so one model can score the same pair as a friend in one
//! environment and as an adversary in another. Entries that were never set
//! take the default fixture: favorable 1, unfavorable 0.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::environment::{CountryId, Environment, Relation};
use crate::error::{Error, Result};
use crate::mechanics::{states, State, StrategyMatrix};
use crate::rational::Rational;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum UtilityForm {
    /// Unsafe: `t_ii(0)`; otherwise the favorable values of every favorable
    /// neighbor, self included.
    Basic,
    /// Like `Basic`, but adversary terms only count once every friend is
    /// favorable.
    FriendsFirst,
    /// Unsafe: `t_ii(0)`; otherwise `t_ii(1)` plus the realized value of every
    /// neighbor, favorable or not.
    #[default]
    Additive,
}

impl UtilityForm {
    pub fn as_str(self) -> &'static str {
        match self {
            UtilityForm::Basic => "basic",
            UtilityForm::FriendsFirst => "friends-first",
            UtilityForm::Additive => "additive",
        }
    }
}

impl fmt::Display for UtilityForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for UtilityForm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "basic" => Ok(UtilityForm::Basic),
            "friends-first" => Ok(UtilityForm::FriendsFirst),
            "additive" => Ok(UtilityForm::Additive),
            other => Err(Error::InvalidParameter(format!(
                "unknown utility form `{other}`"
            ))),
        }
    }
}

/// `(t(1), t(0))` for one pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairValues {
    pub favorable: Rational,
    pub unfavorable: Rational,
}

impl PairValues {
    pub fn new(favorable: Rational, unfavorable: Rational) -> Self {
        PairValues {
            favorable,
            unfavorable,
        }
    }

    pub fn default_fixture() -> Self {
        PairValues::new(Rational::one(), Rational::zero())
    }

    fn check(&self, location: impl FnOnce() -> String) -> Result<()> {
        if self.favorable < self.unfavorable {
            return Err(Error::UtilityOrder {
                location: location(),
                favorable: self.favorable.clone(),
                unfavorable: self.unfavorable.clone(),
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct Slot {
    values: PairValues,
    explicit: bool,
}

impl Default for Slot {
    fn default() -> Self {
        Slot {
            values: PairValues::default_fixture(),
            explicit: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairwiseTable {
    n: usize,
    own: Vec<Slot>,
    friend: Vec<Slot>,
    adversary: Vec<Slot>,
}

impl PairwiseTable {
    /// All entries at the default fixture.
    pub fn new(n: usize) -> Self {
        PairwiseTable {
            n,
            own: vec![Slot::default(); n],
            friend: vec![Slot::default(); n * n],
            adversary: vec![Slot::default(); n * n],
        }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    fn check_id(&self, id: CountryId) -> Result<()> {
        if id.0 < self.n {
            Ok(())
        } else {
            Err(Error::UnknownCountry(id.0))
        }
    }

    /// `t_ii(1)` (survive) and `t_ii(0)` (fail).
    pub fn own(&self, i: CountryId) -> &PairValues {
        &self.own[i.0].values
    }

    pub fn set_own(&mut self, i: CountryId, values: PairValues) -> Result<()> {
        self.check_id(i)?;
        values.check(|| format!("self value of country {}", i.0))?;
        self.own[i.0] = Slot {
            values,
            explicit: true,
        };
        Ok(())
    }

    /// `t_ij^F` or `t_ij^A` depending on `sign`.
    pub fn pair(&self, i: CountryId, j: CountryId, sign: Relation) -> &PairValues {
        let slot = i.0 * self.n + j.0;
        match sign {
            Relation::Friend => &self.friend[slot].values,
            Relation::Adversary => &self.adversary[slot].values,
        }
    }

    pub fn set_pair(
        &mut self,
        i: CountryId,
        j: CountryId,
        sign: Relation,
        values: PairValues,
    ) -> Result<()> {
        self.check_id(i)?;
        self.check_id(j)?;
        if i == j {
            return Err(Error::SameCountry);
        }
        values.check(|| format!("pair ({}, {}) as {}", i.0, j.0, sign.as_str()))?;
        let slot = i.0 * self.n + j.0;
        let target = match sign {
            Relation::Friend => &mut self.friend[slot],
            Relation::Adversary => &mut self.adversary[slot],
        };
        *target = Slot {
            values,
            explicit: true,
        };
        Ok(())
    }

    /// Explicitly set entries, `(i, j, sign, values)`, in index order.
    pub fn explicit_pairs(&self) -> Vec<(CountryId, CountryId, Relation, &PairValues)> {
        let mut out = Vec::new();
        for i in 0..self.n {
            for j in 0..self.n {
                for (sign, slots) in [
                    (Relation::Friend, &self.friend),
                    (Relation::Adversary, &self.adversary),
                ] {
                    let slot = &slots[i * self.n + j];
                    if slot.explicit {
                        out.push((CountryId(i), CountryId(j), sign, &slot.values));
                    }
                }
            }
        }
        out
    }

    pub fn explicit_own(&self) -> Vec<(CountryId, &PairValues)> {
        self.own
            .iter()
            .enumerate()
            .filter(|(_, s)| s.explicit)
            .map(|(i, s)| (CountryId(i), &s.values))
            .collect()
    }

    /// Reorders countries so that new id `k` is old id `order[k]`.
    pub fn permuted(&self, order: &[usize]) -> Self {
        let n = self.n;
        let mut out = PairwiseTable::new(n);
        for (new_i, &old_i) in order.iter().enumerate() {
            out.own[new_i] = self.own[old_i].clone();
            for (new_j, &old_j) in order.iter().enumerate() {
                out.friend[new_i * n + new_j] = self.friend[old_i * n + old_j].clone();
                out.adversary[new_i * n + new_j] = self.adversary[old_i * n + old_j].clone();
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UtilityModel {
    pub table: PairwiseTable,
    pub form: UtilityForm,
}

impl UtilityModel {
    pub fn new(table: PairwiseTable, form: UtilityForm) -> Self {
        UtilityModel { table, form }
    }

    /// Default fixture (`t(1) = 1`, `t(0) = 0` everywhere), additive form.
    pub fn default_for(env: &Environment) -> Self {
        UtilityModel::new(PairwiseTable::new(env.len()), UtilityForm::Additive)
    }

    pub fn with_form(mut self, form: UtilityForm) -> Self {
        self.form = form;
        self
    }

    pub fn ensure_env(&self, env: &Environment) -> Result<()> {
        if self.table.len() == env.len() {
            Ok(())
        } else {
            Err(Error::ModelMismatch {
                model: self.table.len(),
                environment: env.len(),
            })
        }
    }

    /// Payoff description of country `i` in `env`, neighbors in id order.
    pub(crate) fn payoff(&self, env: &Environment, i: CountryId) -> CountryPayoff<Rational> {
        let own = self.table.own(i);
        CountryPayoff {
            survive: own.favorable.clone(),
            fail: own.unfavorable.clone(),
            friends: env
                .proper_friends(i)
                .into_iter()
                .map(|j| {
                    let v = self.table.pair(i, j, Relation::Friend);
                    (v.favorable.clone(), v.unfavorable.clone())
                })
                .collect(),
            adversaries: env
                .adversaries(i)
                .into_iter()
                .map(|j| {
                    let v = self.table.pair(i, j, Relation::Adversary);
                    (v.favorable.clone(), v.unfavorable.clone())
                })
                .collect(),
        }
    }
}

/// Numeric type utilities are computed in.
pub(crate) trait Payoff:
    Clone + Ord + Zero + std::ops::Add<Output = Self> + Send + Sync
{
}

impl<T: Clone + Ord + Zero + std::ops::Add<Output = T> + Send + Sync> Payoff for T {}

/// One country's utility parameters with neighbors indexed by position:
/// bit `k` of a friend mask refers to `friends[k]`.
#[derive(Debug, Clone)]
pub(crate) struct CountryPayoff<W> {
    pub survive: W,
    pub fail: W,
    pub friends: Vec<(W, W)>,
    pub adversaries: Vec<(W, W)>,
}

impl<W: Payoff> CountryPayoff<W> {
    pub fn all_friends_mask(&self) -> u64 {
        low_bits(self.friends.len())
    }

    pub fn all_adversaries_mask(&self) -> u64 {
        low_bits(self.adversaries.len())
    }

    /// Utility given own survival and the masks of favorable neighbors.
    pub fn value(
        &self,
        form: UtilityForm,
        survived: bool,
        friend_mask: u64,
        adversary_mask: u64,
    ) -> W {
        if !survived {
            return self.fail.clone();
        }
        let favorable_sum = |terms: &[(W, W)], mask: u64| {
            terms
                .iter()
                .enumerate()
                .filter(|(k, _)| mask >> k & 1 == 1)
                .fold(W::zero(), |acc, (_, (fav, _))| acc + fav.clone())
        };
        match form {
            UtilityForm::Basic => {
                self.survive.clone()
                    + favorable_sum(&self.friends, friend_mask)
                    + favorable_sum(&self.adversaries, adversary_mask)
            }
            UtilityForm::FriendsFirst => {
                // top tier needs F¹_i = F_i; a single unfavorable friend drops
                // the adversary terms (middle tier)
                let friends = self.survive.clone() + favorable_sum(&self.friends, friend_mask);
                if friend_mask == self.all_friends_mask() {
                    friends + favorable_sum(&self.adversaries, adversary_mask)
                } else {
                    friends
                }
            }
            UtilityForm::Additive => {
                let realized = |terms: &[(W, W)], mask: u64| {
                    terms
                        .iter()
                        .enumerate()
                        .fold(W::zero(), |acc, (k, (fav, unfav))| {
                            acc + if mask >> k & 1 == 1 {
                                fav.clone()
                            } else {
                                unfav.clone()
                            }
                        })
                };
                self.survive.clone()
                    + realized(&self.friends, friend_mask)
                    + realized(&self.adversaries, adversary_mask)
            }
        }
    }

    /// Largest value attainable over all survival outcomes and neighbor masks.
    /// `None` when the neighborhood is too large to enumerate.
    pub fn ceiling(&self, form: UtilityForm) -> Option<W> {
        let bits = self.friends.len() + self.adversaries.len();
        if bits > 20 {
            return None;
        }
        let mut best = self.fail.clone();
        for fm in 0..=self.all_friends_mask() {
            for am in 0..=self.all_adversaries_mask() {
                let v = self.value(form, true, fm, am);
                if v > best {
                    best = v;
                }
            }
        }
        Some(best)
    }
}

pub(crate) fn low_bits(count: usize) -> u64 {
    if count >= 64 {
        u64::MAX
    } else {
        (1u64 << count) - 1
    }
}

fn neighbor_sign(env: &Environment, i: CountryId, j: CountryId) -> Result<Relation> {
    env.check(i)?;
    env.check(j)?;
    if i == j {
        return Err(Error::SameCountry);
    }
    env.relation(i, j).ok_or_else(|| {
        Error::InvalidParameter(format!(
            "`{}` is neither a friend nor an adversary of `{}`",
            env.label(j),
            env.label(i)
        ))
    })
}

/// The value `i` receives from neighbor `j` in state `x_j`. A friend is
/// favorable when it survives; an adversary when it is unsafe or precarious.
pub fn realized_pairwise(
    env: &Environment,
    model: &UtilityModel,
    i: CountryId,
    j: CountryId,
    x_j: State,
) -> Result<Rational> {
    model.ensure_env(env)?;
    let sign = neighbor_sign(env, i, j)?;
    let values = model.table.pair(i, j, sign);
    let favorable = match sign {
        Relation::Friend => x_j.survives(),
        Relation::Adversary => x_j.is_down(),
    };
    Ok(if favorable {
        values.favorable.clone()
    } else {
        values.unfavorable.clone()
    })
}

/// `(F¹_i(U), A¹_i(U))`.
pub fn favorable_sets(
    env: &Environment,
    u: &StrategyMatrix,
    i: CountryId,
) -> Result<(BTreeSet<CountryId>, BTreeSet<CountryId>)> {
    let friends = env.friends_of(i)?;
    let adversaries = env.adversaries_of(i)?;
    let x = states(env, u)?;
    Ok((
        friends.into_iter().filter(|j| x[j.0].survives()).collect(),
        adversaries
            .into_iter()
            .filter(|j| x[j.0].is_down())
            .collect(),
    ))
}

pub(crate) fn masks_from_states(env: &Environment, i: CountryId, x: &[State]) -> (u64, u64) {
    let mut fm = 0u64;
    for (k, j) in env.proper_friends(i).into_iter().enumerate() {
        if x[j.0].survives() {
            fm |= 1 << k;
        }
    }
    let mut am = 0u64;
    for (k, j) in env.adversaries(i).into_iter().enumerate() {
        if x[j.0].is_down() {
            am |= 1 << k;
        }
    }
    (fm, am)
}

pub(crate) fn check_degree(env: &Environment) -> Result<()> {
    for i in env.ids() {
        let degree = env.proper_friends(i).len().max(env.adversaries(i).len());
        if degree > 63 {
            return Err(Error::TooManyNeighbors {
                label: env.label(i).to_string(),
                degree,
            });
        }
    }
    Ok(())
}

/// `f_i(U)` under the model's form.
pub fn total_utility(
    env: &Environment,
    model: &UtilityModel,
    u: &StrategyMatrix,
    i: CountryId,
) -> Result<Rational> {
    env.check(i)?;
    model.ensure_env(env)?;
    check_degree(env)?;
    let x = states(env, u)?;
    let (fm, am) = masks_from_states(env, i, &x);
    Ok(model
        .payoff(env, i)
        .value(model.form, x[i.0].survives(), fm, am))
}

/// `Σ_i f_i(U)`.
pub fn total_welfare(
    env: &Environment,
    model: &UtilityModel,
    u: &StrategyMatrix,
) -> Result<Rational> {
    model.ensure_env(env)?;
    check_degree(env)?;
    let x = states(env, u)?;
    Ok(env.ids().fold(Rational::zero(), |acc, i| {
        let (fm, am) = masks_from_states(env, i, &x);
        acc + model
            .payoff(env, i)
            .value(model.form, x[i.0].survives(), fm, am)
    }))
}
