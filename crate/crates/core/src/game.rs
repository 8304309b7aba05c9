//! Compiled form of an (environment, utility model) pair.
//!
//! The same routines run over exact rationals for one-off evaluations and over
//! scaled integers during grid scans: at grid denominator `d` every allocation
//! is `k / d`, so multiplying by `d` keeps all support, threat and cost
//! arithmetic in `i64`, and utilities are scaled to `i128` by the common
//! denominator of the table.

use std::ops::{Add, Sub};

use num_bigint::BigInt;
use num_traits::Zero;

use crate::environment::{CountryId, Environment};
use crate::error::{Error, Result};
use crate::mechanics::State;
use crate::rational::{common_denominator, scaled_i128, scaled_i64, Rational};
use crate::utility::{check_degree, low_bits, CountryPayoff, Payoff, UtilityForm, UtilityModel};

pub(crate) trait Amount:
    Clone + Ord + Zero + Add<Output = Self> + Sub<Output = Self> + Send + Sync
{
}

impl<T: Clone + Ord + Zero + Add<Output = T> + Sub<Output = T> + Send + Sync> Amount for T {}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EquilibriumConcept {
    /// No unilateral deviation strictly raises the deviator's utility.
    #[default]
    Utility,
    /// No unsafe country can deviate to a surviving state.
    StrongPreference,
}

/// One optimal way for a country to play: which neighbors end up favorable,
/// whether it survives, and the cheapest row realizing that.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct ResponseOption<Q> {
    pub survives: bool,
    pub friend_mask: u64,
    pub adversary_mask: u64,
    pub row: Vec<Q>,
}

#[derive(Debug, Clone)]
pub(crate) struct Response<Q, W> {
    pub value: W,
    /// Optimal options, lexicographically smallest row first.
    pub options: Vec<ResponseOption<Q>>,
}

#[derive(Debug, Clone)]
pub(crate) struct Game<Q, W> {
    pub n: usize,
    pub form: UtilityForm,
    pub powers: Vec<Q>,
    pub friends: Vec<Vec<usize>>,
    pub adversaries: Vec<Vec<usize>>,
    pub columns: Vec<Vec<usize>>,
    pub payoffs: Vec<CountryPayoff<W>>,
    ceilings: Vec<Option<W>>,
}

/// Per-country quantities that stay fixed while country `i` re-optimizes.
struct Pressure<Q> {
    power: Q,
    /// Support from friends other than `i` itself.
    outside_support: Q,
    threat: Q,
    friend_costs: Vec<Q>,
    adversary_costs: Vec<Q>,
}

impl<Q: Amount, W: Payoff> Game<Q, W> {
    fn build(
        env: &Environment,
        model: &UtilityModel,
        powers: Vec<Q>,
        payoffs: Vec<CountryPayoff<W>>,
    ) -> Self {
        let ids: Vec<CountryId> = env.ids().collect();
        let ceilings = payoffs.iter().map(|p| p.ceiling(model.form)).collect();
        Game {
            n: env.len(),
            form: model.form,
            powers,
            friends: ids
                .iter()
                .map(|&i| env.proper_friends(i).iter().map(|c| c.0).collect())
                .collect(),
            adversaries: ids
                .iter()
                .map(|&i| env.adversaries(i).iter().map(|c| c.0).collect())
                .collect(),
            columns: ids
                .iter()
                .map(|&i| env.allowed_columns(i).iter().map(|c| c.0).collect())
                .collect(),
            payoffs,
            ceilings,
        }
    }

    pub fn support_threat(&self, m: &[Q], sigma: &mut Vec<Q>, tau: &mut Vec<Q>) {
        let n = self.n;
        sigma.clear();
        tau.clear();
        for i in 0..n {
            let mut s = m[i * n + i].clone();
            for &f in &self.friends[i] {
                s = s + m[f * n + i].clone();
            }
            let mut t = Q::zero();
            for &a in &self.adversaries[i] {
                s = s + m[i * n + a].clone();
                t = t + m[a * n + i].clone();
            }
            sigma.push(s);
            tau.push(t);
        }
    }

    pub fn classify(sigma: &[Q], tau: &[Q], out: &mut Vec<State>) {
        out.clear();
        out.extend(sigma.iter().zip(tau).map(|(s, t)| State::classify(s, t)));
    }

    pub fn masks(&self, i: usize, states: &[State]) -> (u64, u64) {
        let mut fm = 0u64;
        for (k, &f) in self.friends[i].iter().enumerate() {
            if states[f].survives() {
                fm |= 1 << k;
            }
        }
        let mut am = 0u64;
        for (k, &a) in self.adversaries[i].iter().enumerate() {
            if states[a].is_down() {
                am |= 1 << k;
            }
        }
        (fm, am)
    }

    pub fn utility(&self, i: usize, states: &[State]) -> W {
        let (fm, am) = self.masks(i, states);
        self.payoffs[i].value(self.form, states[i].survives(), fm, am)
    }

    pub fn welfare(&self, states: &[State]) -> W {
        (0..self.n).fold(W::zero(), |acc, i| acc + self.utility(i, states))
    }

    fn pressure(&self, i: usize, m: &[Q], sigma: &[Q], tau: &[Q]) -> Pressure<Q> {
        let n = self.n;
        let mut outside_support = Q::zero();
        for &f in &self.friends[i] {
            outside_support = outside_support + m[f * n + i].clone();
        }
        // friend f is favorable once sigma_f >= tau_f; i's share of sigma_f is u_if
        let friend_costs = self.friends[i]
            .iter()
            .map(|&f| {
                let need = tau[f].clone() + m[i * n + f].clone();
                if need > sigma[f] {
                    need - sigma[f].clone()
                } else {
                    Q::zero()
                }
            })
            .collect();
        // adversary a is favorable once tau_a >= sigma_a; i's share of tau_a is u_ia
        let adversary_costs = self.adversaries[i]
            .iter()
            .map(|&a| {
                let need = sigma[a].clone() + m[i * n + a].clone();
                if need > tau[a] {
                    need - tau[a].clone()
                } else {
                    Q::zero()
                }
            })
            .collect();
        Pressure {
            power: self.powers[i].clone(),
            outside_support,
            threat: tau[i].clone(),
            friend_costs,
            adversary_costs,
        }
    }

    /// Visits every distinct outcome country `i` can reach with the others'
    /// rows fixed, as `(survives, friend_mask, adversary_mask, spent_on_friends, spent_on_adversaries)`.
    /// Unsafe outcomes are reported once with empty masks, since the utility
    /// of an unsafe country ignores its neighbors.
    fn for_each_outcome(
        &self,
        pressure: &Pressure<Q>,
        mut visit: impl FnMut(bool, u64, u64, &[usize], &[usize]),
    ) {
        let positive = |costs: &[Q]| -> (u64, Vec<usize>) {
            let mut free = 0u64;
            let mut paid = Vec::new();
            for (k, c) in costs.iter().enumerate() {
                if c.is_zero() {
                    free |= 1 << k;
                } else {
                    paid.push(k);
                }
            }
            (free, paid)
        };
        let (free_f, paid_f) = positive(&pressure.friend_costs);
        let (free_a, paid_a) = positive(&pressure.adversary_costs);

        let mut chosen_f = Vec::with_capacity(paid_f.len());
        let mut chosen_a = Vec::with_capacity(paid_a.len());
        for sub_f in 0..=low_bits(paid_f.len()) {
            chosen_f.clear();
            let mut spend_f = Q::zero();
            let mut mask_f = free_f;
            for (bit, &k) in paid_f.iter().enumerate() {
                if sub_f >> bit & 1 == 1 {
                    spend_f = spend_f + pressure.friend_costs[k].clone();
                    mask_f |= 1 << k;
                    chosen_f.push(k);
                }
            }
            if spend_f > pressure.power {
                continue;
            }
            // friend spending is the only part of i's row that does not count
            // toward sigma_i
            let survives = pressure.outside_support.clone() + pressure.power.clone()
                >= pressure.threat.clone() + spend_f.clone();
            for sub_a in 0..=low_bits(paid_a.len()) {
                chosen_a.clear();
                let mut spend = spend_f.clone();
                let mut mask_a = free_a;
                for (bit, &k) in paid_a.iter().enumerate() {
                    if sub_a >> bit & 1 == 1 {
                        spend = spend + pressure.adversary_costs[k].clone();
                        mask_a |= 1 << k;
                        chosen_a.push(k);
                    }
                }
                if spend > pressure.power {
                    continue;
                }
                if survives {
                    visit(true, mask_f, mask_a, &chosen_f, &chosen_a);
                } else {
                    visit(false, 0, 0, &chosen_f, &chosen_a);
                }
            }
        }
    }

    /// Whether `i` can end up unsafe by pushing all its power to a friend.
    fn can_fail(&self, i: usize, pressure: &Pressure<Q>) -> bool {
        let lowest_support = if self.friends[i].is_empty() {
            pressure.outside_support.clone() + pressure.power.clone()
        } else {
            pressure.outside_support.clone()
        };
        lowest_support < pressure.threat
    }

    /// Best utility `i` can reach against the other rows of `m`.
    pub fn best_value(&self, i: usize, m: &[Q], sigma: &[Q], tau: &[Q]) -> W {
        let pressure = self.pressure(i, m, sigma, tau);
        let payoff = &self.payoffs[i];
        let mut best: Option<W> = self.can_fail(i, &pressure).then(|| payoff.fail.clone());
        self.for_each_outcome(&pressure, |survives, fm, am, _, _| {
            let v = payoff.value(self.form, survives, fm, am);
            if best.as_ref().is_none_or(|b| v > *b) {
                best = Some(v);
            }
        });
        best.expect("keeping everything at home is always feasible")
    }

    /// Best value together with every optimal outcome and its witness row.
    pub fn best_response(&self, i: usize, m: &[Q], sigma: &[Q], tau: &[Q]) -> Response<Q, W> {
        let pressure = self.pressure(i, m, sigma, tau);
        let payoff = &self.payoffs[i];
        let mut candidates: Vec<(W, ResponseOption<Q>)> = Vec::new();
        if self.can_fail(i, &pressure) {
            let mut row = vec![Q::zero(); self.n];
            match self.friends[i].first() {
                Some(&f) => row[f] = pressure.power.clone(),
                None => row[i] = pressure.power.clone(),
            }
            candidates.push((
                payoff.fail.clone(),
                ResponseOption {
                    survives: false,
                    friend_mask: 0,
                    adversary_mask: 0,
                    row,
                },
            ));
        }
        self.for_each_outcome(&pressure, |survives, fm, am, chosen_f, chosen_a| {
            let mut row = vec![Q::zero(); self.n];
            let mut rest = pressure.power.clone();
            for &k in chosen_f {
                row[self.friends[i][k]] = pressure.friend_costs[k].clone();
                rest = rest - pressure.friend_costs[k].clone();
            }
            for &k in chosen_a {
                row[self.adversaries[i][k]] = pressure.adversary_costs[k].clone();
                rest = rest - pressure.adversary_costs[k].clone();
            }
            row[i] = rest;
            candidates.push((
                payoff.value(self.form, survives, fm, am),
                ResponseOption {
                    survives,
                    friend_mask: fm,
                    adversary_mask: am,
                    row,
                },
            ));
        });
        let value = candidates
            .iter()
            .map(|(v, _)| v.clone())
            .max()
            .expect("keeping everything at home is always feasible");
        let mut options: Vec<ResponseOption<Q>> = candidates
            .into_iter()
            .filter(|(v, _)| *v == value)
            .map(|(_, o)| o)
            .collect();
        options.sort_by(|a, b| a.row.cmp(&b.row));
        options.dedup_by(|a, b| a.row == b.row);
        Response { value, options }
    }

    /// Whether `i` could deviate from unsafe to surviving.
    fn can_rescue(&self, i: usize, m: &[Q], sigma: &[Q], tau: &[Q]) -> bool {
        let p = self.pressure(i, m, sigma, tau);
        p.outside_support + p.power >= p.threat
    }

    pub fn is_equilibrium(
        &self,
        concept: EquilibriumConcept,
        m: &[Q],
        sigma: &[Q],
        tau: &[Q],
        states: &[State],
    ) -> bool {
        match concept {
            EquilibriumConcept::Utility => (0..self.n).all(|i| {
                let current = self.utility(i, states);
                if self.ceilings[i].as_ref() == Some(&current) {
                    return true;
                }
                self.best_value(i, m, sigma, tau) <= current
            }),
            EquilibriumConcept::StrongPreference => {
                (0..self.n).all(|i| states[i].survives() || !self.can_rescue(i, m, sigma, tau))
            }
        }
    }
}

impl Game<Rational, Rational> {
    pub fn exact(env: &Environment, model: &UtilityModel) -> Result<Self> {
        model.ensure_env(env)?;
        check_degree(env)?;
        let payoffs = env.ids().map(|i| model.payoff(env, i)).collect();
        Ok(Self::build(
            env,
            model,
            env.powers().cloned().collect(),
            payoffs,
        ))
    }
}

impl Game<i64, i128> {
    /// Integer game at grid denominator `d`; utilities are multiplied by the
    /// returned scale.
    pub fn scaled(
        env: &Environment,
        model: &UtilityModel,
        denominator: u64,
    ) -> Result<(Self, BigInt)> {
        model.ensure_env(env)?;
        check_degree(env)?;
        if denominator == 0 {
            return Err(Error::ZeroDenominator);
        }
        let d = BigInt::from(denominator);
        let powers = env
            .ids()
            .map(|i| {
                scaled_i64(env.power(i), &d).ok_or_else(|| Error::GridNotIntegral {
                    label: env.label(i).to_string(),
                    denominator,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let exact: Vec<CountryPayoff<Rational>> = env.ids().map(|i| model.payoff(env, i)).collect();
        let scale = common_denominator(exact.iter().flat_map(|p| {
            [&p.survive, &p.fail].into_iter().chain(
                p.friends
                    .iter()
                    .chain(&p.adversaries)
                    .flat_map(|(a, b)| [a, b]),
            )
        }));
        let conv = |v: &Rational| scaled_i128(v, &scale).ok_or(Error::Overflow);
        let pair = |(a, b): &(Rational, Rational)| Ok((conv(a)?, conv(b)?));
        let payoffs = exact
            .iter()
            .map(|p| {
                Ok(CountryPayoff {
                    survive: conv(&p.survive)?,
                    fail: conv(&p.fail)?,
                    friends: p.friends.iter().map(pair).collect::<Result<_>>()?,
                    adversaries: p.adversaries.iter().map(pair).collect::<Result<_>>()?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        // sums of up to n powers and n utilities must stay in range
        let n = env.len() as i128 + 1;
        if powers.iter().any(|&p| (p as i128) * n > i64::MAX as i128)
            || payoffs.iter().any(|p| {
                [p.survive, p.fail]
                    .iter()
                    .chain(
                        p.friends
                            .iter()
                            .chain(&p.adversaries)
                            .flat_map(|(a, b)| [a, b]),
                    )
                    .any(|v| v.unsigned_abs() > (i128::MAX as u128) / (n as u128 * n as u128))
            })
        {
            return Err(Error::Overflow);
        }
        Ok((Self::build(env, model, powers, payoffs), scale))
    }
}

pub(crate) fn unscale(value: i128, scale: &BigInt) -> Rational {
    Rational::new(BigInt::from(value), scale.clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::environment::{Country, Relation};
    use crate::mechanics::StrategyMatrix;
    use crate::rational::int;

    fn example_a() -> Environment {
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

    #[test]
    fn scaled_and_exact_agree_on_states() {
        let env = example_a();
        let model = UtilityModel::default_for(&env);
        let (game, scale) = Game::scaled(&env, &model, 1).unwrap();
        assert_eq!(scale, BigInt::from(1));
        let m = vec![0, 8, 0, 6, 0, 0, 0, 0, 1];
        let (mut s, mut t, mut x) = (vec![], vec![], vec![]);
        game.support_threat(&m, &mut s, &mut t);
        Game::<i64, i128>::classify(&s, &t, &mut x);
        assert_eq!(s, vec![8, 6, 1]);
        assert_eq!(t, vec![6, 8, 0]);
        assert_eq!(x, vec![State::Safe, State::Unsafe, State::Safe]);

        let exact = Game::exact(&env, &model).unwrap();
        let u = StrategyMatrix::from_entries(
            &env,
            [
                (CountryId(0), CountryId(1), int(8)),
                (CountryId(1), CountryId(0), int(6)),
                (CountryId(2), CountryId(2), int(1)),
            ],
        )
        .unwrap();
        let (mut es, mut et, mut ex) = (vec![], vec![], vec![]);
        exact.support_threat(u.entries(), &mut es, &mut et);
        Game::<Rational, Rational>::classify(&es, &et, &mut ex);
        assert_eq!(ex, x);
    }

    #[test]
    fn rejects_non_integral_grid() {
        let env =
            Environment::new(vec![Country::new("a", crate::rational::ratio(1, 3))], []).unwrap();
        let model = UtilityModel::default_for(&env);
        assert!(matches!(
            Game::scaled(&env, &model, 2),
            Err(Error::GridNotIntegral { .. })
        ));
        assert!(Game::scaled(&env, &model, 3).is_ok());
        assert!(matches!(
            Game::scaled(&env, &model, 0),
            Err(Error::ZeroDenominator)
        ));
    }
}
