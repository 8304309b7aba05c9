//! Optimal welfare, paradox detection, the survival / necessary-condition
//! checks, the paradox-producing environment constructions, the survivor
//! probe, and the price of anarchy with its analytic bounds.

use std::collections::BTreeSet;

use num_traits::{One, Signed, Zero};

use crate::environment::{Country, CountryId, Environment, Relation};
use crate::equilibrium::{GridGame, GridOptions};
use crate::error::{Error, Result};
use crate::game::unscale;
use crate::mechanics::{states, StrategyMatrix};
use crate::rational::Rational;
use crate::utility::UtilityModel;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum WelfareMode {
    /// Maximum over the grid equilibria.
    #[default]
    OverEquilibria,
    /// Maximum over every grid matrix.
    OverAllMatrices,
}

impl WelfareMode {
    pub fn as_str(self) -> &'static str {
        match self {
            WelfareMode::OverEquilibria => "over-equilibria",
            WelfareMode::OverAllMatrices => "over-all-matrices",
        }
    }
}

fn max_opt(a: Option<i128>, b: Option<i128>) -> Option<i128> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.max(y)),
        (x, None) => x,
        (None, y) => y,
    }
}

fn min_opt(a: Option<i128>, b: Option<i128>) -> Option<i128> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.min(y)),
        (x, None) => x,
        (None, y) => y,
    }
}

/// `f*_i`: the best utility `i` attains over the grid equilibria or over all
/// grid matrices.
pub fn optimal_welfare(
    env: &Environment,
    model: &UtilityModel,
    i: CountryId,
    mode: WelfareMode,
    options: &GridOptions,
) -> Result<Rational> {
    env.check(i)?;
    let gg = GridGame::new(env, model, options)?;
    let step = |acc: &mut Option<i128>, snap: &crate::grid::Snapshot| {
        *acc = max_opt(*acc, Some(gg.game.utility(i.0, &snap.states)));
    };
    let best = match mode {
        WelfareMode::OverEquilibria => gg.scan_equilibria(|| None, step, max_opt)?,
        WelfareMode::OverAllMatrices => gg.scan(|| None, step, max_opt)?,
    };
    best.map(|v| unscale(v, &gg.scale))
        .ok_or(Error::NoGridEquilibria {
            denominator: options.denominator,
        })
}

/// Checks that `large` extends `small` only by new friends of `i` and returns
/// those new friends.
pub fn validate_friend_extension(
    small: &Environment,
    large: &Environment,
    i: CountryId,
) -> Result<Vec<CountryId>> {
    small.check(i)?;
    if small.countries() != large.countries() {
        return Err(Error::EnvironmentPair(
            "the environments must list the same countries with the same powers".into(),
        ));
    }
    let mut gained = Vec::new();
    let mut problems = Vec::new();
    for (a, b, before, after) in small.relation_diff(large) {
        let describe = |r: Option<Relation>| r.map_or("none", Relation::as_str);
        let pair = format!(
            "({}, {}): {} -> {}",
            small.label(a),
            small.label(b),
            describe(before),
            describe(after)
        );
        if a != i && b != i {
            problems.push(format!("{pair} does not involve `{}`", small.label(i)));
        } else if after != Some(Relation::Friend) {
            problems.push(format!("{pair} is not a new friendship"));
        } else {
            gained.push(if a == i { b } else { a });
        }
    }
    if !problems.is_empty() {
        return Err(Error::EnvironmentPair(problems.join("; ")));
    }
    if gained.is_empty() {
        return Err(Error::EnvironmentPair(format!(
            "`{}` has the same friends in both environments",
            small.label(i)
        )));
    }
    Ok(gained)
}

/// Models must share the form and every value used by a relation common to
/// both environments.
pub fn validate_model_pair(
    small: &Environment,
    large: &Environment,
    model_small: &UtilityModel,
    model_large: &UtilityModel,
) -> Result<()> {
    model_small.ensure_env(small)?;
    model_large.ensure_env(large)?;
    if model_small.form != model_large.form {
        return Err(Error::ModelPair(format!(
            "forms differ ({} vs {})",
            model_small.form, model_large.form
        )));
    }
    for a in small.ids() {
        if model_small.table.own(a) != model_large.table.own(a) {
            return Err(Error::ModelPair(format!(
                "self values of `{}` differ",
                small.label(a)
            )));
        }
        for b in small.ids().filter(|&b| b != a) {
            let (Some(before), Some(after)) = (small.relation(a, b), large.relation(a, b)) else {
                continue;
            };
            if before == after
                && model_small.table.pair(a, b, before) != model_large.table.pair(a, b, after)
            {
                return Err(Error::ModelPair(format!(
                    "values of `{}` for `{}` as {} differ",
                    small.label(a),
                    small.label(b),
                    before.as_str()
                )));
            }
        }
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParadoxReport {
    pub country: CountryId,
    /// Fewer friends for `country`.
    pub env_small: Environment,
    pub env_large: Environment,
    pub welfare_small: Rational,
    pub welfare_large: Rational,
    pub paradox: bool,
    pub mode: WelfareMode,
    pub grid_denominator: u64,
}

/// Compares `f*_i` in the environment with fewer friends against the one with
/// more; the paradox is a strictly higher value with fewer friends.
pub fn detect_paradox(
    env_small: &Environment,
    env_large: &Environment,
    model_small: &UtilityModel,
    model_large: &UtilityModel,
    i: CountryId,
    mode: WelfareMode,
    options: &GridOptions,
) -> Result<ParadoxReport> {
    validate_friend_extension(env_small, env_large, i)?;
    validate_model_pair(env_small, env_large, model_small, model_large)?;
    let welfare_small = optimal_welfare(env_small, model_small, i, mode, options)?;
    let welfare_large = optimal_welfare(env_large, model_large, i, mode, options)?;
    Ok(ParadoxReport {
        country: i,
        env_small: env_small.clone(),
        env_large: env_large.clone(),
        paradox: welfare_small > welfare_large,
        welfare_small,
        welfare_large,
        mode,
        grid_denominator: options.denominator,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SurvivalReport {
    pub country: CountryId,
    pub equilibria_small: usize,
    pub equilibria_large: usize,
    /// `country` survives in every grid equilibrium with fewer friends.
    pub survives_small: bool,
    pub survives_large: bool,
    pub implication_holds: bool,
    /// An equilibrium with more friends where `country` is unsafe although it
    /// survives every equilibrium with fewer friends.
    pub counterexample: Option<StrategyMatrix>,
}

struct SurvivalScan {
    equilibria: usize,
    first_failure: Option<Vec<i64>>,
}

fn survival_scan(
    env: &Environment,
    model: &UtilityModel,
    i: CountryId,
    options: &GridOptions,
) -> Result<(SurvivalScan, GridGame)> {
    let gg = GridGame::new(env, model, options)?;
    let scan = gg.scan_equilibria(
        || SurvivalScan {
            equilibria: 0,
            first_failure: None,
        },
        |acc, snap| {
            acc.equilibria += 1;
            if acc.first_failure.is_none() && !snap.states[i.0].survives() {
                acc.first_failure = Some(snap.matrix.clone());
            }
        },
        |a, b| SurvivalScan {
            equilibria: a.equilibria + b.equilibria,
            first_failure: a.first_failure.or(b.first_failure),
        },
    )?;
    if scan.equilibria == 0 {
        return Err(Error::NoGridEquilibria {
            denominator: options.denominator,
        });
    }
    Ok((scan, gg))
}

/// If `i` survives in every grid equilibrium with fewer friends, it must
/// survive in every grid equilibrium with more.
pub fn check_survival_transfer(
    env_small: &Environment,
    env_large: &Environment,
    model: &UtilityModel,
    i: CountryId,
    options: &GridOptions,
) -> Result<SurvivalReport> {
    validate_friend_extension(env_small, env_large, i)?;
    let (small, _) = survival_scan(env_small, model, i, options)?;
    let (large, gg_large) = survival_scan(env_large, model, i, options)?;
    let survives_small = small.first_failure.is_none();
    let survives_large = large.first_failure.is_none();
    let implication_holds = !survives_small || survives_large;
    Ok(SurvivalReport {
        country: i,
        equilibria_small: small.equilibria,
        equilibria_large: large.equilibria,
        survives_small,
        survives_large,
        implication_holds,
        counterexample: if implication_holds {
            None
        } else {
            large.first_failure.map(|m| gg_large.to_matrix(&m))
        },
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NecessaryCondition {
    pub holds: bool,
    /// Every `j ≠ i` with `t_ij^F(0) < t_ij^A(1)`.
    pub witnesses: Vec<CountryId>,
}

pub fn check_necessary_condition(model: &UtilityModel, i: CountryId) -> Result<NecessaryCondition> {
    let n = model.table.len();
    if i.0 >= n {
        return Err(Error::UnknownCountry(i.0));
    }
    let witnesses: Vec<CountryId> = (0..n)
        .map(CountryId)
        .filter(|&j| j != i)
        .filter(|&j| {
            model.table.pair(i, j, Relation::Friend).unfavorable
                < model.table.pair(i, j, Relation::Adversary).favorable
        })
        .collect();
    Ok(NecessaryCondition {
        holds: !witnesses.is_empty(),
        witnesses,
    })
}

/// How members of the target set relate to each other in a constructed pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SubsetRelations {
    /// Every country other than `i` is an adversary of each target, other
    /// targets included.
    #[default]
    Adversarial,
    /// Targets have no relation among themselves.
    Unrelated,
}

/// Two environments differing only in how `i` relates to the targets.
#[derive(Debug, Clone, PartialEq)]
pub struct ConstructedPair {
    /// `i` is a friend of everyone, targets included.
    pub more_friends: Environment,
    /// `i` is an adversary of every target.
    pub fewer_friends: Environment,
    pub country: CountryId,
    pub targets: BTreeSet<CountryId>,
}

fn labelled_countries(powers: &[Rational]) -> Vec<Country> {
    powers
        .iter()
        .enumerate()
        .map(|(k, p)| Country::new((k + 1).to_string(), p.clone()))
        .collect()
}

/// Builds the target-set construction: every country other than `i` is an
/// adversary of every target, `i` befriends every non-target, and `i`
/// befriends (`more_friends`) or opposes (`fewer_friends`) the targets.
pub fn construct_target_pair(
    powers: &[Rational],
    i: CountryId,
    targets: &BTreeSet<CountryId>,
    relations: SubsetRelations,
) -> Result<ConstructedPair> {
    let n = powers.len();
    if n < 3 {
        return Err(Error::InvalidParameter(format!(
            "need at least 3 countries, got {n}"
        )));
    }
    let in_range = |c: CountryId| {
        if c.0 < n {
            Ok(())
        } else {
            Err(Error::UnknownCountry(c.0))
        }
    };
    in_range(i)?;
    for &t in targets {
        in_range(t)?;
    }
    if targets.is_empty() {
        return Err(Error::InvalidParameter("the target set is empty".into()));
    }
    if targets.contains(&i) {
        return Err(Error::InvalidParameter(
            "the country may not be one of its own targets".into(),
        ));
    }
    if powers.iter().any(Signed::is_negative) {
        return Err(Error::InvalidParameter("powers must be nonnegative".into()));
    }
    let lhs = targets
        .iter()
        .fold(powers[i.0].clone(), |acc, t| acc + &powers[t.0]);
    let rhs = (0..n)
        .filter(|&k| k != i.0 && !targets.contains(&CountryId(k)))
        .fold(Rational::zero(), |acc, k| acc + &powers[k]);
    if lhs > rhs {
        return Err(Error::PowerCondition { lhs, rhs });
    }

    let build = |i_to_targets: Relation| -> Result<Environment> {
        let mut rel = Vec::new();
        for a in 0..n {
            for b in a + 1..n {
                let (ca, cb) = (CountryId(a), CountryId(b));
                let (ta, tb) = (targets.contains(&ca), targets.contains(&cb));
                let sign = if a == i.0 || b == i.0 {
                    Some(if ta || tb {
                        i_to_targets
                    } else {
                        Relation::Friend
                    })
                } else if ta && tb {
                    match relations {
                        SubsetRelations::Adversarial => Some(Relation::Adversary),
                        SubsetRelations::Unrelated => None,
                    }
                } else if ta || tb {
                    Some(Relation::Adversary)
                } else {
                    None
                };
                if let Some(s) = sign {
                    rel.push((ca, cb, s));
                }
            }
        }
        Environment::new(labelled_countries(powers), rel)
    };
    Ok(ConstructedPair {
        more_friends: build(Relation::Friend)?,
        fewer_friends: build(Relation::Adversary)?,
        country: i,
        targets: targets.clone(),
    })
}

/// The single-target case: requires `p_i + p_j ≤ Σ_{k∉{i,j}} p_k`.
pub fn construct_single_target_pair(
    powers: &[Rational],
    i: CountryId,
    j: CountryId,
) -> Result<ConstructedPair> {
    if i == j {
        return Err(Error::SameCountry);
    }
    construct_target_pair(
        powers,
        i,
        &[j].into_iter().collect(),
        SubsetRelations::Adversarial,
    )
}

/// True iff some country is safe or precarious under `u`.
pub fn someone_survives(env: &Environment, u: &StrategyMatrix) -> Result<bool> {
    Ok(states(env, u)?.iter().any(|x| x.survives()))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WelfareBounds {
    pub lower: Rational,
    pub upper: Rational,
    pub a: Rational,
    pub b: Rational,
}

/// `1 ≤ PoA ≤ A/B` with `A = n·max_i(Σ_{F_i} t^F(1) + Σ_{A_i} t^A(1))` (the
/// friend sum includes `t_ii(1)`) and `B = (n−1)·min t_ii(0) + min t_ii(1)`.
pub fn welfare_bounds(env: &Environment, model: &UtilityModel) -> Result<WelfareBounds> {
    model.ensure_env(env)?;
    if env.is_empty() {
        return Err(Error::InvalidParameter("empty environment".into()));
    }
    let n = Rational::from_integer(env.len().into());
    let best_sum = env
        .ids()
        .map(|i| {
            let own = model.table.own(i).favorable.clone();
            let friends = env.proper_friends(i).into_iter().fold(own, |acc, j| {
                acc + &model.table.pair(i, j, Relation::Friend).favorable
            });
            env.adversaries(i).into_iter().fold(friends, |acc, j| {
                acc + &model.table.pair(i, j, Relation::Adversary).favorable
            })
        })
        .max()
        .expect("nonempty");
    let min_fail = env
        .ids()
        .map(|i| model.table.own(i).unfavorable.clone())
        .min()
        .expect("nonempty");
    let min_survive = env
        .ids()
        .map(|i| model.table.own(i).favorable.clone())
        .min()
        .expect("nonempty");
    let a = &n * best_sum;
    let b = (&n - Rational::one()) * min_fail + min_survive;
    if !b.is_positive() {
        return Err(Error::BoundsUndefined { b });
    }
    Ok(WelfareBounds {
        lower: Rational::one(),
        upper: &a / &b,
        a,
        b,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct PoAReport {
    pub max_welfare: Rational,
    pub min_equilibrium_welfare: Rational,
    /// `None` when the minimum equilibrium welfare is not positive.
    pub poa: Option<Rational>,
    pub bounds: Option<WelfareBounds>,
    /// Whether `1 ≤ poa ≤ A/B`; `None` when either side is undefined.
    pub within_bounds: Option<bool>,
    pub equilibria: usize,
    pub grid_denominator: u64,
}

#[derive(Default)]
struct WelfareScan {
    max_all: Option<i128>,
    min_equilibrium: Option<i128>,
    equilibria: usize,
}

/// Maximum grid welfare over minimum grid-equilibrium welfare.
pub fn price_of_anarchy(
    env: &Environment,
    model: &UtilityModel,
    options: &GridOptions,
) -> Result<PoAReport> {
    let gg = GridGame::new(env, model, options)?;
    let scan = gg.scan(
        WelfareScan::default,
        |acc, snap| {
            let w = gg.game.welfare(&snap.states);
            acc.max_all = max_opt(acc.max_all, Some(w));
            if gg.is_equilibrium(snap) {
                acc.equilibria += 1;
                acc.min_equilibrium = min_opt(acc.min_equilibrium, Some(w));
            }
        },
        |a, b| WelfareScan {
            max_all: max_opt(a.max_all, b.max_all),
            min_equilibrium: min_opt(a.min_equilibrium, b.min_equilibrium),
            equilibria: a.equilibria + b.equilibria,
        },
    )?;
    let min_eq = scan.min_equilibrium.ok_or(Error::NoGridEquilibria {
        denominator: options.denominator,
    })?;
    let max_welfare = unscale(scan.max_all.expect("the grid is never empty"), &gg.scale);
    let min_equilibrium_welfare = unscale(min_eq, &gg.scale);
    let poa = min_equilibrium_welfare
        .is_positive()
        .then(|| &max_welfare / &min_equilibrium_welfare);
    let bounds = welfare_bounds(env, model).ok();
    let within_bounds = match (&poa, &bounds) {
        (Some(p), Some(b)) => Some(*p >= b.lower && *p <= b.upper),
        _ => None,
    };
    Ok(PoAReport {
        max_welfare,
        min_equilibrium_welfare,
        poa,
        bounds,
        within_bounds,
        equilibria: scan.equilibria,
        grid_denominator: options.denominator,
    })
}
