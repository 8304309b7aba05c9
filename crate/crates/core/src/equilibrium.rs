//! Best responses, the equilibrium test, grid enumeration of equilibria, and
//! best-response dynamics.
//!
//! With the other rows fixed, country `i` can make friend `j` favorable by
//! paying `max(0, τ_j − σ_j^{−i})` and adversary `j` favorable by paying
//! `max(0, σ_j − τ_j^{−i})`; anything left over goes to `u_ii`. Precarious
//! counts as favorable on both sides, so every threshold is attained exactly
//! and the continuous best response reduces to choosing subsets of neighbors
//! to pay for.

use std::collections::BTreeSet;
use std::sync::Arc;

use num_bigint::BigInt;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::environment::{CountryId, Environment};
use crate::error::Result;
pub use crate::game::EquilibriumConcept;
use crate::game::{Game, ResponseOption};
use crate::grid::{Execution, Grid, Snapshot, DEFAULT_MAX_SPACE};
use crate::mechanics::StrategyMatrix;
use crate::rational::Rational;
use crate::utility::UtilityModel;

/// Neighbors made favorable by one optimal response.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TargetSet {
    pub survives: bool,
    pub friends: BTreeSet<CountryId>,
    pub adversaries: BTreeSet<CountryId>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BestResponse {
    pub country: CountryId,
    pub value: Rational,
    /// One row per optimal target set, lexicographically smallest first.
    pub witness_rows: Vec<Vec<Rational>>,
    pub target_sets: Vec<TargetSet>,
}

impl BestResponse {
    /// The lexicographically smallest optimal row.
    pub fn canonical_row(&self) -> &[Rational] {
        &self.witness_rows[0]
    }
}

fn target_set<Q>(game: &Game<Q, impl Sized>, i: usize, option: &ResponseOption<Q>) -> TargetSet {
    let pick = |members: &[usize], mask: u64| -> BTreeSet<CountryId> {
        members
            .iter()
            .enumerate()
            .filter(|(k, _)| mask >> k & 1 == 1)
            .map(|(_, &j)| CountryId(j))
            .collect()
    };
    let mut friends = pick(&game.friends[i], option.friend_mask);
    if option.survives {
        friends.insert(CountryId(i));
    }
    TargetSet {
        survives: option.survives,
        friends,
        adversaries: pick(&game.adversaries[i], option.adversary_mask),
    }
}

/// Exact best response of `i` against the other rows of `u` (row `i` is ignored).
pub fn best_response(
    env: &Environment,
    model: &UtilityModel,
    u: &StrategyMatrix,
    i: CountryId,
) -> Result<BestResponse> {
    env.check(i)?;
    u.ensure_env(env)?;
    let game = Game::exact(env, model)?;
    let (mut sigma, mut tau) = (Vec::new(), Vec::new());
    game.support_threat(u.entries(), &mut sigma, &mut tau);
    let response = game.best_response(i.0, u.entries(), &sigma, &tau);
    Ok(BestResponse {
        country: i,
        value: response.value,
        target_sets: response
            .options
            .iter()
            .map(|o| target_set(&game, i.0, o))
            .collect(),
        witness_rows: response.options.into_iter().map(|o| o.row).collect(),
    })
}

pub fn is_equilibrium(env: &Environment, model: &UtilityModel, u: &StrategyMatrix) -> Result<bool> {
    is_equilibrium_with(env, model, u, EquilibriumConcept::Utility)
}

pub fn is_equilibrium_with(
    env: &Environment,
    model: &UtilityModel,
    u: &StrategyMatrix,
    concept: EquilibriumConcept,
) -> Result<bool> {
    u.ensure_env(env)?;
    let game = Game::exact(env, model)?;
    let (mut sigma, mut tau, mut states) = (Vec::new(), Vec::new(), Vec::new());
    game.support_threat(u.entries(), &mut sigma, &mut tau);
    Game::<Rational, Rational>::classify(&sigma, &tau, &mut states);
    Ok(game.is_equilibrium(concept, u.entries(), &sigma, &tau, &states))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GridOptions {
    pub denominator: u64,
    /// Refuse scans larger than this many matrices.
    pub max_space: u128,
    pub execution: Execution,
    pub concept: EquilibriumConcept,
}

impl GridOptions {
    pub fn new(denominator: u64) -> Self {
        GridOptions {
            denominator,
            max_space: DEFAULT_MAX_SPACE,
            execution: Execution::default(),
            concept: EquilibriumConcept::default(),
        }
    }

    pub fn with_execution(mut self, execution: Execution) -> Self {
        self.execution = execution;
        self
    }

    pub fn with_max_space(mut self, max_space: u128) -> Self {
        self.max_space = max_space;
        self
    }

    pub fn with_concept(mut self, concept: EquilibriumConcept) -> Self {
        self.concept = concept;
        self
    }
}

/// A game compiled for scanning one grid.
pub(crate) struct GridGame {
    pub game: Game<i64, i128>,
    pub grid: Grid,
    pub scale: BigInt,
    pub options: GridOptions,
    env: Arc<Environment>,
}

impl GridGame {
    pub fn new(env: &Environment, model: &UtilityModel, options: &GridOptions) -> Result<Self> {
        let (game, scale) = Game::scaled(env, model, options.denominator)?;
        let grid = Grid::new(&game, options.max_space)?;
        Ok(GridGame {
            game,
            grid,
            scale,
            options: *options,
            env: Arc::new(env.clone()),
        })
    }

    pub fn is_equilibrium(&self, snap: &Snapshot) -> bool {
        self.game.is_equilibrium(
            self.options.concept,
            &snap.matrix,
            &snap.sigma,
            &snap.tau,
            &snap.states,
        )
    }

    pub fn scan<A: Send>(
        &self,
        init: impl Fn() -> A + Sync,
        step: impl Fn(&mut A, &Snapshot) + Sync,
        merge: impl Fn(A, A) -> A,
    ) -> Result<A> {
        self.grid
            .scan(&self.game, self.options.execution, init, step, merge)
    }

    /// Folds over the grid equilibria only.
    pub fn scan_equilibria<A: Send>(
        &self,
        init: impl Fn() -> A + Sync,
        step: impl Fn(&mut A, &Snapshot) + Sync,
        merge: impl Fn(A, A) -> A,
    ) -> Result<A> {
        self.scan(
            init,
            |acc, snap| {
                if self.is_equilibrium(snap) {
                    step(acc, snap)
                }
            },
            merge,
        )
    }

    pub fn to_matrix(&self, scaled: &[i64]) -> StrategyMatrix {
        let n = self.env.len();
        let d = BigInt::from(self.options.denominator);
        let rows = scaled
            .chunks(n.max(1))
            .map(|r| {
                r.iter()
                    .map(|&v| Rational::new(BigInt::from(v), d.clone()))
                    .collect()
            })
            .collect();
        StrategyMatrix::validate_shared(self.env.clone(), rows)
            .expect("grid rows are valid strategies")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EquilibriumSet {
    pub grid_denominator: u64,
    pub search_space: u128,
    /// Equilibria in grid-index order.
    pub equilibria: Vec<StrategyMatrix>,
    /// Every grid matrix was checked; equilibria off the grid are not covered.
    pub exhaustive_over_grid: bool,
}

pub fn enumerate_equilibria(
    env: &Environment,
    model: &UtilityModel,
    options: &GridOptions,
) -> Result<EquilibriumSet> {
    let gg = GridGame::new(env, model, options)?;
    let found = gg.scan_equilibria(
        Vec::new,
        |acc: &mut Vec<Vec<i64>>, snap| acc.push(snap.matrix.clone()),
        |mut a, b| {
            a.extend(b);
            a
        },
    )?;
    Ok(EquilibriumSet {
        grid_denominator: options.denominator,
        search_space: gg.grid.size as u128,
        equilibria: found.iter().map(|m| gg.to_matrix(m)).collect(),
        exhaustive_over_grid: true,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Schedule {
    RoundRobin,
    /// A fresh random country order each round, from a seeded generator.
    Random(u64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dynamics {
    /// The starting matrix followed by the matrix after every row change.
    pub trajectory: Vec<StrategyMatrix>,
    pub converged: bool,
    pub rounds: usize,
}

impl Dynamics {
    pub fn last(&self) -> &StrategyMatrix {
        self.trajectory.last().expect("trajectory starts with U0")
    }
}

/// Repeatedly lets one country at a time switch to its canonical best
/// response, but only when that strictly improves its utility. Converges when
/// a whole round changes nothing.
pub fn best_response_dynamics(
    env: &Environment,
    model: &UtilityModel,
    start: &StrategyMatrix,
    schedule: Schedule,
    max_rounds: usize,
) -> Result<Dynamics> {
    start.ensure_env(env)?;
    let game = Game::exact(env, model)?;
    let mut rng = match schedule {
        Schedule::Random(seed) => Some(ChaCha8Rng::seed_from_u64(seed)),
        Schedule::RoundRobin => None,
    };
    let mut current = start.clone();
    let mut trajectory = vec![current.clone()];
    let (mut sigma, mut tau, mut states) = (Vec::new(), Vec::new(), Vec::new());
    let mut order: Vec<usize> = (0..env.len()).collect();
    for round in 0..max_rounds {
        if let Some(rng) = rng.as_mut() {
            order.shuffle(rng);
        }
        let mut changed = false;
        for &i in &order {
            game.support_threat(current.entries(), &mut sigma, &mut tau);
            Game::<Rational, Rational>::classify(&sigma, &tau, &mut states);
            let now = game.utility(i, &states);
            let response = game.best_response(i, current.entries(), &sigma, &tau);
            if response.value > now {
                let row = response
                    .options
                    .into_iter()
                    .next()
                    .expect("at least one optimal row")
                    .row;
                current = current.with_row(CountryId(i), row)?;
                trajectory.push(current.clone());
                changed = true;
            }
        }
        if !changed {
            return Ok(Dynamics {
                trajectory,
                converged: true,
                rounds: round + 1,
            });
        }
    }
    Ok(Dynamics {
        trajectory,
        converged: false,
        rounds: max_rounds,
    })
}
