//! Exact solver for power allocation among countries on a signed network.
//!
//! Countries split their power between themselves, their friends and their
//! adversaries; support against threat decides whether each one is safe,
//! precarious or unsafe. The crate evaluates states and utilities exactly,
//! computes best responses, enumerates equilibria on rational grids, and
//! checks whether gaining friends can lower a country's optimal welfare.

// Error variants carry exact values for their messages; they are cold.
#![allow(clippy::result_large_err)]

pub mod analysis;
pub mod environment;
pub mod equilibrium;
pub mod error;
mod game;
mod grid;
pub mod io;
pub mod mechanics;
pub mod preference;
pub mod rational;
pub mod report;
pub mod utility;

pub use analysis::{
    check_necessary_condition, check_survival_transfer, construct_single_target_pair,
    construct_target_pair, detect_paradox, optimal_welfare, price_of_anarchy, someone_survives,
    welfare_bounds, ConstructedPair, NecessaryCondition, ParadoxReport, PoAReport, SubsetRelations,
    SurvivalReport, WelfareBounds, WelfareMode,
};
pub use environment::{Country, CountryId, Environment, Relation};
pub use equilibrium::{
    best_response, best_response_dynamics, enumerate_equilibria, is_equilibrium,
    is_equilibrium_with, BestResponse, Dynamics, EquilibriumConcept, EquilibriumSet, GridOptions,
    Schedule, TargetSet,
};
pub use error::{Error, Result};
pub use grid::{
    base_denominator, compositions_count, largest_denominator_within, search_space, Execution,
    DEFAULT_MAX_SPACE,
};
pub use mechanics::{
    state, states, total_support, total_threat, validate_strategy, State, StateVector,
    StrategyMatrix,
};
pub use preference::{
    indifferent, indifferent_with, strongly_prefers, weakly_prefers, IndifferenceReading,
};
pub use rational::{format_rational, parse_rational, Rational};
pub use utility::{
    favorable_sets, realized_pairwise, total_utility, total_welfare, PairValues, PairwiseTable,
    UtilityForm, UtilityModel,
};
