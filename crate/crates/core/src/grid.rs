//! Exhaustive scans over the strategy matrices whose entries are multiples of
//! `1/d`.
//!
//! Each country's row is a composition of `p_i·d` over its allowed columns; a
//! matrix is one choice of row per country, addressed by a mixed-radix index
//! with the last country varying fastest. Scans are split into fixed-size
//! chunks whose partial results are merged in index order, so the outcome does
//! not depend on how many workers run the chunks.

use crate::environment::Environment;
use crate::error::{Error, Result};
use crate::game::Game;
use crate::mechanics::State;

/// Default cap on the number of matrices a single scan may visit.
pub const DEFAULT_MAX_SPACE: u128 = 10_000_000;

const CHUNK: u64 = 2048;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    Sequential,
    /// Uses the global rayon pool, or a dedicated pool of `jobs` threads.
    /// Falls back to sequential when the `parallel` feature is off.
    #[default]
    Parallel,
    ParallelJobs(usize),
}

/// `C(total + parts - 1, parts - 1)` saturating at `u128::MAX`.
pub fn compositions_count(total: u64, parts: usize) -> u128 {
    if parts == 0 {
        return u128::from(total == 0);
    }
    let k = (parts - 1) as u128;
    let mut acc: u128 = 1;
    for step in 1..=k {
        // acc * (total + step) / step stays integral at every step
        let factor = total as u128 + step;
        acc = match acc.checked_mul(factor) {
            Some(v) => v / step,
            None => return u128::MAX,
        };
    }
    acc
}

/// Number of grid matrices of `env` at denominator `d`.
pub fn search_space(env: &Environment, denominator: u64) -> Result<u128> {
    let game = scaled_powers(env, denominator)?;
    Ok(env
        .ids()
        .zip(game)
        .map(|(i, p)| compositions_count(p as u64, env.allowed_columns(i).len()))
        .fold(1u128, |acc, c| acc.saturating_mul(c)))
}

fn scaled_powers(env: &Environment, denominator: u64) -> Result<Vec<i64>> {
    if denominator == 0 {
        return Err(Error::ZeroDenominator);
    }
    let d = num_bigint::BigInt::from(denominator);
    env.ids()
        .map(|i| {
            crate::rational::scaled_i64(env.power(i), &d).ok_or_else(|| Error::GridNotIntegral {
                label: env.label(i).to_string(),
                denominator,
            })
        })
        .collect()
}

/// Smallest denominator making every power integral on the grid.
pub fn base_denominator(env: &Environment) -> Result<u64> {
    let lcm = crate::rational::common_denominator(env.powers());
    u64::try_from(lcm).map_err(|_| Error::Overflow)
}

/// Largest multiple of the base denominator whose search space stays within
/// `cap`, stopping once doubling the grid stops growing the space.
pub fn largest_denominator_within(env: &Environment, cap: u128) -> Result<u64> {
    let base = base_denominator(env)?;
    let first = search_space(env, base)?;
    if first > cap {
        return Err(Error::SearchSpaceTooLarge { size: first, cap });
    }
    let mut best = base;
    let mut previous = first;
    let mut k = 2u64;
    loop {
        let d = base.checked_mul(k).ok_or(Error::Overflow)?;
        let size = search_space(env, d)?;
        if size > cap {
            return Ok(best);
        }
        if size == previous {
            // nothing on the grid depends on d (all powers zero or no choices)
            return Ok(best);
        }
        best = d;
        previous = size;
        k += 1;
    }
}

/// All compositions of `total` over `columns`, as dense rows of length `n`.
pub(crate) fn rows_for(n: usize, columns: &[usize], total: i64) -> Vec<Vec<i64>> {
    fn recurse(columns: &[usize], left: i64, row: &mut Vec<i64>, out: &mut Vec<Vec<i64>>) {
        match columns {
            [] => {
                if left == 0 {
                    out.push(row.clone());
                }
            }
            [last] => {
                row[*last] = left;
                out.push(row.clone());
                row[*last] = 0;
            }
            [first, rest @ ..] => {
                for v in (0..=left).rev() {
                    row[*first] = v;
                    recurse(rest, left - v, row, out);
                }
                row[*first] = 0;
            }
        }
    }
    let mut out = Vec::new();
    let mut row = vec![0; n];
    recurse(columns, total, &mut row, &mut out);
    out
}

/// A matrix visited by a scan, with its support, threat and states.
pub(crate) struct Snapshot {
    pub index: u64,
    pub matrix: Vec<i64>,
    pub sigma: Vec<i64>,
    pub tau: Vec<i64>,
    pub states: Vec<State>,
}

pub(crate) struct Grid {
    pub size: u64,
    rows: Vec<Vec<Vec<i64>>>,
    n: usize,
}

impl Grid {
    pub fn new(game: &Game<i64, i128>, cap: u128) -> Result<Self> {
        let n = game.n;
        let size = (0..n)
            .map(|i| compositions_count(game.powers[i] as u64, game.columns[i].len()))
            .fold(1u128, |acc, c| acc.saturating_mul(c));
        if size > cap || size > u64::MAX as u128 {
            return Err(Error::SearchSpaceTooLarge { size, cap });
        }
        let rows = (0..n)
            .map(|i| rows_for(n, &game.columns[i], game.powers[i]))
            .collect();
        Ok(Grid {
            size: size as u64,
            rows,
            n,
        })
    }

    /// The matrix at mixed-radix position `index`.
    pub fn matrix_at(&self, index: u64) -> Vec<i64> {
        let mut m = vec![0; self.n * self.n];
        let mut rest = index;
        for i in (0..self.n).rev() {
            let radix = self.rows[i].len() as u64;
            let digit = (rest % radix) as usize;
            rest /= radix;
            m[i * self.n..(i + 1) * self.n].copy_from_slice(&self.rows[i][digit]);
        }
        m
    }

    fn run_chunk<A>(
        &self,
        game: &Game<i64, i128>,
        chunk: u64,
        init: &(impl Fn() -> A + Sync),
        step: &(impl Fn(&mut A, &Snapshot) + Sync),
    ) -> A {
        let n = self.n;
        let start = chunk * CHUNK;
        let end = (start + CHUNK).min(self.size);
        let mut acc = init();
        let mut digits = vec![0usize; n];
        let mut rest = start;
        for i in (0..n).rev() {
            let radix = self.rows[i].len() as u64;
            digits[i] = (rest % radix) as usize;
            rest /= radix;
        }
        let mut snap = Snapshot {
            index: start,
            matrix: self.matrix_at(start),
            sigma: Vec::with_capacity(n),
            tau: Vec::with_capacity(n),
            states: Vec::with_capacity(n),
        };
        for index in start..end {
            snap.index = index;
            game.support_threat(&snap.matrix, &mut snap.sigma, &mut snap.tau);
            Game::<i64, i128>::classify(&snap.sigma, &snap.tau, &mut snap.states);
            step(&mut acc, &snap);
            // advance the odometer, last country fastest
            for i in (0..n).rev() {
                digits[i] += 1;
                if digits[i] < self.rows[i].len() {
                    snap.matrix[i * n..(i + 1) * n].copy_from_slice(&self.rows[i][digits[i]]);
                    break;
                }
                digits[i] = 0;
                snap.matrix[i * n..(i + 1) * n].copy_from_slice(&self.rows[i][0]);
            }
        }
        acc
    }

    /// Folds `step` over every grid matrix. Chunk results are merged left to
    /// right in index order.
    pub fn scan<A: Send>(
        &self,
        game: &Game<i64, i128>,
        execution: Execution,
        init: impl Fn() -> A + Sync,
        step: impl Fn(&mut A, &Snapshot) + Sync,
        merge: impl Fn(A, A) -> A,
    ) -> Result<A> {
        let chunks = self.size.div_ceil(CHUNK);
        let parts: Vec<A> = match execution {
            Execution::Sequential => (0..chunks)
                .map(|c| self.run_chunk(game, c, &init, &step))
                .collect(),
            #[cfg(feature = "parallel")]
            Execution::Parallel => {
                use rayon::prelude::*;
                (0..chunks)
                    .into_par_iter()
                    .map(|c| self.run_chunk(game, c, &init, &step))
                    .collect()
            }
            #[cfg(feature = "parallel")]
            Execution::ParallelJobs(jobs) => {
                use rayon::prelude::*;
                let pool = rayon::ThreadPoolBuilder::new()
                    .num_threads(jobs.max(1))
                    .build()
                    .map_err(|e| Error::InvalidParameter(format!("thread pool: {e}")))?;
                pool.install(|| {
                    (0..chunks)
                        .into_par_iter()
                        .map(|c| self.run_chunk(game, c, &init, &step))
                        .collect()
                })
            }
            #[cfg(not(feature = "parallel"))]
            Execution::Parallel | Execution::ParallelJobs(_) => (0..chunks)
                .map(|c| self.run_chunk(game, c, &init, &step))
                .collect(),
        };
        Ok(parts.into_iter().fold(init(), merge))
    }
}
