//! Guess-and-recover solvers.
//!
//! Both engines enumerate guesses of the variables that are not tight in an
//! optimal vertex of the linear relaxation for the optimal projection. For a
//! guess, the tight variables `T` have a known centre `z_T`; some optimal
//! point differs from it by at most the proximity bound `P` in ℓ₁ norm, so
//! `W_T x_T` lies within `mΔP` of `W_T z_T`. Each reachable target is
//! recovered by the fixed-target table (for `x_T`) and the restricted
//! subproblem (for the free variables), and the best candidate over all
//! guesses is returned.

mod bounded;
mod nonneg;

pub use bounded::{enumerate_dual_guesses, solve_bounded, BoundSide, DualGuess};
pub use nonneg::{solve_nonneg, support_guesses, SupportGuess};

use rayon::prelude::*;

use crate::dp::{build_dp, l1_norm, DpInput, DEFAULT_STATE_LIMIT};
use crate::error::{Error, Result};
use crate::model::{Incumbent, Instance, ObjValue, Solution, Status};
use crate::oracle::{solve_subproblem, SubproblemQuery};

#[derive(Clone, Debug)]
pub struct EngineOptions {
    /// Largest target radius `‖W_T x_T − W_T z_T‖₁` explored. Results are
    /// labelled heuristic when a reachable target beyond it is skipped.
    pub radius_cap: Option<u64>,
    /// Explore targets ring by ring (graded order). When off, targets are
    /// visited in plain lexicographic order; the result is the same.
    pub deepening: bool,
    /// Worker threads used for independent guesses.
    pub jobs: usize,
    /// Merge duplicate columns first when costs allow it.
    pub merge_columns: bool,
    pub state_limit: usize,
}

impl Default for EngineOptions {
    fn default() -> Self {
        Self {
            radius_cap: None,
            deepening: true,
            jobs: 1,
            merge_columns: true,
            state_limit: DEFAULT_STATE_LIMIT,
        }
    }
}

/// Work counters. All of them are deterministic for a given instance and
/// option set, whatever the worker count.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SolveStats {
    pub guesses_explored: u64,
    pub guesses_pruned: u64,
    pub dp_tables: u64,
    pub dp_states: u64,
    pub targets_explored: u64,
    pub oracle_calls: u64,
    /// Largest target radius explored in any guess.
    pub radius_used: u64,
    /// `mΔP`, the radius that makes the search exhaustive.
    pub theoretical_radius: u64,
    /// Target radius at which the returned point was found.
    pub optimum_radius: Option<u64>,
    /// Variable count after column merging, when merging applied.
    pub merged_n: Option<usize>,
}

impl SolveStats {
    fn absorb(&mut self, o: &GuessOutcome) {
        self.guesses_explored += 1;
        self.dp_tables += 1;
        self.dp_states += o.dp_states;
        self.targets_explored += o.targets;
        self.oracle_calls += o.oracle_calls;
        self.radius_used = self.radius_used.max(o.radius_used);
    }
}

#[derive(Clone, Debug)]
pub struct SolveReport {
    pub solution: Solution,
    pub stats: SolveStats,
}

/// One unit of work: free variables and the centre of the tight ones.
#[derive(Clone, Debug)]
pub(crate) struct Guess {
    pub free: Vec<usize>,
    pub tight: Vec<usize>,
    pub center: Vec<i64>,
}

#[derive(Clone, Debug, Default)]
pub(crate) struct GuessOutcome {
    pub best: Incumbent,
    pub best_radius: Option<u64>,
    pub dp_states: u64,
    pub targets: u64,
    pub oracle_calls: u64,
    pub radius_used: u64,
    pub skipped: bool,
}

pub(crate) fn explore_guess(inst: &Instance, guess: &Guess, budget: u64, opts: &EngineOptions) -> Result<GuessOutcome> {
    let input = DpInput {
        columns: guess.tight.iter().map(|&j| inst.w.column(j)).collect(),
        costs: guess.tight.iter().map(|&j| &inst.c[j]).collect(),
        lower: guess.tight.iter().map(|&j| inst.lower[j]).collect(),
        upper: guess.tight.iter().map(|&j| inst.upper[j]).collect(),
        center: guess.center.clone(),
        m: inst.m(),
        delta: inst.delta(),
    };
    let table = build_dp(&input, budget, opts.state_limit)?;
    let base = table.center_image();
    let mut targets = table.reachable();
    if !opts.deepening {
        targets.sort_by(|a, b| a.0.cmp(&b.0));
    }

    let mut out = GuessOutcome {
        dp_states: table.state_count() as u64,
        ..GuessOutcome::default()
    };
    for (residual, cost_t) in targets {
        let rho = l1_norm(&residual);
        if opts.radius_cap.is_some_and(|cap| rho > cap) {
            out.skipped = true;
            continue;
        }
        out.targets += 1;
        out.radius_used = out.radius_used.max(rho);
        let fixed: Vec<i64> = base.iter().zip(&residual).map(|(b, r)| b + r).collect();
        out.oracle_calls += 1;
        let query = SubproblemQuery {
            free: &guess.free,
            fixed: &fixed,
        };
        let Some((x_free, value_free)) = solve_subproblem(inst, &query)? else {
            continue;
        };
        let total = cost_t + value_free;
        if !out.best.admits(&total) {
            continue;
        }
        let (x_tight, _) = table
            .query(&residual)
            .ok_or_else(|| Error::Internal("reachable residual failed to reconstruct".into()))?;
        let mut x = vec![0i64; inst.n()];
        for (&i, v) in guess.free.iter().zip(x_free) {
            x[i] = v;
        }
        for (&j, v) in guess.tight.iter().zip(x_tight) {
            x[j] = v;
        }
        debug_assert_eq!(inst.evaluate(&x), ObjValue::Finite(total.clone()));
        if out.best.offer(total, x) {
            out.best_radius = Some(rho);
        }
    }
    Ok(out)
}

/// Runs the guesses on `jobs` workers and reduces in guess order, so the
/// outcome does not depend on scheduling.
pub(crate) fn run_guesses(
    inst: &Instance,
    guesses: &[Guess],
    budget: u64,
    opts: &EngineOptions,
) -> Result<(Incumbent, SolveStats, bool)> {
    let outcomes: Vec<Result<GuessOutcome>> = if opts.jobs <= 1 {
        guesses.iter().map(|g| explore_guess(inst, g, budget, opts)).collect()
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(opts.jobs)
            .build()
            .map_err(|e| Error::Internal(format!("worker pool: {e}")))?;
        pool.install(|| {
            guesses
                .par_iter()
                .map(|g| explore_guess(inst, g, budget, opts))
                .collect()
        })
    };
    let mut best = Incumbent::default();
    let mut stats = SolveStats::default();
    let mut skipped = false;
    for outcome in outcomes {
        let o = outcome?;
        stats.absorb(&o);
        skipped |= o.skipped;
        if let Some((v, x)) = o.best.best {
            if best.offer(v, x) {
                stats.optimum_radius = o.best_radius;
            }
        }
    }
    Ok((best, stats, skipped))
}

pub(crate) fn finish(best: Incumbent, exhaustive: bool) -> Solution {
    match best.best {
        Some((v, x)) => Solution {
            x: Some(x),
            value: ObjValue::Finite(v),
            status: if exhaustive { Status::Optimal } else { Status::Heuristic },
        },
        None if exhaustive => Solution::infeasible(),
        None => Solution {
            x: None,
            value: ObjValue::Infinite,
            status: Status::Heuristic,
        },
    }
}

/// Engine selection used by the front ends.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EngineKind {
    Auto,
    Nonneg,
    Bounded,
}

/// Bounded engine when every bound is finite, otherwise the non-negative
/// engine.
pub fn solve(inst: &Instance, kind: EngineKind, opts: &EngineOptions) -> Result<SolveReport> {
    match kind {
        EngineKind::Bounded => solve_bounded(inst, opts),
        EngineKind::Nonneg => solve_nonneg(inst, opts),
        EngineKind::Auto if inst.all_bounds_finite() => solve_bounded(inst, opts),
        EngineKind::Auto => solve_nonneg(inst, opts),
    }
}

/// `m·Δ·P` with saturation.
pub(crate) fn theoretical_radius(m: usize, delta: i64, budget: u64) -> u64 {
    (m as u64).saturating_mul(delta.max(0) as u64).saturating_mul(budget)
}
