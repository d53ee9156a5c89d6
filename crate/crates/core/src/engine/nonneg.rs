//! Variables in `ℤ≥0`: an optimal vertex of the relaxation has at most `m`
//! nonzero entries, so each guess fixes a support `L` (`|L| ≤ m`) and centres
//! the remaining variables at zero. With finite upper bounds a vertex may
//! also sit at `u_j`; the dual of the perturbed costs for `L` then decides
//! the side, as in the bounded engine.

use std::collections::HashSet;

use crate::engine::bounded::{dual_for, side_of, BoundSide};
use crate::engine::{finish, run_guesses, theoretical_radius, EngineOptions, Guess, SolveReport};
use crate::error::{Error, Result};
use crate::model::{merge_duplicate_columns, proximity_bound_u64, validate, Instance};
use crate::numeric::Rat;

/// Candidate support of the relaxation's vertex. `T` is the complement.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SupportGuess {
    pub support: Vec<usize>,
    pub tight: Vec<usize>,
}

/// All index sets of size at most `max_size`, by size and then
/// lexicographically.
pub(crate) fn subsets_up_to(n: usize, max_size: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for k in 1..=max_size.min(n) {
        let mut idx: Vec<usize> = (0..k).collect();
        loop {
            out.push(idx.clone());
            let Some(pos) = (0..k).rev().find(|&p| idx[p] < n - k + p) else {
                break;
            };
            idx[pos] += 1;
            for q in pos + 1..k {
                idx[q] = idx[q - 1] + 1;
            }
        }
    }
    out
}

/// Column, cost and bounds of one variable, the data a symmetry must preserve.
type ColumnKey = (Vec<i64>, Rat, Option<i64>, Option<i64>);

/// Supports with `|L| ≤ m`. Supports whose `(column, cost, bounds)`
/// multiset repeats an earlier one are dropped: they are images of each
/// other under a symmetry of the instance. Returns the kept guesses and the
/// number dropped.
pub fn support_guesses(inst: &Instance) -> (Vec<SupportGuess>, u64) {
    let n = inst.n();
    let mut seen: HashSet<Vec<ColumnKey>> = HashSet::new();
    let mut out = Vec::new();
    let mut pruned = 0;
    for support in subsets_up_to(n, inst.m()) {
        let mut key: Vec<_> = support
            .iter()
            .map(|&i| (inst.w.column(i), inst.c[i].clone(), inst.lower[i], inst.upper[i]))
            .collect();
        key.sort();
        if !seen.insert(key) {
            pruned += 1;
            continue;
        }
        let tight = (0..n).filter(|i| !support.contains(i)).collect();
        out.push(SupportGuess { support, tight });
    }
    (out, pruned)
}

/// Centre of the tight variables for support `L`: zero, except at finite
/// upper bounds whose reduced cost is negative.
fn centre(inst: &Instance, guess: &SupportGuess) -> Result<Vec<i64>> {
    let zeros = vec![0; guess.tight.len()];
    if guess.tight.iter().all(|&j| inst.upper[j].is_none()) {
        return Ok(zeros);
    }
    let Some((_, reduced)) = dual_for(inst, &guess.support)? else {
        return Ok(zeros);
    };
    guess
        .tight
        .iter()
        .map(|&j| match (side_of(&reduced[j], j)?, inst.upper[j]) {
            (BoundSide::AtUpper, Some(u)) => Ok(u),
            _ => Ok(0),
        })
        .collect()
}

/// Solves an instance with all lower bounds zero. Upper bounds may be
/// infinite when the restricted subproblems admit a bounded search; an
/// optimum is assumed to exist.
pub fn solve_nonneg(inst: &Instance, opts: &EngineOptions) -> Result<SolveReport> {
    validate(inst).map_err(Error::Invalid)?;
    if let Some(i) = inst.lower.iter().position(|l| *l != Some(0)) {
        return Err(Error::Precondition(format!(
            "the non-negative engine needs lower bound 0 on every variable (index {i})"
        )));
    }
    if opts.merge_columns {
        if let Ok(map) = merge_duplicate_columns(inst) {
            if !map.is_identity() {
                let inner = EngineOptions {
                    merge_columns: false,
                    ..opts.clone()
                };
                let mut report = solve_nonneg(&map.merged, &inner)?;
                report.stats.merged_n = Some(map.merged.n());
                report.solution.x = report.solution.x.map(|x| map.expand(&x));
                return Ok(report);
            }
        }
    }

    let m = inst.m();
    let delta = inst.delta();
    let budget = proximity_bound_u64(m as u64, delta as u64);
    let (supports, pruned) = support_guesses(inst);
    let guesses: Vec<Guess> = supports
        .into_iter()
        .map(|s| {
            Ok(Guess {
                center: centre(inst, &s)?,
                free: s.support,
                tight: s.tight,
            })
        })
        .collect::<Result<_>>()?;
    let (best, mut stats, skipped) = run_guesses(inst, &guesses, budget, opts)?;
    stats.guesses_pruned = pruned;
    stats.theoretical_radius = theoretical_radius(m, delta, budget);
    Ok(SolveReport {
        solution: finish(best, !skipped),
        stats,
    })
}
