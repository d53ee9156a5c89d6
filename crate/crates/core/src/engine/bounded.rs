//! Finite boxes. A guess names the dual-tight columns `I` of an optimal
//! dual vertex for the lexicographically perturbed costs `c_j + ε^(j+1)`.
//! Solving `W_Iᵀ y = c_I(ε)` fixes `y`, and the sign of each reduced cost
//! `(c − Wᵀy)_j` tells, by complementary slackness, whether the vertex puts
//! `x_j` at its lower or its upper bound.

use num_traits::One;

use crate::engine::nonneg::subsets_up_to;
use crate::engine::{finish, run_guesses, theoretical_radius, EngineOptions, Guess, SolveReport};
use crate::error::{Error, Result};
use crate::model::{proximity_bound_u64, validate, Instance};
use crate::numeric::{eps_sign, independent_rows, rank_of_rows, rat, solve_square_system, EpsPoly, Rat, RatMat, Sign};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BoundSide {
    AtLower,
    AtUpper,
}

#[derive(Clone, Debug)]
pub struct DualGuess {
    /// Dual-tight columns; these stay free.
    pub free: Vec<usize>,
    /// Dual vector, one ε-polynomial per row of `W`.
    pub y: Vec<EpsPoly>,
    /// Reduced costs `(c − Wᵀy)_j` for every column.
    pub reduced: Vec<EpsPoly>,
    /// Side taken by each remaining column, in index order.
    pub pattern: Vec<(usize, BoundSide)>,
    /// Bound value at that side, aligned with `pattern`.
    pub center: Vec<i64>,
}

/// `c_j + ε^(j+1)`; the shift keeps ε⁰ for the unperturbed part.
fn perturbed_cost(c: &Rat, j: usize, len: usize) -> EpsPoly {
    let mut p = EpsPoly::monomial(j + 1).padded(len);
    let mut coeffs = p.coeffs().to_vec();
    coeffs[0] = c.clone();
    p = EpsPoly::from_coeffs(coeffs);
    p
}

/// Dual vector and reduced costs for the perturbed costs with `free`
/// dual-tight. Returns `None` when the columns of `free` are dependent.
/// When `|free|` is below `m`, the components of `y` outside a maximal
/// independent row subset of `W_free` are zero.
pub(crate) fn dual_for(inst: &Instance, free: &[usize]) -> Result<Option<(Vec<EpsPoly>, Vec<EpsPoly>)>> {
    let (m, n) = (inst.m(), inst.n());
    let len = n + 1;
    let sub_cols: Vec<Vec<Rat>> = free
        .iter()
        .map(|&i| inst.w.column(i).into_iter().map(rat).collect())
        .collect();
    if rank_of_rows(&sub_cols) < free.len() {
        return Ok(None);
    }
    let rows_of_wi: Vec<Vec<Rat>> = (0..m)
        .map(|r| free.iter().map(|&i| rat(inst.w.get(r, i))).collect())
        .collect();
    let rows = independent_rows(&rows_of_wi);
    let a = RatMat::from_rows(
        free.iter()
            .map(|&i| rows.iter().map(|&r| rat(inst.w.get(r, i))).collect())
            .collect(),
    );
    let rhs: Vec<EpsPoly> = free.iter().map(|&i| perturbed_cost(&inst.c[i], i, len)).collect();
    let Some(y_sub) = solve_square_system(&a, &rhs) else {
        return Ok(None);
    };
    let mut y = vec![EpsPoly::zero().padded(len); m];
    for (&r, v) in rows.iter().zip(y_sub) {
        y[r] = v.padded(len);
    }
    let reduced: Vec<EpsPoly> = (0..n)
        .map(|j| {
            let wty = (0..m).fold(EpsPoly::zero(), |acc, r| &acc + &y[r].scale(&rat(inst.w.get(r, j))));
            &perturbed_cost(&inst.c[j], j, len) - &wty
        })
        .collect();
    for &i in free {
        if !reduced[i].is_zero() {
            return Err(Error::Internal(format!("reduced cost of dual-tight column {i} is nonzero")));
        }
    }
    for j in (0..n).filter(|j| !free.contains(j)) {
        if !reduced[j].coeff(j + 1).is_one() {
            return Err(Error::Internal(format!(
                "reduced cost of column {j} lost its perturbation term"
            )));
        }
    }
    Ok(Some((y, reduced)))
}

/// Side of a non-dual-tight column. `c − Wᵀy = s^ℓ − s^u`, so a positive
/// reduced cost puts the variable at its lower bound and a negative one at
/// its upper bound.
pub(crate) fn side_of(reduced: &EpsPoly, j: usize) -> Result<BoundSide> {
    match eps_sign(reduced) {
        Sign::Positive => Ok(BoundSide::AtLower),
        Sign::Negative => Ok(BoundSide::AtUpper),
        Sign::Zero => Err(Error::Internal(format!("reduced cost of column {j} vanished"))),
    }
}

/// Dual guesses for every set of at most `m` linearly independent columns.
pub fn enumerate_dual_guesses(inst: &Instance) -> Result<Vec<DualGuess>> {
    if !inst.all_bounds_finite() {
        return Err(Error::Precondition("the bounded engine needs finite bounds on every variable".into()));
    }
    let (m, n) = (inst.m(), inst.n());
    let mut out = Vec::new();
    for free in subsets_up_to(n, m) {
        let Some((y, reduced)) = dual_for(inst, &free)? else {
            continue;
        };
        let mut pattern = Vec::with_capacity(n - free.len());
        let mut center = Vec::with_capacity(n - free.len());
        for j in (0..n).filter(|j| !free.contains(j)) {
            let side = side_of(&reduced[j], j)?;
            center.push(match side {
                BoundSide::AtLower => inst.lower[j].unwrap(),
                BoundSide::AtUpper => inst.upper[j].unwrap(),
            });
            pattern.push((j, side));
        }
        out.push(DualGuess {
            free,
            y,
            reduced,
            pattern,
            center,
        });
    }
    Ok(out)
}

/// Solves an instance with finite bounds on every variable.
pub fn solve_bounded(inst: &Instance, opts: &EngineOptions) -> Result<SolveReport> {
    validate(inst).map_err(Error::Invalid)?;
    let m = inst.m();
    let delta = inst.delta();
    let budget = proximity_bound_u64(m as u64, delta as u64);
    let guesses: Vec<Guess> = enumerate_dual_guesses(inst)?
        .into_iter()
        .map(|g| Guess {
            tight: g.pattern.iter().map(|&(j, _)| j).collect(),
            free: g.free,
            center: g.center,
        })
        .collect();
    let (best, mut stats, skipped) = run_guesses(inst, &guesses, budget, opts)?;
    stats.theoretical_radius = theoretical_radius(m, delta, budget);
    Ok(SolveReport {
        solution: finish(best, !skipped),
        stats,
    })
}
