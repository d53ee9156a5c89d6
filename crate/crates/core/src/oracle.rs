//! The restricted problem on at most `m` free variables:
//! `min c_I x_I + g(W_I x_I + s)` over the box, with every other variable
//! fixed and its contribution folded into `s`.
//!
//! Finite boxes are scanned exhaustively in lexicographic order, so the
//! first minimiser met is the lexicographically smallest one. A single free
//! variable under a convex objective is handled by binary search on forward
//! differences, which also covers half-infinite ranges. Equality indicators
//! with unbounded free variables are solved as a linear system.

use num_bigint::BigInt;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::model::{Instance, ObjValue, Objective};
use crate::numeric::{independent_rows, rat, solve_square_rat, Rat, RatMat};

/// Largest box scanned exhaustively.
pub const ENUMERATION_LIMIT: u128 = 10_000_000;

/// One-variable ranges wider than this use binary search when the
/// objective is convex.
const SEARCH_THRESHOLD: u128 = 256;

/// Bracketing never probes beyond `±2^62`.
pub const BRACKET_CAP: i64 = 1 << 62;

/// Free variables plus the fixed contribution `s = W_J z_J` of the rest.
#[derive(Clone, Copy, Debug)]
pub struct SubproblemQuery<'a> {
    pub free: &'a [usize],
    pub fixed: &'a [i64],
}

/// Minimises over the free variables. `Ok(None)` when no point of the box
/// has finite value. Ties go to the lexicographically smallest `x_I`.
pub fn solve_subproblem(inst: &Instance, q: &SubproblemQuery<'_>) -> Result<Option<(Vec<i64>, Rat)>> {
    debug_assert!(q.free.windows(2).all(|w| w[0] < w[1]), "free indices must be sorted");
    if let Objective::External(e) = &inst.objective {
        if let Some(answer) = e.solve_subproblem(inst, q) {
            return answer;
        }
    }
    if q.free.is_empty() {
        return Ok(inst.objective.eval(q.fixed).finite().map(|v| (Vec::new(), v.clone())));
    }
    let finite = q
        .free
        .iter()
        .all(|&i| inst.lower[i].is_some() && inst.upper[i].is_some());
    let convex_single = q.free.len() == 1 && inst.objective.is_convex();
    if finite {
        let volume = box_volume(inst, q.free);
        if convex_single && volume > SEARCH_THRESHOLD {
            return solve_single_convex(inst, q);
        }
        if volume <= ENUMERATION_LIMIT {
            return Ok(enumerate_box(inst, q));
        }
        return Err(Error::VolumeLimit {
            volume,
            limit: ENUMERATION_LIMIT,
        });
    }
    if let Objective::EqualityIndicator { target } = &inst.objective {
        return solve_equality(inst, q, target);
    }
    if convex_single {
        return solve_single_convex(inst, q);
    }
    Err(Error::UnboundedDomain(format!(
        "free variables {:?} have infinite bounds and the objective offers no bounded search; supply finite bounds",
        q.free
    )))
}

fn box_volume(inst: &Instance, free: &[usize]) -> u128 {
    free.iter()
        .map(|&i| (inst.upper[i].unwrap() as i128 - inst.lower[i].unwrap() as i128 + 1) as u128)
        .fold(1u128, |acc, w| acc.saturating_mul(w))
}

fn enumerate_box(inst: &Instance, q: &SubproblemQuery<'_>) -> Option<(Vec<i64>, Rat)> {
    let k = q.free.len();
    let m = inst.m();
    let lo: Vec<i64> = q.free.iter().map(|&i| inst.lower[i].unwrap()).collect();
    let hi: Vec<i64> = q.free.iter().map(|&i| inst.upper[i].unwrap()).collect();
    let cols: Vec<Vec<i64>> = q.free.iter().map(|&i| inst.w.column(i)).collect();
    let costs: Vec<&Rat> = q.free.iter().map(|&i| &inst.c[i]).collect();

    let mut x = lo.clone();
    let mut v: Vec<i64> = q.fixed.to_vec();
    for (col, &xi) in cols.iter().zip(&x) {
        for r in 0..m {
            v[r] += col[r] * xi;
        }
    }
    let mut best: Option<(Vec<i64>, Rat)> = None;
    loop {
        if let ObjValue::Finite(g) = inst.objective.eval(&v) {
            let mut total = g;
            for (c, &xi) in costs.iter().zip(&x) {
                if xi != 0 && !c.is_zero() {
                    total += *c * rat(xi);
                }
            }
            if best.as_ref().is_none_or(|(_, b)| &total < b) {
                best = Some((x.clone(), total));
            }
        }
        // Odometer: the last free variable moves fastest.
        let mut pos = k;
        loop {
            if pos == 0 {
                return best;
            }
            pos -= 1;
            if x[pos] < hi[pos] {
                x[pos] += 1;
                for r in 0..m {
                    v[r] += cols[pos][r];
                }
                break;
            }
            let span = x[pos] - lo[pos];
            for r in 0..m {
                v[r] -= cols[pos][r] * span;
            }
            x[pos] = lo[pos];
        }
    }
}

fn solve_single_convex(inst: &Instance, q: &SubproblemQuery<'_>) -> Result<Option<(Vec<i64>, Rat)>> {
    let i = q.free[0];
    let col: Vec<BigInt> = inst.w.column(i).into_iter().map(BigInt::from).collect();
    let fixed: Vec<BigInt> = q.fixed.iter().map(|&v| BigInt::from(v)).collect();
    let c = inst.c[i].clone();
    let (x, value) = solve_univariate_convex(inst.lower[i], inst.upper[i], |x| {
        let xb = BigInt::from(x);
        let v: Vec<BigInt> = fixed.iter().zip(&col).map(|(s, w)| s + w * &xb).collect();
        match inst.objective.eval_big(&v) {
            ObjValue::Finite(g) => Ok(g + &c * Rat::from_integer(xb)),
            ObjValue::Infinite => Err(Error::Precondition(
                "convex one-variable search met an infinite objective value".into(),
            )),
        }
    })?;
    Ok(Some((vec![x], value)))
}

/// Smallest minimiser of a convex function on the integers of `[lo, hi]`
/// (`None` = unbounded side), by binary search on `f(x+1) − f(x)`.
/// Unbounded sides are bracketed by doubling steps up to [`BRACKET_CAP`].
pub fn solve_univariate_convex<F>(lo: Option<i64>, hi: Option<i64>, mut eval: F) -> Result<(i64, Rat)>
where
    F: FnMut(i64) -> Result<Rat>,
{
    if let (Some(l), Some(h)) = (lo, hi) {
        if l > h {
            return Err(Error::Precondition(format!("empty range [{l}, {h}]")));
        }
    }
    // `rising(x)`: f(x+1) >= f(x). Monotone in x for convex f.
    let mut rising = |x: i64| -> Result<bool> { Ok(eval(x + 1)? >= eval(x)?) };

    let start = lo.or(hi).unwrap_or(0).clamp(-BRACKET_CAP, BRACKET_CAP);
    let a = match lo {
        Some(l) => l,
        None => {
            // Need a point whose left neighbour is still falling.
            let mut step: i64 = 0;
            let mut a = start;
            loop {
                if a <= -BRACKET_CAP {
                    return Err(Error::UnboundedDomain(
                        "objective keeps decreasing towards −∞ beyond the bracketing cap".into(),
                    ));
                }
                if !rising(a - 1)? {
                    break a;
                }
                step = if step == 0 { 1 } else { step.saturating_mul(2) };
                a = start.saturating_sub(step).max(-BRACKET_CAP);
            }
        }
    };
    let b = match hi {
        Some(h) => h,
        None => {
            let mut step: i64 = 0;
            let mut b = a;
            loop {
                if b >= BRACKET_CAP {
                    return Err(Error::UnboundedDomain(
                        "objective keeps decreasing towards +∞ beyond the bracketing cap".into(),
                    ));
                }
                if rising(b)? {
                    break b;
                }
                step = if step == 0 { 1 } else { step.saturating_mul(2) };
                b = a.saturating_add(step).min(BRACKET_CAP);
            }
        }
    };
    // Smallest x in [a, b] with x == b or rising(x).
    let (mut l, mut r) = (a, b);
    while l < r {
        let mid = l + (r - l) / 2;
        if rising(mid)? {
            r = mid;
        } else {
            l = mid + 1;
        }
    }
    let value = eval(l)?;
    Ok((l, value))
}

fn solve_equality(inst: &Instance, q: &SubproblemQuery<'_>, target: &[i64]) -> Result<Option<(Vec<i64>, Rat)>> {
    let m = inst.m();
    let k = q.free.len();
    let rows: Vec<Vec<Rat>> = (0..m)
        .map(|r| q.free.iter().map(|&i| rat(inst.w.get(r, i))).collect())
        .collect();
    let rhs: Vec<Rat> = (0..m).map(|r| rat(target[r] - q.fixed[r])).collect();
    let basis = independent_rows(&rows);
    if basis.len() < k {
        return Err(Error::UnboundedDomain(format!(
            "free columns {:?} are linearly dependent and unbounded; supply finite bounds",
            q.free
        )));
    }
    let a = RatMat::from_rows(basis.iter().map(|&r| rows[r].clone()).collect());
    let b: Vec<Rat> = basis.iter().map(|&r| rhs[r].clone()).collect();
    let sol = solve_square_rat(&a, &b).ok_or_else(|| Error::Internal("independent rows became singular".into()))?;
    if sol.iter().any(|v| !v.is_integer()) {
        return Ok(None);
    }
    let x: Vec<i64> = match sol.iter().map(|v| i64::try_from(v.to_integer()).ok()).collect() {
        Some(x) => x,
        None => return Ok(None),
    };
    let consistent = (0..m).all(|r| {
        let lhs: i64 = q.free.iter().zip(&x).map(|(&i, xi)| inst.w.get(r, i) * xi).sum();
        lhs == target[r] - q.fixed[r]
    });
    if !consistent || q.free.iter().zip(&x).any(|(&i, &xi)| !inst.in_bounds(i, xi)) {
        return Ok(None);
    }
    let cost = q
        .free
        .iter()
        .zip(&x)
        .fold(Rat::zero(), |acc, (&i, &xi)| acc + &inst.c[i] * rat(xi));
    Ok(Some((x, cost)))
}
