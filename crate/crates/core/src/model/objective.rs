use std::cmp::Ordering;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use crate::error::{Result, Violation};
use crate::model::Instance;
use crate::numeric::{rat, Rat};
use crate::oracle::SubproblemQuery;

/// Objective value: a finite rational or `+∞`. `+∞` compares above every
/// finite value.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum ObjValue {
    Finite(Rat),
    Infinite,
}

impl ObjValue {
    pub fn zero() -> Self {
        ObjValue::Finite(Rat::zero())
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, ObjValue::Finite(_))
    }

    pub fn finite(&self) -> Option<&Rat> {
        match self {
            ObjValue::Finite(r) => Some(r),
            ObjValue::Infinite => None,
        }
    }

    /// Adds a finite offset; `+∞` absorbs.
    pub fn plus(self, offset: &Rat) -> ObjValue {
        match self {
            ObjValue::Finite(r) => ObjValue::Finite(r + offset),
            ObjValue::Infinite => ObjValue::Infinite,
        }
    }
}

impl Ord for ObjValue {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (ObjValue::Finite(a), ObjValue::Finite(b)) => a.cmp(b),
            (ObjValue::Finite(_), ObjValue::Infinite) => Ordering::Less,
            (ObjValue::Infinite, ObjValue::Finite(_)) => Ordering::Greater,
            (ObjValue::Infinite, ObjValue::Infinite) => Ordering::Equal,
        }
    }
}

impl PartialOrd for ObjValue {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl From<Rat> for ObjValue {
    fn from(r: Rat) -> Self {
        ObjValue::Finite(r)
    }
}

impl fmt::Display for ObjValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ObjValue::Finite(r) => write!(f, "{}/{}", r.numer(), r.denom()),
            ObjValue::Infinite => write!(f, "+inf"),
        }
    }
}

/// Convex piecewise-linear function of one integer argument.
///
/// `slopes[k]` is the slope on the k-th interval cut out by the sorted
/// `breakpoints` (so there is one more slope than breakpoints), and the
/// function takes `value_at_zero` at 0.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConvexPwl {
    pub breakpoints: Vec<i64>,
    pub slopes: Vec<Rat>,
    pub value_at_zero: Rat,
}

impl ConvexPwl {
    pub fn new(breakpoints: Vec<i64>, slopes: Vec<Rat>, value_at_zero: Rat) -> Self {
        Self {
            breakpoints,
            slopes,
            value_at_zero,
        }
    }

    /// A single linear piece.
    pub fn linear(slope: Rat) -> Self {
        Self::new(Vec::new(), vec![slope], Rat::zero())
    }

    pub(crate) fn violations(&self, field: &str, coord: usize) -> Vec<Violation> {
        let mut out = Vec::new();
        if self.slopes.len() != self.breakpoints.len() + 1 {
            out.push(Violation::new(
                field,
                Some(coord),
                "needs exactly one more slope than breakpoints",
            ));
        }
        if self.breakpoints.windows(2).any(|w| w[0] >= w[1]) {
            out.push(Violation::new(field, Some(coord), "breakpoints not strictly increasing"));
        }
        if self.slopes.windows(2).any(|w| w[0] > w[1]) {
            out.push(Violation::new(field, Some(coord), "non-convex piece"));
        }
        out
    }

    /// `∫_a^b slope(t) dt` for `a ≤ b`.
    fn integral(&self, a: &BigInt, b: &BigInt) -> Rat {
        let mut acc = Rat::zero();
        for (k, slope) in self.slopes.iter().enumerate() {
            let lo = (k > 0).then(|| BigInt::from(self.breakpoints[k - 1]));
            let hi = self.breakpoints.get(k).map(|&v| BigInt::from(v));
            let left = match &lo {
                Some(lo) if lo > a => lo.clone(),
                _ => a.clone(),
            };
            let right = match &hi {
                Some(hi) if hi < b => hi.clone(),
                _ => b.clone(),
            };
            if right > left && !slope.is_zero() {
                acc += slope * Rat::from_integer(right - left);
            }
        }
        acc
    }

    pub fn eval_big(&self, v: &BigInt) -> Rat {
        let zero = BigInt::zero();
        if v.is_negative() {
            &self.value_at_zero - self.integral(v, &zero)
        } else {
            &self.value_at_zero + self.integral(&zero, v)
        }
    }

    pub fn eval(&self, v: i64) -> Rat {
        self.eval_big(&BigInt::from(v))
    }

    /// Left derivative at `v` (the slope of the piece just below `v`).
    pub fn left_slope(&self, v: &Rat) -> Rat {
        let k = self
            .breakpoints
            .iter()
            .filter(|&&b| &rat(b) < v)
            .count();
        self.slopes[k].clone()
    }

    /// Exact evaluation at a rational point.
    pub fn eval_rat(&self, v: &Rat) -> Rat {
        // Integrate piecewise from 0 to v using rational cut points.
        let zero = Rat::zero();
        let (a, b, sign) = if v < &zero {
            (v.clone(), zero, -1)
        } else {
            (zero, v.clone(), 1)
        };
        let mut acc = Rat::zero();
        for (k, slope) in self.slopes.iter().enumerate() {
            let lo = (k > 0).then(|| rat(self.breakpoints[k - 1]));
            let hi = self.breakpoints.get(k).map(|&x| rat(x));
            let left = match lo {
                Some(lo) if lo > a => lo,
                _ => a.clone(),
            };
            let right = match hi {
                Some(hi) if hi < b => hi,
                _ => b.clone(),
            };
            if right > left {
                acc += slope * (right - left);
            }
        }
        if sign < 0 {
            &self.value_at_zero - acc
        } else {
            &self.value_at_zero + acc
        }
    }
}

/// Convex penalty of the used knapsack capacity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Penalty {
    /// `a v² + b v + c` with `a ≥ 0`.
    Quadratic { a: Rat, b: Rat, c: Rat },
    Pwl(ConvexPwl),
}

impl Penalty {
    pub fn eval_rat(&self, v: &Rat) -> Rat {
        match self {
            Penalty::Quadratic { a, b, c } => a * v * v + b * v + c,
            Penalty::Pwl(p) => p.eval_rat(v),
        }
    }

    pub fn eval(&self, v: i64) -> Rat {
        match self {
            Penalty::Quadratic { .. } => self.eval_rat(&rat(v)),
            Penalty::Pwl(p) => p.eval(v),
        }
    }

    /// Derivative, left derivative at breakpoints.
    pub fn left_slope(&self, v: &Rat) -> Rat {
        match self {
            Penalty::Quadratic { a, b, .. } => rat(2) * a * v + b,
            Penalty::Pwl(p) => p.left_slope(v),
        }
    }

    pub(crate) fn violations(&self) -> Vec<Violation> {
        match self {
            Penalty::Quadratic { a, .. } if a.is_negative() => vec![Violation::new(
                "objective.penalty",
                None,
                "quadratic coefficient must be non-negative",
            )],
            Penalty::Quadratic { .. } => Vec::new(),
            Penalty::Pwl(p) => p.violations("objective.penalty", 0),
        }
    }
}

/// Result of a user-supplied subproblem solver: `Ok(None)` means the
/// subproblem is infeasible.
pub type SubproblemAnswer = Result<Option<(Vec<i64>, Rat)>>;

/// A user-supplied low-dimensional function `g`.
///
/// Implementations must be pure and re-entrant: engines may call them from
/// several worker threads at once.
pub trait ProjectedObjective: Send + Sync + fmt::Debug {
    /// Domain dimension (the number of rows of `W`).
    fn dim(&self) -> usize;

    /// `g(v)`.
    fn eval(&self, v: &[i64]) -> ObjValue;

    /// Whether `g` is convex. Enables binary search on unbounded
    /// one-variable subproblems.
    fn is_convex(&self) -> bool {
        false
    }

    /// Optional dedicated solver for the restricted problem on at most `m`
    /// free variables. Returning `None` falls back to the built-in strategy.
    fn solve_subproblem(&self, _inst: &Instance, _query: &SubproblemQuery<'_>) -> Option<SubproblemAnswer> {
        None
    }
}

/// The function `g` applied to `W x`.
#[derive(Clone, Debug)]
pub enum Objective {
    /// `0` if `v = b`, `+∞` otherwise.
    EqualityIndicator { target: Vec<i64> },
    /// `‖v − b‖²`.
    QuadraticDistance { target: Vec<Rat> },
    /// `Σ_k h_k(v_k)` with each `h_k` convex piecewise linear.
    SeparableConvexPwl { pieces: Vec<ConvexPwl> },
    /// One-dimensional convex penalty; requires `m = 1`.
    KnapsackPenalty(Penalty),
    External(Arc<dyn ProjectedObjective>),
}

impl PartialEq for Objective {
    fn eq(&self, other: &Self) -> bool {
        use Objective::*;
        match (self, other) {
            (EqualityIndicator { target: a }, EqualityIndicator { target: b }) => a == b,
            (QuadraticDistance { target: a }, QuadraticDistance { target: b }) => a == b,
            (SeparableConvexPwl { pieces: a }, SeparableConvexPwl { pieces: b }) => a == b,
            (KnapsackPenalty(a), KnapsackPenalty(b)) => a == b,
            (External(a), External(b)) => Arc::ptr_eq(a, b),
            _ => false,
        }
    }
}

impl Objective {
    pub fn family(&self) -> &'static str {
        match self {
            Objective::EqualityIndicator { .. } => "equality_indicator",
            Objective::QuadraticDistance { .. } => "quadratic_distance",
            Objective::SeparableConvexPwl { .. } => "separable_convex_pwl",
            Objective::KnapsackPenalty(_) => "knapsack_penalty",
            Objective::External(_) => "external",
        }
    }

    /// Convex families, for which one-dimensional subproblems can be solved
    /// by binary search.
    pub fn is_convex(&self) -> bool {
        match self {
            Objective::EqualityIndicator { .. } => false,
            Objective::External(e) => e.is_convex(),
            _ => true,
        }
    }

    /// Domain dimension this objective expects, when it is fixed by its
    /// parameters.
    pub fn dim(&self) -> Option<usize> {
        match self {
            Objective::EqualityIndicator { target } => Some(target.len()),
            Objective::QuadraticDistance { target } => Some(target.len()),
            Objective::SeparableConvexPwl { pieces } => Some(pieces.len()),
            Objective::KnapsackPenalty(_) => Some(1),
            Objective::External(e) => Some(e.dim()),
        }
    }

    /// `g(v)` at an integer point.
    pub fn eval(&self, v: &[i64]) -> ObjValue {
        match self {
            Objective::EqualityIndicator { target } => {
                if v == target.as_slice() {
                    ObjValue::zero()
                } else {
                    ObjValue::Infinite
                }
            }
            Objective::QuadraticDistance { target } => {
                let mut acc = Rat::zero();
                for (vi, bi) in v.iter().zip(target) {
                    let d = rat(*vi) - bi;
                    acc += &d * &d;
                }
                ObjValue::Finite(acc)
            }
            Objective::SeparableConvexPwl { pieces } => ObjValue::Finite(
                pieces
                    .iter()
                    .zip(v)
                    .fold(Rat::zero(), |acc, (p, &vi)| acc + p.eval(vi)),
            ),
            Objective::KnapsackPenalty(p) => ObjValue::Finite(p.eval(v[0])),
            Objective::External(e) => e.eval(v),
        }
    }

    /// `g(v)` at a point with arbitrary-precision coordinates. External
    /// objectives only accept points that fit in `i64`.
    pub fn eval_big(&self, v: &[BigInt]) -> ObjValue {
        match self {
            Objective::EqualityIndicator { target } => {
                let hit = v.iter().zip(target).all(|(a, &b)| *a == BigInt::from(b));
                if hit {
                    ObjValue::zero()
                } else {
                    ObjValue::Infinite
                }
            }
            Objective::QuadraticDistance { target } => {
                let mut acc = Rat::zero();
                for (vi, bi) in v.iter().zip(target) {
                    let d = Rat::from_integer(vi.clone()) - bi;
                    acc += &d * &d;
                }
                ObjValue::Finite(acc)
            }
            Objective::SeparableConvexPwl { pieces } => ObjValue::Finite(
                pieces
                    .iter()
                    .zip(v)
                    .fold(Rat::zero(), |acc, (p, vi)| acc + p.eval_big(vi)),
            ),
            Objective::KnapsackPenalty(p) => {
                ObjValue::Finite(p.eval_rat(&Rat::from_integer(v[0].clone())))
            }
            Objective::External(e) => {
                let small: Option<Vec<i64>> = v.iter().map(|x| i64::try_from(x).ok()).collect();
                match small {
                    Some(s) => e.eval(&s),
                    None => ObjValue::Infinite,
                }
            }
        }
    }

    /// A (sub)gradient of `g` at `v` for the differentiable-or-PWL families;
    /// piecewise-linear pieces report the left slope at breakpoints.
    pub fn subgradient(&self, v: &[Rat]) -> Option<Vec<Rat>> {
        match self {
            Objective::QuadraticDistance { target } => Some(
                v.iter()
                    .zip(target)
                    .map(|(vi, bi)| rat(2) * (vi - bi))
                    .collect(),
            ),
            Objective::SeparableConvexPwl { pieces } => Some(
                pieces
                    .iter()
                    .zip(v)
                    .map(|(p, vi)| p.left_slope(vi))
                    .collect(),
            ),
            Objective::KnapsackPenalty(p) => Some(vec![p.left_slope(&v[0])]),
            _ => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::ratio;

    #[test]
    fn pwl_values() {
        // |v - 1| shifted: slopes -1, +1 around breakpoint 1, value 1 at 0.
        let h = ConvexPwl::new(vec![1], vec![rat(-1), rat(1)], rat(1));
        assert_eq!(h.eval(0), rat(1));
        assert_eq!(h.eval(1), rat(0));
        assert_eq!(h.eval(4), rat(3));
        assert_eq!(h.eval(-2), rat(3));
        assert_eq!(h.eval_rat(&ratio(3, 2)), ratio(1, 2));
        assert_eq!(h.left_slope(&rat(1)), rat(-1));
        assert_eq!(h.left_slope(&ratio(3, 2)), rat(1));
    }

    #[test]
    fn pwl_matches_unit_steps() {
        let h = ConvexPwl::new(vec![-2, 0, 3], vec![rat(-3), ratio(-1, 2), rat(0), rat(2)], rat(5));
        let mut v = rat(5);
        for x in 0..8 {
            assert_eq!(h.eval(x), v);
            v += h.left_slope(&rat(x + 1));
        }
        let mut v = rat(5);
        for x in (-8..0).rev() {
            v -= h.left_slope(&rat(x + 1));
            assert_eq!(h.eval(x), v);
        }
    }

    #[test]
    fn value_order() {
        assert!(ObjValue::Finite(rat(1000)) < ObjValue::Infinite);
        assert!(ObjValue::Finite(rat(-1)) < ObjValue::zero());
        assert_eq!(ObjValue::Infinite.plus(&rat(3)), ObjValue::Infinite);
    }

    #[test]
    fn convexity_check() {
        let bad = ConvexPwl::new(vec![0], vec![rat(1), rat(0)], rat(0));
        let v = bad.violations("objective", 0);
        assert!(v.iter().any(|v| v.message == "non-convex piece"));
    }
}
