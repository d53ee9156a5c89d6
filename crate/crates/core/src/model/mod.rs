//! Problem instances `min cᵀx + g(Wx)` over an integer box, their
//! solutions, validation and exact evaluation.

mod merge;
mod objective;

pub use merge::{distinct_column_limit, merge_duplicate_columns, MergeMap};
pub use objective::{ConvexPwl, ObjValue, Objective, Penalty, ProjectedObjective, SubproblemAnswer};

use std::cmp::Ordering;
use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};

use crate::error::{Error, Result, Violation};
use crate::numeric::{IntMat, Rat};

/// A box-constrained integer program with a projected objective.
///
/// `None` in `lower` stands for `−∞`, in `upper` for `+∞`.
#[derive(Clone, Debug, PartialEq)]
pub struct Instance {
    pub w: IntMat,
    pub c: Vec<Rat>,
    pub lower: Vec<Option<i64>>,
    pub upper: Vec<Option<i64>>,
    pub objective: Objective,
}

impl Instance {
    /// Builds and validates an instance.
    pub fn new(
        w: IntMat,
        c: Vec<Rat>,
        lower: Vec<Option<i64>>,
        upper: Vec<Option<i64>>,
        objective: Objective,
    ) -> Result<Self> {
        let inst = Self {
            w,
            c,
            lower,
            upper,
            objective,
        };
        validate(&inst).map_err(Error::Invalid)?;
        Ok(inst)
    }

    pub fn m(&self) -> usize {
        self.w.rows()
    }

    pub fn n(&self) -> usize {
        self.w.cols()
    }

    pub fn delta(&self) -> i64 {
        self.w.delta()
    }

    pub fn all_bounds_finite(&self) -> bool {
        self.lower.iter().chain(&self.upper).all(Option::is_some)
    }

    pub fn in_bounds(&self, i: usize, v: i64) -> bool {
        self.lower[i].is_none_or(|l| l <= v) && self.upper[i].is_none_or(|u| v <= u)
    }

    /// Exact objective value of `x`; `+∞` when `x` leaves the box or `g`
    /// is infinite at `Wx`.
    pub fn evaluate(&self, x: &[i64]) -> ObjValue {
        evaluate(self, x)
    }

    pub fn linear_cost(&self, x: &[i64]) -> Rat {
        self.c
            .iter()
            .zip(x)
            .filter(|(_, &xi)| xi != 0)
            .fold(Rat::zero(), |acc, (ci, &xi)| acc + ci * Rat::from_integer(BigInt::from(xi)))
    }
}

/// Validates dimensions, bound ordering, objective parameters and the
/// cached Δ.
pub fn validate(inst: &Instance) -> std::result::Result<(), Vec<Violation>> {
    let mut out = Vec::new();
    let (m, n) = (inst.m(), inst.n());
    if m == 0 {
        out.push(Violation::new("W", None, "needs at least one row"));
    }
    if n == 0 {
        out.push(Violation::new("W", None, "needs at least one column"));
    }
    if inst.c.len() != n {
        out.push(Violation::new("c", None, format!("length {} but n = {n}", inst.c.len())));
    }
    if inst.lower.len() != n {
        out.push(Violation::new("lower", None, format!("length {} but n = {n}", inst.lower.len())));
    }
    if inst.upper.len() != n {
        out.push(Violation::new("upper", None, format!("length {} but n = {n}", inst.upper.len())));
    }
    for (i, (l, u)) in inst.lower.iter().zip(&inst.upper).enumerate() {
        if let (Some(l), Some(u)) = (l, u) {
            if l > u {
                out.push(Violation::new("bounds", Some(i), "bound order"));
            }
        }
    }
    let true_delta = (0..m)
        .flat_map(|r| inst.w.row(r).iter().map(|v| v.abs()))
        .max()
        .unwrap_or(0);
    if true_delta != inst.delta() {
        out.push(Violation::new("W", None, "cached delta differs from the largest entry"));
    }
    if let Some(d) = inst.objective.dim() {
        if d != m {
            out.push(Violation::new(
                "objective",
                None,
                format!("expects dimension {d} but W has {m} rows"),
            ));
        }
    }
    match &inst.objective {
        Objective::SeparableConvexPwl { pieces } => {
            for (k, p) in pieces.iter().enumerate() {
                out.extend(p.violations("objective.pieces", k));
            }
        }
        Objective::KnapsackPenalty(p) => out.extend(p.violations()),
        _ => {}
    }
    if out.is_empty() {
        Ok(())
    } else {
        Err(out)
    }
}

pub fn evaluate(inst: &Instance, x: &[i64]) -> ObjValue {
    if x.len() != inst.n() || (0..x.len()).any(|i| !inst.in_bounds(i, x[i])) {
        return ObjValue::Infinite;
    }
    let wx = inst.w.mul_vec(x);
    inst.objective.eval(&wx).plus(&inst.linear_cost(x))
}

/// `m (2mΔ + 1)^m`, the ℓ₁ distance within which some optimal integer point
/// lies from an optimal vertex of the relaxation with the same right-hand
/// side.
pub fn proximity_bound(m: u64, delta: u64) -> BigUint {
    let base = BigUint::from(2u64) * BigUint::from(m) * BigUint::from(delta) + BigUint::one();
    BigUint::from(m) * num_traits::pow(base, m as usize)
}

/// Same as [`proximity_bound`] saturated into a `u64`.
pub fn proximity_bound_u64(m: u64, delta: u64) -> u64 {
    u64::try_from(proximity_bound(m, delta)).unwrap_or(u64::MAX)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Status {
    Optimal,
    Infeasible,
    /// Best point found by a truncated search; no optimality claim.
    Heuristic,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Optimal => "optimal",
            Status::Infeasible => "infeasible",
            Status::Heuristic => "heuristic",
        }
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Solution {
    /// `None` when no point with finite value was found.
    pub x: Option<Vec<i64>>,
    pub value: ObjValue,
    pub status: Status,
}

impl Solution {
    pub fn infeasible() -> Self {
        Self {
            x: None,
            value: ObjValue::Infinite,
            status: Status::Infeasible,
        }
    }
}

/// Ordering shared by every solver: smaller value first, then the
/// lexicographically smaller point.
pub fn compare_candidates(a: (&ObjValue, &[i64]), b: (&ObjValue, &[i64])) -> Ordering {
    a.0.cmp(b.0).then_with(|| a.1.cmp(b.1))
}

/// Running minimum under [`compare_candidates`].
#[derive(Clone, Debug, Default)]
pub struct Incumbent {
    pub best: Option<(Rat, Vec<i64>)>,
}

impl Incumbent {
    /// Whether a candidate of value `v` could still replace the incumbent
    /// (strictly better value, or a tie that needs the point to decide).
    pub fn admits(&self, v: &Rat) -> bool {
        match &self.best {
            None => true,
            Some((b, _)) => v <= b,
        }
    }

    /// Offers a candidate; returns true when it became the incumbent.
    pub fn offer(&mut self, v: Rat, x: Vec<i64>) -> bool {
        let better = match &self.best {
            None => true,
            Some((bv, bx)) => (&v, &x) < (bv, bx),
        };
        if better {
            self.best = Some((v, x));
        }
        better
    }

    pub fn merge(&mut self, other: Incumbent) {
        if let Some((v, x)) = other.best {
            self.offer(v, x);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::rat;

    fn inst(w: Vec<Vec<i64>>, c: Vec<i64>, lo: i64, hi: i64, objective: Objective) -> Instance {
        let n = c.len();
        Instance::new(
            IntMat::from_rows(w).unwrap(),
            c.into_iter().map(rat).collect(),
            vec![Some(lo); n],
            vec![Some(hi); n],
            objective,
        )
        .unwrap()
    }

    #[test]
    fn evaluate_indicator() {
        let i = inst(vec![vec![1, 2]], vec![1, 1], 0, 5, Objective::EqualityIndicator { target: vec![3] });
        assert_eq!(i.evaluate(&[1, 1]), ObjValue::Finite(rat(2)));
        assert_eq!(i.evaluate(&[1, 0]), ObjValue::Infinite);
        assert_eq!(i.evaluate(&[6, 0]), ObjValue::Infinite);
    }

    #[test]
    fn evaluate_quadratic() {
        let i = inst(vec![vec![1, 1]], vec![0, 0], 0, 1, Objective::QuadraticDistance { target: vec![rat(2)] });
        assert_eq!(i.evaluate(&[1, 0]), ObjValue::Finite(rat(1)));
    }

    #[test]
    fn validation_reports_bound_order() {
        let i = Instance {
            w: IntMat::from_rows(vec![vec![1]]).unwrap(),
            c: vec![rat(0)],
            lower: vec![Some(2)],
            upper: vec![Some(1)],
            objective: Objective::QuadraticDistance { target: vec![rat(0)] },
        };
        let v = validate(&i).unwrap_err();
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].to_string(), "bounds: bound order at index 0");
    }

    #[test]
    fn validation_reports_nonconvex_pwl() {
        let i = Instance {
            w: IntMat::from_rows(vec![vec![1]]).unwrap(),
            c: vec![rat(0)],
            lower: vec![Some(0)],
            upper: vec![Some(1)],
            objective: Objective::SeparableConvexPwl {
                pieces: vec![ConvexPwl::new(vec![0], vec![rat(1), rat(0)], rat(0))],
            },
        };
        let v = validate(&i).unwrap_err();
        assert!(v.iter().any(|v| v.message == "non-convex piece"));
    }

    #[test]
    fn validation_reports_dimensions() {
        let i = Instance {
            w: IntMat::from_rows(vec![vec![1, 1], vec![0, 1]]).unwrap(),
            c: vec![rat(0)],
            lower: vec![None, None],
            upper: vec![None],
            objective: Objective::KnapsackPenalty(Penalty::Quadratic { a: rat(-1), b: rat(0), c: rat(0) }),
        };
        let v = validate(&i).unwrap_err();
        let fields: Vec<&str> = v.iter().map(|v| v.field.as_str()).collect();
        assert!(fields.contains(&"c"));
        assert!(fields.contains(&"upper"));
        assert!(fields.contains(&"objective"));
        assert!(fields.contains(&"objective.penalty"));
    }

    #[test]
    fn proximity_values() {
        assert_eq!(proximity_bound(1, 1), BigUint::from(3u32));
        assert_eq!(proximity_bound(2, 1), BigUint::from(50u32));
        assert_eq!(proximity_bound(1, 0), BigUint::from(1u32));
        assert_eq!(proximity_bound(2, 2), BigUint::from(162u32));
    }

    #[test]
    fn incumbent_tie_break() {
        let mut inc = Incumbent::default();
        assert!(inc.offer(rat(1), vec![1, 0]));
        assert!(inc.offer(rat(1), vec![0, 1]));
        assert!(!inc.offer(rat(1), vec![0, 2]));
        assert!(!inc.offer(rat(2), vec![0, 0]));
        assert_eq!(inc.best.unwrap().1, vec![0, 1]);
    }
}
