//! Builders for common problems expressed as projected programs.
//!
//! Mixed-integer programs and problems with a few complex variables are not
//! built in. They can be encoded through [`Objective::External`] with a
//! [`ProjectedObjective`](crate::model::ProjectedObjective) whose
//! `solve_subproblem` solves the continuous part.

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::model::{Instance, ObjValue, Objective, Penalty, Solution};
use crate::numeric::{rat, IntMat, Rat};
use crate::unknown_w::InstanceOracle;

/// Knapsack with a convex capacity penalty: maximize `Σ pᵢxᵢ − g(Σ wᵢxᵢ)`
/// over `0 ≤ x ≤ u`, stored as the minimization of the negation.
pub fn build_knapsack(profit: &[Rat], weight: &[i64], upper: &[Option<i64>], penalty: Penalty) -> Result<Instance> {
    let n = weight.len();
    if profit.len() != n || upper.len() != n {
        return Err(Error::Parse(format!(
            "knapsack needs matching lengths: {} profits, {n} weights, {} bounds",
            profit.len(),
            upper.len()
        )));
    }
    Instance::new(
        IntMat::from_rows(vec![weight.to_vec()])?,
        profit.iter().map(|p| -p).collect(),
        vec![Some(0); n],
        upper.to_vec(),
        Objective::KnapsackPenalty(penalty),
    )
}

/// Profit of a knapsack solution: the negated minimum.
pub fn knapsack_profit(solution: &Solution) -> Option<Rat> {
    match &solution.value {
        ObjValue::Finite(v) => Some(-v),
        ObjValue::Infinite => None,
    }
}

/// `min cᵀx` subject to `Ax = b` and box bounds.
pub fn build_equality_ilp(
    a: IntMat,
    b: Vec<i64>,
    c: Vec<Rat>,
    lower: Vec<Option<i64>>,
    upper: Vec<Option<i64>>,
) -> Result<Instance> {
    Instance::new(a, c, lower, upper, Objective::EqualityIndicator { target: b })
}

/// `min ‖b − Wx‖²` over `{0,1}^n`. Returns the gradient oracle that hides
/// `W` and the instance itself for reference solving.
pub fn build_compressed_sensing(w_hidden: IntMat, b: Vec<Rat>) -> Result<(InstanceOracle, Instance)> {
    let n = w_hidden.cols();
    let inst = Instance::new(
        w_hidden,
        vec![Rat::zero(); n],
        vec![Some(0); n],
        vec![Some(1); n],
        Objective::QuadraticDistance { target: b },
    )?;
    Ok((InstanceOracle::new(inst.clone())?, inst))
}

/// Integer target variant of [`build_compressed_sensing`].
pub fn build_compressed_sensing_int(w_hidden: IntMat, b: &[i64]) -> Result<(InstanceOracle, Instance)> {
    build_compressed_sensing(w_hidden, b.iter().map(|&v| rat(v)).collect())
}
