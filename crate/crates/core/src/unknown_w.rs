//! Binary optimization of `f(x) = g(Wx)` over `{0,1}^n` when `W` is hidden.
//!
//! Every gradient `∇f(x) = Wᵀ∇g(Wx)` lies in the row space of `W`, so the
//! independent gradients seen so far form a proxy `W′`. Points that `W′`
//! cannot tell apart are represented by one point closest to the rounded
//! relaxation; a new independent gradient refines `W′` and restarts the
//! scan, which happens at most `m` times.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::{Incumbent, Instance, ObjValue, Objective, Solution, Status};
use crate::numeric::{rank_of_rows, rat, Rat, RatVec};

/// Function and gradient access to `f` on `{0,1}^n`. Implementations must
/// be pure; evaluations may run concurrently.
pub trait GradientOracle: Send + Sync {
    fn n(&self) -> usize;
    /// Declared row count of the hidden matrix.
    fn m(&self) -> usize;
    /// Declared largest absolute entry of the hidden matrix.
    fn delta(&self) -> i64;
    fn is_convex(&self) -> bool {
        true
    }
    fn eval(&self, x: &[i64]) -> Rat;
    /// A (sub)gradient of `f` at `x`, length `n`.
    fn gradient(&self, x: &[i64]) -> RatVec;
}

/// Oracle backed by a known instance with `c = 0`, for testing and demos.
/// Piecewise-linear pieces report their left slope at breakpoints.
#[derive(Clone, Debug)]
pub struct InstanceOracle {
    inst: Instance,
}

impl InstanceOracle {
    pub fn new(inst: Instance) -> Result<Self> {
        if inst.c.iter().any(|c| !c.is_zero()) {
            return Err(Error::Precondition("the gradient adapter needs c = 0".into()));
        }
        if inst.objective.subgradient(&vec![rat(0); inst.m()]).is_none() {
            return Err(Error::Precondition(format!(
                "no closed-form gradient for objective {}",
                inst.objective.family()
            )));
        }
        Ok(Self { inst })
    }

    pub fn instance(&self) -> &Instance {
        &self.inst
    }
}

impl GradientOracle for InstanceOracle {
    fn n(&self) -> usize {
        self.inst.n()
    }

    fn m(&self) -> usize {
        self.inst.m()
    }

    fn delta(&self) -> i64 {
        self.inst.delta()
    }

    fn is_convex(&self) -> bool {
        self.inst.objective.is_convex()
    }

    fn eval(&self, x: &[i64]) -> Rat {
        let v = self.inst.w.mul_vec(x);
        match self.inst.objective.eval(&v) {
            ObjValue::Finite(r) => r,
            ObjValue::Infinite => unreachable!("objectives with gradients are finite"),
        }
    }

    fn gradient(&self, x: &[i64]) -> RatVec {
        let v: Vec<Rat> = self.inst.w.mul_vec(x).into_iter().map(rat).collect();
        let g = self.inst.objective.subgradient(&v).expect("checked in new");
        (0..self.inst.n())
            .map(|j| {
                (0..self.inst.m()).fold(Rat::zero(), |acc, r| acc + &g[r] * rat(self.inst.w.get(r, j)))
            })
            .collect()
    }
}

impl fmt::Debug for dyn GradientOracle + '_ {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GradientOracle(n={}, m={})", self.n(), self.m())
    }
}

/// Linearly independent gradients recorded so far.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct GradientBasis {
    rows: Vec<RatVec>,
}

impl GradientBasis {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn rows(&self) -> &[RatVec] {
        &self.rows
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Appends `row` when it is independent of the current rows.
    pub fn insert(&mut self, row: RatVec) -> bool {
        if row.iter().all(Zero::is_zero) {
            return false;
        }
        self.rows.push(row);
        if rank_of_rows(&self.rows) > self.rows.len() - 1 {
            true
        } else {
            self.rows.pop();
            false
        }
    }

    /// `W′x`.
    pub fn apply(&self, x: &[i64]) -> RatVec {
        self.rows
            .iter()
            .map(|r| r.iter().zip(x).filter(|(_, &b)| b != 0).fold(Rat::zero(), |acc, (a, &b)| acc + a * rat(b)))
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BnEntry {
    /// `‖x − anchor‖₁`, minimal over all preimages of the key.
    pub distance: u64,
    /// Lexicographically smallest preimage at that distance.
    pub x: Vec<i64>,
}

/// Values `W′x` over `{x ∈ {0,1}^n : ‖x − anchor‖₁ ≤ N}` with a
/// representative each.
#[derive(Clone, Debug)]
pub struct BnMap {
    pub anchor: Vec<i64>,
    pub budget: u64,
    pub entries: BTreeMap<RatVec, BnEntry>,
}

impl BnMap {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, key: &[Rat]) -> Option<&BnEntry> {
        self.entries.get(key)
    }
}

/// Builds the map one coordinate at a time: stage `j` keeps every entry and
/// adds the entries obtained by flipping bit `j` (adding column `j` of `W′`
/// when the anchor bit is 0, subtracting it when 1) while budget remains.
/// Only the closest representative of a key can lead to a closest
/// representative later, so one entry per key suffices.
pub fn enumerate_bn(basis: &GradientBasis, anchor: &[i64], budget: u64) -> BnMap {
    let n = anchor.len();
    let mut entries = BTreeMap::new();
    entries.insert(
        basis.apply(anchor),
        BnEntry {
            distance: 0,
            x: anchor.to_vec(),
        },
    );
    for j in 0..n {
        let column: RatVec = basis.rows.iter().map(|r| r[j].clone()).collect();
        let sign = if anchor[j] == 0 { 1 } else { -1 };
        let snapshot: Vec<(RatVec, BnEntry)> = entries
            .iter()
            .filter(|(_, e)| e.distance < budget)
            .map(|(k, e)| (k.clone(), e.clone()))
            .collect();
        for (key, e) in snapshot {
            let shifted: RatVec = key
                .iter()
                .zip(&column)
                .map(|(k, c)| if sign > 0 { k + c } else { k - c })
                .collect();
            let mut x = e.x;
            x[j] = 1 - anchor[j];
            let cand = BnEntry {
                distance: e.distance + 1,
                x,
            };
            match entries.get_mut(&shifted) {
                Some(cur) => {
                    if (cand.distance, &cand.x) < (cur.distance, &cur.x) {
                        *cur = cand;
                    }
                }
                None => {
                    entries.insert(shifted, cand);
                }
            }
        }
    }
    BnMap {
        anchor: anchor.to_vec(),
        budget,
        entries,
    }
}

#[derive(Clone, Debug)]
pub struct UnknownWOptions {
    /// Search budget `N`.
    pub budget: u64,
    pub jobs: usize,
}

#[derive(Clone, Debug)]
pub struct UnknownWReport {
    pub solution: Solution,
    pub basis: GradientBasis,
    /// Rows added to the basis.
    pub insertions: usize,
    /// Enumerations of the value map.
    pub passes: usize,
    pub evaluations: u64,
    /// Size of the value map in the last pass.
    pub last_map_size: usize,
    /// Fractional entries of the relaxed point.
    pub fractional: usize,
}

/// Rounds `z` down, returning the anchor and the number of fractional
/// entries.
fn check_relaxed_point(z: &[Rat], n: usize) -> Result<(Vec<i64>, usize)> {
    if z.len() != n {
        return Err(Error::Precondition(format!("relaxed point has length {}, expected {n}", z.len())));
    }
    let mut fractional = 0;
    let mut anchor = Vec::with_capacity(n);
    for (i, zi) in z.iter().enumerate() {
        if *zi < rat(0) || *zi > rat(1) {
            return Err(Error::Precondition(format!("relaxed point leaves [0,1] at index {i}")));
        }
        if !zi.is_integer() {
            fractional += 1;
        }
        anchor.push(zi.floor().to_integer().to_i64().expect("within [0,1]"));
    }
    Ok((anchor, fractional))
}

/// Minimizes the oracle's `f` over `{0,1}^n` starting from a relaxed
/// minimizer `z`, expected to have at most `m` fractional entries (more are
/// accepted and reported). The result is labelled optimal when `N ≥ n`,
/// which covers the whole cube.
pub fn solve_unknown_w(oracle: &dyn GradientOracle, z: &[Rat], opts: &UnknownWOptions) -> Result<UnknownWReport> {
    let (n, m) = (oracle.n(), oracle.m());
    let (anchor, fractional) = check_relaxed_point(z, n)?;

    let mut basis = GradientBasis::new();
    let mut insertions = 0;
    if basis.insert(oracle.gradient(&anchor)) {
        insertions += 1;
    }
    let mut best = Incumbent::default();
    let mut passes = 0;
    let mut evaluations = 0u64;
    let mut last_map_size;

    loop {
        passes += 1;
        let map = enumerate_bn(&basis, &anchor, opts.budget);
        last_map_size = map.len();
        let points: Vec<&Vec<i64>> = map.entries.values().map(|e| &e.x).collect();
        let probes: Vec<(Rat, RatVec)> = if opts.jobs > 1 {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(opts.jobs)
                .build()
                .map_err(|e| Error::Internal(format!("worker pool: {e}")))?;
            pool.install(|| points.par_iter().map(|x| (oracle.eval(x), oracle.gradient(x))).collect())
        } else {
            Vec::new()
        };

        let mut grew = false;
        for (i, x) in points.iter().enumerate() {
            let (value, grad) = match probes.get(i) {
                Some((v, g)) => (v.clone(), g.clone()),
                None => (oracle.eval(x), oracle.gradient(x)),
            };
            evaluations += 1;
            best.offer(value, x.to_vec());
            if basis.insert(grad) {
                insertions += 1;
                if basis.rank() > m {
                    return Err(Error::ContractViolation(format!(
                        "gradient raised the basis rank to {} beyond the declared m = {m}",
                        basis.rank()
                    )));
                }
                grew = true;
                break;
            }
        }
        if !grew {
            break;
        }
    }

    let (value, x) = best.best.expect("the anchor is always evaluated");
    Ok(UnknownWReport {
        solution: Solution {
            x: Some(x),
            value: ObjValue::Finite(value),
            status: if opts.budget >= n as u64 { Status::Optimal } else { Status::Heuristic },
        },
        basis,
        insertions,
        passes,
        evaluations,
        last_map_size,
        fractional,
    })
}

/// Compressed-sensing objective `‖b − Wx‖²` as an oracle over `{0,1}^n`.
pub fn quadratic_oracle(inst: &Instance) -> Result<InstanceOracle> {
    match inst.objective {
        Objective::QuadraticDistance { .. } => InstanceOracle::new(inst.clone()),
        _ => Err(Error::Precondition("expected a quadratic-distance objective".into())),
    }
}
