//! Minimum-cost recovery of the tight variables for a fixed projection
//! target.
//!
//! Given columns `W_T`, costs `c_T`, a box, a centre `z_T` and a budget `P`,
//! the table answers, for every residual `r`,
//! `min { c_Tᵀ x_T : W_T (x_T − z_T) = r, ‖x_T − z_T‖₁ ≤ P, x_T in the box }`.
//!
//! The table is built backwards over the variables (suffix tables), so a
//! forward walk can pick the smallest feasible deviation at every step: the
//! reconstructed point is the lexicographically smallest minimiser.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::iter;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::numeric::{rat, Rat};

/// Default cap on the number of stored states across all stages.
pub const DEFAULT_STATE_LIMIT: usize = 20_000_000;

/// Variable data for one table: columns of `W_T`, costs, bounds and centre.
#[derive(Clone, Debug)]
pub struct DpInput<'a> {
    pub columns: Vec<Vec<i64>>,
    pub costs: Vec<&'a Rat>,
    pub lower: Vec<Option<i64>>,
    pub upper: Vec<Option<i64>>,
    pub center: Vec<i64>,
    /// Row count of `W` (needed when there are no columns).
    pub m: usize,
    /// Δ, used for the reported residual radius.
    pub delta: i64,
}

#[derive(Clone, Debug)]
pub struct DpTable {
    m: usize,
    columns: Vec<Vec<i64>>,
    center: Vec<i64>,
    center_cost: Rat,
    cost_nums: Vec<i128>,
    cost_den: BigInt,
    dev: Vec<(i64, i64)>,
    budget: u64,
    track_budget: bool,
    radii: Vec<i64>,
    strides: Vec<u64>,
    used_slots: u64,
    ball_radius: u64,
    suffix: Vec<HashMap<u64, i128>>,
    best: HashMap<u64, i128>,
}

fn scale_costs(costs: &[&Rat]) -> Result<(Vec<i128>, BigInt)> {
    let den = costs.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    let nums = costs
        .iter()
        .map(|c| i128::try_from(c.numer() * (&den / c.denom())).map_err(|_| Error::Overflow("scaled DP cost")))
        .collect::<Result<Vec<_>>>()?;
    Ok((nums, den))
}

/// Builds the suffix tables. `state_limit` caps the total number of
/// stored `(residual, used budget)` states.
pub fn build_dp(input: &DpInput<'_>, budget: u64, state_limit: usize) -> Result<DpTable> {
    let t = input.columns.len();
    let m = input.m;
    let p = budget.min(i64::MAX as u64 / 4) as i64;

    let dev: Vec<(i64, i64)> = (0..t)
        .map(|j| {
            let z = input.center[j];
            let lo = input.lower[j].map_or(-p, |l| (l - z).max(-p));
            let hi = input.upper[j].map_or(p, |u| (u - z).min(p));
            debug_assert!(lo <= 0 && 0 <= hi, "centre must lie in the box");
            (lo, hi)
        })
        .collect();
    let max_dev: Vec<i64> = dev.iter().map(|&(lo, hi)| lo.abs().max(hi)).collect();
    let total_dev: i128 = max_dev.iter().map(|&d| d as i128).sum();
    let track_budget = total_dev > p as i128;

    let ball_radius = (input.delta.max(0) as u64).saturating_mul(budget);
    let radii: Vec<i64> = (0..m)
        .map(|k| {
            let reach: i128 = (0..t)
                .map(|j| input.columns[j][k].abs() as i128 * max_dev[j] as i128)
                .sum();
            let reach = if track_budget {
                reach.min(input.delta as i128 * p as i128)
            } else {
                reach
            };
            i64::try_from(reach).map_err(|_| Error::Overflow("DP residual radius"))
        })
        .collect::<Result<_>>()?;

    let used_slots: u64 = if track_budget { p as u64 + 1 } else { 1 };
    let mut strides = Vec::with_capacity(m);
    let mut span: u64 = used_slots;
    for &r in &radii {
        strides.push(span);
        span = span
            .checked_mul(2 * r as u64 + 1)
            .ok_or(Error::Overflow("DP state index"))?;
    }

    let (cost_nums, cost_den) = scale_costs(&input.costs)?;
    for (j, &(lo, hi)) in dev.iter().enumerate() {
        let worst = cost_nums[j].checked_mul(lo.abs().max(hi) as i128);
        if worst.is_none_or(|w| w.checked_mul(t.max(1) as i128).is_none()) {
            return Err(Error::Overflow("DP cost"));
        }
    }
    let center_cost = input
        .costs
        .iter()
        .zip(&input.center)
        .fold(Rat::zero(), |acc, (c, &z)| acc + *c * rat(z));

    let origin: u64 = radii.iter().zip(&strides).map(|(&r, &s)| r as u64 * s).sum();
    let mut suffix: Vec<HashMap<u64, i128>> = vec![HashMap::new(); t + 1];
    suffix[t].insert(origin, 0);
    let mut total_states = 1usize;

    for j in (0..t).rev() {
        let col_step: i128 = input.columns[j]
            .iter()
            .zip(&strides)
            .map(|(&w, &s)| w as i128 * s as i128)
            .sum();
        let (lo, hi) = dev[j];
        let num = cost_nums[j];
        let mut cur: HashMap<u64, i128> = HashMap::with_capacity(suffix[j + 1].len() * 2);
        for (&key, &cost) in &suffix[j + 1] {
            let used = key % used_slots;
            for d in lo..=hi {
                let ad = d.unsigned_abs();
                if track_budget && used + ad > p as u64 {
                    continue;
                }
                let step = d as i128 * col_step + if track_budget { ad as i128 } else { 0 };
                let nk = (key as i128 + step) as u64;
                let nc = cost + num * d as i128;
                cur.entry(nk)
                    .and_modify(|c| {
                        if nc < *c {
                            *c = nc
                        }
                    })
                    .or_insert(nc);
            }
        }
        total_states += cur.len();
        if total_states > state_limit {
            return Err(Error::StateLimit { limit: state_limit });
        }
        suffix[j] = cur;
    }

    let mut best: HashMap<u64, i128> = HashMap::new();
    for (&key, &cost) in &suffix[0] {
        let r = key / used_slots;
        best.entry(r)
            .and_modify(|c| {
                if cost < *c {
                    *c = cost
                }
            })
            .or_insert(cost);
    }

    Ok(DpTable {
        m,
        columns: input.columns.clone(),
        center: input.center.clone(),
        center_cost,
        cost_nums,
        cost_den,
        dev,
        budget,
        track_budget,
        radii,
        strides,
        used_slots,
        ball_radius,
        suffix,
        best,
    })
}

impl DpTable {
    pub fn center(&self) -> &[i64] {
        &self.center
    }

    pub fn budget(&self) -> u64 {
        self.budget
    }

    /// `Δ·P`: no stored residual exceeds it in any coordinate.
    pub fn ball_radius(&self) -> u64 {
        self.ball_radius
    }

    /// Whether the budget can cut off some point of the box.
    pub fn budget_binds(&self) -> bool {
        self.track_budget
    }

    /// Total number of stored states over all stages.
    pub fn state_count(&self) -> usize {
        self.suffix.iter().map(HashMap::len).sum()
    }

    /// `W_T z_T`.
    pub fn center_image(&self) -> Vec<i64> {
        (0..self.m)
            .map(|k| self.columns.iter().zip(&self.center).map(|(c, z)| c[k] * z).sum())
            .collect()
    }

    fn residual_index(&self, r: &[i64]) -> Option<u64> {
        let mut idx = 0u64;
        for ((&v, &radius), &stride) in r.iter().zip(&self.radii).zip(&self.strides).take(self.m) {
            if v.abs() > radius {
                return None;
            }
            idx += (v + radius) as u64 * (stride / self.used_slots);
        }
        Some(idx)
    }

    fn decode_residual(&self, mut idx: u64) -> Vec<i64> {
        self.radii[..self.m]
            .iter()
            .map(|&radius| {
                let width = 2 * radius as u64 + 1;
                let v = (idx % width) as i64 - radius;
                idx /= width;
                v
            })
            .collect()
    }

    fn to_rat(&self, scaled: i128) -> Rat {
        Rat::new(BigInt::from(scaled), self.cost_den.clone()) + &self.center_cost
    }

    /// Reachable residuals with their minimal cost `c_Tᵀ x_T`, in graded
    /// order (see [`graded_cmp`]).
    pub fn reachable(&self) -> Vec<(Vec<i64>, Rat)> {
        let mut out: Vec<(Vec<i64>, i128)> = self
            .best
            .iter()
            .map(|(&idx, &c)| (self.decode_residual(idx), c))
            .collect();
        out.sort_by(|a, b| graded_cmp(&a.0, &b.0));
        out.into_iter().map(|(r, c)| (r, self.to_rat(c))).collect()
    }

    /// Minimal cost for a residual, without reconstructing the point.
    pub fn min_cost(&self, residual: &[i64]) -> Option<Rat> {
        let idx = self.residual_index(residual)?;
        self.best.get(&idx).map(|&c| self.to_rat(c))
    }

    /// Lexicographically smallest minimiser `x_T` and its cost `c_Tᵀ x_T`
    /// for a residual `W_T (x_T − z_T)`, or `None` when unreachable.
    pub fn query(&self, residual: &[i64]) -> Option<(Vec<i64>, Rat)> {
        let idx = self.residual_index(residual)?;
        let &target = self.best.get(&idx)?;
        let mut rem: Vec<i64> = residual.to_vec();
        let mut rem_cost = target;
        let mut rem_budget = self.budget.min(i64::MAX as u64 / 4);
        let mut x = Vec::with_capacity(self.columns.len());
        for j in 0..self.columns.len() {
            let (lo, hi) = self.dev[j];
            let chosen = (lo..=hi).find(|&d| {
                let ad = d.unsigned_abs();
                if self.track_budget && ad > rem_budget {
                    return false;
                }
                let next: Vec<i64> = rem.iter().zip(&self.columns[j]).map(|(r, w)| r - w * d).collect();
                let Some(nidx) = self.residual_index(&next) else {
                    return false;
                };
                let want = rem_cost - self.cost_nums[j] * d as i128;
                let table = &self.suffix[j + 1];
                if self.track_budget {
                    (0..=rem_budget - ad).any(|u| table.get(&(nidx * self.used_slots + u)) == Some(&want))
                } else {
                    table.get(&nidx) == Some(&want)
                }
            })?;
            for (r, w) in rem.iter_mut().zip(&self.columns[j]) {
                *r -= w * chosen;
            }
            rem_cost -= self.cost_nums[j] * chosen as i128;
            rem_budget -= chosen.unsigned_abs();
            x.push(self.center[j] + chosen);
        }
        debug_assert!(rem.iter().all(|&r| r == 0) && rem_cost == 0);
        Some((x, self.to_rat(target)))
    }
}

pub fn l1_norm(v: &[i64]) -> u64 {
    v.iter().map(|x| x.unsigned_abs()).sum()
}

/// Order of the target ball: by ℓ₁ norm, then coordinate by coordinate with
/// larger magnitudes first and negative before positive.
pub fn graded_cmp(a: &[i64], b: &[i64]) -> Ordering {
    l1_norm(a).cmp(&l1_norm(b)).then_with(|| {
        for (x, y) in a.iter().zip(b) {
            let o = y.abs().cmp(&x.abs()).then(x.cmp(y));
            if o != Ordering::Equal {
                return o;
            }
        }
        Ordering::Equal
    })
}

fn ring(dims: usize, radius: u64, prefix: &mut Vec<i64>, out: &mut Vec<Vec<i64>>) {
    if dims == 1 {
        let r = radius as i64;
        if r == 0 {
            out.push(prefix.iter().copied().chain(iter::once(0)).collect());
        } else {
            out.push(prefix.iter().copied().chain(iter::once(-r)).collect());
            out.push(prefix.iter().copied().chain(iter::once(r)).collect());
        }
        return;
    }
    for a in (0..=radius as i64).rev() {
        let signs: &[i64] = if a == 0 { &[0] } else { &[-a, a] };
        for &s in signs {
            prefix.push(s);
            ring(dims - 1, radius - a as u64, prefix, out);
            prefix.pop();
        }
    }
}

/// Integer points of the ℓ₁ sphere of the given radius around the origin,
/// in [`graded_cmp`] order.
pub fn ball_ring(dims: usize, radius: u64) -> Vec<Vec<i64>> {
    let mut out = Vec::new();
    if dims == 0 {
        if radius == 0 {
            out.push(Vec::new());
        }
        return out;
    }
    ring(dims, radius, &mut Vec::with_capacity(dims), &mut out);
    out
}

/// Lattice points `b` with `‖b − center‖₁ ≤ radius`, ring by ring.
pub fn enumerate_target_ball(center: &[i64], radius: u64) -> impl Iterator<Item = Vec<i64>> + '_ {
    (0..=radius).flat_map(move |rho| {
        ball_ring(center.len(), rho)
            .into_iter()
            .map(move |d| d.iter().zip(center).map(|(a, c)| a + c).collect())
    })
}
