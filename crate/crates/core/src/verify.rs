//! Ground truth for tests: exhaustive box scan and seeded random instances.
//!
//! The generator uses ChaCha8 seeded through `SeedableRng::seed_from_u64`,
//! so a seed denotes the same instance on every platform.

use num_traits::Zero;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::applications::build_compressed_sensing;
use crate::error::{Error, Result};
use crate::model::{ConvexPwl, Incumbent, Instance, ObjValue, Objective, Penalty, Solution};
use crate::numeric::{ratio, rat, IntMat, Rat};
use crate::unknown_w::InstanceOracle;

pub const DEFAULT_VOLUME_LIMIT: u128 = 1_000_000;

#[derive(Clone, Debug)]
pub struct BruteForceOptions {
    /// Replaces `±∞` bounds by `±cap`. Without it, infinite bounds are an
    /// error.
    pub cap_infinite: Option<i64>,
    pub volume_limit: u128,
}

impl Default for BruteForceOptions {
    fn default() -> Self {
        Self {
            cap_infinite: None,
            volume_limit: DEFAULT_VOLUME_LIMIT,
        }
    }
}

/// Scans the (capped) box in lexicographic order and keeps the first point
/// of minimum value, which is the tie-break every engine uses.
pub fn brute_force_solve(inst: &Instance, opts: &BruteForceOptions) -> Result<Solution> {
    let n = inst.n();
    let mut lo = Vec::with_capacity(n);
    let mut hi = Vec::with_capacity(n);
    for i in 0..n {
        let cap = |b: Option<i64>, sign: i64| match (b, opts.cap_infinite) {
            (Some(v), _) => Ok(v),
            (None, Some(c)) => Ok(sign * c),
            (None, None) => Err(Error::Precondition(format!(
                "infinite bound at index {i}; supply a cap for brute force"
            ))),
        };
        let l = cap(inst.lower[i], -1)?;
        let u = cap(inst.upper[i], 1)?;
        if l > u {
            return Ok(Solution::infeasible());
        }
        lo.push(l);
        hi.push(u);
    }
    let volume = lo
        .iter()
        .zip(&hi)
        .try_fold(1u128, |acc, (&l, &u)| acc.checked_mul((u - l) as u128 + 1))
        .unwrap_or(u128::MAX);
    if volume > opts.volume_limit {
        return Err(Error::VolumeLimit {
            volume,
            limit: opts.volume_limit,
        });
    }

    let mut best = Incumbent::default();
    let mut x = lo.clone();
    loop {
        let wx = inst.w.mul_vec(&x);
        if let ObjValue::Finite(g) = inst.objective.eval(&wx) {
            let v = g + inst.linear_cost(&x);
            if best.admits(&v) {
                best.offer(v, x.clone());
            }
        }
        let Some(k) = (0..n).rev().find(|&k| x[k] < hi[k]) else {
            break;
        };
        x[k] += 1;
        x[k + 1..].copy_from_slice(&lo[k + 1..]);
    }
    Ok(match best.best {
        Some((v, x)) => Solution {
            x: Some(x),
            value: ObjValue::Finite(v),
            status: crate::model::Status::Optimal,
        },
        None => Solution::infeasible(),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Family {
    EqualityIndicator,
    QuadraticDistance,
    SeparableConvexPwl,
    /// Forces `m = 1`.
    KnapsackPenalty,
    /// One of the above, drawn per seed.
    Any,
}

impl Family {
    pub const BUILT_IN: [Family; 4] = [
        Family::EqualityIndicator,
        Family::QuadraticDistance,
        Family::SeparableConvexPwl,
        Family::KnapsackPenalty,
    ];
}

/// Shape of a random instance. Bounds are random sub-intervals of
/// `[box_lo, box_hi]`; with `lower_at_min` every lower bound is `box_lo`.
#[derive(Clone, Debug)]
pub struct Profile {
    pub n: usize,
    pub m: usize,
    pub delta: i64,
    pub box_lo: i64,
    pub box_hi: i64,
    pub lower_at_min: bool,
    pub family: Family,
}

impl Profile {
    pub fn new(n: usize, m: usize, delta: i64, family: Family) -> Self {
        Self {
            n,
            m,
            delta,
            box_lo: -2,
            box_hi: 3,
            lower_at_min: false,
            family,
        }
    }
}

fn small_rat(rng: &mut ChaCha8Rng, range: i64) -> Rat {
    let den = rng.gen_range(1..=2);
    ratio(rng.gen_range(-range * den..=range * den), den)
}

fn random_pwl(rng: &mut ChaCha8Rng) -> ConvexPwl {
    let k = rng.gen_range(0..=2);
    let mut pool: Vec<i64> = (-4..=4).collect();
    pool.shuffle(rng);
    let mut breakpoints = pool[..k].to_vec();
    breakpoints.sort_unstable();
    let mut slopes: Vec<Rat> = (0..=k).map(|_| small_rat(rng, 3)).collect();
    slopes.sort();
    ConvexPwl::new(breakpoints, slopes, rat(rng.gen_range(0..=3)))
}

/// Reproducible random instance. Entries of `W` are uniform in `[−Δ, Δ]`.
/// Indicator targets are `Wx` for a random box point with probability ½,
/// and otherwise lie just beyond the largest attainable value of row 0.
pub fn random_instance(seed: u64, profile: &Profile) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let family = match profile.family {
        Family::Any => {
            let choices: &[Family] = if profile.m == 1 { &Family::BUILT_IN } else { &Family::BUILT_IN[..3] };
            *choices.choose(&mut rng).unwrap()
        }
        f => f,
    };
    let m = if family == Family::KnapsackPenalty { 1 } else { profile.m };
    let n = profile.n;
    let d = profile.delta;
    let rows: Vec<Vec<i64>> = (0..m).map(|_| (0..n).map(|_| rng.gen_range(-d..=d)).collect()).collect();
    let w = IntMat::from_rows(rows).expect("rectangular");

    let mut lower = Vec::with_capacity(n);
    let mut upper = Vec::with_capacity(n);
    for _ in 0..n {
        let l = if profile.lower_at_min {
            profile.box_lo
        } else {
            rng.gen_range(profile.box_lo..=profile.box_hi)
        };
        let u = rng.gen_range(l..=profile.box_hi);
        lower.push(Some(l));
        upper.push(Some(u));
    }
    let c: Vec<Rat> = (0..n).map(|_| small_rat(&mut rng, 3)).collect();

    let objective = match family {
        Family::EqualityIndicator => {
            let target = if rng.gen_bool(0.5) {
                let x: Vec<i64> = lower
                    .iter()
                    .zip(&upper)
                    .map(|(l, u)| rng.gen_range(l.unwrap()..=u.unwrap()))
                    .collect();
                w.mul_vec(&x)
            } else {
                let mut t = w.mul_vec(&lower.iter().map(|l| l.unwrap()).collect::<Vec<_>>());
                t[0] = (0..n)
                    .map(|j| {
                        let a = w.get(0, j);
                        (a * lower[j].unwrap()).max(a * upper[j].unwrap())
                    })
                    .sum::<i64>()
                    + 1;
                t
            };
            Objective::EqualityIndicator { target }
        }
        Family::QuadraticDistance => Objective::QuadraticDistance {
            target: (0..m).map(|_| small_rat(&mut rng, 6)).collect(),
        },
        Family::SeparableConvexPwl => Objective::SeparableConvexPwl {
            pieces: (0..m).map(|_| random_pwl(&mut rng)).collect(),
        },
        Family::KnapsackPenalty | Family::Any => {
            if rng.gen_bool(0.5) {
                Objective::KnapsackPenalty(Penalty::Quadratic {
                    a: ratio(rng.gen_range(0..=4), 4),
                    b: small_rat(&mut rng, 2),
                    c: rat(0),
                })
            } else {
                Objective::KnapsackPenalty(Penalty::Pwl(random_pwl(&mut rng)))
            }
        }
    };
    Instance::new(w, c, lower, upper, objective).expect("generator emits valid instances")
}

/// Compressed-sensing instance over `{0,1}^n` with a hidden `m × n` matrix.
/// A planted point `x̂` with up to `m` entries equal to `1/2` (the rest
/// binary) sets `b = W x̂`, so `z = x̂` minimizes the relaxation with value 0.
/// Returns the oracle, the hidden instance and `z`.
pub fn random_compressed_sensing(seed: u64, n: usize, m: usize, delta: i64) -> (InstanceOracle, Instance, Vec<Rat>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rows: Vec<Vec<i64>> = (0..m).map(|_| (0..n).map(|_| rng.gen_range(-delta..=delta)).collect()).collect();
    let w = IntMat::from_rows(rows).expect("rectangular");
    let mut z: Vec<Rat> = (0..n).map(|_| rat(rng.gen_range(0..=1))).collect();
    let mut idx: Vec<usize> = (0..n).collect();
    idx.shuffle(&mut rng);
    for &i in &idx[..rng.gen_range(0..=m.min(n))] {
        z[i] = ratio(1, 2);
    }
    let b: Vec<Rat> = (0..m)
        .map(|r| (0..n).fold(Rat::zero(), |acc, j| acc + rat(w.get(r, j)) * &z[j]))
        .collect();
    let (oracle, inst) = build_compressed_sensing(w, b).expect("valid by construction");
    (oracle, inst, z)
}
