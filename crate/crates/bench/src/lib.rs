//! Deterministic fixtures shared by the criterion benches.

use projip::dp::DpInput;
use projip::numeric::{ratio, Rat};
use projip::unknown_w::{GradientBasis, InstanceOracle};
use projip::verify::{random_compressed_sensing, random_instance, Family, Profile};
use projip::Instance;

/// Seed used for every fixture; changing it changes all bench inputs.
pub const SEED: u64 = 7;

pub fn bounded_instance(n: usize, m: usize, delta: i64) -> Instance {
    random_instance(SEED, &Profile::new(n, m, delta, Family::QuadraticDistance))
}

pub fn nonneg_instance(n: usize, m: usize, delta: i64) -> Instance {
    let mut p = Profile::new(n, m, delta, Family::QuadraticDistance);
    p.box_lo = 0;
    p.box_hi = 3;
    p.lower_at_min = true;
    random_instance(SEED, &p)
}

pub fn sensing(n: usize, m: usize, delta: i64) -> (InstanceOracle, Instance, Vec<Rat>) {
    random_compressed_sensing(SEED, n, m, delta)
}

/// Owned data for a DP table over `t` variables with columns cycling through
/// `[-Δ, Δ]^m`.
pub struct DpFixture {
    pub columns: Vec<Vec<i64>>,
    pub costs: Vec<Rat>,
    pub m: usize,
    pub delta: i64,
}

impl DpFixture {
    pub fn new(t: usize, m: usize, delta: i64) -> Self {
        let span = 2 * delta + 1;
        let columns = (0..t)
            .map(|j| (0..m).map(|r| (j as i64 / span.pow(r as u32)) % span - delta).collect())
            .collect();
        let costs = (0..t).map(|j| ratio(j as i64 % 5 - 2, 1 + j as i64 % 2)).collect();
        DpFixture { columns, costs, m, delta }
    }

    pub fn input(&self) -> DpInput<'_> {
        let t = self.columns.len();
        DpInput {
            columns: self.columns.clone(),
            costs: self.costs.iter().collect(),
            lower: vec![Some(-2); t],
            upper: vec![Some(2); t],
            center: vec![0; t],
            m: self.m,
            delta: self.delta,
        }
    }
}

/// A basis of `rank` rows over `n` coordinates with entries in `[-Δ, Δ]`.
pub fn basis(n: usize, rank: usize, delta: i64) -> GradientBasis {
    let mut b = GradientBasis::new();
    for r in 0..rank {
        let row = (0..n).map(|j| ratio(((j + 2 * r) as i64 % (2 * delta + 1)) - delta, 1)).collect();
        assert!(b.insert(row), "fixture rows must be independent");
    }
    b
}
