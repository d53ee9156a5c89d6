use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::model::Instance;
use crate::numeric::IntMat;

/// Result of merging variables that share a column of `W`.
#[derive(Clone, Debug)]
pub struct MergeMap {
    /// Original column indices per merged variable, in first-occurrence
    /// order; each group is sorted.
    pub groups: Vec<Vec<usize>>,
    pub merged: Instance,
    lower: Vec<Option<i64>>,
    upper: Vec<Option<i64>>,
}

fn add_bound(a: Option<i64>, b: Option<i64>) -> Result<Option<i64>> {
    match (a, b) {
        (Some(a), Some(b)) => a.checked_add(b).map(Some).ok_or(Error::Overflow("merged bound")),
        _ => Ok(None),
    }
}

/// Merges columns with identical entries into one variable whose bounds
/// are the sums of the group's bounds. Refused when costs differ inside a
/// group.
pub fn merge_duplicate_columns(inst: &Instance) -> Result<MergeMap> {
    let n = inst.n();
    let mut index: HashMap<Vec<i64>, usize> = HashMap::new();
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for j in 0..n {
        let col = inst.w.column(j);
        let g = *index.entry(col).or_insert_with(|| {
            groups.push(Vec::new());
            groups.len() - 1
        });
        groups[g].push(j);
    }
    for (g, members) in groups.iter().enumerate() {
        if members.iter().any(|&j| inst.c[j] != inst.c[members[0]]) {
            return Err(Error::MergeRefused { group: g });
        }
    }
    let reps: Vec<usize> = groups.iter().map(|g| g[0]).collect();
    let mut lower = Vec::with_capacity(groups.len());
    let mut upper = Vec::with_capacity(groups.len());
    for g in &groups {
        let mut lo = Some(0);
        let mut hi = Some(0);
        for &j in g {
            lo = add_bound(lo, inst.lower[j])?;
            hi = add_bound(hi, inst.upper[j])?;
        }
        lower.push(lo);
        upper.push(hi);
    }
    let merged = Instance {
        w: inst.w.select_columns(&reps),
        c: reps.iter().map(|&j| inst.c[j].clone()).collect(),
        lower,
        upper,
        objective: inst.objective.clone(),
    };
    Ok(MergeMap {
        groups,
        merged,
        lower: inst.lower.clone(),
        upper: inst.upper.clone(),
    })
}

impl MergeMap {
    pub fn is_identity(&self) -> bool {
        self.groups.iter().all(|g| g.len() == 1)
    }

    pub fn original_n(&self) -> usize {
        self.lower.len()
    }

    /// Splits a merged point back onto the original variables, choosing the
    /// lexicographically smallest split when lower bounds are finite: every
    /// member starts at its lower bound (the bound-clamped zero when there is
    /// none) and the remainder fills the members from the last one backwards.
    pub fn expand(&self, merged_x: &[i64]) -> Vec<i64> {
        let mut x = vec![0i64; self.original_n()];
        for (g, &target) in self.groups.iter().zip(merged_x) {
            let mut sum = 0i64;
            for &j in g {
                let v = self.lower[j].unwrap_or_else(|| 0i64.min(self.upper[j].unwrap_or(0)));
                x[j] = v;
                sum += v;
            }
            let mut rest = target - sum;
            for &j in g.iter().rev() {
                if rest <= 0 {
                    break;
                }
                let room = self.upper[j].map_or(rest, |u| (u - x[j]).min(rest));
                x[j] += room;
                rest -= room;
            }
            for &j in g {
                if rest >= 0 {
                    break;
                }
                let room = self.lower[j].map_or(-rest, |l| (x[j] - l).min(-rest));
                x[j] -= room;
                rest += room;
            }
            debug_assert_eq!(rest, 0, "merged value outside the summed bounds");
        }
        x
    }

    /// Merged image of an original point.
    pub fn contract(&self, x: &[i64]) -> Vec<i64> {
        self.groups.iter().map(|g| g.iter().map(|&j| x[j]).sum()).collect()
    }
}

/// Number of distinct columns an `m`-row matrix with entries in `[−Δ, Δ]`
/// can have.
pub fn distinct_column_limit(m: u32, delta: u64) -> u128 {
    (2 * delta as u128 + 1).saturating_pow(m)
}

impl IntMat {
    pub fn distinct_columns(&self) -> usize {
        let mut seen = std::collections::HashSet::new();
        (0..self.cols()).filter(|&j| seen.insert(self.column(j))).count()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{ObjValue, Objective};
    use crate::numeric::rat;

    fn unit_box(w: Vec<Vec<i64>>, c: Vec<i64>) -> Instance {
        let n = c.len();
        Instance::new(
            IntMat::from_rows(w).unwrap(),
            c.into_iter().map(rat).collect(),
            vec![Some(0); n],
            vec![Some(1); n],
            Objective::QuadraticDistance { target: vec![rat(1)] },
        )
        .unwrap()
    }

    #[test]
    fn groups_duplicate_columns() {
        let map = merge_duplicate_columns(&unit_box(vec![vec![1, 1, -1]], vec![0, 0, 0])).unwrap();
        assert_eq!(map.groups, vec![vec![0, 1], vec![2]]);
        assert_eq!(map.merged.w.to_rows(), vec![vec![1, -1]]);
        assert_eq!(map.merged.lower, vec![Some(0), Some(0)]);
        assert_eq!(map.merged.upper, vec![Some(2), Some(1)]);
        assert_eq!(map.expand(&[1, 1]), vec![0, 1, 1]);
        assert_eq!(map.expand(&[2, 0]), vec![1, 1, 0]);
    }

    #[test]
    fn distinct_columns_give_identity() {
        let map = merge_duplicate_columns(&unit_box(vec![vec![1, 2, 3]], vec![0, 0, 0])).unwrap();
        assert!(map.is_identity());
        assert_eq!(map.merged.w, map.merged.w.select_columns(&[0, 1, 2]));
    }

    #[test]
    fn unequal_costs_are_refused() {
        let err = merge_duplicate_columns(&unit_box(vec![vec![2, 2]], vec![1, 3])).unwrap_err();
        assert!(matches!(err, Error::MergeRefused { group: 0 }));
    }

    #[test]
    fn expansion_preserves_value() {
        let inst = Instance::new(
            IntMat::from_rows(vec![vec![1, 1, 1]]).unwrap(),
            vec![rat(2); 3],
            vec![Some(-1), None, Some(0)],
            vec![Some(1), Some(4), None],
            Objective::QuadraticDistance { target: vec![rat(3)] },
        )
        .unwrap();
        let map = merge_duplicate_columns(&inst).unwrap();
        for v in -20..20 {
            let x = map.expand(&[v]);
            assert_eq!(x.iter().sum::<i64>(), v);
            assert_ne!(inst.evaluate(&x), ObjValue::Infinite);
            assert_eq!(inst.evaluate(&x), map.merged.evaluate(&[v]));
        }
    }
}
