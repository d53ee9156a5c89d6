//! Exact scalars, vectors and matrices.
//!
//! Every quantity that feeds a decision (dual values, reduced costs,
//! gradients) lives in [`Rat`]. Linear systems are solved with fraction-free
//! (Bareiss) elimination after clearing denominators row by row, so the only
//! divisions performed during elimination are exact integer divisions.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Exact rational number, always kept in lowest terms with a positive
/// denominator.
pub type Rat = BigRational;

/// Exact rational vector.
pub type RatVec = Vec<Rat>;

pub fn rat(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

pub fn ratio(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

/// Formats as `p/q`, the wire format for rationals.
pub fn rat_to_string(r: &Rat) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Parses `p/q` or a bare integer `p`.
pub fn parse_rat(s: &str) -> Result<Rat> {
    let s = s.trim();
    let bad = || Error::Parse(format!("invalid rational {s:?}"));
    match s.split_once('/') {
        Some((p, q)) => {
            let p: BigInt = p.trim().parse().map_err(|_| bad())?;
            let q: BigInt = q.trim().parse().map_err(|_| bad())?;
            if !q.is_positive() {
                return Err(Error::Parse(format!("rational {s:?} needs a positive denominator")));
            }
            Ok(Rat::new(p, q))
        }
        None => {
            let p: BigInt = s.parse().map_err(|_| bad())?;
            Ok(Rat::from_integer(p))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sign {
    Negative,
    Zero,
    Positive,
}

impl Sign {
    pub fn of(r: &Rat) -> Sign {
        match r.cmp(&Rat::zero()) {
            Ordering::Less => Sign::Negative,
            Ordering::Equal => Sign::Zero,
            Ordering::Greater => Sign::Positive,
        }
    }
}

/// Polynomial in a symbolic infinitesimal `ε > 0`, coefficients listed from
/// `ε⁰` upwards. Trailing zeros are allowed and ignored by comparisons.
#[derive(Clone, Debug, Default)]
pub struct EpsPoly {
    coeffs: Vec<Rat>,
}

impl EpsPoly {
    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn from_coeffs(coeffs: Vec<Rat>) -> Self {
        Self { coeffs }
    }

    pub fn constant(c: Rat) -> Self {
        Self { coeffs: vec![c] }
    }

    /// `ε^degree`.
    pub fn monomial(degree: usize) -> Self {
        let mut coeffs = vec![Rat::zero(); degree + 1];
        coeffs[degree] = Rat::one();
        Self { coeffs }
    }

    pub fn coeffs(&self) -> &[Rat] {
        &self.coeffs
    }

    /// Coefficient of `ε^degree` (zero past the stored length).
    pub fn coeff(&self, degree: usize) -> Rat {
        self.coeffs.get(degree).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    /// Pads with zeros so that degrees `0..len` are stored.
    pub fn padded(mut self, len: usize) -> Self {
        if self.coeffs.len() < len {
            self.coeffs.resize(len, Rat::zero());
        }
        self
    }

    pub fn scale(&self, k: &Rat) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|c| c * k).collect(),
        }
    }

    pub fn sign(&self) -> Sign {
        eps_sign(self)
    }

    fn zip_with(&self, other: &Self, f: impl Fn(&Rat, &Rat) -> Rat) -> Self {
        let len = self.coeffs.len().max(other.coeffs.len());
        let zero = Rat::zero();
        let coeffs = (0..len)
            .map(|i| {
                f(
                    self.coeffs.get(i).unwrap_or(&zero),
                    other.coeffs.get(i).unwrap_or(&zero),
                )
            })
            .collect();
        Self { coeffs }
    }
}

impl PartialEq for EpsPoly {
    fn eq(&self, other: &Self) -> bool {
        (self - other).is_zero()
    }
}

impl Eq for EpsPoly {}

impl Add for &EpsPoly {
    type Output = EpsPoly;
    fn add(self, rhs: &EpsPoly) -> EpsPoly {
        self.zip_with(rhs, |a, b| a + b)
    }
}

impl Sub for &EpsPoly {
    type Output = EpsPoly;
    fn sub(self, rhs: &EpsPoly) -> EpsPoly {
        self.zip_with(rhs, |a, b| a - b)
    }
}

impl Neg for &EpsPoly {
    type Output = EpsPoly;
    fn neg(self) -> EpsPoly {
        EpsPoly {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

impl fmt::Display for EpsPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(k, c)| match k {
                0 => format!("{c}"),
                1 => format!("({c})ε"),
                _ => format!("({c})ε^{k}"),
            })
            .collect();
        if terms.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", terms.join(" + "))
        }
    }
}

/// Sign of `p(ε)` for every sufficiently small `ε > 0`: the sign of the
/// lowest-degree nonzero coefficient.
pub fn eps_sign(p: &EpsPoly) -> Sign {
    p.coeffs
        .iter()
        .find(|c| !c.is_zero())
        .map(Sign::of)
        .unwrap_or(Sign::Zero)
}

/// Integer matrix with its maximal absolute entry cached.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntMat {
    rows: usize,
    cols: usize,
    data: Vec<i64>,
    delta: i64,
}

impl IntMat {
    pub fn from_rows(rows: Vec<Vec<i64>>) -> Result<Self> {
        let m = rows.len();
        let n = rows.first().map_or(0, Vec::len);
        if let Some((i, _)) = rows.iter().enumerate().find(|(_, r)| r.len() != n) {
            return Err(Error::Parse(format!("matrix row {i} has the wrong length")));
        }
        let data: Vec<i64> = rows.into_iter().flatten().collect();
        if data.contains(&i64::MIN) {
            return Err(Error::Overflow("matrix entry"));
        }
        let delta = data.iter().map(|v| v.abs()).max().unwrap_or(0);
        Ok(Self {
            rows: m,
            cols: n,
            data,
            delta,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Largest absolute entry (Δ).
    pub fn delta(&self) -> i64 {
        self.delta
    }

    pub fn get(&self, r: usize, c: usize) -> i64 {
        self.data[r * self.cols + c]
    }

    pub fn row(&self, r: usize) -> &[i64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> Vec<i64> {
        (0..self.rows).map(|r| self.get(r, c)).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<i64>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    /// Keeps the listed columns, in the given order.
    pub fn select_columns(&self, cols: &[usize]) -> IntMat {
        let rows = (0..self.rows)
            .map(|r| cols.iter().map(|&c| self.get(r, c)).collect())
            .collect();
        IntMat::from_rows(rows).expect("selected columns keep a rectangular shape")
    }

    /// `W x`.
    pub fn mul_vec(&self, x: &[i64]) -> Vec<i64> {
        debug_assert_eq!(x.len(), self.cols);
        (0..self.rows)
            .map(|r| self.row(r).iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// `W x` restricted to the listed columns (`x[k]` multiplies column
    /// `cols[k]`).
    pub fn mul_cols(&self, cols: &[usize], x: &[i64]) -> Vec<i64> {
        (0..self.rows)
            .map(|r| cols.iter().zip(x).map(|(&c, v)| self.get(r, c) * v).sum())
            .collect()
    }

    pub fn to_rat(&self) -> RatMat {
        RatMat::from_rows(
            (0..self.rows)
                .map(|r| self.row(r).iter().map(|&v| rat(v)).collect())
                .collect(),
        )
    }
}

/// Dense exact rational matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RatMat {
    rows: usize,
    cols: usize,
    data: Vec<Rat>,
}

impl RatMat {
    /// Panics if the rows are ragged.
    pub fn from_rows(rows: Vec<Vec<Rat>>) -> Self {
        let m = rows.len();
        let n = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|r| r.len() == n), "ragged matrix");
        Self {
            rows: m,
            cols: n,
            data: rows.into_iter().flatten().collect(),
        }
    }

    pub fn from_i64(rows: &[&[i64]]) -> Self {
        Self::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&v| rat(v)).collect())
                .collect(),
        )
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &Rat {
        &self.data[r * self.cols + c]
    }

    pub fn row(&self, r: usize) -> &[Rat] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn transpose(&self) -> RatMat {
        RatMat::from_rows(
            (0..self.cols)
                .map(|c| (0..self.rows).map(|r| self.get(r, c).clone()).collect())
                .collect(),
        )
    }

    pub fn mul_eps(&self, y: &[EpsPoly]) -> Vec<EpsPoly> {
        (0..self.rows)
            .map(|r| {
                self.row(r)
                    .iter()
                    .zip(y)
                    .fold(EpsPoly::zero(), |acc, (a, p)| &acc + &p.scale(a))
            })
            .collect()
    }
}

/// Scales a rational row to an integer row by the lcm of its denominators.
fn clear_denominators(row: &[Rat]) -> Vec<BigInt> {
    let l = row
        .iter()
        .fold(BigInt::one(), |acc, r| acc.lcm(r.denom()));
    row.iter()
        .map(|r| r.numer() * (&l / r.denom()))
        .collect()
}

/// In-place fraction-free row echelon form over the integers. Pivots are
/// searched in the first `pivot_cols` columns; the remaining columns are
/// carried along (augmented part). Returns the pivot positions.
fn bareiss_echelon(rows: &mut [Vec<BigInt>], pivot_cols: usize) -> Vec<(usize, usize)> {
    let nrows = rows.len();
    let ncols = rows.first().map_or(0, Vec::len);
    let mut prev = BigInt::one();
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..pivot_cols {
        if r == nrows {
            break;
        }
        let Some(p) = (r..nrows).find(|&i| !rows[i][col].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let (head, tail) = rows.split_at_mut(r + 1);
        let pivot_row = &head[r];
        let pv = pivot_row[col].clone();
        for row in tail.iter_mut() {
            let factor = row[col].clone();
            for j in col + 1..ncols {
                let num = &pv * &row[j] - &factor * &pivot_row[j];
                debug_assert!((&num % &prev).is_zero(), "Bareiss division must be exact");
                row[j] = num / &prev;
            }
            row[col] = BigInt::zero();
        }
        prev = pv;
        pivots.push((r, col));
        r += 1;
    }
    pivots
}

/// Exact rank.
pub fn rank(a: &RatMat) -> usize {
    let mut rows: Vec<Vec<BigInt>> = (0..a.rows()).map(|r| clear_denominators(a.row(r))).collect();
    bareiss_echelon(&mut rows, a.cols()).len()
}

/// Rank of a list of rational row vectors of common length.
pub fn rank_of_rows(rows: &[RatVec]) -> usize {
    if rows.is_empty() {
        return 0;
    }
    let cols = rows[0].len();
    let mut int_rows: Vec<Vec<BigInt>> = rows.iter().map(|r| clear_denominators(r)).collect();
    bareiss_echelon(&mut int_rows, cols).len()
}

/// Solves `A y = rhs` for square `A`, with a right-hand side of
/// ε-polynomials. Returns `None` when `A` is singular.
pub fn solve_square_system(a: &RatMat, rhs: &[EpsPoly]) -> Option<Vec<EpsPoly>> {
    let m = a.rows();
    assert_eq!(m, a.cols(), "solve_square_system needs a square matrix");
    assert_eq!(m, rhs.len(), "right-hand side length mismatch");
    if m == 0 {
        return Some(Vec::new());
    }
    let k = rhs.iter().map(EpsPoly::len).max().unwrap_or(0).max(1);
    let mut rows: Vec<Vec<BigInt>> = (0..m)
        .map(|i| {
            let mut row: Vec<Rat> = a.row(i).to_vec();
            row.extend((0..k).map(|d| rhs[i].coeff(d)));
            clear_denominators(&row)
        })
        .collect();
    let pivots = bareiss_echelon(&mut rows, m);
    if pivots.len() < m {
        return None;
    }
    // Upper triangular with pivots on the diagonal; back substitution.
    let mut sol: Vec<Vec<Rat>> = vec![vec![Rat::zero(); k]; m];
    for i in (0..m).rev() {
        let diag = Rat::from_integer(rows[i][i].clone());
        for d in 0..k {
            let mut acc = Rat::from_integer(rows[i][m + d].clone());
            for j in i + 1..m {
                if !rows[i][j].is_zero() {
                    acc -= Rat::from_integer(rows[i][j].clone()) * &sol[j][d];
                }
            }
            sol[i][d] = acc / &diag;
        }
    }
    Some(sol.into_iter().map(EpsPoly::from_coeffs).collect())
}

/// Solves `A y = b` for square rational `A` and rational `b`.
pub fn solve_square_rat(a: &RatMat, b: &[Rat]) -> Option<RatVec> {
    let rhs: Vec<EpsPoly> = b.iter().cloned().map(EpsPoly::constant).collect();
    solve_square_system(a, &rhs).map(|v| v.into_iter().map(|p| p.coeff(0)).collect())
}

/// Indices of a maximal linearly independent subset of the given rows,
/// chosen greedily in index order.
pub fn independent_rows(rows: &[RatVec]) -> Vec<usize> {
    let mut chosen: Vec<usize> = Vec::new();
    let mut basis: Vec<RatVec> = Vec::new();
    for (i, r) in rows.iter().enumerate() {
        basis.push(r.clone());
        if rank_of_rows(&basis) == basis.len() {
            chosen.push(i);
        } else {
            basis.pop();
        }
    }
    chosen
}
