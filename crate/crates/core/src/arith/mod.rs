//! Exact integer and rational linear algebra.
//!
//! Everything is arbitrary precision. Determinants and inverses use
//! fraction-free (Bareiss) elimination so intermediate entries stay minors of
//! the input.

mod lll;
mod matrix;
mod snf;

use num_bigint::BigInt;
use num_rational::BigRational;
use std::ops::Neg;

use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub use lll::{is_lll_reduced, lll_reduce};
pub use matrix::*;
pub use snf::{snf, SnfResult};

pub type Int = BigInt;
pub type Rat = BigRational;
pub type IntVec = Vec<Int>;
pub type RatVec = Vec<Rat>;

fn require_square(m: &IntMat) -> Result<()> {
    if m.is_square() {
        Ok(())
    } else {
        Err(Error::NotSquare {
            rows: m.rows(),
            cols: m.cols(),
        })
    }
}

/// Ring operations for fraction-free elimination; `None` means overflow.
trait Exact: Clone + Zero + One + Neg<Output = Self> {
    /// `(p a - f b) / prev`, where the division is exact.
    fn cross_div(p: &Self, a: &Self, f: &Self, b: &Self, prev: &Self) -> Option<Self>;
}

impl Exact for Int {
    fn cross_div(p: &Self, a: &Self, f: &Self, b: &Self, prev: &Self) -> Option<Self> {
        Some((p * a - f * b) / prev)
    }
}

impl Exact for i128 {
    fn cross_div(p: &Self, a: &Self, f: &Self, b: &Self, prev: &Self) -> Option<Self> {
        p.checked_mul(*a)?.checked_sub(f.checked_mul(*b)?).map(|x| x / prev)
    }
}

enum Outcome<T> {
    Done(T),
    Singular,
    Overflow,
}

/// Fraction-free Gauss-Jordan on `[M | I]` (or plain Bareiss on `M` when
/// `with_inverse` is false). Returns the determinant and, if requested,
/// the adjugate as rows.
fn bareiss<T: Exact>(m: Vec<Vec<T>>, with_inverse: bool) -> Outcome<(T, Vec<Vec<T>>)> {
    let n = m.len();
    let width = if with_inverse { 2 * n } else { n };
    let mut a: Vec<Vec<T>> = m
        .into_iter()
        .enumerate()
        .map(|(i, mut row)| {
            if with_inverse {
                row.extend((0..n).map(|j| if i == j { T::one() } else { T::zero() }));
            }
            row
        })
        .collect();
    let mut prev = T::one();
    let mut negate = false;
    for k in 0..n {
        let Some(pivot_row) = (k..n).find(|&i| !a[i][k].is_zero()) else {
            return Outcome::Singular;
        };
        if pivot_row != k {
            a.swap(pivot_row, k);
            negate = !negate;
        }
        let pivot = a[k].clone();
        let p = pivot[k].clone();
        let start = if with_inverse { 0 } else { k + 1 };
        for i in start..n {
            if i == k {
                continue;
            }
            let row = &mut a[i];
            let factor = row[k].clone();
            for j in (if with_inverse { 0 } else { k + 1 })..width {
                if j == k {
                    continue;
                }
                match T::cross_div(&p, &row[j], &factor, &pivot[j], &prev) {
                    Some(v) => row[j] = v,
                    None => return Outcome::Overflow,
                }
            }
            row[k] = T::zero();
        }
        prev = p;
    }
    let det = if negate { -prev } else { prev };
    if !with_inverse {
        return Outcome::Done((det, Vec::new()));
    }
    // left block is prev * I, right block is prev * M^{-1}
    let adj = a
        .into_iter()
        .map(|row| {
            row.into_iter()
                .skip(n)
                .map(|x| if negate { -x } else { x })
                .collect()
        })
        .collect();
    Outcome::Done((det, adj))
}

/// Tries `i128` first and falls back to big integers on overflow.
fn eliminate(m: &IntMat, with_inverse: bool) -> Option<(Int, IntMat)> {
    let n = m.rows();
    let small: Option<Vec<Vec<i128>>> = (0..n)
        .map(|i| m.row(i).iter().map(|x| x.to_i64().map(i128::from)).collect())
        .collect();
    let to_mat = |rows: Vec<Vec<Int>>| {
        if rows.is_empty() {
            IntMat::zeros(0, 0)
        } else {
            IntMat::from_rows(&rows).expect("square")
        }
    };
    if let Some(rows) = small {
        match bareiss(rows, with_inverse) {
            Outcome::Done((d, adj)) => {
                let adj = adj
                    .into_iter()
                    .map(|r| r.into_iter().map(Int::from).collect())
                    .collect();
                return Some((Int::from(d), to_mat(adj)));
            }
            Outcome::Singular => return None,
            Outcome::Overflow => {}
        }
    }
    match bareiss(m.row_vecs(), with_inverse) {
        Outcome::Done((d, adj)) => Some((d, to_mat(adj))),
        Outcome::Singular => None,
        Outcome::Overflow => unreachable!("big integers do not overflow"),
    }
}

/// Exact determinant.
pub fn det(m: &IntMat) -> Result<Int> {
    require_square(m)?;
    if m.rows() == 0 {
        return Ok(Int::one());
    }
    Ok(eliminate(m, false).map_or_else(Int::zero, |(d, _)| d))
}

/// Exact rational inverse.
pub fn inverse(m: &IntMat) -> Result<RatMat> {
    let (d, adj) = adjugate(m)?;
    Ok(adj.map(|x| Rat::new(x.clone(), d.clone())))
}

/// Returns `(det M, adj M)` with `M * adj M = det M * I`.
pub fn adjugate(m: &IntMat) -> Result<(Int, IntMat)> {
    require_square(m)?;
    if m.rows() == 0 {
        return Ok((Int::one(), IntMat::zeros(0, 0)));
    }
    eliminate(m, true).ok_or(Error::Singular)
}

/// Rank of a rational matrix via Gaussian elimination.
pub fn rank_rat(rows: &[Vec<Rat>]) -> usize {
    let mut a: Vec<Vec<Rat>> = rows.to_vec();
    let cols = a.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..a.len()).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(rank, p);
        let pivot = a[rank][c].clone();
        for i in 0..a.len() {
            if i == rank || a[i][c].is_zero() {
                continue;
            }
            let f = &a[i][c] / &pivot;
            for j in c..cols {
                let v = &a[rank][j] * &f;
                a[i][j] -= v;
            }
        }
        rank += 1;
    }
    rank
}

pub fn rank_int(rows: &[Vec<Int>]) -> usize {
    let rows: Vec<Vec<Rat>> = rows.iter().map(|r| to_rat_vec(r)).collect();
    rank_rat(&rows)
}

/// Integer inverse of a unimodular matrix.
pub fn unimodular_inverse(m: &IntMat) -> Result<IntMat> {
    let (d, adj) = adjugate(m)?;
    if !d.abs().is_one() {
        return Err(Error::InvalidInput(format!(
            "matrix with determinant {d} is not unimodular"
        )));
    }
    Ok(adj.map(|x| x * &d))
}

pub fn floor_rat(x: &Rat) -> Int {
    x.floor().to_integer()
}
