use num_integer::Integer;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};

use super::{IntMat, Int};

/// Smith normal form `U * B * V = S` with unimodular `U`, `V`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SnfResult {
    pub u: IntMat,
    pub s: IntMat,
    pub v: IntMat,
}

impl SnfResult {
    pub fn diagonal(&self) -> Vec<Int> {
        (0..self.s.rows()).map(|i| self.s[(i, i)].clone()).collect()
    }
}

struct Work {
    s: IntMat,
    u: IntMat,
    v: IntMat,
}

impl Work {
    fn swap_rows(&mut self, a: usize, b: usize) {
        self.s.swap_rows(a, b);
        self.u.swap_rows(a, b);
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        self.s.swap_cols(a, b);
        self.v.swap_cols(a, b);
    }

    /// row[dst] += factor * row[src]
    fn add_row(&mut self, dst: usize, src: usize, factor: &Int) {
        for m in [&mut self.s, &mut self.u] {
            for j in 0..m.cols() {
                let v = &m[(src, j)] * factor;
                m[(dst, j)] += v;
            }
        }
    }

    /// col[dst] += factor * col[src]
    fn add_col(&mut self, dst: usize, src: usize, factor: &Int) {
        for m in [&mut self.s, &mut self.v] {
            for i in 0..m.rows() {
                let v = &m[(i, src)] * factor;
                m[(i, dst)] += v;
            }
        }
    }

    fn negate_row(&mut self, r: usize) {
        for m in [&mut self.s, &mut self.u] {
            for j in 0..m.cols() {
                let v = -&m[(r, j)];
                m[(r, j)] = v;
            }
        }
    }
}

/// Smith normal form of a square nonsingular integer matrix.
///
/// Repeatedly moves the smallest nonzero entry of the trailing block to the
/// pivot position and clears its row and column by gcd steps; a pivot that
/// fails to divide the rest of the block absorbs the offending row.
pub fn snf(b: &IntMat) -> Result<SnfResult> {
    if !b.is_square() {
        return Err(Error::NotSquare {
            rows: b.rows(),
            cols: b.cols(),
        });
    }
    let n = b.rows();
    let mut w = Work {
        s: b.clone(),
        u: IntMat::identity(n),
        v: IntMat::identity(n),
    };
    for t in 0..n {
        loop {
            let mut best: Option<(usize, usize)> = None;
            for i in t..n {
                for j in t..n {
                    let x = &w.s[(i, j)];
                    if x.is_zero() {
                        continue;
                    }
                    if best.is_none_or(|(bi, bj)| x.abs() < w.s[(bi, bj)].abs()) {
                        best = Some((i, j));
                    }
                }
            }
            let Some((pi, pj)) = best else {
                return Err(Error::Singular);
            };
            w.swap_rows(t, pi);
            w.swap_cols(t, pj);

            let mut dirty = false;
            for i in t + 1..n {
                if w.s[(i, t)].is_zero() {
                    continue;
                }
                let q = w.s[(i, t)].div_floor(&w.s[(t, t)]);
                w.add_row(i, t, &-q);
                dirty |= !w.s[(i, t)].is_zero();
            }
            for j in t + 1..n {
                if w.s[(t, j)].is_zero() {
                    continue;
                }
                let q = w.s[(t, j)].div_floor(&w.s[(t, t)]);
                w.add_col(j, t, &-q);
                dirty |= !w.s[(t, j)].is_zero();
            }
            if dirty {
                continue;
            }
            let pivot = w.s[(t, t)].clone();
            let offender = (t + 1..n).find(|&i| {
                (t + 1..n).any(|j| !w.s[(i, j)].is_multiple_of(&pivot))
            });
            match offender {
                Some(i) => w.add_row(t, i, &Int::from(1)),
                None => break,
            }
        }
        if w.s[(t, t)].is_negative() {
            w.negate_row(t);
        }
    }
    Ok(SnfResult {
        u: w.u,
        s: w.s,
        v: w.v,
    })
}
