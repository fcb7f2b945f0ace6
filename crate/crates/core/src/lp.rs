//! Exact rational linear programming.
//!
//! Dense two-phase tableau simplex with Bland's rule, so degenerate pivots
//! cannot cycle. Sized for the handful of variables and few hundred rows
//! that show up here.

use num_traits::{One, Signed, Zero};

use crate::arith::Rat;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LpOutcome {
    Optimal { x: Vec<Rat>, value: Rat },
    Infeasible,
    Unbounded,
}

enum Phase {
    Optimal,
    Unbounded,
}

struct Tableau {
    rows: Vec<Vec<Rat>>, // last entry is the right-hand side
    basis: Vec<usize>,
    width: usize,
}

impl Tableau {
    fn pivot(&mut self, r: usize, c: usize) {
        let p = self.rows[r][c].clone();
        for v in self.rows[r].iter_mut() {
            *v /= &p;
        }
        let pivot_row = self.rows[r].clone();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (v, pv) in row.iter_mut().zip(&pivot_row) {
                if !pv.is_zero() {
                    *v -= &f * pv;
                }
            }
        }
        self.basis[r] = c;
    }

    fn reduced_cost(&self, obj: &[Rat], j: usize) -> Rat {
        let mut r = obj[j].clone();
        for (i, row) in self.rows.iter().enumerate() {
            let cb = &obj[self.basis[i]];
            if !cb.is_zero() && !row[j].is_zero() {
                r -= cb * &row[j];
            }
        }
        r
    }

    /// Maximizes `obj · y` from the current basic feasible solution.
    fn run(&mut self, obj: &[Rat], allowed: &[bool]) -> Phase {
        let rhs = self.width;
        loop {
            let entering = (0..self.width)
                .filter(|&j| allowed[j] && !self.basis.contains(&j))
                .find(|&j| self.reduced_cost(obj, j).is_positive());
            let Some(c) = entering else {
                return Phase::Optimal;
            };
            let mut leave: Option<(usize, Rat)> = None;
            for (i, row) in self.rows.iter().enumerate() {
                if !row[c].is_positive() {
                    continue;
                }
                let ratio = &row[rhs] / &row[c];
                let better = match &leave {
                    None => true,
                    Some((li, lr)) => {
                        ratio < *lr || (ratio == *lr && self.basis[i] < self.basis[*li])
                    }
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
            match leave {
                Some((r, _)) => self.pivot(r, c),
                None => return Phase::Unbounded,
            }
        }
    }

    fn value(&self, obj: &[Rat]) -> Rat {
        self.rows
            .iter()
            .enumerate()
            .fold(Rat::zero(), |acc, (i, row)| acc + &obj[self.basis[i]] * &row[self.width])
    }
}

/// Maximizes `c · x` subject to `a[i] · x <= b[i]` over free `x`.
pub fn maximize(a: &[Vec<Rat>], b: &[Rat], c: &[Rat]) -> LpOutcome {
    let n = c.len();
    let m = a.len();
    assert_eq!(b.len(), m, "one right-hand side per row");
    assert!(a.iter().all(|r| r.len() == n), "row width must match objective");

    let artificial: Vec<usize> = (0..m).filter(|&i| b[i].is_negative()).collect();
    // columns: x+ (n), x- (n), slacks (m), artificials
    let width = 2 * n + m + artificial.len();
    let mut rows = Vec::with_capacity(m);
    let mut basis = Vec::with_capacity(m);
    let mut art_iter = 0;
    for i in 0..m {
        let mut row = vec![Rat::zero(); width + 1];
        let flip = b[i].is_negative();
        let sign = if flip { -Rat::one() } else { Rat::one() };
        for j in 0..n {
            row[j] = &a[i][j] * &sign;
            row[n + j] = -&row[j];
        }
        row[2 * n + i] = sign.clone();
        row[width] = &b[i] * &sign;
        if flip {
            let col = 2 * n + m + art_iter;
            row[col] = Rat::one();
            basis.push(col);
            art_iter += 1;
        } else {
            basis.push(2 * n + i);
        }
        rows.push(row);
    }
    let mut t = Tableau { rows, basis, width };

    if !artificial.is_empty() {
        let mut phase1 = vec![Rat::zero(); width];
        for k in 0..artificial.len() {
            phase1[2 * n + m + k] = -Rat::one();
        }
        let allowed = vec![true; width];
        if let Phase::Unbounded = t.run(&phase1, &allowed) {
            unreachable!("phase one objective is bounded above by zero");
        }
        if t.value(&phase1).is_negative() {
            return LpOutcome::Infeasible;
        }
        // Drive zero-level artificials out of the basis.
        let mut i = 0;
        while i < t.rows.len() {
            if t.basis[i] >= 2 * n + m {
                match (0..2 * n + m).find(|&j| !t.rows[i][j].is_zero()) {
                    Some(j) => t.pivot(i, j),
                    None => {
                        t.rows.remove(i);
                        t.basis.remove(i);
                        continue;
                    }
                }
            }
            i += 1;
        }
    }

    let mut obj = vec![Rat::zero(); width];
    for j in 0..n {
        obj[j] = c[j].clone();
        obj[n + j] = -c[j].clone();
    }
    let allowed: Vec<bool> = (0..width).map(|j| j < 2 * n + m).collect();
    match t.run(&obj, &allowed) {
        Phase::Unbounded => LpOutcome::Unbounded,
        Phase::Optimal => {
            let mut y = vec![Rat::zero(); width];
            for (i, &bcol) in t.basis.iter().enumerate() {
                y[bcol] = t.rows[i][width].clone();
            }
            let x: Vec<Rat> = (0..n).map(|j| &y[j] - &y[n + j]).collect();
            let value = t.value(&obj);
            LpOutcome::Optimal { x, value }
        }
    }
}
