use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

use super::{dot, IntMat, Int, Rat};

/// LLL-reduces the columns of `basis` with δ = 3/4.
///
/// Integral variant: only the Gram determinants `d_i` and the scaled
/// Gram-Schmidt coefficients `λ_{ij} = d_j μ_{ij}` are kept, so every step is
/// exact integer arithmetic.
pub fn lll_reduce(basis: &IntMat) -> Result<IntMat> {
    let n = basis.cols();
    // 1-based storage; slot 0 unused for vectors, d[0] = 1.
    let mut b: Vec<Vec<Int>> = std::iter::once(Vec::new())
        .chain(basis.columns())
        .collect();
    if n == 0 {
        return Ok(basis.clone());
    }
    let mut d = vec![Int::zero(); n + 1];
    let mut lam = vec![vec![Int::zero(); n + 1]; n + 1];
    d[0] = Int::one();
    d[1] = dot(&b[1], &b[1]);
    if d[1].is_zero() {
        return Err(Error::LinearlyDependent);
    }
    let mut k = 2;
    let mut k_max = 1;

    while k <= n {
        if k > k_max {
            k_max = k;
            for j in 1..=k {
                let mut u = dot(&b[k], &b[j]);
                for i in 1..j {
                    u = (&d[i] * &u - &lam[k][i] * &lam[j][i]) / &d[i - 1];
                }
                if j < k {
                    lam[k][j] = u;
                } else {
                    if u.is_zero() {
                        return Err(Error::LinearlyDependent);
                    }
                    d[k] = u;
                }
            }
        }
        loop {
            reduce(&mut b, &mut lam, &d, k, k - 1);
            let lhs = Int::from(4) * &d[k] * &d[k - 2];
            let rhs = Int::from(3) * &d[k - 1] * &d[k - 1]
                - Int::from(4) * &lam[k][k - 1] * &lam[k][k - 1];
            if lhs < rhs {
                swap(&mut b, &mut lam, &mut d, k, k_max);
                k = (k - 1).max(2);
            } else {
                for l in (1..k - 1).rev() {
                    reduce(&mut b, &mut lam, &d, k, l);
                }
                k += 1;
                break;
            }
        }
    }
    IntMat::from_columns(&b[1..])
}

fn reduce(b: &mut [Vec<Int>], lam: &mut [Vec<Int>], d: &[Int], k: usize, l: usize) {
    let two_lam = Int::from(2) * &lam[k][l];
    if two_lam.abs() <= d[l] {
        return;
    }
    // nearest integer to lam/d
    let q = (Int::from(2) * &lam[k][l] + &d[l]).div_floor(&(Int::from(2) * &d[l]));
    let bl = b[l].clone();
    for (x, y) in b[k].iter_mut().zip(&bl) {
        *x -= &q * y;
    }
    let v = &q * &d[l];
    lam[k][l] -= v;
    for i in 1..l {
        let v = &q * &lam[l][i];
        lam[k][i] -= v;
    }
}

fn swap(b: &mut [Vec<Int>], lam: &mut [Vec<Int>], d: &mut [Int], k: usize, k_max: usize) {
    b.swap(k, k - 1);
    for j in 1..k - 1 {
        let t = lam[k][j].clone();
        lam[k][j] = lam[k - 1][j].clone();
        lam[k - 1][j] = t;
    }
    let l = lam[k][k - 1].clone();
    let big_b = (&d[k - 2] * &d[k] + &l * &l) / &d[k - 1];
    for i in k + 1..=k_max {
        let t = lam[i][k].clone();
        lam[i][k] = (&d[k] * &lam[i][k - 1] - &l * &t) / &d[k - 1];
        lam[i][k - 1] = (&big_b * &t + &l * &lam[i][k]) / &d[k];
    }
    d[k - 1] = big_b;
}

/// Reducedness predicate with exact rational Gram-Schmidt; independent of
/// the integral bookkeeping in [`lll_reduce`].
pub fn is_lll_reduced(basis: &IntMat) -> bool {
    let cols: Vec<Vec<Rat>> = basis
        .columns()
        .iter()
        .map(|c| c.iter().map(|x| Rat::from_integer(x.clone())).collect())
        .collect();
    let n = cols.len();
    let mut star: Vec<Vec<Rat>> = Vec::with_capacity(n);
    let mut norms: Vec<Rat> = Vec::with_capacity(n);
    let mut mu = vec![vec![Rat::zero(); n]; n];
    for i in 0..n {
        let mut v = cols[i].clone();
        for j in 0..i {
            mu[i][j] = dot(&cols[i], &star[j]) / &norms[j];
            for (x, y) in v.iter_mut().zip(&star[j]) {
                *x -= &mu[i][j] * y;
            }
        }
        norms.push(dot(&v, &v));
        star.push(v);
    }
    let half = Rat::new(Int::one(), Int::from(2));
    let delta = Rat::new(Int::from(3), Int::from(4));
    for i in 0..n {
        for j in 0..i {
            if mu[i][j].abs() > half {
                return false;
            }
        }
    }
    for k in 1..n {
        let m = &mu[k][k - 1];
        if norms[k] < (&delta - m * m) * &norms[k - 1] {
            return false;
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{det, int_mat_cols};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn max_col_norm2(m: &IntMat) -> Int {
        m.columns().iter().map(|c| dot(c, c)).max().unwrap()
    }

    #[test]
    fn identity_stays() {
        let id = IntMat::identity(4);
        assert_eq!(lll_reduce(&id).unwrap(), id);
    }

    #[test]
    fn shear_reduces_to_short_basis() {
        let b = int_mat_cols(&[&[1, 0], &[4, 1]]);
        let r = lll_reduce(&b).unwrap();
        assert!(det(&r).unwrap().abs().is_one());
        assert!(max_col_norm2(&r) <= Int::from(2));
        assert!(is_lll_reduced(&r));
    }

    #[test]
    fn dependent_columns_rejected() {
        let b = int_mat_cols(&[&[1, 2], &[2, 4]]);
        assert_eq!(lll_reduce(&b), Err(Error::LinearlyDependent));
    }

    #[test]
    fn unimodular_scramble_recovers_short_basis() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            let mut m = IntMat::identity(4);
            for _ in 0..12 {
                let i = rng.gen_range(0..4);
                let j = (i + rng.gen_range(1..4)) % 4;
                let f = Int::from(rng.gen_range(-3..=3));
                for r in 0..4 {
                    let v = &m[(r, j)] * &f;
                    m[(r, i)] += v;
                }
            }
            let r = lll_reduce(&m).unwrap();
            assert!(det(&r).unwrap().abs().is_one());
            assert!(is_lll_reduced(&r));
            assert!(max_col_norm2(&r) <= max_col_norm2(&m));
        }
    }

    #[test]
    fn random_lattices_preserved() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let mut done = 0;
        while done < 100 {
            let n = rng.gen_range(1..=5);
            let cols: Vec<Vec<i64>> = (0..n)
                .map(|_| (0..n).map(|_| rng.gen_range(-30..=30)).collect())
                .collect();
            let refs: Vec<&[i64]> = cols.iter().map(Vec::as_slice).collect();
            let m = int_mat_cols(&refs);
            let dm = det(&m).unwrap();
            if dm.is_zero() {
                continue;
            }
            let r = lll_reduce(&m).unwrap();
            assert_eq!(det(&r).unwrap().abs(), dm.abs());
            assert!(is_lll_reduced(&r), "{r:?}");
            // same lattice: both bases express each other integrally
            let inv = crate::arith::inverse(&m).unwrap();
            let coords = inv.mul(&crate::arith::to_rat_mat(&r)).unwrap();
            assert!(coords.entries().iter().all(|x| x.is_integer()));
            done += 1;
        }
    }
}
