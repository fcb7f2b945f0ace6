//! Double description for cones `{y : c_i · y <= 0}`.

use num_traits::{Signed, Zero};

use crate::arith::{dot, primitive, Int};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub(crate) struct BitSet(Vec<u64>);

impl BitSet {
    fn with_capacity(bits: usize) -> Self {
        Self(vec![0; bits.div_ceil(64).max(1)])
    }

    fn insert(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }

    fn intersection(&self, other: &Self) -> Self {
        Self(self.0.iter().zip(&other.0).map(|(a, b)| a & b).collect())
    }

    fn is_superset(&self, other: &Self) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a & b == *b)
    }

    fn len(&self) -> usize {
        self.0.iter().map(|w| w.count_ones() as usize).sum()
    }
}

struct Ray {
    v: Vec<Int>,
    zeros: BitSet,
}

/// Generators of `{y : c · y <= 0 for every c}`: a lineality basis and the
/// extreme rays modulo it, all primitive.
#[derive(Clone, Debug, Default)]
pub struct ConeGenerators {
    pub lineality: Vec<Vec<Int>>,
    pub rays: Vec<Vec<Int>>,
}

/// Incremental double description: constraints are inserted one at a time
/// and adjacency is decided combinatorially from zero sets.
pub fn extreme_rays(constraints: &[Vec<Int>], dim: usize) -> ConeGenerators {
    let m = constraints.len();
    let mut lineality: Vec<Vec<Int>> = (0..dim)
        .map(|i| {
            (0..dim)
                .map(|j| if i == j { Int::from(1) } else { Int::zero() })
                .collect()
        })
        .collect();
    let mut rays: Vec<Ray> = Vec::new();

    for (idx, c) in constraints.iter().enumerate() {
        debug_assert_eq!(c.len(), dim);
        if let Some(p) = lineality.iter().position(|l| !dot(c, l).is_zero()) {
            let mut l = lineality.remove(p);
            let mut cl = dot(c, &l);
            if cl.is_positive() {
                l = l.iter().map(|x| -x).collect();
                cl = -cl;
            }
            for lj in lineality.iter_mut() {
                let s = dot(c, lj);
                if s.is_zero() {
                    continue;
                }
                let v: Vec<Int> = lj.iter().zip(&l).map(|(x, y)| &cl * x - &s * y).collect();
                *lj = primitive(&v);
            }
            let neg_cl = -&cl;
            for r in rays.iter_mut() {
                let s = dot(c, &r.v);
                if !s.is_zero() {
                    let v: Vec<Int> = r.v.iter().zip(&l).map(|(x, y)| &neg_cl * x + &s * y).collect();
                    r.v = primitive(&v);
                }
                r.zeros.insert(idx);
            }
            let mut zeros = BitSet::with_capacity(m);
            for k in 0..idx {
                zeros.insert(k);
            }
            rays.push(Ray { v: l, zeros });
            continue;
        }

        let values: Vec<Int> = rays.iter().map(|r| dot(c, &r.v)).collect();
        let pos: Vec<usize> = (0..rays.len()).filter(|&i| values[i].is_positive()).collect();
        if pos.is_empty() {
            for (r, v) in rays.iter_mut().zip(&values) {
                if v.is_zero() {
                    r.zeros.insert(idx);
                }
            }
            continue;
        }
        let neg: Vec<usize> = (0..rays.len()).filter(|&i| values[i].is_negative()).collect();
        let pointed_dim = dim - lineality.len();
        let mut created = Vec::new();
        for &p in &pos {
            for &n in &neg {
                let common = rays[p].zeros.intersection(&rays[n].zeros);
                if pointed_dim >= 2 && common.len() + 2 < pointed_dim {
                    continue;
                }
                let adjacent = rays.iter().enumerate().all(|(k, r)| {
                    k == p || k == n || !r.zeros.is_superset(&common)
                });
                if !adjacent {
                    continue;
                }
                let v: Vec<Int> = rays[n]
                    .v
                    .iter()
                    .zip(&rays[p].v)
                    .map(|(xn, xp)| &values[p] * xn - &values[n] * xp)
                    .collect();
                let mut zeros = common;
                zeros.insert(idx);
                created.push(Ray { v: primitive(&v), zeros });
            }
        }
        let mut next: Vec<Ray> = Vec::with_capacity(rays.len() + created.len());
        for (mut r, v) in rays.into_iter().zip(values) {
            if v.is_positive() {
                continue;
            }
            if v.is_zero() {
                r.zeros.insert(idx);
            }
            next.push(r);
        }
        next.extend(created);
        rays = next;
    }

    ConeGenerators {
        lineality,
        rays: rays.into_iter().map(|r| r.v).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::int_vec;

    fn sorted(mut v: Vec<Vec<Int>>) -> Vec<Vec<Int>> {
        v.sort();
        v
    }

    #[test]
    fn orthant() {
        let cs = vec![int_vec(&[-1, 0]), int_vec(&[0, -1])];
        let g = extreme_rays(&cs, 2);
        assert!(g.lineality.is_empty());
        assert_eq!(sorted(g.rays), vec![int_vec(&[0, 1]), int_vec(&[1, 0])]);
    }

    #[test]
    fn halfplane_keeps_lineality() {
        let cs = vec![int_vec(&[0, -1])];
        let g = extreme_rays(&cs, 2);
        assert_eq!(g.lineality.len(), 1);
        assert_eq!(g.rays, vec![int_vec(&[0, 1])]);
    }

    #[test]
    fn square_pyramid_cone() {
        // cone over the square [-1,1]^2 at height 1: |x| <= z, |y| <= z
        let cs = vec![
            int_vec(&[1, 0, -1]),
            int_vec(&[-1, 0, -1]),
            int_vec(&[0, 1, -1]),
            int_vec(&[0, -1, -1]),
        ];
        let g = extreme_rays(&cs, 3);
        assert!(g.lineality.is_empty());
        assert_eq!(
            sorted(g.rays),
            vec![
                int_vec(&[-1, -1, 1]),
                int_vec(&[-1, 1, 1]),
                int_vec(&[1, -1, 1]),
                int_vec(&[1, 1, 1]),
            ]
        );
    }
}
