//! Apex perturbations that keep a cone's lattice points and push every
//! facet off the lattice.

use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::arith::{adjugate, common_denominator, dot, dot_int_rat, floor_rat, Int, IntMat, Rat, RatVec};
use crate::cone::SimplicialCone;
use crate::error::{Error, Result};
use crate::lp::{maximize, LpOutcome};

/// Apexes within `radius` (sup norm) of `center` give the same lattice points.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StabilityCube {
    pub center: RatVec,
    pub radius: Rat,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShiftParams {
    pub d_bound: Int,
    pub c_bound: Int,
    pub k: u32,
    pub l: Int,
    pub m: Int,
    pub r: Int,
    pub s: RatVec,
    pub v_tilde: RatVec,
}

/// Closed-form cube for `v + B R^d_+`.
///
/// With `b*_i` the columns of `-(B^{-1})^T`, `λ_i = <b*_i, v>` is rounded to
/// the midpoint `λ̂_i = (⌊Dλ_i⌋ + 1/2) / D` of its `1/D` cell; the center is
/// `-B λ̂` and the radius `1 / (2D max ‖b*_i‖_1)`.
pub fn stability_cube_simplicial(v: &[Rat], b: &IntMat) -> Result<StabilityCube> {
    let (dt, adj) = adjugate(b)?;
    if dt.is_zero() {
        return Err(Error::Singular);
    }
    let n = b.rows();
    let big_d = dt.abs();
    let d_rat = Rat::from_integer(big_d.clone());
    let half = Rat::new(Int::one(), Int::from(2));
    // b*_i = -(row i of adj) / det
    let neg_det = Rat::from_integer(-&dt);
    let mut lam_hat = Vec::with_capacity(n);
    let mut max_norm1 = Rat::zero();
    for i in 0..n {
        let row = adj.row(i);
        let lam = dot_int_rat(row, v) / &neg_det;
        let cell = floor_rat(&(&lam * &d_rat));
        lam_hat.push((Rat::from_integer(cell) + &half) / &d_rat);
        let norm1: Int = row.iter().map(Int::abs).sum();
        let norm1 = Rat::new(norm1, big_d.clone());
        if norm1 > max_norm1 {
            max_norm1 = norm1;
        }
    }
    let center = (0..n)
        .map(|r| {
            -(0..n).fold(Rat::zero(), |acc, c| {
                acc + &lam_hat[c] * Rat::from_integer(b[(r, c)].clone())
            })
        })
        .collect();
    let radius = (Rat::from_integer(Int::from(2)) * d_rat * max_norm1).recip();
    Ok(StabilityCube { center, radius })
}

/// Largest cube around some center for the cone `{x : <n_j, x - v> <= 0}`,
/// given its integer outward facet normals as columns.
///
/// Maximizes `ρ` subject to
/// `⌊<n,v>⌋ + ‖n‖_1 ρ <= <n, ĥ> <= ⌊<n,v>⌋ + 1 - ‖n‖_1 ρ` for every normal.
pub fn stability_cube_lp(v: &[Rat], facet_normals: &IntMat) -> Result<StabilityCube> {
    let d = v.len();
    if facet_normals.rows() != d {
        return Err(Error::DimensionMismatch(format!(
            "normals of length {} for apex of length {d}",
            facet_normals.rows()
        )));
    }
    let mut a = Vec::with_capacity(2 * facet_normals.cols());
    let mut b = Vec::with_capacity(2 * facet_normals.cols());
    for normal in facet_normals.columns() {
        let fl = Rat::from_integer(floor_rat(&dot_int_rat(&normal, v)));
        let norm1 = Rat::from_integer(normal.iter().map(Int::abs).sum());
        let as_rat: RatVec = normal.iter().map(|x| Rat::from_integer(x.clone())).collect();

        let mut upper = as_rat.clone();
        upper.push(norm1.clone());
        a.push(upper);
        b.push(&fl + Rat::one());

        let mut lower: RatVec = as_rat.iter().map(|x| -x).collect();
        lower.push(norm1);
        a.push(lower);
        b.push(-fl);
    }
    let mut objective = vec![Rat::zero(); d + 1];
    objective[d] = Rat::one();
    match maximize(&a, &b, &objective) {
        LpOutcome::Optimal { mut x, value } => {
            if !value.is_positive() {
                return Err(Error::MalformedLp("stability cube has no interior"));
            }
            x.truncate(d);
            Ok(StabilityCube {
                center: x,
                radius: value,
            })
        }
        LpOutcome::Infeasible => Err(Error::MalformedLp("stability cube LP infeasible")),
        LpOutcome::Unbounded => Err(Error::MalformedLp("stability cube LP unbounded")),
    }
}

/// Depth bound `k(D) = ⌊1 + log2 log2 D / log2(d/(d-1))⌋`, with `k(1) = 0`.
pub fn depth_bound(big_d: &Int, d: usize) -> u32 {
    if *big_d <= Int::one() {
        return 0;
    }
    if d <= 1 {
        return 1;
    }
    // ⌊log2 log2 D / log2 q⌋ is the largest j with q^j <= log2 D, q = d/(d-1)
    let q_num = Int::from(d);
    let q_den = Int::from(d - 1);
    let bits = big_d.bits();
    let exact_log = if big_d.is_positive() && (big_d & (big_d - 1u32)).is_zero() {
        Some(bits - 1)
    } else {
        None
    };
    let mut j: u32 = 0;
    loop {
        let next = j + 1;
        let fits = match exact_log {
            Some(e) => q_num.pow(next) <= q_den.pow(next) * Int::from(e),
            None => {
                let q = d as f64 / (d - 1) as f64;
                q.powi(next as i32) <= log2_big(big_d)
            }
        };
        if !fits {
            return 1 + j;
        }
        j = next;
    }
}

fn log2_big(x: &Int) -> f64 {
    let bits = x.bits();
    if bits <= 1000 {
        return x.to_f64().expect("finite").log2();
    }
    let shift = bits - 64;
    let top: Int = x >> shift;
    top.to_f64().expect("finite").log2() + shift as f64
}

/// The shift of the uniform irrationality construction: `s_j = 1/(r (2M)^j)`
/// with `M = 2 (d-1)! (d^k C)^{d-1}` and `r = ⌊1/ρ⌋ + 1`.
pub fn make_shift(cube: &StabilityCube, big_d: &Int, c: &Int, d: usize) -> ShiftParams {
    assert!(cube.radius.is_positive(), "cube radius must be positive");
    let k = depth_bound(big_d, d);
    let fact: Int = (1..d.max(1)).map(Int::from).product();
    let base = Int::from(d).pow(k) * c;
    let l = fact * base.pow(d.saturating_sub(1) as u32);
    let m = Int::from(2) * &l;
    let r = floor_rat(&cube.radius.recip()) + Int::one();
    let two_m = Int::from(2) * &m;
    let mut s = Vec::with_capacity(d);
    let mut denom = r.clone();
    for _ in 0..d {
        denom *= &two_m;
        s.push(Rat::new(Int::one(), denom.clone()));
    }
    let v_tilde = cube.center.iter().zip(&s).map(|(a, b)| a + b).collect();
    ShiftParams {
        d_bound: big_d.clone(),
        c_bound: c.clone(),
        k,
        l,
        m,
        r,
        s,
        v_tilde,
    }
}

/// `⌈(max ‖b_i‖²)^{n/2}⌉` over the `n` generator columns.
pub fn index_bound_for_triangulation(generators: &IntMat) -> Int {
    let n = generators.cols();
    let max_sq = generators
        .columns()
        .iter()
        .map(|g| g.iter().map(|x| x * x).sum::<Int>())
        .max()
        .unwrap_or_else(Int::zero);
    let full = max_sq.pow(n as u32);
    let root = full.sqrt();
    if &root * &root == full {
        root
    } else {
        root + 1
    }
}

/// No lattice point lies on a facet: `<det(B) b*_i, apex> ∉ Z` for all `i`.
pub fn verify_irrational(k: &SimplicialCone) -> bool {
    let (_, adj) = adjugate(k.basis()).expect("nonsingular basis");
    let (p, q) = common_denominator(&k.apex);
    (0..adj.rows()).all(|i| !dot(adj.row(i), &p).is_multiple_of(&q))
}

/// Largest absolute entry, at least 1.
pub fn entry_bound(m: &IntMat) -> Int {
    m.entries()
        .iter()
        .map(Int::abs)
        .max()
        .filter(|x| !x.is_zero())
        .unwrap_or_else(Int::one)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{int_mat_cols, rat, IntVec};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn rv(pairs: &[(i64, i64)]) -> RatVec {
        pairs.iter().map(|&(a, b)| rat(a, b)).collect()
    }

    /// Integer thresholds `t_i` with `x ∈ K ⟺ sgn·<adj_i, x> >= t_i`.
    fn thresholds(b: &IntMat, apex: &[Rat]) -> (IntMat, Vec<Int>) {
        let (dt, adj) = adjugate(b).unwrap();
        let s = if dt.is_negative() { -Int::one() } else { Int::one() };
        let signed = adj.map(|x| x * &s);
        let t = (0..signed.rows())
            .map(|i| {
                let c = dot_int_rat(signed.row(i), apex);
                -floor_rat(&-c)
            })
            .collect();
        (signed, t)
    }

    fn boxed_points(b: &IntMat, apex: &[Rat], n: i64) -> Vec<Vec<i64>> {
        let (adj, t) = thresholds(b, apex);
        let d = b.rows();
        let rows: Vec<Vec<i64>> = adj.row_vecs().iter().map(|r| r.iter().map(|x| x.to_i64().unwrap()).collect()).collect();
        let t: Vec<i64> = t.iter().map(|x| x.to_i64().unwrap_or(if x.is_negative() { i64::MIN / 4 } else { i64::MAX / 4 })).collect();
        let width = (2 * n + 1) as usize;
        let mut out = Vec::new();
        let mut x = vec![-n; d];
        for _ in 0..width.pow(d as u32) {
            if rows.iter().zip(&t).all(|(r, ti)| r.iter().zip(&x).map(|(a, b)| a * b).sum::<i64>() >= *ti) {
                out.push(x.clone());
            }
            for xi in x.iter_mut() {
                *xi += 1;
                if *xi <= n {
                    break;
                }
                *xi = -n;
            }
        }
        out
    }

    #[test]
    fn simplicial_cube_examples() {
        let id = IntMat::identity(2);
        let c = stability_cube_simplicial(&rv(&[(1, 2), (1, 2)]), &id).unwrap();
        assert_eq!(c.center, rv(&[(1, 2), (1, 2)]));
        assert_eq!(c.radius, rat(1, 2));

        // the orthant at the origin keeps 0 only if the apex moves down
        let c = stability_cube_simplicial(&rv(&[(0, 1), (0, 1)]), &id).unwrap();
        assert_eq!(c.center, rv(&[(-1, 2), (-1, 2)]));
        assert_eq!(c.radius, rat(1, 2));

        let b = int_mat_cols(&[&[1, 0], &[1, 5]]);
        let c = stability_cube_simplicial(&rv(&[(0, 1), (0, 1)]), &b).unwrap();
        assert_eq!(c.radius, rat(1, 12));
    }

    #[test]
    fn lp_cube_examples() {
        let normals = int_mat_cols(&[&[-1, 0], &[0, -1]]);
        let c = stability_cube_lp(&rv(&[(1, 2), (1, 2)]), &normals).unwrap();
        assert_eq!(c.radius, rat(1, 2));
        assert_eq!(c.center, rv(&[(1, 2), (1, 2)]));

        // at a lattice apex the cube sits half a unit inside the orthant
        let c = stability_cube_lp(&rv(&[(3, 1), (-2, 1)]), &normals).unwrap();
        assert_eq!(c.radius, rat(1, 2));
        assert_eq!(c.center, rv(&[(5, 2), (-5, 2)]));
    }

    #[test]
    fn lp_cube_preserves_points_of_a_four_facet_cone() {
        // cone over a square at the lattice point (1, -1, 2)
        let gens = int_mat_cols(&[&[1, 0, 1], &[0, 1, 1], &[-1, 0, 1], &[0, -1, 1]]);
        let normals = crate::polytope::dual_description(&gens).unwrap();
        let v = rv(&[(1, 1), (-1, 1), (2, 1)]);
        let cube = stability_cube_lp(&v, &normals).unwrap();
        let inside = |apex: &[Rat], x: &[i64]| {
            normals.columns().iter().all(|n| {
                let lhs: Rat = n.iter().zip(x).map(|(a, b)| Rat::from_integer(a * Int::from(*b))).sum();
                lhs <= dot_int_rat(n, apex)
            })
        };
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..10 {
            let apex: RatVec = cube
                .center
                .iter()
                .map(|c| c + &cube.radius * rat(rng.gen_range(-99..=99), 100))
                .collect();
            for x0 in -6..=6 {
                for x1 in -6..=6 {
                    for x2 in -6..=6 {
                        let x = [x0, x1, x2];
                        assert_eq!(inside(&v, &x), inside(&apex, &x), "{x:?}");
                    }
                }
            }
        }
    }

    #[test]
    fn depth_bound_examples() {
        assert_eq!(depth_bound(&Int::from(1), 2), 0);
        assert_eq!(depth_bound(&Int::from(2), 2), 1);
        assert_eq!(depth_bound(&Int::from(5), 2), 2);
        assert_eq!(depth_bound(&Int::from(16), 2), 3);
        assert_eq!(depth_bound(&Int::from(15), 2), 2);
        assert_eq!(depth_bound(&Int::from(4), 2), 2);
    }

    #[test]
    fn depth_bound_matches_float_formula_and_is_monotone() {
        let mut prev = 0;
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let mut samples: Vec<u64> = (2..2000).collect();
        samples.extend((0..2000).map(|_| rng.gen_range(2..=1_000_000)));
        samples.sort_unstable();
        for d in 2..=7usize {
            prev = 0;
            for &dd in &samples {
                let k = depth_bound(&Int::from(dd), d);
                assert!(k >= prev);
                prev = k;
                let f = 1.0 + (dd as f64).log2().log2() / (d as f64 / (d - 1) as f64).log2();
                // only exact boundary hits may differ from the float value
                if (f - f.round()).abs() > 1e-9 {
                    assert_eq!(k, f.floor() as u32, "D={dd} d={d}");
                }
            }
        }
        assert!(prev > 0);
    }

    #[test]
    fn make_shift_examples() {
        let cube = StabilityCube { center: rv(&[(1, 2), (1, 2)]), radius: rat(1, 2) };
        let p = make_shift(&cube, &Int::from(1), &Int::from(1), 2);
        assert_eq!(p.k, 0);
        assert_eq!(p.l, Int::from(1));
        assert_eq!(p.m, Int::from(2));
        assert_eq!(p.r, Int::from(3));
        assert_eq!(p.s, rv(&[(1, 12), (1, 48)]));
        assert_eq!(p.v_tilde, rv(&[(7, 12), (25, 48)]));

        let cube = StabilityCube { center: rv(&[(0, 1), (0, 1)]), radius: rat(1, 12) };
        let p = make_shift(&cube, &Int::from(5), &Int::from(5), 2);
        assert_eq!((p.k, p.l.clone(), p.m.clone(), p.r.clone()), (2, Int::from(20), Int::from(40), Int::from(13)));
        let sup = p.s.iter().max().unwrap();
        assert!(*sup < cube.radius);
    }

    #[test]
    fn index_bound_examples() {
        assert_eq!(index_bound_for_triangulation(&IntMat::identity(3)), Int::from(1));
        assert_eq!(index_bound_for_triangulation(&int_mat_cols(&[&[1, 0], &[1, 5]])), Int::from(26));
        let g = int_mat_cols(&[&[1, 0, 1], &[0, 1, 1], &[-1, 0, 1], &[0, -1, 1]]);
        assert_eq!(index_bound_for_triangulation(&g), Int::from(4));
        // odd count rounds up: 2^{3/2} = 2.83
        let g = int_mat_cols(&[&[1, 1], &[0, 1], &[1, 0]]);
        assert_eq!(index_bound_for_triangulation(&g), Int::from(3));
    }

    #[test]
    fn verify_examples() {
        let id = IntMat::identity(2);
        let k = SimplicialCone::new(rv(&[(7, 12), (25, 48)]), id.clone(), 1).unwrap();
        assert!(verify_irrational(&k));
        let k = SimplicialCone::new(rv(&[(0, 1), (1, 2)]), id, 1).unwrap();
        assert!(!verify_irrational(&k));
    }

    #[test]
    fn shifted_simplicial_cones_keep_their_points() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        let mut done = 0;
        while done < 40 {
            let d = rng.gen_range(1..=3);
            let cols: Vec<IntVec> = (0..d).map(|_| (0..d).map(|_| Int::from(rng.gen_range(-5..=5))).collect()).collect();
            let Ok(k) = SimplicialCone::new(vec![Rat::zero(); d], IntMat::from_columns(&cols).unwrap(), 1) else {
                continue;
            };
            if k.index() > Int::from(50) {
                continue;
            }
            let v: RatVec = (0..d).map(|_| rat(rng.gen_range(-30..=30), rng.gen_range(1..=10))).collect();
            let cube = stability_cube_simplicial(&v, k.basis()).unwrap();
            let p = make_shift(&cube, &k.index(), &entry_bound(k.basis()), d);
            assert!(verify_irrational(&k.with_apex(p.v_tilde.clone())));
            assert_eq!(boxed_points(k.basis(), &v, 10), boxed_points(k.basis(), &p.v_tilde, 10));
            done += 1;
        }
    }
}
