//! Simplicial cones: index, polarization, triangulation of pointed cones and
//! lattice points of fundamental parallelepipeds.

use std::collections::BTreeMap;

use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::arith::{
    adjugate, common_denominator, det, dot, primitive, rank_int, snf, unimodular_inverse, Int, IntMat, IntVec, Rat,
    RatVec,
};
use crate::error::{Error, Result};
use crate::polytope::{extreme_rays, RayCone};

/// `apex + B R^d_+` with primitive columns, weighted by `sign`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimplicialCone {
    pub apex: RatVec,
    basis: IntMat,
    pub sign: i8,
}

impl SimplicialCone {
    /// Columns are scaled to primitive vectors; `basis` must be square and nonsingular.
    pub fn new(apex: RatVec, basis: IntMat, sign: i8) -> Result<Self> {
        if !basis.is_square() {
            return Err(Error::NotSquare {
                rows: basis.rows(),
                cols: basis.cols(),
            });
        }
        if apex.len() != basis.rows() {
            return Err(Error::DimensionMismatch(format!(
                "apex of length {} for a {}-dimensional cone",
                apex.len(),
                basis.rows()
            )));
        }
        if det(&basis)?.is_zero() {
            return Err(Error::Singular);
        }
        let cols: Vec<IntVec> = basis.columns().iter().map(|c| primitive(c)).collect();
        Ok(Self {
            apex,
            basis: IntMat::from_columns(&cols)?,
            sign: if sign < 0 { -1 } else { 1 },
        })
    }

    pub(crate) fn from_parts_unchecked(apex: RatVec, basis: IntMat, sign: i8) -> Self {
        debug_assert!(basis.columns().iter().all(|c| crate::arith::is_primitive(c)));
        Self { apex, basis, sign }
    }

    pub fn basis(&self) -> &IntMat {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.basis.rows()
    }

    pub fn det(&self) -> Int {
        det(&self.basis).expect("basis is square")
    }

    /// `|det B|`, the number of lattice points in the fundamental parallelepiped.
    pub fn index(&self) -> Int {
        self.det().abs()
    }

    pub fn with_apex(&self, apex: RatVec) -> Self {
        Self {
            apex,
            basis: self.basis.clone(),
            sign: self.sign,
        }
    }

    /// Polar cone: columns of `-(B^{-1})^T`, made primitive; apex and sign kept.
    pub fn polarize(&self) -> Self {
        Self {
            apex: self.apex.clone(),
            basis: polar_basis(&self.basis),
            sign: self.sign,
        }
    }

    /// Whether the integer point lies in the closed cone.
    pub fn contains(&self, x: &[Int]) -> bool {
        let (d, adj) = adjugate(&self.basis).expect("nonsingular basis");
        coordinates_scaled(&adj, &d, x, &self.apex)
            .iter()
            .all(|c| !c.is_negative())
    }
}

/// `D * B^{-1} (x - apex)` with the sign of `D` folded in, so each entry has
/// the sign of the corresponding cone coordinate.
fn coordinates_scaled(adj: &IntMat, det: &Int, x: &[Int], apex: &[Rat]) -> Vec<Rat> {
    let diff: Vec<Rat> = x
        .iter()
        .zip(apex)
        .map(|(xi, ai)| Rat::from_integer(xi.clone()) - ai)
        .collect();
    let s = if det.is_negative() { -Rat::one() } else { Rat::one() };
    (0..adj.rows())
        .map(|i| {
            adj.row(i)
                .iter()
                .zip(&diff)
                .fold(Rat::zero(), |acc, (a, d)| acc + d * a)
                * &s
        })
        .collect()
}

/// Primitive columns of `-(B^{-1})^T`.
pub fn polar_basis(b: &IntMat) -> IntMat {
    let (d, adj) = adjugate(b).expect("nonsingular basis");
    polar_from_adjugate(&d, &adj)
}

pub(crate) fn polar_from_adjugate(d: &Int, adj: &IntMat) -> IntMat {
    // column i of -(B^{-1})^T is -(row i of adj)/det
    let flip = !d.is_negative();
    let cols: Vec<IntVec> = (0..adj.rows())
        .map(|i| {
            let row: IntVec = adj
                .row(i)
                .iter()
                .map(|x| if flip { -x } else { x.clone() })
                .collect();
            primitive(&row)
        })
        .collect();
    IntMat::from_columns(&cols).expect("square")
}

/// Placing triangulation of a pointed full-dimensional cone.
///
/// The first `d` linearly independent generators (in input order) form the
/// initial simplex; every remaining generator is joined to the boundary
/// facets it strictly sees. Generators already inside the current cone are
/// not used. Each returned cone carries `C.apex` and sign `+1`.
pub fn triangulate(c: &RayCone) -> Result<Vec<SimplicialCone>> {
    let d = c.dim();
    let gens = c.generators.columns();
    if rank_int(&gens) < d {
        return Err(Error::NotFullDimensional);
    }
    // pointed iff the polar is full-dimensional
    let polar = extreme_rays(&gens, d);
    if rank_int(&polar.rays) < d {
        return Err(Error::NotPointed);
    }

    let mut initial: Vec<usize> = Vec::with_capacity(d);
    let mut chosen: Vec<IntVec> = Vec::with_capacity(d);
    for (i, g) in gens.iter().enumerate() {
        if initial.len() == d {
            break;
        }
        chosen.push(g.clone());
        if rank_int(&chosen) == chosen.len() {
            initial.push(i);
        } else {
            chosen.pop();
        }
    }

    let mut simplices: Vec<Vec<usize>> = Vec::new();
    let mut boundary: BTreeMap<Vec<usize>, IntVec> = BTreeMap::new();
    add_simplex(&gens, initial.clone(), &mut simplices, &mut boundary);

    for (gi, g) in gens.iter().enumerate() {
        if initial.contains(&gi) {
            continue;
        }
        let visible: Vec<Vec<usize>> = boundary
            .iter()
            .filter(|(_, n)| dot(n, g).is_positive())
            .map(|(f, _)| f.clone())
            .collect();
        for facet in visible {
            let mut s = facet;
            s.push(gi);
            s.sort_unstable();
            add_simplex(&gens, s, &mut simplices, &mut boundary);
        }
    }

    simplices
        .into_iter()
        .map(|s| {
            let cols: Vec<IntVec> = s.iter().map(|&i| gens[i].clone()).collect();
            SimplicialCone::new(c.apex.clone(), IntMat::from_columns(&cols)?, 1)
        })
        .collect()
}

fn add_simplex(
    gens: &[IntVec],
    simplex: Vec<usize>,
    simplices: &mut Vec<Vec<usize>>,
    boundary: &mut BTreeMap<Vec<usize>, IntVec>,
) {
    let cols: Vec<IntVec> = simplex.iter().map(|&i| gens[i].clone()).collect();
    let m = IntMat::from_columns(&cols).expect("square");
    let (dt, adj) = adjugate(&m).expect("simplex generators are independent");
    let outward = polar_from_adjugate(&dt, &adj);
    for (j, normal) in outward.columns().into_iter().enumerate() {
        let facet: Vec<usize> = simplex
            .iter()
            .enumerate()
            .filter(|&(k, _)| k != j)
            .map(|(_, &g)| g)
            .collect();
        if boundary.remove(&facet).is_none() {
            boundary.insert(facet, normal);
        }
    }
    simplices.push(simplex);
}

/// Lattice points of the half-open fundamental parallelepiped.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParallelepipedPoints {
    pub points: Vec<IntVec>,
}

/// Enumerates `Π ∩ Z^d` for `Π = apex + {B λ : 0 <= λ < 1}`.
///
/// With `U B V = S` in Smith form, `U^{-1} g` for `g` in the box
/// `Π_i [0, s_i)` runs over coset representatives of `Z^d / B Z^d`; each
/// is moved into `Π` by subtracting `B floor(λ)`. With `D = |det B|`, `A` the
/// adjugate scaled so `A B = D I`, and `apex = p / q`, the coordinates are
/// `floor(λ_i) = floor((<A_i, x> - e_i) / D)` where `e_i = ceil(<A_i, p> / q)`,
/// so the per-point work involves no fractions.
pub fn enumerate_parallelepiped(k: &SimplicialCone) -> ParallelepipedPoints {
    let (p, q) = common_denominator(&k.apex);
    enumerate_parallelepiped_at(k, &p, &q)
}

/// As [`enumerate_parallelepiped`] with the apex already written as `p / q`,
/// which saves the denominator computation when many cones share an apex.
pub(crate) fn enumerate_parallelepiped_at(k: &SimplicialCone, p: &[Int], q: &Int) -> ParallelepipedPoints {
    let b = &k.basis;
    let n = k.dim();
    let (dt, adj) = adjugate(b).expect("nonsingular basis");
    let (big_d, adj) = if dt.is_negative() { (-dt, adj.map(|x| -x)) } else { (dt, adj) };
    // unimodular cones have the single coset 0
    let (u_inv, diag) = if big_d.is_one() {
        (IntMat::identity(n), vec![Int::one(); n])
    } else {
        let form = snf(b).expect("nonsingular basis");
        let u_inv = unimodular_inverse(&form.u).expect("U is unimodular");
        (u_inv, form.diagonal())
    };
    let offsets: IntVec = (0..n).map(|i| ceil_div(&dot(adj.row(i), p), q)).collect();

    let total: usize = diag
        .iter()
        .map(|s| usize::try_from(s).expect("index fits in memory"))
        .product();
    let points = match small_parallelepiped(&u_inv, &adj, b, &offsets, &big_d, &diag, total) {
        Some(points) => points,
        None => big_parallelepiped(&u_inv, &adj, b, &offsets, &big_d, &diag, total),
    };
    ParallelepipedPoints { points }
}

fn ceil_div(a: &Int, b: &Int) -> Int {
    -(-a).div_floor(b)
}

/// Advances a row-major odometer over `Π_i [0, s_i)`; false once exhausted.
fn odometer<T: Clone + PartialOrd + From<u8> + std::ops::AddAssign>(g: &mut [T], limits: &[T]) -> bool {
    for i in (0..g.len()).rev() {
        g[i] += T::from(1);
        if g[i] < limits[i] {
            return true;
        }
        g[i] = T::from(0);
    }
    false
}

fn big_parallelepiped(
    u_inv: &IntMat,
    adj: &IntMat,
    b: &IntMat,
    offsets: &[Int],
    big_d: &Int,
    diag: &[Int],
    total: usize,
) -> Vec<IntVec> {
    let n = b.rows();
    let mut points = Vec::with_capacity(total);
    let mut g = vec![Int::zero(); n];
    loop {
        let x = u_inv.mul_vec(&g).expect("square");
        let floors: IntVec = (0..n)
            .map(|i| (dot(adj.row(i), &x) - &offsets[i]).div_floor(big_d))
            .collect();
        let correction = b.mul_vec(&floors).expect("square");
        points.push(x.iter().zip(&correction).map(|(a, c)| a - c).collect());
        if !odometer(&mut g, diag) {
            return points;
        }
    }
}

/// Checked `i128` version of [`big_parallelepiped`]; `None` on overflow.
fn small_parallelepiped(
    u_inv: &IntMat,
    adj: &IntMat,
    b: &IntMat,
    offsets: &[Int],
    big_d: &Int,
    diag: &[Int],
    total: usize,
) -> Option<Vec<IntVec>> {
    let n = b.rows();
    let small = |m: &IntMat| -> Option<Vec<Vec<i128>>> {
        m.row_vecs().iter().map(|r| r.iter().map(ToPrimitive::to_i128).collect()).collect()
    };
    let (u_inv, adj, b) = (small(u_inv)?, small(adj)?, small(b)?);
    let offsets: Vec<i128> = offsets.iter().map(ToPrimitive::to_i128).collect::<Option<_>>()?;
    let big_d = big_d.to_i128()?;
    let diag: Vec<i128> = diag.iter().map(ToPrimitive::to_i128).collect::<Option<_>>()?;
    let dot = |r: &[i128], v: &[i128]| -> Option<i128> {
        r.iter().zip(v).try_fold(0i128, |acc, (a, b)| acc.checked_add(a.checked_mul(*b)?))
    };

    let mut points = Vec::with_capacity(total);
    let mut g = vec![0i128; n];
    let mut x = vec![0i128; n];
    let mut floors = vec![0i128; n];
    loop {
        for (xi, row) in x.iter_mut().zip(&u_inv) {
            *xi = dot(row, &g)?;
        }
        for ((f, row), e) in floors.iter_mut().zip(&adj).zip(&offsets) {
            *f = dot(row, &x)?.checked_sub(*e)?.div_euclid(big_d);
        }
        let mut point = Vec::with_capacity(n);
        for (xi, row) in x.iter().zip(&b) {
            point.push(Int::from(xi.checked_sub(dot(row, &floors)?)?));
        }
        points.push(point);
        if !odometer(&mut g, &diag) {
            return Some(points);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{int_mat_cols, int_vec, rat, to_rat_vec};
    use std::collections::BTreeSet;

    fn cone(cols: &[&[i64]], apex: RatVec) -> SimplicialCone {
        SimplicialCone::new(apex, int_mat_cols(cols), 1).unwrap()
    }

    fn zero(d: usize) -> RatVec {
        vec![Rat::zero(); d]
    }

    fn in_parallelepiped(k: &SimplicialCone, x: &[Int]) -> bool {
        let inv = crate::arith::inverse(k.basis()).unwrap();
        let diff: RatVec = to_rat_vec(x).iter().zip(&k.apex).map(|(a, b)| a - b).collect();
        inv.mul_vec(&diff)
            .unwrap()
            .iter()
            .all(|l| !l.is_negative() && *l < Rat::one())
    }

    fn box_scan(k: &SimplicialCone, lo: i64, hi: i64) -> BTreeSet<IntVec> {
        let d = k.dim();
        let mut out = BTreeSet::new();
        let width = (hi - lo + 1) as usize;
        for idx in 0..width.pow(d as u32) {
            let mut x = Vec::with_capacity(d);
            let mut r = idx;
            for _ in 0..d {
                x.push(Int::from(lo + (r % width) as i64));
                r /= width;
            }
            if in_parallelepiped(k, &x) {
                out.insert(x);
            }
        }
        out
    }

    #[test]
    fn index_examples() {
        assert_eq!(cone(&[&[1, 0], &[0, 1]], zero(2)).index(), Int::from(1));
        assert_eq!(cone(&[&[1, 0], &[1, 5]], zero(2)).index(), Int::from(5));
        assert_eq!(cone(&[&[1, 0], &[1, 2]], zero(2)).index(), Int::from(2));
        assert_eq!(cone(&[&[1, 2], &[1, 5]], zero(2)).index(), Int::from(3));
    }

    #[test]
    fn polarize_examples() {
        let k = cone(&[&[1, 0], &[0, 1]], zero(2));
        assert_eq!(k.polarize().basis(), &int_mat_cols(&[&[-1, 0], &[0, -1]]));

        let k = cone(&[&[1, 0], &[1, 5]], zero(2));
        let p = k.polarize();
        assert_eq!(p.basis(), &int_mat_cols(&[&[-5, 1], &[0, -1]]));
        for i in 0..2 {
            for j in 0..2 {
                let v = dot(&p.basis().col(i), &k.basis().col(j));
                if i == j {
                    assert!(v.is_negative());
                } else {
                    assert!(v.is_zero());
                }
            }
        }
        assert_eq!(p.polarize().basis(), k.basis());
    }

    #[test]
    fn double_polarization_random() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let mut done = 0;
        while done < 50 {
            let d = rng.gen_range(1..=4);
            let cols: Vec<IntVec> = (0..d)
                .map(|_| (0..d).map(|_| Int::from(rng.gen_range(-6..=6))).collect())
                .collect();
            let m = IntMat::from_columns(&cols).unwrap();
            let Ok(k) = SimplicialCone::new(zero(d), m, 1) else {
                continue;
            };
            // polar columns are in the same order, so equality is exact
            assert_eq!(k.polarize().polarize().basis(), k.basis());
            done += 1;
        }
    }

    #[test]
    fn parallelepiped_examples() {
        let k = cone(&[&[1, 0], &[0, 1]], zero(2));
        assert_eq!(enumerate_parallelepiped(&k).points, vec![int_vec(&[0, 0])]);

        let k = cone(&[&[1, 0], &[1, 5]], zero(2));
        let pts: BTreeSet<IntVec> = enumerate_parallelepiped(&k).points.into_iter().collect();
        let expected: BTreeSet<IntVec> = [[0, 0], [1, 1], [1, 2], [1, 3], [1, 4]]
            .iter()
            .map(|p| int_vec(p))
            .collect();
        assert_eq!(pts, expected);
        assert_eq!(box_scan(&k, 0, 5), expected);

        let k = cone(&[&[1, 0], &[1, 2]], vec![rat(1, 2), rat(1, 2)]);
        let pts = enumerate_parallelepiped(&k).points;
        assert_eq!(pts.len(), 2);
        assert!(pts.iter().all(|p| in_parallelepiped(&k, p)));
        assert_eq!(pts.into_iter().collect::<BTreeSet<_>>(), box_scan(&k, -2, 4));
    }

    #[test]
    fn parallelepiped_counts_random() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(17);
        let mut done = 0;
        while done < 200 {
            let d = rng.gen_range(1..=5);
            let cols: Vec<IntVec> = (0..d)
                .map(|_| (0..d).map(|_| Int::from(rng.gen_range(-4..=4))).collect())
                .collect();
            let apex: RatVec = (0..d).map(|_| rat(rng.gen_range(-20..=20), rng.gen_range(1..=7))).collect();
            let Ok(k) = SimplicialCone::new(apex, IntMat::from_columns(&cols).unwrap(), 1) else {
                continue;
            };
            if k.index() > Int::from(200) {
                continue;
            }
            let pts = enumerate_parallelepiped(&k).points;
            assert_eq!(Int::from(pts.len()), k.index());
            assert!(pts.iter().all(|p| in_parallelepiped(&k, p)));
            let distinct: BTreeSet<&IntVec> = pts.iter().collect();
            assert_eq!(distinct.len(), pts.len());
            done += 1;
        }
    }

    fn ray_cone(cols: &[&[i64]]) -> RayCone {
        let g = int_mat_cols(cols);
        RayCone { apex: zero(g.rows()), generators: g, facets: None }
    }

    #[test]
    fn triangulate_simplicial_is_identity() {
        let c = ray_cone(&[&[1, 0, 0], &[1, 1, 0], &[0, 0, 1]]);
        let t = triangulate(&c).unwrap();
        assert_eq!(t.len(), 1);
        assert_eq!(t[0].basis(), &c.generators);
    }

    #[test]
    fn triangulate_square_cone() {
        let c = ray_cone(&[&[1, 0, 1], &[0, 1, 1], &[-1, 0, 1], &[0, -1, 1]]);
        let t = triangulate(&c).unwrap();
        assert_eq!(t.len(), 2);
        // cross-section at height 1 is a square of area 2; the two triangles
        // each have |det| / 2! = 1
        let area: Int = t.iter().map(SimplicialCone::index).sum();
        assert_eq!(area, Int::from(4));
    }

    #[test]
    fn triangulate_redundant_ray_depends_on_order() {
        let appended = ray_cone(&[&[1, 0], &[0, 1], &[1, 1]]);
        assert_eq!(triangulate(&appended).unwrap().len(), 1);
        let placed_between = ray_cone(&[&[1, 0], &[1, 1], &[0, 1]]);
        let t = triangulate(&placed_between).unwrap();
        assert_eq!(t.len(), 2);
        let bases: BTreeSet<Vec<IntVec>> = t.iter().map(|k| k.basis().columns()).collect();
        assert!(bases.contains(&vec![int_vec(&[1, 0]), int_vec(&[1, 1])]));
        assert!(bases.contains(&vec![int_vec(&[1, 1]), int_vec(&[0, 1])]));
    }

    #[test]
    fn triangulate_rejects_lines() {
        let c = ray_cone(&[&[1, 0], &[-1, 0], &[0, 1]]);
        assert_eq!(triangulate(&c), Err(Error::NotPointed));
    }

    #[test]
    fn triangulation_covers_and_is_disjoint() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(23);
        // cone over a hexagon-ish polygon and a 3D cone over a pentagonal pyramid
        let cones = vec![
            ray_cone(&[&[2, 0, 1], &[1, 2, 1], &[-1, 2, 1], &[-2, 0, 1], &[-1, -2, 1], &[1, -2, 1]]),
            ray_cone(&[&[1, 0, 0, 1], &[0, 1, 0, 1], &[-1, 0, 0, 1], &[0, -1, 0, 1], &[0, 0, 1, 1], &[1, 1, -1, 2]]),
        ];
        for c in cones {
            let t = triangulate(&c).unwrap();
            let d = c.dim();
            let gens = c.generators.columns();
            for _ in 0..1000 {
                // random positive combination of the generators
                let mut x = vec![Int::zero(); d];
                for g in &gens {
                    let w = Int::from(rng.gen_range(0..50));
                    for (xi, gi) in x.iter_mut().zip(g) {
                        *xi += &w * gi;
                    }
                }
                let interior_hits = t
                    .iter()
                    .filter(|k| {
                        let (dt, adj) = adjugate(k.basis()).unwrap();
                        coordinates_scaled(&adj, &dt, &x, &k.apex).iter().all(|v| v.is_positive())
                    })
                    .count();
                let closed_hits = t.iter().filter(|k| k.contains(&x)).count();
                assert!(interior_hits <= 1, "interiors overlap at {x:?}");
                assert!(closed_hits >= 1, "{x:?} not covered");
            }
        }
    }
}
