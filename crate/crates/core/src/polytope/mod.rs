//! H-represented polytopes, their vertices and supporting cones.

mod dd;

use std::collections::BTreeSet;

use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::arith::{
    dot, dot_int_rat, primitive, rank_int, rank_rat, to_rat_vec, Int, IntMat, IntVec, Rat,
    RatVec,
};
use crate::error::{Error, Result};
use crate::lp::{maximize, LpOutcome};

pub use dd::{extreme_rays, ConeGenerators};

/// `{x : A x <= b}` with integer data.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HRep {
    a: Vec<IntVec>,
    b: IntVec,
    dim: usize,
}

impl HRep {
    pub fn new(dim: usize, rows: Vec<(IntVec, Int)>) -> Result<Self> {
        let mut a = Vec::with_capacity(rows.len());
        let mut b = Vec::with_capacity(rows.len());
        for (i, (row, rhs)) in rows.into_iter().enumerate() {
            if row.len() != dim {
                return Err(Error::DimensionMismatch(format!(
                    "row {i} has {} coefficients, expected {dim}",
                    row.len()
                )));
            }
            if row.iter().all(Zero::is_zero) {
                return Err(Error::InvalidInput(format!("row {i} has an all-zero normal")));
            }
            a.push(row);
            b.push(rhs);
        }
        Ok(Self { a, b, dim })
    }

    /// Clears each row's denominators by their least common multiple.
    pub fn from_rational(dim: usize, rows: Vec<(RatVec, Rat)>) -> Result<Self> {
        let rows = rows
            .into_iter()
            .map(|(row, rhs)| {
                let l = row
                    .iter()
                    .chain(std::iter::once(&rhs))
                    .fold(Int::one(), |acc, x| acc.lcm(x.denom()));
                let scale = |x: &Rat| (x * Rat::from_integer(l.clone())).to_integer();
                (row.iter().map(scale).collect(), scale(&rhs))
            })
            .collect();
        Self::new(dim, rows)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn num_rows(&self) -> usize {
        self.a.len()
    }

    pub fn normal(&self, i: usize) -> &[Int] {
        &self.a[i]
    }

    pub fn rhs(&self, i: usize) -> &Int {
        &self.b[i]
    }

    pub fn rows(&self) -> impl Iterator<Item = (&[Int], &Int)> {
        self.a.iter().map(Vec::as_slice).zip(&self.b)
    }

    pub fn normals(&self) -> IntMat {
        IntMat::from_rows(&self.a).expect("rows share the dimension")
    }

    pub fn contains(&self, x: &[Int]) -> bool {
        self.rows().all(|(a, b)| dot(a, x) <= *b)
    }

    pub fn contains_rat(&self, x: &[Rat]) -> bool {
        self.rows().all(|(a, b)| dot_int_rat(a, x) <= Rat::from_integer(b.clone()))
    }

    /// `[lo, hi]^d`.
    pub fn hypercube(dim: usize, lo: i64, hi: i64) -> Self {
        let mut rows = Vec::new();
        for i in 0..dim {
            rows.push((unit(dim, i, 1), Int::from(hi)));
            rows.push((unit(dim, i, -1), Int::from(-lo)));
        }
        Self::new(dim, rows).expect("well-formed cube")
    }

    /// `x >= 0, sum x <= t`.
    pub fn standard_simplex(dim: usize, t: i64) -> Self {
        let mut rows: Vec<(IntVec, Int)> = (0..dim).map(|i| (unit(dim, i, -1), Int::zero())).collect();
        rows.push((vec![Int::one(); dim], Int::from(t)));
        Self::new(dim, rows).expect("well-formed simplex")
    }

    /// `|x|_1 <= r`, one inequality per sign pattern.
    pub fn cross_polytope(dim: usize, r: i64) -> Self {
        let rows = (0..1u64 << dim)
            .map(|mask| {
                let row = (0..dim)
                    .map(|i| if mask >> i & 1 == 1 { Int::from(-1) } else { Int::one() })
                    .collect();
                (row, Int::from(r))
            })
            .collect();
        Self::new(dim, rows).expect("well-formed cross polytope")
    }

    /// The polytope translated by an integer vector.
    pub fn translated(&self, t: &[Int]) -> Self {
        let rows = self
            .rows()
            .map(|(a, b)| (a.to_vec(), b + dot(a, t)))
            .collect();
        Self::new(self.dim, rows).expect("translation keeps rows valid")
    }
}

fn unit(dim: usize, i: usize, value: i64) -> IntVec {
    (0..dim)
        .map(|j| if i == j { Int::from(value) } else { Int::zero() })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Vertex {
    pub point: RatVec,
    pub tight_rows: Vec<usize>,
}

impl Vertex {
    /// Exactly `dim` tight inequalities.
    pub fn is_simple(&self) -> bool {
        self.tight_rows.len() == self.point.len()
    }
}

/// A pointed cone `apex + cone(generators)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RayCone {
    pub apex: RatVec,
    /// Primitive generators as columns.
    pub generators: IntMat,
    /// Primitive outer facet normals as columns: the cone is
    /// `{x : <n, x> <= <n, apex>}`.
    pub facets: Option<IntMat>,
}

impl RayCone {
    pub fn dim(&self) -> usize {
        self.generators.rows()
    }

    pub fn num_rays(&self) -> usize {
        self.generators.cols()
    }

    pub fn is_simplicial(&self) -> bool {
        self.num_rays() == self.dim()
    }
}

/// Emptiness and boundedness via `2d` linear programs maximizing `±x_k`.
fn check_bounded_nonempty(p: &HRep) -> Result<()> {
    let a: Vec<RatVec> = p.a.iter().map(|r| to_rat_vec(r)).collect();
    let b: RatVec = to_rat_vec(&p.b);
    for k in 0..p.dim {
        for sign in [1i64, -1] {
            let mut c = vec![Rat::zero(); p.dim];
            c[k] = Rat::from_integer(Int::from(sign));
            match maximize(&a, &b, &c) {
                LpOutcome::Infeasible => return Err(Error::EmptyPolytope),
                LpOutcome::Unbounded => return Err(Error::Unbounded),
                LpOutcome::Optimal { .. } => {}
            }
        }
    }
    Ok(())
}

/// Integer bounding box `[lo_k, hi_k]` of a bounded polytope, from linear programs.
pub fn integer_bounding_box(p: &HRep) -> Result<Vec<(Int, Int)>> {
    let a: Vec<RatVec> = p.a.iter().map(|r| to_rat_vec(r)).collect();
    let b: RatVec = to_rat_vec(&p.b);
    let mut out = Vec::with_capacity(p.dim);
    for k in 0..p.dim {
        let mut c = vec![Rat::zero(); p.dim];
        c[k] = Rat::one();
        let hi = match maximize(&a, &b, &c) {
            LpOutcome::Optimal { value, .. } => value.floor().to_integer(),
            LpOutcome::Infeasible => return Err(Error::EmptyPolytope),
            LpOutcome::Unbounded => return Err(Error::Unbounded),
        };
        c[k] = -Rat::one();
        let lo = match maximize(&a, &b, &c) {
            LpOutcome::Optimal { value, .. } => (-value).ceil().to_integer(),
            LpOutcome::Infeasible => return Err(Error::EmptyPolytope),
            LpOutcome::Unbounded => return Err(Error::Unbounded),
        };
        out.push((lo, hi));
    }
    Ok(out)
}

fn tight_rows(p: &HRep, point: &[Rat]) -> Vec<usize> {
    p.rows()
        .enumerate()
        .filter(|(_, (a, b))| dot_int_rat(a, point) == Rat::from_integer((*b).clone()))
        .map(|(i, _)| i)
        .collect()
}

/// All vertices, sorted lexicographically, via double description of the
/// homogenized cone `{(x, t) : A x - b t <= 0, t >= 0}`.
pub fn enumerate_vertices(p: &HRep) -> Result<Vec<Vertex>> {
    let d = p.dim;
    check_bounded_nonempty(p)?;

    let mut constraints = Vec::with_capacity(p.num_rows() + 1);
    let mut t_nonneg = vec![Int::zero(); d + 1];
    t_nonneg[d] = Int::from(-1);
    constraints.push(t_nonneg);
    for (a, b) in p.rows() {
        let mut row = a.to_vec();
        row.push(-b);
        constraints.push(row);
    }
    let gens = extreme_rays(&constraints, d + 1);
    if !gens.lineality.is_empty() {
        return Err(Error::Unbounded);
    }
    let mut vertices = Vec::with_capacity(gens.rays.len());
    for ray in gens.rays {
        let t = &ray[d];
        if !t.is_positive() {
            return Err(Error::Unbounded);
        }
        let point: RatVec = ray[..d].iter().map(|x| Rat::new(x.clone(), t.clone())).collect();
        let tight = tight_rows(p, &point);
        vertices.push(Vertex { point, tight_rows: tight });
    }
    if vertices.is_empty() {
        return Err(Error::EmptyPolytope);
    }
    vertices.sort_by(|x, y| x.point.cmp(&y.point));

    let base = &vertices[0].point;
    let diffs: Vec<RatVec> = vertices[1..]
        .iter()
        .map(|v| v.point.iter().zip(base).map(|(x, y)| x - y).collect())
        .collect();
    if rank_rat(&diffs) < d {
        return Err(Error::NotFullDimensional);
    }
    Ok(vertices)
}

/// The cone of feasible directions at a vertex, with its generators and
/// irredundant facets.
pub fn supporting_cone(p: &HRep, v: &Vertex) -> Result<RayCone> {
    let d = p.dim;
    if v.point.len() != d || !p.contains_rat(&v.point) {
        return Err(Error::NotAVertex);
    }
    let tight = tight_rows(p, &v.point);
    let normals: Vec<IntVec> = tight.iter().map(|&i| primitive(p.normal(i))).collect();
    if rank_int(&normals) < d {
        return Err(Error::NotAVertex);
    }
    let unique: Vec<IntVec> = normals.into_iter().collect::<BTreeSet<_>>().into_iter().collect();
    let gens = extreme_rays(&unique, d);
    debug_assert!(gens.lineality.is_empty());
    let mut rays = gens.rays;
    rays.sort();
    let generators = IntMat::from_columns(&rays)?;
    let facets = dual_description(&generators)?;
    Ok(RayCone {
        apex: v.point.clone(),
        generators,
        facets: Some(facets),
    })
}

/// Primitive outer facet normals (as columns) of the pointed
/// full-dimensional cone generated by the columns of `rays`.
pub fn dual_description(rays: &IntMat) -> Result<IntMat> {
    let d = rays.rows();
    let cols = rays.columns();
    let gens = extreme_rays(&cols, d);
    if !gens.lineality.is_empty() {
        return Err(Error::NotFullDimensional);
    }
    if rank_int(&gens.rays) < d {
        return Err(Error::NotPointed);
    }
    let mut normals = gens.rays;
    normals.sort();
    IntMat::from_columns(&normals)
}
