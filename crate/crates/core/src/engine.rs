//! End-to-end pipelines from an H-description to a generating function and
//! a count.

use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::arith::{common_denominator, primitive, Int, IntMat, IntVec, Rat};
use crate::cone::{enumerate_parallelepiped_at, triangulate, SimplicialCone};
use crate::decompose::{
    decompose_to_index, decompose_verified, DecompStats, EngineOptions, Mode, StopMetric,
    Substitution,
};
use crate::error::{Error, Result};
use crate::genfun::{count_exponential, count_polynomial, pick_lambda, term_from_cone, GenFun, GenFunTerm};
use crate::irrational::{
    entry_bound, index_bound_for_triangulation, make_shift, stability_cube_lp,
    stability_cube_simplicial,
};
use crate::polytope::{enumerate_vertices, integer_bounding_box, supporting_cone, HRep, RayCone};

/// Points scanned by [`brute_force_count`] before it gives up.
pub const BRUTE_FORCE_LIMIT: u64 = 100_000_000;

/// Generating function of `P ∩ Z^d`, one term group per vertex.
///
/// In [`Mode::Homogenized`] the result lives in `d + 1` variables and
/// describes the cone over `P × {1}` instead.
pub fn genfun_polytope(p: &HRep, opts: &EngineOptions) -> Result<(GenFun, DecompStats)> {
    let dim = if opts.mode == Mode::Homogenized { p.dim() + 1 } else { p.dim() };
    let mut g = GenFun::new(dim);
    let stats = for_each_group(p, opts, |leaves| emit(&leaves), |terms| g.groups.push(terms))?;
    Ok((g, stats))
}

/// The leaf cones behind [`genfun_polytope`], grouped the same way.
pub fn leaf_cones(p: &HRep, opts: &EngineOptions) -> Result<(Vec<Vec<SimplicialCone>>, DecompStats)> {
    let mut groups = Vec::new();
    let stats = for_each_group(p, opts, |leaves| leaves, |leaves| groups.push(leaves))?;
    Ok((groups, stats))
}

/// Runs the decomposition only, keeping nothing but the statistics.
pub fn decomposition_stats(p: &HRep, opts: &EngineOptions) -> Result<DecompStats> {
    for_each_group(p, opts, drop, |()| {})
}

/// Runs the pipeline of `opts.mode`, mapping each group of leaves through
/// `map` (possibly in parallel) and handing the results to `sink` in order.
fn for_each_group<T, M, S>(p: &HRep, opts: &EngineOptions, map: M, mut sink: S) -> Result<DecompStats>
where
    T: Send,
    M: Fn(Vec<SimplicialCone>) -> T + Sync,
    S: FnMut(T),
{
    if opts.max_index < Int::one() {
        return Err(Error::InvalidInput("max index must be at least 1".into()));
    }
    let vertices = enumerate_vertices(p)?;
    let mut stats = DecompStats { vertices: vertices.len() as u64, ..DecompStats::default() };
    if opts.mode == Mode::Homogenized {
        for (leaves, s) in homogenized(p, &opts.max_index)? {
            stats.merge(&s);
            sink(map(leaves));
        }
        return Ok(stats);
    }
    let per_vertex = |v| -> Result<(T, DecompStats)> {
        let cone = supporting_cone(p, v)?;
        let (leaves, s) = match opts.mode {
            Mode::DualStopped => dual_stopped(&cone, &opts.max_index),
            Mode::PrimalIrrational => primal_irrational(&cone, &opts.max_index),
            Mode::AllPrimal => all_primal(&cone, &opts.max_index),
            Mode::Homogenized => unreachable!(),
        }?;
        Ok((map(leaves), s))
    };
    let results: Vec<(T, DecompStats)> = if opts.deterministic {
        vertices.iter().map(per_vertex).collect::<Result<_>>()?
    } else {
        vertices.par_iter().map(per_vertex).collect::<Result<_>>()?
    };
    for (group, s) in results {
        stats.merge(&s);
        sink(group);
    }
    Ok(stats)
}

/// `|P ∩ Z^d|` through the generating function and the chosen substitution.
pub fn count_polytope(p: &HRep, opts: &EngineOptions) -> Result<Int> {
    if opts.mode == Mode::Homogenized {
        return Err(Error::Unsupported(
            "the homogenized generating function does not specialize to a count".into(),
        ));
    }
    let (g, _) = genfun_polytope(p, opts)?;
    count_genfun(&g, opts)
}

pub fn count_genfun(g: &GenFun, opts: &EngineOptions) -> Result<Int> {
    let ctx = pick_lambda(g, opts.rng_seed)?;
    match opts.substitution {
        Substitution::Exponential => count_exponential(g, &ctx),
        Substitution::Polynomial => count_polynomial(g, &ctx),
    }
}

/// Generating function of the cone `{(ξx, ξ) : x ∈ P, ξ >= 0}`.
pub fn genfun_homogenization(p: &HRep, max_index: &Int) -> Result<GenFun> {
    let opts = EngineOptions { max_index: max_index.clone(), mode: Mode::Homogenized, ..EngineOptions::default() };
    genfun_polytope(p, &opts).map(|(g, _)| g)
}

fn emit(leaves: &[SimplicialCone]) -> Vec<GenFunTerm> {
    // leaves of one decomposition share their apex
    let mut apex: Option<(&[Rat], IntVec, Int)> = None;
    leaves
        .iter()
        .map(|k| {
            if apex.as_ref().is_none_or(|(a, _, _)| *a != k.apex.as_slice()) {
                let (p, q) = common_denominator(&k.apex);
                apex = Some((&k.apex, p, q));
            }
            let (_, p, q) = apex.as_ref().expect("set above");
            term_from_cone(k, enumerate_parallelepiped_at(k, p, q))
        })
        .collect()
}

/// Cone generated by the outer facet normals, with the vertex as apex.
fn dual_cone(cone: &RayCone) -> Result<RayCone> {
    let facets = match &cone.facets {
        Some(f) => f.clone(),
        None => crate::polytope::dual_description(&cone.generators)?,
    };
    Ok(RayCone { apex: cone.apex.clone(), generators: facets, facets: None })
}

type Leaves = (Vec<SimplicialCone>, DecompStats);

fn dual_stopped(cone: &RayCone, max_index: &Int) -> Result<Leaves> {
    let simplices = triangulate(&dual_cone(cone)?)?;
    let mut stats = DecompStats { triangulation_simplices: simplices.len() as u64, ..DecompStats::default() };
    let mut primal = Vec::new();
    for s in &simplices {
        let (leaves, st) = decompose_to_index(s, max_index, StopMetric::PolarIndex)?;
        stats.merge(&st);
        primal.extend(leaves.iter().map(SimplicialCone::polarize));
    }
    Ok((primal, stats))
}

/// Simplicial cones at the vertex: the cone itself if simplicial, else the
/// polars of a triangulation of its dual.
fn primal_simplicial_cones(cone: &RayCone) -> Result<(Vec<SimplicialCone>, u64)> {
    if cone.is_simplicial() {
        let k = SimplicialCone::new(cone.apex.clone(), cone.generators.clone(), 1)?;
        return Ok((vec![k], 0));
    }
    let simplices = triangulate(&dual_cone(cone)?)?;
    let n = simplices.len() as u64;
    Ok((simplices.iter().map(SimplicialCone::polarize).collect(), n))
}

/// Moves the apex inside the closed-form stability cube and decomposes.
fn irrationalize_and_decompose(k: &SimplicialCone, max_index: &Int) -> Result<Leaves> {
    let cube = stability_cube_simplicial(&k.apex, k.basis())?;
    let shift = make_shift(&cube, &k.index(), &entry_bound(k.basis()), k.dim());
    decompose_verified(&k.with_apex(shift.v_tilde), max_index, StopMetric::OwnIndex)
}

fn primal_irrational(cone: &RayCone, max_index: &Int) -> Result<Leaves> {
    let (cones, n) = primal_simplicial_cones(cone)?;
    let mut stats = DecompStats { triangulation_simplices: n, ..DecompStats::default() };
    let mut all = Vec::new();
    for k in &cones {
        let (leaves, st) = irrationalize_and_decompose(k, max_index)?;
        stats.merge(&st);
        all.extend(leaves);
    }
    Ok((all, stats))
}

fn all_primal(cone: &RayCone, max_index: &Int) -> Result<Leaves> {
    let facets = match &cone.facets {
        Some(f) => f.clone(),
        None => crate::polytope::dual_description(&cone.generators)?,
    };
    let cube = stability_cube_lp(&cone.apex, &facets)?;
    let d_bound = index_bound_for_triangulation(&cone.generators);
    let shift = make_shift(&cube, &d_bound, &entry_bound(&cone.generators), cone.dim());
    let shifted = RayCone { apex: shift.v_tilde, generators: cone.generators.clone(), facets: Some(facets) };
    let simplices = triangulate(&shifted)?;
    let mut stats = DecompStats { triangulation_simplices: simplices.len() as u64, ..DecompStats::default() };
    let mut all = Vec::new();
    for s in &simplices {
        let (leaves, st) = decompose_verified(s, max_index, StopMetric::OwnIndex)?;
        stats.merge(&st);
        all.extend(leaves);
    }
    Ok((all, stats))
}

/// One group of leaves per simplex in a triangulation of the polar cone.
fn homogenized(p: &HRep, max_index: &Int) -> Result<Vec<Leaves>> {
    let d = p.dim();
    let mut rays: Vec<IntVec> = p
        .rows()
        .map(|(a, b)| {
            let mut r = a.to_vec();
            r.push(-b);
            primitive(&r)
        })
        .collect();
    rays.sort();
    rays.dedup();
    let polar = RayCone {
        apex: vec![Rat::zero(); d + 1],
        generators: IntMat::from_columns(&rays)?,
        facets: None,
    };
    let simplices = triangulate(&polar)?;
    let mut groups = Vec::with_capacity(simplices.len());
    for (i, s) in simplices.iter().enumerate() {
        let (leaves, mut st) = irrationalize_and_decompose(&s.polarize(), max_index)?;
        if i == 0 {
            st.triangulation_simplices = simplices.len() as u64;
        }
        groups.push((leaves, st));
    }
    Ok(groups)
}

/// Counts by scanning the integer bounding box.
pub fn brute_force_count(p: &HRep) -> Result<Int> {
    let bounds = match integer_bounding_box(p) {
        Ok(b) => b,
        Err(Error::EmptyPolytope) => return Ok(Int::zero()),
        Err(e) => return Err(e),
    };
    if bounds.iter().any(|(lo, hi)| lo > hi) {
        return Ok(Int::zero());
    }
    let volume: Int = bounds.iter().map(|(lo, hi)| hi - lo + 1).product();
    if volume > Int::from(BRUTE_FORCE_LIMIT) {
        return Err(Error::BoxTooLarge(volume.to_string()));
    }
    let small = |x: &Int| x.abs() < Int::from(1i64 << 20);
    let fits = bounds.iter().all(|(lo, hi)| small(lo) && small(hi))
        && p.rows().all(|(a, b)| a.iter().all(small) && b.abs() < Int::from(1i64 << 40));
    if !fits {
        return Ok(bounds_scan_big(p, &bounds));
    }
    let d = p.dim();
    let lo: Vec<i64> = bounds.iter().map(|(l, _)| l.to_i64().unwrap()).collect();
    let hi: Vec<i64> = bounds.iter().map(|(_, h)| h.to_i64().unwrap()).collect();
    let rows: Vec<(Vec<i64>, i64)> = p
        .rows()
        .map(|(a, b)| (a.iter().map(|x| x.to_i64().unwrap()).collect(), b.to_i64().unwrap()))
        .collect();
    let mut x = lo.clone();
    let mut s: Vec<i64> = rows.iter().map(|(a, _)| a.iter().zip(&x).map(|(u, v)| u * v).sum()).collect();
    let mut count: u64 = 0;
    loop {
        if rows.iter().zip(&s).all(|((_, b), si)| si <= b) {
            count += 1;
        }
        let mut k = 0;
        loop {
            if k == d {
                return Ok(Int::from(count));
            }
            if x[k] < hi[k] {
                x[k] += 1;
                for ((a, _), si) in rows.iter().zip(s.iter_mut()) {
                    *si += a[k];
                }
                break;
            }
            let span = hi[k] - lo[k];
            x[k] = lo[k];
            for ((a, _), si) in rows.iter().zip(s.iter_mut()) {
                *si -= a[k] * span;
            }
            k += 1;
        }
    }
}

fn bounds_scan_big(p: &HRep, bounds: &[(Int, Int)]) -> Int {
    let d = p.dim();
    let mut x: Vec<Int> = bounds.iter().map(|(l, _)| l.clone()).collect();
    let mut count = Int::zero();
    loop {
        if p.contains(&x) {
            count += 1;
        }
        let mut k = 0;
        loop {
            if k == d {
                return count;
            }
            if x[k] < bounds[k].1 {
                x[k] += 1;
                break;
            }
            x[k] = bounds[k].0.clone();
            k += 1;
        }
    }
}
