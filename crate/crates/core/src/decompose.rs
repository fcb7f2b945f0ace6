//! Signed decomposition of simplicial cones into cones of small index.

use std::cmp::Ordering;

use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::arith::{adjugate, common_denominator, dot, gcd_vec, lll_reduce, Int, IntMat, IntVec, Rat, RatVec};
use crate::cone::SimplicialCone;
use crate::error::{Error, Result};
use crate::irrational::depth_bound;

/// `w = B α` with `α` in `B^{-1} Z^d`, `w` primitive and some `α_i > 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShortVector {
    pub w: IntVec,
    pub alpha: RatVec,
}

impl ShortVector {
    /// Largest `|α_i|`.
    pub fn max_alpha(&self) -> Rat {
        self.alpha.iter().map(Rat::abs).max().unwrap_or_else(Rat::zero)
    }

    /// `max |α_i| <= D^{-1/d}` for the parent index `D`.
    pub fn within_minkowski(&self, index: &Int) -> bool {
        let d = self.alpha.len() as u32;
        let m = self.max_alpha();
        m.pow(d as i32) * Rat::from_integer(index.clone()) <= Rat::one()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum StopMetric {
    /// Stop once `|det B| <= ℓ`.
    OwnIndex,
    /// Stop once the primitive polar cone has index `<= ℓ`.
    PolarIndex,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Mode {
    DualStopped,
    PrimalIrrational,
    AllPrimal,
    Homogenized,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Substitution {
    Polynomial,
    Exponential,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EngineOptions {
    pub max_index: Int,
    pub mode: Mode,
    pub substitution: Substitution,
    pub deterministic: bool,
    pub rng_seed: u64,
}

impl Default for EngineOptions {
    fn default() -> Self {
        Self {
            max_index: Int::one(),
            mode: Mode::PrimalIrrational,
            substitution: Substitution::Exponential,
            deterministic: true,
            rng_seed: 0,
        }
    }
}

impl EngineOptions {
    pub fn new(mode: Mode, max_index: u64) -> Self {
        Self {
            mode,
            max_index: Int::from(max_index.max(1)),
            ..Self::default()
        }
    }

    pub fn with_substitution(mut self, substitution: Substitution) -> Self {
        self.substitution = substitution;
        self
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DecompStats {
    pub cones_emitted: u64,
    pub max_depth: u32,
    pub nodes_visited: u64,
    pub vertices: u64,
    pub triangulation_simplices: u64,
    /// Steps whose short vector missed `|α| <= D^{-1/d}`.
    pub minkowski_misses: u64,
    /// Leaves deeper than `k(D)` although every step on their path met the bound.
    pub depth_bound_violations: u64,
}

impl DecompStats {
    pub fn merge(&mut self, other: &DecompStats) {
        self.cones_emitted += other.cones_emitted;
        self.max_depth = self.max_depth.max(other.max_depth);
        self.nodes_visited += other.nodes_visited;
        self.vertices += other.vertices;
        self.triangulation_simplices += other.triangulation_simplices;
        self.minkowski_misses += other.minkowski_misses;
        self.depth_bound_violations += other.depth_bound_violations;
    }
}

/// Short vector of the lattice `B^{-1} Z^d` in the sup norm.
pub fn short_vector(b: &IntMat) -> Result<ShortVector> {
    let (dt, adj) = adjugate(b)?;
    short_vector_with(b, &dt, &adj)
}

fn short_vector_with(b: &IntMat, dt: &Int, adj: &IntMat) -> Result<ShortVector> {
    let big_d = dt.abs();
    if big_d < Int::from(2) {
        return Err(Error::InvalidInput(format!(
            "short vector needs index at least 2, got {big_d}"
        )));
    }
    // D B^{-1} Z^d is spanned by the columns of sgn(det) adj
    let sign = if dt.is_negative() { -Int::one() } else { Int::one() };
    let reduced = lll_reduce(&adj.map(|x| x * &sign))?;

    // keeps every product in the search below 2^60
    let limit = Int::one() << 20;
    let fits = |m: &IntMat| m.entries().iter().all(|x| x.abs() < limit);
    let (y, q, w) = if big_d < limit && fits(&reduced) && fits(b) {
        let to = |m: &IntMat| -> Vec<Vec<i64>> {
            m.row_vecs().iter().map(|r| r.iter().map(|x| x.to_i64().unwrap()).collect()).collect()
        };
        let (y, q, w) = search(&to(&reduced.transpose()), &to(b), big_d.to_i64().unwrap());
        let back = |v: Vec<i64>| -> IntVec { v.into_iter().map(Int::from).collect() };
        (back(y), Int::from(q), back(w))
    } else {
        search(&reduced.columns(), &b.row_vecs(), big_d.clone())
    };

    let alpha: RatVec = y.iter().map(|yi| Rat::new(yi.clone(), q.clone())).collect();
    let sv = ShortVector { w, alpha };
    if sv.max_alpha() >= Rat::one() {
        return Err(Error::DescentFailure(sv.max_alpha().to_string()));
    }
    Ok(sv)
}

/// Searches `{-1,0,1}` combinations of the reduced lattice basis `cols`
/// (a basis of `D B^{-1} Z^d`). Each candidate `y` is centered modulo `D`,
/// scaled so that `w = B y / D` is primitive and oriented so some
/// coordinate is positive. Returns `(y, q, w)` with `α = y / q`.
///
/// Above dimension 5 only combinations of at most three basis vectors are
/// tried; a single centered basis vector already gives `|α_i| <= 1/2`.
fn search<T>(cols: &[Vec<T>], b_rows: &[Vec<T>], big_d: T) -> (Vec<T>, T, Vec<T>)
where
    T: Integer + Signed + Clone + From<i8>,
{
    let d = cols.len();
    let mut s = Search {
        cols,
        b_rows,
        two: T::from(2),
        big_d,
        max_nonzero: if d <= 5 { d } else { 3 },
        best: None,
        scratch: vec![T::zero(); d],
        scratch_w: vec![T::zero(); b_rows.len()],
    };
    let mut acc = vec![T::zero(); d];
    s.walk(0, &mut acc, false, 0);
    let (y, q, w, _) = s.best.expect("a lattice of index >= 2 has a fractional point");
    (y, q, w)
}

/// `(y, q, w, max |y|)` with `α = y / q`.
type Candidate<T> = (Vec<T>, T, Vec<T>, T);

struct Search<'a, T> {
    cols: &'a [Vec<T>],
    b_rows: &'a [Vec<T>],
    big_d: T,
    two: T,
    max_nonzero: usize,
    best: Option<Candidate<T>>,
    scratch: Vec<T>,
    scratch_w: Vec<T>,
}

impl<T> Search<'_, T>
where
    T: Integer + Signed + Clone + From<i8>,
{
    /// Depth-first over coefficient vectors whose first nonzero entry is 1;
    /// the negated combination is evaluated alongside.
    fn walk(&mut self, level: usize, acc: &mut Vec<T>, started: bool, nonzero: usize) {
        if level == self.cols.len() {
            if started {
                self.consider(acc, false);
                self.consider(acc, true);
            }
            return;
        }
        self.walk(level + 1, acc, started, nonzero);
        if nonzero == self.max_nonzero {
            return;
        }
        let cols = self.cols;
        let col = &cols[level];
        for (a, c) in acc.iter_mut().zip(col) {
            *a = a.clone() + c.clone();
        }
        self.walk(level + 1, acc, true, nonzero + 1);
        if started {
            for (a, c) in acc.iter_mut().zip(col) {
                *a = a.clone() - c.clone() - c.clone();
            }
            self.walk(level + 1, acc, true, nonzero + 1);
            for (a, c) in acc.iter_mut().zip(col) {
                *a = a.clone() + c.clone();
            }
        } else {
            for (a, c) in acc.iter_mut().zip(col) {
                *a = a.clone() - c.clone();
            }
        }
    }

    /// Evaluates `raw` (or `-raw`), centering into the scratch buffer first
    /// so that most candidates are rejected without allocating.
    fn consider(&mut self, raw: &[T], negate: bool) {
        let big_d = &self.big_d;
        let mut m = T::zero();
        for (dst, x) in self.scratch.iter_mut().zip(raw) {
            let x = if negate { -x.clone() } else { x.clone() };
            let r = x.mod_floor(big_d);
            let r = if r.clone() * self.two.clone() > *big_d { r - big_d.clone() } else { r };
            let a = r.abs();
            if a > m {
                m = a;
            }
            *dst = r;
        }
        if m.is_zero() {
            return;
        }
        let y = &self.scratch;
        // w's content g divides every y_i, so |α| >= max|y| / (D gcd(y))
        if let Some(cur) = &self.best {
            let lhs = m.clone() * cur.1.clone();
            let rhs = cur.3.clone() * big_d.clone();
            if lhs > rhs {
                let mut content = T::zero();
                for v in y {
                    content = content.gcd(v);
                    if content.is_one() {
                        return;
                    }
                }
                if lhs > rhs * content {
                    return;
                }
            }
        }
        let y = &mut self.scratch;
        let w = &mut self.scratch_w;
        for (wi, row) in w.iter_mut().zip(self.b_rows) {
            let num = row.iter().zip(y.iter()).fold(T::zero(), |acc, (a, c)| acc + a.clone() * c.clone());
            *wi = num / big_d.clone();
        }
        let g = w.iter().fold(T::zero(), |acc, x| acc.gcd(x));
        if !g.is_one() {
            for wi in w.iter_mut() {
                *wi = wi.clone() / g.clone();
            }
        }
        let q = big_d.clone() * g;
        if !y.iter().any(Signed::is_positive) {
            for v in y.iter_mut().chain(w.iter_mut()) {
                *v = -v.clone();
            }
        }
        let replace = match &self.best {
            None => true,
            Some(cur) => better((y, &q, &m), (&cur.0, &cur.1, &cur.3)),
        };
        if replace {
            self.best = Some((y.clone(), q, w.clone(), m));
        }
    }
}

/// Orders candidates `α = y / q` given as `(y, q, max |y|)`: smaller sup
/// norm, then inside the cone, then lexicographically smaller.
fn better<T>(a: (&[T], &T, &T), b: (&[T], &T, &T)) -> bool
where
    T: Integer + Signed + Clone,
{
    match (a.2.clone() * b.1.clone()).cmp(&(b.2.clone() * a.1.clone())) {
        Ordering::Less => return true,
        Ordering::Greater => return false,
        Ordering::Equal => {}
    }
    let in_a = a.0.iter().all(|x| !x.is_negative());
    let in_b = b.0.iter().all(|x| !x.is_negative());
    if in_a != in_b {
        return in_a;
    }
    for (xa, xb) in a.0.iter().zip(b.0) {
        match (xa.clone() * b.1.clone()).cmp(&(xb.clone() * a.1.clone())) {
            Ordering::Less => return true,
            Ordering::Greater => return false,
            Ordering::Equal => {}
        }
    }
    false
}

/// Replaces each `b_i` with `α_i != 0` by `w`, with sign `sign(α_i)`.
pub fn decompose_step(k: &SimplicialCone, sv: &ShortVector) -> Vec<SimplicialCone> {
    let basis = k.basis();
    sv.alpha
        .iter()
        .enumerate()
        .filter(|(_, a)| !a.is_zero())
        .map(|(i, a)| {
            let mut child = basis.clone();
            child.set_col(i, &sv.w);
            let sign = if a.is_negative() { -k.sign } else { k.sign };
            SimplicialCone::from_parts_unchecked(k.apex.clone(), child, sign)
        })
        .collect()
}

/// Decomposes until every leaf has metric `<= max_index`.
pub fn decompose_to_index(
    k: &SimplicialCone,
    max_index: &Int,
    stop: StopMetric,
) -> Result<(Vec<SimplicialCone>, DecompStats)> {
    decompose(k, max_index, stop, false)
}

/// As [`decompose_to_index`], failing if any node has a lattice point on a
/// facet hyperplane.
pub fn decompose_verified(
    k: &SimplicialCone,
    max_index: &Int,
    stop: StopMetric,
) -> Result<(Vec<SimplicialCone>, DecompStats)> {
    decompose(k, max_index, stop, true)
}

fn decompose(
    root: &SimplicialCone,
    max_index: &Int,
    stop: StopMetric,
    verify: bool,
) -> Result<(Vec<SimplicialCone>, DecompStats)> {
    let mut stats = DecompStats::default();
    let mut leaves = Vec::new();
    let root_index = root.index();
    let k_root = depth_bound(&root_index, root.dim());
    // the apex is shared by every node; keep it as p / q
    let (apex_num, apex_den) = common_denominator(&root.apex);
    // (cone, depth, every step so far met the Minkowski bound)
    let mut stack = vec![(root.clone(), 0u32, true)];
    while let Some((node, depth, held)) = stack.pop() {
        stats.nodes_visited += 1;
        let (dt, adj) = adjugate(node.basis())?;
        if verify {
            for i in 0..adj.rows() {
                if dot(adj.row(i), &apex_num).is_multiple_of(&apex_den) {
                    return Err(Error::IrrationalityViolated(format!(
                        "facet {i} of a cone at depth {depth} with basis {:?}",
                        node.basis().columns()
                    )));
                }
            }
        }
        let index = dt.abs();
        let metric = match stop {
            StopMetric::OwnIndex => index.clone(),
            // the polar basis is adj with primitive rows, and det adj = D^{d-1}
            StopMetric::PolarIndex => {
                let contents: Int = (0..adj.rows()).map(|i| gcd_vec(adj.row(i))).product();
                num_traits::pow(index.clone(), node.dim() - 1) / contents
            }
        };
        if metric <= *max_index {
            stats.cones_emitted += 1;
            stats.max_depth = stats.max_depth.max(depth);
            if held && depth > k_root {
                stats.depth_bound_violations += 1;
                log::warn!("depth {depth} exceeds bound {k_root} for root index {root_index}");
            }
            leaves.push(node);
            continue;
        }
        let sv = short_vector_with(node.basis(), &dt, &adj)?;
        let met = sv.within_minkowski(&index);
        if !met {
            stats.minkowski_misses += 1;
        }
        // det of the child with b_i replaced by w is α_i det(B)
        let parent = Rat::from_integer(index.clone());
        for a in sv.alpha.iter().filter(|a| !a.is_zero()) {
            let ci = a.abs() * &parent;
            if !ci.is_integer() || ci >= parent {
                return Err(Error::DescentFailure(format!(
                    "child index {ci} not below parent index {index}"
                )));
            }
        }
        let children = decompose_step(&node, &sv);
        for child in children.into_iter().rev() {
            stack.push((child, depth + 1, held && met));
        }
    }
    Ok((leaves, stats))
}

/// Checks that `w` is primitive; used by tests and debug assertions.
pub fn is_valid_short_vector(b: &IntMat, sv: &ShortVector) -> bool {
    let bw: IntVec = (0..b.rows())
        .map(|r| b.row(r).iter().zip(&sv.alpha).fold(Rat::zero(), |acc, (x, a)| acc + a * x))
        .map(|x| if x.is_integer() { x.to_integer() } else { Int::from(i64::MAX) })
        .collect();
    bw == sv.w && gcd_vec(&sv.w).is_one() && sv.alpha.iter().any(Signed::is_positive)
}
