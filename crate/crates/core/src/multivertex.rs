//! Formulas for several vertices: the triangle-type inequality, the cyclic
//! lower bound on the smallest total distance, its equality on a common
//! apartment (with a Hall-matching certificate), and the three-vertex
//! tree bound.

use std::collections::{BTreeMap, HashMap};

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::assignment::{brute_force_assignment, max_weight_assignment};
use crate::building::{bfs_distance, BfsMode, BuildingGraph, ExponentBox};
use crate::error::{Error, Result};
use crate::invariants::{distance, distance_diag, m_table};
use crate::linalg::{canonical_vertex_key, MatrixRep, VertexKey};
use crate::padic::PrimeContext;

/// A nonempty ordered list of vertices over one context.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VertexTuple {
    members: Vec<MatrixRep>,
}

impl VertexTuple {
    pub fn new(members: Vec<MatrixRep>) -> Result<Self> {
        let first = members.first().ok_or(Error::EmptyTuple)?;
        if members.iter().any(|m| m.ctx() != first.ctx()) {
            return Err(Error::ContextMismatch);
        }
        Ok(VertexTuple { members })
    }

    /// Diagonal members `diag(p^{e})` for each exponent vector.
    pub fn diagonal(ctx: PrimeContext, exps: &[Vec<i64>]) -> Result<Self> {
        let members = exps
            .iter()
            .map(|e| MatrixRep::diagonal_powers(ctx, e))
            .collect::<Result<Vec<_>>>()?;
        VertexTuple::new(members)
    }

    pub fn members(&self) -> &[MatrixRep] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn ctx(&self) -> PrimeContext {
        self.members[0].ctx()
    }

    /// Exponent vectors of diagonal members.
    pub fn diagonal_exponents(&self) -> Result<Vec<Vec<i64>>> {
        self.members.iter().map(|m| m.diagonal_exponents()).collect()
    }
}

/// `m_{A:0,B:d} + m_{A:i,C:d−i} − m_{A:i,B:d−i} − m_{B:i,C:d−i}`, never negative.
pub fn triangle_defect(a: &MatrixRep, b: &MatrixRep, c: &MatrixRep, i: usize) -> Result<i64> {
    let d = a.dim();
    if i > d {
        return Err(Error::IndexOutOfRange { index: i, max: d });
    }
    let ac = m_table(a, c)?;
    let ab = m_table(a, b)?;
    let bc = m_table(b, c)?;
    Ok(ab.m[0] + ac.m[i] - ab.m[i] - bc.m[i])
}

/// `m_{A_s:d, A_t:0} − m_{A_s:d−i, A_t:i}`.
fn pair_weight(a: &MatrixRep, b: &MatrixRep, i: usize) -> Result<i64> {
    let d = a.dim();
    let t = m_table(a, b)?;
    Ok(t.m[d] - t.m[d - i])
}

fn weight_matrix(tuple: &VertexTuple, i: usize) -> Result<Vec<Vec<i64>>> {
    let d = tuple.ctx().d();
    if i > d {
        return Err(Error::IndexOutOfRange { index: i, max: d });
    }
    let ms = tuple.members();
    ms.par_iter()
        .map(|a| ms.iter().map(|b| pair_weight(a, b, i)).collect::<Result<Vec<_>>>())
        .collect()
}

fn check_permutation(pi: &[usize], n: usize) -> Result<()> {
    let mut seen = vec![false; n];
    if pi.len() != n {
        return Err(Error::InvalidPermutation(n));
    }
    for &x in pi {
        if x >= n || std::mem::replace(&mut seen[x], true) {
            return Err(Error::InvalidPermutation(n));
        }
    }
    Ok(())
}

/// `Σ_s (m_{A_s:d, A_{π(s)}:0} − m_{A_s:d−i, A_{π(s)}:i})`.
pub fn cycle_weight(tuple: &VertexTuple, pi: &[usize], i: usize) -> Result<i64> {
    check_permutation(pi, tuple.len())?;
    let d = tuple.ctx().d();
    if i > d {
        return Err(Error::IndexOutOfRange { index: i, max: d });
    }
    let ms = tuple.members();
    pi.iter().enumerate().map(|(s, &t)| pair_weight(&ms[s], &ms[t], i)).sum()
}

/// The lower bound and the permutation attaining it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SteinerBound {
    pub value: i64,
    pub permutation: Vec<usize>,
    pub per_term: Vec<i64>,
}

fn bound_from(weights: &[Vec<i64>], (value, permutation): (i64, Vec<usize>)) -> SteinerBound {
    let per_term = permutation.iter().enumerate().map(|(s, &t)| weights[s][t]).collect();
    SteinerBound { value, permutation, per_term }
}

/// `max_π cycle_weight(π, i)`, solved as a maximum-weight assignment.
///
/// For `i = 1` this bounds the smallest total distance of any vertex to the
/// members from below.
pub fn steiner_lower_bound(tuple: &VertexTuple, i: usize) -> Result<SteinerBound> {
    let w = weight_matrix(tuple, i)?;
    let best = max_weight_assignment(&w);
    Ok(bound_from(&w, best))
}

/// Same maximum by enumerating all `n!` permutations.
pub fn steiner_lower_bound_brute(tuple: &VertexTuple, i: usize) -> Result<SteinerBound> {
    let w = weight_matrix(tuple, i)?;
    let best = brute_force_assignment(&w);
    Ok(bound_from(&w, best))
}

/// `Σ_s δ(β, A_s)`.
pub fn total_distance(beta: &MatrixRep, tuple: &VertexTuple) -> Result<u64> {
    tuple.members().iter().map(|a| distance(beta, a)).sum()
}

fn total_diag(exps: &[Vec<i64>], beta: &[i64]) -> u64 {
    exps.iter().map(|e| distance_diag(e, beta).expect("same length")).sum()
}

/// Neighbors of `e` inside its apartment: `e + 1_I` for proper nonempty `I`.
fn apartment_moves(e: &[i64]) -> impl Iterator<Item = Vec<i64>> + '_ {
    let d = e.len();
    (1u32..(1 << d) - 1).map(move |mask| {
        e.iter().enumerate().map(|(j, &x)| x + i64::from(mask >> j & 1 == 1)).collect()
    })
}

/// One steepest-descent run inside the apartment.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DescentRun {
    pub start: Vec<i64>,
    pub end: Vec<i64>,
    pub value: u64,
}

/// Exhaustive minimum of total distance over an apartment box.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ApartmentMinimum {
    /// Lexicographically smallest minimizing exponent vector in the box.
    pub minimizer: Vec<i64>,
    pub value: u64,
    pub descents: Vec<DescentRun>,
}

impl ApartmentMinimum {
    /// Whether every descent stopped at the global minimum value.
    pub fn local_minima_are_global(&self) -> bool {
        self.descents.iter().all(|r| r.value == self.value)
    }
}

fn descend(exps: &[Vec<i64>], start: Vec<i64>) -> DescentRun {
    let mut cur = start.clone();
    let mut val = total_diag(exps, &cur);
    loop {
        let best = apartment_moves(&cur)
            .map(|e| (total_diag(exps, &e), e))
            .min_by(|x, y| x.0.cmp(&y.0));
        match best {
            Some((v, e)) if v < val => {
                val = v;
                cur = e;
            }
            _ => return DescentRun { start, end: cur, value: val },
        }
    }
}

/// Scans every apartment vertex in `bx` for the smallest total distance to
/// diagonal members, then runs `starts` steepest descents from random points
/// of the box.
///
/// Fails with `BoxTooSmall` if a member's class is not in the box or the
/// scanned minimizer has a strictly better neighbor outside it.
pub fn min_total_on_apartment<R: Rng + ?Sized>(
    tuple: &VertexTuple,
    bx: &ExponentBox,
    starts: usize,
    rng: &mut R,
) -> Result<ApartmentMinimum> {
    let exps = tuple.diagonal_exponents()?;
    let d = tuple.ctx().d();
    if bx.dim() != d {
        return Err(Error::LengthMismatch { expected: d, found: bx.dim() });
    }
    if let Some(e) = exps.iter().find(|e| !bx.contains_class(e)) {
        return Err(Error::BoxTooSmall(format!("member {e:?} outside the box")));
    }
    let points = bx.points();
    let totals: Vec<u64> = points.par_iter().map(|e| total_diag(&exps, e)).collect();
    let (best_idx, &value) = totals
        .iter()
        .enumerate()
        .min_by(|x, y| x.1.cmp(y.1).then(x.0.cmp(&y.0)))
        .expect("nonempty box");
    let minimizer = points[best_idx].clone();
    if let Some(e) = apartment_moves(&minimizer).find(|e| total_diag(&exps, e) < value) {
        return Err(Error::BoxTooSmall(format!("minimizer {minimizer:?} improves toward {e:?}")));
    }
    let descents = (0..starts)
        .map(|_| {
            let start: Vec<i64> = bx.bounds.iter().map(|&(lo, hi)| rng.gen_range(lo..=hi)).collect();
            descend(&exps, start)
        })
        .collect();
    Ok(ApartmentMinimum { minimizer, value, descents })
}

/// Shifts members so that `minimizer` becomes the origin and every member's
/// exponent vector is nonnegative with minimum zero.
pub fn normalize_at(exps: &[Vec<i64>], minimizer: &[i64]) -> Vec<Vec<i64>> {
    exps.iter()
        .map(|e| {
            let shifted: Vec<i64> = e.iter().zip(minimizer).map(|(x, b)| x - b).collect();
            let m = *shifted.iter().min().expect("d ≥ 2");
            shifted.into_iter().map(|x| x - m).collect()
        })
        .collect()
}

/// A perfect matching of the relation `r ▷ s ⇔ I_max^s ∩ I_min^r ≠ ∅`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HallCertificate {
    /// `matching[r] = s` with `r ▷ s`.
    pub matching: Vec<usize>,
    /// For each `r`, a coordinate in `I_max^{matching[r]} ∩ I_min^r`.
    pub relation_witnesses: Vec<usize>,
}

impl HallCertificate {
    /// The permutation `σ = matching⁻¹`, for which
    /// `cycle_weight(σ, 1)` equals the total distance from the minimizer.
    pub fn cycle_permutation(&self) -> Vec<usize> {
        let mut inv = vec![0; self.matching.len()];
        for (r, &s) in self.matching.iter().enumerate() {
            inv[s] = r;
        }
        inv
    }
}

fn try_augment(r: usize, adj: &[Vec<usize>], owner: &mut [Option<usize>], seen: &mut [bool]) -> bool {
    for &s in &adj[r] {
        if !seen[s] {
            seen[s] = true;
            if owner[s].is_none_or(|r2| try_augment(r2, adj, owner, seen)) {
                owner[s] = Some(r);
                return true;
            }
        }
    }
    false
}

/// Builds the Hall relation at a minimizer and finds a perfect matching.
///
/// The tuple must already be normalized: diagonal members with nonnegative
/// exponents of minimum zero, and `minimizer` in the class of the origin.
pub fn hall_certificate(tuple: &VertexTuple, minimizer: &[i64]) -> Result<HallCertificate> {
    let exps = tuple.diagonal_exponents()?;
    let d = tuple.ctx().d();
    if minimizer.len() != d {
        return Err(Error::LengthMismatch { expected: d, found: minimizer.len() });
    }
    if minimizer.iter().any(|&x| x != minimizer[0]) {
        return Err(Error::NotNormalized(format!("minimizer {minimizer:?} is not the origin class")));
    }
    if let Some(e) = exps.iter().find(|e| e.iter().min() != Some(&0)) {
        return Err(Error::NotNormalized(format!("member {e:?} does not have minimum 0")));
    }
    let n = exps.len();
    let i_max: Vec<Vec<usize>> = exps
        .iter()
        .map(|e| {
            let m = *e.iter().max().unwrap();
            (0..d).filter(|&j| e[j] == m).collect()
        })
        .collect();
    let i_min: Vec<Vec<usize>> =
        exps.iter().map(|e| (0..d).filter(|&j| e[j] == 0).collect()).collect();
    let witness = |r: usize, s: usize| i_max[s].iter().copied().find(|j| i_min[r].contains(j));
    let adj: Vec<Vec<usize>> =
        (0..n).map(|r| (0..n).filter(|&s| witness(r, s).is_some()).collect()).collect();

    let mut owner: Vec<Option<usize>> = vec![None; n];
    for r in 0..n {
        let mut seen = vec![false; n];
        if !try_augment(r, &adj, &mut owner, &mut seen) {
            return Err(Error::NoPerfectMatching);
        }
    }
    let mut matching = vec![0; n];
    for (s, r) in owner.iter().enumerate() {
        matching[r.expect("perfect")] = s;
    }
    let relation_witnesses =
        (0..n).map(|r| witness(r, matching[r]).expect("matched pairs are related")).collect();
    Ok(HallCertificate { matching, relation_witnesses })
}

/// The two cyclic sums bounding a minimal tree through three vertices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct TreeBound {
    pub lambda1: i64,
    pub lambda2: i64,
    pub bound: i64,
}

/// `Λ_1` runs the cycle `A → B → C → A`, `Λ_2` the reverse; their sum is the
/// perimeter `δ(A,B) + δ(B,C) + δ(C,A)`.
pub fn tree_bound_3(a: &MatrixRep, b: &MatrixRep, c: &MatrixRep) -> Result<TreeBound> {
    let tuple = VertexTuple::new(vec![a.clone(), b.clone(), c.clone()])?;
    // term s of cycle_weight is |A_s| − m_{A_{π(s)}:1, A_s:d−1}
    let lambda1 = cycle_weight(&tuple, &[2, 0, 1], 1)?;
    let lambda2 = cycle_weight(&tuple, &[1, 2, 0], 1)?;
    Ok(TreeBound { lambda1, lambda2, bound: lambda1.max(lambda2) })
}

/// Smallest total distance over vertices of the building near `center`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BallMinimum {
    pub minimizer: VertexKey,
    pub value: u64,
}

/// Minimum of total distance over the ball of `radius` around `center`,
/// with every distance measured by breadth-first search.
///
/// Intended for small `p` and `d = 2`, where the ball is small enough to
/// enumerate; the true minimum lies in the ball whenever the ball contains
/// the convex hull of the members (always the case in a tree when all
/// members are within `radius` of `center`).
pub fn exhaustive_min_total(tuple: &VertexTuple, center: &VertexKey, radius: u64) -> Result<BallMinimum> {
    let ctx = tuple.ctx();
    let candidates = BuildingGraph::explore(ctx, center.clone(), radius);
    let mut maps: Vec<BTreeMap<VertexKey, u64>> = Vec::new();
    for m in tuple.members() {
        let k = canonical_vertex_key(m);
        let off = bfs_distance(center, &k, ctx, 2 * radius + 2, BfsMode::Plain)
            .ok_or_else(|| Error::BoxTooSmall(format!("member {k} far from the center")))?;
        maps.push(BuildingGraph::explore(ctx, k, radius + off).vertices);
    }
    let mut best: Option<(u64, &VertexKey)> = None;
    for v in candidates.vertices.keys() {
        let total: u64 = maps.iter().map(|mp| mp[v]).sum();
        if best.is_none_or(|(b, _)| total < b) {
            best = Some((total, v));
        }
    }
    let (value, minimizer) = best.expect("ball contains its center");
    Ok(BallMinimum { minimizer: minimizer.clone(), value })
}

/// Gap statistics between the ball minimum and the cyclic bound.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GapReport {
    pub samples: usize,
    pub max_gap: u64,
    pub mean_gap: f64,
    pub histogram: BTreeMap<u64, usize>,
}

impl GapReport {
    pub fn from_gaps(gaps: &[u64]) -> Self {
        let mut histogram = BTreeMap::new();
        for &g in gaps {
            *histogram.entry(g).or_insert(0) += 1;
        }
        GapReport {
            samples: gaps.len(),
            max_gap: gaps.iter().copied().max().unwrap_or(0),
            mean_gap: if gaps.is_empty() {
                0.0
            } else {
                gaps.iter().sum::<u64>() as f64 / gaps.len() as f64
            },
            histogram,
        }
    }
}

/// Pairwise BFS distances of keys, for callers that already hold keys.
pub fn key_distances(keys: &[VertexKey], ctx: PrimeContext, radius: u64) -> HashMap<(usize, usize), Option<u64>> {
    let mut out = HashMap::new();
    for i in 0..keys.len() {
        for j in 0..keys.len() {
            out.insert((i, j), bfs_distance(&keys[i], &keys[j], ctx, radius, BfsMode::Plain));
        }
    }
    out
}
