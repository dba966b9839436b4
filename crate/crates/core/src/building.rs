//! The 1-skeleton of the building, built directly from lattices.
//!
//! Vertices are canonical keys. The neighbors of `[L]` are the lattices
//! strictly between `pL` and `L`, one for each proper nonzero subspace of
//! `L/pL ≅ F_p^d`; subspaces are enumerated once each by their reduced
//! row-echelon forms. Everything here is independent of the `m`-invariant
//! formulas and serves as their ground truth.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::io::{self, Write};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::invariants::for_each_subset;
use crate::linalg::{canonical_vertex_key, localized_form, MatrixRep, VertexKey};
use crate::padic::{PrimeContext, Rational};

/// Edge filter used by [`bfs_distance`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BfsMode {
    /// Every edge of the 1-skeleton.
    Plain,
    /// Edges whose endpoint labels differ by `±1 (mod d)`.
    B1Undirected,
    /// Edges `u → v` with `label(v) − label(u) ≡ 1 (mod d)`.
    B1Directed,
}

impl std::str::FromStr for BfsMode {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "plain" => Ok(BfsMode::Plain),
            "b1" => Ok(BfsMode::B1Undirected),
            "b1dir" => Ok(BfsMode::B1Directed),
            _ => Err(format!("unknown mode {s:?} (expected plain, b1 or b1dir)")),
        }
    }
}

/// Reduced row-echelon bases (over `F_p`, lifted to `0..p`) of every
/// `k`-dimensional subspace of `F_p^d`, each paired with its pivot columns.
fn echelon_forms(p: u64, d: usize, k: usize) -> Vec<(Vec<usize>, Vec<Vec<u64>>)> {
    let mut out = Vec::new();
    for_each_subset(d, k, |pivots| {
        let free: Vec<(usize, usize)> = pivots
            .iter()
            .enumerate()
            .flat_map(|(r, &c)| ((c + 1)..d).filter(|j| !pivots.contains(j)).map(move |j| (r, j)))
            .collect();
        let total = (p as u128).pow(free.len() as u32);
        for mut code in 0..total {
            let mut rows = vec![vec![0u64; d]; k];
            for (r, &c) in pivots.iter().enumerate() {
                rows[r][c] = 1;
            }
            for &(r, j) in &free {
                rows[r][j] = (code % p as u128) as u64;
                code /= p as u128;
            }
            out.push((pivots.to_vec(), rows));
        }
    });
    out
}

/// Number of `k`-dimensional subspaces of `F_p^d` (Gaussian binomial).
pub fn subspace_count(p: u64, d: usize, k: usize) -> u128 {
    if k > d {
        return 0;
    }
    let p = p as u128;
    let mut num = 1u128;
    let mut den = 1u128;
    for i in 0..k {
        num *= p.pow((d - i) as u32) - 1;
        den *= p.pow((i + 1) as u32) - 1;
    }
    num / den
}

/// Expected neighbor count: proper nonzero subspaces of `F_p^d`.
pub fn expected_degree(p: u64, d: usize) -> u128 {
    (1..d).map(|k| subspace_count(p, d, k)).sum()
}

/// Neighbors whose subspace dimension in `L/pL` lies in `dims`.
pub fn neighbors_of_dims(v: &VertexKey, ctx: PrimeContext, dims: &[usize]) -> Vec<VertexKey> {
    let d = ctx.d();
    let p = ctx.p();
    let h = v.to_matrix(ctx);
    let mut out = Vec::new();
    for &k in dims {
        debug_assert!((1..d).contains(&k));
        for (pivots, basis) in echelon_forms(p, d, k) {
            let mut entries = Vec::with_capacity(d * d);
            for row in &basis {
                entries.extend(row.iter().map(|&x| Rational::from(x as i64)));
            }
            for j in (0..d).filter(|j| !pivots.contains(j)) {
                entries.extend((0..d).map(|c| Rational::from(if c == j { p as i64 } else { 0 })));
            }
            // rows of M span the preimage of the subspace in L
            let m = MatrixRep::from_flat_unchecked(ctx, entries);
            out.push(canonical_vertex_key(&m.mul(&h).expect("same ctx")));
        }
    }
    out
}

/// All neighbors of `v` in the building.
pub fn neighbors(v: &VertexKey, ctx: PrimeContext) -> Vec<VertexKey> {
    let dims: Vec<usize> = (1..ctx.d()).collect();
    neighbors_of_dims(v, ctx, &dims)
}

fn out_dims(mode: BfsMode, d: usize) -> Vec<usize> {
    match mode {
        BfsMode::Plain => (1..d).collect(),
        // a k-dimensional subspace moves the label by d − k
        BfsMode::B1Undirected => dedup_sorted(vec![1, d - 1]),
        BfsMode::B1Directed => vec![d - 1],
    }
}

fn in_dims(mode: BfsMode, d: usize) -> Vec<usize> {
    match mode {
        BfsMode::B1Directed => vec![1],
        m => out_dims(m, d),
    }
}

fn dedup_sorted(mut v: Vec<usize>) -> Vec<usize> {
    v.sort_unstable();
    v.dedup();
    v
}

/// Whether `A` and `B` are distinct adjacent vertices.
pub fn adjacent(a: &MatrixRep, b: &MatrixRep) -> Result<bool> {
    if a.ctx() != b.ctx() {
        return Err(Error::ContextMismatch);
    }
    let (ka, kb) = (canonical_vertex_key(a), canonical_vertex_key(b));
    Ok(keys_adjacent(&ka, &kb, a.ctx()))
}

pub fn keys_adjacent(a: &VertexKey, b: &VertexKey, ctx: PrimeContext) -> bool {
    a != b && neighbors(a, ctx).contains(b)
}

/// Exact graph distance from `u` to `v` if it is at most `max_radius`.
///
/// Runs a bidirectional search, expanding whichever frontier is smaller one
/// full level at a time; the directed mode walks out-edges from `u` and
/// in-edges into `v`.
pub fn bfs_distance(
    u: &VertexKey,
    v: &VertexKey,
    ctx: PrimeContext,
    max_radius: u64,
    mode: BfsMode,
) -> Option<u64> {
    if u == v {
        return Some(0);
    }
    let d = ctx.d();
    let (fwd_dims, bwd_dims) = (out_dims(mode, d), in_dims(mode, d));
    let mut seen_f: HashMap<VertexKey, u64> = HashMap::from([(u.clone(), 0)]);
    let mut seen_b: HashMap<VertexKey, u64> = HashMap::from([(v.clone(), 0)]);
    let mut front_f = vec![u.clone()];
    let mut front_b = vec![v.clone()];
    let (mut depth_f, mut depth_b) = (0u64, 0u64);

    while depth_f + depth_b < max_radius {
        let forward = front_f.len() <= front_b.len();
        let (front, seen, other, dims, depth) = if forward {
            (&mut front_f, &mut seen_f, &seen_b, &fwd_dims, &mut depth_f)
        } else {
            (&mut front_b, &mut seen_b, &seen_f, &bwd_dims, &mut depth_b)
        };
        let expanded: Vec<Vec<VertexKey>> =
            front.par_iter().map(|x| neighbors_of_dims(x, ctx, dims)).collect();
        *depth += 1;
        let mut next = Vec::new();
        let mut best: Option<u64> = None;
        for y in expanded.into_iter().flatten() {
            if seen.contains_key(&y) {
                continue;
            }
            if let Some(&b) = other.get(&y) {
                let total = *depth + b;
                best = Some(best.map_or(total, |c| c.min(total)));
            }
            seen.insert(y.clone(), *depth);
            next.push(y);
        }
        if best.is_some() {
            return best;
        }
        if next.is_empty() {
            return None;
        }
        *front = next;
    }
    None
}

/// A ball of the 1-skeleton around a base vertex.
#[derive(Debug, Clone)]
pub struct BuildingGraph {
    pub ctx: PrimeContext,
    pub base: VertexKey,
    pub radius: u64,
    /// Distance of every vertex from `base`.
    pub vertices: BTreeMap<VertexKey, u64>,
    /// Symmetric adjacency restricted to the ball.
    pub adjacency: BTreeMap<VertexKey, BTreeSet<VertexKey>>,
}

impl BuildingGraph {
    /// Breadth-first exploration up to `radius`; neighbor generation for one
    /// level runs in parallel and is merged in frontier order.
    pub fn explore(ctx: PrimeContext, base: VertexKey, radius: u64) -> Self {
        let mut vertices = BTreeMap::from([(base.clone(), 0)]);
        let mut adjacency: BTreeMap<VertexKey, BTreeSet<VertexKey>> = BTreeMap::new();
        adjacency.insert(base.clone(), BTreeSet::new());
        let mut frontier = vec![base.clone()];
        for depth in 1..=radius {
            let expanded: Vec<Vec<VertexKey>> =
                frontier.par_iter().map(|x| neighbors(x, ctx)).collect();
            let mut next = Vec::new();
            for (x, ns) in frontier.iter().zip(expanded) {
                for y in ns {
                    if !vertices.contains_key(&y) {
                        vertices.insert(y.clone(), depth);
                        next.push(y.clone());
                    }
                    adjacency.entry(x.clone()).or_default().insert(y.clone());
                    adjacency.entry(y).or_default().insert(x.clone());
                }
            }
            frontier = next;
        }
        BuildingGraph { ctx, base, radius, vertices, adjacency }
    }

    /// Vertices whose full neighborhood lies inside the ball.
    pub fn interior(&self) -> impl Iterator<Item = &VertexKey> {
        self.vertices.iter().filter(|(_, &r)| r < self.radius).map(|(k, _)| k)
    }

    pub fn degree(&self, v: &VertexKey) -> usize {
        self.adjacency.get(v).map_or(0, |s| s.len())
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.values().map(|s| s.len()).sum::<usize>() / 2
    }

    /// Writes a JSON header line followed by one `key1<TAB>key2` line per edge.
    pub fn dump<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(
            w,
            "{{\"p\":{},\"d\":{},\"radius\":{},\"base\":\"{}\"}}",
            self.ctx.p(),
            self.ctx.d(),
            self.radius,
            self.base
        )?;
        for (x, ys) in &self.adjacency {
            for y in ys.iter().filter(|y| *y > x) {
                writeln!(w, "{x}\t{y}")?;
            }
        }
        Ok(())
    }
}

/// An apartment given by a splitting basis (its rows).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ApartmentSpec {
    pub basis: MatrixRep,
}

/// Integer bounds `[lo_i, hi_i]` on each exponent coordinate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExponentBox {
    pub bounds: Vec<(i64, i64)>,
}

impl ExponentBox {
    pub fn cube(d: usize, lo: i64, hi: i64) -> Self {
        ExponentBox { bounds: vec![(lo, hi); d] }
    }

    pub fn dim(&self) -> usize {
        self.bounds.len()
    }

    pub fn contains(&self, e: &[i64]) -> bool {
        e.len() == self.dim() && e.iter().zip(&self.bounds).all(|(x, (lo, hi))| lo <= x && x <= hi)
    }

    /// Whether some homothety shift `e + t·(1,…,1)` lies in the box.
    pub fn contains_class(&self, e: &[i64]) -> bool {
        if e.len() != self.dim() {
            return false;
        }
        let lo = self.bounds.iter().zip(e).map(|((l, _), x)| l - x).max().unwrap_or(0);
        let hi = self.bounds.iter().zip(e).map(|((_, h), x)| h - x).min().unwrap_or(0);
        lo <= hi
    }

    /// Every lattice point, in lexicographic order.
    pub fn points(&self) -> Vec<Vec<i64>> {
        let mut out = vec![Vec::with_capacity(self.dim())];
        for &(lo, hi) in &self.bounds {
            out = out
                .into_iter()
                .flat_map(|prefix| {
                    (lo..=hi).map(move |x| {
                        let mut v = prefix.clone();
                        v.push(x);
                        v
                    })
                })
                .collect();
        }
        out
    }
}

/// Keys of `diag(p^e) · basis` for every `e` in the box, deduplicated.
pub fn apartment_vertices(spec: &ApartmentSpec, bx: &ExponentBox) -> Result<BTreeSet<VertexKey>> {
    let d = spec.basis.dim();
    if bx.dim() != d {
        return Err(Error::LengthMismatch { expected: d, found: bx.dim() });
    }
    Ok(bx
        .points()
        .into_iter()
        .map(|e| canonical_vertex_key(&spec.basis.scale_rows_by_powers(&e).expect("length checked")))
        .collect())
}

/// Vertex keys of a shortest path from the class of `B` to the class of `A`.
///
/// With `L = localized_form(A·B⁻¹) = diag(p^α)·A′`, the path runs through
/// `diag(p^e)·A′·B` where `e` starts at `(α_1,…,α_1)` and every coordinate
/// still below its target is raised by one per step.
pub fn geodesic_walk(a: &MatrixRep, b: &MatrixRep) -> Result<Vec<VertexKey>> {
    Ok(geodesic_exponents(a, b)?.1)
}

/// The exponent sequence and keys of [`geodesic_walk`].
pub fn geodesic_exponents(a: &MatrixRep, b: &MatrixRep) -> Result<(Vec<Vec<i64>>, Vec<VertexKey>)> {
    if a.ctx() != b.ctx() {
        return Err(Error::ContextMismatch);
    }
    let lf = localized_form(&a.mul(&b.inverse())?);
    let alpha = &lf.alpha;
    let neg: Vec<i64> = alpha.iter().map(|x| -x).collect();
    // A′ = diag(p^{-α})·L is in GL_d(Z_p)
    let frame = lf.localized.scale_rows_by_powers(&neg)?.mul(b)?;
    let mut e = vec![alpha[0]; alpha.len()];
    let mut exps = vec![e.clone()];
    while e != *alpha {
        for (x, &t) in e.iter_mut().zip(alpha) {
            if *x < t {
                *x += 1;
            }
        }
        exps.push(e.clone());
    }
    let keys = exps
        .iter()
        .map(|e| canonical_vertex_key(&frame.scale_rows_by_powers(e).expect("length d")))
        .collect();
    Ok((exps, keys))
}

/// Whether consecutive keys are adjacent and no key repeats.
pub fn is_path(keys: &[VertexKey], ctx: PrimeContext) -> bool {
    let distinct: HashSet<&VertexKey> = keys.iter().collect();
    distinct.len() == keys.len() && keys.windows(2).all(|w| keys_adjacent(&w[0], &w[1], ctx))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::invariants::distance;
    use crate::testutil::*;

    fn key(a: &MatrixRep) -> VertexKey {
        canonical_vertex_key(a)
    }

    #[test]
    fn degree_matches_closed_forms() {
        assert_eq!(expected_degree(2, 2), 3);
        assert_eq!(expected_degree(5, 2), 6);
        assert_eq!(expected_degree(2, 3), 14);
        assert_eq!(expected_degree(3, 3), 2 * 9 + 2 * 3 + 2);
        assert_eq!(expected_degree(2, 4), 15 + 35 + 15);
        for p in [2, 3, 5] {
            assert_eq!(expected_degree(p, 2), p as u128 + 1);
            assert_eq!(expected_degree(p, 3), (2 * p * p + 2 * p + 2) as u128);
        }
    }

    #[test]
    fn neighbor_examples() {
        let c = ctx(2, 2);
        let ns = neighbors(&key(&MatrixRep::identity(c)), c);
        assert_eq!(ns.len(), 3);
        let c3 = ctx(2, 3);
        let ns = neighbors(&key(&MatrixRep::identity(c3)), c3);
        assert_eq!(ns.len(), 14);
        assert_eq!(ns.iter().collect::<HashSet<_>>().len(), 14);
    }

    #[test]
    fn neighbors_are_symmetric() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for (p, d) in [(2, 2), (3, 2), (2, 3), (3, 3)] {
            let c = ctx(p, d);
            for _ in 0..5 {
                let v = crate::sample::random_vertex_near_identity(&mut rng, c, 3);
                for u in neighbors(&v, c) {
                    assert!(neighbors(&u, c).contains(&v));
                }
            }
        }
    }

    #[test]
    fn adjacency_examples() {
        let c = ctx(2, 3);
        let i = MatrixRep::identity(c);
        assert!(adjacent(&i, &MatrixRep::diagonal_powers(c, &[1, 0, 0]).unwrap()).unwrap());
        assert!(!adjacent(&i, &i).unwrap());
        let c2 = ctx(2, 2);
        assert!(!adjacent(&MatrixRep::identity(c2), &MatrixRep::diagonal_powers(c2, &[2, 0]).unwrap()).unwrap());
    }

    #[test]
    fn bfs_examples() {
        let c = ctx(2, 2);
        let i = key(&MatrixRep::identity(c));
        assert_eq!(bfs_distance(&i, &i, c, 0, BfsMode::Plain), Some(0));
        let far = key(&MatrixRep::diagonal_powers(c, &[3, 0]).unwrap());
        assert_eq!(bfs_distance(&i, &far, c, 6, BfsMode::Plain), Some(3));
        assert_eq!(bfs_distance(&i, &far, c, 2, BfsMode::Plain), None);
        let x = key(&MatrixRep::diagonal_powers(c, &[2, 0]).unwrap());
        let y = key(&MatrixRep::diagonal_powers(c, &[0, 1]).unwrap());
        assert_eq!(bfs_distance(&x, &y, c, 6, BfsMode::Plain), Some(3));

        let c4 = ctx(2, 4);
        let i4 = key(&MatrixRep::identity(c4));
        let a = key(&MatrixRep::diagonal_powers(c4, &[0, 0, 2, 2]).unwrap());
        assert_eq!(bfs_distance(&i4, &a, c4, 4, BfsMode::B1Undirected), Some(4));
        assert_eq!(bfs_distance(&i4, &a, c4, 4, BfsMode::Plain), Some(2));
    }

    #[test]
    fn ball_structure() {
        let c = ctx(3, 2);
        let g = BuildingGraph::explore(c, key(&MatrixRep::identity(c)), 3);
        // 1 + 4 + 12 + 36 vertices in the 4-regular tree
        assert_eq!(g.vertices.len(), 53);
        assert_eq!(g.edge_count(), 52);
        for v in g.interior() {
            assert_eq!(g.degree(v), 4);
        }
        for (x, ys) in &g.adjacency {
            assert!(!ys.contains(x));
            for y in ys {
                assert!(g.adjacency[y].contains(x));
            }
        }
        let mut buf = Vec::new();
        g.dump(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), "{\"p\":3,\"d\":2,\"radius\":3,\"base\":\"0,0;0\"}");
        assert_eq!(lines.count(), 52);
    }

    #[test]
    fn apartment_box_examples() {
        let c = ctx(2, 2);
        let spec = ApartmentSpec { basis: MatrixRep::identity(c) };
        assert_eq!(apartment_vertices(&spec, &ExponentBox::cube(2, 0, 1)).unwrap().len(), 3);
        let c3 = ctx(3, 3);
        let basis = worked_example(c3);
        let spec = ApartmentSpec { basis: basis.clone() };
        let only = apartment_vertices(&spec, &ExponentBox::cube(3, 0, 0)).unwrap();
        assert_eq!(only.into_iter().collect::<Vec<_>>(), vec![key(&basis)]);
    }

    #[test]
    fn apartment_distances_match_diagonal_formula() {
        let c = ctx(2, 3);
        let basis = MatrixRep::from_integers(c, &[vec![1, 1, 0], vec![0, 1, 3], vec![2, 0, 1]]).unwrap();
        let bx = ExponentBox::cube(3, 0, 2);
        let pts = bx.points();
        for e in pts.iter().step_by(5) {
            for f in pts.iter().step_by(7) {
                let a = basis.scale_rows_by_powers(e).unwrap();
                let b = basis.scale_rows_by_powers(f).unwrap();
                assert_eq!(crate::invariants::distance_diag(e, f).unwrap(), distance(&a, &b).unwrap());
            }
        }
    }

    #[test]
    fn walk_of_worked_example() {
        let c = ctx(2, 3);
        let a = worked_example(c);
        let i = MatrixRep::identity(c);
        let (exps, keys) = geodesic_exponents(&a, &i).unwrap();
        assert_eq!(
            exps,
            vec![vec![1, 1, 1], vec![1, 2, 2], vec![1, 3, 3], vec![1, 3, 4], vec![1, 3, 5]]
        );
        assert_eq!(keys.len(), 5);
        assert_eq!(keys[0], key(&i));
        assert_eq!(keys[4], key(&a));
        assert!(is_path(&keys, c));
        let single = geodesic_walk(&a, &a).unwrap();
        assert_eq!(single, vec![key(&a)]);
    }

    #[test]
    fn modes_parse() {
        assert_eq!("b1dir".parse::<BfsMode>().unwrap(), BfsMode::B1Directed);
        assert!("x".parse::<BfsMode>().is_err());
    }
}
