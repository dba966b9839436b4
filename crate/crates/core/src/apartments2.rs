//! Apartments of the tree of `SL_2(Q_p)`: how many edges two of them share,
//! and where an apartment meets the standard one.

use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;

use crate::building::{apartment_vertices, keys_adjacent, ApartmentSpec, ExponentBox};
use crate::error::{Error, Result};
use crate::linalg::{canonical_vertex_key, det_of_rows, MatrixRep, VertexKey};
use crate::padic::{valuation, Valuation};

/// An apartment of the tree, given by a basis with rows `(c, d)` and `(e, f)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Apartment2 {
    basis: MatrixRep,
}

impl Apartment2 {
    pub fn new(basis: MatrixRep) -> Result<Self> {
        if basis.dim() != 2 {
            return Err(Error::RequiresRankTwo);
        }
        Ok(Apartment2 { basis })
    }

    pub fn basis(&self) -> &MatrixRep {
        &self.basis
    }

    /// The apartment obtained by acting with `t` on the right.
    pub fn act(&self, t: &MatrixRep) -> Result<Self> {
        Apartment2::new(self.basis.mul(t)?)
    }

    fn entry_valuations(&self) -> [Valuation; 4] {
        let ctx = self.basis.ctx();
        let v = |i, j| valuation(self.basis.get(i, j), &ctx);
        [v(0, 0), v(0, 1), v(1, 0), v(1, 1)]
    }
}

/// Number of shared edges, or `Infinite` when the apartments share a ray.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SharedEdges {
    Finite(u64),
    Infinite,
}

impl fmt::Display for SharedEdges {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SharedEdges::Finite(n) => write!(f, "{n}"),
            SharedEdges::Infinite => write!(f, "INFINITE"),
        }
    }
}

fn cross_valuation(p: &Apartment2, i: usize, q: &Apartment2, k: usize) -> Valuation {
    let ctx = p.basis.ctx();
    valuation(&det_of_rows(&[p.basis.row(i), q.basis.row(k)]), &ctx)
}

/// `| |(c,d;r,s)| − |(c,d;t,u)| + |(e,f;t,u)| − |(e,f;r,s)| |` for
/// `P = ((c,d),(e,f))` and `Q = ((r,s),(t,u))`.
///
/// A vanishing determinant means a row of `P` is proportional to a row of
/// `Q`; the apartments then share an end and hence infinitely many edges.
pub fn shared_edges(p: &Apartment2, q: &Apartment2) -> Result<SharedEdges> {
    if p.basis.ctx() != q.basis.ctx() {
        return Err(Error::ContextMismatch);
    }
    let v = [
        cross_valuation(p, 0, q, 0),
        cross_valuation(p, 0, q, 1),
        cross_valuation(p, 1, q, 1),
        cross_valuation(p, 1, q, 0),
    ];
    if v.iter().any(|x| !x.is_finite()) {
        return Ok(SharedEdges::Infinite);
    }
    let [a, b, c, d] = v.map(Valuation::unwrap);
    Ok(SharedEdges::Finite((a - b + c - d).unsigned_abs()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum IntersectionKind {
    Empty,
    Path,
    HalfOrFull,
}

/// Where an apartment meets the standard apartment `{diag(p^i, 1)}`.
///
/// For `Path`, the common vertices are `diag(p^i, 1)` for `i` in `i_range`,
/// matching the apartment vertex `diag(p^j, 1)·P` with `j = i + j_offset`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct IntersectionRange {
    pub kind: IntersectionKind,
    pub i_range: Option<(i64, i64)>,
    pub j_offset: Option<i64>,
}

impl IntersectionRange {
    fn empty() -> Self {
        IntersectionRange { kind: IntersectionKind::Empty, i_range: None, j_offset: None }
    }

    /// Number of edges on the common path.
    pub fn edge_count(&self) -> Option<u64> {
        match self.kind {
            IntersectionKind::Empty => Some(0),
            IntersectionKind::Path => self.i_range.map(|(lo, hi)| (hi - lo) as u64),
            IntersectionKind::HalfOrFull => None,
        }
    }

    /// Keys of the common vertices, for `Path`.
    pub fn vertices(&self, ctx: crate::padic::PrimeContext) -> Result<Vec<VertexKey>> {
        match (self.kind, self.i_range) {
            (IntersectionKind::Path, Some((lo, hi))) => (lo..=hi)
                .map(|i| Ok(canonical_vertex_key(&MatrixRep::diagonal_powers(ctx, &[i, 0])?)))
                .collect(),
            _ => Ok(Vec::new()),
        }
    }
}

/// Solves `δ(diag(p^i,1), diag(p^j,1)·P) = 0` for the basis `P = ((c,d),(e,f))`.
///
/// Any zero entry makes a row of `P` proportional to a standard basis vector,
/// so the intersection is a half-line or the whole apartment.
pub fn intersection_range(p: &Apartment2) -> Result<IntersectionRange> {
    let vals = p.entry_valuations();
    if vals.iter().any(|v| !v.is_finite()) {
        return Ok(IntersectionRange { kind: IntersectionKind::HalfOrFull, i_range: None, j_offset: None });
    }
    let [c, d, e, f] = vals.map(Valuation::unwrap);
    let det = p.basis.det_valuation();
    let (cf, de) = (c + f, d + e);
    let range = |c: i64, d: i64, e: i64, f: i64| IntersectionRange {
        kind: IntersectionKind::Path,
        i_range: Some((c - d, e - f)),
        j_offset: Some(f - c),
    };
    Ok(if det > cf.min(de) {
        IntersectionRange::empty()
    } else if det == cf {
        range(c, d, e, f)
    } else {
        // rows swapped
        range(e, f, c, d)
    })
}

/// Edges of the tree inside the common vertex set of two apartments, both
/// cut off at exponent window `[-radius, radius]`.
pub fn windowed_shared_edges(p: &Apartment2, q: &Apartment2, radius: i64) -> Result<u64> {
    let ctx = p.basis.ctx();
    if ctx != q.basis.ctx() {
        return Err(Error::ContextMismatch);
    }
    let bx = ExponentBox { bounds: vec![(-radius, radius), (0, 0)] };
    let a = apartment_vertices(&ApartmentSpec { basis: p.basis.clone() }, &bx)?;
    let b = apartment_vertices(&ApartmentSpec { basis: q.basis.clone() }, &bx)?;
    let common: BTreeSet<&VertexKey> = a.intersection(&b).collect();
    let mut count = 0;
    for (n, x) in common.iter().enumerate() {
        for y in common.iter().skip(n + 1) {
            if keys_adjacent(x, y, ctx) {
                count += 1;
            }
        }
    }
    Ok(count)
}
