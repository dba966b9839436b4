//! Random generators for matrices, transforms and building walks.
//!
//! Used by the property tests, the acceptance suite and `verify`.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::building;
use crate::linalg::{canonical_vertex_key, MatrixRep, VertexKey};
use crate::padic::{PrimeContext, Rational};

fn unit_part<R: Rng + ?Sized>(rng: &mut R, p: u64) -> i64 {
    loop {
        let u = rng.gen_range(1..=9i64);
        if u % p as i64 != 0 {
            return u;
        }
    }
}

/// A nonzero scalar `± (a/b) · p^v` with `a, b` prime to `p` and `v ∈ [vmin, vmax]`.
pub fn random_scalar<R: Rng + ?Sized>(rng: &mut R, p: u64, vmin: i64, vmax: i64) -> Rational {
    let a = unit_part(rng, p);
    let b = if rng.gen_bool(0.3) { unit_part(rng, p) } else { 1 };
    let sign = if rng.gen_bool(0.5) { -1 } else { 1 };
    let v = rng.gen_range(vmin..=vmax);
    &Rational::new(sign * a, b).expect("nonzero") * &Rational::p_pow(p, v)
}

/// A p-adic unit `a/b`.
pub fn random_unit<R: Rng + ?Sized>(rng: &mut R, p: u64) -> Rational {
    random_scalar(rng, p, 0, 0)
}

/// An invertible matrix whose entries are nonzero with valuations in `[vmin, vmax]`.
pub fn random_matrix<R: Rng + ?Sized>(rng: &mut R, ctx: PrimeContext, vmin: i64, vmax: i64) -> MatrixRep {
    let d = ctx.d();
    loop {
        let rows = (0..d)
            .map(|_| (0..d).map(|_| random_scalar(rng, ctx.p(), vmin, vmax)).collect())
            .collect();
        if let Ok(m) = MatrixRep::new(ctx, rows) {
            return m;
        }
    }
}

/// An invertible integer matrix with entries in `[-bound, bound]`.
pub fn random_integer_matrix<R: Rng + ?Sized>(rng: &mut R, ctx: PrimeContext, bound: i64) -> MatrixRep {
    let d = ctx.d();
    loop {
        let rows: Vec<Vec<i64>> =
            (0..d).map(|_| (0..d).map(|_| rng.gen_range(-bound..=bound)).collect()).collect();
        if let Ok(m) = MatrixRep::from_integers(ctx, &rows) {
            return m;
        }
    }
}

/// A random element of `GL_d(Z_p)` built from elementary operations,
/// unit scalings and a row permutation.
pub fn random_unimodular<R: Rng + ?Sized>(rng: &mut R, ctx: PrimeContext) -> MatrixRep {
    let d = ctx.d();
    let p = ctx.p();
    let mut rows = MatrixRep::identity(ctx).rows();
    for _ in 0..3 * d {
        let i = rng.gen_range(0..d);
        let j = (i + rng.gen_range(1..d)) % d;
        // coefficient in Z_(p): integer, or unit over unit
        let c = if rng.gen_bool(0.5) {
            Rational::from(rng.gen_range(-3..=3i64))
        } else {
            &random_unit(rng, p) * &Rational::p_pow(p, rng.gen_range(0..=1))
        };
        let src = rows[j].clone();
        for (x, y) in rows[i].iter_mut().zip(&src) {
            *x = &*x + &(y * &c);
        }
    }
    for row in rows.iter_mut() {
        if rng.gen_bool(0.3) {
            let u = random_unit(rng, p);
            for x in row.iter_mut() {
                *x = &*x * &u;
            }
        }
    }
    rows.shuffle(rng);
    MatrixRep::new(ctx, rows).expect("product of invertible operations")
}

/// A unimodular matrix over `Z` (determinant `±1`).
pub fn random_integer_unimodular<R: Rng + ?Sized>(rng: &mut R, ctx: PrimeContext) -> MatrixRep {
    let d = ctx.d();
    let mut rows: Vec<Vec<i64>> =
        (0..d).map(|i| (0..d).map(|j| i64::from(i == j)).collect()).collect();
    for _ in 0..2 * d {
        let i = rng.gen_range(0..d);
        let j = (i + rng.gen_range(1..d)) % d;
        let c = rng.gen_range(-2..=2i64);
        let src = rows[j].clone();
        for (x, y) in rows[i].iter_mut().zip(&src) {
            *x += c * y;
        }
    }
    rows.shuffle(rng);
    MatrixRep::from_integers(ctx, &rows).expect("unimodular")
}

/// A neighbor of `v` chosen uniformly among all neighbors.
pub fn random_neighbor<R: Rng + ?Sized>(rng: &mut R, v: &VertexKey, ctx: PrimeContext) -> VertexKey {
    let ns = building::neighbors(v, ctx);
    ns[rng.gen_range(0..ns.len())].clone()
}

/// Endpoint of a random walk of `len` steps from `start`.
pub fn random_walk<R: Rng + ?Sized>(rng: &mut R, start: &VertexKey, ctx: PrimeContext, len: usize) -> VertexKey {
    let mut v = start.clone();
    for _ in 0..len {
        v = random_neighbor(rng, &v, ctx);
    }
    v
}

/// A representative of `v` disguised by a random `GL_d(Z_p)` factor and scalar.
pub fn scrambled_representative<R: Rng + ?Sized>(rng: &mut R, v: &VertexKey, ctx: PrimeContext) -> MatrixRep {
    let u = random_unimodular(rng, ctx);
    let s = &random_unit(rng, ctx.p()) * &Rational::p_pow(ctx.p(), rng.gen_range(-2..=2));
    u.mul(&v.to_matrix(ctx)).expect("same ctx").scale(&s).expect("nonzero")
}

/// A random vertex within `radius` steps of the identity class.
pub fn random_vertex_near_identity<R: Rng + ?Sized>(rng: &mut R, ctx: PrimeContext, radius: usize) -> VertexKey {
    let start = canonical_vertex_key(&MatrixRep::identity(ctx));
    let len = rng.gen_range(0..=radius);
    random_walk(rng, &start, ctx, len)
}

/// A diagonal exponent vector with entries in `[lo, hi]`.
pub fn random_exponents<R: Rng + ?Sized>(rng: &mut R, d: usize, lo: i64, hi: i64) -> Vec<i64> {
    (0..d).map(|_| rng.gen_range(lo..=hi)).collect()
}
