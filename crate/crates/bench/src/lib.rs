//! Deterministic inputs shared by the benchmarks.

use btdist::linalg::{canonical_vertex_key, MatrixRep, VertexKey};
use btdist::multivertex::VertexTuple;
use btdist::{sample, PrimeContext};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn ctx(p: u64, d: usize) -> PrimeContext {
    PrimeContext::new(p, d).expect("valid context")
}

/// Random matrix pairs with entry valuations in `[-3, 3]`.
pub fn matrix_pairs(c: PrimeContext, n: usize, seed: u64) -> Vec<(MatrixRep, MatrixRep)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| (sample::random_matrix(&mut rng, c, -3, 3), sample::random_matrix(&mut rng, c, -3, 3)))
        .collect()
}

/// The identity class and the end of a random walk of `len` steps from it.
pub fn key_pair(c: PrimeContext, len: usize, seed: u64) -> (VertexKey, VertexKey) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let start = canonical_vertex_key(&MatrixRep::identity(c));
    let end = sample::random_walk(&mut rng, &start, c, len);
    (start, end)
}

/// Random diagonal tuples of `n` members with exponents in `[0, 3]`.
pub fn diagonal_tuple(c: PrimeContext, n: usize, seed: u64) -> VertexTuple {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let exps: Vec<Vec<i64>> = (0..n).map(|_| sample::random_exponents(&mut rng, c.d(), 0, 3)).collect();
    VertexTuple::diagonal(c, &exps).expect("d exponents")
}
