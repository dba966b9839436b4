//! Shared fixtures and proptest strategies for unit tests.

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::linalg::{canonical_vertex_key, MatrixRep};
use crate::padic::{PrimeContext, Rational};
use crate::sample;

pub fn ctx(p: u64, d: usize) -> PrimeContext {
    PrimeContext::new(p, d).unwrap()
}

/// `[[p², p, p], [p⁴, 0, p³], [p⁵, 0, 0]]`.
pub fn worked_example(c: PrimeContext) -> MatrixRep {
    let q = |k| c.p_pow(k);
    MatrixRep::new(
        c,
        vec![
            vec![q(2), q(1), q(1)],
            vec![q(4), Rational::zero(), q(3)],
            vec![q(5), Rational::zero(), Rational::zero()],
        ],
    )
    .unwrap()
}

pub fn small_ctx() -> impl Strategy<Value = PrimeContext> {
    (prop::sample::select(vec![2u64, 3, 5]), 2usize..=4).prop_map(|(p, d)| ctx(p, d))
}

fn rng_for(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn entry_matrix(rng: &mut ChaCha8Rng, c: PrimeContext) -> MatrixRep {
    // mix of dense random entries and diagonal-ish shapes with zeros
    if rng.gen_bool(0.8) {
        sample::random_matrix(rng, c, -3, 3)
    } else {
        let e = sample::random_exponents(rng, c.d(), -3, 3);
        let u = sample::random_unimodular(rng, c);
        u.mul(&MatrixRep::diagonal_powers(c, &e).unwrap()).unwrap()
    }
}

pub fn any_matrix() -> impl Strategy<Value = (PrimeContext, MatrixRep)> {
    (small_ctx(), any::<u64>()).prop_map(|(c, seed)| {
        let mut rng = rng_for(seed);
        (c, entry_matrix(&mut rng, c))
    })
}

/// `(ctx, A, U, s)` with `U ∈ GL_d(Z_p)` and a nonzero scalar `s`.
pub fn matrix_with_unimodular() -> impl Strategy<Value = (PrimeContext, MatrixRep, MatrixRep, Rational)> {
    (small_ctx(), any::<u64>()).prop_map(|(c, seed)| {
        let mut rng = rng_for(seed);
        let a = entry_matrix(&mut rng, c);
        let u = sample::random_unimodular(&mut rng, c);
        let s = sample::random_scalar(&mut rng, c.p(), -3, 3);
        (c, a, u, s)
    })
}

/// Two matrices; a quarter of the time the second is an equivalent representative.
pub fn matrix_pair() -> impl Strategy<Value = (PrimeContext, MatrixRep, MatrixRep)> {
    (small_ctx(), any::<u64>()).prop_map(|(c, seed)| {
        let mut rng = rng_for(seed);
        let a = entry_matrix(&mut rng, c);
        let b = if rng.gen_bool(0.25) {
            sample::scrambled_representative(&mut rng, &canonical_vertex_key(&a), c)
        } else {
            entry_matrix(&mut rng, c)
        };
        (c, a, b)
    })
}

/// `(ctx, A, U, V)` with `U, V` unimodular over `Z`.
pub fn matrix_two_sided() -> impl Strategy<Value = (PrimeContext, MatrixRep, MatrixRep, MatrixRep)> {
    (small_ctx(), any::<u64>()).prop_map(|(c, seed)| {
        let mut rng = rng_for(seed);
        let a = entry_matrix(&mut rng, c);
        let u = sample::random_integer_unimodular(&mut rng, c);
        let v = sample::random_integer_unimodular(&mut rng, c);
        (c, a, u, v)
    })
}

pub fn matrix_triple() -> impl Strategy<Value = (PrimeContext, MatrixRep, MatrixRep, MatrixRep)> {
    (small_ctx(), any::<u64>()).prop_map(|(c, seed)| {
        let mut rng = rng_for(seed);
        let a = entry_matrix(&mut rng, c);
        let b = entry_matrix(&mut rng, c);
        let cc = entry_matrix(&mut rng, c);
        (c, a, b, cc)
    })
}

/// `(ctx, A, B, X, r, T)` with `X ∈ GL_d(Z_p)`, nonzero `r` and invertible `T`.
#[allow(clippy::type_complexity)]
pub fn pair_with_transforms(
) -> impl Strategy<Value = (PrimeContext, MatrixRep, MatrixRep, MatrixRep, Rational, MatrixRep)> {
    (small_ctx(), any::<u64>()).prop_map(|(c, seed)| {
        let mut rng = rng_for(seed);
        let a = entry_matrix(&mut rng, c);
        let b = entry_matrix(&mut rng, c);
        let x = sample::random_unimodular(&mut rng, c);
        let r = sample::random_scalar(&mut rng, c.p(), -3, 3);
        let t = sample::random_matrix(&mut rng, c, -2, 2);
        (c, a, b, x, r, t)
    })
}
