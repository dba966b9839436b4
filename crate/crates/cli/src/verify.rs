//! Randomized formula-versus-oracle self check.
//!
//! Every trial draws its own stream from the seed, so trials run in
//! parallel and the totals do not depend on scheduling.

use btdist::apartments2::{shared_edges, windowed_shared_edges, Apartment2, SharedEdges};
use btdist::building::{bfs_distance, BfsMode, ExponentBox};
use btdist::invariants::{directed_distance_b1, distance, distance_b1, m_table, m_table_brute};
use btdist::multivertex::{
    cycle_weight, hall_certificate, min_total_on_apartment, normalize_at, steiner_lower_bound,
    triangle_defect, VertexTuple,
};
use btdist::{sample, PrimeContext};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

#[derive(Debug, Serialize, PartialEq, Eq)]
pub struct VerifyReport {
    pub checked: usize,
    pub failures: usize,
}

/// Runs `trials` trials; a trial fails if any of its checks fails.
pub fn run(ctx: PrimeContext, radius: u64, trials: usize, seed: u64) -> VerifyReport {
    let failures = (0..trials)
        .into_par_iter()
        .filter(|&k| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(k as u64);
            !trial(&mut rng, ctx, radius)
        })
        .count();
    VerifyReport { checked: trials, failures }
}

fn within(found: Option<u64>, formula: u64, radius: u64) -> bool {
    match found {
        Some(x) => x == formula,
        None => formula > radius,
    }
}

fn trial(rng: &mut ChaCha8Rng, ctx: PrimeContext, radius: u64) -> bool {
    let half = (radius / 2) as usize;
    let a = sample::random_vertex_near_identity(rng, ctx, half);
    let len = rng.gen_range(0..=radius as usize);
    let b = sample::random_walk(rng, &a, ctx, len);
    let c = sample::random_vertex_near_identity(rng, ctx, half);
    let ra = sample::scrambled_representative(rng, &a, ctx);
    let rb = sample::scrambled_representative(rng, &b, ctx);
    let rc = sample::scrambled_representative(rng, &c, ctx);

    let mut ok = true;
    let table = m_table(&ra, &rb).expect("same ctx");
    ok &= ctx.d() > 5 || table == m_table_brute(&ra, &rb).expect("same ctx");
    ok &= table.is_concave();

    let dist = distance(&ra, &rb).expect("same ctx");
    ok &= within(bfs_distance(&a, &b, ctx, radius, BfsMode::Plain), dist, radius);
    let short = radius.min(4);
    let b1 = distance_b1(&ra, &rb).expect("same ctx");
    ok &= within(bfs_distance(&a, &b, ctx, short, BfsMode::B1Undirected), b1, short);
    let dir = directed_distance_b1(&ra, &rb).expect("same ctx");
    ok &= within(bfs_distance(&a, &b, ctx, short, BfsMode::B1Directed), dir, short);

    for i in 0..=ctx.d() {
        ok &= triangle_defect(&ra, &rb, &rc, i).expect("same ctx") >= 0;
    }
    let ac = distance(&ra, &rc).expect("same ctx");
    let bc = distance(&rb, &rc).expect("same ctx");
    ok &= ac <= dist + bc && bc <= dist + ac && dist <= ac + bc;

    ok &= apartment_equality(rng, ctx);
    if ctx.d() == 2 {
        ok &= shared_edges_match(rng, ctx);
    }
    ok
}

fn apartment_equality(rng: &mut ChaCha8Rng, ctx: PrimeContext) -> bool {
    let d = ctx.d();
    let n = rng.gen_range(1..=4);
    let exps: Vec<Vec<i64>> = (0..n).map(|_| sample::random_exponents(rng, d, 0, 3)).collect();
    let tuple = VertexTuple::diagonal(ctx, &exps).expect("d exponents");
    let Ok(bound) = steiner_lower_bound(&tuple, 1) else { return false };
    let Ok(min) = min_total_on_apartment(&tuple, &ExponentBox::cube(d, -1, 4), 3, rng) else {
        return false;
    };
    if min.value as i64 != bound.value || !min.local_minima_are_global() {
        return false;
    }
    let normalized = VertexTuple::diagonal(ctx, &normalize_at(&exps, &min.minimizer)).expect("d exponents");
    match hall_certificate(&normalized, &vec![0; d]) {
        Ok(cert) => cycle_weight(&normalized, &cert.cycle_permutation(), 1) == Ok(bound.value),
        Err(_) => false,
    }
}

fn shared_edges_match(rng: &mut ChaCha8Rng, ctx: PrimeContext) -> bool {
    let p = Apartment2::new(sample::random_matrix(rng, ctx, -3, 3)).expect("d = 2");
    let q = Apartment2::new(sample::random_matrix(rng, ctx, -3, 3)).expect("d = 2");
    let w = |r| windowed_shared_edges(&p, &q, r).expect("same ctx");
    match shared_edges(&p, &q) {
        Ok(SharedEdges::Finite(k)) => w(24) == k && w(36) == k,
        Ok(SharedEdges::Infinite) => w(24) > w(12),
        Err(_) => false,
    }
}
