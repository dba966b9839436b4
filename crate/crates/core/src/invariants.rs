//! The mixed-minor invariants `m_{A:i, B:d−i}` and the two-vertex formulas
//! built from them.
//!
//! `m_{A:i,B:d−i}` is the least determinant valuation over all square
//! matrices made of `i` rows of `A` and `d − i` rows of `B`. Integer
//! combinations `Σ a_i · m_i` whose coefficients satisfy the invariance
//! conditions are functions of vertex pairs; graph distance is one of them.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{det_of_rows, localized_form, MatrixRep};
use crate::padic::{PrimeContext, Rational, Valuation};

/// `m[i] = m_{A:i, B:d−i}` for `i = 0..=d`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MTable {
    pub m: Vec<i64>,
}

impl MTable {
    pub fn d(&self) -> usize {
        self.m.len() - 1
    }

    /// `Σ a_i m_i`.
    pub fn evaluate(&self, coeffs: &FormulaCoefficients) -> Result<i64> {
        if coeffs.a.len() != self.m.len() {
            return Err(Error::LengthMismatch { expected: self.m.len(), found: coeffs.a.len() });
        }
        Ok(self.m.iter().zip(&coeffs.a).map(|(m, a)| m * a).sum())
    }

    /// The concavity inequality `(k−j) m_l + (j−l) m_k + (l−k) m_j ≥ 0`.
    pub fn concavity_defect(&self, j: usize, k: usize, l: usize) -> i64 {
        let (j_, k_, l_) = (j as i64, k as i64, l as i64);
        (k_ - j_) * self.m[l] + (j_ - l_) * self.m[k] + (l_ - k_) * self.m[j]
    }

    pub fn is_concave(&self) -> bool {
        let d = self.d();
        (0..=d).all(|j| (j..=d).all(|k| (k..=d).all(|l| self.concavity_defect(j, k, l) >= 0)))
    }
}

/// Coefficients `a_0..a_d` of a formula `Σ a_i m_{A:i,B:d−i}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FormulaCoefficients {
    pub a: Vec<i64>,
}

impl FormulaCoefficients {
    fn sparse(d: usize, terms: &[(usize, i64)]) -> Self {
        let mut a = vec![0; d + 1];
        for &(i, c) in terms {
            a[i] += c;
        }
        FormulaCoefficients { a }
    }

    /// `m_0 + m_d − m_1 − m_{d−1}`.
    pub fn distance(d: usize) -> Self {
        Self::sparse(d, &[(0, 1), (d, 1), (1, -1), (d - 1, -1)])
    }

    /// `m_0 + m_d − m_{⌊d/2⌋} − m_{⌈d/2⌉}`.
    pub fn b1(d: usize) -> Self {
        Self::sparse(d, &[(0, 1), (d, 1), (d / 2, -1), (d.div_ceil(2), -1)])
    }

    /// `m_d − d·m_1 + (d−1)·m_0`.
    pub fn directed_b1(d: usize) -> Self {
        Self::sparse(d, &[(d, 1), (1, -(d as i64)), (0, d as i64 - 1)])
    }
}

/// Which invariance conditions a coefficient vector satisfies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct InvarianceReport {
    /// Independent of the choice of representatives of both vertices.
    pub vertex_invariant: bool,
    /// Independent of the basis (right multiplication of both matrices).
    pub basis_invariant: bool,
}

pub fn check_invariance(coeffs: &FormulaCoefficients, ctx: &PrimeContext) -> Result<InvarianceReport> {
    let d = ctx.d();
    if coeffs.a.len() != d + 1 {
        return Err(Error::LengthMismatch { expected: d + 1, found: coeffs.a.len() });
    }
    let weighted = |w: &dyn Fn(i64) -> i64| -> i64 {
        coeffs.a.iter().enumerate().map(|(i, a)| w(i as i64) * a).sum()
    };
    let s_i = weighted(&|i| i);
    let s_di = weighted(&|i| d as i64 - i);
    let s = weighted(&|_| 1);
    Ok(InvarianceReport { vertex_invariant: s_i == 0 && s_di == 0, basis_invariant: s == 0 })
}

/// Calls `f` for every `k`-subset of `0..n` in lexicographic order.
pub(crate) fn for_each_subset(n: usize, k: usize, mut f: impl FnMut(&[usize])) {
    if k > n {
        return;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        f(&idx);
        let mut i = k;
        while i > 0 && idx[i - 1] == n - k + i - 1 {
            i -= 1;
        }
        if i == 0 {
            return;
        }
        idx[i - 1] += 1;
        for j in i..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Brute-force `m_{A:i, B:d−i}`: minimum of `ν(det X)` over every candidate
/// built from an `i`-subset of rows of `A` and a `(d−i)`-subset of rows of `B`.
pub fn m_mixed(a: &MatrixRep, b: &MatrixRep, i: usize) -> Result<i64> {
    a.check_ctx(b)?;
    let d = a.dim();
    if i > d {
        return Err(Error::IndexOutOfRange { index: i, max: d });
    }
    let p = a.ctx().p();
    let mut best = Valuation::Infinite;
    for_each_subset(d, i, |ra| {
        for_each_subset(d, d - i, |rb| {
            let rows: Vec<&[Rational]> =
                ra.iter().map(|&r| a.row(r)).chain(rb.iter().map(|&r| b.row(r))).collect();
            best = best.min(det_of_rows(&rows).valuation(p));
        });
    });
    // an invertible candidate always exists by basis exchange
    Ok(best.unwrap())
}

/// All of `m_{A:i,B:d−i}` via the localized form of `A·B⁻¹`.
pub fn m_table(a: &MatrixRep, b: &MatrixRep) -> Result<MTable> {
    a.check_ctx(b)?;
    let lf = localized_form(&a.mul(&b.inverse())?);
    let base = b.det_valuation();
    let mut m = Vec::with_capacity(a.dim() + 1);
    let mut acc = base;
    m.push(acc);
    for &x in &lf.alpha {
        acc += x;
        m.push(acc);
    }
    Ok(MTable { m })
}

/// The table by brute force, for cross-checking.
pub fn m_table_brute(a: &MatrixRep, b: &MatrixRep) -> Result<MTable> {
    let m = (0..=a.dim()).map(|i| m_mixed(a, b, i)).collect::<Result<_>>()?;
    Ok(MTable { m })
}

/// Graph distance in the 1-skeleton.
pub fn distance(a: &MatrixRep, b: &MatrixRep) -> Result<u64> {
    let t = m_table(a, b)?;
    Ok(t.evaluate(&FormulaCoefficients::distance(a.dim()))? as u64)
}

/// Distance of two vertices of one apartment given by diagonal exponents.
pub fn distance_diag(alpha: &[i64], beta: &[i64]) -> Result<u64> {
    if alpha.len() != beta.len() {
        return Err(Error::LengthMismatch { expected: alpha.len(), found: beta.len() });
    }
    if alpha.is_empty() {
        return Ok(0);
    }
    let up = alpha.iter().zip(beta).map(|(a, b)| a - b).max().unwrap();
    let down = alpha.iter().zip(beta).map(|(a, b)| b - a).max().unwrap();
    Ok((up + down) as u64)
}

/// `λ_i = m_i − m_{i−1} + m_0 − m_1` for `i = 1..=d`; `λ_1 = 0`, nondecreasing.
pub fn relative_coordinates(a: &MatrixRep, b: &MatrixRep) -> Result<Vec<i64>> {
    let t = m_table(a, b)?;
    let m = &t.m;
    Ok((1..m.len()).map(|i| m[i] - m[i - 1] + m[0] - m[1]).collect())
}

/// `ν(det A) mod d`.
pub fn vertex_label(a: &MatrixRep) -> usize {
    a.det_valuation().rem_euclid(a.dim() as i64) as usize
}

/// Distance in the subgraph of edges whose endpoint labels differ by `±1`.
pub fn distance_b1(a: &MatrixRep, b: &MatrixRep) -> Result<u64> {
    let t = m_table(a, b)?;
    Ok(t.evaluate(&FormulaCoefficients::b1(a.dim()))? as u64)
}

/// Directed distance from `B` to `A` along edges that raise the label by one.
pub fn directed_distance_b1(b: &MatrixRep, a: &MatrixRep) -> Result<u64> {
    let t = m_table(a, b)?;
    Ok(t.evaluate(&FormulaCoefficients::directed_b1(a.dim()))? as u64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::*;
    use proptest::prelude::*;

    #[test]
    fn subsets_enumerate_binomials() {
        for n in 0..6 {
            for k in 0..=n {
                let mut seen = Vec::new();
                for_each_subset(n, k, |s| seen.push(s.to_vec()));
                let binom = (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1));
                assert_eq!(seen.len(), binom, "C({n},{k})");
                assert!(seen.windows(2).all(|w| w[0] < w[1]));
            }
        }
    }

    #[test]
    fn m_mixed_examples() {
        let c = ctx(2, 3);
        let a = worked_example(c);
        let i = MatrixRep::identity(c);
        assert_eq!(m_mixed(&a, &i, 2).unwrap(), 4);
        for k in 0..=3 {
            assert_eq!(m_mixed(&a, &a, k).unwrap(), 9);
        }
        let c2 = ctx(2, 2);
        let a = MatrixRep::diagonal_powers(c2, &[2, 0]).unwrap();
        let b = MatrixRep::diagonal_powers(c2, &[0, 1]).unwrap();
        assert_eq!(m_mixed(&a, &b, 1).unwrap(), 0);
        assert_eq!(m_mixed(&a, &b, 3), Err(Error::IndexOutOfRange { index: 3, max: 2 }));
    }

    #[test]
    fn m_table_examples() {
        let c = ctx(2, 3);
        let a = worked_example(c);
        let i = MatrixRep::identity(c);
        assert_eq!(m_table(&a, &i).unwrap().m, vec![0, 1, 4, 9]);
        assert_eq!(m_table(&a, &a).unwrap().m, vec![9; 4]);
        assert_eq!(m_table_brute(&a, &i).unwrap().m, vec![0, 1, 4, 9]);
    }

    #[test]
    fn invariance_examples() {
        let c = ctx(3, 5);
        let r = check_invariance(&FormulaCoefficients::distance(5), &c).unwrap();
        assert_eq!(FormulaCoefficients::distance(5).a, vec![1, -1, 0, 0, -1, 1]);
        assert!(r.vertex_invariant && r.basis_invariant);
        let r = check_invariance(&FormulaCoefficients { a: vec![1, 0, 0, 0, 0, 0] }, &c).unwrap();
        assert!(!r.vertex_invariant && !r.basis_invariant);
        let dir = FormulaCoefficients::directed_b1(5);
        assert_eq!(dir.a, vec![4, -5, 0, 0, 0, 1]);
        let r = check_invariance(&dir, &c).unwrap();
        assert!(r.vertex_invariant && r.basis_invariant);
        for d in 2..7 {
            let c = ctx(2, d);
            for f in [FormulaCoefficients::distance(d), FormulaCoefficients::b1(d), FormulaCoefficients::directed_b1(d)] {
                let r = check_invariance(&f, &c).unwrap();
                assert!(r.vertex_invariant && r.basis_invariant, "d={d} {f:?}");
            }
        }
        assert!(check_invariance(&FormulaCoefficients { a: vec![1, -1] }, &c).is_err());
    }

    #[test]
    fn distance_examples() {
        let c = ctx(2, 3);
        let a = worked_example(c);
        assert_eq!(distance(&a, &MatrixRep::identity(c)).unwrap(), 4);
        assert_eq!(distance(&a, &a).unwrap(), 0);
        let c2 = ctx(2, 2);
        let x = MatrixRep::diagonal_powers(c2, &[2, 0]).unwrap();
        let y = MatrixRep::diagonal_powers(c2, &[0, 1]).unwrap();
        assert_eq!(distance(&x, &y).unwrap(), 3);
    }

    #[test]
    fn distance_diag_examples() {
        assert_eq!(distance_diag(&[1, 4, 2], &[1, 4, 2]).unwrap(), 0);
        assert_eq!(distance_diag(&[2, 0], &[0, 1]).unwrap(), 3);
        assert_eq!(distance_diag(&[0, 1, 2], &[0, 0, 0]).unwrap(), 2);
        let c = ctx(3, 3);
        let a = MatrixRep::diagonal_powers(c, &[0, 1, 2]).unwrap();
        assert_eq!(distance(&a, &MatrixRep::identity(c)).unwrap(), 2);
        assert!(distance_diag(&[0, 1], &[0]).is_err());
    }

    #[test]
    fn relative_coordinate_examples() {
        let c = ctx(2, 3);
        let a = worked_example(c);
        assert_eq!(relative_coordinates(&a, &MatrixRep::identity(c)).unwrap(), vec![0, 2, 4]);
        assert_eq!(relative_coordinates(&a, &a).unwrap(), vec![0, 0, 0]);
    }

    #[test]
    fn label_examples() {
        let c = ctx(2, 3);
        assert_eq!(vertex_label(&MatrixRep::identity(c)), 0);
        assert_eq!(vertex_label(&worked_example(c)), 0);
        let c2 = ctx(2, 2);
        assert_eq!(vertex_label(&MatrixRep::diagonal_powers(c2, &[1, 0]).unwrap()), 1);
        assert_eq!(vertex_label(&MatrixRep::diagonal_powers(c2, &[-1, 0]).unwrap()), 1);
    }

    #[test]
    fn restricted_distance_examples() {
        let c4 = ctx(2, 4);
        let a = MatrixRep::diagonal_powers(c4, &[0, 0, 2, 2]).unwrap();
        let i4 = MatrixRep::identity(c4);
        assert_eq!(distance_b1(&a, &i4).unwrap(), 4);
        assert_eq!(distance(&a, &i4).unwrap(), 2);
        assert_eq!(distance_b1(&a, &a).unwrap(), 0);

        let c3 = ctx(2, 3);
        let a = MatrixRep::diagonal_powers(c3, &[0, 1, 2]).unwrap();
        assert_eq!(directed_distance_b1(&MatrixRep::identity(c3), &a).unwrap(), 3);
        assert_eq!(directed_distance_b1(&a, &a).unwrap(), 0);
        let c2 = ctx(2, 2);
        let a = MatrixRep::diagonal_powers(c2, &[0, 1]).unwrap();
        assert_eq!(directed_distance_b1(&MatrixRep::identity(c2), &a).unwrap(), 1);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn fast_path_matches_brute_force((_c, a, b) in matrix_pair()) {
            let fast = m_table(&a, &b).unwrap();
            prop_assert_eq!(&fast, &m_table_brute(&a, &b).unwrap());
            prop_assert_eq!(fast.m[0], b.det_valuation());
            prop_assert_eq!(fast.m[a.dim()], a.det_valuation());
            prop_assert!(fast.is_concave());
        }

        #[test]
        fn symmetry_and_distance((_c, a, b) in matrix_pair()) {
            let d = a.dim();
            let ab = m_table(&a, &b).unwrap();
            let ba = m_table(&b, &a).unwrap();
            for i in 0..=d {
                prop_assert_eq!(ab.m[i], ba.m[d - i]);
            }
            let dist = distance(&a, &b).unwrap();
            prop_assert_eq!(dist, distance(&b, &a).unwrap());
            prop_assert_eq!(dist == 0, crate::linalg::vertex_equiv(&a, &b).unwrap());
            let lam = relative_coordinates(&a, &b).unwrap();
            prop_assert_eq!(lam[0], 0);
            prop_assert!(lam.windows(2).all(|w| w[0] <= w[1]));
            prop_assert_eq!(lam[d - 1] as u64, dist);
        }

        #[test]
        fn left_invariance_and_shifts((_c, a, b, x, r, t) in pair_with_transforms()) {
            let p = a.ctx().p();
            let nu_r = r.valuation(p).unwrap();
            let xa = x.mul(&a).unwrap();
            let ra = a.scale(&r).unwrap();
            let (at, bt) = (a.mul(&t).unwrap(), b.mul(&t).unwrap());
            let base = m_table(&a, &b).unwrap();
            let lx = m_table(&xa, &b).unwrap();
            let rs = m_table(&ra, &b).unwrap();
            let ts = m_table(&at, &bt).unwrap();
            for i in 0..=a.dim() {
                prop_assert_eq!(lx.m[i], base.m[i]);
                prop_assert_eq!(rs.m[i], base.m[i] + i as i64 * nu_r);
                prop_assert_eq!(ts.m[i], base.m[i] + t.det_valuation());
            }
        }

        #[test]
        fn distance_triangle((_c, a, b, cc) in matrix_triple()) {
            let ab = distance(&a, &b).unwrap();
            let bc = distance(&b, &cc).unwrap();
            let ac = distance(&a, &cc).unwrap();
            prop_assert!(ac <= ab + bc);
        }

        #[test]
        fn diagonal_distance_agrees(c in small_ctx(), seed in any::<u64>()) {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let d = c.d();
            let al: Vec<i64> = (0..d).map(|_| rng.gen_range(-3..=3)).collect();
            let be: Vec<i64> = (0..d).map(|_| rng.gen_range(-3..=3)).collect();
            let a = MatrixRep::diagonal_powers(c, &al).unwrap();
            let b = MatrixRep::diagonal_powers(c, &be).unwrap();
            prop_assert_eq!(distance_diag(&al, &be).unwrap(), distance(&a, &b).unwrap());
        }

        #[test]
        fn label_is_class_invariant((_c, a, u, s) in matrix_with_unimodular()) {
            let b = u.mul(&a).unwrap().scale(&s).unwrap();
            prop_assert_eq!(vertex_label(&a), vertex_label(&b));
        }
    }
}
