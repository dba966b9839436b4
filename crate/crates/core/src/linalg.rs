//! Matrix representatives of vertices.
//!
//! A matrix `A ∈ GL_d(Q_p)` stands for the homothety class of the lattice
//! spanned (over `Z_p`) by its rows. Two matrices give the same vertex iff
//! `B = p^i · X · A` with `X ∈ GL_d(Z_p)`.

use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::padic::{reduce_mod_prime_power, PrimeContext, Rational, Valuation};

/// An invertible `d × d` matrix over `Q`, stored row-major.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MatrixRep {
    ctx: PrimeContext,
    entries: Vec<Rational>,
}

/// On-disk form of a matrix: `{"p": int, "d": int, "entries": [[rational-string, …], …]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatrixFile {
    pub p: u64,
    pub d: usize,
    pub entries: Vec<Vec<Rational>>,
}

impl MatrixRep {
    /// Builds a matrix from rows, rejecting bad shapes and singular input.
    pub fn new(ctx: PrimeContext, rows: Vec<Vec<Rational>>) -> Result<Self> {
        let d = ctx.d();
        if rows.len() != d {
            return Err(Error::ShapeMismatch { expected: d, found: rows.len() });
        }
        let mut entries = Vec::with_capacity(d * d);
        for row in rows {
            if row.len() != d {
                return Err(Error::ShapeMismatch { expected: d, found: row.len() });
            }
            entries.extend(row);
        }
        let m = MatrixRep { ctx, entries };
        if m.det().is_zero() {
            return Err(Error::Singular);
        }
        Ok(m)
    }

    pub fn from_integers(ctx: PrimeContext, rows: &[Vec<i64>]) -> Result<Self> {
        let rows = rows
            .iter()
            .map(|r| r.iter().map(|&x| Rational::from(x)).collect())
            .collect();
        MatrixRep::new(ctx, rows)
    }

    /// Internal constructor for matrices known to be invertible.
    pub(crate) fn from_flat_unchecked(ctx: PrimeContext, entries: Vec<Rational>) -> Self {
        debug_assert_eq!(entries.len(), ctx.d() * ctx.d());
        MatrixRep { ctx, entries }
    }

    pub fn identity(ctx: PrimeContext) -> Self {
        let d = ctx.d();
        let entries = (0..d * d)
            .map(|k| if k / d == k % d { Rational::one() } else { Rational::zero() })
            .collect();
        MatrixRep { ctx, entries }
    }

    /// `diag(p^{e_1}, …, p^{e_d})`.
    pub fn diagonal_powers(ctx: PrimeContext, exps: &[i64]) -> Result<Self> {
        let d = ctx.d();
        if exps.len() != d {
            return Err(Error::LengthMismatch { expected: d, found: exps.len() });
        }
        let mut entries = vec![Rational::zero(); d * d];
        for (i, &e) in exps.iter().enumerate() {
            entries[i * d + i] = ctx.p_pow(e);
        }
        Ok(MatrixRep { ctx, entries })
    }

    #[inline]
    pub fn ctx(&self) -> PrimeContext {
        self.ctx
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.ctx.d()
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> &Rational {
        &self.entries[i * self.dim() + j]
    }

    pub fn row(&self, i: usize) -> &[Rational] {
        let d = self.dim();
        &self.entries[i * d..(i + 1) * d]
    }

    pub fn rows(&self) -> Vec<Vec<Rational>> {
        (0..self.dim()).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn to_file(&self) -> MatrixFile {
        MatrixFile { p: self.ctx.p(), d: self.dim(), entries: self.rows() }
    }

    pub fn from_file(file: MatrixFile) -> Result<Self> {
        let ctx = PrimeContext::new(file.p, file.d)?;
        MatrixRep::new(ctx, file.entries)
    }

    pub(crate) fn check_ctx(&self, other: &MatrixRep) -> Result<()> {
        if self.ctx == other.ctx {
            Ok(())
        } else {
            Err(Error::ContextMismatch)
        }
    }

    pub fn mul(&self, other: &MatrixRep) -> Result<MatrixRep> {
        self.check_ctx(other)?;
        let d = self.dim();
        let mut entries = Vec::with_capacity(d * d);
        for i in 0..d {
            for j in 0..d {
                let mut acc = Rational::zero();
                for k in 0..d {
                    let (a, b) = (self.get(i, k), other.get(k, j));
                    if !a.is_zero() && !b.is_zero() {
                        acc = &acc + &(a * b);
                    }
                }
                entries.push(acc);
            }
        }
        Ok(MatrixRep { ctx: self.ctx, entries })
    }

    /// Multiplies every entry by a nonzero scalar.
    pub fn scale(&self, r: &Rational) -> Result<MatrixRep> {
        if r.is_zero() {
            return Err(Error::Singular);
        }
        Ok(MatrixRep { ctx: self.ctx, entries: self.entries.iter().map(|x| x * r).collect() })
    }

    /// Multiplies row `i` by `p^{k_i}`.
    pub fn scale_rows_by_powers(&self, exps: &[i64]) -> Result<MatrixRep> {
        let d = self.dim();
        if exps.len() != d {
            return Err(Error::LengthMismatch { expected: d, found: exps.len() });
        }
        let mut entries = self.entries.clone();
        for (i, &e) in exps.iter().enumerate() {
            if e != 0 {
                let f = self.ctx.p_pow(e);
                for x in &mut entries[i * d..(i + 1) * d] {
                    *x = &*x * &f;
                }
            }
        }
        Ok(MatrixRep { ctx: self.ctx, entries })
    }

    pub fn det(&self) -> Rational {
        det_of_rows(&(0..self.dim()).map(|i| self.row(i)).collect::<Vec<_>>())
    }

    pub fn inverse(&self) -> MatrixRep {
        let d = self.dim();
        let mut a: Vec<Vec<Rational>> = self.rows();
        let mut inv: Vec<Vec<Rational>> = MatrixRep::identity(self.ctx).rows();
        for col in 0..d {
            let piv = (col..d).find(|&r| !a[r][col].is_zero()).expect("invertible matrix");
            a.swap(col, piv);
            inv.swap(col, piv);
            let f = a[col][col].recip().expect("nonzero pivot");
            for x in a[col].iter_mut().chain(inv[col].iter_mut()) {
                *x = &*x * &f;
            }
            for r in 0..d {
                if r != col && !a[r][col].is_zero() {
                    let g = a[r][col].clone();
                    let (src_a, src_i) = (a[col].clone(), inv[col].clone());
                    sub_scaled(&mut a[r], &src_a, &g);
                    sub_scaled(&mut inv[r], &src_i, &g);
                }
            }
        }
        MatrixRep { ctx: self.ctx, entries: inv.into_iter().flatten().collect() }
    }

    /// Entry-wise minimum valuation.
    pub fn min_valuation(&self) -> i64 {
        let p = self.ctx.p();
        self.entries
            .iter()
            .map(|x| x.valuation(p))
            .min()
            .and_then(|v| v.finite())
            .expect("invertible matrix has a nonzero entry")
    }

    pub fn is_p_integral(&self) -> bool {
        let p = self.ctx.p();
        self.entries.iter().all(|x| x.valuation(p) >= Valuation::Finite(0))
    }

    pub fn is_diagonal(&self) -> bool {
        let d = self.dim();
        (0..d).all(|i| (0..d).all(|j| i == j || self.get(i, j).is_zero()))
    }

    /// Valuations of the diagonal entries of a diagonal matrix.
    pub fn diagonal_exponents(&self) -> Result<Vec<i64>> {
        if !self.is_diagonal() {
            return Err(Error::NotDiagonal);
        }
        let p = self.ctx.p();
        Ok((0..self.dim()).map(|i| self.get(i, i).valuation(p).unwrap()).collect())
    }

    /// `ν(det A)`.
    pub fn det_valuation(&self) -> i64 {
        det_valuation(self).unwrap()
    }
}

impl fmt::Display for MatrixRep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.dim() {
            let row: Vec<String> = self.row(i).iter().map(|x| x.to_string()).collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}

fn sub_scaled(dst: &mut [Rational], src: &[Rational], f: &Rational) {
    for (x, y) in dst.iter_mut().zip(src) {
        if !y.is_zero() {
            *x = &*x - &(y * f);
        }
    }
}

/// Determinant of a square array of rows by Gaussian elimination over `Q`.
pub fn det_of_rows(rows: &[&[Rational]]) -> Rational {
    let n = rows.len();
    let mut a: Vec<Vec<Rational>> = rows.iter().map(|r| r.to_vec()).collect();
    let mut det = Rational::one();
    for col in 0..n {
        let Some(piv) = (col..n).find(|&r| !a[r][col].is_zero()) else {
            return Rational::zero();
        };
        if piv != col {
            a.swap(piv, col);
            det = -det;
        }
        let pv = a[col][col].clone();
        det = &det * &pv;
        for r in col + 1..n {
            if !a[r][col].is_zero() {
                let f = &a[r][col] / &pv;
                let src = a[col].clone();
                sub_scaled(&mut a[r], &src, &f);
            }
        }
    }
    det
}

/// `ν(det A)`, always finite for a `MatrixRep`.
pub fn det_valuation(a: &MatrixRep) -> Valuation {
    a.det().valuation(a.ctx().p())
}

/// Output of the pivoted reduction: `localized = transform · original`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocalizedForm {
    pub localized: MatrixRep,
    pub transform: MatrixRep,
    /// `pi[i]` is the (0-based) pivot column of row `i`.
    pub pi: Vec<usize>,
    /// `alpha[i] = ν(localized[i][pi[i]])`, nondecreasing.
    pub alpha: Vec<i64>,
}

impl LocalizedForm {
    /// Checks the three defining conditions of localized form against `pi`.
    pub fn satisfies_conditions(&self) -> bool {
        is_localized(&self.localized, &self.pi)
    }
}

/// Whether `a` is in localized form with pivot columns `pi`.
pub fn is_localized(a: &MatrixRep, pi: &[usize]) -> bool {
    let d = a.dim();
    let p = a.ctx().p();
    for i in 0..d {
        let piv = a.get(i, pi[i]);
        let Some((v, unit)) = piv.split_unit(p) else {
            return false;
        };
        if unit != Rational::one() {
            return false;
        }
        let pv = Valuation::Finite(v);
        // (i) minimal among the remaining rows
        if (i..d).any(|j| (0..d).any(|k| a.get(j, k).valuation(p) < pv)) {
            return false;
        }
        // (ii) zeros below the pivot
        if (i + 1..d).any(|j| !a.get(j, pi[i]).is_zero()) {
            return false;
        }
        // (iii) strictly larger valuation left of the pivot
        if (0..pi[i]).any(|j| a.get(i, j).valuation(p) <= pv) {
            return false;
        }
    }
    true
}

/// Reduces `A` by `GL_d(Z_p)` row operations to localized form.
///
/// At each step the entry of minimal valuation among the remaining rows is
/// chosen (smallest row index, then smallest column index on ties), its
/// column is cleared in the other remaining rows, and the row is moved into
/// place. Pivots are finally made exact powers of `p` by unit row scaling.
pub fn localized_form(a: &MatrixRep) -> LocalizedForm {
    let ctx = a.ctx();
    let d = ctx.d();
    let p = ctx.p();
    let mut work = a.rows();
    let mut trans = MatrixRep::identity(ctx).rows();
    let mut pi = vec![0usize; d];

    for i in 0..d {
        let mut best: Option<(Valuation, usize, usize)> = None;
        for (j, row) in work.iter().enumerate().skip(i) {
            for (k, x) in row.iter().enumerate() {
                let v = x.valuation(p);
                if v.is_finite() && best.is_none_or(|(bv, _, _)| v < bv) {
                    best = Some((v, j, k));
                }
            }
        }
        let (_, j, k) = best.expect("invertible matrix keeps a nonzero remaining row");
        for l in i..d {
            if l != j && !work[l][k].is_zero() {
                let f = &work[l][k] / &work[j][k];
                let (src_w, src_t) = (work[j].clone(), trans[j].clone());
                sub_scaled(&mut work[l], &src_w, &f);
                sub_scaled(&mut trans[l], &src_t, &f);
            }
        }
        work.swap(i, j);
        trans.swap(i, j);
        pi[i] = k;
    }

    let mut alpha = vec![0i64; d];
    for i in 0..d {
        let (v, unit) = work[i][pi[i]].split_unit(p).expect("pivot is nonzero");
        alpha[i] = v;
        if unit != Rational::one() {
            let f = unit.recip().expect("unit");
            for x in work[i].iter_mut().chain(trans[i].iter_mut()) {
                *x = &*x * &f;
            }
        }
    }

    LocalizedForm {
        localized: MatrixRep::from_flat_unchecked(ctx, work.into_iter().flatten().collect()),
        transform: MatrixRep::from_flat_unchecked(ctx, trans.into_iter().flatten().collect()),
        pi,
        alpha,
    }
}

/// Whether `A` and `B` represent the same vertex.
pub fn vertex_equiv(a: &MatrixRep, b: &MatrixRep) -> Result<bool> {
    a.check_ctx(b)?;
    let m = b.mul(&a.inverse())?;
    let d = a.dim() as i64;
    let t = m.det_valuation();
    if t % d != 0 {
        return Ok(false);
    }
    let x = m.scale(&a.ctx().p_pow(-t / d))?;
    Ok(x.is_p_integral() && x.det_valuation() == 0)
}

/// Hashable normal form of a homothety class of lattices.
///
/// The lattice is first scaled so that it lies in `Z_p^d` but not in
/// `p·Z_p^d`; its upper-triangular basis then has diagonal `p^{exponents}`
/// and strictly-upper entries reduced into `[0, p^{exponent of their column})`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VertexKey {
    pub exponents: Vec<u32>,
    /// Strictly-upper entries, row-major.
    pub reduced_entries: Vec<BigUint>,
}

impl VertexKey {
    pub fn dim(&self) -> usize {
        self.exponents.len()
    }

    /// The triangular basis this key encodes.
    pub fn to_matrix(&self, ctx: PrimeContext) -> MatrixRep {
        let d = ctx.d();
        assert_eq!(d, self.dim(), "key dimension differs from context");
        let mut entries = vec![Rational::zero(); d * d];
        let mut it = self.reduced_entries.iter();
        for i in 0..d {
            entries[i * d + i] = ctx.p_pow(self.exponents[i] as i64);
            for j in i + 1..d {
                let x = it.next().expect("d(d-1)/2 entries");
                entries[i * d + j] = Rational::from_integer(BigInt::from(x.clone()));
            }
        }
        MatrixRep::from_flat_unchecked(ctx, entries)
    }

    /// `ν(det)` of the encoded basis; its residue mod `d` is the vertex label.
    pub fn det_valuation(&self) -> u64 {
        self.exponents.iter().map(|&e| e as u64).sum()
    }

    pub fn label(&self) -> usize {
        (self.det_valuation() % self.dim() as u64) as usize
    }
}

impl fmt::Display for VertexKey {
    /// `e1,e2,…;x12,x13,…` (no whitespace, so keys fit tab-separated dumps).
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let e: Vec<String> = self.exponents.iter().map(|x| x.to_string()).collect();
        let r: Vec<String> = self.reduced_entries.iter().map(|x| x.to_string()).collect();
        write!(f, "{};{}", e.join(","), r.join(","))
    }
}

impl FromStr for VertexKey {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::ParseRational(s.to_string());
        let (e, r) = s.split_once(';').ok_or_else(bad)?;
        let exponents: Vec<u32> =
            e.split(',').map(|x| x.parse().map_err(|_| bad())).collect::<Result<_>>()?;
        let reduced_entries: Vec<BigUint> = if r.is_empty() {
            Vec::new()
        } else {
            r.split(',').map(|x| x.parse().map_err(|_| bad())).collect::<Result<_>>()?
        };
        let d = exponents.len();
        if reduced_entries.len() != d * (d.saturating_sub(1)) / 2 {
            return Err(bad());
        }
        Ok(VertexKey { exponents, reduced_entries })
    }
}

/// Canonical key of the vertex represented by `A`.
pub fn canonical_vertex_key(a: &MatrixRep) -> VertexKey {
    let ctx = a.ctx();
    let d = ctx.d();
    let p = ctx.p();
    let shift = ctx.p_pow(-a.min_valuation());
    let mut rows: Vec<Vec<Rational>> =
        (0..d).map(|i| a.row(i).iter().map(|x| x * &shift).collect()).collect();
    let mut exps = vec![0u32; d];

    for j in 0..d {
        let r = (j..d)
            .filter(|&r| !rows[r][j].is_zero())
            .min_by_key(|&r| rows[r][j].valuation(p))
            .expect("invertible: some remaining row is nonzero in this column");
        rows.swap(j, r);
        let (v, unit) = rows[j][j].split_unit(p).expect("nonzero pivot");
        if unit != Rational::one() {
            let f = unit.recip().expect("unit");
            for x in rows[j][j..].iter_mut() {
                *x = &*x * &f;
            }
        }
        exps[j] = u32::try_from(v).expect("p-integral pivot");
        let pv = ctx.p_pow(v);
        for r in j + 1..d {
            if !rows[r][j].is_zero() {
                let f = &rows[r][j] / &pv;
                let src = rows[j].clone();
                sub_scaled(&mut rows[r][j..], &src[j..], &f);
            }
        }
    }

    let mut reduced = Vec::with_capacity(d * (d - 1) / 2);
    for j in 1..d {
        let pe = ctx.p_pow(exps[j] as i64);
        for i in 0..j {
            let x = rows[i][j].clone();
            let red = reduce_mod_prime_power(&x, exps[j], p).expect("p-integral entry");
            let red_q = Rational::from_integer(BigInt::from(red));
            let k = &(&x - &red_q) / &pe;
            if !k.is_zero() {
                let src = rows[j].clone();
                sub_scaled(&mut rows[i][j..], &src[j..], &k);
            }
            rows[i][j] = red_q;
        }
    }
    for i in 0..d {
        for j in i + 1..d {
            let x = &rows[i][j];
            debug_assert!(x.is_integer());
            reduced.push(x.numer().to_biguint().expect("reduced entries are nonnegative"));
        }
    }
    VertexKey { exponents: exps, reduced_entries: reduced }
}

/// Valuations of the Smith diagonal of `A` over `Z_p`, via consecutive
/// differences of `m_{A:i, I:d−i}`.
pub fn smith_valuations(a: &MatrixRep) -> Vec<i64> {
    let table = crate::invariants::m_table(a, &MatrixRep::identity(a.ctx()))
        .expect("same context");
    table.m.windows(2).map(|w| w[1] - w[0]).collect()
}

/// Action of `g` on representatives: `A ↦ A · g⁻¹`.
pub fn apply_group_element(a: &MatrixRep, g: &MatrixRep) -> Result<MatrixRep> {
    a.check_ctx(g)?;
    if g.det().is_zero() {
        return Err(Error::Singular);
    }
    a.mul(&g.inverse())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::*;
    use proptest::prelude::*;

    #[test]
    fn det_valuation_examples() {
        let c = ctx(2, 3);
        assert_eq!(MatrixRep::identity(c).det_valuation(), 0);
        assert_eq!(MatrixRep::diagonal_powers(ctx(2, 2), &[2, 0]).unwrap().det_valuation(), 2);
        assert_eq!(worked_example(c).det_valuation(), 9);
        assert_eq!(worked_example(ctx(3, 3)).det_valuation(), 9);
    }

    #[test]
    fn singular_and_shape_rejected() {
        let c = ctx(2, 2);
        assert_eq!(MatrixRep::from_integers(c, &[vec![1, 2], vec![2, 4]]), Err(Error::Singular));
        assert!(matches!(
            MatrixRep::from_integers(c, &[vec![1, 2, 3], vec![2, 4]]),
            Err(Error::ShapeMismatch { .. })
        ));
        assert!(matches!(
            MatrixRep::from_integers(c, &[vec![1, 2]]),
            Err(Error::ShapeMismatch { expected: 2, found: 1 })
        ));
    }

    #[test]
    fn localized_identity() {
        let c = ctx(5, 4);
        let lf = localized_form(&MatrixRep::identity(c));
        assert_eq!(lf.localized, MatrixRep::identity(c));
        assert_eq!(lf.pi, vec![0, 1, 2, 3]);
        assert_eq!(lf.alpha, vec![0; 4]);
    }

    #[test]
    fn localized_worked_example_is_fixed() {
        let a = worked_example(ctx(2, 3));
        let lf = localized_form(&a);
        assert_eq!(lf.localized, a);
        assert_eq!(lf.pi, vec![1, 2, 0]);
        assert_eq!(lf.alpha, vec![1, 3, 5]);
        assert_eq!(lf.transform, MatrixRep::identity(a.ctx()));
    }

    #[test]
    fn inverse_roundtrip() {
        let a = worked_example(ctx(3, 3));
        assert_eq!(a.mul(&a.inverse()).unwrap(), MatrixRep::identity(a.ctx()));
    }

    #[test]
    fn equivalence_examples() {
        let c = ctx(2, 2);
        let i = MatrixRep::identity(c);
        let a = MatrixRep::from_integers(c, &[vec![3, 1], vec![4, 6]]).unwrap();
        assert!(vertex_equiv(&a, &a.scale(&Rational::from(2)).unwrap()).unwrap());
        let u = MatrixRep::from_integers(c, &[vec![2, 1], vec![1, 1]]).unwrap();
        assert!(vertex_equiv(&a, &u.mul(&a).unwrap()).unwrap());
        let dp = MatrixRep::diagonal_powers(c, &[1, 0]).unwrap();
        assert!(!vertex_equiv(&i, &dp).unwrap());
        assert_eq!(
            vertex_equiv(&i, &MatrixRep::identity(ctx(3, 2))),
            Err(Error::ContextMismatch)
        );
    }

    #[test]
    fn key_examples() {
        let c = ctx(2, 2);
        let a = MatrixRep::from_integers(c, &[vec![3, 1], vec![4, 6]]).unwrap();
        assert_eq!(canonical_vertex_key(&a), canonical_vertex_key(&a.scale(&Rational::from(2)).unwrap()));
        let k1 = canonical_vertex_key(&MatrixRep::diagonal_powers(c, &[1, 0]).unwrap());
        let k2 = canonical_vertex_key(&MatrixRep::diagonal_powers(c, &[0, 1]).unwrap());
        assert_ne!(k1, k2);
        let k = canonical_vertex_key(&MatrixRep::identity(ctx(3, 3)));
        assert_eq!(k.exponents, vec![0, 0, 0]);
        assert_eq!(k.to_string(), "0,0,0;0,0,0");
        assert_eq!(k.to_string().parse::<VertexKey>().unwrap(), k);
    }

    #[test]
    fn key_matrix_is_fixed_point() {
        let a = worked_example(ctx(2, 3));
        let k = canonical_vertex_key(&a);
        let h = k.to_matrix(a.ctx());
        assert!(vertex_equiv(&a, &h).unwrap());
        assert_eq!(canonical_vertex_key(&h), k);
    }

    #[test]
    fn smith_examples() {
        let c = ctx(2, 3);
        assert_eq!(smith_valuations(&MatrixRep::identity(c)), vec![0, 0, 0]);
        assert_eq!(smith_valuations(&worked_example(c)), vec![1, 3, 5]);
        assert_eq!(smith_valuations(&MatrixRep::diagonal_powers(c, &[3, 1, 0]).unwrap()), vec![0, 1, 3]);
    }

    #[test]
    fn group_action_examples() {
        let c = ctx(3, 3);
        let a = worked_example(c);
        assert_eq!(apply_group_element(&a, &MatrixRep::identity(c)).unwrap(), a);
        let g = MatrixRep::diagonal_powers(c, &[1, 0, 0]).unwrap();
        assert_eq!(
            apply_group_element(&MatrixRep::identity(c), &g).unwrap(),
            MatrixRep::diagonal_powers(c, &[-1, 0, 0]).unwrap()
        );
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn localized_form_contract((c, a) in any_matrix()) {
            let lf = localized_form(&a);
            prop_assert!(lf.satisfies_conditions());
            prop_assert_eq!(lf.transform.mul(&a).unwrap(), lf.localized.clone());
            prop_assert!(lf.transform.is_p_integral());
            prop_assert_eq!(lf.transform.det_valuation(), 0);
            prop_assert!(lf.alpha.windows(2).all(|w| w[0] <= w[1]));
            prop_assert_eq!(lf.localized.det_valuation(), lf.alpha.iter().sum::<i64>());
            let p = c.p();
            for i in 0..c.d() {
                prop_assert_eq!(lf.localized.get(i, lf.pi[i]).valuation(p), Valuation::Finite(lf.alpha[i]));
            }
            // idempotent up to unit scaling (pivots are already exact powers)
            let again = localized_form(&lf.localized);
            prop_assert_eq!(again.localized, lf.localized);
            prop_assert_eq!(again.alpha, lf.alpha);
        }

        #[test]
        fn key_agrees_with_equivalence((_c, a, u, s) in matrix_with_unimodular()) {
            let b = u.mul(&a).unwrap().scale(&s).unwrap();
            prop_assert!(vertex_equiv(&a, &b).unwrap());
            prop_assert_eq!(canonical_vertex_key(&a), canonical_vertex_key(&b));
        }

        #[test]
        fn key_separates_classes((_c, a, b) in matrix_pair()) {
            let same = vertex_equiv(&a, &b).unwrap();
            prop_assert_eq!(same, canonical_vertex_key(&a) == canonical_vertex_key(&b));
            prop_assert_eq!(same, vertex_equiv(&b, &a).unwrap());
        }

        #[test]
        fn equivalence_is_transitive((_c, a, u, s) in matrix_with_unimodular(), k in 0u32..3) {
            let b = u.mul(&a).unwrap();
            let cc = b.scale(&s).unwrap().scale_rows_by_powers(&vec![k as i64; a.dim()]).unwrap();
            prop_assert!(vertex_equiv(&a, &a).unwrap());
            prop_assert!(vertex_equiv(&a, &b).unwrap() && vertex_equiv(&b, &cc).unwrap());
            prop_assert!(vertex_equiv(&a, &cc).unwrap());
        }

        #[test]
        fn smith_invariant_under_unimodular((_c, a, u, v) in matrix_two_sided()) {
            let b = u.mul(&a).unwrap().mul(&v).unwrap();
            let s = smith_valuations(&a);
            prop_assert!(s.windows(2).all(|w| w[0] <= w[1]));
            prop_assert_eq!(s.clone(), smith_valuations(&b));
            prop_assert_eq!(s, localized_form(&a).alpha);
        }
    }
}
