//! Exact dense matrices, row reduction, and incremental sparse spans.

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use super::scalar::Scalar;
use crate::error::ArithError;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExactMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Scalar>,
}

/// Result of [`ExactMatrix::rref`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rref {
    pub reduced: ExactMatrix,
    pub rank: usize,
    pub pivots: Vec<usize>,
}

impl ExactMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        ExactMatrix {
            rows,
            cols,
            data: vec![Scalar::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Scalar::one();
        }
        m
    }

    /// Builds from row vectors. All rows must have the same length.
    pub fn from_rows(rows: Vec<Vec<Scalar>>) -> Result<Self, ArithError> {
        let cols = rows.first().map_or(0, Vec::len);
        if let Some(bad) = rows.iter().find(|r| r.len() != cols) {
            return Err(ArithError::DimensionMismatch {
                expected: cols,
                found: bad.len(),
            });
        }
        let n = rows.len();
        Ok(ExactMatrix {
            rows: n,
            cols,
            data: rows.into_iter().flatten().collect(),
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[Scalar] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<Scalar>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> ExactMatrix {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn mul(&self, other: &ExactMatrix) -> Result<ExactMatrix, ArithError> {
        if self.cols != other.rows {
            return Err(ArithError::DimensionMismatch {
                expected: self.cols,
                found: other.rows,
            });
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = &other[(k, j)];
                    if !b.is_zero() {
                        out[(i, j)] += a * b;
                    }
                }
            }
        }
        Ok(out)
    }

    /// `[self | other]`.
    pub fn hstack(&self, other: &ExactMatrix) -> Result<ExactMatrix, ArithError> {
        if self.rows != other.rows {
            return Err(ArithError::DimensionMismatch {
                expected: self.rows,
                found: other.rows,
            });
        }
        let rows = (0..self.rows)
            .map(|i| {
                let mut r = self.row(i).to_vec();
                r.extend_from_slice(other.row(i));
                r
            })
            .collect();
        ExactMatrix::from_rows(rows)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    /// Reduced row echelon form. Pivots are chosen as the first nonzero entry
    /// (top-most row) of the leftmost remaining column.
    pub fn rref(&self) -> Rref {
        self.rref_limited(self.cols)
    }

    /// Row reduction that only selects pivots among the first `pivot_cols`
    /// columns; the remaining columns are carried along (augmented part).
    pub fn rref_limited(&self, pivot_cols: usize) -> Rref {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..pivot_cols.min(m.cols) {
            if row == m.rows {
                break;
            }
            let Some(p) = (row..m.rows).find(|&r| !m[(r, col)].is_zero()) else {
                continue;
            };
            m.swap_rows(p, row);
            let inv = m[(row, col)].recip();
            for j in col..m.cols {
                let v = &m[(row, j)] * &inv;
                m[(row, j)] = v;
            }
            for r in 0..m.rows {
                if r == row || m[(r, col)].is_zero() {
                    continue;
                }
                let factor = m[(r, col)].clone();
                for j in col..m.cols {
                    let delta = &factor * &m[(row, j)];
                    if !delta.is_zero() {
                        m[(r, j)] -= delta;
                    }
                }
            }
            pivots.push(col);
            row += 1;
        }
        Rref {
            rank: pivots.len(),
            reduced: m,
            pivots,
        }
    }

    pub fn rank(&self) -> usize {
        self.rref().rank
    }

    /// Solves `self · X = rhs` exactly. Fails if `self` does not have full
    /// column rank or the system is inconsistent.
    pub fn solve(&self, rhs: &ExactMatrix) -> Result<ExactMatrix, ArithError> {
        let aug = self.hstack(rhs)?;
        let red = aug.rref_limited(self.cols);
        if red.rank < self.cols {
            return Err(ArithError::Singular {
                rank: red.rank,
                needed: self.cols,
            });
        }
        for r in red.rank..self.rows {
            if (self.cols..aug.cols).any(|j| !red.reduced[(r, j)].is_zero()) {
                return Err(ArithError::Inconsistent);
            }
        }
        let mut x = ExactMatrix::zeros(self.cols, rhs.cols);
        for (r, &c) in red.pivots.iter().enumerate() {
            for j in 0..rhs.cols {
                x[(c, j)] = red.reduced[(r, self.cols + j)].clone();
            }
        }
        Ok(x)
    }
}

impl std::ops::Index<(usize, usize)> for ExactMatrix {
    type Output = Scalar;
    fn index(&self, (i, j): (usize, usize)) -> &Scalar {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for ExactMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Scalar {
        &mut self.data[i * self.cols + j]
    }
}

/// Tests whether `v` lies in the span of `basis`; on success returns the
/// coordinates of `v` with respect to `basis` (one particular solution when
/// `basis` is dependent).
pub fn in_span(v: &[Scalar], basis: &[Vec<Scalar>]) -> Result<Option<Vec<Scalar>>, ArithError> {
    let n = v.len();
    if let Some(bad) = basis.iter().find(|b| b.len() != n) {
        return Err(ArithError::DimensionMismatch {
            expected: n,
            found: bad.len(),
        });
    }
    if basis.is_empty() {
        return Ok(v.iter().all(Zero::is_zero).then(Vec::new));
    }
    // Columns are the basis vectors, augmented with v.
    let mut rows = vec![Vec::with_capacity(basis.len() + 1); n];
    for (i, row) in rows.iter_mut().enumerate() {
        for b in basis {
            row.push(b[i].clone());
        }
        row.push(v[i].clone());
    }
    let m = ExactMatrix::from_rows(rows)?;
    let k = basis.len();
    let red = m.rref_limited(k);
    for r in red.rank..n {
        if !red.reduced[(r, k)].is_zero() {
            return Ok(None);
        }
    }
    let mut coords = vec![Scalar::zero(); k];
    for (r, &c) in red.pivots.iter().enumerate() {
        coords[c] = red.reduced[(r, k)].clone();
    }
    Ok(Some(coords))
}

/// Sparse vector keyed by an ordered index type.
pub type SparseVec<K> = BTreeMap<K, Scalar>;

/// Incrementally maintained echelon basis of a subspace of sparse vectors.
///
/// Each stored row has a distinct leading (largest) key and is scaled so that
/// its leading coefficient is 1. A vector lies in the span iff repeatedly
/// cancelling its leading key against stored rows reduces it to zero.
#[derive(Clone, Debug, Default)]
pub struct SparseSpan<K: Ord + Clone> {
    rows: BTreeMap<K, SparseVec<K>>,
}

impl<K: Ord + Clone> SparseSpan<K> {
    pub fn new() -> Self {
        SparseSpan {
            rows: BTreeMap::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    /// Reduces `v` against the stored rows. The result is zero iff `v` is in the span.
    pub fn reduce(&self, v: &SparseVec<K>) -> SparseVec<K> {
        let mut v = v.clone();
        v.retain(|_, c| !c.is_zero());
        let mut upper: Option<K> = None;
        loop {
            // Leading key strictly below the last cancelled one.
            let lead = match &upper {
                None => v.iter().next_back(),
                Some(u) => v.range(..u.clone()).next_back(),
            };
            let Some((key, coef)) = lead.map(|(k, c)| (k.clone(), c.clone())) else {
                return v;
            };
            if let Some(row) = self.rows.get(&key) {
                for (k, c) in row {
                    let e = v.entry(k.clone()).or_insert_with(Scalar::zero);
                    *e -= &coef * c;
                    if e.is_zero() {
                        v.remove(k);
                    }
                }
            } else {
                upper = Some(key);
            }
        }
    }

    pub fn contains(&self, v: &SparseVec<K>) -> bool {
        let r = self.reduce(v);
        r.is_empty()
    }

    /// Inserts `v`; returns the reduced new row when the span grew.
    pub fn insert(&mut self, v: &SparseVec<K>) -> Option<SparseVec<K>> {
        let mut r = self.reduce_fully_leading(v);
        let (lead, c) = r.iter().next_back()?;
        let lead = lead.clone();
        let inv = c.recip();
        for val in r.values_mut() {
            *val *= &inv;
        }
        self.rows.insert(lead, r.clone());
        Some(r)
    }

    /// Like [`reduce`](Self::reduce) but stops at the first leading key that is
    /// not a pivot, which is all an insertion needs.
    fn reduce_fully_leading(&self, v: &SparseVec<K>) -> SparseVec<K> {
        let mut v = v.clone();
        v.retain(|_, c| !c.is_zero());
        loop {
            let Some((key, coef)) = v.iter().next_back().map(|(k, c)| (k.clone(), c.clone()))
            else {
                return v;
            };
            let Some(row) = self.rows.get(&key) else {
                return v;
            };
            for (k, c) in row {
                let e = v.entry(k.clone()).or_insert_with(Scalar::zero);
                *e -= &coef * c;
                if e.is_zero() {
                    v.remove(k);
                }
            }
        }
    }

    /// Rows whose leading key satisfies `pred`. When `pred` selects a down-set
    /// of keys, these rows span the intersection of the span with the
    /// coordinate subspace on that down-set.
    pub fn rows_with_lead(&self, pred: impl Fn(&K) -> bool) -> Vec<SparseVec<K>> {
        self.rows
            .iter()
            .filter(|(k, _)| pred(k))
            .map(|(_, r)| r.clone())
            .collect()
    }

    pub fn rows(&self) -> impl Iterator<Item = &SparseVec<K>> {
        self.rows.values()
    }

    pub fn leads(&self) -> impl Iterator<Item = &K> {
        self.rows.keys()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::scalar::int;
    use proptest::prelude::*;

    fn m(rows: &[&[i64]]) -> ExactMatrix {
        ExactMatrix::from_rows(rows.iter().map(|r| r.iter().map(|&x| int(x)).collect()).collect())
            .unwrap()
    }

    fn v(xs: &[i64]) -> Vec<Scalar> {
        xs.iter().map(|&x| int(x)).collect()
    }

    #[test]
    fn rref_identity_has_full_rank() {
        assert_eq!(ExactMatrix::identity(3).rref().rank, 3);
    }

    #[test]
    fn rref_proportional_rows() {
        let r = m(&[&[1, 2], &[2, 4]]).rref();
        assert_eq!(r.rank, 1);
        assert_eq!(r.pivots, vec![0]);
        assert_eq!(r.reduced, m(&[&[1, 2], &[0, 0]]));
    }

    #[test]
    fn rref_zero_matrix() {
        assert_eq!(ExactMatrix::zeros(2, 2).rref().rank, 0);
    }

    #[test]
    fn in_span_examples() {
        let e = vec![v(&[1, 0]), v(&[0, 1])];
        assert_eq!(in_span(&v(&[1, 1]), &e).unwrap(), Some(v(&[1, 1])));
        let b = vec![v(&[1, 1, 1]), v(&[0, 1, 2])];
        assert_eq!(in_span(&v(&[1, 2, 3]), &b).unwrap(), Some(v(&[1, 1])));
        assert_eq!(in_span(&v(&[0, 0, 1]), &[v(&[1, 0, 0])]).unwrap(), None);
        assert!(in_span(&v(&[1, 2]), &[v(&[1])]).is_err());
    }

    #[test]
    fn solve_reports_singular_and_inconsistent() {
        let a = m(&[&[1, 2], &[2, 4]]);
        assert!(matches!(
            a.solve(&m(&[&[1], &[2]])),
            Err(ArithError::Singular { .. })
        ));
        let tall = m(&[&[1, 0], &[0, 1], &[1, 1]]);
        assert!(matches!(
            tall.solve(&m(&[&[1], &[1], &[3]])),
            Err(ArithError::Inconsistent)
        ));
        let x = tall.solve(&m(&[&[1], &[1], &[2]])).unwrap();
        assert_eq!(x, m(&[&[1], &[1]]));
    }

    #[test]
    fn sparse_span_membership() {
        let mut s = SparseSpan::<usize>::new();
        let a: SparseVec<usize> = [(0, int(1)), (2, int(1))].into_iter().collect();
        let b: SparseVec<usize> = [(1, int(1)), (2, int(2))].into_iter().collect();
        assert!(s.insert(&a).is_some());
        assert!(s.insert(&b).is_some());
        let c: SparseVec<usize> = [(0, int(2)), (1, int(-1))].into_iter().collect();
        assert!(s.contains(&c));
        assert!(s.insert(&c).is_none());
        let d: SparseVec<usize> = [(0, int(1))].into_iter().collect();
        assert!(!s.contains(&d));
        assert_eq!(s.dim(), 2);
    }

    fn small_matrix() -> impl Strategy<Value = Vec<Vec<i64>>> {
        (1usize..5, 1usize..5).prop_flat_map(|(r, c)| {
            proptest::collection::vec(proptest::collection::vec(-3i64..4, c), r)
        })
    }

    proptest! {
        #[test]
        fn rref_is_idempotent(rows in small_matrix()) {
            let a = ExactMatrix::from_rows(rows.iter().map(|r| v(r)).collect()).unwrap();
            let once = a.rref();
            let twice = once.reduced.rref();
            prop_assert_eq!(&once.reduced, &twice.reduced);
            prop_assert_eq!(once.rank, twice.rank);
        }

        #[test]
        fn rank_ignores_row_order(rows in small_matrix(), seed in 0usize..100) {
            let mut perm = rows.clone();
            let n = perm.len();
            perm.rotate_left(seed % n);
            perm.reverse();
            let a = ExactMatrix::from_rows(rows.iter().map(|r| v(r)).collect()).unwrap();
            let b = ExactMatrix::from_rows(perm.iter().map(|r| v(r)).collect()).unwrap();
            prop_assert_eq!(a.rank(), b.rank());
        }

        #[test]
        fn sparse_span_rank_matches_dense(rows in small_matrix()) {
            let a = ExactMatrix::from_rows(rows.iter().map(|r| v(r)).collect()).unwrap();
            let mut s = SparseSpan::<usize>::new();
            for r in &rows {
                let sv: SparseVec<usize> = r.iter().enumerate().map(|(i, &x)| (i, int(x))).collect();
                s.insert(&sv);
            }
            prop_assert_eq!(s.dim(), a.rank());
        }
    }
}
