//! Exact integer linear algebra: Smith normal form, cokernels, kernels, abelian groups.
//!
//! Arithmetic runs on checked `i64` first and is redone with `BigInt` when an
//! intermediate value overflows, so results are always exact.

mod abelian;
mod scalar;
mod snf;
mod sparse;

pub use abelian::{PresentedAbelianGroup, Projection};
pub use scalar::Scalar;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use snf::dense_snf;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AbelianError {
    #[error("integer overflow")]
    Overflow,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LinalgConfig {
    /// Dense size above which unit-pivot elimination runs before the SNF.
    pub sparse_threshold: usize,
}

impl Default for LinalgConfig {
    fn default() -> Self {
        LinalgConfig { sparse_threshold: 10_000 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<i64>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix { rows, cols, entries: vec![0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    /// Panics on ragged input.
    pub fn from_rows(rows: Vec<Vec<i64>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        assert!(rows.iter().all(|x| x.len() == c), "ragged matrix");
        IntMatrix { rows: r, cols: c, entries: rows.into_iter().flatten().collect() }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.entries[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: i64) {
        self.entries[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[i64] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<i64> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<i64>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|&x| x == 0)
    }

    pub fn checked_mul(&self, other: &IntMatrix) -> Result<IntMatrix, AbelianError> {
        if self.cols != other.rows {
            return Err(AbelianError::Dimension { expected: self.cols, got: other.rows });
        }
        let mut out = IntMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == 0 {
                    continue;
                }
                for j in 0..other.cols {
                    let t = a.checked_mul(other.get(k, j)).ok_or(AbelianError::Overflow)?;
                    let v = out.get(i, j).checked_add(t).ok_or(AbelianError::Overflow)?;
                    out.set(i, j, v);
                }
            }
        }
        Ok(out)
    }

    fn columns_sparse(&self) -> Vec<Vec<(usize, i64)>> {
        (0..self.cols)
            .map(|j| (0..self.rows).filter_map(|i| Some((i, self.get(i, j))).filter(|e| e.1 != 0)).collect())
            .collect()
    }
}

/// Column-major sparse integer matrix.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SparseMatrix {
    rows: usize,
    columns: Vec<Vec<(usize, i64)>>,
}

impl SparseMatrix {
    pub fn new(rows: usize, columns: Vec<Vec<(usize, i64)>>) -> Self {
        debug_assert!(columns.iter().flatten().all(|e| e.0 < rows));
        SparseMatrix { rows, columns }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.columns.len()
    }

    pub fn columns(&self) -> &[Vec<(usize, i64)>] {
        &self.columns
    }

    pub fn nnz(&self) -> usize {
        self.columns.iter().map(|c| c.len()).sum()
    }

    pub fn to_dense(&self) -> IntMatrix {
        let mut m = IntMatrix::zeros(self.rows, self.cols());
        for (j, c) in self.columns.iter().enumerate() {
            for &(i, x) in c {
                m.set(i, j, m.get(i, j) + x);
            }
        }
        m
    }

    /// self · other, exact.
    pub fn checked_mul(&self, other: &SparseMatrix) -> Result<SparseMatrix, AbelianError> {
        if self.cols() != other.rows {
            return Err(AbelianError::Dimension { expected: self.cols(), got: other.rows });
        }
        let mut out = Vec::with_capacity(other.cols());
        let mut acc = vec![0i64; self.rows];
        for c in &other.columns {
            let mut touched = Vec::new();
            for &(k, y) in c {
                for &(i, x) in &self.columns[k] {
                    if acc[i] == 0 {
                        touched.push(i);
                    }
                    let t = x.checked_mul(y).ok_or(AbelianError::Overflow)?;
                    acc[i] = acc[i].checked_add(t).ok_or(AbelianError::Overflow)?;
                }
            }
            touched.sort_unstable();
            touched.dedup();
            let mut col = Vec::new();
            for i in touched {
                if acc[i] != 0 {
                    col.push((i, acc[i]));
                }
                acc[i] = 0;
            }
            out.push(col);
        }
        Ok(SparseMatrix { rows: self.rows, columns: out })
    }
}

/// U·M·V = D.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SmithForm {
    pub u: IntMatrix,
    pub d: IntMatrix,
    pub v: IntMatrix,
}

impl SmithForm {
    pub fn diagonal(&self) -> Vec<i64> {
        (0..self.d.rows().min(self.d.cols())).map(|i| self.d.get(i, i)).collect()
    }
}

fn to_i64_matrix<T: Scalar>(rows: &[Vec<T>], ncols: usize) -> Result<IntMatrix, AbelianError> {
    let mut m = IntMatrix::zeros(rows.len(), ncols);
    for (i, r) in rows.iter().enumerate() {
        for (j, x) in r.iter().enumerate() {
            m.set(i, j, x.to_i64().ok_or(AbelianError::Overflow)?);
        }
    }
    Ok(m)
}

fn snf_typed<T: Scalar>(m: &IntMatrix) -> Result<Option<SmithForm>, AbelianError> {
    let rows: Vec<Vec<T>> = m.to_rows().iter().map(|r| r.iter().map(|&x| T::from_i64(x)).collect()).collect();
    let Ok(s) = dense_snf(rows, m.cols(), true, true) else { return Ok(None) };
    let mut d = IntMatrix::zeros(m.rows(), m.cols());
    for (i, x) in s.d.iter().enumerate() {
        d.set(i, i, x.to_i64().ok_or(AbelianError::Overflow)?);
    }
    Ok(Some(SmithForm {
        u: to_i64_matrix(&s.u.expect("tracked"), m.rows())?,
        d,
        v: to_i64_matrix(&s.v.expect("tracked"), m.cols())?,
    }))
}

/// Smith normal form; pivots on the smallest |entry| (lowest row, then column).
pub fn smith_normal_form(m: &IntMatrix) -> Result<SmithForm, AbelianError> {
    match snf_typed::<i64>(m)? {
        Some(s) => Ok(s),
        None => snf_typed::<BigInt>(m)?.ok_or(AbelianError::Overflow),
    }
}

/// Z^rows / image(M).
pub fn cokernel(m: &IntMatrix) -> Result<PresentedAbelianGroup, AbelianError> {
    cokernel_of_columns(m.rows(), &m.columns_sparse())
}

pub fn cokernel_sparse(m: &SparseMatrix, cfg: &LinalgConfig) -> Result<PresentedAbelianGroup, AbelianError> {
    PresentedAbelianGroup::cokernel_sparse(m.rows, &m.columns, cfg)
}

/// Z^nrows / span(columns), columns given as (row, value) lists.
pub fn cokernel_of_columns(nrows: usize, columns: &[Vec<(usize, i64)>]) -> Result<PresentedAbelianGroup, AbelianError> {
    PresentedAbelianGroup::cokernel_sparse(nrows, columns, &LinalgConfig::default())
}

/// A basis of {v : M v = 0}, as the columns of the result.
pub fn kernel_lattice(m: &IntMatrix) -> Result<IntMatrix, AbelianError> {
    let s = smith_normal_form(m)?;
    let rank = s.diagonal().iter().take_while(|&&x| x != 0).count();
    let n = m.cols();
    let mut out = IntMatrix::zeros(n, n - rank);
    for (k, j) in (rank..n).enumerate() {
        for i in 0..n {
            out.set(i, k, s.v.get(i, j));
        }
    }
    Ok(out)
}

/// Row-style Hermite normal form of the lattice spanned by `vectors` (zero rows dropped).
pub fn hermite_basis(vectors: &[Vec<i64>], dim: usize) -> Result<Vec<Vec<i64>>, AbelianError> {
    let mut rows: Vec<Vec<i64>> = vectors.iter().filter(|v| v.iter().any(|&x| x != 0)).cloned().collect();
    let mut out = Vec::new();
    let mut col = 0;
    while col < dim && !rows.is_empty() {
        loop {
            let nonzero: Vec<usize> = (0..rows.len()).filter(|&i| rows[i][col] != 0).collect();
            if nonzero.len() <= 1 {
                break;
            }
            let p = *nonzero.iter().min_by_key(|&&i| (rows[i][col].unsigned_abs(), i)).expect("nonempty");
            for &i in &nonzero {
                if i != p {
                    let q = rows[i][col] / rows[p][col];
                    for j in 0..dim {
                        let t = q.checked_mul(rows[p][j]).ok_or(AbelianError::Overflow)?;
                        rows[i][j] = rows[i][j].checked_sub(t).ok_or(AbelianError::Overflow)?;
                    }
                }
            }
        }
        if let Some(p) = (0..rows.len()).find(|&i| rows[i][col] != 0) {
            let mut r = rows.swap_remove(p);
            if r[col] < 0 {
                r.iter_mut().for_each(|x| *x = -*x);
            }
            out.push(r);
        }
        rows.retain(|r| r.iter().any(|&x| x != 0));
        col += 1;
    }
    // reduce entries above each pivot
    for k in 0..out.len() {
        let pc = out[k].iter().position(|&x| x != 0).expect("nonzero row");
        let p = out[k][pc];
        for i in 0..k {
            let q = out[i][pc].div_euclid(p);
            if q != 0 {
                for j in 0..dim {
                    out[i][j] -= q * out[k][j];
                }
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn snf_examples() {
        let s = smith_normal_form(&IntMatrix::identity(3)).unwrap();
        assert_eq!(s.diagonal(), vec![1, 1, 1]);
        let m = IntMatrix::from_rows(vec![vec![2, 4], vec![6, 8]]);
        let s = smith_normal_form(&m).unwrap();
        assert_eq!(s.diagonal(), vec![2, 4]);
        assert_eq!(s.u.checked_mul(&m).unwrap().checked_mul(&s.v).unwrap(), s.d);
        let z = IntMatrix::zeros(3, 2);
        assert!(smith_normal_form(&z).unwrap().d.is_zero());
    }

    #[test]
    fn cokernel_examples() {
        let a = cokernel(&IntMatrix::from_rows(vec![vec![2]])).unwrap();
        assert_eq!(a.torsion(), &[2]);
        let a = cokernel(&IntMatrix::from_rows(vec![vec![2, 4], vec![6, 8]])).unwrap();
        assert_eq!(a.torsion(), &[2, 4]);
        let a = cokernel(&IntMatrix::zeros(1, 0)).unwrap();
        assert_eq!((a.torsion().len(), a.free_rank()), (0, 1));
    }

    #[test]
    fn kernel_examples() {
        let k = kernel_lattice(&IntMatrix::from_rows(vec![vec![1, 1]])).unwrap();
        assert_eq!(k.cols(), 1);
        let c = k.column(0);
        assert_eq!(c[0] + c[1], 0);
        assert_eq!(c[0].abs(), 1);
        assert_eq!(kernel_lattice(&IntMatrix::from_rows(vec![vec![2, 1], vec![1, 1]])).unwrap().cols(), 0);
        assert_eq!(kernel_lattice(&IntMatrix::from_rows(vec![vec![2]])).unwrap().cols(), 0);
    }

    #[test]
    fn hermite_is_canonical() {
        let b = hermite_basis(&[vec![-4, 2], vec![2, 0], vec![6, 4]], 2).unwrap();
        assert_eq!(b, vec![vec![2, 0], vec![0, 2]]);
    }

    #[test]
    fn sparse_and_dense_products_agree() {
        let a = SparseMatrix::new(2, vec![vec![(0, 1), (1, 2)], vec![(1, -1)]]);
        let b = SparseMatrix::new(2, vec![vec![(0, 3)], vec![(0, 1), (1, 2)]]);
        let p = a.checked_mul(&b).unwrap().to_dense();
        assert_eq!(p, a.to_dense().checked_mul(&b.to_dense()).unwrap());
    }
}
