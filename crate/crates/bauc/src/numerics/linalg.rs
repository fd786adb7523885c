//! Small dense matrices and vectors, sized for covariance work
//! (P up to a few thousand), with a Cholesky factorization tuned for
//! symmetric positive-definite inputs.
//!
//! Not a BLAS: only the handful of operations the estimators need.

use crate::{Error, Result};

/// Largest dimension `cholesky` will accept.
pub const MAX_CHOLESKY_DIM: usize = 4096;

/// Relative tolerance for the symmetry check on covariance-like matrices.
const SYMMETRY_TOL: f64 = 1e-12;

/// Dense row-major matrix of `f64`.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    /// Zero matrix of the given shape.
    pub fn zeros(rows: usize, cols: usize) -> Self {
        DenseMatrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    /// Identity matrix of order `n`.
    pub fn identity(n: usize) -> Self {
        let mut m = DenseMatrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, 1.0);
        }
        m
    }

    /// Diagonal matrix from the given entries.
    pub fn diag(entries: &[f64]) -> Self {
        let mut m = DenseMatrix::zeros(entries.len(), entries.len());
        for (i, &v) in entries.iter().enumerate() {
            m.set(i, i, v);
        }
        m
    }

    /// Builds a matrix from row-major entries.
    pub fn from_rows(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{rows}x{cols} matrix needs {} entries, got {}",
                rows * cols,
                data.len()
            )));
        }
        Ok(DenseMatrix { rows, cols, data })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.cols + j] = v;
    }

    /// Row-major entries.
    pub fn entries(&self) -> &[f64] {
        &self.data
    }

    /// Row `i` as a slice.
    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    /// Checks |M[i][j] - M[j][i]| <= 1e-12 * max(1, |M[i][j]|) for all i, j.
    pub fn is_symmetric(&self) -> bool {
        if !self.is_square() {
            return false;
        }
        for i in 0..self.rows {
            for j in (i + 1)..self.cols {
                let a = self.get(i, j);
                let b = self.get(j, i);
                if (a - b).abs() > SYMMETRY_TOL * a.abs().max(1.0) {
                    return false;
                }
            }
        }
        true
    }

    pub fn trace(&self) -> f64 {
        (0..self.rows.min(self.cols)).map(|i| self.get(i, i)).sum()
    }

    /// Largest absolute entry.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |acc, v| acc.max(v.abs()))
    }

    /// `self * v`.
    pub fn mat_vec(&self, v: &DenseVector) -> Result<DenseVector> {
        if v.len() != self.cols {
            return Err(Error::DimensionMismatch(format!(
                "matrix is {}x{}, vector has length {}",
                self.rows,
                self.cols,
                v.len()
            )));
        }
        let mut out = vec![0.0; self.rows];
        for i in 0..self.rows {
            let row = self.row(i);
            out[i] = row.iter().zip(v.entries()).map(|(a, b)| a * b).sum();
        }
        DenseVector::new(out)
    }

    /// `self * other`.
    pub fn mat_mul(&self, other: &DenseMatrix) -> Result<DenseMatrix> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = DenseMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == 0.0 {
                    continue;
                }
                for j in 0..other.cols {
                    out.data[i * other.cols + j] += a * other.get(k, j);
                }
            }
        }
        Ok(out)
    }

    /// Transpose copy.
    pub fn transpose(&self) -> DenseMatrix {
        let mut out = DenseMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(j, i, self.get(i, j));
            }
        }
        out
    }

    /// Entrywise `self + s * other`.
    pub fn add_scaled(&self, other: &DenseMatrix, s: f64) -> Result<DenseMatrix> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::DimensionMismatch(format!(
                "cannot add {}x{} and {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a + s * b)
            .collect();
        Ok(DenseMatrix {
            rows: self.rows,
            cols: self.cols,
            data,
        })
    }

    /// Adds `s * v vᵀ` in place (rank-one update).
    pub fn add_outer(&mut self, v: &DenseVector, s: f64) -> Result<()> {
        if !self.is_square() || self.rows != v.len() {
            return Err(Error::DimensionMismatch(format!(
                "rank-one update of {}x{} with vector of length {}",
                self.rows,
                self.cols,
                v.len()
            )));
        }
        for i in 0..self.rows {
            let vi = v.get(i);
            for j in 0..self.cols {
                self.data[i * self.cols + j] += s * vi * v.get(j);
            }
        }
        Ok(())
    }

    /// Entrywise `s * self`.
    pub fn scale(&self, s: f64) -> DenseMatrix {
        DenseMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|v| v * s).collect(),
        }
    }

    /// Adds `r` to every diagonal entry.
    pub fn add_ridge(&mut self, r: f64) {
        let n = self.rows.min(self.cols);
        for i in 0..n {
            self.data[i * self.cols + i] += r;
        }
    }

    /// Solves `self * x = b` for SPD `self` through its Cholesky factor.
    pub fn solve_spd(&self, b: &DenseVector) -> Result<DenseVector> {
        let l = cholesky(self)?;
        let y = l.forward_substitute(b)?;
        l.back_substitute_transposed(&y)
    }

    /// Solves `L y = b` with `self` lower triangular.
    pub fn forward_substitute(&self, b: &DenseVector) -> Result<DenseVector> {
        let n = self.rows;
        if !self.is_square() || b.len() != n {
            return Err(Error::DimensionMismatch(
                "triangular solve shape".to_string(),
            ));
        }
        let mut y = vec![0.0; n];
        for i in 0..n {
            let mut s = b.get(i);
            for j in 0..i {
                s -= self.get(i, j) * y[j];
            }
            y[i] = s / self.get(i, i);
        }
        DenseVector::new(y)
    }

    /// Solves `Lᵀ x = b` with `self` lower triangular.
    pub fn back_substitute_transposed(&self, b: &DenseVector) -> Result<DenseVector> {
        let n = self.rows;
        if !self.is_square() || b.len() != n {
            return Err(Error::DimensionMismatch(
                "triangular solve shape".to_string(),
            ));
        }
        let mut x = vec![0.0; n];
        for i in (0..n).rev() {
            let mut s = b.get(i);
            for j in (i + 1)..n {
                s -= self.get(j, i) * x[j];
            }
            x[i] = s / self.get(i, i);
        }
        DenseVector::new(x)
    }

    /// Inverse of a lower-triangular matrix, by forward substitution
    /// against the identity columns.
    pub fn lower_triangular_inverse(&self) -> Result<DenseMatrix> {
        let n = self.rows;
        if !self.is_square() {
            return Err(Error::DimensionMismatch(
                "triangular inverse of non-square matrix".to_string(),
            ));
        }
        let mut inv = DenseMatrix::zeros(n, n);
        for col in 0..n {
            for i in col..n {
                let mut s = if i == col { 1.0 } else { 0.0 };
                for j in col..i {
                    s -= self.get(i, j) * inv.get(j, col);
                }
                let d = self.get(i, i);
                if d == 0.0 {
                    return Err(Error::NotPositiveDefinite(
                        "zero pivot in triangular inverse".to_string(),
                    ));
                }
                inv.set(i, col, s / d);
            }
        }
        Ok(inv)
    }
}

/// Dense vector of `f64` with positive length.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseVector {
    data: Vec<f64>,
}

impl DenseVector {
    pub fn new(data: Vec<f64>) -> Result<Self> {
        if data.is_empty() {
            return Err(Error::InvalidArgument(
                "vector must have positive length".to_string(),
            ));
        }
        Ok(DenseVector { data })
    }

    /// Zero vector of length `n`.
    pub fn zeros(n: usize) -> Self {
        DenseVector { data: vec![0.0; n] }
    }

    /// Constant vector of length `n`.
    pub fn constant(n: usize, v: f64) -> Self {
        DenseVector { data: vec![v; n] }
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    #[inline]
    pub fn get(&self, i: usize) -> f64 {
        self.data[i]
    }

    #[inline]
    pub fn set(&mut self, i: usize, v: f64) {
        self.data[i] = v;
    }

    pub fn entries(&self) -> &[f64] {
        &self.data
    }

    pub fn dot(&self, other: &DenseVector) -> Result<f64> {
        if self.len() != other.len() {
            return Err(Error::DimensionMismatch(format!(
                "dot product of lengths {} and {}",
                self.len(),
                other.len()
            )));
        }
        Ok(self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a * b)
            .sum())
    }

    pub fn norm(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// `self + s * other`.
    pub fn add_scaled(&self, other: &DenseVector, s: f64) -> Result<DenseVector> {
        if self.len() != other.len() {
            return Err(Error::DimensionMismatch(format!(
                "adding vectors of lengths {} and {}",
                self.len(),
                other.len()
            )));
        }
        DenseVector::new(
            self.data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a + s * b)
                .collect(),
        )
    }

    pub fn scale(&self, s: f64) -> DenseVector {
        DenseVector {
            data: self.data.iter().map(|v| v * s).collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&v| v == 0.0)
    }

    pub fn all_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }
}

impl From<Vec<f64>> for DenseVector {
    fn from(data: Vec<f64>) -> Self {
        DenseVector { data }
    }
}

/// Cholesky factorization `M = L Lᵀ` of a symmetric positive-definite
/// matrix; returns the lower-triangular factor.
///
/// A pivot at or below `1e-12 * trace / n` is reported as
/// [`Error::NotPositiveDefinite`]; shape problems are reported as
/// [`Error::DimensionMismatch`]. Singular-but-PSD inputs (for example a
/// sample covariance with fewer samples than dimensions) are rejected;
/// callers that want them factored must add an explicit ridge first.
pub fn cholesky(m: &DenseMatrix) -> Result<DenseMatrix> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "cholesky of non-square {}x{} matrix",
            m.rows(),
            m.cols()
        )));
    }
    let n = m.rows();
    if n > MAX_CHOLESKY_DIM {
        return Err(Error::DimensionMismatch(format!(
            "cholesky dimension {n} exceeds cap {MAX_CHOLESKY_DIM}"
        )));
    }
    if !m.is_symmetric() {
        return Err(Error::DimensionMismatch(
            "cholesky input is not symmetric".to_string(),
        ));
    }
    let pivot_tol = 1e-12 * m.trace().abs() / n as f64;
    let mut l = DenseMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..=i {
            let mut s = m.get(i, j);
            for k in 0..j {
                s -= l.get(i, k) * l.get(j, k);
            }
            if i == j {
                if s <= pivot_tol {
                    return Err(Error::NotPositiveDefinite(format!(
                        "pivot {s:.3e} at index {i} (tolerance {pivot_tol:.3e})"
                    )));
                }
                l.set(i, j, s.sqrt());
            } else {
                l.set(i, j, s / l.get(j, j));
            }
        }
    }
    Ok(l)
}

/// Quadratic form `wᵀ M w`.
pub fn quadratic_form(w: &DenseVector, m: &DenseMatrix) -> Result<f64> {
    if !m.is_square() || m.rows() != w.len() {
        return Err(Error::DimensionMismatch(format!(
            "quadratic form of {}x{} matrix with vector of length {}",
            m.rows(),
            m.cols(),
            w.len()
        )));
    }
    let mut total = 0.0;
    for i in 0..m.rows() {
        let wi = w.get(i);
        if wi == 0.0 {
            continue;
        }
        let row = m.row(i);
        let mut s = 0.0;
        for (j, &mij) in row.iter().enumerate() {
            s += mij * w.get(j);
        }
        total += wi * s;
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn approx(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() <= tol, "{a} vs {b} (tol {tol})");
    }

    #[test]
    fn cholesky_identity_is_identity() {
        for n in [1, 2, 5, 17] {
            let l = cholesky(&DenseMatrix::identity(n)).unwrap();
            assert_eq!(l, DenseMatrix::identity(n));
        }
    }

    #[test]
    fn cholesky_hand_example() {
        let m = DenseMatrix::from_rows(2, 2, vec![4.0, 2.0, 2.0, 3.0]).unwrap();
        let l = cholesky(&m).unwrap();
        approx(l.get(0, 0), 2.0, 1e-15);
        approx(l.get(1, 0), 1.0, 1e-15);
        approx(l.get(1, 1), 2.0_f64.sqrt(), 1e-15);
        assert_eq!(l.get(0, 1), 0.0);
    }

    #[test]
    fn cholesky_rejects_indefinite() {
        // eigenvalues 3 and -1
        let m = DenseMatrix::from_rows(2, 2, vec![1.0, 2.0, 2.0, 1.0]).unwrap();
        match cholesky(&m) {
            Err(Error::NotPositiveDefinite(_)) => {}
            other => panic!("expected NotPositiveDefinite, got {other:?}"),
        }
    }

    #[test]
    fn cholesky_shape_errors_are_distinct() {
        let m = DenseMatrix::zeros(2, 3);
        match cholesky(&m) {
            Err(Error::DimensionMismatch(_)) => {}
            other => panic!("expected DimensionMismatch, got {other:?}"),
        }
        let asym = DenseMatrix::from_rows(2, 2, vec![1.0, 0.5, 0.0, 1.0]).unwrap();
        match cholesky(&asym) {
            Err(Error::DimensionMismatch(_)) => {}
            other => panic!("expected DimensionMismatch, got {other:?}"),
        }
    }

    #[test]
    fn quadratic_form_examples() {
        let m = DenseMatrix::from_rows(2, 2, vec![4.0, 2.0, 2.0, 3.0]).unwrap();
        let e1 = DenseVector::new(vec![1.0, 0.0]).unwrap();
        approx(quadratic_form(&e1, &m).unwrap(), 4.0, 1e-15);
        let ones = DenseVector::new(vec![1.0, 1.0]).unwrap();
        approx(quadratic_form(&ones, &m).unwrap(), 11.0, 1e-15);
        let zero = DenseVector::zeros(2);
        approx(quadratic_form(&zero, &m).unwrap(), 0.0, 0.0);
        let w3 = DenseVector::zeros(3);
        assert!(matches!(
            quadratic_form(&w3, &m),
            Err(Error::DimensionMismatch(_))
        ));
    }

    #[test]
    fn spd_solve_round_trip() {
        let m = DenseMatrix::from_rows(3, 3, vec![4.0, 1.0, 0.5, 1.0, 3.0, 0.2, 0.5, 0.2, 2.0])
            .unwrap();
        let b = DenseVector::new(vec![1.0, -2.0, 0.5]).unwrap();
        let x = m.solve_spd(&b).unwrap();
        let back = m.mat_vec(&x).unwrap();
        for i in 0..3 {
            approx(back.get(i), b.get(i), 1e-12);
        }
    }

    #[test]
    fn lower_triangular_inverse_round_trip() {
        let l = DenseMatrix::from_rows(3, 3, vec![2.0, 0.0, 0.0, 1.0, 1.5, 0.0, -0.5, 0.25, 3.0])
            .unwrap();
        let inv = l.lower_triangular_inverse().unwrap();
        let prod = l.mat_mul(&inv).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                approx(prod.get(i, j), if i == j { 1.0 } else { 0.0 }, 1e-14);
            }
        }
    }

    #[test]
    fn symmetry_check_tolerates_roundoff_only() {
        let mut m = DenseMatrix::identity(3);
        m.set(0, 1, 1.0 + 1e-14);
        m.set(1, 0, 1.0);
        assert!(m.is_symmetric());
        m.set(0, 1, 1.0 + 1e-9);
        assert!(!m.is_symmetric());
    }
}
