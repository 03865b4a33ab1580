//! Dense row-major f64 matrices.
//!
//! This is the only numeric container in the crate. Everything is 64-bit:
//! gradient checking at 1e-4 relative tolerance is not feasible in f32.
//! There is no broadcasting and no views; shapes are explicit and checked so
//! the hand-written backpropagation stays auditable.
//!
//! The three product kernels (`matmul`, `matmul_nt`, `matmul_tn`) cover the
//! contractions needed by forward/backward passes without materializing any
//! transpose. They are serial, tiled over output rows so the hot tile stays
//! in L2, and written so the inner loops autovectorize.

use crate::error::{Error, Result};

/// Output-row tile for the product kernels. 64 rows x 512 cols x 8 bytes
/// caps the hot tile at 256 KiB, comfortably inside L2 on anything current.
const TILE: usize = 64;

#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    /// rows x cols matrix of zeros.
    pub fn zeros(rows: usize, cols: usize) -> Matrix {
        Matrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    /// Builds from a row-major vector; `data.len()` must equal rows*cols.
    pub fn from_vec(rows: usize, cols: usize, data: Vec<f64>) -> Result<Matrix> {
        if data.len() != rows * cols {
            return Err(Error::arg(format!(
                "matrix data length {} does not match {}x{}",
                data.len(),
                rows,
                cols
            )));
        }
        Ok(Matrix { rows, cols, data })
    }

    /// Builds from row slices; all rows must have equal length.
    pub fn from_rows(rows: &[&[f64]]) -> Result<Matrix> {
        if rows.is_empty() {
            return Err(Error::arg("matrix needs at least one row"));
        }
        let cols = rows[0].len();
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            if r.len() != cols {
                return Err(Error::arg(format!(
                    "ragged rows: expected {} columns, found {}",
                    cols,
                    r.len()
                )));
            }
            data.extend_from_slice(r);
        }
        Ok(Matrix {
            rows: rows.len(),
            cols,
            data,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape_str(&self) -> String {
        format!("{}x{}", self.rows, self.cols)
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        debug_assert!(i < self.rows && j < self.cols);
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        debug_assert!(i < self.rows && j < self.cols);
        self.data[i * self.cols + j] = v;
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    #[inline]
    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }

    /// True when every entry is finite (no NaN/Inf).
    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    /// Entrywise map into a new matrix.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Matrix {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&v| f(v)).collect(),
        }
    }

    /// Explicit transpose. Only used on cold paths; the product kernels
    /// below handle the hot transposed contractions in place.
    pub fn transpose(&self) -> Matrix {
        let mut out = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.data[j * self.rows + i] = self.data[i * self.cols + j];
            }
        }
        out
    }

    /// Standard product: self[m x k] * b[k x n] -> [m x n].
    pub fn matmul(&self, b: &Matrix) -> Result<Matrix> {
        if self.cols != b.rows {
            return Err(Error::shape("matmul", self.shape_str(), b.shape_str()));
        }
        let (m, k, n) = (self.rows, self.cols, b.cols);
        let mut out = Matrix::zeros(m, n);
        for i0 in (0..m).step_by(TILE) {
            let i1 = (i0 + TILE).min(m);
            let mut l = 0;
            // Four rank-1 updates per pass over the output block: the
            // block is the bandwidth bottleneck, so amortizing its
            // traffic matters more than anything in the inner loop.
            while l + 4 <= k {
                let rows = [b.row(l), b.row(l + 1), b.row(l + 2), b.row(l + 3)];
                for i in i0..i1 {
                    let arow = &self.data[i * k..(i + 1) * k];
                    let a = [arow[l], arow[l + 1], arow[l + 2], arow[l + 3]];
                    if a == [0.0; 4] {
                        continue; // whole quad silent (k-sparse codes)
                    }
                    axpy4(a, rows, &mut out.data[i * n..(i + 1) * n]);
                }
                l += 4;
            }
            while l < k {
                let brow = b.row(l);
                for i in i0..i1 {
                    let a = self.data[i * k + l];
                    if a == 0.0 {
                        continue;
                    }
                    axpy(a, brow, &mut out.data[i * n..(i + 1) * n]);
                }
                l += 1;
            }
        }
        Ok(out)
    }

    /// Product with transposed right factor: self[m x k] * b[n x k]^T -> [m x n].
    pub fn matmul_nt(&self, b: &Matrix) -> Result<Matrix> {
        if self.cols != b.cols {
            return Err(Error::shape("matmul_nt", self.shape_str(), b.shape_str()));
        }
        let (m, n) = (self.rows, b.rows);
        let mut out = Matrix::zeros(m, n);
        for j0 in (0..n).step_by(TILE) {
            let j1 = (j0 + TILE).min(n);
            for i in 0..m {
                let arow = self.row(i);
                let orow = &mut out.data[i * n..(i + 1) * n];
                for j in j0..j1 {
                    orow[j] = dot(arow, b.row(j));
                }
            }
        }
        Ok(out)
    }

    /// Product with transposed left factor: self[k x m]^T * b[k x n] -> [m x n].
    pub fn matmul_tn(&self, b: &Matrix) -> Result<Matrix> {
        if self.rows != b.rows {
            return Err(Error::shape("matmul_tn", self.shape_str(), b.shape_str()));
        }
        let (k, m, n) = (self.rows, self.cols, b.cols);
        let mut out = Matrix::zeros(m, n);
        for i0 in (0..m).step_by(TILE) {
            let i1 = (i0 + TILE).min(m);
            let mut l = 0;
            while l + 4 <= k {
                let rows = [b.row(l), b.row(l + 1), b.row(l + 2), b.row(l + 3)];
                for i in i0..i1 {
                    let a = [
                        self.data[l * m + i],
                        self.data[(l + 1) * m + i],
                        self.data[(l + 2) * m + i],
                        self.data[(l + 3) * m + i],
                    ];
                    if a == [0.0; 4] {
                        continue;
                    }
                    axpy4(a, rows, &mut out.data[i * n..(i + 1) * n]);
                }
                l += 4;
            }
            while l < k {
                let arow = self.row(l);
                let brow = b.row(l);
                for i in i0..i1 {
                    let a = arow[i];
                    if a == 0.0 {
                        continue;
                    }
                    axpy(a, brow, &mut out.data[i * n..(i + 1) * n]);
                }
                l += 1;
            }
        }
        Ok(out)
    }

    /// Sum over rows -> vector of length cols.
    pub fn col_sums(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.cols];
        for i in 0..self.rows {
            axpy(1.0, self.row(i), &mut out);
        }
        out
    }

    /// Adds `bias` (length cols) to every row in place.
    pub fn add_row_bias(&mut self, bias: &[f64]) -> Result<()> {
        if bias.len() != self.cols {
            return Err(Error::shape(
                "add_row_bias",
                self.shape_str(),
                format!("bias[{}]", bias.len()),
            ));
        }
        for i in 0..self.rows {
            let row = &mut self.data[i * self.cols..(i + 1) * self.cols];
            for (r, b) in row.iter_mut().zip(bias) {
                *r += b;
            }
        }
        Ok(())
    }
}

/// y += a * x, the workhorse of the row-tiled kernels.
#[inline]
fn axpy(a: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += a * xi;
    }
}

/// Fused quad-row update y += a0*x0 + a1*x1 + a2*x2 + a3*x3.
#[inline]
fn axpy4(a: [f64; 4], x: [&[f64]; 4], y: &mut [f64]) {
    let [x0, x1, x2, x3] = x;
    for ((((yi, v0), v1), v2), v3) in y.iter_mut().zip(x0).zip(x1).zip(x2).zip(x3) {
        *yi += a[0] * v0 + a[1] * v1 + a[2] * v2 + a[3] * v3;
    }
}

/// Dot product with four accumulators so the FMA chain is not latency-bound.
#[inline]
fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    let mut acc = [0.0f64; 4];
    let chunks = a.len() / 4;
    for c in 0..chunks {
        let i = c * 4;
        acc[0] += a[i] * b[i];
        acc[1] += a[i + 1] * b[i + 1];
        acc[2] += a[i + 2] * b[i + 2];
        acc[3] += a[i + 3] * b[i + 3];
    }
    let mut tail = 0.0;
    for i in chunks * 4..a.len() {
        tail += a[i] * b[i];
    }
    acc[0] + acc[1] + acc[2] + acc[3] + tail
}

/// Entrywise logistic function 1/(1+e^-x).
///
/// Uses the sign-split form so neither branch can overflow: outputs are
/// always in (0,1) up to underflow at the far tails.
pub fn sigmoid(x: &Matrix) -> Matrix {
    x.map(sigmoid_scalar)
}

/// In-place variant of [`sigmoid`] for the training hot path.
pub fn sigmoid_inplace(x: &mut Matrix) {
    for v in x.as_mut_slice() {
        *v = sigmoid_scalar(*v);
    }
}

#[inline]
pub(crate) fn sigmoid_scalar(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matmul_identity() {
        let a = Matrix::from_rows(&[&[1.0, 2.0], &[3.0, 4.0]]).unwrap();
        let id = Matrix::from_rows(&[&[1.0, 0.0], &[0.0, 1.0]]).unwrap();
        assert_eq!(a.matmul(&id).unwrap(), a);
    }

    #[test]
    fn matmul_hand_dot() {
        let a = Matrix::from_rows(&[&[1.0, 2.0]]).unwrap();
        let b = Matrix::from_rows(&[&[3.0], &[4.0]]).unwrap();
        let c = a.matmul(&b).unwrap();
        assert_eq!((c.rows(), c.cols()), (1, 1));
        assert_eq!(c.get(0, 0), 11.0);
    }

    #[test]
    fn matmul_shape_error_names_both_shapes() {
        let a = Matrix::zeros(3, 4);
        let b = Matrix::zeros(5, 2);
        let err = a.matmul(&b).unwrap_err().to_string();
        assert!(err.contains("3x4") && err.contains("5x2"), "{err}");
    }

    #[test]
    fn transposed_kernels_match_explicit_transpose() {
        let a = Matrix::from_vec(3, 5, (0..15).map(|v| v as f64 * 0.37 - 2.0).collect()).unwrap();
        let b = Matrix::from_vec(4, 5, (0..20).map(|v| (v as f64).sin()).collect()).unwrap();
        let nt = a.matmul_nt(&b).unwrap();
        let via_t = a.matmul(&b.transpose()).unwrap();
        for (x, y) in nt.as_slice().iter().zip(via_t.as_slice()) {
            assert!((x - y).abs() < 1e-12);
        }
        let c = Matrix::from_vec(3, 6, (0..18).map(|v| (v as f64).cos()).collect()).unwrap();
        let tn = a.matmul_tn(&c).unwrap();
        let via_t = a.transpose().matmul(&c).unwrap();
        for (x, y) in tn.as_slice().iter().zip(via_t.as_slice()) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn sigmoid_fixed_points() {
        let x = Matrix::from_rows(&[&[0.0, 1.0, -745.0]]).unwrap();
        let s = sigmoid(&x);
        assert_eq!(s.get(0, 0), 0.5);
        assert!((s.get(0, 1) - 0.7310585786).abs() < 1e-9);
        let tail = s.get(0, 2);
        assert!((0.0..=1e-300).contains(&tail) && !tail.is_nan());
    }
}
