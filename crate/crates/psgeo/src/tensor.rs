//! Small dense linear algebra over an arbitrary scalar.
//!
//! Everything here is desk-scale (dimensions at most 64): dense matrices and
//! vectors generic over [`Scalar`], determinants, Gaussian-elimination
//! inverses with partial pivoting, the Levi-Civita symbol, a cyclic Jacobi
//! eigensolver for real symmetric matrices, and Gram-Schmidt under an
//! arbitrary metric inner product.

use crate::jet::Scalar;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum TensorError {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("matrix is singular (pivot magnitude {pivot:.3e} below {threshold:.3e})")]
    Singular { pivot: f64, threshold: f64 },
    #[error("levi_civita index {index} out of range 1..={m}")]
    IndexOutOfRange { index: usize, m: usize },
    #[error("matrix not symmetric: |a[{i}][{j}] - a[{j}][{i}]| = {dev:.3e}")]
    NotSymmetric { i: usize, j: usize, dev: f64 },
    #[error("Jacobi eigensolver did not converge in {sweeps} sweeps (off-diagonal residual {residual:.3e})")]
    NoConvergence { sweeps: usize, residual: f64 },
    #[error("non-positive norm {norm:.3e} encountered in Gram-Schmidt (indefinite metric?)")]
    NonPositiveNorm { norm: f64 },
}

/// Dense matrix with immutable dimensions.
#[derive(Debug, Clone, PartialEq)]
pub struct Mat<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

/// Dense vector with immutable dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct DVec<T> {
    data: Vec<T>,
}

impl<T: Scalar> Mat<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows >= 1 && cols >= 1 && rows <= 64 && cols <= 64);
        Mat {
            rows,
            cols,
            data: vec![T::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Mat::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut m = Mat::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn transpose(&self) -> Mat<T> {
        Mat::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn matmul(&self, other: &Mat<T>) -> Mat<T> {
        assert_eq!(self.cols, other.rows, "matmul dimension mismatch");
        Mat::from_fn(self.rows, other.cols, |i, j| {
            let mut acc = T::zero();
            for k in 0..self.cols {
                acc = acc + self[(i, k)] * other[(k, j)];
            }
            acc
        })
    }

    pub fn apply(&self, v: &DVec<T>) -> DVec<T> {
        assert_eq!(self.cols, v.dim(), "apply dimension mismatch");
        DVec::from_fn(self.rows, |i| {
            let mut acc = T::zero();
            for k in 0..self.cols {
                acc = acc + self[(i, k)] * v[k];
            }
            acc
        })
    }

    pub fn scale(&self, s: T) -> Mat<T> {
        Mat::from_fn(self.rows, self.cols, |i, j| self[(i, j)] * s)
    }

    pub fn add(&self, other: &Mat<T>) -> Mat<T> {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Mat::from_fn(self.rows, self.cols, |i, j| self[(i, j)] + other[(i, j)])
    }

    pub fn sub(&self, other: &Mat<T>) -> Mat<T> {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Mat::from_fn(self.rows, self.cols, |i, j| self[(i, j)] - other[(i, j)])
    }

    pub fn trace(&self) -> T {
        assert_eq!(self.rows, self.cols);
        let mut acc = T::zero();
        for i in 0..self.rows {
            acc = acc + self[(i, i)];
        }
        acc
    }

    pub fn det(&self) -> T {
        assert_eq!(self.rows, self.cols, "det requires a square matrix");
        match self.rows {
            1 => self[(0, 0)],
            2 => self[(0, 0)] * self[(1, 1)] - self[(0, 1)] * self[(1, 0)],
            3 => {
                self[(0, 0)] * (self[(1, 1)] * self[(2, 2)] - self[(1, 2)] * self[(2, 1)])
                    - self[(0, 1)] * (self[(1, 0)] * self[(2, 2)] - self[(1, 2)] * self[(2, 0)])
                    + self[(0, 2)] * (self[(1, 0)] * self[(2, 1)] - self[(1, 1)] * self[(2, 0)])
            }
            n => panic!("det implemented for dims 1..=3, got {n}"),
        }
    }

    /// Inverse by Gauss-Jordan elimination with partial pivoting on the value
    /// slot. Dimensions up to 8.
    pub fn inverse(&self) -> Result<Mat<T>, TensorError> {
        let n = self.rows;
        if n != self.cols {
            return Err(TensorError::Dimension(format!(
                "inverse of {}x{} matrix",
                self.rows, self.cols
            )));
        }
        assert!(n <= 8, "inverse implemented for dims <= 8");
        // scale = largest entry magnitude, for the singularity threshold
        let mut scale = 0.0f64;
        for e in &self.data {
            scale = scale.max(e.value().abs());
        }
        let threshold = 1e-13 * scale.max(1.0);

        let mut a = self.clone();
        let mut inv = Mat::<T>::identity(n);
        for col in 0..n {
            let mut pivot_row = col;
            let mut pivot_mag = a[(col, col)].value().abs();
            for r in col + 1..n {
                let mag = a[(r, col)].value().abs();
                if mag > pivot_mag {
                    pivot_mag = mag;
                    pivot_row = r;
                }
            }
            if pivot_mag < threshold {
                return Err(TensorError::Singular {
                    pivot: pivot_mag,
                    threshold,
                });
            }
            if pivot_row != col {
                for j in 0..n {
                    a.data.swap(col * n + j, pivot_row * n + j);
                    inv.data.swap(col * n + j, pivot_row * n + j);
                }
            }
            let pivot = a[(col, col)];
            for j in 0..n {
                a[(col, j)] = a[(col, j)] / pivot;
                inv[(col, j)] = inv[(col, j)] / pivot;
            }
            for r in 0..n {
                if r == col {
                    continue;
                }
                let factor = a[(r, col)];
                for j in 0..n {
                    a[(r, j)] = a[(r, j)] - factor * a[(col, j)];
                    inv[(r, j)] = inv[(r, j)] - factor * inv[(col, j)];
                }
            }
        }
        Ok(inv)
    }

    /// Map every entry to its value slot.
    pub fn values(&self) -> Mat<f64> {
        Mat::from_fn(self.rows, self.cols, |i, j| self[(i, j)].value())
    }
}

impl<T> std::ops::Index<(usize, usize)> for Mat<T> {
    type Output = T;
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.cols + j]
    }
}

impl<T> std::ops::IndexMut<(usize, usize)> for Mat<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.cols + j]
    }
}

impl<T: Scalar> DVec<T> {
    pub fn zeros(dim: usize) -> Self {
        DVec {
            data: vec![T::zero(); dim],
        }
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize) -> T) -> Self {
        DVec {
            data: (0..dim).map(&mut f).collect(),
        }
    }

    pub fn from_vec(data: Vec<T>) -> Self {
        DVec { data }
    }

    pub fn dim(&self) -> usize {
        self.data.len()
    }

    pub fn add(&self, o: &DVec<T>) -> DVec<T> {
        DVec::from_fn(self.dim(), |i| self[i] + o[i])
    }

    pub fn sub(&self, o: &DVec<T>) -> DVec<T> {
        DVec::from_fn(self.dim(), |i| self[i] - o[i])
    }

    pub fn scale(&self, s: T) -> DVec<T> {
        DVec::from_fn(self.dim(), |i| self[i] * s)
    }

    pub fn values(&self) -> DVec<f64> {
        DVec::from_fn(self.dim(), |i| self[i].value())
    }

    pub fn iter(&self) -> std::slice::Iter<'_, T> {
        self.data.iter()
    }
}

impl DVec<f64> {
    pub fn norm(&self) -> f64 {
        self.data.iter().map(|x| x * x).sum::<f64>().sqrt()
    }
}

impl<T> std::ops::Index<usize> for DVec<T> {
    type Output = T;
    fn index(&self, i: usize) -> &T {
        &self.data[i]
    }
}

impl<T> std::ops::IndexMut<usize> for DVec<T> {
    fn index_mut(&mut self, i: usize) -> &mut T {
        &mut self.data[i]
    }
}

/// Metric inner product g_ij a^i b^j.
pub fn metric_dot<T: Scalar>(g: &Mat<T>, a: &DVec<T>, b: &DVec<T>) -> T {
    let n = a.dim();
    let mut acc = T::zero();
    for i in 0..n {
        for j in 0..n {
            acc = acc + g[(i, j)] * a[i] * b[j];
        }
    }
    acc
}

/// Sign of the permutation given by 1-based `indices`; 0 on any repetition.
pub fn levi_civita(indices: &[usize], m: usize) -> Result<i32, TensorError> {
    for &ix in indices {
        if ix < 1 || ix > m {
            return Err(TensorError::IndexOutOfRange { index: ix, m });
        }
    }
    let n = indices.len();
    let mut sign = 1i32;
    for i in 0..n {
        for j in i + 1..n {
            if indices[i] == indices[j] {
                return Ok(0);
            }
            if indices[i] > indices[j] {
                sign = -sign;
            }
        }
    }
    Ok(sign)
}

/// Eigen-decomposition of a real symmetric matrix by cyclic Jacobi rotations.
///
/// Eigenvalues are sorted descending; eigenvector signs are fixed by making
/// the largest-magnitude component positive, so output is deterministic.
pub fn sym_eigen(a: &Mat<f64>, tol: f64) -> Result<(DVec<f64>, Mat<f64>), TensorError> {
    let n = a.rows();
    if n != a.cols() {
        return Err(TensorError::Dimension(format!(
            "sym_eigen of {}x{} matrix",
            a.rows(),
            a.cols()
        )));
    }
    let mut norm = 0.0f64;
    for e in &a.data {
        norm = norm.max(e.abs());
    }
    for i in 0..n {
        for j in i + 1..n {
            let dev = (a[(i, j)] - a[(j, i)]).abs();
            if dev > 1e-12 * norm.max(1.0) {
                return Err(TensorError::NotSymmetric { i, j, dev });
            }
        }
    }

    let mut m = a.clone();
    // symmetrize roundoff
    for i in 0..n {
        for j in i + 1..n {
            let avg = 0.5 * (m[(i, j)] + m[(j, i)]);
            m[(i, j)] = avg;
            m[(j, i)] = avg;
        }
    }
    let mut v = Mat::<f64>::identity(n);
    let max_sweeps = 100;
    let off = |m: &Mat<f64>| -> f64 {
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    s += m[(i, j)] * m[(i, j)];
                }
            }
        }
        s.sqrt()
    };
    let mut converged = false;
    for _ in 0..max_sweeps {
        if off(&m) <= tol * norm.max(1.0) {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = m[(p, q)];
                if apq.abs() <= 1e-300 {
                    continue;
                }
                let app = m[(p, p)];
                let aqq = m[(q, q)];
                let theta = (aqq - app) / (2.0 * apq);
                let t = if theta >= 0.0 {
                    1.0 / (theta + (1.0 + theta * theta).sqrt())
                } else {
                    -1.0 / (-theta + (1.0 + theta * theta).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                for k in 0..n {
                    let mkp = m[(k, p)];
                    let mkq = m[(k, q)];
                    m[(k, p)] = c * mkp - s * mkq;
                    m[(k, q)] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let mpk = m[(p, k)];
                    let mqk = m[(q, k)];
                    m[(p, k)] = c * mpk - s * mqk;
                    m[(q, k)] = s * mpk + c * mqk;
                }
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }
    if !converged && off(&m) > tol * norm.max(1.0) {
        return Err(TensorError::NoConvergence {
            sweeps: max_sweeps,
            residual: off(&m),
        });
    }

    let mut order: Vec<usize> = (0..n).collect();
    // stable sort by descending eigenvalue keeps ties deterministic
    order.sort_by(|&i, &j| m[(j, j)].partial_cmp(&m[(i, i)]).unwrap());
    let eigenvalues = DVec::from_fn(n, |k| m[(order[k], order[k])]);
    let mut eigenvectors = Mat::from_fn(n, n, |i, k| v[(i, order[k])]);
    for k in 0..n {
        let mut imax = 0;
        let mut vmax = 0.0f64;
        for i in 0..n {
            if eigenvectors[(i, k)].abs() > vmax {
                vmax = eigenvectors[(i, k)].abs();
                imax = i;
            }
        }
        if eigenvectors[(imax, k)] < 0.0 {
            for i in 0..n {
                eigenvectors[(i, k)] = -eigenvectors[(i, k)];
            }
        }
    }
    Ok((eigenvalues, eigenvectors))
}

/// Gram-Schmidt orthonormalization under the inner product given by `g`.
///
/// Vectors whose residual g-norm after projecting out earlier outputs falls
/// below `drop_tol` are skipped. Processing order equals input order.
pub fn gram_schmidt<T: Scalar>(
    vectors: &[DVec<T>],
    g: &Mat<T>,
    drop_tol: f64,
) -> Result<Vec<DVec<T>>, TensorError> {
    let mut out: Vec<DVec<T>> = Vec::new();
    for v in vectors {
        let mut w = v.clone();
        // two projection passes: a nearly dependent input leaves a tiny
        // residual whose normalization would otherwise amplify the
        // orthogonality error of a single pass
        for _ in 0..2 {
            for u in &out {
                let proj = metric_dot(g, u, &w);
                w = w.sub(&u.scale(proj));
            }
        }
        let norm_sq = metric_dot(g, &w, &w).value();
        if norm_sq < 0.0 && norm_sq.abs() > drop_tol * drop_tol {
            return Err(TensorError::NonPositiveNorm { norm: norm_sq });
        }
        if norm_sq.max(0.0).sqrt() < drop_tol {
            continue;
        }
        let norm_sq_t = metric_dot(g, &w, &w);
        out.push(w.scale(T::one() / norm_sq_t.sqrt()));
    }
    Ok(out)
}
