use std::ops::{Add, Mul, Sub};

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C64 = Complex64;

#[inline]
pub(crate) fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Square complex matrix of a small quantum object.
///
/// Serialized as `{"dim": n, "entries": [[re, im], ...]}` with entries in
/// row-major order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MatrixRepr", into = "MatrixRepr")]
pub struct ComplexMatrix(DMatrix<C64>);

#[derive(Serialize, Deserialize)]
struct MatrixRepr {
    dim: usize,
    entries: Vec<[f64; 2]>,
}

impl From<ComplexMatrix> for MatrixRepr {
    fn from(m: ComplexMatrix) -> Self {
        let dim = m.dim();
        let mut entries = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                let z = m.0[(i, j)];
                entries.push([z.re, z.im]);
            }
        }
        MatrixRepr { dim, entries }
    }
}

impl TryFrom<MatrixRepr> for ComplexMatrix {
    type Error = Error;

    fn try_from(r: MatrixRepr) -> Result<Self> {
        if r.dim == 0 {
            return Err(Error::OutOfRange("matrix dimension must be at least 1".into()));
        }
        if r.entries.len() != r.dim * r.dim {
            return Err(Error::DimensionMismatch {
                expected: r.dim * r.dim,
                found: r.entries.len(),
            });
        }
        if r.entries.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::OutOfRange("matrix entries must be finite".into()));
        }
        Ok(ComplexMatrix(DMatrix::from_row_iterator(
            r.dim,
            r.dim,
            r.entries.iter().map(|e| c(e[0], e[1])),
        )))
    }
}

impl ComplexMatrix {
    pub fn zeros(dim: usize) -> Self {
        ComplexMatrix(DMatrix::zeros(dim, dim))
    }

    pub fn identity(dim: usize) -> Self {
        ComplexMatrix(DMatrix::identity(dim, dim))
    }

    /// Builds a matrix from row-major entries. Panics if `entries.len() != dim²`.
    pub fn from_row_slice(dim: usize, entries: &[C64]) -> Self {
        ComplexMatrix(DMatrix::from_row_slice(dim, dim, entries))
    }

    pub fn from_real_rows(dim: usize, entries: &[f64]) -> Self {
        ComplexMatrix(DMatrix::from_row_iterator(
            dim,
            dim,
            entries.iter().map(|&v| c(v, 0.0)),
        ))
    }

    pub fn diag(values: &[f64]) -> Self {
        let n = values.len();
        let mut m = DMatrix::zeros(n, n);
        for (i, &v) in values.iter().enumerate() {
            m[(i, i)] = c(v, 0.0);
        }
        ComplexMatrix(m)
    }

    pub fn from_inner(m: DMatrix<C64>) -> Self {
        assert_eq!(m.nrows(), m.ncols(), "complex matrix must be square");
        ComplexMatrix(m)
    }

    pub fn inner(&self) -> &DMatrix<C64> {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.0[(i, j)]
    }

    pub fn adjoint(&self) -> Self {
        ComplexMatrix(self.0.adjoint())
    }

    pub fn trace(&self) -> C64 {
        self.0.trace()
    }

    pub fn scale(&self, s: f64) -> Self {
        ComplexMatrix(self.0.map(|z| z * s))
    }

    /// `Tr[self · other]` without forming the product.
    pub fn trace_product(&self, other: &ComplexMatrix) -> C64 {
        let n = self.dim();
        let mut acc = c(0.0, 0.0);
        for i in 0..n {
            for k in 0..n {
                acc += self.0[(i, k)] * other.0[(k, i)];
            }
        }
        acc
    }

    /// `K · self · K†`.
    pub fn sandwich(&self, k: &ComplexMatrix) -> Self {
        ComplexMatrix(&k.0 * &self.0 * k.0.adjoint())
    }

    /// Kronecker product `self ⊗ other`.
    pub fn tensor(&self, other: &ComplexMatrix) -> Self {
        ComplexMatrix(self.0.kronecker(&other.0))
    }

    pub fn max_abs_diff(&self, other: &ComplexMatrix) -> f64 {
        assert_eq!(self.dim(), other.dim());
        self.0
            .iter()
            .zip(other.0.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn hermiticity_defect(&self) -> f64 {
        let n = self.dim();
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in i..n {
                worst = worst.max((self.0[(i, j)] - self.0[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_defect() <= tol
    }

    /// Eigenvalues of the Hermitian part, ascending. Dimension 2 uses the
    /// closed-form discriminant; larger dimensions use a Hermitian eigensolver.
    pub fn hermitian_eigenvalues(&self) -> Vec<f64> {
        let n = self.dim();
        if n == 1 {
            return vec![self.0[(0, 0)].re];
        }
        if n == 2 {
            let a = self.0[(0, 0)].re;
            let d = self.0[(1, 1)].re;
            let b = (self.0[(0, 1)] + self.0[(1, 0)].conj()) * 0.5;
            let mean = 0.5 * (a + d);
            let radius = (0.25 * (a - d) * (a - d) + b.norm_sqr()).sqrt();
            return vec![mean - radius, mean + radius];
        }
        let herm = (&self.0 + self.0.adjoint()) * c(0.5, 0.0);
        let mut ev: Vec<f64> = herm.symmetric_eigenvalues().iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        ev
    }

    /// Eigen-decomposition of the Hermitian part: ascending eigenvalues with
    /// matching eigenvector columns.
    pub fn hermitian_eigen(&self) -> (Vec<f64>, Vec<Vec<C64>>) {
        let herm = (&self.0 + self.0.adjoint()) * c(0.5, 0.0);
        let eig = SymmetricEigen::new(herm);
        let mut order: Vec<usize> = (0..self.dim()).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
        let vectors = order
            .iter()
            .map(|&i| eig.eigenvectors.column(i).iter().copied().collect())
            .collect();
        (values, vectors)
    }

    /// Operator norm of a Hermitian matrix (largest absolute eigenvalue).
    pub fn hermitian_op_norm(&self) -> f64 {
        self.hermitian_eigenvalues()
            .into_iter()
            .map(f64::abs)
            .fold(0.0, f64::max)
    }

    /// Real coordinates of a Hermitian matrix in an orthonormal basis of the
    /// real vector space of Hermitian matrices (Frobenius inner product).
    pub fn hermitian_coords(&self) -> Vec<f64> {
        let n = self.dim();
        let mut v = Vec::with_capacity(n * n);
        let s2 = std::f64::consts::SQRT_2;
        for i in 0..n {
            v.push(self.0[(i, i)].re);
        }
        for i in 0..n {
            for j in (i + 1)..n {
                let z = self.0[(i, j)];
                v.push(s2 * z.re);
                v.push(s2 * z.im);
            }
        }
        v
    }

    /// Inverse of [`ComplexMatrix::hermitian_coords`].
    pub fn from_hermitian_coords(dim: usize, v: &[f64]) -> Self {
        assert_eq!(v.len(), dim * dim, "need dim² coordinates");
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let mut m = DMatrix::zeros(dim, dim);
        for i in 0..dim {
            m[(i, i)] = c(v[i], 0.0);
        }
        let mut k = dim;
        for i in 0..dim {
            for j in (i + 1)..dim {
                let z = c(s * v[k], s * v[k + 1]);
                m[(i, j)] = z;
                m[(j, i)] = z.conj();
                k += 2;
            }
        }
        ComplexMatrix(m)
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(&self.0 + &rhs.0)
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(&self.0 - &rhs.0)
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(&self.0 * &rhs.0)
    }
}

pub fn sigma_x() -> ComplexMatrix {
    ComplexMatrix::from_real_rows(2, &[0.0, 1.0, 1.0, 0.0])
}

pub fn sigma_y() -> ComplexMatrix {
    ComplexMatrix::from_row_slice(2, &[c(0.0, 0.0), c(0.0, -1.0), c(0.0, 1.0), c(0.0, 0.0)])
}

pub fn sigma_z() -> ComplexMatrix {
    ComplexMatrix::from_real_rows(2, &[1.0, 0.0, 0.0, -1.0])
}

/// Kronecker product of two matrices.
pub fn tensor(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a.tensor(b)
}

/// Kronecker product of a list of matrices, left to right.
pub fn tensor_all<'a, I>(factors: I) -> ComplexMatrix
where
    I: IntoIterator<Item = &'a ComplexMatrix>,
{
    factors
        .into_iter()
        .fold(ComplexMatrix::identity(1), |acc, f| acc.tensor(f))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_tensor_identity_is_identity() {
        let i4 = tensor(&ComplexMatrix::identity(2), &ComplexMatrix::identity(2));
        assert_eq!(i4, ComplexMatrix::identity(4));
    }

    #[test]
    fn computational_projectors_tensor() {
        let p0 = ComplexMatrix::diag(&[1.0, 0.0]);
        let p1 = ComplexMatrix::diag(&[0.0, 1.0]);
        assert_eq!(tensor(&p0, &p1), ComplexMatrix::diag(&[0.0, 1.0, 0.0, 0.0]));
    }

    #[test]
    fn kronecker_matches_index_formula() {
        let a = sigma_x();
        let b = sigma_z();
        let k = tensor(&a, &b);
        for i in 0..4 {
            for j in 0..4 {
                let expect = a.get(i / 2, j / 2) * b.get(i % 2, j % 2);
                assert_eq!(k.get(i, j), expect);
            }
        }
        let y = sigma_y();
        let k = tensor(&y, &a);
        for i in 0..4 {
            for j in 0..4 {
                assert_eq!(k.get(i, j), y.get(i / 2, j / 2) * a.get(i % 2, j % 2));
            }
        }
    }

    #[test]
    fn two_by_two_eigen_closed_form_agrees_with_solver() {
        let m = ComplexMatrix::from_row_slice(
            2,
            &[c(0.3, 0.0), c(0.1, -0.2), c(0.1, 0.2), c(-0.4, 0.0)],
        );
        let closed = m.hermitian_eigenvalues();
        let (solver, _) = m.hermitian_eigen();
        for (a, b) in closed.iter().zip(&solver) {
            assert!((a - b).abs() < 1e-13);
        }
    }

    #[test]
    fn serde_round_trip_uses_row_major_pairs() {
        let m = sigma_y();
        let json = serde_json::to_value(&m).unwrap();
        assert_eq!(json["dim"], 2);
        assert_eq!(json["entries"][1], serde_json::json!([0.0, -1.0]));
        let back: ComplexMatrix = serde_json::from_value(json).unwrap();
        assert_eq!(back, m);
    }

    #[test]
    fn hermitian_coords_invert() {
        let m = ComplexMatrix::from_row_slice(
            2,
            &[c(0.3, 0.0), c(0.1, -0.2), c(0.1, 0.2), c(-0.4, 0.0)],
        );
        let back = ComplexMatrix::from_hermitian_coords(2, &m.hermitian_coords());
        assert!(back.max_abs_diff(&m) < 1e-15);
        // Frobenius inner products are preserved.
        let v = m.hermitian_coords();
        let norm2: f64 = v.iter().map(|x| x * x).sum();
        assert!((norm2 - m.trace_product(&m).re).abs() < 1e-15);
    }

    #[test]
    fn serde_rejects_wrong_entry_count() {
        let bad = serde_json::json!({"dim": 2, "entries": [[1.0, 0.0]]});
        assert!(serde_json::from_value::<ComplexMatrix>(bad).is_err());
    }
}
