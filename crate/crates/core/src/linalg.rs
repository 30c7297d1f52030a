//! Dense complex linear algebra shared by every module.
//!
//! Functions of hermitian matrices (exponential, logarithm, square root) go
//! through [`HermitianEigen`]; non-hermitian input is rejected rather than
//! handed to a power series.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

pub const I: C64 = C64::new(0.0, 1.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const ZERO: C64 = C64::new(0.0, 0.0);

#[inline]
pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Build a complex matrix from rows of `(re, im)` pairs.
pub fn from_rows(rows: &[&[(f64, f64)]]) -> CMatrix {
    let n = rows.len();
    let m = rows.first().map_or(0, |r| r.len());
    CMatrix::from_fn(n, m, |i, j| c(rows[i][j].0, rows[i][j].1))
}

pub fn real_diag(values: &[f64]) -> CMatrix {
    CMatrix::from_diagonal(&CVector::from_iterator(
        values.len(),
        values.iter().map(|&x| c(x, 0.0)),
    ))
}

/// Conjugate-linear in the first slot.
#[inline]
pub fn inner(a: &CVector, b: &CVector) -> C64 {
    a.dotc(b)
}

pub fn frobenius(m: &CMatrix) -> f64 {
    m.norm()
}

pub fn hermitian_residual(m: &CMatrix) -> f64 {
    if !m.is_square() {
        return f64::INFINITY;
    }
    (m - m.adjoint()).norm()
}

pub fn identity_residual(m: &CMatrix) -> f64 {
    (m - CMatrix::identity(m.nrows(), m.ncols())).norm()
}

pub fn commutator(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a * b - b * a
}

pub fn anticommutator(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a * b + b * a
}

pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

pub fn outer(a: &CVector, b: &CVector) -> CMatrix {
    a * b.adjoint()
}

pub fn trace(m: &CMatrix) -> C64 {
    m.trace()
}

/// Eigendecomposition of a hermitian matrix with eigenvalues in ascending order.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    /// Eigenvectors as columns, matching `values`.
    pub vectors: CMatrix,
}

impl HermitianEigen {
    /// Decomposes the hermitian part of `m`. Callers that need to reject
    /// non-hermitian input use [`HermitianEigen::checked`].
    pub fn new(m: &CMatrix) -> Self {
        let n = m.nrows();
        if n == 0 {
            return Self { values: Vec::new(), vectors: CMatrix::zeros(0, 0) };
        }
        let sym = (m + m.adjoint()).scale(0.5);
        let eig = SymmetricEigen::new(sym);
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
        let vectors = CMatrix::from_fn(n, n, |i, j| eig.eigenvectors[(i, order[j])]);
        Self { values, vectors }
    }

    pub fn checked(m: &CMatrix, tol: f64) -> Result<Self> {
        let r = hermitian_residual(m);
        if r > tol {
            return Err(Error::NotHermitian(r));
        }
        Ok(Self::new(m))
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn vector(&self, k: usize) -> CVector {
        self.vectors.column(k).into_owned()
    }

    /// `V diag(f(λ)) V*` for a real function.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> CMatrix {
        self.map_complex(|x| c(f(x), 0.0))
    }

    /// `V diag(f(λ)) V*` for a complex-valued function.
    pub fn map_complex(&self, f: impl Fn(f64) -> C64) -> CMatrix {
        let n = self.dim();
        let mut scaled = self.vectors.clone();
        for j in 0..n {
            let w = f(self.values[j]);
            for i in 0..n {
                scaled[(i, j)] *= w;
            }
        }
        scaled * self.vectors.adjoint()
    }

    pub fn min(&self) -> f64 {
        self.values.first().copied().unwrap_or(0.0)
    }

    pub fn max(&self) -> f64 {
        self.values.last().copied().unwrap_or(0.0)
    }
}

/// `exp(-i t h)` for hermitian `h`.
pub fn unitary_flow(eig: &HermitianEigen, t: f64) -> CMatrix {
    eig.map_complex(|e| C64::from_polar(1.0, -t * e))
}

/// Hermitian square root with eigenvalues clamped at zero.
pub fn sqrt_psd(m: &CMatrix) -> CMatrix {
    HermitianEigen::new(m).map(|x| x.max(0.0).sqrt())
}
