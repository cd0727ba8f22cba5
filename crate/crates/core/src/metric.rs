//! Inner products on a Lie algebra.
//!
//! A left-invariant Riemannian metric is fixed by its value at the identity,
//! so the whole metric is one symmetric positive-definite Gram matrix in the
//! chosen basis of the algebra.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn, SymmetricEigen};

use crate::error::{GeometryError, Result};
use crate::tolerance;
use crate::AlgebraVector;

/// Symmetric positive-definite Gram matrix, `gram[(i, j)] = <b_i, b_j>`.
#[derive(Debug, Clone)]
pub struct Metric {
    gram: DMatrix<f64>,
    factor: Cholesky<f64, Dyn>,
}

impl Metric {
    /// Validates and factors a Gram matrix. Entries that differ from their
    /// transpose by more than roundoff are rejected; the rest is symmetrized.
    pub fn new(gram: DMatrix<f64>) -> Result<Self> {
        let n = gram.nrows();
        if n == 0 {
            return Err(GeometryError::EmptyAlgebra);
        }
        if gram.ncols() != n {
            return Err(GeometryError::DimensionMismatch {
                expected: n,
                found: gram.ncols(),
            });
        }
        if gram.iter().any(|x| !x.is_finite()) {
            return Err(GeometryError::SingularMetric);
        }
        let scale = gram.amax().max(1.0);
        for i in 0..n {
            for j in (i + 1)..n {
                let gap = (gram[(i, j)] - gram[(j, i)]).abs();
                if gap > 1e-12 * scale {
                    return Err(GeometryError::AsymmetricGram {
                        row: i + 1,
                        col: j + 1,
                        gap,
                    });
                }
            }
        }
        let gram = (&gram + gram.transpose()) * 0.5;
        let lowest = SymmetricEigen::new(gram.clone()).eigenvalues.min();
        if lowest <= tolerance::POSITIVE_DEFINITE {
            return Err(GeometryError::SingularMetric);
        }
        let factor = Cholesky::new(gram.clone()).ok_or(GeometryError::SingularMetric)?;
        Ok(Self { gram, factor })
    }

    pub fn identity(dim: usize) -> Result<Self> {
        Self::new(DMatrix::identity(dim, dim))
    }

    /// `lambda^2` times the identity: every basis vector has length `lambda`
    /// and the basis is orthogonal.
    pub fn scaled_identity(dim: usize, lambda: f64) -> Result<Self> {
        if !(lambda.is_finite() && lambda > 0.0) {
            return Err(GeometryError::ParamOutOfRange(format!(
                "lambda must be positive, got {lambda}"
            )));
        }
        Self::new(DMatrix::identity(dim, dim) * (lambda * lambda))
    }

    pub fn dim(&self) -> usize {
        self.gram.nrows()
    }

    pub fn gram(&self) -> &DMatrix<f64> {
        &self.gram
    }

    pub fn max_abs(&self) -> f64 {
        self.gram.amax()
    }

    pub fn check(&self, v: &AlgebraVector) -> Result<()> {
        if v.len() != self.dim() {
            return Err(GeometryError::DimensionMismatch {
                expected: self.dim(),
                found: v.len(),
            });
        }
        Ok(())
    }

    pub fn inner(&self, u: &AlgebraVector, v: &AlgebraVector) -> f64 {
        u.dot(&(&self.gram * v))
    }

    pub fn norm(&self, u: &AlgebraVector) -> f64 {
        self.inner(u, u).max(0.0).sqrt()
    }

    /// Lowers an index: the covector `<v, .>` in coordinates.
    pub fn lower(&self, v: &AlgebraVector) -> AlgebraVector {
        &self.gram * v
    }

    /// Raises an index: solves `G x = rhs` with the stored factorization.
    pub fn raise(&self, rhs: &AlgebraVector) -> AlgebraVector {
        self.factor.solve(rhs)
    }

    /// Columns form a g-orthonormal basis; the matrix is upper triangular
    /// with positive diagonal, so the basis keeps the input orientation.
    pub fn orthonormal_frame(&self) -> DMatrix<f64> {
        let l = self.factor.l();
        let n = self.dim();
        // E = L^{-T}
        let l_inv = l
            .solve_lower_triangular(&DMatrix::identity(n, n))
            .expect("Cholesky factor has positive diagonal");
        l_inv.transpose()
    }

    /// Modified Gram-Schmidt in this metric. Vectors whose residual norm falls
    /// below `drop_below` times their original norm are discarded.
    pub fn gram_schmidt(&self, vectors: &[AlgebraVector], drop_below: f64) -> Vec<AlgebraVector> {
        let mut out: Vec<AlgebraVector> = Vec::with_capacity(vectors.len());
        for v in vectors {
            let original = self.norm(v);
            if original == 0.0 {
                continue;
            }
            let mut w = v.clone();
            for q in &out {
                let p = self.inner(q, &w);
                w.axpy(-p, q, 1.0);
            }
            let len = self.norm(&w);
            if len > drop_below * original {
                out.push(w / len);
            }
        }
        out
    }

    /// `E^T G E` minus the identity, as a max-abs defect.
    pub fn orthonormality_defect(&self, frame: &DMatrix<f64>) -> f64 {
        let n = frame.ncols();
        let m = frame.transpose() * &self.gram * frame;
        (m - DMatrix::<f64>::identity(n, n)).amax()
    }
}

pub(crate) fn zeros(n: usize) -> AlgebraVector {
    DVector::zeros(n)
}
