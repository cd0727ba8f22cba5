//! Real Lie algebras given by structure constants.
//!
//! `c[i][j][k]` is the `k`-th coordinate of `[b_i, b_j]`. Storage is dense
//! and the tensor is antisymmetrized in `(i, j)` on construction, so
//! `bracket(u, v) == -bracket(v, u)` holds exactly.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::Serialize;

use crate::error::{GeometryError, Result};
use crate::metric::Metric;
use crate::tolerance;
use crate::AlgebraVector;

#[derive(Debug, Clone, PartialEq)]
pub struct LieAlgebra {
    dim: usize,
    c: Vec<f64>,
}

impl LieAlgebra {
    /// Builds an algebra from a dense `dim^3` tensor in `[i][j][k]` order.
    pub fn new(dim: usize, constants: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(GeometryError::EmptyAlgebra);
        }
        if constants.len() != dim * dim * dim {
            return Err(GeometryError::DimensionMismatch {
                expected: dim * dim * dim,
                found: constants.len(),
            });
        }
        if constants.iter().any(|x| !x.is_finite()) {
            return Err(GeometryError::NumericalFailure("non-finite structure constant".into()));
        }
        let mut c = vec![0.0; constants.len()];
        for i in 0..dim {
            for j in 0..dim {
                for k in 0..dim {
                    let ijk = (i * dim + j) * dim + k;
                    let jik = (j * dim + i) * dim + k;
                    c[ijk] = 0.5 * (constants[ijk] - constants[jik]);
                }
            }
        }
        Ok(Self { dim, c })
    }

    /// Builds an algebra from a list of brackets `[b_i, b_j] = coeffs`
    /// (0-based indices). Unlisted pairs commute.
    pub fn from_brackets(dim: usize, brackets: &[(usize, usize, Vec<f64>)]) -> Result<Self> {
        if dim == 0 {
            return Err(GeometryError::EmptyAlgebra);
        }
        let mut c = vec![0.0; dim * dim * dim];
        let mut seen = vec![false; dim * dim];
        for (i, j, coeffs) in brackets {
            let (i, j) = (*i, *j);
            if i >= dim || j >= dim {
                return Err(GeometryError::ParamOutOfRange(format!(
                    "bracket index ({}, {}) outside 1..={dim}",
                    i + 1,
                    j + 1
                )));
            }
            if coeffs.len() != dim {
                return Err(GeometryError::DimensionMismatch {
                    expected: dim,
                    found: coeffs.len(),
                });
            }
            if i == j {
                if coeffs.iter().any(|&x| x != 0.0) {
                    return Err(GeometryError::ParamOutOfRange(format!(
                        "bracket [b{0}, b{0}] must vanish",
                        i + 1
                    )));
                }
                continue;
            }
            if seen[i * dim + j] {
                return Err(GeometryError::ParamOutOfRange(format!(
                    "bracket of (b{}, b{}) declared twice",
                    i + 1,
                    j + 1
                )));
            }
            seen[i * dim + j] = true;
            seen[j * dim + i] = true;
            for (k, &v) in coeffs.iter().enumerate() {
                c[(i * dim + j) * dim + k] = v;
                c[(j * dim + i) * dim + k] = -v;
            }
        }
        Self::new(dim, c)
    }

    pub fn abelian(dim: usize) -> Result<Self> {
        Self::new(dim, vec![0.0; dim * dim * dim])
    }

    /// The diagonal form `[x,y] = c3 z`, `[y,z] = c1 x`, `[z,x] = c2 y`.
    pub fn milnor_form(c1: f64, c2: f64, c3: f64) -> Result<Self> {
        Self::from_brackets(
            3,
            &[
                (0, 1, vec![0.0, 0.0, c3]),
                (1, 2, vec![c1, 0.0, 0.0]),
                (2, 0, vec![0.0, c2, 0.0]),
            ],
        )
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn constant(&self, i: usize, j: usize, k: usize) -> f64 {
        self.c[(i * self.dim + j) * self.dim + k]
    }

    pub fn constants(&self) -> &[f64] {
        &self.c
    }

    pub fn max_abs(&self) -> f64 {
        self.c.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    pub fn check(&self, v: &AlgebraVector) -> Result<()> {
        if v.len() != self.dim {
            return Err(GeometryError::DimensionMismatch {
                expected: self.dim,
                found: v.len(),
            });
        }
        Ok(())
    }

    /// `[b_i, b_j]` in coordinates.
    pub fn basis_bracket(&self, i: usize, j: usize) -> AlgebraVector {
        let n = self.dim;
        let start = (i * n + j) * n;
        DVector::from_column_slice(&self.c[start..start + n])
    }

    pub fn bracket(&self, u: &AlgebraVector, v: &AlgebraVector) -> Result<AlgebraVector> {
        self.check(u)?;
        self.check(v)?;
        Ok(self.bracket_unchecked(u, v))
    }

    /// Sums `(u_i v_j - u_j v_i) [b_i, b_j]` over `i < j`, so swapping the
    /// arguments negates every term exactly.
    pub(crate) fn bracket_unchecked(&self, u: &AlgebraVector, v: &AlgebraVector) -> AlgebraVector {
        let n = self.dim;
        let mut out = DVector::zeros(n);
        for i in 0..n {
            for j in (i + 1)..n {
                let w = u[i] * v[j] - u[j] * v[i];
                if w == 0.0 {
                    continue;
                }
                let start = (i * n + j) * n;
                for k in 0..n {
                    out[k] += w * self.c[start + k];
                }
            }
        }
        out
    }

    /// Matrix of `ad_u = [u, .]`.
    pub fn ad(&self, u: &AlgebraVector) -> DMatrix<f64> {
        let n = self.dim;
        let mut m = DMatrix::zeros(n, n);
        for j in 0..n {
            let col = self.bracket_unchecked(u, &unit(n, j));
            m.set_column(j, &col);
        }
        m
    }

    /// Largest cyclic Jacobi sum over basis triples, with the triple attaining it.
    pub fn jacobi_worst(&self) -> (f64, (usize, usize, usize)) {
        let n = self.dim;
        let mut worst = (0.0, (0, 0, 0));
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let mut best = 0.0f64;
                    for m in 0..n {
                        let mut s = 0.0;
                        for l in 0..n {
                            s += self.constant(i, j, l) * self.constant(l, k, m)
                                + self.constant(j, k, l) * self.constant(l, i, m)
                                + self.constant(k, i, l) * self.constant(l, j, m);
                        }
                        best = best.max(s.abs());
                    }
                    if best > worst.0 {
                        worst = (best, (i, j, k));
                    }
                }
            }
        }
        worst
    }

    pub fn jacobi_residual(&self) -> f64 {
        self.jacobi_worst().0
    }

    pub fn jacobi_tolerance(&self) -> f64 {
        tolerance::jacobi(self.max_abs())
    }

    /// Fails with the worst offending triple if the Jacobi identity does not hold.
    pub fn validate(&self) -> Result<()> {
        let (residual, triple) = self.jacobi_worst();
        if residual > self.jacobi_tolerance() {
            return Err(GeometryError::JacobiViolation { residual, triple });
        }
        Ok(())
    }

    /// `trace(ad_{b_i})` for each basis vector.
    pub fn ad_traces(&self) -> Vec<f64> {
        (0..self.dim)
            .map(|i| (0..self.dim).map(|j| self.constant(i, j, j)).sum())
            .collect()
    }

    pub fn is_unimodular(&self) -> bool {
        let tol = tolerance::numeric(self.max_abs(), 0.0);
        self.ad_traces().iter().all(|t| t.abs() <= tol)
    }

    /// Structure constants in the basis given by the columns of `basis`
    /// (each column expressed in the current basis).
    pub fn change_basis(&self, basis: &DMatrix<f64>) -> Result<Self> {
        let n = self.dim;
        if basis.nrows() != n || basis.ncols() != n {
            return Err(GeometryError::DimensionMismatch {
                expected: n,
                found: basis.ncols(),
            });
        }
        let inverse = basis
            .clone()
            .try_inverse()
            .ok_or_else(|| GeometryError::ParamOutOfRange("change of basis matrix is singular".into()))?;
        let cols: Vec<AlgebraVector> = (0..n).map(|a| basis.column(a).into_owned()).collect();
        let mut c = vec![0.0; n * n * n];
        for a in 0..n {
            for b in 0..n {
                let new = &inverse * self.bracket_unchecked(&cols[a], &cols[b]);
                for k in 0..n {
                    c[(a * n + b) * n + k] = new[k];
                }
            }
        }
        Self::new(n, c)
    }

    /// Diagonalizes a 3-dimensional unimodular metric Lie algebra.
    ///
    /// In an oriented orthonormal basis the bracket factors as
    /// `[u, v] = L(u x v)` with `L` self-adjoint exactly when the algebra is
    /// unimodular. The eigenvectors of `L`, oriented right-handed, form a
    /// frame with `[f2,f3] = c1 f1`, `[f3,f1] = c2 f2`, `[f1,f2] = c3 f3`.
    pub fn milnor_frame(&self, metric: &Metric) -> Result<MilnorFrame> {
        if self.dim != 3 {
            return Err(GeometryError::NotThreeDimensional(self.dim));
        }
        if metric.dim() != 3 {
            return Err(GeometryError::DimensionMismatch {
                expected: 3,
                found: metric.dim(),
            });
        }
        if !self.is_unimodular() {
            return Err(GeometryError::NotUnimodular);
        }
        let e = metric.orthonormal_frame();
        let ortho = self.change_basis(&e)?;
        let mut l = DMatrix::zeros(3, 3);
        for k in 0..3 {
            let col = ortho.basis_bracket((k + 1) % 3, (k + 2) % 3);
            l.set_column(k, &col);
        }
        let l = (&l + l.transpose()) * 0.5;
        let eig = SymmetricEigen::new(l);
        let mut order: Vec<usize> = (0..3).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
        let mut q = DMatrix::zeros(3, 3);
        let mut constants = [0.0; 3];
        for (slot, &idx) in order.iter().enumerate() {
            q.set_column(slot, &eig.eigenvectors.column(idx));
            constants[slot] = eig.eigenvalues[idx];
        }
        if q.determinant() < 0.0 {
            let flipped = -q.column(2).into_owned();
            q.set_column(2, &flipped);
        }
        Ok(MilnorFrame {
            constants,
            frame: e * q,
        })
    }
}

/// Milnor constants `(c1, c2, c3)` in descending order, and the frame
/// realizing them (columns in the input basis).
#[derive(Debug, Clone, Serialize)]
pub struct MilnorFrame {
    pub constants: [f64; 3],
    #[serde(serialize_with = "crate::serialize_matrix_columns")]
    pub frame: DMatrix<f64>,
}

impl MilnorFrame {
    /// Largest deviation of the frame brackets from the diagonal relations.
    pub fn bracket_defect(&self, algebra: &LieAlgebra) -> f64 {
        let f: Vec<AlgebraVector> = (0..3).map(|i| self.frame.column(i).into_owned()).collect();
        let mut worst = 0.0f64;
        for k in 0..3 {
            let (i, j) = ((k + 1) % 3, (k + 2) % 3);
            let lhs = algebra.bracket_unchecked(&f[i], &f[j]);
            let rhs = &f[k] * self.constants[k];
            worst = worst.max((lhs - rhs).amax());
        }
        worst
    }
}

pub fn unit(n: usize, i: usize) -> AlgebraVector {
    let mut v = DVector::zeros(n);
    v[i] = 1.0;
    v
}
