//! Levi-Civita connection and curvature of a left-invariant metric.
//!
//! For left-invariant fields every quantity is a constant tensor on the
//! algebra: the connection is the bilinear map `(u, v) -> nabla_u v`, and the
//! curvature is the trilinear map `R(u, v) w`.

use nalgebra::DVector;

use crate::algebra::LieAlgebra;
use crate::error::{GeometryError, Result};
use crate::metric::{zeros, Metric};
use crate::tolerance;
use crate::AlgebraVector;

/// `gamma[i][j][k]` is the `k`-th coordinate of `nabla_{b_i} b_j`.
#[derive(Debug, Clone, PartialEq)]
pub struct Connection {
    dim: usize,
    gamma: Vec<f64>,
}

impl Connection {
    /// Solves the Koszul formula
    /// `2<nabla_u v, w> = <[u,v],w> - <[v,w],u> + <[w,u],v>`
    /// for every pair of basis vectors against one factored Gram matrix.
    pub fn koszul(algebra: &LieAlgebra, metric: &Metric) -> Result<Self> {
        let n = algebra.dim();
        if metric.dim() != n {
            return Err(GeometryError::DimensionMismatch {
                expected: n,
                found: metric.dim(),
            });
        }
        // lowered[i][j][k] = <[b_i, b_j], b_k>
        let mut lowered = vec![0.0; n * n * n];
        for i in 0..n {
            for j in 0..n {
                let low = metric.lower(&algebra.basis_bracket(i, j));
                lowered[(i * n + j) * n..(i * n + j + 1) * n].copy_from_slice(low.as_slice());
            }
        }
        let at = |i: usize, j: usize, k: usize| lowered[(i * n + j) * n + k];
        let mut gamma = vec![0.0; n * n * n];
        let mut rhs = DVector::zeros(n);
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    rhs[k] = 0.5 * (at(i, j, k) - at(j, k, i) + at(k, i, j));
                }
                let sol = metric.raise(&rhs);
                if sol.iter().any(|x| !x.is_finite()) {
                    return Err(GeometryError::SingularMetric);
                }
                gamma[(i * n + j) * n..(i * n + j + 1) * n].copy_from_slice(sol.as_slice());
            }
        }
        Ok(Self { dim: n, gamma })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn coefficient(&self, i: usize, j: usize, k: usize) -> f64 {
        self.gamma[(i * self.dim + j) * self.dim + k]
    }

    /// `nabla_{b_i} b_j`.
    pub fn basis(&self, i: usize, j: usize) -> AlgebraVector {
        let n = self.dim;
        let start = (i * n + j) * n;
        DVector::from_column_slice(&self.gamma[start..start + n])
    }

    pub fn max_abs(&self) -> f64 {
        self.gamma.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    /// `nabla_u v` for left-invariant fields `u`, `v`.
    pub fn apply(&self, u: &AlgebraVector, v: &AlgebraVector) -> Result<AlgebraVector> {
        for w in [u, v] {
            if w.len() != self.dim {
                return Err(GeometryError::DimensionMismatch {
                    expected: self.dim,
                    found: w.len(),
                });
            }
        }
        Ok(self.apply_unchecked(u, v))
    }

    pub(crate) fn apply_unchecked(&self, u: &AlgebraVector, v: &AlgebraVector) -> AlgebraVector {
        let n = self.dim;
        let mut out = zeros(n);
        for i in 0..n {
            if u[i] == 0.0 {
                continue;
            }
            for j in 0..n {
                let w = u[i] * v[j];
                if w == 0.0 {
                    continue;
                }
                let start = (i * n + j) * n;
                for k in 0..n {
                    out[k] += w * self.gamma[start + k];
                }
            }
        }
        out
    }

    /// Max-abs of `nabla_{b_i} b_j - nabla_{b_j} b_i - [b_i, b_j]`.
    pub fn torsion_residual(&self, algebra: &LieAlgebra) -> f64 {
        let n = self.dim;
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let t = self.coefficient(i, j, k) - self.coefficient(j, i, k) - algebra.constant(i, j, k);
                    worst = worst.max(t.abs());
                }
            }
        }
        worst
    }

    /// Max-abs of `<nabla_{b_i} b_j, b_k> + <b_j, nabla_{b_i} b_k>`.
    pub fn compatibility_residual(&self, metric: &Metric) -> f64 {
        let n = self.dim;
        let mut worst = 0.0f64;
        for i in 0..n {
            let lowered: Vec<AlgebraVector> = (0..n).map(|j| metric.lower(&self.basis(i, j))).collect();
            for j in 0..n {
                for k in 0..n {
                    let r = lowered[j][k] + lowered[k][j];
                    worst = worst.max(r.abs());
                }
            }
        }
        worst
    }
}

/// `riem[i][j][k][m]` is the `m`-th coordinate of `R(b_i, b_j) b_k` with
/// `R(u,v)w = nabla_u nabla_v w - nabla_v nabla_u w - nabla_[u,v] w`.
#[derive(Debug, Clone, PartialEq)]
pub struct Curvature {
    dim: usize,
    riem: Vec<f64>,
}

impl Curvature {
    pub fn from_connection(algebra: &LieAlgebra, connection: &Connection) -> Result<Self> {
        let n = algebra.dim();
        if connection.dim() != n {
            return Err(GeometryError::DimensionMismatch {
                expected: n,
                found: connection.dim(),
            });
        }
        let basis: Vec<Vec<AlgebraVector>> = (0..n)
            .map(|i| (0..n).map(|j| connection.basis(i, j)).collect())
            .collect();
        let mut riem = vec![0.0; n * n * n * n];
        for i in 0..n {
            let e_i = crate::algebra::unit(n, i);
            for j in 0..n {
                let e_j = crate::algebra::unit(n, j);
                let bracket = algebra.basis_bracket(i, j);
                for k in 0..n {
                    let first = connection.apply_unchecked(&e_i, &basis[j][k]);
                    let second = connection.apply_unchecked(&e_j, &basis[i][k]);
                    let third = connection.apply_unchecked(&bracket, &crate::algebra::unit(n, k));
                    let r = first - second - third;
                    let start = ((i * n + j) * n + k) * n;
                    riem[start..start + n].copy_from_slice(r.as_slice());
                }
            }
        }
        Ok(Self { dim: n, riem })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn component(&self, i: usize, j: usize, k: usize, m: usize) -> f64 {
        let n = self.dim;
        self.riem[((i * n + j) * n + k) * n + m]
    }

    /// `R(b_i, b_j) b_k`.
    pub fn basis(&self, i: usize, j: usize, k: usize) -> AlgebraVector {
        let n = self.dim;
        let start = ((i * n + j) * n + k) * n;
        DVector::from_column_slice(&self.riem[start..start + n])
    }

    pub fn max_abs(&self) -> f64 {
        self.riem.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    /// `R(u, v) w`.
    pub fn apply(&self, u: &AlgebraVector, v: &AlgebraVector, w: &AlgebraVector) -> Result<AlgebraVector> {
        for x in [u, v, w] {
            if x.len() != self.dim {
                return Err(GeometryError::DimensionMismatch {
                    expected: self.dim,
                    found: x.len(),
                });
            }
        }
        Ok(self.apply_unchecked(u, v, w))
    }

    pub(crate) fn apply_unchecked(&self, u: &AlgebraVector, v: &AlgebraVector, w: &AlgebraVector) -> AlgebraVector {
        let n = self.dim;
        let mut out = zeros(n);
        for i in 0..n {
            if u[i] == 0.0 {
                continue;
            }
            for j in 0..n {
                let uv = u[i] * v[j];
                if uv == 0.0 {
                    continue;
                }
                for k in 0..n {
                    let s = uv * w[k];
                    if s == 0.0 {
                        continue;
                    }
                    let start = ((i * n + j) * n + k) * n;
                    for m in 0..n {
                        out[m] += s * self.riem[start + m];
                    }
                }
            }
        }
        out
    }

    /// `<R(b_i, b_j) b_k, b_l>`.
    fn lowered(&self, metric: &Metric) -> Vec<f64> {
        let n = self.dim;
        let mut out = vec![0.0; n * n * n * n];
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let low = metric.lower(&self.basis(i, j, k));
                    let start = ((i * n + j) * n + k) * n;
                    out[start..start + n].copy_from_slice(low.as_slice());
                }
            }
        }
        out
    }

    /// Residuals of the algebraic curvature identities.
    pub fn symmetry_residuals(&self, metric: &Metric) -> CurvatureResiduals {
        let n = self.dim;
        let low = self.lowered(metric);
        let r = |i: usize, j: usize, k: usize, l: usize| low[((i * n + j) * n + k) * n + l];
        let mut out = CurvatureResiduals::default();
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        out.antisymmetry = out.antisymmetry.max((r(i, j, k, l) + r(j, i, k, l)).abs());
                        out.skew_last_pair = out.skew_last_pair.max((r(i, j, k, l) + r(i, j, l, k)).abs());
                        out.pair_symmetry = out.pair_symmetry.max((r(i, j, k, l) - r(k, l, i, j)).abs());
                        out.bianchi = out.bianchi.max((r(i, j, k, l) + r(j, k, i, l) + r(k, i, j, l)).abs());
                    }
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct CurvatureResiduals {
    pub antisymmetry: f64,
    pub skew_last_pair: f64,
    pub pair_symmetry: f64,
    pub bianchi: f64,
}

impl CurvatureResiduals {
    pub fn max(&self) -> f64 {
        self.antisymmetry
            .max(self.skew_last_pair)
            .max(self.pair_symmetry)
            .max(self.bianchi)
    }
}

/// Bundles an algebra, a metric and the derived connection and curvature.
#[derive(Debug, Clone)]
pub struct Geometry {
    pub algebra: LieAlgebra,
    pub metric: Metric,
    pub connection: Connection,
    pub curvature: Curvature,
}

impl Geometry {
    pub fn new(algebra: LieAlgebra, metric: Metric) -> Result<Self> {
        let connection = Connection::koszul(&algebra, &metric)?;
        let curvature = Curvature::from_connection(&algebra, &connection)?;
        Ok(Self {
            algebra,
            metric,
            connection,
            curvature,
        })
    }

    pub fn dim(&self) -> usize {
        self.algebra.dim()
    }

    /// Scale-aware tolerance for the identities checked on this geometry.
    pub fn tolerance(&self) -> f64 {
        tolerance::numeric(self.algebra.max_abs(), self.metric.max_abs())
    }

    pub fn is_flat(&self) -> bool {
        self.curvature.max_abs() <= self.tolerance()
    }

    pub fn parallel_space(&self) -> crate::parallel::ParallelSpace {
        crate::parallel::parallel_fields(&self.connection, &self.metric)
    }

    pub fn sectional_curvature(&self, v: &AlgebraVector, y: &AlgebraVector) -> Result<f64> {
        sectional_curvature(&self.metric, &self.curvature, v, y)
    }
}

/// `<R(V,Y)Y, V> / (<Y,Y><V,V> - <Y,V>^2)`.
pub fn sectional_curvature(
    metric: &Metric,
    curvature: &Curvature,
    v: &AlgebraVector,
    y: &AlgebraVector,
) -> Result<f64> {
    metric.check(v)?;
    metric.check(y)?;
    let yy = metric.inner(y, y);
    let vv = metric.inner(v, v);
    let yv = metric.inner(y, v);
    let area = yy * vv - yv * yv;
    #[allow(clippy::neg_cmp_op_on_partial_ord)] // also rejects NaN
    if !(area > tolerance::flag(yy, vv)) {
        return Err(GeometryError::DegeneratePlane(area));
    }
    let r = curvature.apply_unchecked(v, y, y);
    Ok(metric.inner(&r, v) / area)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::unit;

    fn v(xs: &[f64]) -> AlgebraVector {
        DVector::from_column_slice(xs)
    }

    #[test]
    fn abelian_connection_vanishes() {
        let g = Geometry::new(
            LieAlgebra::abelian(3).unwrap(),
            Metric::new(nalgebra::DMatrix::from_row_slice(
                3,
                3,
                &[2.0, 0.1, 0.0, 0.1, 1.0, 0.2, 0.0, 0.2, 3.0],
            ))
            .unwrap(),
        )
        .unwrap();
        assert_eq!(g.connection.max_abs(), 0.0);
        assert_eq!(g.curvature.max_abs(), 0.0);
    }

    #[test]
    fn milnor_form_matches_mu_table() {
        let (c1, c2, c3) = (1.5, -0.7, 2.0);
        let s = 0.5 * (c1 + c2 + c3);
        let (m1, m2, m3) = (s - c1, s - c2, s - c3);
        let a = LieAlgebra::milnor_form(c1, c2, c3).unwrap();
        let nabla = Connection::koszul(&a, &Metric::identity(3).unwrap()).unwrap();
        let close = |got: AlgebraVector, want: AlgebraVector| assert!((got - want).amax() < 1e-14);
        close(nabla.basis(0, 1), v(&[0.0, 0.0, m1]));
        close(nabla.basis(0, 2), v(&[0.0, -m1, 0.0]));
        close(nabla.basis(1, 0), v(&[0.0, 0.0, -m2]));
        close(nabla.basis(1, 2), v(&[m2, 0.0, 0.0]));
        close(nabla.basis(2, 0), v(&[0.0, m3, 0.0]));
        close(nabla.basis(2, 1), v(&[-m3, 0.0, 0.0]));
        for i in 0..3 {
            assert_eq!(nabla.basis(i, i).amax(), 0.0);
        }
    }

    #[test]
    fn degenerate_plane_is_rejected() {
        let g = Geometry::new(
            LieAlgebra::milnor_form(1.0, 0.0, 0.0).unwrap(),
            Metric::identity(3).unwrap(),
        )
        .unwrap();
        let y = unit(3, 0);
        let err = g.sectional_curvature(&(&y * 2.0), &y).unwrap_err();
        assert!(matches!(err, GeometryError::DegeneratePlane(_)));
    }

    #[test]
    fn heisenberg_sectional_curvature_signs() {
        // Milnor's classical values for c = (1, 0, 0): K(y,z) = -3/4, K(x,y) = K(x,z) = 1/4.
        let g = Geometry::new(
            LieAlgebra::milnor_form(1.0, 0.0, 0.0).unwrap(),
            Metric::identity(3).unwrap(),
        )
        .unwrap();
        let k_yz = g.sectional_curvature(&unit(3, 1), &unit(3, 2)).unwrap();
        let k_xy = g.sectional_curvature(&unit(3, 0), &unit(3, 1)).unwrap();
        assert!((k_yz + 0.75).abs() < 1e-14, "{k_yz}");
        assert!((k_xy - 0.25).abs() < 1e-14, "{k_xy}");
    }
}
