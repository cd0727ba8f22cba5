//! Left-invariant parallel vector fields.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::levi_civita::Connection;
use crate::metric::Metric;
use crate::tolerance;
use crate::AlgebraVector;

/// The space `{U : nabla_{b_i} U = 0 for all i}` with a g-orthonormal basis.
#[derive(Debug, Clone, Serialize)]
pub struct ParallelSpace {
    #[serde(serialize_with = "crate::serialize_vectors")]
    pub basis: Vec<AlgebraVector>,
}

impl ParallelSpace {
    pub fn dimension(&self) -> usize {
        self.basis.len()
    }

    /// g-orthogonal projection onto the space.
    pub fn project(&self, metric: &Metric, u: &AlgebraVector) -> AlgebraVector {
        let mut p = AlgebraVector::zeros(u.len());
        for q in &self.basis {
            p.axpy(metric.inner(q, u), q, 1.0);
        }
        p
    }

    /// g-distance from `u` to the space.
    pub fn distance(&self, metric: &Metric, u: &AlgebraVector) -> f64 {
        metric.norm(&(u - self.project(metric, u)))
    }

    /// Largest principal angle between this space and `span(others)`, or
    /// `None` when the dimensions differ. Computed from the sine (norm of the
    /// residual after projection) to stay accurate near zero.
    pub fn max_principal_angle(&self, metric: &Metric, others: &[AlgebraVector]) -> Option<f64> {
        let other = metric.gram_schmidt(others, 1e-9);
        if other.len() != self.dimension() {
            return None;
        }
        if other.is_empty() {
            return Some(0.0);
        }
        // residual coordinates in a g-orthonormal frame, so the spectral norm is the g-norm
        let to_frame = metric
            .orthonormal_frame()
            .try_inverse()
            .expect("orthonormal frame is invertible");
        let n = metric.dim();
        let residual = DMatrix::from_fn(n, other.len(), |r, c| {
            let w = &other[c] - self.project(metric, &other[c]);
            (&to_frame * w)[r]
        });
        let sine = residual.singular_values().max().min(1.0);
        Some(sine.asin())
    }
}

/// Matrix of the map `U -> (nabla_{b_1} U, ..., nabla_{b_n} U)`, with
/// row `i * n + k` holding the `k`-th coordinate of `nabla_{b_i} U`.
pub fn parallel_operator(connection: &Connection) -> DMatrix<f64> {
    let n = connection.dim();
    DMatrix::from_fn(n * n, n, |row, j| {
        let (i, k) = (row / n, row % n);
        connection.coefficient(i, j, k)
    })
}

/// Largest `|nabla_{b_i} U|` over basis vectors `b_i`.
pub fn parallel_residual(connection: &Connection, u: &AlgebraVector) -> f64 {
    (parallel_operator(connection) * u).amax()
}

/// Nullspace of the parallel operator by singular value thresholding:
/// singular values at or below `tolerance::NULL * sigma_max` count as zero.
pub fn parallel_fields(connection: &Connection, metric: &Metric) -> ParallelSpace {
    let n = connection.dim();
    let op = parallel_operator(connection);
    let svd = op.svd(false, true);
    let v_t = svd.v_t.expect("right singular vectors requested");
    let sigma_max = svd.singular_values.max();
    let threshold = tolerance::NULL * sigma_max;
    let mut kernel: Vec<AlgebraVector> = Vec::new();
    // thin SVD of an n^2 x n matrix (n^2 >= n) yields all n right singular vectors
    for (idx, &s) in svd.singular_values.iter().enumerate() {
        if sigma_max == 0.0 || s <= threshold {
            kernel.push(v_t.row(idx).transpose());
        }
    }
    debug_assert!(kernel.len() <= n);
    let mut basis = metric.gram_schmidt(&kernel, 1e-6);
    for b in &mut basis {
        orient(b);
    }
    ParallelSpace { basis }
}

/// Fix the SVD sign ambiguity: the first coordinate of (near) maximal
/// magnitude is made positive.
fn orient(v: &mut AlgebraVector) {
    let peak = v.amax();
    if let Some(&lead) = v.iter().find(|c| c.abs() >= peak * (1.0 - 1e-9)) {
        if lead < 0.0 {
            v.neg_mut();
        }
    }
}

/// `mu_i = (c1 + c2 + c3)/2 - c_i`, the Milnor-frame connection coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MuCoefficients {
    pub mu: [f64; 3],
}

pub fn mu_coefficients(c: [f64; 3]) -> MuCoefficients {
    let half = 0.5 * (c[0] + c[1] + c[2]);
    MuCoefficients {
        mu: [half - c[0], half - c[1], half - c[2]],
    }
}

/// The six products whose vanishing characterizes parallel fields
/// `U = u1 x + u2 y + u3 z` in a Milnor frame with the identity metric.
///
/// From the Milnor-frame connection table:
/// `nabla_x U = mu1 (u2 z - u3 y)`, `nabla_y U = mu2 (u3 x - u1 z)`,
/// `nabla_z U = mu3 (u1 y - u2 x)`.
pub fn parallel_products(c: [f64; 3], u: [f64; 3]) -> [f64; 6] {
    let [m1, m2, m3] = mu_coefficients(c).mu;
    [m1 * u[1], m1 * u[2], m2 * u[0], m2 * u[2], m3 * u[0], m3 * u[1]]
}

pub fn parallel_condition_unimodular(c: [f64; 3], u: [f64; 3]) -> bool {
    let max_c = c.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let tol = tolerance::numeric(max_c, 1.0);
    parallel_products(c, u).iter().all(|p| p.abs() <= tol)
}
