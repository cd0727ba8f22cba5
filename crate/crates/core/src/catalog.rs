//! Named algebras, metrics and drift families with their known results.
//!
//! Every preset carries the connection and curvature tables and the parallel
//! span that the generic pipeline is expected to reproduce, so tests and the
//! command line can refer to these objects by name.

use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector, Matrix3};
use serde::Serialize;

use crate::algebra::{unit, LieAlgebra};
use crate::error::{GeometryError, Result};
use crate::levi_civita::Geometry;
use crate::metric::Metric;
use crate::parallel::mu_coefficients;
use crate::randers::RandersStructure;
use crate::AlgebraVector;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PresetName {
    Heisenberg,
    E11,
    E2,
    FlatExtra,
    Ex1,
    Ex2,
    Ex3,
    Abelian,
}

impl PresetName {
    pub const ALL: [PresetName; 8] = [
        PresetName::Heisenberg,
        PresetName::E11,
        PresetName::E2,
        PresetName::FlatExtra,
        PresetName::Ex1,
        PresetName::Ex2,
        PresetName::Ex3,
        PresetName::Abelian,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            PresetName::Heisenberg => "heisenberg",
            PresetName::E11 => "e11",
            PresetName::E2 => "e2",
            PresetName::FlatExtra => "flat_extra",
            PresetName::Ex1 => "ex1",
            PresetName::Ex2 => "ex2",
            PresetName::Ex3 => "ex3",
            PresetName::Abelian => "abelian",
        }
    }

    /// Upper bound (exclusive) on `|u|` for the drift family at metric scale `lambda`.
    pub fn drift_bound(self, lambda: f64) -> Option<f64> {
        match self {
            PresetName::E2 | PresetName::Ex2 | PresetName::Ex3 => Some(1.0 / lambda),
            PresetName::FlatExtra | PresetName::Ex1 => Some(1.0 / (2f64.sqrt() * lambda)),
            _ => None,
        }
    }

    /// Unscaled direction of the parallel drift family.
    pub fn drift_direction(self) -> Option<AlgebraVector> {
        match self {
            PresetName::E2 => Some(vec3(0.0, 0.0, 1.0)),
            PresetName::FlatExtra | PresetName::Ex1 => Some(vec3(0.0, 1.0, -1.0)),
            PresetName::Ex2 => Some(vec3(0.0, 1.0, 0.0)),
            PresetName::Ex3 => Some(vec3(1.0, 0.0, 0.0)),
            _ => None,
        }
    }

    fn uses_alpha(self) -> bool {
        matches!(
            self,
            PresetName::FlatExtra | PresetName::Ex1 | PresetName::Ex2 | PresetName::Ex3
        )
    }
}

impl fmt::Display for PresetName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for PresetName {
    type Err = GeometryError;

    fn from_str(s: &str) -> Result<Self> {
        PresetName::ALL
            .into_iter()
            .find(|p| p.as_str() == s)
            .ok_or_else(|| GeometryError::UnknownPreset(s.to_string()))
    }
}

/// Optional overrides; anything left `None` takes the preset default.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct PresetParams {
    pub lambda: Option<f64>,
    pub alpha: Option<f64>,
    pub c1: Option<f64>,
    pub c2: Option<f64>,
    pub n: Option<usize>,
    /// Drift coefficient along the preset's parallel direction.
    pub u: Option<f64>,
}

impl PresetParams {
    pub fn lambda(mut self, lambda: f64) -> Self {
        self.lambda = Some(lambda);
        self
    }
    pub fn alpha(mut self, alpha: f64) -> Self {
        self.alpha = Some(alpha);
        self
    }
    pub fn u(mut self, u: f64) -> Self {
        self.u = Some(u);
        self
    }
    pub fn c1(mut self, c1: f64) -> Self {
        self.c1 = Some(c1);
        self
    }
    pub fn c2(mut self, c2: f64) -> Self {
        self.c2 = Some(c2);
        self
    }
    pub fn n(mut self, n: usize) -> Self {
        self.n = Some(n);
        self
    }
}

/// Parameters after defaults are applied.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ResolvedParams {
    pub lambda: f64,
    pub alpha: f64,
    pub c1: f64,
    pub c2: f64,
    pub n: usize,
    pub u: Option<f64>,
}

/// Results the generic pipeline must reproduce for a preset.
#[derive(Debug, Clone)]
pub struct Expected {
    pub flat: bool,
    pub unimodular: bool,
    /// Spanning set (not normalized) of the parallel fields.
    pub parallel_span: Vec<AlgebraVector>,
    /// `connection[i][j] = nabla_{b_i} b_j`.
    pub connection: Vec<Vec<AlgebraVector>>,
    /// `((i, j, k), R(b_i, b_j) b_k)` entries, when the curvature is tabulated.
    pub curvature: Vec<((usize, usize, usize), AlgebraVector)>,
}

#[derive(Debug, Clone)]
pub struct Preset {
    pub name: PresetName,
    pub params: ResolvedParams,
    pub algebra: LieAlgebra,
    pub metric: Metric,
    pub expected: Expected,
}

pub fn preset(name: &str, params: &PresetParams) -> Result<Preset> {
    Preset::new(name.parse()?, params)
}

fn vec3(x: f64, y: f64, z: f64) -> AlgebraVector {
    DVector::from_column_slice(&[x, y, z])
}

fn out_of_range(msg: impl Into<String>) -> GeometryError {
    GeometryError::ParamOutOfRange(msg.into())
}

/// Connection table of the diagonal form `[y,z] = c1 x`, `[z,x] = c2 y`,
/// `[x,y] = c3 z` with an orthogonal metric `lambda^2 I`.
fn milnor_table(c: [f64; 3]) -> Vec<Vec<AlgebraVector>> {
    let [m1, m2, m3] = mu_coefficients(c).mu;
    let o = vec3(0.0, 0.0, 0.0);
    vec![
        vec![o.clone(), vec3(0.0, 0.0, m1), vec3(0.0, -m1, 0.0)],
        vec![vec3(0.0, 0.0, -m2), o.clone(), vec3(m2, 0.0, 0.0)],
        vec![vec3(0.0, m3, 0.0), vec3(-m3, 0.0, 0.0), o],
    ]
}

fn zero_table(n: usize) -> Vec<Vec<AlgebraVector>> {
    vec![vec![DVector::zeros(n); n]; n]
}

/// The nine `R(b_i,b_j)b_k` entries with `i < j`; anything not listed is zero.
fn curvature_table(nonzero: &[((usize, usize, usize), AlgebraVector)]) -> Vec<((usize, usize, usize), AlgebraVector)> {
    let mut out = Vec::with_capacity(9);
    for (i, j) in [(0, 1), (0, 2), (1, 2)] {
        for k in 0..3 {
            let v = nonzero
                .iter()
                .find(|(key, _)| *key == (i, j, k))
                .map(|(_, v)| v.clone())
                .unwrap_or_else(|| vec3(0.0, 0.0, 0.0));
            out.push(((i, j, k), v));
        }
    }
    out
}

impl Preset {
    pub fn new(name: PresetName, params: &PresetParams) -> Result<Self> {
        let lambda = params.lambda.unwrap_or(1.0);
        if !(lambda.is_finite() && lambda > 0.0) {
            return Err(out_of_range(format!("lambda must be positive, got {lambda}")));
        }
        let alpha = params.alpha.unwrap_or(1.0);
        if name.uses_alpha() && !(alpha.is_finite() && alpha != 0.0) {
            return Err(out_of_range(format!(
                "alpha must be finite and nonzero for {name}, got {alpha}"
            )));
        }
        let (c1, c2) = match name {
            PresetName::Heisenberg => (params.c1.unwrap_or(1.0), 0.0),
            PresetName::E11 => (params.c1.unwrap_or(1.0), params.c2.unwrap_or(-1.0)),
            _ => (0.0, 0.0),
        };
        match name {
            PresetName::Heisenberg if !(c1 > 0.0 && c1.is_finite()) => {
                return Err(out_of_range(format!("heisenberg needs c1 > 0, got {c1}")));
            }
            PresetName::E11 if !(c1 > 0.0 && c2 < 0.0 && c1.is_finite() && c2.is_finite()) => {
                return Err(out_of_range(format!("e11 needs c1 > 0 and c2 < 0, got ({c1}, {c2})")));
            }
            _ => {}
        }
        let n = if name == PresetName::Abelian {
            params.n.unwrap_or(3)
        } else {
            3
        };
        if n == 0 {
            return Err(out_of_range("abelian dimension must be positive"));
        }
        if let Some(u) = params.u {
            let bound = name.drift_bound(lambda).ok_or_else(|| {
                out_of_range(format!(
                    "{name} has no parallel drift family; give the drift as a vector"
                ))
            })?;
            if !(u != 0.0 && u.abs() < bound) {
                return Err(out_of_range(format!(
                    "{name} drift needs 0 < |u| < {bound}, got u = {u}"
                )));
            }
        }

        let a = alpha;
        let aa = a * a;
        let (algebra, expected) = match name {
            PresetName::Heisenberg | PresetName::E11 => {
                let c = [c1, c2, 0.0];
                (
                    LieAlgebra::milnor_form(c1, c2, 0.0)?,
                    Expected {
                        flat: false,
                        unimodular: true,
                        parallel_span: vec![],
                        connection: milnor_table(c),
                        curvature: vec![],
                    },
                )
            }
            PresetName::E2 => (
                LieAlgebra::from_brackets(3, &[(1, 2, vec![1.0, 0.0, 0.0]), (2, 0, vec![0.0, 1.0, 0.0])])?,
                Expected {
                    flat: true,
                    unimodular: true,
                    parallel_span: vec![vec3(0.0, 0.0, 1.0)],
                    connection: {
                        let mut t = zero_table(3);
                        t[2][0] = vec3(0.0, 1.0, 0.0);
                        t[2][1] = vec3(-1.0, 0.0, 0.0);
                        t
                    },
                    curvature: curvature_table(&[]),
                },
            ),
            PresetName::FlatExtra => (
                LieAlgebra::from_brackets(
                    3,
                    &[
                        (0, 1, vec![0.0, a, a]),
                        (1, 2, vec![2.0 * a, 0.0, 0.0]),
                        (2, 0, vec![0.0, a, a]),
                    ],
                )?,
                Expected {
                    flat: true,
                    unimodular: true,
                    parallel_span: vec![vec3(0.0, 1.0, -1.0)],
                    connection: {
                        let mut t = zero_table(3);
                        t[1][0] = vec3(0.0, -a, -a);
                        t[1][1] = vec3(a, 0.0, 0.0);
                        t[1][2] = vec3(a, 0.0, 0.0);
                        t[2][0] = vec3(0.0, a, a);
                        t[2][1] = vec3(-a, 0.0, 0.0);
                        t[2][2] = vec3(-a, 0.0, 0.0);
                        t
                    },
                    curvature: curvature_table(&[]),
                },
            ),
            PresetName::Ex1 => (
                LieAlgebra::from_brackets(3, &[(0, 1, vec![0.0, a, a]), (2, 0, vec![0.0, -a, -a])])?,
                Expected {
                    flat: false,
                    unimodular: false,
                    parallel_span: vec![vec3(0.0, 1.0, -1.0)],
                    connection: {
                        let mut t = zero_table(3);
                        for i in [1, 2] {
                            t[i][0] = vec3(0.0, -a, -a);
                            t[i][1] = vec3(a, 0.0, 0.0);
                            t[i][2] = vec3(a, 0.0, 0.0);
                        }
                        t
                    },
                    curvature: {
                        let yz = vec3(0.0, 2.0 * aa, 2.0 * aa);
                        let x = vec3(-2.0 * aa, 0.0, 0.0);
                        curvature_table(&[
                            ((0, 1, 0), yz.clone()),
                            ((0, 2, 0), yz),
                            ((0, 1, 1), x.clone()),
                            ((0, 1, 2), x.clone()),
                            ((0, 2, 1), x.clone()),
                            ((0, 2, 2), x),
                        ])
                    },
                },
            ),
            PresetName::Ex2 => (
                LieAlgebra::from_brackets(3, &[(2, 0, vec![a, 0.0, 0.0])])?,
                Expected {
                    flat: false,
                    unimodular: false,
                    parallel_span: vec![vec3(0.0, 1.0, 0.0)],
                    connection: {
                        let mut t = zero_table(3);
                        t[0][0] = vec3(0.0, 0.0, a);
                        t[0][2] = vec3(-a, 0.0, 0.0);
                        t
                    },
                    curvature: curvature_table(&[((0, 2, 0), vec3(0.0, 0.0, aa)), ((0, 2, 2), vec3(-aa, 0.0, 0.0))]),
                },
            ),
            PresetName::Ex3 => (
                LieAlgebra::from_brackets(3, &[(1, 2, vec![0.0, a, a])])?,
                Expected {
                    flat: false,
                    unimodular: false,
                    parallel_span: vec![vec3(1.0, 0.0, 0.0)],
                    connection: {
                        let mut t = zero_table(3);
                        for i in [1, 2] {
                            t[i][1] = vec3(0.0, 0.0, -a);
                            t[i][2] = vec3(0.0, a, 0.0);
                        }
                        t
                    },
                    curvature: curvature_table(&[
                        ((1, 2, 1), vec3(0.0, 0.0, 2.0 * aa)),
                        ((1, 2, 2), vec3(0.0, -2.0 * aa, 0.0)),
                    ]),
                },
            ),
            PresetName::Abelian => (
                LieAlgebra::abelian(n)?,
                Expected {
                    flat: true,
                    unimodular: true,
                    parallel_span: (0..n).map(|i| unit(n, i)).collect(),
                    connection: zero_table(n),
                    curvature: vec![],
                },
            ),
        };
        let metric = Metric::scaled_identity(n, lambda)?;
        Ok(Self {
            name,
            params: ResolvedParams {
                lambda,
                alpha,
                c1,
                c2,
                n,
                u: params.u,
            },
            algebra,
            metric,
            expected,
        })
    }

    pub fn geometry(&self) -> Result<Geometry> {
        Geometry::new(self.algebra.clone(), self.metric.clone())
    }

    /// `u` times the parallel direction, when `u` was given.
    pub fn drift(&self) -> Option<AlgebraVector> {
        let u = self.params.u?;
        self.name.drift_direction().map(|d| d * u)
    }

    /// Randers structure with the preset drift, or the Riemannian one if no
    /// drift coefficient was given.
    pub fn randers(&self) -> Result<RandersStructure> {
        let drift = self.drift().unwrap_or_else(|| DVector::zeros(self.params.n));
        RandersStructure::new(self.geometry()?, drift)
    }

    fn orthonormal_coords(&self, y: &AlgebraVector, v: &AlgebraVector) -> Result<([f64; 3], [f64; 3])> {
        self.metric.check(y)?;
        self.metric.check(v)?;
        let defect = (self.metric.inner(y, y) - 1.0)
            .abs()
            .max((self.metric.inner(v, v) - 1.0).abs())
            .max(self.metric.inner(y, v).abs());
        if defect > 1e-9 {
            return Err(GeometryError::FrameNotOrthonormal(defect));
        }
        if self.params.n != 3 {
            return Err(GeometryError::NotThreeDimensional(self.params.n));
        }
        Ok(([y[0], y[1], y[2]], [v[0], v[1], v[2]]))
    }

    /// Drift pairing `<X, Y>` in closed form (zero without a drift).
    fn beta(&self, y: [f64; 3]) -> f64 {
        let (l2, u) = (self.params.lambda.powi(2), self.params.u.unwrap_or(0.0));
        let [a, b, c] = y;
        match self.name {
            PresetName::E2 => u * l2 * c,
            PresetName::FlatExtra | PresetName::Ex1 => u * l2 * (b - c),
            PresetName::Ex2 => u * l2 * b,
            PresetName::Ex3 => u * l2 * a,
            _ => 0.0,
        }
    }

    /// Closed-form sectional curvature of the plane spanned by a
    /// g-orthonormal pair `Y = (a,b,c)`, `V = (a~,b~,c~)`.
    pub fn closed_form_sectional_k(&self, y: &AlgebraVector, v: &AlgebraVector) -> Result<f64> {
        let ([a, b, c], [at, bt, ct]) = self.orthonormal_coords(y, v)?;
        let al = self.params.alpha * self.params.lambda;
        match self.name {
            PresetName::Ex1 => Ok(-2.0 * (al * (a * (bt + ct) - at * (b + c))).powi(2)),
            PresetName::Ex2 => Ok(-(al * (at * c - ct * a)).powi(2)),
            PresetName::Ex3 => Ok(-2.0 * (al * (bt * c - ct * b)).powi(2)),
            PresetName::E2 | PresetName::FlatExtra | PresetName::Abelian => Ok(0.0),
            _ => Err(out_of_range(format!("no closed-form curvature for {}", self.name))),
        }
    }

    /// Closed-form flag curvature for a g-orthonormal pair: the sectional
    /// value divided by `(1 + <X,Y>)^2`.
    pub fn closed_form_flag_k(&self, y: &AlgebraVector, v: &AlgebraVector) -> Result<f64> {
        let sectional = self.closed_form_sectional_k(y, v)?;
        let (yc, _) = self.orthonormal_coords(y, v)?;
        let f = 1.0 + self.beta(yc);
        Ok(sectional / (f * f))
    }

    /// Closed-form fundamental tensor entries for a g-orthonormal pair.
    pub fn closed_form_fundamental(&self, y: &AlgebraVector, v: &AlgebraVector) -> Result<FundamentalEntries> {
        let (yc, vc) = self.orthonormal_coords(y, v)?;
        let sectional = self.closed_form_sectional_k(y, v)?;
        let f = 1.0 + self.beta(yc);
        // <X, V> for the same drift
        let xv = self.beta(vc);
        Ok(FundamentalEntries {
            curvature_numerator: sectional * f,
            yy: f * f,
            vv: f + xv * xv,
            yv: xv * f,
        })
    }
}

/// `g_Y(R(V,Y)Y, V)`, `g_Y(Y,Y)`, `g_Y(V,V)`, `g_Y(Y,V)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FundamentalEntries {
    pub curvature_numerator: f64,
    pub yy: f64,
    pub vv: f64,
    pub yv: f64,
}

/// Matrix model of the Euclidean motion algebra: translations `x`, `y` and
/// the rotation generator `z`, as 3x3 matrices.
pub fn e2_matrix_basis() -> [Matrix3<f64>; 3] {
    let mut x = Matrix3::zeros();
    x[(0, 2)] = 1.0;
    let mut y = Matrix3::zeros();
    y[(1, 2)] = 1.0;
    let mut z = Matrix3::zeros();
    z[(0, 1)] = -1.0;
    z[(1, 0)] = 1.0;
    [x, y, z]
}

/// A group element of the matrix model: rotation by `theta`, translation `(a, b)`.
pub fn e2_group_element(a: f64, b: f64, theta: f64) -> Matrix3<f64> {
    let (s, c) = theta.sin_cos();
    Matrix3::new(c, -s, a, s, c, b, 0.0, 0.0, 1.0)
}

/// Structure constants of a matrix Lie algebra from commutators of a basis.
pub fn algebra_from_matrices(basis: &[Matrix3<f64>]) -> Result<LieAlgebra> {
    let n = basis.len();
    let flat = DMatrix::from_fn(9, n, |r, col| basis[col][(r / 3, r % 3)]);
    let svd = flat.clone().svd(true, true);
    let mut c = vec![0.0; n * n * n];
    for i in 0..n {
        for j in 0..n {
            let comm = basis[i] * basis[j] - basis[j] * basis[i];
            let rhs = DVector::from_fn(9, |r, _| comm[(r / 3, r % 3)]);
            let coords = svd
                .solve(&rhs, 1e-12)
                .map_err(|e| GeometryError::NumericalFailure(e.to_string()))?;
            if (&flat * &coords - &rhs).amax() > 1e-12 {
                return Err(out_of_range("matrix basis is not closed under commutators"));
            }
            for k in 0..n {
                c[(i * n + j) * n + k] = coords[k];
            }
        }
    }
    LieAlgebra::new(n, c)
}
