//! Left-invariant Randers metrics `F(y) = sqrt(<y,y>) + <X,y>`.
//!
//! When the drift field `X` is parallel for the Levi-Civita connection of
//! `<,>`, the Randers metric is of Berwald type: its Chern connection is the
//! Levi-Civita connection, so the Riemann curvature of `<,>` is also the
//! Finsler curvature and only the fundamental tensor `g_Y` changes in the
//! flag curvature quotient.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{GeometryError, Result};
use crate::levi_civita::Geometry;
use crate::metric::Metric;
use crate::parallel::parallel_residual;
use crate::tolerance;
use crate::AlgebraVector;

#[derive(Debug, Clone)]
pub struct RandersStructure {
    geometry: Geometry,
    drift: AlgebraVector,
    drift_norm: f64,
    parallel_residual: f64,
    is_berwald: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Label {
    Riemannian,
    BerwaldNonRiemannian,
    NonBerwald,
    LocallyMinkowskian,
}

impl std::fmt::Display for Label {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Label::Riemannian => "Riemannian",
            Label::BerwaldNonRiemannian => "BerwaldNonRiemannian",
            Label::NonBerwald => "NonBerwald",
            Label::LocallyMinkowskian => "LocallyMinkowskian",
        };
        f.write_str(s)
    }
}

/// A flag `span{Y, V}` with flagpole `Y` and its flag curvature.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FlagSample {
    #[serde(serialize_with = "crate::serialize_vector")]
    pub flagpole: AlgebraVector,
    #[serde(serialize_with = "crate::serialize_vector")]
    pub edge: AlgebraVector,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanReport {
    pub samples: usize,
    pub seed: u64,
    pub max: FlagSample,
    pub min: FlagSample,
}

impl ScanReport {
    pub fn max_abs(&self) -> f64 {
        self.max.value.abs().max(self.min.value.abs())
    }
}

impl RandersStructure {
    /// Fails with `DriftTooLarge` unless `<X,X> < 1`. `X = 0` is accepted
    /// and yields the Riemannian metric itself.
    pub fn new(geometry: Geometry, drift: AlgebraVector) -> Result<Self> {
        geometry.metric.check(&drift)?;
        if drift.iter().any(|x| !x.is_finite()) {
            return Err(GeometryError::NumericalFailure("non-finite drift".into()));
        }
        let drift_norm = geometry.metric.norm(&drift);
        if drift_norm >= 1.0 {
            return Err(GeometryError::DriftTooLarge { norm: drift_norm });
        }
        let parallel_residual = parallel_residual(&geometry.connection, &drift);
        let scale = (1.0 + geometry.connection.max_abs()) * drift.amax();
        let is_berwald = parallel_residual <= tolerance::NULL * scale;
        Ok(Self {
            geometry,
            drift,
            drift_norm,
            parallel_residual,
            is_berwald,
        })
    }

    pub fn geometry(&self) -> &Geometry {
        &self.geometry
    }

    pub fn metric(&self) -> &Metric {
        &self.geometry.metric
    }

    pub fn drift(&self) -> &AlgebraVector {
        &self.drift
    }

    pub fn drift_norm(&self) -> f64 {
        self.drift_norm
    }

    pub fn parallel_residual(&self) -> f64 {
        self.parallel_residual
    }

    pub fn is_berwald(&self) -> bool {
        self.is_berwald
    }

    fn nonzero(&self, y: &AlgebraVector) -> Result<f64> {
        self.metric().check(y)?;
        let a = self.metric().norm(y);
        if a == 0.0 {
            return Err(GeometryError::ZeroVector);
        }
        Ok(a)
    }

    pub fn finsler(&self, y: &AlgebraVector) -> Result<f64> {
        let a = self.nonzero(y)?;
        Ok(a + self.metric().inner(&self.drift, y))
    }

    /// `g_Y(U, V)` from the Randers closed form
    /// `(F/a)(<U,V> - <Y,U><Y,V>/a^2) + l(U) l(V)` with `a = |Y|` and
    /// `l(W) = <Y,W>/a + <X,W>`.
    pub fn fundamental_tensor(&self, y: &AlgebraVector, u: &AlgebraVector, v: &AlgebraVector) -> Result<f64> {
        let a = self.nonzero(y)?;
        self.metric().check(u)?;
        self.metric().check(v)?;
        let m = self.metric();
        let f = a + m.inner(&self.drift, y);
        let (yu, yv) = (m.inner(y, u), m.inner(y, v));
        let lu = yu / a + m.inner(&self.drift, u);
        let lv = yv / a + m.inner(&self.drift, v);
        Ok((f / a) * (m.inner(u, v) - yu * yv / (a * a)) + lu * lv)
    }

    /// The matrix `[g_Y(b_i, b_j)]`.
    pub fn fundamental_matrix(&self, y: &AlgebraVector) -> Result<DMatrix<f64>> {
        let a = self.nonzero(y)?;
        let m = self.metric();
        let f = a + m.inner(&self.drift, y);
        let gy = m.lower(y);
        let l = &gy / a + m.lower(&self.drift);
        Ok((m.gram() - &gy * gy.transpose() / (a * a)) * (f / a) + &l * l.transpose())
    }

    /// Flag curvature `g_Y(R(V,Y)Y, V) / (g_Y(Y,Y) g_Y(V,V) - g_Y(Y,V)^2)`.
    /// Only defined here for Berwald structures.
    pub fn flag_curvature(&self, y: &AlgebraVector, v: &AlgebraVector) -> Result<FlagSample> {
        if !self.is_berwald {
            return Err(GeometryError::NotBerwald);
        }
        self.nonzero(y)?;
        self.metric().check(v)?;
        let g = self.fundamental_matrix(y)?;
        let gyy = y.dot(&(&g * y));
        let gvv = v.dot(&(&g * v));
        let gyv = y.dot(&(&g * v));
        let area = gyy * gvv - gyv * gyv;
        #[allow(clippy::neg_cmp_op_on_partial_ord)] // also rejects NaN
        if !(area > tolerance::flag(gyy, gvv)) {
            return Err(GeometryError::DegenerateFlag(area));
        }
        let r = self.geometry.curvature.apply_unchecked(v, y, y);
        let value = r.dot(&(&g * v)) / area;
        if !value.is_finite() {
            return Err(GeometryError::NumericalFailure("non-finite flag curvature".into()));
        }
        Ok(FlagSample {
            flagpole: y.clone(),
            edge: v.clone(),
            value,
        })
    }

    pub fn labels(&self) -> Vec<Label> {
        let mut labels = Vec::with_capacity(2);
        if !self.is_berwald {
            labels.push(Label::NonBerwald);
            return labels;
        }
        if self.drift.amax() == 0.0 {
            labels.push(Label::Riemannian);
        } else {
            labels.push(Label::BerwaldNonRiemannian);
        }
        if self.geometry.is_flat() {
            labels.push(Label::LocallyMinkowskian);
        }
        labels
    }

    /// Evaluates the flag curvature on `samples` random flags and keeps the
    /// extremes. Sample `i` draws from its own ChaCha stream, so the result
    /// depends only on `seed` and not on how rayon splits the work.
    pub fn nonpositivity_scan(&self, samples: usize, seed: u64) -> Result<ScanReport> {
        if !self.is_berwald {
            return Err(GeometryError::NotBerwald);
        }
        if samples == 0 {
            return Err(GeometryError::ParamOutOfRange("sample count must be positive".into()));
        }
        if self.geometry.dim() < 2 {
            return Err(GeometryError::ParamOutOfRange("flags need dimension at least 2".into()));
        }
        let drawn: Vec<(usize, FlagSample)> = (0..samples)
            .into_par_iter()
            .map(|i| {
                let mut rng = sample_rng(seed, i as u64);
                loop {
                    let (y, v) = random_orthonormal_pair(self.metric(), &mut rng);
                    match self.flag_curvature(&y, &v) {
                        Ok(s) => return Ok((i, s)),
                        Err(GeometryError::DegenerateFlag(_)) | Err(GeometryError::ZeroVector) => continue,
                        Err(e) => return Err(e),
                    }
                }
            })
            .collect::<Result<_>>()?;
        let pick = |better: fn(f64, f64) -> bool| {
            drawn
                .iter()
                .fold(None::<&(usize, FlagSample)>, |best, cand| match best {
                    Some(b) if !better(cand.1.value, b.1.value) => Some(b),
                    _ => Some(cand),
                })
                .map(|(_, s)| s.clone())
                .expect("at least one sample")
        };
        Ok(ScanReport {
            samples,
            seed,
            max: pick(|a, b| a > b),
            min: pick(|a, b| a < b),
        })
    }
}

/// Independent generator for sample `index` under `seed`.
pub fn sample_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Draws `Y`, `V` with standard normal coordinates and g-orthonormalizes
/// `V` against `Y`. Retries on (measure-zero) degenerate draws.
///
/// # Panics
/// If the dimension is below 2.
pub fn random_orthonormal_pair<R: Rng + ?Sized>(metric: &Metric, rng: &mut R) -> (AlgebraVector, AlgebraVector) {
    let n = metric.dim();
    assert!(n >= 2, "an orthonormal pair needs dimension at least 2");
    loop {
        let y = AlgebraVector::from_fn(n, |_, _| rng.sample(StandardNormal));
        let v = AlgebraVector::from_fn(n, |_, _| rng.sample(StandardNormal));
        let frame = metric.gram_schmidt(&[y, v], 1e-6);
        if let [y, v] = frame.as_slice() {
            return (y.clone(), v.clone());
        }
    }
}
