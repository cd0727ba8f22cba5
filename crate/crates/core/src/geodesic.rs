//! Geodesics of left-invariant metrics, reduced to the algebra.
//!
//! A curve `t -> g(t)` with body velocity `u(t) = g^{-1} g'(t)` is a geodesic
//! iff `u' = -nabla_u u` with the left-invariant connection. The energy
//! `<u,u>` is conserved, and for a parallel field `X` so is `<X,u>`.

use serde::Serialize;

use crate::error::{GeometryError, Result};
use crate::levi_civita::{Connection, Geometry};
use crate::randers::RandersStructure;
use crate::AlgebraVector;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GeodesicState {
    pub time: f64,
    #[serde(serialize_with = "crate::serialize_vector")]
    pub velocity: AlgebraVector,
}

fn check_inputs(connection: &Connection, u0: &AlgebraVector, t_end: f64, steps: usize) -> Result<()> {
    if u0.len() != connection.dim() {
        return Err(GeometryError::DimensionMismatch {
            expected: connection.dim(),
            found: u0.len(),
        });
    }
    if steps == 0 {
        return Err(GeometryError::ParamOutOfRange("steps must be at least 1".into()));
    }
    if !t_end.is_finite() {
        return Err(GeometryError::ParamOutOfRange("time horizon must be finite".into()));
    }
    if u0.iter().any(|x| !x.is_finite()) {
        return Err(GeometryError::NumericalFailure("non-finite initial velocity".into()));
    }
    if u0.amax() == 0.0 {
        return Err(GeometryError::ZeroVector);
    }
    Ok(())
}

/// Fixed-step classical RK4 on `u' = -nabla_u u`, calling `visit` on the
/// initial state and after every step.
pub fn integrate(
    connection: &Connection,
    u0: &AlgebraVector,
    t_end: f64,
    steps: usize,
    mut visit: impl FnMut(f64, &AlgebraVector),
) -> Result<AlgebraVector> {
    check_inputs(connection, u0, t_end, steps)?;
    let h = t_end / steps as f64;
    let field = |u: &AlgebraVector| -connection.apply_unchecked(u, u);
    let mut u = u0.clone();
    visit(0.0, &u);
    for step in 1..=steps {
        let k1 = field(&u);
        let k2 = field(&(&u + &k1 * (0.5 * h)));
        let k3 = field(&(&u + &k2 * (0.5 * h)));
        let k4 = field(&(&u + &k3 * h));
        u += (k1 + (k2 + k3) * 2.0 + k4) * (h / 6.0);
        if u.iter().any(|x| !x.is_finite()) {
            return Err(GeometryError::NumericalFailure(format!(
                "non-finite velocity at step {step}"
            )));
        }
        visit(step as f64 * h, &u);
    }
    Ok(u)
}

pub fn geodesic_flow(geometry: &Geometry, u0: &AlgebraVector, t_end: f64, steps: usize) -> Result<Vec<GeodesicState>> {
    let mut states = Vec::with_capacity(steps + 1);
    integrate(&geometry.connection, u0, t_end, steps, |time, u| {
        states.push(GeodesicState {
            time,
            velocity: u.clone(),
        })
    })?;
    Ok(states)
}

/// Largest `|<u(t),u(t)> - <u0,u0>|` along the flow.
pub fn energy_drift(geometry: &Geometry, u0: &AlgebraVector, t_end: f64, steps: usize) -> Result<f64> {
    let e0 = geometry.metric.inner(u0, u0);
    let mut worst = 0.0f64;
    integrate(&geometry.connection, u0, t_end, steps, |_, u| {
        worst = worst.max((geometry.metric.inner(u, u) - e0).abs());
    })?;
    Ok(worst)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConservationReport {
    /// max `|<u,u> - <u0,u0>|`
    pub energy_drift: f64,
    /// max `|<X,u> - <X,u0>|`
    pub drift_pairing_drift: f64,
    /// max `|F(u) - F(u0)|`
    pub finsler_drift: f64,
}

pub fn berwald_conservation_check(
    randers: &RandersStructure,
    u0: &AlgebraVector,
    t_end: f64,
    steps: usize,
) -> Result<ConservationReport> {
    if !randers.is_berwald() {
        return Err(GeometryError::NotBerwald);
    }
    let metric = randers.metric();
    let x = randers.drift();
    let e0 = metric.inner(u0, u0);
    let p0 = metric.inner(x, u0);
    let f0 = e0.sqrt() + p0;
    let mut report = ConservationReport {
        energy_drift: 0.0,
        drift_pairing_drift: 0.0,
        finsler_drift: 0.0,
    };
    integrate(&randers.geometry().connection, u0, t_end, steps, |_, u| {
        let e = metric.inner(u, u);
        let p = metric.inner(x, u);
        report.energy_drift = report.energy_drift.max((e - e0).abs());
        report.drift_pairing_drift = report.drift_pairing_drift.max((p - p0).abs());
        report.finsler_drift = report.finsler_drift.max((e.sqrt() + p - f0).abs());
    })?;
    Ok(report)
}
