//! Left-invariant Riemannian and Randers geometry on Lie groups.
//!
//! Everything is computed at the level of the Lie algebra: a metric is a Gram
//! matrix, a left-invariant vector field is a coordinate vector, and the
//! Levi-Civita connection and curvature are constant tensors obtained from
//! the structure constants by the Koszul formula. On top of that the crate
//! builds Randers metrics `F(y) = sqrt(<y,y>) + <X,y>`, decides whether they
//! are of Berwald type, and evaluates their flag curvature.

// index loops mirror the tensor notation
#![allow(clippy::needless_range_loop)]

pub mod algebra;
pub mod catalog;
pub mod error;
pub mod geodesic;
pub mod levi_civita;
pub mod metric;
pub mod parallel;
pub mod randers;
pub mod tolerance;

pub use algebra::{LieAlgebra, MilnorFrame};
pub use catalog::{preset, Preset, PresetName, PresetParams};
pub use error::{ErrorClass, GeometryError, Result};
pub use levi_civita::{sectional_curvature, Connection, Curvature, Geometry};
pub use metric::Metric;
pub use parallel::{mu_coefficients, parallel_condition_unimodular, parallel_fields, MuCoefficients, ParallelSpace};
pub use randers::{FlagSample, Label, RandersStructure, ScanReport};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Coordinates of an element of the Lie algebra in its declared basis.
pub type AlgebraVector = nalgebra::DVector<f64>;

pub(crate) fn serialize_vector<S: serde::Serializer>(v: &AlgebraVector, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(v.iter())
}

pub(crate) fn serialize_vectors<S: serde::Serializer>(
    vs: &[AlgebraVector],
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(vs.iter().map(|v| v.iter().copied().collect::<Vec<f64>>()))
}

pub(crate) fn serialize_matrix_columns<S: serde::Serializer>(
    m: &nalgebra::DMatrix<f64>,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(m.column_iter().map(|c| c.iter().copied().collect::<Vec<f64>>()))
}
