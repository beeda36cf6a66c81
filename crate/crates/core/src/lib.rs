//! Comparison curvature, dead ends and transport curvature for finitely
//! generated groups.
//!
//! Groups implement [`Group`]. Word metrics come from a breadth-first
//! [`MetricTable`], optionally cached on disk, and every closed-form length
//! in the crate is checked against it. Curvature and transport values are
//! generic over [`Scalar`]; [`Rational`] gives exact results.

pub mod builtin;
pub mod cache;
pub mod curvature;
pub mod deadend;
pub mod error;
pub mod group;
pub mod heisenberg;
pub mod houghton;
pub mod lamplighter;
pub mod metric;
pub mod scalar;
pub mod transport;
pub mod verify;

pub use curvature::{CurvatureReport, Mode};
pub use error::{Error, Result};
pub use group::{GeneratorSet, Group};
pub use metric::{bfs_metric, word_length, MetricTable, DEFAULT_BUDGET};
pub use scalar::Scalar;
pub use transport::TransportResult;

/// Exact rational scalar.
pub type Rational = num_rational::BigRational;
pub type ExactCurvatureReport = CurvatureReport<Rational>;
pub type FloatCurvatureReport = CurvatureReport<f64>;
pub type ExactTransportResult = TransportResult<Rational>;
pub type FloatTransportResult = TransportResult<f64>;
