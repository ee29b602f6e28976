//! Error type shared by the geometry kernel.

use thiserror::Error;

/// Failures of the geometry kernel.
///
/// Every variant maps to a stable machine-readable kind through
/// [`GeometryError::kind`], which the command-line front end prints verbatim.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    /// A point (or an intermediate stencil point) lies outside the chart domain.
    #[error("point outside chart domain: {0}")]
    Domain(String),
    /// The operation has no closed form for the requested chart.
    #[error("operation not supported for chart {0}")]
    UnsupportedChart(&'static str),
    /// No chart map is implemented between the two charts.
    #[error("no chart map from {from} to {to}")]
    UnsupportedPair { from: &'static str, to: &'static str },
    /// The chart parameters violate the chart's invariants.
    #[error("invalid chart parameters: {0}")]
    InvalidChart(String),
    /// An argument violates a documented precondition.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl GeometryError {
    /// Stable identifier used in machine-readable diagnostics.
    pub fn kind(&self) -> &'static str {
        match self {
            GeometryError::Domain(_) => "DomainError",
            GeometryError::UnsupportedChart(_) => "UnsupportedChart",
            GeometryError::UnsupportedPair { .. } => "UnsupportedPair",
            GeometryError::InvalidChart(_) => "InvalidChart",
            GeometryError::InvalidArgument(_) => "InvalidArgument",
        }
    }
}

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, GeometryError>;
