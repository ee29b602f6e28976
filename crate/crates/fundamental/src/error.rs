//! Error type of the fundamental-data layer.

use ekt_geometry::GeometryError;
use ekt_surfaces::SurfaceError;
use thiserror::Error;

/// Failures while computing fundamental data or residual fields.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum FundamentalError {
    /// Propagated surface failure (degenerate immersion, parameter errors).
    #[error(transparent)]
    Surface(#[from] SurfaceError),
    /// Propagated geometry failure.
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    /// Conjugation data violating its invariants, or a quantity undefined
    /// for the given parameters.
    #[error("inconsistent specification: {0}")]
    Spec(String),
    /// Grid too coarse for the finite-difference stencils.
    #[error("invalid grid: {0}")]
    Grid(String),
}

impl FundamentalError {
    /// Stable identifier used in machine-readable diagnostics.
    pub fn kind(&self) -> &'static str {
        match self {
            FundamentalError::Surface(e) => e.kind(),
            FundamentalError::Geometry(e) => e.kind(),
            FundamentalError::Spec(_) => "SpecError",
            FundamentalError::Grid(_) => "InvalidArgument",
        }
    }
}

/// Convenience alias.
pub type Result<T> = std::result::Result<T, FundamentalError>;
