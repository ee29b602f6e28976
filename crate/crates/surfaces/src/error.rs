//! Error type of the surface layer.

use ekt_geometry::GeometryError;
use thiserror::Error;

/// Failures while building or sampling surfaces.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum SurfaceError {
    /// Propagated geometry failure (usually a domain violation).
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    /// Family parameters incompatible with the requested construction.
    #[error("invalid family parameters: {0}")]
    Param(String),
    /// The first fundamental form is (numerically) singular.
    #[error("degenerate immersion: {0}")]
    DegenerateImmersion(String),
}

impl SurfaceError {
    /// Stable identifier used in machine-readable diagnostics.
    pub fn kind(&self) -> &'static str {
        match self {
            SurfaceError::Geometry(e) => e.kind(),
            SurfaceError::Param(_) => "ParamError",
            SurfaceError::DegenerateImmersion(_) => "DegenerateImmersion",
        }
    }
}

/// Convenience alias.
pub type Result<T> = std::result::Result<T, SurfaceError>;
