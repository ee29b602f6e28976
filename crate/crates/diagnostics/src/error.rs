//! Error type of the diagnostics layer.

use ekt_evolver::EvolveError;
use ekt_geometry::GeometryError;
use ekt_mesh::MeshError;
use ekt_surfaces::SurfaceError;
use thiserror::Error;

/// Failures of boundary traces, curve reconstruction and period solving.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum DiagnosticsError {
    /// Propagated geometry failure.
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    /// Propagated surface failure.
    #[error(transparent)]
    Surface(#[from] SurfaceError),
    /// Propagated mesh failure.
    #[error(transparent)]
    Mesh(#[from] MeshError),
    /// Propagated evolver failure (including stalls inside period residuals).
    #[error(transparent)]
    Evolve(#[from] EvolveError),
    /// The marked boundary is not a geodesic of the requested kind.
    #[error("boundary is not a geodesic: {0}")]
    GeodesicMismatch(String),
    /// Operation not defined for this kind of trace.
    #[error("wrong trace kind: {0}")]
    Kind(String),
    /// Samples violate the trace invariants.
    #[error("invalid trace: {0}")]
    Trace(String),
    /// Integration left the domain of the model.
    #[error("domain violation: {0}")]
    Domain(String),
    /// The residual has the same sign at both ends of the bracket.
    #[error("no sign change in bracket: {0}")]
    NoBracket(String),
    /// Malformed argument.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl DiagnosticsError {
    /// Stable identifier used in machine-readable diagnostics.
    pub fn kind(&self) -> &'static str {
        match self {
            DiagnosticsError::Geometry(e) => e.kind(),
            DiagnosticsError::Surface(e) => e.kind(),
            DiagnosticsError::Mesh(e) => e.kind(),
            DiagnosticsError::Evolve(e) => e.kind(),
            DiagnosticsError::GeodesicMismatch(_) => "GeodesicMismatch",
            DiagnosticsError::Kind(_) => "KindError",
            DiagnosticsError::Trace(_) => "TraceError",
            DiagnosticsError::Domain(_) => "DomainError",
            DiagnosticsError::NoBracket(_) => "NoBracket",
            DiagnosticsError::InvalidArgument(_) => "InvalidArgument",
        }
    }
}

/// Convenience alias.
pub type Result<T> = std::result::Result<T, DiagnosticsError>;
