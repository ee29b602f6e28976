//! Error type of the mesh layer.

use ekt_geometry::GeometryError;
use thiserror::Error;

/// Failures of mesh construction, validation, mutation and I/O.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum MeshError {
    /// Propagated geometry failure (a point or centroid left the chart).
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    /// The mesh violates one of its structural invariants.
    #[error("invalid mesh: {0}")]
    Invalid(String),
    /// A local operation would have broken the manifold structure.
    #[error("topology error: {0}")]
    Topology(String),
    /// A move was undone because it would have created a degenerate facet.
    #[error("rolled back: {0}")]
    Rollback(String),
    /// Enclosed volume requested for a mesh with boundary.
    #[error("mesh has {0} boundary edges; volume needs a closed surface")]
    OpenMesh(usize),
    /// Malformed datafile.
    #[error("line {line}: {message}")]
    Parse {
        /// One-based line number.
        line: usize,
        /// Description of the problem.
        message: String,
    },
}

impl MeshError {
    /// Stable identifier used in machine-readable diagnostics.
    pub fn kind(&self) -> &'static str {
        match self {
            MeshError::Geometry(e) => e.kind(),
            MeshError::Invalid(_) => "InvalidMesh",
            MeshError::Topology(_) => "TopologyError",
            MeshError::Rollback(_) => "RollbackError",
            MeshError::OpenMesh(_) => "OpenMeshError",
            MeshError::Parse { .. } => "ParseError",
        }
    }
}

/// Convenience alias.
pub type Result<T> = std::result::Result<T, MeshError>;
