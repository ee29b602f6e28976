//! Error type of the evolver.

use ekt_mesh::MeshError;
use thiserror::Error;

use crate::evolve::EvolveReport;

/// Failures of gradient descent and schedules.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvolveError {
    /// Propagated mesh failure.
    #[error(transparent)]
    Mesh(#[from] MeshError),
    /// The line search could not decrease the area with a step above the
    /// minimum; the partial report of the run is attached when available.
    #[error("line search stalled: {message}")]
    Stall {
        /// What stalled and where.
        message: String,
        /// Progress made before the stall.
        report: Option<Box<EvolveReport>>,
    },
    /// Malformed schedule.
    #[error("invalid schedule: {0}")]
    Schedule(String),
}

impl EvolveError {
    /// Stable identifier used in machine-readable diagnostics.
    pub fn kind(&self) -> &'static str {
        match self {
            EvolveError::Mesh(e) => e.kind(),
            EvolveError::Stall { .. } => "StallError",
            EvolveError::Schedule(_) => "ScheduleError",
        }
    }
}

impl From<ekt_geometry::GeometryError> for EvolveError {
    fn from(e: ekt_geometry::GeometryError) -> Self {
        EvolveError::Mesh(MeshError::Geometry(e))
    }
}

/// Convenience alias.
pub type Result<T> = std::result::Result<T, EvolveError>;
