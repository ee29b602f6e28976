//! Constrained gradient-descent area minimisation of triangulated surfaces
//! under a chart metric.
//!
//! [`area_gradient`] is the exact gradient of the discrete Riemannian area,
//! [`gradient_step`] moves along it with a backtracking line search, and
//! [`evolve`] runs a schedule of gradient steps, refinements and mesh
//! maintenance, recording an area trace.  [`euclidean_diagnostics`] reports
//! the Euclidean volume and mean curvature of the coordinate image, and
//! [`genus_experiment`] evolves the fundamental piece of the compact
//! minimal surfaces of genus `g` in `S² × R`.

pub mod error;
pub mod euclidean;
pub mod evolve;
pub mod genus;
pub mod gradient;
pub mod step;

pub use error::{EvolveError, Result};
pub use euclidean::{euclidean_diagnostics, euclidean_volume, mean_curvature_average, EuclideanDiagnostics};
pub use evolve::{evolve, Command, EvolveReport, EvolveSchedule, StopRule, TraceRow};
pub use genus::{genus_experiment, genus_piece, genus_schedule, radial_range, GENUS_STEPS, MAINTENANCE_INTERVAL};
pub use gradient::{area_gradient, area_gradient_raw, directional_derivative_fd};
pub use step::{gradient_step, LineSearch, StepInfo, INITIAL_STEP, MIN_STEP, STATIONARY_GRADIENT};

/// Version of this crate.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
