//! Conjugate-boundary diagnostics for minimal surfaces in `E(κ, τ)`.
//!
//! [`trace_mesh`] and [`trace_surface`] sample the angle function `ν` and
//! the normal rotation `θ` along boundary geodesics.  From a trace,
//! [`conjugate_lengths`] and [`conjugate_curvature`] read off the lengths
//! and curvatures of the conjugate boundary, and
//! [`reconstruct_symmetry_curve`] rebuilds a conjugate symmetry curve in
//! `ℍ²(κ)`.  [`period_p1`] and [`period_p2`] evaluate the period functions,
//! and [`solve_period`] bisects a period equation.  The [`delaunay`]
//! module provides the horizontal-Delaunay boundary quadrilateral and its
//! evolve-and-trace pipeline.

pub mod conjugate;
pub mod delaunay;
pub mod error;
pub mod period;
pub mod trace;

pub use conjugate::{
    conjugate_curvature, conjugate_lengths, derivative, period_p1, period_p2, reconstruct_symmetry_curve, trapezoid, CurveState,
    SampledCurvature, SymmetryCurve, MAX_RK4_STEP,
};
pub use delaunay::{
    delaunay_piece, delaunay_schedule, ell0_bounds, evolve_delaunay_piece, DelaunayContour, DelaunayPiece, DelaunayRun,
    DELAUNAY_SWEEP, DELAUNAY_SWEEPS,
};
pub use error::{DiagnosticsError, Result};
pub use period::{solve_period, BracketStep, PeriodProblem, PeriodSolution};
pub use trace::{
    check_geodesic, trace_mesh, trace_surface, unwrap_angles, BoundaryTrace, TraceKind, GEODESIC_TOL, MAX_ANGLE_JUMP,
};

/// Version of this crate.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
