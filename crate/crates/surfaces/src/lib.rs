//! Closed-form constant-mean-curvature surfaces in `E(κ, τ)` and the
//! numerical mean-curvature oracle used to validate them.
//!
//! Surfaces are [`ParametricSurface`]s: an immersion of a parameter rectangle
//! into a chart of `ekt_geometry`, with analytic or finite-difference
//! derivatives.  [`numeric_mean_curvature`] evaluates `H` from the first and
//! second fundamental forms using the ambient Levi-Civita connection, so it is
//! independent of how each family was derived.

pub mod error;
pub mod families;
pub mod graph;
pub mod surface;

pub use error::{Result, SurfaceError};
pub use families::{
    c_profile, horizontal_slice, horocycle_cylinder, parabolic_coefficient, s_profile, s_radial_range, spherical_helicoid,
    spherical_helicoid_s3, surface_c, surface_p, surface_s, vertical_circle_cylinder, vertical_plane, DOMAIN_CLIP, PROFILE_TOL,
};
pub use graph::{invariant_graph, umbrella, GraphFunction};
pub use surface::{local_geometry, numeric_mean_curvature, Jet, LocalGeometry, ParamRect, ParametricSurface};

/// Version of this crate.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
