//! Exact geometry of the homogeneous 3-manifolds `E(kappa, tau)`.
//!
//! The crate evaluates, in four coordinate models, the Riemannian metric and
//! its derivatives, the canonical orthonormal frame and Levi-Civita
//! connection, the metric cross product and curvature tensor, geodesics,
//! horizontal lifts and the isometries between charts.
//!
//! | Chart | Domain | Parameters |
//! |-------|--------|------------|
//! | [`ChartKind::Cartan`] | `1 + kappa (x² + y²)/4 > 0` | any |
//! | [`ChartKind::HalfSpace`] | `y > 0` | `kappa < 0` |
//! | [`ChartKind::BergerSphere`] | Cartan coordinates | `kappa > 0`, `tau != 0` |
//! | [`ChartKind::ConformalProduct`] | `p != 0` | `kappa > 0`, `tau = 0` |
//!
//! All functions are pure; values may be shared freely between threads.

pub mod chart;
pub mod error;
pub mod frame;
pub mod geodesic;
pub mod maps;
pub mod quadrature;

pub use chart::{
    christoffel_from_jet, contract, lambda_kappa, AmbientPoint, Chart, ChartKind, Christoffel, ConjugatePair, MetricJet,
    SpaceParams, TangentVector,
};
pub use error::{GeometryError, Result};
pub use frame::{
    connection_table, covariant_derivative, cross, cross_components, curvature, curvature_fd, frame_at, orthonormal_frame,
    scalar_curvature, sectional_curvature, FramePacket,
};
pub use geodesic::{
    default_steps, geodesic, geodesic_rk4, horizontal_lift, BaseGeodesic, Geodesic, GeodesicMethod, HorizontalLift,
    STEPS_PER_UNIT_LENGTH,
};
pub use maps::{berger_embed, berger_metric_4d, berger_unembed, c2_to_r4, chart_map, pullback_metric};

/// Re-exported linear-algebra types used in the public API.
pub use nalgebra::{Matrix2, Matrix3, Vector2, Vector3};
pub use num_complex::Complex64;

/// Version of this crate.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
