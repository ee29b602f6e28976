//! Fundamental data `(A, T, J, ν)` of surfaces in `E(κ, τ)`: pointwise
//! evaluation, grid residuals of the five compatibility equations, the sister
//! (Daniel) transformation of the data, the Abresch–Rosenberg function `q`
//! and the stability operator shared by sister surfaces.
//!
//! Grid computations are pure functions of their inputs; each node is
//! evaluated independently, so results do not depend on evaluation order.

pub mod data;
pub mod error;
pub mod residuals;

pub use data::{daniel_transform, fundamental_data, surface_frame, ConjugateSpec, FundamentalSample, SurfaceFrame, SPEC_TOL};
pub use error::{FundamentalError, Result};
pub use residuals::{
    abresch_rosenberg_q, brioschi, gauss_codazzi_residuals, gauss_codazzi_residuals_with, stability_apply, Grid, GridField,
    Residuals, Stencil, Q_STEP,
};

/// Version of this crate.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
