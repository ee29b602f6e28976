//! Constrained triangulated surfaces in a coordinate chart of `E(κ, τ)`.
//!
//! A [`TriMesh`] stores chart coordinates, oriented triangular facets and
//! per-vertex / per-edge constraint tags.  Facet area is Riemannian, with
//! the metric frozen at the facet centroid.  The mesh supports 1-to-4
//! refinement, area-weighted vertex averaging, edge-flip equitriangulation
//! and removal of degenerate elements, and is read from and written to a
//! plain-text datafile (see [`io`]) and exported to OFF/OBJ.

pub mod constraint;
pub mod error;
pub mod io;
pub mod mesh;
pub mod ops;

pub use constraint::{Constraint, CONSTRAINT_TOL};
pub use error::{MeshError, Result};
pub use io::{fmt_g, parse_datafile, to_datafile, to_obj, to_off};
pub use mesh::{area_with_metric, edge_key, pairwise_sum, EdgeAttr, EdgeKey, TriMesh, Vertex, FACET_FLOOR};
pub use ops::{AverageReport, CullReport};

/// Version of this crate.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
