//! Fundamental piece of the compact minimal surfaces of genus `g` in
//! `S² × R` (conformal model), bounded by two slices and three vertical
//! planes of symmetry.

use std::f64::consts::PI;

use ekt_geometry::{Chart, Vector3};
use ekt_mesh::{Constraint, EdgeAttr, TriMesh, Vertex};

use crate::error::{EvolveError, Result};
use crate::evolve::{evolve, Command, EvolveReport, EvolveSchedule};

/// Gradient steps between maintenance sweeps.
pub const MAINTENANCE_INTERVAL: usize = 50;
/// Total gradient steps of the experiment.
pub const GENUS_STEPS: usize = 150;

/// Constraint ids of the piece, in the order of [`genus_piece`]'s list.
pub mod ids {
    /// Inner sphere `|p| = 1` (the slice `t = 0`).
    pub const INNER: usize = 0;
    /// Outer sphere `|p| = e^h` (the slice `t = h`).
    pub const OUTER: usize = 1;
    /// Plane `y = 0`.
    pub const PLANE_Y: usize = 2;
    /// Plane `z = 0`.
    pub const PLANE_Z: usize = 3;
    /// Plane `−x sin(π/(g−1)) + y cos(π/(g−1)) = 0`.
    pub const PLANE_WEDGE: usize = 4;
}

/// Initial triangulation of the pentagon with corners `1, 3, 4, 9, 7`:
/// edge `13` on `y = 0`, `34` on `z = 0`, `49` on the unit sphere, `97` on
/// the wedge plane at angle `π/(g − 1)` and `71` on the sphere of radius
/// `e^h`, fanned from one free interior vertex.  Corners carry the two
/// constraints of their edges.
pub fn genus_piece(g: usize, h: f64) -> Result<TriMesh> {
    if g < 3 || !(h > 0.0) {
        return Err(EvolveError::Schedule(format!("genus experiment needs g ≥ 3 and h > 0, got g = {g}, h = {h}")));
    }
    let phi = PI / (g as f64 - 1.0);
    let outer = h.exp();
    let mid = (h / 2.0).exp();
    let (s, c) = (phi.sin(), phi.cos());
    let tilt = PI / 4.0;
    let constraints = vec![
        Constraint::OriginSphere { radius: 1.0 },
        Constraint::OriginSphere { radius: outer },
        Constraint::LinearPlane { normal: Vector3::y(), offset: 0.0 },
        Constraint::LinearPlane { normal: Vector3::z(), offset: 0.0 },
        Constraint::LinearPlane { normal: Vector3::new(-s, c, 0.0), offset: 0.0 },
    ];
    use ids::*;
    let wedge_dir = |r: f64| Vector3::new(c * tilt.sin(), s * tilt.sin(), tilt.cos()) * r;
    let corners = [
        // 1: outer sphere ∩ {y = 0}
        Vertex::new(Vector3::new(tilt.sin(), 0.0, tilt.cos()) * outer).with_constraints(&[OUTER, PLANE_Y]),
        // 3: {y = 0} ∩ {z = 0}
        Vertex::new(Vector3::new(mid, 0.0, 0.0)).with_constraints(&[PLANE_Y, PLANE_Z]),
        // 4: {z = 0} ∩ inner sphere
        Vertex::new(Vector3::new((phi / 2.0).cos(), (phi / 2.0).sin(), 0.0)).with_constraints(&[PLANE_Z, INNER]),
        // 9: inner sphere ∩ wedge plane
        Vertex::new(wedge_dir(1.0)).with_constraints(&[INNER, PLANE_WEDGE]),
        // 7: wedge plane ∩ outer sphere
        Vertex::new(wedge_dir(outer)).with_constraints(&[PLANE_WEDGE, OUTER]),
    ];
    let edge_constraints = [PLANE_Y, PLANE_Z, INNER, PLANE_WEDGE, OUTER];
    let centre: Vector3<f64> = corners.iter().map(|v| v.x).sum::<Vector3<f64>>() / 5.0;
    let mut vertices = vec![Vertex::new(centre.normalize() * mid)];
    vertices.extend(corners);
    let facets: Vec<[usize; 3]> = (0..5).map(|k| [0, 1 + k, 1 + (k + 1) % 5]).collect();
    let mut mesh = TriMesh::new(Chart::conformal(1.0)?, vertices, facets, constraints)?;
    for (k, &cid) in edge_constraints.iter().enumerate() {
        mesh.set_edge_attr(1 + k, 1 + (k + 1) % 5, EdgeAttr { constraints: vec![cid], fixed: false });
    }
    mesh.validate()?;
    Ok(mesh)
}

/// `depth` refinements, one averaging sweep, equitriangulation, then
/// [`GENUS_STEPS`] gradient steps with averaging and equitriangulation
/// every [`MAINTENANCE_INTERVAL`] steps.
pub fn genus_schedule(depth: usize) -> EvolveSchedule {
    let mut commands = vec![Command::Refine; depth];
    commands.extend([Command::VertexAverage, Command::Equitriangulate]);
    let blocks = GENUS_STEPS / MAINTENANCE_INTERVAL;
    for b in 0..blocks {
        commands.push(Command::Gradient(MAINTENANCE_INTERVAL));
        if b + 1 < blocks {
            commands.extend([Command::VertexAverage, Command::Equitriangulate]);
        }
    }
    EvolveSchedule { commands, stop: None }
}

/// Builds the piece for genus `g` and height `h`, refines it `depth` times
/// and evolves it.  A line-search stall ends the run but is not an error:
/// the partial report is returned with [`EvolveReport::stall`] set.
pub fn genus_experiment(g: usize, h: f64, depth: usize) -> Result<EvolveReport> {
    if depth == 0 {
        return Err(EvolveError::Schedule("genus experiment needs depth ≥ 1".into()));
    }
    let mesh = genus_piece(g, h)?;
    match evolve(mesh, &genus_schedule(depth)) {
        Ok(r) => Ok(r),
        Err(EvolveError::Stall { report: Some(r), .. }) => Ok(*r),
        Err(e) => Err(e),
    }
}

/// Smallest and largest `|p|` over the vertices.
pub fn radial_range(m: &TriMesh) -> (f64, f64) {
    m.vertices.iter().map(|v| v.x.norm()).fold((f64::INFINITY, 0.0), |(lo, hi), r| (lo.min(r), hi.max(r)))
}
