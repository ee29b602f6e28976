//! Euclidean (chart-coordinate) diagnostics of a mesh.

use ekt_geometry::Vector3;
use ekt_mesh::{pairwise_sum, MeshError, TriMesh};

use crate::error::Result;

/// Euclidean quantities of the coordinate image of a closed mesh.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EuclideanDiagnostics {
    /// Enclosed Euclidean volume (signed by the facet orientation).
    pub volume: f64,
    /// Radius of the round sphere with that volume.
    pub implied_radius: f64,
    /// Area-weighted average of the discrete mean curvature.
    pub mean_curvature_avg: f64,
}

/// Enclosed volume by the divergence theorem: the sum of the signed volumes
/// of the tetrahedra joining each facet to the origin.
pub fn euclidean_volume(m: &TriMesh) -> Result<f64> {
    let open = m.boundary_edges().len();
    if open > 0 {
        return Err(MeshError::OpenMesh(open).into());
    }
    let parts: Vec<f64> =
        m.facets.iter().map(|&[a, b, c]| m.vertices[a].x.dot(&m.vertices[b].x.cross(&m.vertices[c].x)) / 6.0).collect();
    Ok(pairwise_sum(&parts))
}

/// Average over interior vertices of the cotangent-formula mean curvature
/// `H_i = ⟨Σ_j (cot α_ij + cot β_ij)(x_i − x_j), n_i⟩ / (4 A_i)`, with `A_i`
/// one third of the Euclidean area of the star and `n_i` the area-weighted
/// vertex normal; weighted by `A_i`.  A round sphere of radius `r` gives
/// `1/r` with the outward orientation.
pub fn mean_curvature_average(m: &TriMesh) -> f64 {
    let n = m.num_vertices();
    let mut lap = vec![Vector3::zeros(); n];
    let mut area = vec![0.0; n];
    let mut normal = vec![Vector3::zeros(); n];
    for f in &m.facets {
        let p = [m.vertices[f[0]].x, m.vertices[f[1]].x, m.vertices[f[2]].x];
        let cross = (p[1] - p[0]).cross(&(p[2] - p[0]));
        let a = cross.norm() / 2.0;
        for k in 0..3 {
            let (i, j) = (f[k], f[(k + 1) % 3]);
            let (pi, pj, pl) = (p[k], p[(k + 1) % 3], p[(k + 2) % 3]);
            // Angle at corner l is opposite to edge (i, j).
            let (u, v) = (pi - pl, pj - pl);
            let cot = u.dot(&v) / u.cross(&v).norm();
            lap[i] += (pi - pj) * cot;
            lap[j] += (pj - pi) * cot;
            area[i] += a / 3.0;
            normal[i] += cross;
        }
    }
    let boundary = m.boundary_vertices();
    let (mut num, mut den) = (0.0, 0.0);
    for i in 0..n {
        if boundary[i] || !(area[i] > 0.0) {
            continue;
        }
        let nrm = normal[i].normalize();
        let h = lap[i].dot(&nrm) / (4.0 * area[i]);
        num += h * area[i];
        den += area[i];
    }
    if den > 0.0 {
        num / den
    } else {
        f64::NAN
    }
}

/// Volume, implied radius and mean-curvature average of a closed mesh.
pub fn euclidean_diagnostics(m: &TriMesh) -> Result<EuclideanDiagnostics> {
    let volume = euclidean_volume(m)?;
    let implied_radius = (3.0 * volume.abs() / (4.0 * std::f64::consts::PI)).cbrt();
    Ok(EuclideanDiagnostics { volume, implied_radius, mean_curvature_avg: mean_curvature_average(m) })
}
