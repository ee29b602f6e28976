//! Exact gradient of the discrete Riemannian area.

use ekt_geometry::Vector3;
use ekt_mesh::TriMesh;

use crate::error::Result;

/// Gradient of the total area with respect to every vertex coordinate,
/// including the variation of the centroid metric, with no constraint
/// handling.
///
/// For a facet with edge vectors `e₁ = b − a`, `e₂ = c − a`, metric `G` at
/// the centroid, `P = e₁ᵀGe₁`, `Q = e₂ᵀGe₂`, `R = e₁ᵀGe₂` and
/// `D = PQ − R²`, the area is `½√D` and
/// `dA = (Q dP + P dQ − 2R dR) / (4√D)`, where moving a corner changes the
/// edges and, by one third of the motion, the centroid at which `G` is read.
pub fn area_gradient_raw(m: &TriMesh) -> Result<Vec<Vector3<f64>>> {
    let chart = m.chart();
    let mut grad = vec![Vector3::zeros(); m.num_vertices()];
    for f in &m.facets {
        let [ia, ib, ic] = *f;
        let (a, b, c) = (m.vertices[ia].x, m.vertices[ib].x, m.vertices[ic].x);
        let (e1, e2) = (b - a, c - a);
        let jet = chart.metric_jet(&((a + b + c) / 3.0))?;
        let (ge1, ge2) = (jet.g * e1, jet.g * e2);
        let (p, q, r) = (e1.dot(&ge1), e2.dot(&ge2), e1.dot(&ge2));
        let d = p * q - r * r;
        if !(d > 0.0) {
            continue;
        }
        let scale = 1.0 / (4.0 * d.sqrt());
        // Metric-variation parts, shared by the three corners.
        let mut dp_g = Vector3::zeros();
        let mut dq_g = Vector3::zeros();
        let mut dr_g = Vector3::zeros();
        for k in 0..3 {
            dp_g[k] = e1.dot(&(jet.dg[k] * e1)) / 3.0;
            dq_g[k] = e2.dot(&(jet.dg[k] * e2)) / 3.0;
            dr_g[k] = e1.dot(&(jet.dg[k] * e2)) / 3.0;
        }
        for (v, s1, s2) in [(ia, -1.0, -1.0), (ib, 1.0, 0.0), (ic, 0.0, 1.0)] {
            let dp = ge1 * (2.0 * s1) + dp_g;
            let dq = ge2 * (2.0 * s2) + dq_g;
            let dr = ge2 * s1 + ge1 * s2 + dr_g;
            grad[v] += (dp * q + dq * p - dr * (2.0 * r)) * scale;
        }
    }
    Ok(grad)
}

/// Area gradient restricted to admissible motions: components along the
/// constraint normals of each vertex are removed and fixed vertices get zero.
pub fn area_gradient(m: &TriMesh) -> Result<Vec<Vector3<f64>>> {
    let raw = area_gradient_raw(m)?;
    Ok(raw.iter().enumerate().map(|(i, g)| m.project_displacement(i, g)).collect())
}

/// Central-difference directional derivative of the area along the
/// straight-line motion `x_i + t d_i` (no re-projection).
pub fn directional_derivative_fd(m: &TriMesh, dir: &[Vector3<f64>], h: f64) -> Result<f64> {
    let shifted = |s: f64| -> Result<f64> {
        let mut c = m.clone();
        for (v, d) in c.vertices.iter_mut().zip(dir) {
            v.x += d * s;
        }
        Ok(c.area()?)
    };
    Ok((shifted(h)? - shifted(-h)?) / (2.0 * h))
}

#[cfg(test)]
mod tests {
    use super::*;
    use ekt_geometry::Chart;
    use ekt_mesh::Vertex;

    #[test]
    fn symmetric_star_is_critical() {
        let mut vs = vec![Vertex::new(Vector3::zeros())];
        for k in 0..6 {
            let t = std::f64::consts::PI * k as f64 / 3.0;
            vs.push(Vertex::new(Vector3::new(t.cos(), t.sin(), 0.0)));
        }
        let fs = (0..6).map(|k| [0, 1 + k, 1 + (k + 1) % 6]).collect();
        let m = TriMesh::new(Chart::cartan(0.0, 0.0), vs, fs, vec![]).unwrap();
        assert!(area_gradient_raw(&m).unwrap()[0].norm() < 1e-12);
    }

    #[test]
    fn single_triangle_matches_closed_form() {
        // Euclidean: ∂A/∂c = (height direction) · |ab| / 2.
        let vs = vec![
            Vertex::new(Vector3::new(0.0, 0.0, 0.0)),
            Vertex::new(Vector3::new(2.0, 0.0, 0.0)),
            Vertex::new(Vector3::new(0.5, 1.0, 0.0)),
        ];
        let m = TriMesh::new(Chart::cartan(0.0, 0.0), vs, vec![[0, 1, 2]], vec![]).unwrap();
        let g = area_gradient_raw(&m).unwrap();
        assert!((g[2] - Vector3::new(0.0, 1.0, 0.0)).norm() < 1e-14);
        assert!((g[0] + g[1] + g[2]).norm() < 1e-14);
    }
}
