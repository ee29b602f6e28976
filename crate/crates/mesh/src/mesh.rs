//! Triangulated surfaces in a coordinate chart, with Riemannian area.

use std::collections::BTreeMap;

use ekt_geometry::{Chart, Matrix3, Vector3};

use crate::constraint::{Constraint, CONSTRAINT_TOL};
use crate::error::{MeshError, Result};

/// Facets whose Riemannian area falls below this value count as degenerate.
pub const FACET_FLOOR: f64 = 1e-12;

/// Maximum number of alternating projections used to meet several
/// constraints at once.
const MAX_PROJECTION_ROUNDS: usize = 200;

/// A mesh vertex.
#[derive(Debug, Clone, PartialEq)]
pub struct Vertex {
    /// Chart coordinates.
    pub x: Vector3<f64>,
    /// Indices into [`TriMesh::constraints`] the vertex must satisfy.
    pub constraints: Vec<usize>,
    /// Fixed vertices never move.
    pub fixed: bool,
}

impl Vertex {
    /// A free vertex.
    pub fn new(x: Vector3<f64>) -> Self {
        Self { x, constraints: Vec::new(), fixed: false }
    }

    /// Adds constraint tags.
    pub fn with_constraints(mut self, ids: &[usize]) -> Self {
        self.constraints.extend_from_slice(ids);
        self.constraints.sort_unstable();
        self.constraints.dedup();
        self
    }

    /// Marks the vertex fixed.
    pub fn fixed(mut self) -> Self {
        self.fixed = true;
        self
    }
}

/// Attributes of an edge; inherited by the halves of the edge when it is split.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct EdgeAttr {
    /// Constraints imposed on points created on this edge.
    pub constraints: Vec<usize>,
    /// Points created on a fixed edge are fixed.
    pub fixed: bool,
}

/// Unordered edge key `(min, max)`.
pub type EdgeKey = (usize, usize);

/// Canonical key of the edge `{a, b}`.
pub fn edge_key(a: usize, b: usize) -> EdgeKey {
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}

/// A triangulated surface with consistently oriented facets.
#[derive(Debug, Clone, PartialEq)]
pub struct TriMesh {
    chart: Chart,
    /// Vertices.
    pub vertices: Vec<Vertex>,
    /// Facets as oriented vertex triples.
    pub facets: Vec<[usize; 3]>,
    /// Constraint sets referenced by vertices and edges.
    pub constraints: Vec<Constraint>,
    edge_attrs: BTreeMap<EdgeKey, EdgeAttr>,
}

impl TriMesh {
    /// Builds and validates a mesh.  Vertices are projected onto their
    /// constraints first.
    pub fn new(chart: Chart, vertices: Vec<Vertex>, facets: Vec<[usize; 3]>, constraints: Vec<Constraint>) -> Result<Self> {
        Self::with_edges(chart, vertices, facets, constraints, BTreeMap::new())
    }

    /// As [`TriMesh::new`], with edge attributes.
    pub fn with_edges(
        chart: Chart,
        vertices: Vec<Vertex>,
        facets: Vec<[usize; 3]>,
        constraints: Vec<Constraint>,
        edge_attrs: BTreeMap<EdgeKey, EdgeAttr>,
    ) -> Result<Self> {
        let mut mesh = Self { chart, vertices, facets, constraints, edge_attrs };
        mesh.edge_attrs.retain(|_, a| !a.constraints.is_empty() || a.fixed);
        for i in 0..mesh.vertices.len() {
            mesh.project_vertex(i);
        }
        mesh.validate()?;
        Ok(mesh)
    }

    /// Chart in which the coordinates live.
    pub fn chart(&self) -> Chart {
        self.chart
    }

    /// Number of vertices.
    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    /// Number of facets.
    pub fn num_facets(&self) -> usize {
        self.facets.len()
    }

    /// Number of edges.
    pub fn num_edges(&self) -> usize {
        self.edges().len()
    }

    /// `V − E + F`.
    pub fn euler_characteristic(&self) -> i64 {
        self.num_vertices() as i64 - self.num_edges() as i64 + self.num_facets() as i64
    }

    /// Attributes of edge `{a, b}` (default when untagged).
    pub fn edge_attr(&self, a: usize, b: usize) -> EdgeAttr {
        self.edge_attrs.get(&edge_key(a, b)).cloned().unwrap_or_default()
    }

    /// Sets the attributes of edge `{a, b}`.
    pub fn set_edge_attr(&mut self, a: usize, b: usize, attr: EdgeAttr) {
        let k = edge_key(a, b);
        if attr.constraints.is_empty() && !attr.fixed {
            self.edge_attrs.remove(&k);
        } else {
            self.edge_attrs.insert(k, attr);
        }
    }

    /// All tagged edges.
    pub fn edge_attrs(&self) -> &BTreeMap<EdgeKey, EdgeAttr> {
        &self.edge_attrs
    }

    pub(crate) fn edge_attrs_mut(&mut self) -> &mut BTreeMap<EdgeKey, EdgeAttr> {
        &mut self.edge_attrs
    }

    /// Every edge with the facets containing it, in key order.
    pub fn edges(&self) -> BTreeMap<EdgeKey, Vec<usize>> {
        let mut map: BTreeMap<EdgeKey, Vec<usize>> = BTreeMap::new();
        for (fi, f) in self.facets.iter().enumerate() {
            for k in 0..3 {
                map.entry(edge_key(f[k], f[(k + 1) % 3])).or_default().push(fi);
            }
        }
        map
    }

    /// Edges with exactly one incident facet.
    pub fn boundary_edges(&self) -> Vec<EdgeKey> {
        self.edges().into_iter().filter(|(_, fs)| fs.len() == 1).map(|(k, _)| k).collect()
    }

    /// Boundary flag of each vertex (true when it lies on a boundary edge).
    pub fn boundary_vertices(&self) -> Vec<bool> {
        let mut b = vec![false; self.vertices.len()];
        for (u, v) in self.boundary_edges() {
            b[u] = true;
            b[v] = true;
        }
        b
    }

    /// Whether the mesh has no boundary.
    pub fn is_closed(&self) -> bool {
        self.boundary_edges().is_empty()
    }

    /// Facets incident to each vertex, in increasing facet order.
    pub fn vertex_facets(&self) -> Vec<Vec<usize>> {
        let mut star = vec![Vec::new(); self.vertices.len()];
        for (fi, f) in self.facets.iter().enumerate() {
            for &v in f {
                star[v].push(fi);
            }
        }
        star
    }

    /// Neighbouring vertices of each vertex, sorted.
    pub fn vertex_neighbors(&self) -> Vec<Vec<usize>> {
        let mut nb = vec![Vec::new(); self.vertices.len()];
        for (u, v) in self.edges().into_keys() {
            nb[u].push(v);
            nb[v].push(u);
        }
        for n in &mut nb {
            n.sort_unstable();
        }
        nb
    }

    /// Position of vertex `i`.
    pub fn position(&self, i: usize) -> Vector3<f64> {
        self.vertices[i].x
    }

    /// Riemannian area of a triangle with the given corners: the metric is
    /// frozen at the coordinate centroid and the area is `½√(PQ − R²)` with
    /// `P = ⟨e₁, e₁⟩`, `Q = ⟨e₂, e₂⟩`, `R = ⟨e₁, e₂⟩`.
    pub fn triangle_area(&self, a: &Vector3<f64>, b: &Vector3<f64>, c: &Vector3<f64>) -> Result<f64> {
        let m = (a + b + c) / 3.0;
        let g = self.chart.metric(&m)?;
        Ok(area_with_metric(&g, &(b - a), &(c - a)))
    }

    /// Riemannian area of facet `f`.
    pub fn facet_area(&self, f: usize) -> Result<f64> {
        let [a, b, c] = self.facets[f];
        self.triangle_area(&self.vertices[a].x, &self.vertices[b].x, &self.vertices[c].x)
    }

    /// Areas of all facets.
    pub fn facet_areas(&self) -> Result<Vec<f64>> {
        (0..self.facets.len()).map(|f| self.facet_area(f)).collect()
    }

    /// Total Riemannian area (pairwise summation in facet order).
    pub fn area(&self) -> Result<f64> {
        Ok(pairwise_sum(&self.facet_areas()?))
    }

    /// Riemannian length of a segment, metric frozen at its midpoint.
    pub fn segment_length(&self, a: &Vector3<f64>, b: &Vector3<f64>) -> Result<f64> {
        let g = self.chart.metric(&((a + b) / 2.0))?;
        let e = b - a;
        Ok(e.dot(&(g * e)).max(0.0).sqrt())
    }

    /// Riemannian length of edge `{a, b}`.
    pub fn edge_length(&self, a: usize, b: usize) -> Result<f64> {
        self.segment_length(&self.vertices[a].x, &self.vertices[b].x)
    }

    /// Largest distance of a vertex from one of its constraint sets.
    pub fn constraint_violation(&self) -> f64 {
        (0..self.vertices.len()).map(|i| self.vertex_violation(i, &self.vertices[i].x)).fold(0.0, f64::max)
    }

    /// Distance of `x` from the constraints of vertex `i`.
    pub fn vertex_violation(&self, i: usize, x: &Vector3<f64>) -> f64 {
        self.vertices[i].constraints.iter().map(|&c| self.constraints[c].distance(x)).fold(0.0, f64::max)
    }

    /// Nearest point of `x` on the intersection of the constraints of vertex
    /// `i` (alternating projections; exact for a single constraint).
    pub fn project_point(&self, i: usize, x: &Vector3<f64>) -> Vector3<f64> {
        let ids = &self.vertices[i].constraints;
        let mut p = *x;
        if ids.is_empty() {
            return p;
        }
        for _ in 0..MAX_PROJECTION_ROUNDS {
            for &c in ids {
                p = self.constraints[c].project(&p);
            }
            if ids.len() == 1 || self.vertex_violation(i, &p) < 1e-14 {
                break;
            }
        }
        p
    }

    /// Projects vertex `i` onto its constraints.
    pub fn project_vertex(&mut self, i: usize) {
        self.vertices[i].x = self.project_point(i, &self.vertices[i].x);
    }

    /// Projects a displacement of vertex `i` onto the tangent space of its
    /// constraint sets (Euclidean orthogonal complement of their normals).
    /// Fixed vertices get zero.
    pub fn project_displacement(&self, i: usize, d: &Vector3<f64>) -> Vector3<f64> {
        let v = &self.vertices[i];
        if v.fixed {
            return Vector3::zeros();
        }
        let mut basis: Vec<Vector3<f64>> = Vec::new();
        for &c in &v.constraints {
            let mut n = self.constraints[c].normal(&v.x);
            for b in &basis {
                n -= b * b.dot(&n);
            }
            let len = n.norm();
            if len > 1e-10 {
                basis.push(n / len);
            }
        }
        let mut out = *d;
        for b in &basis {
            out -= b * b.dot(&out);
        }
        out
    }

    /// Checks the structural invariants: indices in range, non-repeating
    /// corners, at most two facets per edge, consistent orientation, vertices
    /// on their constraints, every vertex used, constraint ids valid, every
    /// facet in the chart with area above [`FACET_FLOOR`].
    pub fn validate(&self) -> Result<()> {
        let n = self.vertices.len();
        for (i, v) in self.vertices.iter().enumerate() {
            if let Some(&c) = v.constraints.iter().find(|&&c| c >= self.constraints.len()) {
                return Err(MeshError::Invalid(format!("vertex {i} references missing constraint {c}")));
            }
            self.chart.check(&v.x)?;
        }
        for (&(a, b), attr) in &self.edge_attrs {
            if a >= n || b >= n {
                return Err(MeshError::Invalid(format!("edge attribute on missing edge ({a}, {b})")));
            }
            if let Some(&c) = attr.constraints.iter().find(|&&c| c >= self.constraints.len()) {
                return Err(MeshError::Invalid(format!("edge ({a}, {b}) references missing constraint {c}")));
            }
        }
        let mut used = vec![false; n];
        let mut directed: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        for (fi, f) in self.facets.iter().enumerate() {
            if f.iter().any(|&v| v >= n) {
                return Err(MeshError::Invalid(format!("facet {fi} has a vertex index out of range")));
            }
            if f[0] == f[1] || f[1] == f[2] || f[0] == f[2] {
                return Err(MeshError::Invalid(format!("facet {fi} repeats a vertex")));
            }
            for k in 0..3 {
                used[f[k]] = true;
                if let Some(other) = directed.insert((f[k], f[(k + 1) % 3]), fi) {
                    return Err(MeshError::Invalid(format!(
                        "facets {other} and {fi} traverse edge ({}, {}) in the same direction",
                        f[k],
                        f[(k + 1) % 3]
                    )));
                }
            }
        }
        if let Some(i) = used.iter().position(|u| !u) {
            return Err(MeshError::Invalid(format!("vertex {i} is not used by any facet")));
        }
        for (k, fs) in self.edges() {
            if fs.len() > 2 {
                return Err(MeshError::Invalid(format!("edge {k:?} has {} facets", fs.len())));
            }
        }
        let worst = self.constraint_violation();
        if worst > CONSTRAINT_TOL {
            return Err(MeshError::Invalid(format!("constraint violated by {worst:e}")));
        }
        for fi in 0..self.facets.len() {
            let a = self.facet_area(fi)?;
            if !(a > FACET_FLOOR) {
                return Err(MeshError::Invalid(format!("facet {fi} has area {a:e}")));
            }
        }
        Ok(())
    }

    /// Euclidean (chart-coordinate) normal of facet `f`, not normalised.
    pub fn facet_normal(&self, f: usize) -> Vector3<f64> {
        let [a, b, c] = self.facets[f];
        let (pa, pb, pc) = (self.vertices[a].x, self.vertices[b].x, self.vertices[c].x);
        (pb - pa).cross(&(pc - pa))
    }

    /// Drops vertices not referenced by any facet and renumbers the rest,
    /// keeping their relative order.  Returns the old-to-new map.
    pub fn compact(&mut self) -> Vec<Option<usize>> {
        let mut used = vec![false; self.vertices.len()];
        for f in &self.facets {
            for &v in f {
                used[v] = true;
            }
        }
        let mut map = vec![None; self.vertices.len()];
        let mut next = 0;
        for (i, u) in used.iter().enumerate() {
            if *u {
                map[i] = Some(next);
                next += 1;
            }
        }
        let old = std::mem::take(&mut self.vertices);
        self.vertices = old.into_iter().zip(&used).filter(|(_, u)| **u).map(|(v, _)| v).collect();
        for f in &mut self.facets {
            for v in f.iter_mut() {
                *v = map[*v].expect("facet vertices are used");
            }
        }
        let attrs = std::mem::take(&mut self.edge_attrs);
        for ((a, b), attr) in attrs {
            if let (Some(a), Some(b)) = (map[a], map[b]) {
                self.edge_attrs.insert(edge_key(a, b), attr);
            }
        }
        map
    }

    /// Maps every coordinate through `f` (then re-projects onto constraints).
    pub fn map_coordinates<F: Fn(&Vector3<f64>) -> Vector3<f64>>(&mut self, f: F) {
        for v in &mut self.vertices {
            v.x = f(&v.x);
        }
        for i in 0..self.vertices.len() {
            self.project_vertex(i);
        }
    }
}

/// `½√(PQ − R²)` for edge vectors `e1`, `e2` and metric `g`.
pub fn area_with_metric(g: &Matrix3<f64>, e1: &Vector3<f64>, e2: &Vector3<f64>) -> f64 {
    let ge1 = g * e1;
    let p = e1.dot(&ge1);
    let q = e2.dot(&(g * e2));
    let r = e2.dot(&ge1);
    0.5 * (p * q - r * r).max(0.0).sqrt()
}

/// Pairwise (tree) summation: deterministic and with `O(log n)` error growth.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    match xs.len() {
        0 => 0.0,
        n if n <= 8 => xs.iter().sum(),
        n => pairwise_sum(&xs[..n / 2]) + pairwise_sum(&xs[n / 2..]),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tetra() -> TriMesh {
        let v = [
            Vector3::new(1.0, 1.0, 1.0),
            Vector3::new(1.0, -1.0, -1.0),
            Vector3::new(-1.0, 1.0, -1.0),
            Vector3::new(-1.0, -1.0, 1.0),
        ];
        let facets = vec![[0, 1, 2], [0, 3, 1], [0, 2, 3], [1, 3, 2]];
        TriMesh::new(Chart::cartan(0.0, 0.0), v.iter().map(|&x| Vertex::new(x)).collect(), facets, vec![]).unwrap()
    }

    #[test]
    fn euclidean_area_of_tetrahedron() {
        let m = tetra();
        // Regular tetrahedron with edge 2√2: area = 4 · (√3/4) · 8.
        assert!((m.area().unwrap() - 8.0 * 3f64.sqrt()).abs() < 1e-12);
        assert!(m.is_closed());
        assert_eq!(m.euler_characteristic(), 2);
    }

    #[test]
    fn validation_catches_bad_orientation() {
        let m = tetra();
        let mut facets = m.facets.clone();
        facets[0] = [0, 2, 1];
        let e = TriMesh::new(m.chart(), m.vertices.clone(), facets, vec![]).unwrap_err();
        assert_eq!(e.kind(), "InvalidMesh");
    }

    #[test]
    fn area_outside_chart_is_domain_error() {
        let chart = Chart::conformal(1.0).unwrap();
        let m = TriMesh {
            chart,
            vertices: vec![
                Vertex::new(Vector3::new(1.0, 0.0, 0.0)),
                Vertex::new(Vector3::new(-1.0, 1.0, 0.0)),
                Vertex::new(Vector3::new(0.0, -1.0, 0.0)),
            ],
            facets: vec![[0, 1, 2]],
            constraints: vec![],
            edge_attrs: BTreeMap::new(),
        };
        assert_eq!(m.area().unwrap_err().kind(), "DomainError");
    }

    #[test]
    fn multiple_constraints_meet_at_the_corner() {
        let cs = vec![
            Constraint::OriginSphere { radius: 2.0 },
            Constraint::LinearPlane { normal: Vector3::z(), offset: 0.0 },
            Constraint::LinearPlane { normal: Vector3::y(), offset: 0.0 },
        ];
        let vs = vec![
            Vertex::new(Vector3::new(1.5, 0.3, 0.2)).with_constraints(&[0, 1]),
            Vertex::new(Vector3::new(0.0, 0.0, 1.0)),
            Vertex::new(Vector3::new(0.0, 1.0, 0.0)),
        ];
        let m = TriMesh::new(Chart::cartan(0.0, 0.0), vs, vec![[0, 1, 2]], cs).unwrap();
        let x = m.position(0);
        assert!((x.norm() - 2.0).abs() < 1e-12 && x.z.abs() < 1e-12);
        let d = m.project_displacement(0, &Vector3::new(1.0, 1.0, 1.0));
        assert!(d.dot(&x).abs() < 1e-12 && d.z.abs() < 1e-12);
    }

    #[test]
    fn pairwise_sum_matches_naive() {
        let xs: Vec<f64> = (0..1000).map(|i| (i as f64).sin()).collect();
        assert!((pairwise_sum(&xs) - xs.iter().sum::<f64>()).abs() < 1e-12);
    }
}
