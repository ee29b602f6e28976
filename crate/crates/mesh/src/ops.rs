//! Refinement and mesh-quality maintenance.

use std::collections::BTreeMap;

use ekt_geometry::Vector3;

use crate::error::{MeshError, Result};
use crate::mesh::{edge_key, EdgeAttr, EdgeKey, TriMesh, Vertex, FACET_FLOOR};

/// Upper bound on equitriangulation sweeps (each sweep flips every edge
/// whose flip shortens its quadrilateral's longest edge).
const MAX_FLIP_SWEEPS: usize = 100;

/// Outcome of one vertex-averaging sweep.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct AverageReport {
    /// Vertices moved.
    pub moved: usize,
    /// Moves undone (degenerate or inverted facet, or area increase).
    pub rolled_back: usize,
}

/// Outcome of a culling pass.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct CullReport {
    /// Edges collapsed.
    pub collapsed: usize,
    /// Edges flipped to remove flat facets.
    pub flipped: usize,
    /// Offending edges or facets left in place because every repair would
    /// have broken the topology or the constraints.
    pub skipped: usize,
}

impl TriMesh {
    /// Splits every facet into four through the edge midpoints.  Midpoints
    /// inherit the constraints and the fixed flag of their edge and are
    /// projected onto the constraints; the halves of a split edge inherit its
    /// attributes.  `V' = V + E`, `F' = 4F`.
    pub fn refine(&mut self) -> Result<()> {
        let edges: Vec<EdgeKey> = self.edges().into_keys().collect();
        let mut mid: BTreeMap<EdgeKey, usize> = BTreeMap::new();
        for &(a, b) in &edges {
            let attr = self.edge_attr(a, b);
            let x = (self.vertices[a].x + self.vertices[b].x) / 2.0;
            let mut v = Vertex::new(x).with_constraints(&attr.constraints);
            v.fixed = attr.fixed;
            let m = self.vertices.len();
            self.vertices.push(v);
            self.project_vertex(m);
            mid.insert((a, b), m);
            if attr != EdgeAttr::default() {
                self.edge_attrs_mut().remove(&(a, b));
                self.set_edge_attr(a, m, attr.clone());
                self.set_edge_attr(m, b, attr);
            }
        }
        let old = std::mem::take(&mut self.facets);
        self.facets.reserve(4 * old.len());
        for [a, b, c] in old {
            let ab = mid[&edge_key(a, b)];
            let bc = mid[&edge_key(b, c)];
            let ca = mid[&edge_key(c, a)];
            self.facets.extend([[a, ab, ca], [ab, b, bc], [ca, bc, c], [ab, bc, ca]]);
        }
        self.validate()
    }

    /// One Gauss–Seidel sweep of vertex averaging.  Each movable vertex goes
    /// to the area-weighted mean of the centroids of its facets and is then
    /// projected onto its constraints.  Fixed vertices and unconstrained
    /// boundary vertices stay put.  A move is undone when it inverts a facet,
    /// drops one below [`FACET_FLOOR`], leaves the chart, or increases the
    /// area of the vertex star by more than `1e-9/3` relative, so the total
    /// area never grows by more than `1e-9` relative.
    pub fn vertex_average(&mut self) -> Result<AverageReport> {
        let star = self.vertex_facets();
        let boundary = self.boundary_vertices();
        let mut report = AverageReport::default();
        for i in 0..self.vertices.len() {
            let v = &self.vertices[i];
            if v.fixed || (boundary[i] && v.constraints.is_empty()) || star[i].is_empty() {
                continue;
            }
            let mut wsum = 0.0;
            let mut acc = Vector3::zeros();
            let mut before = 0.0;
            for &f in &star[i] {
                let a = self.facet_area(f)?;
                let [p, q, r] = self.facets[f];
                acc += (self.vertices[p].x + self.vertices[q].x + self.vertices[r].x) / 3.0 * a;
                wsum += a;
                before += a;
            }
            if !(wsum > 0.0) {
                continue;
            }
            let old = self.vertices[i].x;
            let normals: Vec<Vector3<f64>> = star[i].iter().map(|&f| self.facet_normal(f)).collect();
            let target = self.project_point(i, &(acc / wsum));
            if (target - old).norm() == 0.0 {
                continue;
            }
            self.vertices[i].x = target;
            if self.star_acceptable(&star[i], &normals, before) {
                report.moved += 1;
            } else {
                self.vertices[i].x = old;
                report.rolled_back += 1;
            }
        }
        Ok(report)
    }

    fn star_acceptable(&self, star: &[usize], normals: &[Vector3<f64>], before: f64) -> bool {
        let mut after = 0.0;
        for (k, &f) in star.iter().enumerate() {
            match self.facet_area(f) {
                Ok(a) if a > FACET_FLOOR => after += a,
                _ => return false,
            }
            if self.facet_normal(f).dot(&normals[k]) <= 0.0 {
                return false;
            }
        }
        after <= before * (1.0 + 1e-9 / 3.0)
    }

    /// Flips interior, untagged edges while a flip strictly shortens the
    /// longest (Riemannian) edge of the surrounding quadrilateral, until no
    /// such edge remains.  Returns the number of flips; a second call on the
    /// result does nothing.
    pub fn equitriangulate(&mut self) -> Result<usize> {
        let mut edges = self.edges();
        let mut flips = 0;
        for _ in 0..MAX_FLIP_SWEEPS {
            let keys: Vec<EdgeKey> = edges.keys().copied().collect();
            let mut changed = false;
            for k in keys {
                if self.try_flip(&mut edges, k, FlipRule::ShortenLongest)? {
                    flips += 1;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        Ok(flips)
    }

    /// Flips edge `k` when it is interior and untagged, the opposite
    /// diagonal is not already an edge, the two new facets keep the
    /// orientation and exceed [`FACET_FLOOR`], and `rule` accepts.
    fn try_flip(&mut self, edges: &mut BTreeMap<EdgeKey, Vec<usize>>, k: EdgeKey, rule: FlipRule) -> Result<bool> {
        let Some(fs) = edges.get(&k) else { return Ok(false) };
        if fs.len() != 2 || self.edge_attrs().contains_key(&k) {
            return Ok(false);
        }
        let (mut f1, mut f2) = (fs[0], fs[1]);
        if !has_directed(&self.facets[f1], k.0, k.1) {
            std::mem::swap(&mut f1, &mut f2);
        }
        let (a, b) = k;
        let c = third(&self.facets[f1], a, b);
        let d = third(&self.facets[f2], a, b);
        if edges.contains_key(&edge_key(c, d)) {
            return Ok(false);
        }
        let accept = match rule {
            FlipRule::ShortenLongest => {
                let sides = [(a, d), (d, b), (b, c), (c, a)]
                    .iter()
                    .map(|&(p, q)| self.edge_length(p, q))
                    .collect::<Result<Vec<f64>>>()?
                    .into_iter()
                    .fold(0.0, f64::max);
                let old = self.edge_length(a, b)?;
                let new = self.edge_length(c, d)?;
                let before = old.max(sides);
                new.max(sides) < before * (1.0 - 1e-12)
            }
            FlipRule::Always => true,
        };
        if !accept {
            return Ok(false);
        }
        let reference = self.facet_normal(f1) + self.facet_normal(f2);
        let (old1, old2) = (self.facets[f1], self.facets[f2]);
        self.facets[f1] = [c, a, d];
        self.facets[f2] = [d, b, c];
        let ok = [f1, f2]
            .iter()
            .all(|&f| self.facet_normal(f).dot(&reference) > 0.0 && self.facet_area(f).map(|x| x > FACET_FLOOR).unwrap_or(false));
        if !ok {
            self.facets[f1] = old1;
            self.facets[f2] = old2;
            return Ok(false);
        }
        edges.remove(&k);
        edges.insert(edge_key(c, d), vec![f1, f2]);
        replace_facet(edges, edge_key(a, d), f2, f1);
        replace_facet(edges, edge_key(b, c), f1, f2);
        Ok(true)
    }

    /// Collapses edges shorter than `min_edge`, then repairs facets with area
    /// below `min_area` by collapsing their shortest edge or, failing that,
    /// flipping their longest edge.  Unused vertices are dropped at the end
    /// (indices are renumbered).
    pub fn cull_degenerate(&mut self, min_edge: f64, min_area: f64) -> Result<CullReport> {
        let mut report = CullReport::default();
        let mut refused: Vec<EdgeKey> = Vec::new();
        loop {
            let mut shortest: Option<(f64, EdgeKey)> = None;
            for k in self.edges().into_keys() {
                if refused.contains(&k) {
                    continue;
                }
                let l = self.edge_length(k.0, k.1)?;
                if l < min_edge && shortest.is_none_or(|(s, _)| l < s) {
                    shortest = Some((l, k));
                }
            }
            let Some((_, k)) = shortest else { break };
            match self.collapse_in_place(k.0, k.1) {
                Ok(()) => report.collapsed += 1,
                Err(MeshError::Topology(_)) | Err(MeshError::Rollback(_)) => {
                    refused.push(k);
                    report.skipped += 1;
                }
                Err(e) => return Err(e),
            }
        }
        let mut refused_facets: Vec<[usize; 3]> = Vec::new();
        loop {
            let mut target = None;
            for (fi, f) in self.facets.iter().enumerate() {
                if !refused_facets.contains(f) && self.facet_area(fi)? < min_area {
                    target = Some(fi);
                    break;
                }
            }
            let Some(fi) = target else { break };
            let f = self.facets[fi];
            let mut sides: Vec<(f64, EdgeKey)> = (0..3)
                .map(|j| {
                    let (p, q) = (f[j], f[(j + 1) % 3]);
                    self.edge_length(p, q).map(|l| (l, edge_key(p, q)))
                })
                .collect::<Result<_>>()?;
            sides.sort_by(|x, y| x.0.total_cmp(&y.0));
            let (_, short) = sides[0];
            if self.collapse_in_place(short.0, short.1).is_ok() {
                report.collapsed += 1;
                continue;
            }
            let (_, long) = sides[2];
            let mut edges = self.edges();
            if self.try_flip(&mut edges, long, FlipRule::Always)? {
                report.flipped += 1;
            } else {
                refused_facets.push(f);
                report.skipped += 1;
            }
        }
        self.compact();
        self.validate()?;
        Ok(report)
    }

    /// Collapses edge `{a, b}`, keeping the endpoint whose constraints
    /// contain those of the other, and drops the removed vertex.
    ///
    /// Fails with a topology error when the collapse would pinch the surface
    /// (the endpoints share a neighbour other than the opposite corners),
    /// join two boundary arcs through the interior, or merge incompatible
    /// constraint sets, and with a rollback error when it would invert or
    /// flatten a facet.  The mesh is unchanged on failure.
    pub fn collapse_edge(&mut self, a: usize, b: usize) -> Result<()> {
        self.collapse_in_place(a, b)?;
        self.compact();
        Ok(())
    }

    fn collapse_in_place(&mut self, a: usize, b: usize) -> Result<()> {
        let edges = self.edges();
        let Some(fs) = edges.get(&edge_key(a, b)).cloned() else {
            return Err(MeshError::Topology(format!("({a}, {b}) is not an edge")));
        };
        let boundary = self.boundary_vertices();
        let boundary_edge = fs.len() == 1;
        let (s, r) = self
            .survivor(a, b, &boundary, boundary_edge)
            .or_else(|| self.survivor(b, a, &boundary, boundary_edge))
            .ok_or_else(|| MeshError::Topology(format!("edge ({a}, {b}) joins incompatible vertices")))?;
        let nb = self.vertex_neighbors();
        let common = nb[s].iter().filter(|w| nb[r].contains(w)).count();
        // Link condition: the shared neighbours are exactly the opposite
        // corners, and those are not joined by an edge of their own.
        let opposite: Vec<usize> = fs.iter().map(|&f| third(&self.facets[f], a, b)).collect();
        let joined = opposite.len() == 2 && nb[opposite[0]].contains(&opposite[1]);
        if common != fs.len() || joined {
            return Err(MeshError::Topology(format!("collapsing ({a}, {b}) would pinch the surface")));
        }
        if self.facets.len() - fs.len() < 2 {
            return Err(MeshError::Topology("collapse would leave fewer than two facets".into()));
        }
        let star = self.vertex_facets();
        let changed: Vec<usize> = star[r].iter().copied().filter(|f| !fs.contains(f)).collect();
        let saved: Vec<[usize; 3]> = changed.iter().map(|&f| self.facets[f]).collect();
        let normals: Vec<Vector3<f64>> = changed.iter().map(|&f| self.facet_normal(f)).collect();
        for &f in &changed {
            for v in self.facets[f].iter_mut() {
                if *v == r {
                    *v = s;
                }
            }
        }
        let ok = changed
            .iter()
            .zip(&normals)
            .all(|(&f, n)| self.facet_normal(f).dot(n) > 0.0 && self.facet_area(f).map(|x| x > FACET_FLOOR).unwrap_or(false));
        if !ok {
            for (&f, old) in changed.iter().zip(saved) {
                self.facets[f] = old;
            }
            return Err(MeshError::Rollback(format!("collapsing ({a}, {b}) would invert or flatten a facet")));
        }
        let mut removed = fs.clone();
        removed.sort_unstable();
        for f in removed.into_iter().rev() {
            self.facets.remove(f);
        }
        let attrs = std::mem::take(self.edge_attrs_mut());
        for ((p, q), attr) in attrs {
            if edge_key(p, q) == edge_key(a, b) {
                continue;
            }
            let p = if p == r { s } else { p };
            let q = if q == r { s } else { q };
            let key = edge_key(p, q);
            if let Some(existing) = self.edge_attrs_mut().get_mut(&key) {
                existing.fixed |= attr.fixed;
                continue;
            }
            self.edge_attrs_mut().insert(key, attr);
        }
        Ok(())
    }

    /// `(s, r)` when `s` may absorb `r`.
    fn survivor(&self, s: usize, r: usize, boundary: &[bool], boundary_edge: bool) -> Option<(usize, usize)> {
        let (vs, vr) = (&self.vertices[s], &self.vertices[r]);
        if vr.fixed {
            return None;
        }
        if !vr.constraints.iter().all(|c| vs.constraints.contains(c)) {
            return None;
        }
        if boundary[r] && !boundary[s] {
            return None;
        }
        if boundary[r] && boundary[s] && !boundary_edge {
            return None;
        }
        Some((s, r))
    }
}

#[derive(Clone, Copy)]
enum FlipRule {
    ShortenLongest,
    Always,
}

fn has_directed(f: &[usize; 3], a: usize, b: usize) -> bool {
    (0..3).any(|k| f[k] == a && f[(k + 1) % 3] == b)
}

fn third(f: &[usize; 3], a: usize, b: usize) -> usize {
    *f.iter().find(|&&v| v != a && v != b).expect("facet has three distinct corners")
}

fn replace_facet(edges: &mut BTreeMap<EdgeKey, Vec<usize>>, k: EdgeKey, from: usize, to: usize) {
    if let Some(fs) = edges.get_mut(&k) {
        for f in fs.iter_mut() {
            if *f == from {
                *f = to;
            }
        }
    }
}
