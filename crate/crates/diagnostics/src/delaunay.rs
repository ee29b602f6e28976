//! The geodesic quadrilateral whose minimal Plateau solution in
//! `E(4H² + κ, H)` is conjugate to a quarter of a horizontal Delaunay
//! `H`-surface in `S²(κ) × R`, its discretisation as a fixed-boundary mesh,
//! and the evolve-and-trace pipeline producing the algebraic length `ℓ₀` of
//! the conjugate of the arc `h₀`.
//!
//! Corners are numbered `1..4`.  The arc `h₀` joins `2 = (0, c, 0)` to
//! `3 = (0, −c, 0)` along the `y`-axis of the Cartan model
//! (`c = 2/√κ̃`, `κ̃ = 4H² + κ`), a quarter of a horizontal great circle.
//! `h₁` and `h₂` are horizontal geodesics leaving `2` and `3` orthogonally
//! with signed lengths `(λ − π/2)/√κ̃` and `(λ + π/2)/√κ̃` in the directions
//! `h₀′ × ξ` and `−h₀′ × ξ`; both project onto the base great circle
//! `x² + y² = c²`, so their endpoints `1` and `4` lie on one fiber, joined
//! by the vertical segment `v`.

use std::f64::consts::{FRAC_PI_2, PI};

use ekt_evolver::{evolve, Command, EvolveReport, EvolveSchedule};
use ekt_geometry::{cross, geodesic, Chart, Vector3};
use ekt_mesh::{TriMesh, Vertex};

use crate::conjugate::conjugate_lengths;
use crate::error::{DiagnosticsError, Result};
use crate::trace::{trace_mesh, BoundaryTrace, TraceKind};

/// Open interval that contains `ℓ₀` for `0 < λ < π/2`:
/// `((2/√κ) arctan(√κ/(2H)), π/√(4H² + κ))`, for `κ > 0` and `H > 0`.
pub fn ell0_bounds(kappa: f64, h: f64) -> Result<(f64, f64)> {
    if !(kappa > 0.0 && h > 0.0) {
        return Err(DiagnosticsError::InvalidArgument(format!("ℓ₀ bounds need κ > 0 and H > 0, got κ = {kappa}, H = {h}")));
    }
    let k = kappa.sqrt();
    Ok((2.0 / k * (k / (2.0 * h)).atan(), PI / (4.0 * h * h + kappa).sqrt()))
}

/// The sampled boundary quadrilateral.
#[derive(Debug, Clone, PartialEq)]
pub struct DelaunayContour {
    /// Base curvature of the conjugate `H`-surface.
    pub kappa: f64,
    /// Mean curvature of the conjugate `H`-surface.
    pub h: f64,
    /// Shape parameter, `0 ≤ λ < π/2`.
    pub lambda: f64,
    /// Cartan chart of `E(4H² + κ, H)`.
    pub chart: Chart,
    /// `h₀` from corner 2 to corner 3, equally spaced in arclength.
    pub h0: Vec<Vector3<f64>>,
    /// `h₁` from corner 2 to corner 1.
    pub h1: Vec<Vector3<f64>>,
    /// `h₂` from corner 3 to corner 4.
    pub h2: Vec<Vector3<f64>>,
    /// `v` from corner 1 to corner 4.
    pub v: Vec<Vector3<f64>>,
}

impl DelaunayContour {
    /// Samples every side with `n + 1` points.
    pub fn new(kappa: f64, h: f64, lambda: f64, n: usize) -> Result<Self> {
        let kt = 4.0 * h * h + kappa;
        if !(kt > 0.0 && h > 0.0) {
            return Err(DiagnosticsError::InvalidArgument(format!("need H > 0 and 4H² + κ > 0, got κ = {kappa}, H = {h}")));
        }
        if !(0.0..FRAC_PI_2).contains(&lambda) {
            return Err(DiagnosticsError::InvalidArgument(format!("λ must lie in [0, π/2), got {lambda}")));
        }
        if n < 2 {
            return Err(DiagnosticsError::InvalidArgument("each side needs at least two segments".into()));
        }
        let chart = Chart::cartan(kt, h);
        let r = kt.sqrt();
        let c = 2.0 / r;
        let len0 = PI / r;
        let h0: Vec<Vector3<f64>> = (0..=n)
            .map(|i| {
                let sigma = len0 * i as f64 / n as f64;
                Vector3::new(0.0, c * (PI / 4.0 - r * sigma / 2.0).tan(), 0.0)
            })
            .collect();
        let down = Vector3::new(0.0, -1.0, 0.0);
        let side = |corner: Vector3<f64>, flip: f64, signed_len: f64| -> Result<Vec<Vector3<f64>>> {
            let p = chart.point(corner)?;
            let t = p.vector(down);
            let t = t.scale(1.0 / t.norm()?);
            let dir = cross(&t, &p.xi()?)?;
            let dir = dir.scale(flip * signed_len.signum() / dir.norm()?);
            let g = geodesic(&dir, signed_len.abs(), n)?;
            Ok(g.points.iter().map(|q| q.coords).collect())
        };
        let h1 = side(h0[0], 1.0, (lambda - FRAC_PI_2) / r)?;
        let h2 = side(h0[n], -1.0, (lambda + FRAC_PI_2) / r)?;
        let (c1, c4) = (h1[n], h2[n]);
        let gap = ((c1.x - c4.x).powi(2) + (c1.y - c4.y).powi(2)).sqrt();
        if gap > 1e-9 {
            return Err(DiagnosticsError::GeodesicMismatch(format!("corners 1 and 4 are not on one fiber (gap {gap:e})")));
        }
        let v = (0..=n)
            .map(|i| {
                let t = i as f64 / n as f64;
                Vector3::new(c1.x, c1.y, c1.z + t * (c4.z - c1.z))
            })
            .collect();
        Ok(Self { kappa, h, lambda, chart, h0, h1, h2, v })
    }

    /// Number of segments per side.
    pub fn segments(&self) -> usize {
        self.h0.len() - 1
    }

    /// Corners `1, 2, 3, 4`.
    pub fn corners(&self) -> [Vector3<f64>; 4] {
        let n = self.segments();
        [self.h1[n], self.h0[0], self.h0[n], self.h2[n]]
    }

    /// Riemannian length of `v`.
    pub fn vertical_length(&self) -> f64 {
        let [c1, _, _, c4] = self.corners();
        (c4.z - c1.z).abs()
    }
}

/// A fixed-boundary mesh spanning the quadrilateral.
#[derive(Debug, Clone, PartialEq)]
pub struct DelaunayPiece {
    /// The contour.
    pub contour: DelaunayContour,
    /// Mesh; every boundary vertex is fixed.
    pub mesh: TriMesh,
    /// Vertex ids along `h₀`, from corner 2 to corner 3.
    pub h0_path: Vec<usize>,
}

/// Spans the contour by the bilinearly blended (Coons) patch of its four
/// sides on an `n × n` grid, split into `2n²` triangles.
pub fn delaunay_piece(kappa: f64, h: f64, lambda: f64, n: usize) -> Result<DelaunayPiece> {
    let contour = DelaunayContour::new(kappa, h, lambda, n)?;
    let (b, l, rt, tp) = (&contour.h0, &contour.h1, &contour.h2, &contour.v);
    let id = |i: usize, j: usize| j * (n + 1) + i;
    let mut vertices = Vec::with_capacity((n + 1) * (n + 1));
    for j in 0..=n {
        for i in 0..=n {
            let (u, w) = (i as f64 / n as f64, j as f64 / n as f64);
            let x = (1.0 - w) * b[i] + w * tp[i] + (1.0 - u) * l[j] + u * rt[j]
                - ((1.0 - u) * (1.0 - w) * b[0] + u * (1.0 - w) * b[n] + (1.0 - u) * w * tp[0] + u * w * tp[n]);
            let boundary = i == 0 || j == 0 || i == n || j == n;
            let vx = Vertex::new(x);
            vertices.push(if boundary { vx.fixed() } else { vx });
        }
    }
    let mut facets = Vec::with_capacity(2 * n * n);
    for j in 0..n {
        for i in 0..n {
            let (a, bb, c, d) = (id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1));
            facets.push([a, bb, c]);
            facets.push([a, c, d]);
        }
    }
    let mesh = TriMesh::new(contour.chart, vertices, facets, Vec::new())?;
    Ok(DelaunayPiece { contour, mesh, h0_path: (0..=n).map(|i| id(i, 0)).collect() })
}

/// Gradient steps between maintenance sweeps of [`delaunay_schedule`].
pub const DELAUNAY_SWEEP: usize = 50;
/// Maintenance sweeps of [`delaunay_schedule`].
pub const DELAUNAY_SWEEPS: usize = 24;

/// Default descent for the piece: 1200 gradient steps, each block of 50
/// followed by vertex averaging and equitriangulation (plain descent lets
/// facets next to `h₀` degenerate).
pub fn delaunay_schedule() -> EvolveSchedule {
    let block = [Command::Gradient(DELAUNAY_SWEEP), Command::VertexAverage, Command::Equitriangulate];
    EvolveSchedule { commands: block.repeat(DELAUNAY_SWEEPS), stop: None }
}

/// Result of [`evolve_delaunay_piece`].
#[derive(Debug, Clone, PartialEq)]
pub struct DelaunayRun {
    /// Evolver report (area trace and final mesh).
    pub report: EvolveReport,
    /// Trace of `h₀` with the normal chosen so that `ν(3) < 0`.
    pub trace: BoundaryTrace,
    /// `ℓ₀ = −∫_{h₀} ν`.
    pub ell0: f64,
    /// `μ₀ = ∫_{h₀} √(1 − ν²)`.
    pub mu0: f64,
}

/// Evolves the piece with `schedule` and traces `h₀` on the result.
pub fn evolve_delaunay_piece(kappa: f64, h: f64, lambda: f64, n: usize, schedule: &EvolveSchedule) -> Result<DelaunayRun> {
    let piece = delaunay_piece(kappa, h, lambda, n)?;
    let report = evolve(piece.mesh, schedule)?;
    let trace = trace_mesh(&report.mesh, &piece.h0_path, TraceKind::Horizontal)?;
    let trace = if trace.nu()[trace.len() - 1] > 0.0 { trace.flip_normal() } else { trace };
    let (ell0, mu0) = conjugate_lengths(&trace)?;
    Ok(DelaunayRun { report, trace, ell0, mu0 })
}
