//! Angle data sampled along the geodesic boundary arcs of a surface.
//!
//! Along a horizontal geodesic the trace records the angle function
//! `ν = ⟨ξ, N⟩`; optionally also the rotation angle `θ` of `N` in the frame
//! `{ξ, T × ξ}` of the vertical plane containing the arc (`ν = cos θ`).
//! Along a vertical geodesic it records the angle `θ` of the (horizontal)
//! normal in a parallel horizontal frame `{X₁, X₂ = ξ × X₁}`.  The samples
//! also carry `⟨η, ξ⟩` for the conormal `η = −N × T`, used by the first
//! period function.

use std::f64::consts::PI;

use ekt_geometry::quadrature::gauss_legendre7;
use ekt_geometry::{contract, cross_components, geodesic, Chart, Matrix3, Vector3};
use ekt_mesh::{fmt_g, TriMesh};
use ekt_surfaces::{local_geometry, ParametricSurface};
use num_complex::Complex64;

use crate::error::{DiagnosticsError, Result};

/// Largest admissible distance between a marked boundary and the geodesic
/// it is supposed to be.
pub const GEODESIC_TOL: f64 = 1e-6;
/// Largest admissible jump of an unwrapped angle between consecutive samples.
pub const MAX_ANGLE_JUMP: f64 = PI / 2.0;
/// Round-off slack accepted on `|ν| ≤ 1` before clamping.
const NU_SLACK: f64 = 1e-9;
/// Resolution of the reference geodesic used by the mismatch check.
const REFERENCE_STEPS: usize = 4096;
/// RK4 substeps of parallel transport between consecutive samples.
const TRANSPORT_SUBSTEPS: usize = 8;

/// Kind of boundary geodesic.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TraceKind {
    /// Orthogonal to `ξ`.
    Horizontal,
    /// A fiber of the Killing submersion.
    Vertical,
}

impl TraceKind {
    /// Lower-case name used in reports.
    pub fn name(&self) -> &'static str {
        match self {
            TraceKind::Horizontal => "horizontal",
            TraceKind::Vertical => "vertical",
        }
    }
}

/// Angle data along one boundary geodesic, sampled at strictly increasing
/// arclengths.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryTrace {
    kind: TraceKind,
    chart: Chart,
    s: Vec<f64>,
    nu: Vec<f64>,
    theta: Option<Vec<f64>>,
    conormal_xi: Option<Vec<f64>>,
}

fn check_arclengths(s: &[f64]) -> Result<()> {
    if s.len() < 2 {
        return Err(DiagnosticsError::Trace(format!("need at least two samples, got {}", s.len())));
    }
    if s.iter().any(|v| !v.is_finite()) {
        return Err(DiagnosticsError::Trace("non-finite arclength".into()));
    }
    if let Some(i) = s.windows(2).position(|w| !(w[1] > w[0])) {
        return Err(DiagnosticsError::Trace(format!("arclength not strictly increasing at sample {}", i + 1)));
    }
    Ok(())
}

fn check_len(name: &str, values: &[f64], n: usize) -> Result<()> {
    if values.len() != n {
        return Err(DiagnosticsError::Trace(format!("{name} has {} samples, arclength has {n}", values.len())));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(DiagnosticsError::Trace(format!("non-finite {name} sample")));
    }
    Ok(())
}

/// Unwraps raw angles by adding the multiple of `2π` closest to the previous
/// sample.  Fails if a step still exceeds [`MAX_ANGLE_JUMP`] (under-sampled
/// or discontinuous data).
pub fn unwrap_angles(raw: &[f64]) -> Result<Vec<f64>> {
    let mut out: Vec<f64> = Vec::with_capacity(raw.len());
    for (i, &a) in raw.iter().enumerate() {
        if !a.is_finite() {
            return Err(DiagnosticsError::Trace(format!("non-finite angle at sample {i}")));
        }
        let Some(&prev) = out.last() else {
            out.push(a);
            continue;
        };
        let k = ((prev - a) / (2.0 * PI)).round();
        let b = a + 2.0 * PI * k;
        if (b - prev).abs() > MAX_ANGLE_JUMP {
            return Err(DiagnosticsError::Trace(format!(
                "angle jumps by {:.3} rad between samples {} and {i}",
                (b - prev).abs(),
                i - 1
            )));
        }
        out.push(b);
    }
    Ok(out)
}

impl BoundaryTrace {
    /// Horizontal trace from samples of `ν`.
    pub fn horizontal(chart: Chart, s: Vec<f64>, nu: Vec<f64>) -> Result<Self> {
        check_arclengths(&s)?;
        check_len("nu", &nu, s.len())?;
        if let Some(v) = nu.iter().find(|v| v.abs() > 1.0 + NU_SLACK) {
            return Err(DiagnosticsError::Trace(format!("angle function {v} outside [-1, 1]")));
        }
        let nu = nu.into_iter().map(|v| v.clamp(-1.0, 1.0)).collect();
        Ok(Self { kind: TraceKind::Horizontal, chart, s, nu, theta: None, conormal_xi: None })
    }

    /// Vertical trace from raw rotation angles, which are unwrapped.  The
    /// angle function vanishes identically along a vertical boundary.
    pub fn vertical(chart: Chart, s: Vec<f64>, theta: Vec<f64>) -> Result<Self> {
        check_arclengths(&s)?;
        check_len("theta", &theta, s.len())?;
        let theta = unwrap_angles(&theta)?;
        let nu = vec![0.0; s.len()];
        Ok(Self { kind: TraceKind::Vertical, chart, s, nu, theta: Some(theta), conormal_xi: None })
    }

    /// Attaches raw rotation angles (unwrapped) to a horizontal trace.
    pub fn with_theta(mut self, theta: Vec<f64>) -> Result<Self> {
        check_len("theta", &theta, self.s.len())?;
        self.theta = Some(unwrap_angles(&theta)?);
        Ok(self)
    }

    /// Attaches samples of `⟨η, ξ⟩`.
    pub fn with_conormal(mut self, values: Vec<f64>) -> Result<Self> {
        check_len("conormal", &values, self.s.len())?;
        self.conormal_xi = Some(values);
        Ok(self)
    }

    /// The same trace for the opposite unit normal.
    pub fn flip_normal(&self) -> Self {
        let mut t = self.clone();
        t.nu.iter_mut().for_each(|v| *v = -*v);
        if let Some(th) = t.theta.as_mut() {
            th.iter_mut().for_each(|v| *v += PI);
        }
        if let Some(c) = t.conormal_xi.as_mut() {
            c.iter_mut().for_each(|v| *v = -*v);
        }
        t
    }

    /// Kind of the traced geodesic.
    pub fn kind(&self) -> TraceKind {
        self.kind
    }

    /// Chart of the traced surface.
    pub fn chart(&self) -> Chart {
        self.chart
    }

    /// Arclength samples.
    pub fn s(&self) -> &[f64] {
        &self.s
    }

    /// Angle function samples.
    pub fn nu(&self) -> &[f64] {
        &self.nu
    }

    /// Unwrapped rotation angle, if recorded.
    pub fn theta(&self) -> Option<&[f64]> {
        self.theta.as_deref()
    }

    /// Samples of `⟨η, ξ⟩`, if recorded.
    pub fn conormal_xi(&self) -> Option<&[f64]> {
        self.conormal_xi.as_deref()
    }

    /// Number of samples.
    pub fn len(&self) -> usize {
        self.s.len()
    }

    /// Always false: traces hold at least two samples.
    pub fn is_empty(&self) -> bool {
        self.s.is_empty()
    }

    /// Arclength between the first and last sample.
    pub fn length(&self) -> f64 {
        self.s[self.s.len() - 1] - self.s[0]
    }

    /// CSV with header `s,nu` (horizontal) or `s,theta` (vertical).
    pub fn to_csv(&self) -> String {
        let (name, values) = match self.kind {
            TraceKind::Horizontal => ("nu", &self.nu),
            TraceKind::Vertical => ("theta", self.theta.as_ref().unwrap_or(&self.nu)),
        };
        let mut out = format!("s,{name}\n");
        for (s, v) in self.s.iter().zip(values) {
            out.push_str(&format!("{},{}\n", fmt_g(*s, 17), fmt_g(*v, 17)));
        }
        out
    }
}

/// One boundary sample: position, unit tangent and unit normal (chart
/// components).
struct FrameSample {
    p: Vector3<f64>,
    t: Vector3<f64>,
    n: Vector3<f64>,
}

fn dot(g: &Matrix3<f64>, a: &Vector3<f64>, b: &Vector3<f64>) -> f64 {
    a.dot(&(g * b))
}

fn normalize(g: &Matrix3<f64>, v: Vector3<f64>) -> Result<Vector3<f64>> {
    let n = dot(g, &v, &v).sqrt();
    if !(n > 1e-14) {
        return Err(DiagnosticsError::InvalidArgument("degenerate vector in boundary frame".into()));
    }
    Ok(v / n)
}

/// Parallel transport of `v` along the coordinate segment from `a` to `b`.
fn transport(chart: &Chart, a: &Vector3<f64>, b: &Vector3<f64>, v: Vector3<f64>) -> Result<Vector3<f64>> {
    let d = b - a;
    let h = 1.0 / TRANSPORT_SUBSTEPS as f64;
    let rhs = |t: f64, v: &Vector3<f64>| -> Result<Vector3<f64>> {
        let gamma = chart.christoffel(&(a + d * t))?;
        Ok(-contract(&gamma, &d, v))
    };
    let mut v = v;
    for k in 0..TRANSPORT_SUBSTEPS {
        let t = k as f64 * h;
        let k1 = rhs(t, &v)?;
        let k2 = rhs(t + h / 2.0, &(v + k1 * (h / 2.0)))?;
        let k3 = rhs(t + h / 2.0, &(v + k2 * (h / 2.0)))?;
        let k4 = rhs(t + h, &(v + k3 * h))?;
        v += (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0);
    }
    Ok(v)
}

/// Builds the trace from positioned frames.
fn assemble(chart: Chart, kind: TraceKind, s: Vec<f64>, samples: &[FrameSample]) -> Result<BoundaryTrace> {
    let mut nu = Vec::with_capacity(samples.len());
    let mut theta = Vec::with_capacity(samples.len());
    let mut conormal = Vec::with_capacity(samples.len());
    let mut x1: Option<Vector3<f64>> = None;
    for (i, fs) in samples.iter().enumerate() {
        let g = chart.metric(&fs.p)?;
        let xi = chart.xi(&fs.p)?;
        let v = dot(&g, &fs.n, &xi);
        nu.push(v);
        let eta = -cross_components(&g, &fs.n, &fs.t);
        conormal.push(dot(&g, &eta, &xi));
        match kind {
            TraceKind::Horizontal => {
                let np = normalize(&g, cross_components(&g, &fs.t, &xi))?;
                theta.push(dot(&g, &fs.n, &np).atan2(v));
            }
            TraceKind::Vertical => {
                let e = match x1 {
                    Some(prev) => transport(&chart, &samples[i - 1].p, &fs.p, prev)?,
                    None => {
                        let unit = xi / xi.norm();
                        (0..3)
                            .map(|k| Vector3::ith(k, 1.0))
                            .min_by(|a, b| a.dot(&unit).abs().total_cmp(&b.dot(&unit).abs()))
                            .unwrap_or_else(Vector3::x)
                    }
                };
                // Remove the drift along ξ and renormalise.
                let e = normalize(&g, e - xi * dot(&g, &e, &xi))?;
                let e2 = cross_components(&g, &xi, &e);
                theta.push(dot(&g, &fs.n, &e2).atan2(dot(&g, &fs.n, &e)));
                x1 = Some(e);
            }
        }
    }
    let trace = match kind {
        TraceKind::Horizontal => BoundaryTrace::horizontal(chart, s, nu)?.with_theta(theta)?,
        TraceKind::Vertical => BoundaryTrace::vertical(chart, s, theta)?,
    };
    trace.with_conormal(conormal)
}

/// Distance from `q` to the segment `[a, b]`.
fn segment_distance(q: &Vector3<f64>, a: &Vector3<f64>, b: &Vector3<f64>) -> f64 {
    let d = b - a;
    let len2 = d.norm_squared();
    let t = if len2 > 0.0 { ((q - a).dot(&d) / len2).clamp(0.0, 1.0) } else { 0.0 };
    (q - (a + d * t)).norm()
}

/// Distance in `M²(κ)` between two points of the Cartan disk together with
/// the unit direction at `w0` of the geodesic towards `w1`.
fn base_step(kappa: f64, w0: Complex64, w1: Complex64) -> (f64, Complex64) {
    if kappa == 0.0 {
        let d = w1 - w0;
        return (d.norm(), d / d.norm());
    }
    let c = 0.5 * kappa.abs().sqrt();
    let sign = kappa.signum();
    let a = w0 * c;
    let m = w1 * c;
    let zeta = (m - a) / (Complex64::new(1.0, 0.0) + a.conj() * m * sign);
    let rho = zeta.norm();
    let dist = if kappa > 0.0 { rho.atan() / c } else { rho.atanh() / c };
    (dist, zeta / rho)
}

/// Checks that `pts` sample one geodesic of the given kind.
pub fn check_geodesic(chart: &Chart, pts: &[Vector3<f64>], kind: TraceKind) -> Result<()> {
    if pts.len() < 2 {
        return Err(DiagnosticsError::InvalidArgument("a boundary arc needs at least two samples".into()));
    }
    let p0 = pts[0];
    match kind {
        TraceKind::Vertical => {
            let xi = chart.xi(&p0)?;
            let e = xi / xi.norm();
            for (i, p) in pts.iter().enumerate() {
                let d = p - p0;
                let off = (d - e * d.dot(&e)).norm();
                if off > GEODESIC_TOL {
                    return Err(DiagnosticsError::GeodesicMismatch(format!(
                        "sample {i} is {off:.3e} away from the fiber through the first sample"
                    )));
                }
            }
            Ok(())
        }
        TraceKind::Horizontal => {
            if !chart.uses_cartan_coordinates() {
                return Err(DiagnosticsError::InvalidArgument(format!(
                    "horizontal traces need Cartan coordinates, chart is {}",
                    chart.kind().name()
                )));
            }
            let kappa = chart.kappa();
            let w = |p: &Vector3<f64>| Complex64::new(p.x, p.y);
            let mut length = 0.0;
            for pair in pts.windows(2) {
                let (d, _) = base_step(kappa, w(&pair[0]), w(&pair[1]));
                if !d.is_finite() {
                    return Err(DiagnosticsError::GeodesicMismatch("consecutive samples project to one point".into()));
                }
                length += d;
            }
            let (_, dir) = base_step(kappa, w(&pts[0]), w(&pts[1]));
            if !(length > 0.0) || !dir.re.is_finite() {
                return Err(DiagnosticsError::GeodesicMismatch("boundary arc has no horizontal extent".into()));
            }
            let g = chart.metric(&p0)?;
            let xi = chart.xi(&p0)?;
            let v = Vector3::new(dir.re, dir.im, 0.0);
            let v = normalize(&g, v - xi * (dot(&g, &v, &xi) / dot(&g, &xi, &xi)))?;
            let start = chart.point(p0)?;
            let reference = geodesic(&start.vector(v), length, REFERENCE_STEPS)?;
            let poly: Vec<Vector3<f64>> = reference.points.iter().map(|q| q.coords).collect();
            for (i, p) in pts.iter().enumerate() {
                let off = poly.windows(2).map(|s| segment_distance(p, &s[0], &s[1])).fold(f64::INFINITY, f64::min);
                if off > GEODESIC_TOL {
                    return Err(DiagnosticsError::GeodesicMismatch(format!(
                        "sample {i} is {off:.3e} away from the horizontal geodesic through the first samples"
                    )));
                }
            }
            Ok(())
        }
    }
}

/// Traces the boundary arc of a mesh given by the vertex path `path`
/// (consecutive vertices must share an edge).  Arclength is the sum of
/// Riemannian edge lengths; the normal at a vertex is the area-weighted
/// average of its facets' unit normals (facet orientation decides the
/// side); tangents are chord differences.
pub fn trace_mesh(mesh: &TriMesh, path: &[usize], kind: TraceKind) -> Result<BoundaryTrace> {
    let n = mesh.num_vertices();
    if path.len() < 2 || path.iter().any(|&i| i >= n) {
        return Err(DiagnosticsError::InvalidArgument("boundary path needs ≥ 2 valid vertex ids".into()));
    }
    let edges = mesh.edges();
    for w in path.windows(2) {
        if !edges.contains_key(&ekt_mesh::edge_key(w[0], w[1])) {
            return Err(DiagnosticsError::InvalidArgument(format!("vertices {} and {} share no edge", w[0], w[1])));
        }
    }
    let chart = mesh.chart();
    let pts: Vec<Vector3<f64>> = path.iter().map(|&i| mesh.position(i)).collect();
    check_geodesic(&chart, &pts, kind)?;
    let mut s = vec![0.0];
    for w in pts.windows(2) {
        let prev = s[s.len() - 1];
        s.push(prev + mesh.segment_length(&w[0], &w[1])?);
    }
    let vf = mesh.vertex_facets();
    let last = pts.len() - 1;
    let mut samples = Vec::with_capacity(pts.len());
    for (k, &vi) in path.iter().enumerate() {
        let p = pts[k];
        let g = chart.metric(&p)?;
        let mut acc = Vector3::zeros();
        for &f in &vf[vi] {
            let [a, b, c] = mesh.facets[f];
            let (pa, pb, pc) = (mesh.position(a), mesh.position(b), mesh.position(c));
            acc += cross_components(&g, &(pb - pa), &(pc - pa));
        }
        let chord = pts[(k + 1).min(last)] - pts[k.saturating_sub(1)];
        samples.push(FrameSample { p, t: normalize(&g, chord)?, n: normalize(&g, acc)? });
    }
    assemble(chart, kind, s, &samples)
}

/// Traces a parametric surface along the straight parameter segment from
/// `from` to `to`, with `samples` equally spaced parameter values.
/// Arclength is integrated with 7-point Gauss–Legendre per interval.
pub fn trace_surface(
    surface: &ParametricSurface,
    from: (f64, f64),
    to: (f64, f64),
    samples: usize,
    kind: TraceKind,
) -> Result<BoundaryTrace> {
    if samples < 2 {
        return Err(DiagnosticsError::InvalidArgument("need at least two samples".into()));
    }
    let chart = surface.chart();
    let (du, dv) = (to.0 - from.0, to.1 - from.1);
    let param = |t: f64| (from.0 + du * t, from.1 + dv * t);
    let speed = |t: f64| -> f64 {
        let (u, v) = param(t);
        let Ok(j) = surface.jet(u, v) else { return f64::NAN };
        let x = j.xu * du + j.xv * dv;
        chart.metric(&j.x).map_or(f64::NAN, |g| dot(&g, &x, &x).sqrt())
    };
    let h = 1.0 / (samples - 1) as f64;
    let mut s = Vec::with_capacity(samples);
    let mut frames = Vec::with_capacity(samples);
    let mut acc = 0.0;
    for i in 0..samples {
        let t = i as f64 * h;
        if i > 0 {
            let piece = gauss_legendre7(speed, t - h, t);
            if !piece.is_finite() {
                return Err(DiagnosticsError::InvalidArgument("parameter segment leaves the surface domain".into()));
            }
            acc += piece;
        }
        s.push(acc);
        let (u, v) = param(t);
        let lg = local_geometry(surface, u, v)?;
        let tangent = normalize(&lg.g, lg.jet.xu * du + lg.jet.xv * dv)?;
        frames.push(FrameSample { p: lg.jet.x, t: tangent, n: lg.normal });
    }
    let pts: Vec<Vector3<f64>> = frames.iter().map(|f| f.p).collect();
    check_geodesic(&chart, &pts, kind)?;
    assemble(chart, kind, s, &frames)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unwrap_adds_whole_turns() {
        let raw = [3.0, -3.1, 3.0, -2.9];
        let out = unwrap_angles(&raw).unwrap();
        for (r, o) in raw.iter().zip(&out) {
            let k = (o - r) / (2.0 * PI);
            assert!((k - k.round()).abs() < 1e-12);
        }
        assert!(out.windows(2).all(|w| (w[1] - w[0]).abs() <= MAX_ANGLE_JUMP));
    }

    #[test]
    fn unwrap_rejects_large_jumps() {
        let e = unwrap_angles(&[0.0, 2.0]).unwrap_err();
        assert_eq!(e.kind(), "TraceError");
    }

    #[test]
    fn invariants_are_enforced() {
        let c = Chart::cartan(0.0, 0.0);
        assert!(BoundaryTrace::horizontal(c, vec![0.0, 0.0], vec![0.0, 0.0]).is_err());
        assert!(BoundaryTrace::horizontal(c, vec![0.0, 1.0], vec![0.0, 1.5]).is_err());
        assert!(BoundaryTrace::horizontal(c, vec![0.0, 1.0], vec![0.0]).is_err());
        let t = BoundaryTrace::horizontal(c, vec![0.0, 1.0], vec![-1.0 - 1e-12, 1.0]).unwrap();
        assert_eq!(t.nu()[0], -1.0);
    }

    #[test]
    fn base_distance_matches_closed_form() {
        for kappa in [-1.0, 1.0, 4.0] {
            let bg = ekt_geometry::BaseGeodesic::new(kappa, Complex64::new(0.1, -0.2), Complex64::new(0.6, 0.8));
            let (w1, _) = bg.eval(0.7).unwrap();
            let (d, dir) = base_step(kappa, Complex64::new(0.1, -0.2), w1);
            assert!((d - 0.7).abs() < 1e-12, "kappa {kappa}: {d}");
            assert!((dir - Complex64::new(0.6, 0.8)).norm() < 1e-12);
        }
    }

    #[test]
    fn csv_header_follows_kind() {
        let c = Chart::cartan(0.0, 0.0);
        let t = BoundaryTrace::vertical(c, vec![0.0, 0.5], vec![0.1, 0.2]).unwrap();
        assert!(t.to_csv().starts_with("s,theta\n0,0.10000000000000001\n"));
        let t = BoundaryTrace::horizontal(c, vec![0.0, 0.5], vec![0.25, 1.0]).unwrap();
        assert_eq!(t.to_csv(), "s,nu\n0,0.25\n0.5,1\n");
    }
}
