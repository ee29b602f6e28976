//! Parametric surfaces, their second-order jets and the numeric
//! mean-curvature oracle.

use std::fmt;
use std::sync::Arc;

use ekt_geometry::{contract, cross_components, Chart, Christoffel, Matrix2, Matrix3, Vector3};

use crate::error::{Result, SurfaceError};

/// Position and first/second partial derivatives of an immersion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet {
    /// Position.
    pub x: Vector3<f64>,
    /// `∂X/∂u`.
    pub xu: Vector3<f64>,
    /// `∂X/∂v`.
    pub xv: Vector3<f64>,
    /// `∂²X/∂u²`.
    pub xuu: Vector3<f64>,
    /// `∂²X/∂u∂v`.
    pub xuv: Vector3<f64>,
    /// `∂²X/∂v²`.
    pub xvv: Vector3<f64>,
}

/// Closed parameter rectangle `[u0, u1] × [v0, v1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParamRect {
    /// Lower `u` bound.
    pub u0: f64,
    /// Upper `u` bound.
    pub u1: f64,
    /// Lower `v` bound.
    pub v0: f64,
    /// Upper `v` bound.
    pub v1: f64,
}

impl ParamRect {
    /// Creates a rectangle.
    pub fn new(u0: f64, u1: f64, v0: f64, v1: f64) -> Self {
        Self { u0, u1, v0, v1 }
    }

    /// Maps unit-square coordinates `(s, t) ∈ [0, 1]²` into the rectangle.
    pub fn lerp(&self, s: f64, t: f64) -> (f64, f64) {
        (self.u0 + s * (self.u1 - self.u0), self.v0 + t * (self.v1 - self.v0))
    }

    /// Rectangle shrunk by the fraction `f` of its size on every side.
    pub fn shrink(&self, f: f64) -> Self {
        let du = (self.u1 - self.u0) * f;
        let dv = (self.v1 - self.v0) * f;
        Self::new(self.u0 + du, self.u1 - du, self.v0 + dv, self.v1 - dv)
    }
}

type MapFn = dyn Fn(f64, f64) -> Result<Vector3<f64>> + Send + Sync;
type JetFn = dyn Fn(f64, f64) -> Result<Jet> + Send + Sync;

/// An immersion of a parameter rectangle into a chart.
///
/// Derivatives are analytic when the family supplies a jet; otherwise they
/// are central differences with step `1e-5 (1 + |param|)` (first order) and
/// `1e-4 (1 + |param|)` (second order, where rounding would otherwise dominate).
#[derive(Clone)]
pub struct ParametricSurface {
    name: String,
    chart: Chart,
    rect: ParamRect,
    mean_curvature: f64,
    normal_sign: f64,
    map: Arc<MapFn>,
    jet: Option<Arc<JetFn>>,
}

impl fmt::Debug for ParametricSurface {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ParametricSurface")
            .field("name", &self.name)
            .field("chart", &self.chart)
            .field("rect", &self.rect)
            .field("mean_curvature", &self.mean_curvature)
            .field("normal_sign", &self.normal_sign)
            .field("analytic_jet", &self.jet.is_some())
            .finish()
    }
}

impl ParametricSurface {
    /// Surface from a position map only (derivatives by finite differences).
    pub fn new<F>(name: impl Into<String>, chart: Chart, rect: ParamRect, mean_curvature: f64, map: F) -> Self
    where
        F: Fn(f64, f64) -> Result<Vector3<f64>> + Send + Sync + 'static,
    {
        Self { name: name.into(), chart, rect, mean_curvature, normal_sign: 1.0, map: Arc::new(map), jet: None }
    }

    /// Surface with an analytic jet; the position map is the jet's `x`.
    pub fn with_jet<J>(name: impl Into<String>, chart: Chart, rect: ParamRect, mean_curvature: f64, jet: J) -> Self
    where
        J: Fn(f64, f64) -> Result<Jet> + Send + Sync + 'static,
    {
        let jet: Arc<JetFn> = Arc::new(jet);
        let j2 = Arc::clone(&jet);
        Self {
            name: name.into(),
            chart,
            rect,
            mean_curvature,
            normal_sign: 1.0,
            map: Arc::new(move |u, v| Ok(j2(u, v)?.x)),
            jet: Some(jet),
        }
    }

    /// Family name.
    pub fn name(&self) -> &str {
        &self.name
    }

    /// Ambient chart.
    pub fn chart(&self) -> Chart {
        self.chart
    }

    /// Parameter rectangle.
    pub fn rect(&self) -> ParamRect {
        self.rect
    }

    /// Mean curvature the family is expected to have (w.r.t. its normal).
    pub fn expected_mean_curvature(&self) -> f64 {
        self.mean_curvature * self.normal_sign
    }

    /// `+1` for `N ∝ X_u × X_v`, `-1` after [`Self::with_flipped_normal`].
    pub fn normal_sign(&self) -> f64 {
        self.normal_sign
    }

    /// Same immersion with the opposite unit normal.
    pub fn with_flipped_normal(&self) -> Self {
        let mut s = self.clone();
        s.normal_sign = -s.normal_sign;
        s
    }

    /// Same surface with a new parameter rectangle.
    pub fn with_rect(&self, rect: ParamRect) -> Self {
        let mut s = self.clone();
        s.rect = rect;
        s
    }

    /// Reparametrized surface `(a, b) ↦ X(phi(a, b))`; derivatives by differences.
    pub fn reparametrized<P>(&self, rect: ParamRect, phi: P) -> Self
    where
        P: Fn(f64, f64) -> (f64, f64) + Send + Sync + 'static,
    {
        let inner = self.clone();
        let mut s =
            ParametricSurface::new(format!("{}∘reparam", self.name), self.chart, rect, self.mean_curvature, move |a, b| {
                let (u, v) = phi(a, b);
                inner.point(u, v)
            });
        s.normal_sign = self.normal_sign;
        s
    }

    /// Affine reparametrization `(a, b) ↦ X(M (a, b) + c)`.  The jet is
    /// composed exactly by the chain rule, so analytic derivatives survive.
    pub fn reparametrized_affine(&self, rect: ParamRect, m: Matrix2<f64>, c: (f64, f64)) -> Self {
        let inner = self.clone();
        let mut s =
            ParametricSurface::with_jet(format!("{}∘affine", self.name), self.chart, rect, self.mean_curvature, move |a, b| {
                let u = m[(0, 0)] * a + m[(0, 1)] * b + c.0;
                let v = m[(1, 0)] * a + m[(1, 1)] * b + c.1;
                let j = inner.jet(u, v)?;
                let (p, q, r, t) = (m[(0, 0)], m[(0, 1)], m[(1, 0)], m[(1, 1)]);
                Ok(Jet {
                    x: j.x,
                    xu: j.xu * p + j.xv * r,
                    xv: j.xu * q + j.xv * t,
                    xuu: j.xuu * (p * p) + j.xuv * (2.0 * p * r) + j.xvv * (r * r),
                    xuv: j.xuu * (p * q) + j.xuv * (p * t + r * q) + j.xvv * (r * t),
                    xvv: j.xuu * (q * q) + j.xuv * (2.0 * q * t) + j.xvv * (t * t),
                })
            });
        s.normal_sign = self.normal_sign;
        s
    }

    /// Position at `(u, v)`.
    pub fn point(&self, u: f64, v: f64) -> Result<Vector3<f64>> {
        let x = (self.map)(u, v)?;
        self.chart.check(&x)?;
        Ok(x)
    }

    /// Second-order jet at `(u, v)`.
    pub fn jet(&self, u: f64, v: f64) -> Result<Jet> {
        if let Some(j) = &self.jet {
            let jet = j(u, v)?;
            self.chart.check(&jet.x)?;
            return Ok(jet);
        }
        let x = self.point(u, v)?;
        let hu = 1e-5 * (1.0 + u.abs());
        let hv = 1e-5 * (1.0 + v.abs());
        let xu = (self.point(u + hu, v)? - self.point(u - hu, v)?) / (2.0 * hu);
        let xv = (self.point(u, v + hv)? - self.point(u, v - hv)?) / (2.0 * hv);
        let ku = 1e-4 * (1.0 + u.abs());
        let kv = 1e-4 * (1.0 + v.abs());
        let xuu = (self.point(u + ku, v)? - x * 2.0 + self.point(u - ku, v)?) / (ku * ku);
        let xvv = (self.point(u, v + kv)? - x * 2.0 + self.point(u, v - kv)?) / (kv * kv);
        let xuv = (self.point(u + ku, v + kv)? - self.point(u + ku, v - kv)? - self.point(u - ku, v + kv)?
            + self.point(u - ku, v - kv)?)
            / (4.0 * ku * kv);
        Ok(Jet { x, xu, xv, xuu, xuv, xvv })
    }
}

/// Extrinsic data of a surface at one parameter point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalGeometry {
    /// Jet of the immersion.
    pub jet: Jet,
    /// Ambient metric at the point.
    pub g: Matrix3<f64>,
    /// Ambient Christoffel symbols at the point.
    pub gamma: Christoffel,
    /// Unit normal (coordinate components), `sign · X_u × X_v / |X_u × X_v|`.
    pub normal: Vector3<f64>,
    /// First fundamental form in the `(u, v)` basis.
    pub first: Matrix2<f64>,
    /// Second fundamental form `⟨∇_{X_i} X_j, N⟩` in the `(u, v)` basis.
    pub second: Matrix2<f64>,
}

impl LocalGeometry {
    /// Metric inner product of two ambient vectors at the point.
    pub fn dot(&self, a: &Vector3<f64>, b: &Vector3<f64>) -> f64 {
        a.dot(&(self.g * b))
    }

    /// Mean curvature `½ tr(I⁻¹ II)`.
    pub fn mean_curvature(&self) -> f64 {
        let i = self.first;
        let ii = self.second;
        let det = i.determinant();
        0.5 * (i[(1, 1)] * ii[(0, 0)] - 2.0 * i[(0, 1)] * ii[(0, 1)] + i[(0, 0)] * ii[(1, 1)]) / det
    }
}

/// Evaluates the extrinsic geometry of `s` at `(u, v)`.
pub fn local_geometry(s: &ParametricSurface, u: f64, v: f64) -> Result<LocalGeometry> {
    let jet = s.jet(u, v)?;
    let chart = s.chart();
    let mj = chart.metric_jet(&jet.x)?;
    let g = mj.g;
    let gamma = ekt_geometry::christoffel_from_jet(&mj)?;
    let ip = |a: &Vector3<f64>, b: &Vector3<f64>| a.dot(&(g * b));
    let e = ip(&jet.xu, &jet.xu);
    let f = ip(&jet.xu, &jet.xv);
    let gg = ip(&jet.xv, &jet.xv);
    let det = e * gg - f * f;
    if !(det > 1e-12) {
        return Err(SurfaceError::DegenerateImmersion(format!("det I = {det:e} at ({u}, {v})")));
    }
    let c = cross_components(&g, &jet.xu, &jet.xv);
    let normal = c / ip(&c, &c).sqrt() * s.normal_sign();
    let cov = |a: &Vector3<f64>, b: &Vector3<f64>, d2: &Vector3<f64>| d2 + contract(&gamma, a, b);
    let l = ip(&cov(&jet.xu, &jet.xu, &jet.xuu), &normal);
    let m = ip(&cov(&jet.xu, &jet.xv, &jet.xuv), &normal);
    let n = ip(&cov(&jet.xv, &jet.xv, &jet.xvv), &normal);
    Ok(LocalGeometry { jet, g, gamma, normal, first: Matrix2::new(e, f, f, gg), second: Matrix2::new(l, m, m, n) })
}

/// Mean curvature `H = ½ tr(A)` of `s` at `(u, v)` with respect to the
/// normal `N = X_u × X_v / |X_u × X_v|` (times the surface's normal sign),
/// computed from the first and second fundamental forms with the ambient
/// Levi-Civita connection.
pub fn numeric_mean_curvature(s: &ParametricSurface, u: f64, v: f64) -> Result<f64> {
    Ok(local_geometry(s, u, v)?.mean_curvature())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn euclidean_sphere(r: f64) -> ParametricSurface {
        ParametricSurface::new("sphere", Chart::cartan(0.0, 0.0), ParamRect::new(0.0, 6.0, 0.2, 2.9), 1.0 / r, move |u, v| {
            Ok(Vector3::new(v.sin() * u.cos(), v.sin() * u.sin(), v.cos()) * r)
        })
    }

    #[test]
    fn flat_plane_has_zero_mean_curvature() {
        let s = ParametricSurface::new("plane", Chart::cartan(0.0, 0.0), ParamRect::new(-1.0, 1.0, -1.0, 1.0), 0.0, |u, v| {
            Ok(Vector3::new(u, v, 0.0))
        });
        assert!(numeric_mean_curvature(&s, 0.3, -0.2).unwrap().abs() < 1e-12);
    }

    #[test]
    fn euclidean_sphere_has_inverse_radius() {
        for r in [0.5, 1.0, 3.0] {
            let s = euclidean_sphere(r);
            for (u, v) in [(0.3, 1.0), (2.0, 0.5), (5.0, 2.5)] {
                let h = numeric_mean_curvature(&s, u, v).unwrap();
                assert!((h - 1.0 / r).abs() < 1e-6, "r={r}: {h}");
                let flipped = numeric_mean_curvature(&s.with_flipped_normal(), u, v).unwrap();
                assert_eq!(flipped, -h);
            }
        }
    }

    #[test]
    fn degenerate_point_is_reported() {
        let s = euclidean_sphere(1.0);
        let err = numeric_mean_curvature(&s, 0.0, 0.0).unwrap_err();
        assert_eq!(err.kind(), "DegenerateImmersion");
    }
}
