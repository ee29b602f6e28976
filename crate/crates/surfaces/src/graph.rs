//! Entire vertical graphs `z = u(x, y)` over the Cartan chart.

use std::fmt;
use std::sync::Arc;

use ekt_geometry::{lambda_kappa, Chart, Matrix2, SpaceParams, Vector2, Vector3};

use crate::error::{Result, SurfaceError};
use crate::surface::{Jet, ParamRect, ParametricSurface};

type ValueFn = dyn Fn(f64, f64) -> f64 + Send + Sync;
type GradFn = dyn Fn(f64, f64) -> Vector2<f64> + Send + Sync;
type HessFn = dyn Fn(f64, f64) -> Matrix2<f64> + Send + Sync;

/// A height function `u` over the base of the Cartan model of `E(κ, τ)`,
/// with optional analytic first and second derivatives (central differences
/// otherwise).
#[derive(Clone)]
pub struct GraphFunction {
    params: SpaceParams,
    value: Arc<ValueFn>,
    grad: Option<Arc<GradFn>>,
    hess: Option<Arc<HessFn>>,
}

impl fmt::Debug for GraphFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GraphFunction")
            .field("params", &self.params)
            .field("analytic_gradient", &self.grad.is_some())
            .field("analytic_hessian", &self.hess.is_some())
            .finish()
    }
}

impl GraphFunction {
    /// Graph of `u` in `E(κ, τ)`; derivatives by finite differences.
    pub fn new<F>(params: SpaceParams, u: F) -> Self
    where
        F: Fn(f64, f64) -> f64 + Send + Sync + 'static,
    {
        Self { params, value: Arc::new(u), grad: None, hess: None }
    }

    /// Attaches analytic first and second derivatives.
    pub fn with_derivatives<G, H>(mut self, grad: G, hess: H) -> Self
    where
        G: Fn(f64, f64) -> Vector2<f64> + Send + Sync + 'static,
        H: Fn(f64, f64) -> Matrix2<f64> + Send + Sync + 'static,
    {
        self.grad = Some(Arc::new(grad));
        self.hess = Some(Arc::new(hess));
        self
    }

    /// Ambient parameters.
    pub fn params(&self) -> SpaceParams {
        self.params
    }

    /// Cartan chart of the ambient space.
    pub fn chart(&self) -> Chart {
        Chart::cartan(self.params.kappa, self.params.tau)
    }

    /// Height `u(x, y)`.
    pub fn value(&self, x: f64, y: f64) -> Result<f64> {
        lambda_kappa(self.params.kappa, x, y)?;
        Ok((self.value)(x, y))
    }

    /// Euclidean gradient `(u_x, u_y)`.
    pub fn gradient(&self, x: f64, y: f64) -> Result<Vector2<f64>> {
        lambda_kappa(self.params.kappa, x, y)?;
        if let Some(g) = &self.grad {
            return Ok(g(x, y));
        }
        let f = &self.value;
        let (hx, hy) = (1e-5 * (1.0 + x.abs()), 1e-5 * (1.0 + y.abs()));
        Ok(Vector2::new((f(x + hx, y) - f(x - hx, y)) / (2.0 * hx), (f(x, y + hy) - f(x, y - hy)) / (2.0 * hy)))
    }

    /// Euclidean Hessian of `u`.
    pub fn hessian(&self, x: f64, y: f64) -> Result<Matrix2<f64>> {
        lambda_kappa(self.params.kappa, x, y)?;
        if let Some(h) = &self.hess {
            return Ok(h(x, y));
        }
        let f = &self.value;
        let (hx, hy) = (1e-4 * (1.0 + x.abs()), 1e-4 * (1.0 + y.abs()));
        let c = f(x, y);
        let uxx = (f(x + hx, y) - 2.0 * c + f(x - hx, y)) / (hx * hx);
        let uyy = (f(x, y + hy) - 2.0 * c + f(x, y - hy)) / (hy * hy);
        let uxy = (f(x + hx, y + hy) - f(x + hx, y - hy) - f(x - hx, y + hy) + f(x - hx, y - hy)) / (4.0 * hx * hy);
        Ok(Matrix2::new(uxx, uxy, uxy, uyy))
    }

    /// Generalised gradient `G(u) = (u_x + τλy, u_y − τλx)`, i.e. the
    /// coordinate components of the horizontal part of the graph's normal
    /// direction before the metric scaling by `1/λ²`.
    pub fn generalized_gradient(&self, x: f64, y: f64) -> Result<Vector2<f64>> {
        let lam = lambda_kappa(self.params.kappa, x, y)?;
        let t = self.params.tau;
        let g = self.gradient(x, y)?;
        Ok(Vector2::new(g.x + t * lam * y, g.y - t * lam * x))
    }

    /// Mean curvature of the graph (upward normal), from the divergence form
    /// `H = (1/(2λ²)) div(G / W)`, `W = √(1 + |G|²/λ²)`, expanded with the
    /// chain rule so that only `∇u` and `∇²u` are needed.
    pub fn mean_curvature(&self, x: f64, y: f64) -> Result<f64> {
        let SpaceParams { kappa, tau, .. } = self.params;
        let lam = lambda_kappa(kappa, x, y)?;
        let lx = -lam * lam * kappa * x / 2.0;
        let ly = -lam * lam * kappa * y / 2.0;
        let g = self.gradient(x, y)?;
        let h = self.hessian(x, y)?;
        let a = g.x + tau * lam * y;
        let b = g.y - tau * lam * x;
        let ax = h[(0, 0)] + tau * lx * y;
        let ay = h[(0, 1)] + tau * (ly * y + lam);
        let bx = h[(1, 0)] - tau * (lx * x + lam);
        let by = h[(1, 1)] - tau * ly * x;
        let l2 = lam * lam;
        let w2 = 1.0 + (a * a + b * b) / l2;
        let w = w2.sqrt();
        // ∂(W²)/∂x and ∂(W²)/∂y
        let w2x = 2.0 * (a * ax + b * bx) / l2 - 2.0 * (a * a + b * b) * lx / (l2 * lam);
        let w2y = 2.0 * (a * ay + b * by) / l2 - 2.0 * (a * a + b * b) * ly / (l2 * lam);
        let div = (ax + by) / w - (a * w2x + b * w2y) / (2.0 * w * w2);
        Ok(div / (2.0 * l2))
    }

    /// The graph as a parametric surface over `rect`, with the jet built from
    /// the derivatives of `u`.  `expected_h` is recorded as the reference
    /// mean curvature.
    pub fn surface(&self, name: impl Into<String>, rect: ParamRect, expected_h: f64) -> ParametricSurface {
        let gf = self.clone();
        ParametricSurface::with_jet(name, self.chart(), rect, expected_h, move |x, y| {
            let z = gf.value(x, y)?;
            let g = gf.gradient(x, y)?;
            let h = gf.hessian(x, y)?;
            Ok(Jet {
                x: Vector3::new(x, y, z),
                xu: Vector3::new(1.0, 0.0, g.x),
                xv: Vector3::new(0.0, 1.0, g.y),
                xuu: Vector3::new(0.0, 0.0, h[(0, 0)]),
                xuv: Vector3::new(0.0, 0.0, h[(0, 1)]),
                xvv: Vector3::new(0.0, 0.0, h[(1, 1)]),
            })
        })
    }

    /// Largest coordinate square centred at the origin that sits well inside
    /// the chart (`half-width = 0.5 · 2/√−κ` for `κ < 0`, `1.5` otherwise).
    pub fn default_rect(&self) -> ParamRect {
        let r = if self.params.kappa < 0.0 { 1.0 / (-self.params.kappa).sqrt() } else { 1.5 };
        ParamRect::new(-r, r, -r, r)
    }
}

/// The umbrella `u ≡ 0`: the minimal horizontal umbrella through the origin.
pub fn umbrella(params: SpaceParams) -> GraphFunction {
    GraphFunction::new(params, |_, _| 0.0).with_derivatives(|_, _| Vector2::zeros(), |_, _| Matrix2::zeros())
}

/// The minimal graph invariant under the one-parameter group of isometries
/// generated by the horizontal geodesics orthogonal to a horizontal geodesic
/// through the origin: `u = τxy` for `κ = 0` and
/// `u = (2τ/κ) arctan(2xy / (4/κ + x² − y²))` for `κ < 0`.
///
/// Fails with a parameter error for `κ > 0`.
pub fn invariant_graph(params: SpaceParams) -> Result<GraphFunction> {
    let SpaceParams { kappa, tau, .. } = params;
    if kappa > 0.0 {
        return Err(SurfaceError::Param("invariant minimal graphs need κ ≤ 0".into()));
    }
    if kappa == 0.0 {
        return Ok(GraphFunction::new(params, move |x, y| tau * x * y)
            .with_derivatives(move |x, y| Vector2::new(tau * y, tau * x), move |_, _| Matrix2::new(0.0, tau, tau, 0.0)));
    }
    Ok(GraphFunction::new(params, move |x, y| 2.0 * tau / kappa * (2.0 * x * y / (4.0 / kappa + x * x - y * y)).atan()))
}
