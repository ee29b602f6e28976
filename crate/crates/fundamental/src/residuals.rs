//! Grid-based checks of the compatibility equations, the Abresch–Rosenberg
//! function `q` and the stability operator.
//!
//! Intrinsic derivatives of ambient vector fields along the surface are taken
//! as `∇_{X_k} W = tan(∂_k W + Γ̄(X_k, W))`, where `∂_k W` is a central
//! difference over neighbouring grid nodes and `Γ̄` the ambient Christoffel
//! symbols.  The Gauss curvature comes from the induced metric alone
//! (Brioschi's formula on differenced `E, F, G`), so the Gauss equation is
//! not satisfied by construction.

use ekt_geometry::{contract, cross_components, Matrix2, Vector2, Vector3};
use ekt_surfaces::{ParamRect, ParametricSurface};

use crate::data::{surface_frame, SurfaceFrame};
use crate::error::{FundamentalError, Result};

/// A uniform `(nu + 1) × (nv + 1)` node grid over a parameter rectangle.
/// Residual fields live on the interior nodes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    /// Parameter rectangle (nodes include its boundary).
    pub rect: ParamRect,
    /// Number of intervals in `u`.
    pub nu: usize,
    /// Number of intervals in `v`.
    pub nv: usize,
}

impl Grid {
    /// Grid with `nu × nv` intervals; at least 4 in each direction.
    pub fn new(rect: ParamRect, nu: usize, nv: usize) -> Result<Self> {
        if nu < 4 || nv < 4 {
            return Err(FundamentalError::Grid(format!("need at least 4×4 intervals, got {nu}×{nv}")));
        }
        if !(rect.u1 > rect.u0 && rect.v1 > rect.v0) {
            return Err(FundamentalError::Grid(format!("empty rectangle {rect:?}")));
        }
        Ok(Self { rect, nu, nv })
    }

    /// Same rectangle with twice as many intervals in each direction.
    pub fn refined(&self) -> Self {
        Self { rect: self.rect, nu: 2 * self.nu, nv: 2 * self.nv }
    }

    /// Spacing in `u`.
    pub fn du(&self) -> f64 {
        (self.rect.u1 - self.rect.u0) / self.nu as f64
    }

    /// Spacing in `v`.
    pub fn dv(&self) -> f64 {
        (self.rect.v1 - self.rect.v0) / self.nv as f64
    }

    /// `u` coordinate of node column `i`.
    pub fn u(&self, i: usize) -> f64 {
        self.rect.u0 + i as f64 * self.du()
    }

    /// `v` coordinate of node row `j`.
    pub fn v(&self, j: usize) -> f64 {
        self.rect.v0 + j as f64 * self.dv()
    }

    fn node(&self, i: usize, j: usize) -> usize {
        i * (self.nv + 1) + j
    }

    /// Indices of the nodes at least `margin` layers inside the boundary, `i` outer.
    pub fn interior(&self, margin: usize) -> impl Iterator<Item = (usize, usize)> + '_ {
        (margin..=self.nu - margin).flat_map(move |i| (margin..=self.nv - margin).map(move |j| (i, j)))
    }

    /// Samples `f` at every node (row-major, `i` outer).
    pub fn sample<T, F>(&self, mut f: F) -> Result<Vec<T>>
    where
        F: FnMut(f64, f64) -> Result<T>,
    {
        let mut out = Vec::with_capacity((self.nu + 1) * (self.nv + 1));
        for i in 0..=self.nu {
            for j in 0..=self.nv {
                out.push(f(self.u(i), self.v(j))?);
            }
        }
        Ok(out)
    }
}

/// A scalar field on the interior nodes of a [`Grid`].
#[derive(Debug, Clone, PartialEq)]
pub struct GridField {
    /// The grid.
    pub grid: Grid,
    /// Number of boundary node layers without a value (stencil half-width).
    pub margin: usize,
    /// Values at the nodes `margin ≤ i ≤ nu − margin`, `margin ≤ j ≤ nv − margin`, `i` outer.
    pub values: Vec<f64>,
}

impl GridField {
    /// Value at node `(i, j)` (which must lie inside the margin).
    pub fn get(&self, i: usize, j: usize) -> f64 {
        let m = self.margin;
        self.values[(i - m) * (self.grid.nv + 1 - 2 * m) + (j - m)]
    }

    /// Largest absolute value.
    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    /// Root mean square.
    pub fn rms(&self) -> f64 {
        (self.values.iter().map(|v| v * v).sum::<f64>() / self.values.len() as f64).sqrt()
    }
}

/// Residual fields of the five compatibility equations.
#[derive(Debug, Clone, PartialEq)]
pub struct Residuals {
    /// Gauss equation: `K − det A − τ² − (κ − 4τ²)ν²`.
    pub gauss: GridField,
    /// Codazzi equation: norm of `∇_u(A∂_v) − ∇_v(A∂_u) − (κ−4τ²)ν(⟨∂_v,T⟩∂_u − ⟨∂_u,T⟩∂_v)`.
    pub codazzi: GridField,
    /// Derivative of the tangent part of ξ: largest norm of `∇_{∂_k}T − ν(A∂_k − τJ∂_k)` over `k = u, v`.
    pub killing_tangent: GridField,
    /// Gradient of the angle function: norm of `∇ν + AT + τJT`.
    pub angle_gradient: GridField,
    /// Unit length of ξ: `‖T‖² + ν² − 1`.
    pub unit: GridField,
}

impl Residuals {
    /// `(name, max |residual|)` for each equation.
    pub fn maxima(&self) -> [(&'static str, f64); 5] {
        [
            ("gauss", self.gauss.max_abs()),
            ("codazzi", self.codazzi.max_abs()),
            ("killing_tangent", self.killing_tangent.max_abs()),
            ("angle_gradient", self.angle_gradient.max_abs()),
            ("unit", self.unit.max_abs()),
        ]
    }
}

/// Per-node quantities shared by the residual computations.
struct Node {
    frame: SurfaceFrame,
    /// Shape operator in the coordinate basis: `A ∂_j = Σ_k S_{kj} ∂_k`.
    shape: Matrix2<f64>,
    /// Ambient components of `T = ξ − νN`.
    t: Vector3<f64>,
    /// Ambient components of `A∂_u`, `A∂_v`.
    a_cols: [Vector3<f64>; 2],
}

impl Node {
    fn new(frame: SurfaceFrame) -> Result<Self> {
        let l = &frame.local;
        let inv = l.first.try_inverse().ok_or_else(|| FundamentalError::Grid("singular first fundamental form".into()))?;
        let shape = inv * l.second;
        let t = frame.xi - l.normal * frame.sample.nu;
        let (xu, xv) = (l.jet.xu, l.jet.xv);
        let a_cols = [xu * shape[(0, 0)] + xv * shape[(1, 0)], xu * shape[(0, 1)] + xv * shape[(1, 1)]];
        Ok(Self { frame, shape, t, a_cols })
    }

    fn tangents(&self) -> [Vector3<f64>; 2] {
        [self.frame.local.jet.xu, self.frame.local.jet.xv]
    }

    fn dot(&self, a: &Vector3<f64>, b: &Vector3<f64>) -> f64 {
        self.frame.local.dot(a, b)
    }

    fn norm(&self, a: &Vector3<f64>) -> f64 {
        self.dot(a, a).max(0.0).sqrt()
    }

    fn tangential(&self, w: &Vector3<f64>) -> Vector3<f64> {
        let n = self.frame.local.normal;
        w - n * self.dot(w, &n)
    }

    /// `∇̄_{X_k} W` from the coordinate derivative `dw` of `W` along `X_k`.
    fn ambient_derivative(&self, k: usize, w: &Vector3<f64>, dw: &Vector3<f64>) -> Vector3<f64> {
        dw + contract(&self.frame.local.gamma, &self.tangents()[k], w)
    }

    fn j(&self, w: &Vector3<f64>) -> Vector3<f64> {
        cross_components(&self.frame.local.g, &self.frame.local.normal, w)
    }

    fn metric(&self) -> (f64, f64, f64) {
        let i = self.frame.local.first;
        (i[(0, 0)], i[(0, 1)], i[(1, 1)])
    }
}

fn nodes(s: &ParametricSurface, grid: &Grid) -> Result<Vec<Node>> {
    grid.sample(|u, v| Node::new(surface_frame(s, u, v)?))
}

/// Gauss curvature from the first fundamental form and its derivatives.
#[allow(clippy::too_many_arguments)]
pub fn brioschi(
    (e, f, g): (f64, f64, f64),
    (eu, ev): (f64, f64),
    (fu, fv): (f64, f64),
    (gu, gv): (f64, f64),
    evv: f64,
    fuv: f64,
    guu: f64,
) -> f64 {
    let m1 = nalgebra::Matrix3::new(-0.5 * evv + fuv - 0.5 * guu, 0.5 * eu, fu - 0.5 * ev, fv - 0.5 * gu, e, f, 0.5 * gv, f, g);
    let m2 = nalgebra::Matrix3::new(0.0, 0.5 * ev, 0.5 * gu, 0.5 * ev, e, f, 0.5 * gu, f, g);
    let det = e * g - f * f;
    (m1.determinant() - m2.determinant()) / (det * det)
}

/// Central finite-difference stencil used on grids.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stencil {
    /// Three-point differences (error `O(h²)`), one boundary layer skipped.
    Second,
    /// Five-point differences (error `O(h⁴)`), two boundary layers skipped.
    Fourth,
}

impl Stencil {
    /// Half-width of the stencil in nodes.
    pub fn margin(self) -> usize {
        match self {
            Stencil::Second => 1,
            Stencil::Fourth => 2,
        }
    }

    /// Nominal order of accuracy.
    pub fn order(self) -> u32 {
        match self {
            Stencil::Second => 2,
            Stencil::Fourth => 4,
        }
    }

    fn d1(self, f: &dyn Fn(isize) -> f64, h: f64) -> f64 {
        match self {
            Stencil::Second => (f(1) - f(-1)) / (2.0 * h),
            Stencil::Fourth => (f(-2) - 8.0 * f(-1) + 8.0 * f(1) - f(2)) / (12.0 * h),
        }
    }

    fn d2(self, f: &dyn Fn(isize) -> f64, h: f64) -> f64 {
        match self {
            Stencil::Second => (f(1) - 2.0 * f(0) + f(-1)) / (h * h),
            Stencil::Fourth => (-f(-2) + 16.0 * f(-1) - 30.0 * f(0) + 16.0 * f(1) - f(2)) / (12.0 * h * h),
        }
    }

    /// `(f_u, f_v, f_uu, f_uv, f_vv)` of a node-sampled scalar at `(i, j)`.
    fn diff<F: Fn(usize, usize) -> f64>(self, grid: &Grid, f: F, i: usize, j: usize) -> [f64; 5] {
        let (hu, hv) = (grid.du(), grid.dv());
        let at = |a: isize, b: isize| f((i as isize + a) as usize, (j as isize + b) as usize);
        [
            self.d1(&|a| at(a, 0), hu),
            self.d1(&|b| at(0, b), hv),
            self.d2(&|a| at(a, 0), hu),
            self.d1(&|a| self.d1(&|b| at(a, b), hv), hu),
            self.d2(&|b| at(0, b), hv),
        ]
    }

    /// Derivative of a node-sampled vector field along `u` (`dir = 0`) or `v`.
    fn diff_vec<F: Fn(usize, usize) -> Vector3<f64>>(self, grid: &Grid, f: F, i: usize, j: usize, dir: usize) -> Vector3<f64> {
        let (h, step): (f64, (isize, isize)) = if dir == 0 { (grid.du(), (1, 0)) } else { (grid.dv(), (0, 1)) };
        let at = |k: isize| f((i as isize + k * step.0) as usize, (j as isize + k * step.1) as usize);
        Vector3::from_fn(|c, _| self.d1(&|k| at(k)[c], h))
    }
}

fn grid_gauss_curvature(grid: &Grid, nodes: &[Node], i: usize, j: usize, st: Stencil) -> f64 {
    let at = |k: usize| {
        move |a: usize, b: usize| {
            let (e, f, g) = nodes[grid.node(a, b)].metric();
            [e, f, g][k]
        }
    };
    let de = st.diff(grid, at(0), i, j);
    let df = st.diff(grid, at(1), i, j);
    let dg = st.diff(grid, at(2), i, j);
    brioschi(nodes[grid.node(i, j)].metric(), (de[0], de[1]), (df[0], df[1]), (dg[0], dg[1]), de[4], df[3], dg[2])
}

/// Residuals of the five compatibility equations of the fundamental data on
/// `grid`, with fourth-order central differences (see
/// [`gauss_codazzi_residuals_with`]).
pub fn gauss_codazzi_residuals(s: &ParametricSurface, grid: &Grid) -> Result<Residuals> {
    gauss_codazzi_residuals_with(s, grid, Stencil::Fourth)
}

/// Residuals of the five compatibility equations on the nodes of `grid`
/// at least `stencil.margin()` layers inside the boundary.
///
/// The same central stencil differentiates `E, F, G` (Brioschi, Gauss),
/// the ambient fields `A∂_u, A∂_v` (Codazzi), `T` and `ν`; the unit-length
/// identity is pointwise.  The residuals therefore decay like
/// `h^stencil.order()` on smooth surfaces.
pub fn gauss_codazzi_residuals_with(s: &ParametricSurface, grid: &Grid, st: Stencil) -> Result<Residuals> {
    let p = s.chart().params();
    let (tau, kt) = (p.tau, p.kappa_minus_4tau2());
    let nodes = nodes(s, grid)?;
    let at = |i: usize, j: usize| &nodes[grid.node(i, j)];
    let mut fields: [Vec<f64>; 5] = Default::default();
    for (i, j) in grid.interior(st.margin()) {
        let n = at(i, j);
        let d = n.frame.sample;
        let [xu, xv] = n.tangents();
        // Gauss
        let k = grid_gauss_curvature(grid, &nodes, i, j, st);
        fields[0].push(k - n.shape.determinant() - tau * tau - kt * d.nu * d.nu);
        // Codazzi
        let d_u_av = st.diff_vec(grid, |a, b| at(a, b).a_cols[1], i, j, 0);
        let d_v_au = st.diff_vec(grid, |a, b| at(a, b).a_cols[0], i, j, 1);
        let lhs =
            n.tangential(&(n.ambient_derivative(0, &n.a_cols[1], &d_u_av) - n.ambient_derivative(1, &n.a_cols[0], &d_v_au)));
        let rhs = (xu * n.dot(&xv, &n.t) - xv * n.dot(&xu, &n.t)) * (kt * d.nu);
        fields[1].push(n.norm(&(lhs - rhs)));
        // tangent part of ξ
        let mut worst: f64 = 0.0;
        for (kdir, x) in [xu, xv].iter().enumerate() {
            let dt = st.diff_vec(grid, |a, b| at(a, b).t, i, j, kdir);
            let lhs = n.tangential(&n.ambient_derivative(kdir, &n.t, &dt));
            let rhs = (n.a_cols[kdir] - n.j(x) * tau) * d.nu;
            worst = worst.max(n.norm(&(lhs - rhs)));
        }
        fields[2].push(worst);
        // angle gradient
        let dn = st.diff(grid, |a, b| at(a, b).frame.sample.nu, i, j);
        let inv = n.frame.local.first.try_inverse().unwrap_or_else(Matrix2::zeros);
        let gc = inv * Vector2::new(dn[0], dn[1]);
        let grad = xu * gc.x + xv * gc.y;
        let tc = inv * Vector2::new(n.dot(&n.t, &xu), n.dot(&n.t, &xv));
        let a_t = n.a_cols[0] * tc.x + n.a_cols[1] * tc.y;
        fields[3].push(n.norm(&(grad + a_t + n.j(&n.t) * tau)));
        // unit length
        fields[4].push(d.t.norm_squared() + d.nu * d.nu - 1.0);
    }
    let margin = st.margin();
    let [gauss, codazzi, killing_tangent, angle_gradient, unit] = fields.map(|values| GridField { grid: *grid, margin, values });
    Ok(Residuals { gauss, codazzi, killing_tangent, angle_gradient, unit })
}

/// Applies the stability (Jacobi) operator
/// `L f = Δf − (2K − 4H² − κ − (κ − 4τ²)ν²) f`
/// on the interior nodes of `grid`.  `Δ` is the Laplace–Beltrami operator of
/// the induced metric, `g^{ij}(f_ij − Γ^k_ij f_k)`, with `f_ij` by
/// second-order central differences and the intrinsic Christoffel symbols from the immersion's
/// jet; `K` is the Brioschi curvature and `H`, `ν` are pointwise.
pub fn stability_apply<F>(s: &ParametricSurface, f: F, grid: &Grid) -> Result<GridField>
where
    F: Fn(f64, f64) -> Result<f64>,
{
    let p = s.chart().params();
    let (kappa, kt) = (p.kappa, p.kappa_minus_4tau2());
    let nodes = nodes(s, grid)?;
    let vals = grid.sample(&f)?;
    let st = Stencil::Second;
    let mut out = Vec::with_capacity((grid.nu - 1) * (grid.nv - 1));
    for (i, j) in grid.interior(st.margin()) {
        let n = &nodes[grid.node(i, j)];
        let l = &n.frame.local;
        let inv = l.first.try_inverse().unwrap_or_else(Matrix2::zeros);
        let df = st.diff(grid, |a, b| vals[grid.node(a, b)], i, j);
        let [xu, xv] = n.tangents();
        let cov = |a: &Vector3<f64>, b: &Vector3<f64>, d2: &Vector3<f64>| d2 + contract(&l.gamma, a, b);
        let dd = [[cov(&xu, &xu, &l.jet.xuu), cov(&xu, &xv, &l.jet.xuv)], [cov(&xu, &xv, &l.jet.xuv), cov(&xv, &xv, &l.jet.xvv)]];
        let hess = Matrix2::new(df[2], df[3], df[3], df[4]);
        let mut lap = 0.0;
        for a in 0..2 {
            for b in 0..2 {
                // Γ^k_ab f_k = (I⁻¹ ⟨∇̄_a X_b, X_l⟩)_k f_k
                let proj = inv * Vector2::new(n.dot(&dd[a][b], &xu), n.dot(&dd[a][b], &xv));
                lap += inv[(a, b)] * (hess[(a, b)] - proj.x * df[0] - proj.y * df[1]);
            }
        }
        let k = grid_gauss_curvature(grid, &nodes, i, j, st);
        let h = 0.5 * n.shape.trace();
        let nu = n.frame.sample.nu;
        let potential = 2.0 * k - 4.0 * h * h - kappa - kt * nu * nu;
        out.push(lap - potential * vals[grid.node(i, j)]);
    }
    Ok(GridField { grid: *grid, margin: st.margin(), values: out })
}

/// Fourth-order first and second differences on five equispaced samples.
fn d1_4(f: &[f64; 5], h: f64) -> f64 {
    (f[0] - 8.0 * f[1] + 8.0 * f[3] - f[4]) / (12.0 * h)
}

fn d2_4(f: &[f64; 5], h: f64) -> f64 {
    (-f[0] + 16.0 * f[1] - 30.0 * f[2] + 16.0 * f[3] - f[4]) / (12.0 * h * h)
}

/// Relative step of the local stencil used by [`abresch_rosenberg_q`].
pub const Q_STEP: f64 = 5e-3;

/// The function `q` whose vanishing characterises surfaces with zero
/// Abresch–Rosenberg differential, reported already multiplied by `κ − 4τ²`:
/// `q = ¼(4H² + κ − (κ−4τ²)ν²)(4H² + κ + 3(κ−4τ²)ν² − 4K) − (κ−4τ²)‖∇ν‖²`.
///
/// `K` (Brioschi) and `∇ν` come from fourth-order differences on a 5×5
/// patch of step `Q_STEP·(1 + |u|)`, `Q_STEP·(1 + |v|)`; `H` and `ν` are
/// pointwise.  Undefined (spec error) when `κ = 4τ²`.
pub fn abresch_rosenberg_q(s: &ParametricSurface, u: f64, v: f64) -> Result<f64> {
    let p = s.chart().params();
    let kt = p.kappa_minus_4tau2();
    if kt.abs() < 1e-12 {
        return Err(FundamentalError::Spec("q is undefined when κ = 4τ²".into()));
    }
    let (hu, hv) = (Q_STEP * (1.0 + u.abs()), Q_STEP * (1.0 + v.abs()));
    let mut efg = [[[0.0; 5]; 5]; 4];
    let mut centre = None;
    #[allow(clippy::needless_range_loop)]
    for a in 0..5 {
        for b in 0..5 {
            let fr = surface_frame(s, u + (a as f64 - 2.0) * hu, v + (b as f64 - 2.0) * hv)?;
            let i = fr.local.first;
            efg[0][a][b] = i[(0, 0)];
            efg[1][a][b] = i[(0, 1)];
            efg[2][a][b] = i[(1, 1)];
            efg[3][a][b] = fr.sample.nu;
            if a == 2 && b == 2 {
                centre = Some(fr);
            }
        }
    }
    let centre = centre.expect("centre sampled");
    let col = |m: &[[f64; 5]; 5], b: usize| std::array::from_fn::<f64, 5, _>(|a| m[a][b]);
    let du = |m: &[[f64; 5]; 5]| d1_4(&col(m, 2), hu);
    let dv = |m: &[[f64; 5]; 5]| d1_4(&m[2], hv);
    let duv = |m: &[[f64; 5]; 5]| {
        let dvs: [f64; 5] = std::array::from_fn(|a| d1_4(&m[a], hv));
        d1_4(&dvs, hu)
    };
    let [e, f, g, nu_patch] = &efg;
    let k = brioschi(
        (e[2][2], f[2][2], g[2][2]),
        (du(e), dv(e)),
        (du(f), dv(f)),
        (du(g), dv(g)),
        d2_4(&e[2], hv),
        duv(f),
        d2_4(&col(g, 2), hu),
    );
    let dnu = Vector2::new(du(nu_patch), dv(nu_patch));
    let inv = centre.local.first.try_inverse().unwrap_or_else(Matrix2::zeros);
    let grad2 = dnu.dot(&(inv * dnu));
    let h = centre.sample.mean_curvature();
    let nu = centre.sample.nu;
    let c = 4.0 * h * h + p.kappa;
    Ok(0.25 * (c - kt * nu * nu) * (c + 3.0 * kt * nu * nu - 4.0 * k) - kt * grad2)
}
