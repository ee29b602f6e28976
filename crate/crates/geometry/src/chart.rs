//! Space parameters, coordinate charts, points, tangent vectors and the
//! chart metrics with their first derivatives and Christoffel symbols.

use nalgebra::{Matrix3, Vector3};

use crate::error::{GeometryError, Result};

/// The pair `(kappa, tau)` selecting a space `E(kappa, tau)`, plus an optional
/// target mean curvature `h` carried as context for surface constructions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpaceParams {
    /// Curvature of the base surface `M²(kappa)`.
    pub kappa: f64,
    /// Bundle curvature.
    pub tau: f64,
    /// Mean curvature context (zero when irrelevant).
    pub h: f64,
}

impl SpaceParams {
    /// Parameters `(kappa, tau)` with zero mean-curvature context.
    pub fn new(kappa: f64, tau: f64) -> Self {
        Self { kappa, tau, h: 0.0 }
    }

    /// Parameters `(kappa, tau)` with mean-curvature context `h`.
    pub fn with_h(kappa: f64, tau: f64, h: f64) -> Self {
        Self { kappa, tau, h }
    }

    /// `kappa - 4 tau²`, the quantity preserved by sister correspondences.
    pub fn kappa_minus_4tau2(&self) -> f64 {
        self.kappa - 4.0 * self.tau * self.tau
    }

    /// `4H² + kappa` for the carried mean curvature.
    pub fn supercriticality(&self) -> f64 {
        4.0 * self.h * self.h + self.kappa
    }
}

/// Parameters of a minimal surface in `E(4H² + kappa, H)` paired with those of
/// its sister `H`-surface in `M²(kappa) × R`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConjugatePair {
    /// Space of the minimal surface: `(4H² + kappa, H)`, mean curvature 0.
    pub minimal: SpaceParams,
    /// Product space `(kappa, 0)` carrying mean curvature `H`.
    pub product: SpaceParams,
}

impl ConjugatePair {
    /// Builds the pair for product curvature `kappa` and mean curvature `h`.
    pub fn new(kappa: f64, h: f64) -> Self {
        Self { minimal: SpaceParams::with_h(4.0 * h * h + kappa, h, 0.0), product: SpaceParams::with_h(kappa, 0.0, h) }
    }

    /// Checks `kappa~ = 4H² + kappa` and `tau~ = H` within `tol`.
    pub fn check(&self, tol: f64) -> Result<()> {
        let h = self.product.h;
        let ok = (self.minimal.kappa - (4.0 * h * h + self.product.kappa)).abs() <= tol
            && (self.minimal.tau - h).abs() <= tol
            && self.product.tau.abs() <= tol;
        if ok {
            Ok(())
        } else {
            Err(GeometryError::InvalidArgument(format!("inconsistent conjugate pair {self:?}")))
        }
    }
}

/// Coordinate models of `E(kappa, tau)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ChartKind {
    /// Cartan model on `Omega_kappa × R`.
    Cartan,
    /// Half-space model, `kappa < 0`, `y > 0`.
    HalfSpace,
    /// Berger sphere, `kappa > 0`, `tau != 0`; points are stored in Cartan
    /// coordinates and mapped to the unit 3-sphere on demand.
    BergerSphere,
    /// `S²(kappa) × R` as a conformally flat metric on `R³ \ {0}`.
    ConformalProduct,
}

impl ChartKind {
    /// Lower-case name used in reports and errors.
    pub fn name(&self) -> &'static str {
        match self {
            ChartKind::Cartan => "cartan",
            ChartKind::HalfSpace => "halfspace",
            ChartKind::BergerSphere => "berger",
            ChartKind::ConformalProduct => "conformal",
        }
    }
}

/// A validated coordinate chart of `E(kappa, tau)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Chart {
    kind: ChartKind,
    params: SpaceParams,
}

/// Metric tensor and its coordinate derivatives `d_k g` at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricJet {
    /// Metric matrix in the coordinate basis.
    pub g: Matrix3<f64>,
    /// `dg[k]` is the partial derivative of `g` with respect to coordinate `k`.
    pub dg: [Matrix3<f64>; 3],
}

/// Christoffel symbols `gamma[k][(i, j)] = Γ^k_ij` in the coordinate basis.
pub type Christoffel = [Matrix3<f64>; 3];

/// `lambda_kappa(x, y) = 1 / (1 + kappa (x² + y²) / 4)`.
///
/// Fails when the denominator is not positive, i.e. outside `Omega_kappa`.
pub fn lambda_kappa(kappa: f64, x: f64, y: f64) -> Result<f64> {
    let d = 1.0 + 0.25 * kappa * (x * x + y * y);
    if d > 0.0 && d.is_finite() {
        Ok(1.0 / d)
    } else {
        Err(GeometryError::Domain(format!("(x, y) = ({x}, {y}) outside Omega_kappa for kappa = {kappa}")))
    }
}

impl Chart {
    /// Creates a chart, checking the parameter invariants of its kind.
    pub fn new(kind: ChartKind, params: SpaceParams) -> Result<Self> {
        let SpaceParams { kappa, tau, h } = params;
        if !(kappa.is_finite() && tau.is_finite() && h.is_finite()) {
            return Err(GeometryError::InvalidChart("non-finite parameters".into()));
        }
        match kind {
            ChartKind::Cartan => {}
            ChartKind::HalfSpace if kappa >= 0.0 => {
                return Err(GeometryError::InvalidChart(format!("half-space model needs kappa < 0, got {kappa}")));
            }
            ChartKind::BergerSphere if kappa <= 0.0 || tau == 0.0 => {
                return Err(GeometryError::InvalidChart(format!(
                    "Berger sphere needs kappa > 0 and tau != 0, got ({kappa}, {tau})"
                )));
            }
            ChartKind::ConformalProduct if kappa <= 0.0 || tau != 0.0 => {
                return Err(GeometryError::InvalidChart(format!(
                    "conformal product model needs kappa > 0 and tau = 0, got ({kappa}, {tau})"
                )));
            }
            _ => {}
        }
        Ok(Self { kind, params })
    }

    /// Cartan chart `M(kappa, tau)`.
    pub fn cartan(kappa: f64, tau: f64) -> Self {
        Self::new(ChartKind::Cartan, SpaceParams::new(kappa, tau)).expect("Cartan chart accepts all finite parameters")
    }

    /// Half-space chart.
    pub fn half_space(kappa: f64, tau: f64) -> Result<Self> {
        Self::new(ChartKind::HalfSpace, SpaceParams::new(kappa, tau))
    }

    /// Berger-sphere chart (Cartan coordinates with the 3-sphere map attached).
    pub fn berger(kappa: f64, tau: f64) -> Result<Self> {
        Self::new(ChartKind::BergerSphere, SpaceParams::new(kappa, tau))
    }

    /// Conformal model of `S²(kappa) × R`; `kappa = 1` gives the metric `g0 / |p|²`.
    pub fn conformal(kappa: f64) -> Result<Self> {
        Self::new(ChartKind::ConformalProduct, SpaceParams::new(kappa, 0.0))
    }

    /// The chart kind.
    pub fn kind(&self) -> ChartKind {
        self.kind
    }

    /// The space parameters.
    pub fn params(&self) -> SpaceParams {
        self.params
    }

    /// Base curvature.
    pub fn kappa(&self) -> f64 {
        self.params.kappa
    }

    /// Bundle curvature.
    pub fn tau(&self) -> f64 {
        self.params.tau
    }

    /// Homothety factor of the conformal model: its metric is
    /// `conformal_scale() * g0 / |p|²`.  Equals 1 for `kappa = 1`.
    pub fn conformal_scale(&self) -> f64 {
        1.0 / self.params.kappa
    }

    /// Whether the chart metric is written in Cartan coordinates.
    pub fn uses_cartan_coordinates(&self) -> bool {
        matches!(self.kind, ChartKind::Cartan | ChartKind::BergerSphere)
    }

    /// Checks that `p` lies in the chart domain.
    pub fn check(&self, p: &Vector3<f64>) -> Result<()> {
        if !(p.x.is_finite() && p.y.is_finite() && p.z.is_finite()) {
            return Err(GeometryError::Domain(format!("non-finite coordinates {p:?}")));
        }
        match self.kind {
            ChartKind::Cartan | ChartKind::BergerSphere => lambda_kappa(self.kappa(), p.x, p.y).map(|_| ()),
            ChartKind::HalfSpace => {
                if p.y > 0.0 {
                    Ok(())
                } else {
                    Err(GeometryError::Domain(format!("half-space model needs y > 0, got y = {}", p.y)))
                }
            }
            ChartKind::ConformalProduct => {
                if p.norm_squared() > 0.0 {
                    Ok(())
                } else {
                    Err(GeometryError::Domain("conformal model excludes the origin".into()))
                }
            }
        }
    }

    /// Whether `p` lies in the chart domain.
    pub fn contains(&self, p: &Vector3<f64>) -> bool {
        self.check(p).is_ok()
    }

    /// Builds a point of this chart after checking the domain.
    pub fn point(&self, coords: Vector3<f64>) -> Result<AmbientPoint> {
        self.check(&coords)?;
        Ok(AmbientPoint { chart: *self, coords })
    }

    /// Metric matrix at `p` in the coordinate basis.
    pub fn metric(&self, p: &Vector3<f64>) -> Result<Matrix3<f64>> {
        Ok(self.metric_jet(p)?.g)
    }

    /// Metric and its first coordinate derivatives, in closed form for every chart.
    pub fn metric_jet(&self, p: &Vector3<f64>) -> Result<MetricJet> {
        self.check(p)?;
        let SpaceParams { kappa, tau, .. } = self.params;
        match self.kind {
            ChartKind::Cartan | ChartKind::BergerSphere => {
                let (x, y) = (p.x, p.y);
                let lam = lambda_kappa(kappa, x, y)?;
                let lx = -0.5 * lam * lam * kappa * x;
                let ly = -0.5 * lam * lam * kappa * y;
                let theta = Vector3::new(lam * tau * y, -lam * tau * x, 1.0);
                let mut g = theta * theta.transpose();
                g[(0, 0)] += lam * lam;
                g[(1, 1)] += lam * lam;
                let dtheta = [
                    Vector3::new(lx * tau * y, -lx * tau * x - lam * tau, 0.0),
                    Vector3::new(ly * tau * y + lam * tau, -ly * tau * x, 0.0),
                ];
                let mut dg = [Matrix3::zeros(); 3];
                for (k, dl) in [lx, ly].into_iter().enumerate() {
                    let mut m = dtheta[k] * theta.transpose() + theta * dtheta[k].transpose();
                    m[(0, 0)] += 2.0 * lam * dl;
                    m[(1, 1)] += 2.0 * lam * dl;
                    dg[k] = m;
                }
                Ok(MetricJet { g, dg })
            }
            ChartKind::HalfSpace => {
                let y = p.y;
                let s = -1.0 / (kappa * y * y);
                let ds = 2.0 / (kappa * y * y * y);
                let theta = Vector3::new(2.0 * tau / (kappa * y), 0.0, 1.0);
                let dtheta = Vector3::new(-2.0 * tau / (kappa * y * y), 0.0, 0.0);
                let mut g = theta * theta.transpose();
                g[(0, 0)] += s;
                g[(1, 1)] += s;
                let mut dgy = dtheta * theta.transpose() + theta * dtheta.transpose();
                dgy[(0, 0)] += ds;
                dgy[(1, 1)] += ds;
                Ok(MetricJet { g, dg: [Matrix3::zeros(), dgy, Matrix3::zeros()] })
            }
            ChartKind::ConformalProduct => {
                let r2 = p.norm_squared();
                let s = 1.0 / (kappa * r2);
                let g = Matrix3::identity() * s;
                let c = -2.0 / (kappa * r2 * r2);
                let dg = [Matrix3::identity() * (c * p.x), Matrix3::identity() * (c * p.y), Matrix3::identity() * (c * p.z)];
                Ok(MetricJet { g, dg })
            }
        }
    }

    /// Metric derivatives by central differences with step `1e-6 (1 + |p|)`;
    /// kept as an independent cross-check of [`Chart::metric_jet`].
    pub fn metric_jet_fd(&self, p: &Vector3<f64>) -> Result<MetricJet> {
        let g = self.metric(p)?;
        let h = 1e-6 * (1.0 + p.norm());
        let mut dg = [Matrix3::zeros(); 3];
        for (k, d) in dg.iter_mut().enumerate() {
            let mut e = Vector3::zeros();
            e[k] = h;
            *d = (self.metric(&(p + e))? - self.metric(&(p - e))?) / (2.0 * h);
        }
        Ok(MetricJet { g, dg })
    }

    /// Christoffel symbols of the chart metric at `p`.
    pub fn christoffel(&self, p: &Vector3<f64>) -> Result<Christoffel> {
        christoffel_from_jet(&self.metric_jet(p)?)
    }

    /// Coordinate components of the unit Killing field `xi` at `p`.
    pub fn xi(&self, p: &Vector3<f64>) -> Result<Vector3<f64>> {
        self.check(p)?;
        Ok(match self.kind {
            ChartKind::ConformalProduct => p * self.kappa().sqrt(),
            _ => Vector3::z(),
        })
    }
}

/// Christoffel symbols `Γ^k_ij = ½ g^{kl} (∂_i g_jl + ∂_j g_il − ∂_l g_ij)`.
pub fn christoffel_from_jet(jet: &MetricJet) -> Result<Christoffel> {
    let ginv = jet.g.try_inverse().ok_or_else(|| GeometryError::Domain("degenerate metric".into()))?;
    // lower[l][(i, j)] = ½ (∂_i g_jl + ∂_j g_il − ∂_l g_ij)
    let mut lower = [Matrix3::zeros(); 3];
    for (l, low) in lower.iter_mut().enumerate() {
        for i in 0..3 {
            for j in 0..3 {
                low[(i, j)] = 0.5 * (jet.dg[i][(j, l)] + jet.dg[j][(i, l)] - jet.dg[l][(i, j)]);
            }
        }
    }
    let mut gamma = [Matrix3::zeros(); 3];
    for (k, gk) in gamma.iter_mut().enumerate() {
        for l in 0..3 {
            *gk += lower[l] * ginv[(k, l)];
        }
    }
    Ok(gamma)
}

/// Contracts Christoffel symbols with two vectors: `Γ(u, v)^k = Γ^k_ij u^i v^j`.
pub fn contract(gamma: &Christoffel, u: &Vector3<f64>, v: &Vector3<f64>) -> Vector3<f64> {
    Vector3::new(u.dot(&(gamma[0] * v)), u.dot(&(gamma[1] * v)), u.dot(&(gamma[2] * v)))
}

/// A point of a chart.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AmbientPoint {
    /// Owning chart.
    pub chart: Chart,
    /// Chart coordinates.
    pub coords: Vector3<f64>,
}

impl AmbientPoint {
    /// Metric matrix at this point.
    pub fn metric(&self) -> Result<Matrix3<f64>> {
        self.chart.metric(&self.coords)
    }

    /// Tangent vector at this point with the given coordinate components.
    pub fn vector(&self, components: Vector3<f64>) -> TangentVector {
        TangentVector { base: *self, components }
    }

    /// The unit Killing field at this point.
    pub fn xi(&self) -> Result<TangentVector> {
        Ok(self.vector(self.chart.xi(&self.coords)?))
    }
}

/// A tangent vector in the coordinate basis `∂x, ∂y, ∂z` at a base point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TangentVector {
    /// Base point.
    pub base: AmbientPoint,
    /// Coordinate components.
    pub components: Vector3<f64>,
}

impl TangentVector {
    /// Metric inner product with another vector at the same base point.
    pub fn dot(&self, other: &TangentVector) -> Result<f64> {
        same_base(self, other)?;
        let g = self.base.metric()?;
        Ok(self.components.dot(&(g * other.components)))
    }

    /// Metric norm.
    pub fn norm(&self) -> Result<f64> {
        Ok(self.dot(self)?.sqrt())
    }

    /// Scales the components.
    pub fn scale(&self, s: f64) -> TangentVector {
        self.base.vector(self.components * s)
    }

    /// Sum of two vectors at the same base point.
    pub fn add(&self, other: &TangentVector) -> Result<TangentVector> {
        same_base(self, other)?;
        Ok(self.base.vector(self.components + other.components))
    }
}

pub(crate) fn same_base(a: &TangentVector, b: &TangentVector) -> Result<()> {
    if a.base.chart == b.base.chart && a.base.coords == b.base.coords {
        Ok(())
    } else {
        Err(GeometryError::InvalidArgument("tangent vectors have different base points".into()))
    }
}
