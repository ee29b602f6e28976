//! Orthonormal frames, the Levi-Civita connection, the metric cross product
//! and the curvature tensor.

use nalgebra::{Matrix3, Vector3};

use crate::chart::{contract, same_base, AmbientPoint, ChartKind, TangentVector};
use crate::error::{GeometryError, Result};

/// A positively oriented orthonormal frame at a point; `E3` is always the
/// unit Killing field `xi`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FramePacket {
    /// First horizontal leg.
    pub e1: TangentVector,
    /// Second horizontal leg.
    pub e2: TangentVector,
    /// Vertical leg (`xi`).
    pub e3: TangentVector,
    /// Index (0-based) of the leg equal to `xi`; always 2.
    pub xi_index: usize,
}

impl FramePacket {
    /// Matrix whose columns are the coordinate components of `E1, E2, E3`.
    pub fn matrix(&self) -> Matrix3<f64> {
        Matrix3::from_columns(&[self.e1.components, self.e2.components, self.e3.components])
    }

    /// Gram matrix of the frame under the chart metric.
    pub fn gram(&self) -> Result<Matrix3<f64>> {
        let f = self.matrix();
        let g = self.e1.base.metric()?;
        Ok(f.transpose() * g * f)
    }
}

/// The closed-form frame of the Cartan and half-space models.
///
/// Berger-sphere and conformal charts have no tabulated frame; use
/// [`orthonormal_frame`] there.
pub fn frame_at(p: &AmbientPoint) -> Result<FramePacket> {
    let chart = p.chart;
    chart.check(&p.coords)?;
    let (kappa, tau) = (chart.kappa(), chart.tau());
    let (x, y) = (p.coords.x, p.coords.y);
    let (e1, e2) = match chart.kind() {
        ChartKind::Cartan => {
            let lam = crate::chart::lambda_kappa(kappa, x, y)?;
            (Vector3::new(1.0 / lam, 0.0, -tau * y), Vector3::new(0.0, 1.0 / lam, tau * x))
        }
        ChartKind::HalfSpace => {
            let s = (-kappa).sqrt();
            (Vector3::new(y * s, 0.0, 2.0 * tau / s), Vector3::new(0.0, y * s, 0.0))
        }
        other => return Err(GeometryError::UnsupportedChart(other.name())),
    };
    Ok(FramePacket { e1: p.vector(e1), e2: p.vector(e2), e3: p.vector(Vector3::z()), xi_index: 2 })
}

/// A positively oriented orthonormal frame with `E3 = xi` for any chart:
/// the closed form where available (Berger points use their Cartan
/// coordinates), otherwise Gram–Schmidt of `∂x` against `xi` with
/// `E2 = E3 × E1`.
pub fn orthonormal_frame(p: &AmbientPoint) -> Result<FramePacket> {
    match p.chart.kind() {
        ChartKind::Cartan | ChartKind::HalfSpace => frame_at(p),
        ChartKind::BergerSphere => {
            let cartan = crate::chart::Chart::cartan(p.chart.kappa(), p.chart.tau());
            let f = frame_at(&cartan.point(p.coords)?)?;
            Ok(FramePacket {
                e1: p.vector(f.e1.components),
                e2: p.vector(f.e2.components),
                e3: p.vector(f.e3.components),
                xi_index: 2,
            })
        }
        ChartKind::ConformalProduct => {
            let g = p.metric()?;
            let xi = p.chart.xi(&p.coords)?;
            // Pick the coordinate axis least aligned with xi for stability.
            let axis = (0..3).min_by(|&a, &b| xi[a].abs().total_cmp(&xi[b].abs())).expect("three axes");
            let mut v = Vector3::zeros();
            v[axis] = 1.0;
            let v = v - xi * xi.dot(&(g * v));
            let e1 = v / v.dot(&(g * v)).sqrt();
            let e3 = p.vector(xi);
            let e1 = p.vector(e1);
            let e2 = cross(&e3, &e1)?;
            Ok(FramePacket { e1, e2, e3, xi_index: 2 })
        }
    }
}

/// Table of `∇_{E_i} E_j` in frame components, `table[i][j]`, for the charts
/// with a closed-form frame.
pub fn connection_table(p: &AmbientPoint) -> Result<[[Vector3<f64>; 3]; 3]> {
    let chart = p.chart;
    chart.check(&p.coords)?;
    let tau = chart.tau();
    let (x, y) = (p.coords.x, p.coords.y);
    let v = Vector3::new;
    Ok(match chart.kind() {
        ChartKind::Cartan | ChartKind::BergerSphere => {
            let k = chart.kappa();
            [
                [v(0.0, k * y / 2.0, 0.0), v(-k * y / 2.0, 0.0, tau), v(0.0, -tau, 0.0)],
                [v(0.0, -k * x / 2.0, -tau), v(k * x / 2.0, 0.0, 0.0), v(tau, 0.0, 0.0)],
                [v(0.0, -tau, 0.0), v(tau, 0.0, 0.0), v(0.0, 0.0, 0.0)],
            ]
        }
        ChartKind::HalfSpace => {
            let s = (-chart.kappa()).sqrt();
            [
                [v(0.0, s, 0.0), v(-s, 0.0, tau), v(0.0, -tau, 0.0)],
                [v(0.0, 0.0, -tau), v(0.0, 0.0, 0.0), v(tau, 0.0, 0.0)],
                [v(0.0, -tau, 0.0), v(tau, 0.0, 0.0), v(0.0, 0.0, 0.0)],
            ]
        }
        ChartKind::ConformalProduct => return Err(GeometryError::UnsupportedChart(chart.kind().name())),
    })
}

/// Covariant derivative `∇_X Y` of a vector field `Y` (coordinate components
/// as a function of coordinates) along `X`.
///
/// Charts with a closed-form frame expand `Y` in that frame and apply the
/// connection table; the conformal chart uses its Christoffel symbols.  The
/// derivative of the field itself is a central difference with spatial step
/// `1e-6 (1 + |p|)`.
pub fn covariant_derivative<F>(x: &TangentVector, field: F) -> Result<TangentVector>
where
    F: Fn(&Vector3<f64>) -> Result<Vector3<f64>>,
{
    let p = x.base;
    let xn = x.components.norm();
    if xn == 0.0 {
        return Ok(p.vector(Vector3::zeros()));
    }
    let h = 1e-6 * (1.0 + p.coords.norm()) / xn;
    let plus = p.coords + x.components * h;
    let minus = p.coords - x.components * h;
    p.chart.check(&plus)?;
    p.chart.check(&minus)?;
    match p.chart.kind() {
        ChartKind::ConformalProduct => {
            let y = field(&p.coords)?;
            let dy = (field(&plus)? - field(&minus)?) / (2.0 * h);
            let gamma = p.chart.christoffel(&p.coords)?;
            Ok(p.vector(dy + contract(&gamma, &x.components, &y)))
        }
        _ => {
            let frame_coeffs = |q: &Vector3<f64>| -> Result<Vector3<f64>> {
                let f = orthonormal_frame(&p.chart.point(*q)?)?.matrix();
                let inv = f.try_inverse().ok_or_else(|| GeometryError::Domain("singular frame".into()))?;
                Ok(inv * field(q)?)
            };
            let frame = orthonormal_frame(&p)?;
            let fm = frame.matrix();
            let a = fm.try_inverse().ok_or_else(|| GeometryError::Domain("singular frame".into()))? * x.components;
            let f0 = frame_coeffs(&p.coords)?;
            let df = (frame_coeffs(&plus)? - frame_coeffs(&minus)?) / (2.0 * h);
            let table = connection_table(&p)?;
            let mut out = df;
            for i in 0..3 {
                for j in 0..3 {
                    out += table[i][j] * (a[i] * f0[j]);
                }
            }
            Ok(p.vector(fm * out))
        }
    }
}

/// Metric cross product: `⟨u × v, w⟩ = vol(u, v, w)` for the Riemannian
/// volume form of the positively oriented coordinate orientation.
pub fn cross(u: &TangentVector, v: &TangentVector) -> Result<TangentVector> {
    same_base(u, v)?;
    let g = u.base.metric()?;
    Ok(u.base.vector(cross_components(&g, &u.components, &v.components)))
}

/// Coordinate form of the metric cross product: `g^{-1} √det g (u ×_E v)`.
pub fn cross_components(g: &Matrix3<f64>, u: &Vector3<f64>, v: &Vector3<f64>) -> Vector3<f64> {
    let det = g.determinant();
    let ginv = g.try_inverse().unwrap_or_else(Matrix3::zeros);
    ginv * u.cross(v) * det.sqrt()
}

/// Riemann curvature tensor
/// `R(X, Y, Z, W) = −τ² ⟨X×Y, Z×W⟩ − (κ − 4τ²) ⟨X×Y, ξ⟩ ⟨Z×W, ξ⟩`,
/// with the sign convention in which `R(X, Y, Y, X)` is the sectional curvature.
pub fn curvature(x: &TangentVector, y: &TangentVector, z: &TangentVector, w: &TangentVector) -> Result<f64> {
    for other in [y, z, w] {
        same_base(x, other)?;
    }
    let p = x.base;
    let g = p.metric()?;
    let xi = p.chart.xi(&p.coords)?;
    let a = cross_components(&g, &x.components, &y.components);
    let b = cross_components(&g, &z.components, &w.components);
    let tau = p.chart.tau();
    let ip = |u: &Vector3<f64>, v: &Vector3<f64>| u.dot(&(g * v));
    Ok(-tau * tau * ip(&a, &b) - p.chart.params().kappa_minus_4tau2() * ip(&a, &xi) * ip(&b, &xi))
}

/// Sectional curvature of the plane spanned by `x` and `y`.
pub fn sectional_curvature(x: &TangentVector, y: &TangentVector) -> Result<f64> {
    let area2 = x.dot(x)? * y.dot(y)? - x.dot(y)?.powi(2);
    if area2 <= 0.0 {
        return Err(GeometryError::InvalidArgument("degenerate plane".into()));
    }
    Ok(curvature(x, y, y, x)? / area2)
}

/// Scalar curvature at `p`: `Σ_{i≠j} K(E_i, E_j)` over an orthonormal frame.
pub fn scalar_curvature(p: &AmbientPoint) -> Result<f64> {
    let f = orthonormal_frame(p)?;
    let legs = [f.e1, f.e2, f.e3];
    let mut s = 0.0;
    for i in 0..3 {
        for j in 0..3 {
            if i != j {
                s += curvature(&legs[i], &legs[j], &legs[j], &legs[i])?;
            }
        }
    }
    Ok(s)
}

/// `⟨R(X, Y)Z, W⟩` from central differences of the Christoffel symbols
/// (step `h`), with `R(X, Y)Z = (∂_XΓ)(Y, Z) − (∂_YΓ)(X, Z) + Γ(X, Γ(Y, Z)) − Γ(Y, Γ(X, Z))`.
/// Independent of the closed form; used to validate it.
pub fn curvature_fd(x: &TangentVector, y: &TangentVector, z: &TangentVector, w: &TangentVector, h: f64) -> Result<f64> {
    let p = x.base;
    let chart = p.chart;
    let gamma = chart.christoffel(&p.coords)?;
    let dgamma = |dir: &Vector3<f64>| -> Result<[Matrix3<f64>; 3]> {
        let gp = chart.christoffel(&(p.coords + dir * h))?;
        let gm = chart.christoffel(&(p.coords - dir * h))?;
        Ok([(gp[0] - gm[0]) / (2.0 * h), (gp[1] - gm[1]) / (2.0 * h), (gp[2] - gm[2]) / (2.0 * h)])
    };
    let (xc, yc, zc) = (x.components, y.components, z.components);
    let dx = dgamma(&xc)?;
    let dy = dgamma(&yc)?;
    let r = contract(&dx, &yc, &zc) - contract(&dy, &xc, &zc) + contract(&gamma, &xc, &contract(&gamma, &yc, &zc))
        - contract(&gamma, &yc, &contract(&gamma, &xc, &zc));
    let g = p.metric()?;
    Ok(r.dot(&(g * w.components)))
}
