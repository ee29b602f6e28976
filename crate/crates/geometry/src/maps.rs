//! Isometries between charts: Cartan → half-space, Cartan → Berger sphere
//! (with the unit 3-sphere representation), and the product Cartan chart →
//! conformal model of `S²(kappa) × R`.

use std::f64::consts::PI;

use nalgebra::{Matrix3, Vector3, Vector4};
use num_complex::Complex64;

use crate::chart::{lambda_kappa, AmbientPoint, Chart, ChartKind};
use crate::error::{GeometryError, Result};

/// Maps `p` to the `target` chart.
///
/// Supported pairs (parameters must agree):
/// * Cartan → BergerSphere and back (identical coordinates; the 3-sphere
///   representation is [`berger_embed`]);
/// * Cartan → HalfSpace for `kappa < 0`;
/// * Cartan with `tau = 0`, `kappa > 0` → ConformalProduct, `F(q, t) = e^{√κ t} q`.
pub fn chart_map(p: &AmbientPoint, target: Chart) -> Result<AmbientPoint> {
    let src = p.chart;
    let unsupported = || GeometryError::UnsupportedPair { from: src.kind().name(), to: target.kind().name() };
    let same = src.kappa() == target.kappa() && src.tau() == target.tau();
    if !same {
        return Err(unsupported());
    }
    src.check(&p.coords)?;
    match (src.kind(), target.kind()) {
        (a, b) if a == b => Ok(*p),
        (ChartKind::Cartan, ChartKind::BergerSphere) | (ChartKind::BergerSphere, ChartKind::Cartan) => target.point(p.coords),
        (ChartKind::Cartan, ChartKind::HalfSpace) => target.point(cartan_to_half_space(src.kappa(), src.tau(), &p.coords)?),
        (ChartKind::Cartan, ChartKind::ConformalProduct) => target.point(cartan_to_conformal(src.kappa(), &p.coords)?),
        _ => Err(unsupported()),
    }
}

/// Cartan → half-space isometry for `kappa < 0`.  The `arccos` is taken on
/// its principal branch `[0, π]`; its argument lies in `(−1, 1)` for every
/// point of `Omega_kappa`, so the map is smooth on the whole chart.
pub fn cartan_to_half_space(kappa: f64, tau: f64, p: &Vector3<f64>) -> Result<Vector3<f64>> {
    if kappa >= 0.0 {
        return Err(GeometryError::InvalidChart("half-space map needs kappa < 0".into()));
    }
    lambda_kappa(kappa, p.x, p.y)?;
    let s = (-kappa).sqrt();
    let a = 2.0 / s + p.x;
    let d = a * a + p.y * p.y;
    let x = 4.0 / s * p.y / d;
    let y = (-4.0 / kappa - p.x * p.x - p.y * p.y) / d;
    let z = p.z + 4.0 * tau / kappa * (p.y / d.sqrt()).clamp(-1.0, 1.0).acos();
    Ok(Vector3::new(x, y, z))
}

/// Inverse stereographic projection used by the conformal model:
/// `(u, v) ↦ (2u, 2v, 1 − u² − v²) / (1 + u² + v²)`.
fn inverse_stereographic(u: f64, v: f64) -> Vector3<f64> {
    let r2 = u * u + v * v;
    Vector3::new(2.0 * u, 2.0 * v, 1.0 - r2) / (1.0 + r2)
}

/// Product Cartan chart (`tau = 0`, `kappa > 0`) → conformal model.
pub fn cartan_to_conformal(kappa: f64, p: &Vector3<f64>) -> Result<Vector3<f64>> {
    if kappa <= 0.0 {
        return Err(GeometryError::InvalidChart("conformal map needs kappa > 0".into()));
    }
    let s = kappa.sqrt();
    let q = inverse_stereographic(s * p.x / 2.0, s * p.y / 2.0);
    Ok(q * (s * p.z).exp())
}

/// Unit 3-sphere representation `(z, w)` of a Berger (Cartan-coordinate) point:
/// `Θ(x, y, z) = ((√κ/2)(y + ix) e^{iφ}, e^{iφ}) / √(1 + κ(x² + y²)/4)`,
/// `φ = κ z / (4τ)`.
pub fn berger_embed(kappa: f64, tau: f64, p: &Vector3<f64>) -> Result<[Complex64; 2]> {
    if kappa <= 0.0 || tau == 0.0 {
        return Err(GeometryError::InvalidChart("Berger map needs kappa > 0 and tau != 0".into()));
    }
    let n = (1.0 + 0.25 * kappa * (p.x * p.x + p.y * p.y)).sqrt();
    let e = Complex64::from_polar(1.0, kappa * p.z / (4.0 * tau));
    Ok([Complex64::new(p.y, p.x) * e * (kappa.sqrt() / 2.0 / n), e / n])
}

/// Inverse of [`berger_embed`]; the fiber coordinate is chosen on the branch
/// closest to `z_hint`.  Points of the removed fiber `w = 0` are rejected.
pub fn berger_unembed(kappa: f64, tau: f64, q: &[Complex64; 2], z_hint: f64) -> Result<Vector3<f64>> {
    let [zc, w] = *q;
    if w.norm() < 1e-14 {
        return Err(GeometryError::Domain("point lies on the fiber removed by the Cartan chart".into()));
    }
    let yx = zc * 2.0 / (kappa.sqrt() * w);
    let period = 8.0 * PI * tau / kappa;
    let z0 = 4.0 * tau / kappa * w.arg();
    let k = ((z_hint - z0) / period).round();
    Ok(Vector3::new(yx.im, yx.re, z0 + k * period))
}

/// Berger metric on `C² ≅ R⁴` at `q`:
/// `(4/κ)[⟨X, Y⟩ + (16τ²/κ²)(4τ²/κ − 1)⟨X, ξ⟩⟨Y, ξ⟩]`, `ξ = (κ/4τ)(iz, iw)`.
pub fn berger_metric_4d(kappa: f64, tau: f64, q: &[Complex64; 2], x: &Vector4<f64>, y: &Vector4<f64>) -> f64 {
    let i = Complex64::i();
    let c = kappa / (4.0 * tau);
    let xi = [i * q[0] * c, i * q[1] * c];
    let xi = Vector4::new(xi[0].re, xi[0].im, xi[1].re, xi[1].im);
    4.0 / kappa * (x.dot(y) + 16.0 * tau * tau / (kappa * kappa) * (4.0 * tau * tau / kappa - 1.0) * x.dot(&xi) * y.dot(&xi))
}

/// Real 4-vector of a pair of complex numbers.
pub fn c2_to_r4(q: &[Complex64; 2]) -> Vector4<f64> {
    Vector4::new(q[0].re, q[0].im, q[1].re, q[1].im)
}

/// Pullback of the target metric through a chart map, evaluated from a
/// central-difference Jacobian with step `h`.  Used to certify isometries.
pub fn pullback_metric<F>(map: F, p: &Vector3<f64>, target_metric: &Matrix3<f64>, h: f64) -> Result<Matrix3<f64>>
where
    F: Fn(&Vector3<f64>) -> Result<Vector3<f64>>,
{
    let mut jac = Matrix3::zeros();
    for k in 0..3 {
        let mut e = Vector3::zeros();
        e[k] = h;
        let col = (map(&(p + e))? - map(&(p - e))?) / (2.0 * h);
        jac.set_column(k, &col);
    }
    Ok(jac.transpose() * target_metric * jac)
}
