//! Geodesics (RK4 with closed-form shortcuts for vertical and horizontal
//! starts) and horizontal lifts of base curves.

use nalgebra::{Vector2, Vector3};
use num_complex::Complex64;

use crate::chart::{contract, lambda_kappa, AmbientPoint, ChartKind, SpaceParams, TangentVector};
use crate::error::{GeometryError, Result};
use crate::quadrature::gauss_legendre7;

/// Default number of RK4 steps per unit length.
pub const STEPS_PER_UNIT_LENGTH: usize = 64;

/// Tolerance on `|v0| = 1` accepted by [`geodesic`].
const UNIT_TOL: f64 = 1e-10;

/// Relative size of the horizontal (resp. vertical) part below which a
/// starting velocity counts as vertical (resp. horizontal).
const ALIGN_TOL: f64 = 1e-12;

/// How a geodesic was evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GeodesicMethod {
    /// Closed form along a fiber of the Killing submersion.
    Vertical,
    /// Closed-form base geodesic lifted horizontally.
    Horizontal,
    /// Fixed-step fourth-order Runge–Kutta.
    RungeKutta,
}

/// A sampled geodesic.
#[derive(Debug, Clone, PartialEq)]
pub struct Geodesic {
    /// `steps + 1` equally spaced points, starting at the initial point.
    pub points: Vec<AmbientPoint>,
    /// Coordinate velocity at each sample.
    pub velocities: Vec<nalgebra::Vector3<f64>>,
    /// Evaluation method.
    pub method: GeodesicMethod,
}

/// Number of RK4 steps used for a geodesic of the given length by default.
pub fn default_steps(length: f64) -> usize {
    ((length.abs() * STEPS_PER_UNIT_LENGTH as f64).ceil() as usize).max(1)
}

/// Unit-speed geodesic from `v0.base` with initial velocity `v0`, sampled at
/// `steps + 1` points over `[0, length]`.
pub fn geodesic(v0: &TangentVector, length: f64, steps: usize) -> Result<Geodesic> {
    if steps == 0 || !(length >= 0.0) {
        return Err(GeometryError::InvalidArgument("geodesic needs steps >= 1 and length >= 0".into()));
    }
    let n = v0.norm()?;
    if (n - 1.0).abs() > UNIT_TOL {
        return Err(GeometryError::InvalidArgument(format!("initial velocity must be unit, |v0| = {n}")));
    }
    let p0 = v0.base;
    let xi = p0.xi()?;
    let vert = v0.dot(&xi)?;
    let horizontal_part = (1.0 - vert * vert).max(0.0).sqrt();
    if horizontal_part < ALIGN_TOL {
        return vertical_geodesic(&p0, vert.signum(), length, steps);
    }
    if vert.abs() < ALIGN_TOL && p0.chart.uses_cartan_coordinates() {
        return horizontal_geodesic(v0, length, steps);
    }
    rk4_geodesic(v0, length, steps)
}

fn vertical_geodesic(p0: &AmbientPoint, sign: f64, length: f64, steps: usize) -> Result<Geodesic> {
    let chart = p0.chart;
    let mut points = Vec::with_capacity(steps + 1);
    let mut velocities = Vec::with_capacity(steps + 1);
    for i in 0..=steps {
        let s = sign * length * i as f64 / steps as f64;
        let q = match chart.kind() {
            ChartKind::ConformalProduct => p0.coords * (chart.kappa().sqrt() * s).exp(),
            _ => p0.coords + Vector3::z() * s,
        };
        let pt = chart.point(q)?;
        velocities.push(chart.xi(&q)? * sign);
        points.push(pt);
    }
    Ok(Geodesic { points, velocities, method: GeodesicMethod::Vertical })
}

/// Closed-form unit-speed geodesic of `M²(kappa)` in the Cartan disk
/// coordinates, starting at `w0` in direction `d` (unit complex number).
#[derive(Debug, Clone, Copy)]
pub struct BaseGeodesic {
    kappa: f64,
    w0: Complex64,
    d: Complex64,
}

impl BaseGeodesic {
    /// Base geodesic through `w0 = x + iy` with unit direction angle `d`.
    pub fn new(kappa: f64, w0: Complex64, d: Complex64) -> Self {
        Self { kappa, w0, d: d / d.norm() }
    }

    /// Position and velocity (`dw/ds`) at arclength `s`.
    pub fn eval(&self, s: f64) -> Result<(Complex64, Complex64)> {
        let k = self.kappa;
        if k == 0.0 {
            return Ok((self.w0 + self.d * s, self.d));
        }
        let sign = k.signum();
        let c = 0.5 * k.abs().sqrt();
        // rho(s) is the scaled radius of the geodesic through the origin.
        let (rho, drho) = if k > 0.0 {
            let t = (c * s).tan();
            (t, c * (1.0 + t * t))
        } else {
            let t = (c * s).tanh();
            (t, c * (1.0 - t * t))
        };
        // Isometry of M²(kappa) moving the origin to w0 without rotating.
        let a = self.w0 * c;
        let zeta = self.d * rho;
        let den = Complex64::new(1.0, 0.0) - a.conj() * zeta * sign;
        if den.norm() < 1e-12 || !rho.is_finite() {
            return Err(GeometryError::Domain("base geodesic leaves Omega_kappa".into()));
        }
        let m = (zeta + a) / den;
        let dm = (1.0 + sign * a.norm_sqr()) / (den * den);
        Ok((m / c, dm * self.d * drho / c))
    }
}

fn horizontal_geodesic(v0: &TangentVector, length: f64, steps: usize) -> Result<Geodesic> {
    let p0 = v0.base;
    let chart = p0.chart;
    let (kappa, tau) = (chart.kappa(), chart.tau());
    let base =
        BaseGeodesic::new(kappa, Complex64::new(p0.coords.x, p0.coords.y), Complex64::new(v0.components.x, v0.components.y));
    // dz/ds = λτ (x y' − y x') = λτ Im(conj(w) w').
    let dz = |s: f64| -> f64 {
        match base.eval(s) {
            Ok((w, dw)) => {
                let lam = lambda_kappa(kappa, w.re, w.im).unwrap_or(f64::NAN);
                lam * tau * (w.conj() * dw).im
            }
            Err(_) => f64::NAN,
        }
    };
    let mut points = Vec::with_capacity(steps + 1);
    let mut velocities = Vec::with_capacity(steps + 1);
    let mut z = p0.coords.z;
    let ds = length / steps as f64;
    for i in 0..=steps {
        let s = i as f64 * ds;
        if i > 0 {
            z += gauss_legendre7(dz, s - ds, s);
        }
        let (w, dw) = base.eval(s)?;
        let q = Vector3::new(w.re, w.im, z);
        if !z.is_finite() {
            return Err(GeometryError::Domain("horizontal geodesic leaves the chart".into()));
        }
        points.push(chart.point(q)?);
        velocities.push(Vector3::new(dw.re, dw.im, dz(s)));
    }
    Ok(Geodesic { points, velocities, method: GeodesicMethod::Horizontal })
}

fn rk4_geodesic(v0: &TangentVector, length: f64, steps: usize) -> Result<Geodesic> {
    let chart = v0.base.chart;
    let accel = |x: &Vector3<f64>, v: &Vector3<f64>| -> Result<Vector3<f64>> {
        let gamma = chart.christoffel(x)?;
        Ok(-contract(&gamma, v, v))
    };
    let h = length / steps as f64;
    let mut x = v0.base.coords;
    let mut v = v0.components;
    let mut points = vec![v0.base];
    let mut velocities = vec![v];
    for _ in 0..steps {
        let k1x = v;
        let k1v = accel(&x, &v)?;
        let k2x = v + k1v * (h / 2.0);
        let k2v = accel(&(x + k1x * (h / 2.0)), &k2x)?;
        let k3x = v + k2v * (h / 2.0);
        let k3v = accel(&(x + k2x * (h / 2.0)), &k3x)?;
        let k4x = v + k3v * h;
        let k4v = accel(&(x + k3x * h), &k4x)?;
        x += (k1x + k2x * 2.0 + k3x * 2.0 + k4x) * (h / 6.0);
        v += (k1v + k2v * 2.0 + k3v * 2.0 + k4v) * (h / 6.0);
        points.push(chart.point(x)?);
        velocities.push(v);
    }
    Ok(Geodesic { points, velocities, method: GeodesicMethod::RungeKutta })
}

/// Integrates the geodesic equation with RK4 regardless of the starting
/// direction (no closed-form shortcut); used to validate the shortcuts.
pub fn geodesic_rk4(v0: &TangentVector, length: f64, steps: usize) -> Result<Geodesic> {
    if steps == 0 {
        return Err(GeometryError::InvalidArgument("steps must be >= 1".into()));
    }
    rk4_geodesic(v0, length, steps)
}

/// A horizontal lift of a base polyline into the Cartan model.
#[derive(Debug, Clone, PartialEq)]
pub struct HorizontalLift {
    /// Lifted vertices (Cartan coordinates).
    pub points: Vec<Vector3<f64>>,
    /// For a closed base curve (first vertex equal to the last), the signed
    /// vertical gap `z_end − z_start`; `None` for open curves.
    pub closed_gap: Option<f64>,
}

/// Lifts a polyline of `Omega_kappa` to a curve orthogonal to `xi` starting at
/// height `z0`, integrating `dz = λτ (x dy − y dx)` with a 7-point
/// Gauss–Legendre rule per segment (exact for `kappa = 0`).
pub fn horizontal_lift(params: SpaceParams, base: &[Vector2<f64>], z0: f64) -> Result<HorizontalLift> {
    let SpaceParams { kappa, tau, .. } = params;
    if base.is_empty() {
        return Err(GeometryError::InvalidArgument("empty base curve".into()));
    }
    for q in base {
        lambda_kappa(kappa, q.x, q.y)?;
    }
    let mut points = Vec::with_capacity(base.len());
    let mut z = z0;
    points.push(Vector3::new(base[0].x, base[0].y, z));
    for seg in base.windows(2) {
        let (a, b) = (seg[0], seg[1]);
        let d = b - a;
        let integrand = |t: f64| {
            let q = a + d * t;
            lambda_kappa(kappa, q.x, q.y).map_or(f64::NAN, |lam| lam * tau * (q.x * d.y - q.y * d.x))
        };
        let dz = gauss_legendre7(integrand, 0.0, 1.0);
        if !dz.is_finite() {
            return Err(GeometryError::Domain("base segment leaves Omega_kappa".into()));
        }
        z += dz;
        points.push(Vector3::new(b.x, b.y, z));
    }
    let closed = base.len() > 1 && (base[0] - base[base.len() - 1]).norm() <= 1e-12;
    Ok(HorizontalLift { closed_gap: closed.then_some(z - z0), points })
}
