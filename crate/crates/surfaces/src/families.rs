//! Closed-form surface families: rotational `S`, screw-motion `C`, parabolic
//! helicoids `P`, spherical helicoids and a few vertical cylinders.

use std::f64::consts::PI;

use ekt_geometry::quadrature::integrate;
use ekt_geometry::{lambda_kappa, Chart, Complex64, SpaceParams, Vector3};

use crate::error::{Result, SurfaceError};
use crate::surface::{Jet, ParamRect, ParametricSurface};

/// Distance kept from the singular ends of the radial parameter of the `S`
/// and `C` families.
pub const DOMAIN_CLIP: f64 = 1e-4;

/// Absolute tolerance of the profile quadratures.
pub const PROFILE_TOL: f64 = 1e-10;

/// Radial extent used when neither `1/|H|` nor the disk radius bounds the
/// rotational family (`H = 0`, `kappa >= 0`).
pub const DEFAULT_RADIUS: f64 = 4.0;

const MAX_PANELS: usize = 4000;

/// Sign of the integral term of the `C` family; chosen so that the family has
/// mean curvature `+H` with respect to `N ∝ X_u × X_v`.
const C_BRANCH: f64 = 1.0;

/// Slope `dz/ds` of the rotational profile and its derivative.
fn s_slope(p: &SpaceParams, s: f64) -> (f64, f64) {
    let SpaceParams { kappa, tau, h } = *p;
    let a = (1.0 + tau * tau * s * s).sqrt();
    let b = 4.0 + kappa * s * s;
    let c = (1.0 - h * h * s * s).sqrt();
    // f = s q, q = −4H a / (b c)
    let q = -4.0 * h * a / (b * c);
    let log_q = tau * tau * s / (a * a) - 2.0 * kappa * s / b + h * h * s / (c * c);
    (s * q, q + s * q * log_q)
}

/// Height `z(v)` of the rotational profile, by adaptive quadrature with the
/// given absolute tolerance.
pub fn s_profile(p: &SpaceParams, v: f64, tol: f64) -> f64 {
    integrate(|s| s_slope(p, s).0, 0.0, v, tol, MAX_PANELS).value
}

/// Radial range `[DOMAIN_CLIP, r_max − DOMAIN_CLIP]` of the rotational family.
pub fn s_radial_range(p: &SpaceParams) -> Result<(f64, f64)> {
    let mut r_max = f64::INFINITY;
    if p.h != 0.0 {
        r_max = r_max.min(1.0 / p.h.abs());
    }
    if p.kappa < 0.0 {
        r_max = r_max.min(2.0 / (-p.kappa).sqrt());
    }
    if !r_max.is_finite() {
        r_max = DEFAULT_RADIUS;
    }
    let (lo, hi) = (DOMAIN_CLIP, r_max - DOMAIN_CLIP);
    if hi <= lo {
        return Err(SurfaceError::Param(format!("empty radial range for {p:?}")));
    }
    Ok((lo, hi))
}

/// Rotationally invariant `H`-surface `S_{H,κ,τ}` in the Cartan model:
/// `X(u, v) = (v cos u, v sin u, z(v))` with
/// `z'(s) = −4Hs √(1+τ²s²) / ((4+κs²) √(1−H²s²))`.
///
/// The radial parameter is clipped by [`DOMAIN_CLIP`] away from `0`, `1/|H|`
/// and (for `κ < 0`) the boundary radius `2/√−κ`, where the integrand or the
/// chart degenerates.  Mean curvature `+H` with respect to `N ∝ X_u × X_v`.
pub fn surface_s(params: SpaceParams) -> Result<ParametricSurface> {
    let (v0, v1) = s_radial_range(&params)?;
    let chart = Chart::cartan(params.kappa, params.tau);
    let rect = ParamRect::new(0.0, 2.0 * PI, v0, v1);
    Ok(ParametricSurface::with_jet("S", chart, rect, params.h, move |u, v| {
        if !(v > 0.0 && v <= v1 + DOMAIN_CLIP * 0.5) {
            return Err(SurfaceError::Param(format!("radial parameter {v} outside (0, {v1}]")));
        }
        let (f, df) = s_slope(&params, v);
        let z = s_profile(&params, v, PROFILE_TOL);
        let (su, cu) = u.sin_cos();
        Ok(Jet {
            x: Vector3::new(v * cu, v * su, z),
            xu: Vector3::new(-v * su, v * cu, 0.0),
            xv: Vector3::new(cu, su, f),
            xuu: Vector3::new(-v * cu, -v * su, 0.0),
            xuv: Vector3::new(-su, cu, 0.0),
            xvv: Vector3::new(0.0, 0.0, df),
        })
    }))
}

/// Integrand of the `C` family and its derivative.
fn c_slope(p: &SpaceParams, s: f64) -> (f64, f64) {
    let SpaceParams { kappa, tau, h } = *p;
    let k2 = kappa * kappa;
    let a = 16.0 * tau * tau + k2 * s * s;
    let b = 4.0 + kappa * s * s;
    let a0 = c_lower(p);
    let c = k2 * (s - a0) * (s + a0);
    let g = 16.0 * h * a.sqrt() / (kappa * s * b * c.sqrt());
    let log_g = k2 * s / a - 1.0 / s - 2.0 * kappa * s / b - k2 * s / c;
    (g, g * log_g)
}

/// Lower end `4|H|/|κ|` of the radial parameter of the `C` family.
fn c_lower(p: &SpaceParams) -> f64 {
    4.0 * p.h.abs() / p.kappa.abs()
}

/// Integral term `∫_{4|H|/|κ|}^v g(s) ds` of the `C` family.  The
/// substitution `s = a + t²` turns the inverse-square-root singularity at the
/// lower limit into the smooth integrand
/// `2t g(a + t²) = 32H √(16τ² + κ²s²) / (κ |κ| s (4 + κs²) √(2a + t²))`.
pub fn c_profile(p: &SpaceParams, v: f64, tol: f64) -> f64 {
    if p.h == 0.0 {
        return 0.0;
    }
    let SpaceParams { kappa, tau, h } = *p;
    let a = c_lower(p);
    let t1 = (v - a).max(0.0).sqrt();
    let integrand = |t: f64| {
        let s = a + t * t;
        32.0 * h * (16.0 * tau * tau + kappa * kappa * s * s).sqrt()
            / (kappa * kappa.abs() * s * (4.0 + kappa * s * s) * (2.0 * a + t * t).sqrt())
    };
    integrate(integrand, 0.0, t1, tol, MAX_PANELS).value
}

/// Screw-motion invariant `H`-surface `C_{H,κ,τ}` (requires `4H² + κ < 0`):
/// `X(u, v) = (v cos u, v sin u, (4τ/κ) u ± ∫_{4H/|κ|}^v g)`.
///
/// The radial parameter ranges over `[4|H|/|κ| + ε, 2/√−κ − ε]`,
/// `ε =` [`DOMAIN_CLIP`].  The sign of the integral term is the one giving
/// mean curvature `+H` for `N ∝ X_u × X_v`.
pub fn surface_c(params: SpaceParams) -> Result<ParametricSurface> {
    if params.supercriticality() >= 0.0 {
        return Err(SurfaceError::Param(format!("C family needs 4H² + κ < 0, got {}", params.supercriticality())));
    }
    let kappa = params.kappa;
    let v0 = c_lower(&params) + DOMAIN_CLIP;
    let v1 = 2.0 / (-kappa).sqrt() - DOMAIN_CLIP;
    if v1 <= v0 {
        return Err(SurfaceError::Param("empty radial range for the C family".into()));
    }
    let chart = Chart::cartan(kappa, params.tau);
    let rect = ParamRect::new(-PI, PI, v0, v1);
    let pitch = 4.0 * params.tau / kappa;
    Ok(ParametricSurface::with_jet("C", chart, rect, params.h, move |u, v| {
        if !(v > c_lower(&params)) {
            return Err(SurfaceError::Param(format!("radial parameter {v} below the C-family range")));
        }
        let (g, dg) = if params.h == 0.0 { (0.0, 0.0) } else { c_slope(&params, v) };
        let z = pitch * u + C_BRANCH * c_profile(&params, v, PROFILE_TOL);
        let (su, cu) = u.sin_cos();
        Ok(Jet {
            x: Vector3::new(v * cu, v * su, z),
            xu: Vector3::new(-v * su, v * cu, pitch),
            xv: Vector3::new(cu, su, C_BRANCH * g),
            xuu: Vector3::new(-v * cu, -v * su, 0.0),
            xuv: Vector3::new(-su, cu, 0.0),
            xvv: Vector3::new(0.0, 0.0, C_BRANCH * dg),
        })
    }))
}

/// Coefficient `a = 2H √(−κ+4τ²) / (−κ √(−4H²−κ))` of the parabolic helicoid.
pub fn parabolic_coefficient(params: &SpaceParams) -> Result<f64> {
    let SpaceParams { kappa, tau, h } = *params;
    if kappa >= 0.0 || params.supercriticality() >= 0.0 {
        return Err(SurfaceError::Param(format!(
            "parabolic helicoids need κ < 0 and 4H² + κ < 0, got κ = {kappa}, 4H² + κ = {}",
            params.supercriticality()
        )));
    }
    Ok(2.0 * h * (-kappa + 4.0 * tau * tau).sqrt() / (-kappa * (-4.0 * h * h - kappa).sqrt()))
}

/// Parabolic helicoid `P_{H,κ,τ}` in the half-space model:
/// `X(u, v) = (u, v, a log v)`.
///
/// With respect to `N ∝ X_u × X_v` (the upward normal) this surface has mean
/// curvature `−H`; the returned surface carries the opposite (downward)
/// orientation so that its mean curvature is `+H`.
pub fn surface_p(params: SpaceParams) -> Result<ParametricSurface> {
    let a = parabolic_coefficient(&params)?;
    let chart = Chart::half_space(params.kappa, params.tau)?;
    let rect = ParamRect::new(-1.0, 1.0, 0.5, 2.0);
    Ok(ParametricSurface::with_jet("P", chart, rect, -params.h, move |u, v| {
        if !(v > 0.0) {
            return Err(SurfaceError::Param(format!("P family needs v > 0, got {v}")));
        }
        Ok(Jet {
            x: Vector3::new(u, v, a * v.ln()),
            xu: Vector3::x(),
            xv: Vector3::new(0.0, 1.0, a / v),
            xuu: Vector3::zeros(),
            xuv: Vector3::zeros(),
            xvv: Vector3::new(0.0, 0.0, -a / (v * v)),
        })
    })
    .with_flipped_normal())
}

/// Spherical helicoid of pitch `c` in the unit 3-sphere:
/// `φ_c(u, v) = (cos u · e^{icv}, sin u · e^{iv})`.
pub fn spherical_helicoid_s3(c: f64, u: f64, v: f64) -> [Complex64; 2] {
    [Complex64::from_polar(u.cos(), c * v), Complex64::from_polar(u.sin(), v)]
}

/// Spherical helicoid of pitch `c` in the Berger sphere `(κ, τ)`, expressed in
/// the Cartan coordinates of the Berger chart (`u ∈ (0, π)` avoids the removed
/// fiber).  Pulling `φ_c` back through the covering map gives
/// `y + ix = (2/√κ) cot(u) e^{i(c−1)v}`, `z = 4τ v / κ`.
pub fn spherical_helicoid(c: f64, params: SpaceParams) -> Result<ParametricSurface> {
    let chart = Chart::berger(params.kappa, params.tau)?;
    let k = 2.0 / params.kappa.sqrt();
    let zs = 4.0 * params.tau / params.kappa;
    let rect = ParamRect::new(0.3, PI - 0.3, -PI, PI);
    Ok(ParametricSurface::with_jet(format!("helicoid(c={c})"), chart, rect, 0.0, move |u, v| {
        let s = u.sin();
        if s.abs() < 1e-12 {
            return Err(SurfaceError::Param(format!("helicoid parameter u = {u} on the removed fiber")));
        }
        let e = Complex64::from_polar(1.0, (c - 1.0) * v);
        let i = Complex64::i();
        let cot = u.cos() / s;
        let csc2 = 1.0 / (s * s);
        let zeta = e * (k * cot);
        let zeta_u = e * (-k * csc2);
        let zeta_uu = e * (2.0 * k * csc2 * cot);
        let w = i * (c - 1.0);
        let to_xy = |q: Complex64, dz: f64| Vector3::new(q.im, q.re, dz);
        Ok(Jet {
            x: to_xy(zeta, zs * v),
            xu: to_xy(zeta_u, 0.0),
            xv: to_xy(zeta * w, zs),
            xuu: to_xy(zeta_uu, 0.0),
            xuv: to_xy(zeta_u * w, 0.0),
            xvv: to_xy(zeta * w * w, 0.0),
        })
    }))
}

/// Vertical plane over the `x`-axis of the Cartan model, `X(u, v) = (u, 0, v)`:
/// a minimal vertical cylinder over a geodesic.
pub fn vertical_plane(params: SpaceParams) -> Result<ParametricSurface> {
    let chart = Chart::cartan(params.kappa, params.tau);
    let r = if params.kappa < 0.0 { 1.5 / (-params.kappa).sqrt() } else { 1.5 };
    Ok(ParametricSurface::with_jet("vertical-plane", chart, ParamRect::new(-r, r, -1.0, 1.0), 0.0, |u, v| {
        Ok(Jet {
            x: Vector3::new(u, 0.0, v),
            xu: Vector3::x(),
            xv: Vector3::z(),
            xuu: Vector3::zeros(),
            xuv: Vector3::zeros(),
            xvv: Vector3::zeros(),
        })
    }))
}

/// Horizontal slice `z = 0` of a product space (`τ = 0`).
pub fn horizontal_slice(params: SpaceParams) -> Result<ParametricSurface> {
    if params.tau != 0.0 {
        return Err(SurfaceError::Param("horizontal slices need τ = 0".into()));
    }
    let chart = Chart::cartan(params.kappa, 0.0);
    let r = if params.kappa < 0.0 { 1.5 / (-params.kappa).sqrt() } else { 1.5 };
    Ok(ParametricSurface::with_jet("slice", chart, ParamRect::new(-r, r, -r, r).shrink(0.0), 0.0, |u, v| {
        Ok(Jet {
            x: Vector3::new(u, v, 0.0),
            xu: Vector3::x(),
            xv: Vector3::y(),
            xuu: Vector3::zeros(),
            xuv: Vector3::zeros(),
            xvv: Vector3::zeros(),
        })
    }))
}

/// Vertical cylinder `X(u, v) = (r cos u, −r sin u, v)` over the circle of
/// coordinate radius `r` centred at the origin; its mean curvature is half the
/// geodesic curvature `1/(λ r) − κ r / 2` of the circle; the clockwise
/// parametrization makes `X_u × X_v` point inward.
pub fn vertical_circle_cylinder(params: SpaceParams, r: f64) -> Result<ParametricSurface> {
    let lam = lambda_kappa(params.kappa, r, 0.0)?;
    let h = 0.5 * (1.0 / (lam * r) - params.kappa * r / 2.0);
    let chart = Chart::cartan(params.kappa, params.tau);
    Ok(ParametricSurface::with_jet("circle-cylinder", chart, ParamRect::new(-PI, PI, -1.0, 1.0), h, move |u, v| {
        let (su, cu) = u.sin_cos();
        Ok(Jet {
            x: Vector3::new(r * cu, -r * su, v),
            xu: Vector3::new(-r * su, -r * cu, 0.0),
            xv: Vector3::z(),
            xuu: Vector3::new(-r * cu, r * su, 0.0),
            xuv: Vector3::zeros(),
            xvv: Vector3::zeros(),
        })
    }))
}

/// Vertical cylinder over the horocycle `y = 1` of the half-space model,
/// `X(u, v) = (v, 1, u)`, with mean curvature `√−κ / 2` for the normal
/// `X_u × X_v` pointing towards increasing `y`.
pub fn horocycle_cylinder(params: SpaceParams) -> Result<ParametricSurface> {
    let chart = Chart::half_space(params.kappa, params.tau)?;
    let h = 0.5 * (-params.kappa).sqrt();
    Ok(ParametricSurface::with_jet("horocycle-cylinder", chart, ParamRect::new(-1.0, 1.0, -1.0, 1.0), h, |u, v| {
        Ok(Jet {
            x: Vector3::new(v, 1.0, u),
            xu: Vector3::z(),
            xv: Vector3::x(),
            xuu: Vector3::zeros(),
            xuv: Vector3::zeros(),
            xvv: Vector3::zeros(),
        })
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::numeric_mean_curvature;

    #[test]
    fn minimal_s_is_flat_slice() {
        let s = surface_s(SpaceParams::with_h(-1.0, 0.4, 0.0)).unwrap();
        for v in [0.1, 0.7, 1.5] {
            assert_eq!(s.point(0.3, v).unwrap().z, 0.0);
        }
    }

    #[test]
    fn s_is_rotationally_symmetric() {
        let s = surface_s(SpaceParams::with_h(-1.0, 0.3, 0.2)).unwrap();
        let (a, v, shift) = (0.4, 0.9, 1.1);
        let p = s.point(a, v).unwrap();
        let q = s.point(a + shift, v).unwrap();
        let (sn, cs) = shift.sin_cos();
        let rotated = Vector3::new(cs * p.x - sn * p.y, sn * p.x + cs * p.y, p.z);
        assert!((rotated - q).norm() < 1e-14);
    }

    #[test]
    fn minimal_c_is_helicoid() {
        let p = SpaceParams::with_h(-1.0, 0.5, 0.0);
        let s = surface_c(p).unwrap();
        let x = s.point(0.7, 1.2).unwrap();
        assert!((x.z - 4.0 * 0.5 / -1.0 * 0.7).abs() < 1e-15);
    }

    #[test]
    fn product_c_is_rotational() {
        let s = surface_c(SpaceParams::with_h(-1.0, 0.0, 0.2)).unwrap();
        let a = s.point(0.1, 1.0).unwrap().z;
        let b = s.point(2.0, 1.0).unwrap().z;
        assert!((a - b).abs() < 1e-14);
    }

    #[test]
    fn parabolic_coefficient_example() {
        let a = parabolic_coefficient(&SpaceParams::with_h(-1.0, 0.0, 0.25)).unwrap();
        assert!((a - 1.0 / 3f64.sqrt()).abs() < 1e-15);
        assert_eq!(parabolic_coefficient(&SpaceParams::with_h(-1.0, 0.0, 0.0)).unwrap(), 0.0);
        assert_eq!(parabolic_coefficient(&SpaceParams::with_h(-1.0, 0.0, 0.5)).unwrap_err().kind(), "ParamError");
    }

    #[test]
    fn parameter_errors() {
        assert!(surface_c(SpaceParams::with_h(1.0, 0.0, 0.1)).is_err());
        assert!(surface_p(SpaceParams::with_h(-1.0, 0.0, 0.6)).is_err());
    }

    #[test]
    fn helicoid_pitch_zero_fiber_circle() {
        for v in [0.0, 1.0, 2.5] {
            let [z, w] = spherical_helicoid_s3(0.0, PI / 2.0, v);
            assert!(z.norm() < 1e-15);
            assert!((w - Complex64::from_polar(1.0, v)).norm() < 1e-15);
        }
    }

    #[test]
    fn helicoid_chart_coordinates_match_sphere_embedding() {
        let (k, t, c) = (2.0, 0.6, 0.4);
        let s = spherical_helicoid(c, SpaceParams::new(k, t)).unwrap();
        for (u, v) in [(0.5, 0.3), (1.9, -1.2)] {
            let p = s.point(u, v).unwrap();
            let q = ekt_geometry::berger_embed(k, t, &p).unwrap();
            let expect = spherical_helicoid_s3(c, u, v);
            assert!((q[0] - expect[0]).norm() < 1e-12 && (q[1] - expect[1]).norm() < 1e-12);
        }
    }

    #[test]
    fn families_have_expected_sign() {
        let cases = [
            surface_s(SpaceParams::with_h(-1.0, 0.3, 0.2)).unwrap(),
            surface_s(SpaceParams::with_h(1.0, 0.5, 0.4)).unwrap(),
            surface_c(SpaceParams::with_h(-2.0, 0.4, 0.3)).unwrap(),
            surface_p(SpaceParams::with_h(-1.0, 0.2, 0.25)).unwrap(),
            vertical_circle_cylinder(SpaceParams::new(-1.0, 0.3), 0.7).unwrap(),
            horocycle_cylinder(SpaceParams::new(-1.0, 0.0)).unwrap(),
        ];
        for s in cases {
            let (u, v) = s.rect().shrink(0.3).lerp(0.4, 0.6);
            let h = numeric_mean_curvature(&s, u, v).unwrap();
            assert!((h - s.expected_mean_curvature()).abs() < 1e-6, "{}: {h} vs {}", s.name(), s.expected_mean_curvature());
        }
    }
}
