//! Pointwise fundamental data `(A, T, J, ν)` and the sister transformation.

use ekt_geometry::{cross_components, Matrix2, SpaceParams, Vector2, Vector3};
use ekt_surfaces::{local_geometry, LocalGeometry, ParametricSurface};

use crate::error::{FundamentalError, Result};

/// Fundamental data at one point, expressed in the orthonormal tangent basis
/// `(e₁, e₂)` obtained by Gram–Schmidt from `(X_u, X_v)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FundamentalSample {
    /// Shape operator `A = −∇̄N` (symmetric).
    pub a: Matrix2<f64>,
    /// Tangent part `T` of the unit Killing field `ξ`.
    pub t: Vector2<f64>,
    /// Angle function `ν = ⟨ξ, N⟩`.
    pub nu: f64,
    /// `+1` if `J` rotates `e₁` to `e₂`, `−1` otherwise, where `J` is defined
    /// by `dφ(Ju) = N × dφ(u)`.
    pub orientation: f64,
}

impl FundamentalSample {
    /// The rotation `J` in the `(e₁, e₂)` basis.
    pub fn j(&self) -> Matrix2<f64> {
        Matrix2::new(0.0, -1.0, 1.0, 0.0) * self.orientation
    }

    /// Mean curvature `½ tr A`.
    pub fn mean_curvature(&self) -> f64 {
        0.5 * self.a.trace()
    }

    /// Checks `‖T‖² + ν² = 1` and the symmetry of `A` within `tol`.
    pub fn check(&self, tol: f64) -> Result<()> {
        let unit = self.t.norm_squared() + self.nu * self.nu - 1.0;
        let asym = (self.a[(0, 1)] - self.a[(1, 0)]).abs();
        if unit.abs() > tol || asym > tol {
            return Err(FundamentalError::Spec(format!("|T|² + ν² − 1 = {unit:e}, asymmetry of A = {asym:e}")));
        }
        Ok(())
    }

    /// Data of the same immersion with the opposite unit normal:
    /// `(A, T, J, ν) ↦ (−A, T, −J, −ν)`.
    pub fn flip_normal(&self) -> Self {
        Self { a: -self.a, t: self.t, nu: -self.nu, orientation: -self.orientation }
    }
}

/// Orthonormal tangent frame and fundamental data at a surface point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurfaceFrame {
    /// Extrinsic geometry from the surface layer.
    pub local: LocalGeometry,
    /// `e₁ = X_u / |X_u|` (coordinate components).
    pub e1: Vector3<f64>,
    /// Unit vector orthogonal to `e₁` in the span of `X_u, X_v`.
    pub e2: Vector3<f64>,
    /// `C` with `e_i = Σ_k C_{ki} X_k`.
    pub basis: Matrix2<f64>,
    /// Unit Killing field `ξ` at the point.
    pub xi: Vector3<f64>,
    /// Fundamental data in the `(e₁, e₂)` basis.
    pub sample: FundamentalSample,
}

impl SurfaceFrame {
    /// Ambient components of the tangent vector with `(e₁, e₂)` coordinates `w`.
    pub fn to_ambient(&self, w: &Vector2<f64>) -> Vector3<f64> {
        self.e1 * w.x + self.e2 * w.y
    }

    /// `(e₁, e₂)` coordinates of the tangential part of an ambient vector.
    pub fn to_tangent(&self, v: &Vector3<f64>) -> Vector2<f64> {
        Vector2::new(self.local.dot(v, &self.e1), self.local.dot(v, &self.e2))
    }
}

/// Computes the orthonormal frame and the fundamental data of `s` at `(u, v)`.
pub fn surface_frame(s: &ParametricSurface, u: f64, v: f64) -> Result<SurfaceFrame> {
    let local = local_geometry(s, u, v)?;
    let ip = |a: &Vector3<f64>, b: &Vector3<f64>| local.dot(a, b);
    let (xu, xv) = (local.jet.xu, local.jet.xv);
    let (e, f, g) = (local.first[(0, 0)], local.first[(0, 1)], local.first[(1, 1)]);
    let su = e.sqrt();
    let e1 = xu / su;
    let w = xv - e1 * (f / su);
    let wn = ((e * g - f * f) / e).sqrt();
    let e2 = w / wn;
    // e1 = X_u / √E, e2 = (X_v − (F/E) X_u) / wn
    let basis = Matrix2::new(1.0 / su, -f / (e * wn), 0.0, 1.0 / wn);
    let a = basis.transpose() * local.second * basis;
    let a = 0.5 * (a + a.transpose());
    let xi = s.chart().xi(&local.jet.x)?;
    let n_cross_e1 = cross_components(&local.g, &local.normal, &e1);
    let orientation = if ip(&n_cross_e1, &e2) >= 0.0 { 1.0 } else { -1.0 };
    let sample = FundamentalSample { a, t: Vector2::new(ip(&xi, &e1), ip(&xi, &e2)), nu: ip(&xi, &local.normal), orientation };
    Ok(SurfaceFrame { local, e1, e2, basis, xi, sample })
}

/// Fundamental data `(A, T, J, ν)` of `s` at `(u, v)`.
pub fn fundamental_data(s: &ParametricSurface, u: f64, v: f64) -> Result<FundamentalSample> {
    Ok(surface_frame(s, u, v)?.sample)
}

/// Data of a sister correspondence `E(κ̃, τ̃) → E(κ, τ)` with phase `θ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConjugateSpec {
    /// Parameters `(κ̃, τ̃, H̃)` of the initial surface.
    pub source: SpaceParams,
    /// Parameters `(κ, τ, H)` of the sister surface.
    pub target: SpaceParams,
    /// Phase angle `θ`.
    pub theta: f64,
}

/// Tolerance of the invariants of [`ConjugateSpec`].
pub const SPEC_TOL: f64 = 1e-12;

impl ConjugateSpec {
    /// Checks `κ − 4τ² = κ̃ − 4τ̃²` and `τ + iH = e^{iθ}(τ̃ + iH̃)`.
    pub fn new(source: SpaceParams, target: SpaceParams, theta: f64) -> Result<Self> {
        let spec = Self { source, target, theta };
        let d1 = (source.kappa_minus_4tau2() - target.kappa_minus_4tau2()).abs();
        let (s, c) = theta.sin_cos();
        let tau = c * source.tau - s * source.h;
        let h = s * source.tau + c * source.h;
        let d2 = (tau - target.tau).abs().max((h - target.h).abs());
        let scale = 1.0 + source.kappa.abs().max(target.kappa.abs());
        if d1 > SPEC_TOL * scale || d2 > SPEC_TOL * (1.0 + source.tau.abs() + source.h.abs()) {
            return Err(FundamentalError::Spec(format!(
                "sister parameters inconsistent: |Δ(κ − 4τ²)| = {d1:e}, |Δ(τ + iH)| = {d2:e}"
            )));
        }
        Ok(spec)
    }

    /// The sister parameters determined by `source` and `θ`.
    pub fn from_source(source: SpaceParams, theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        let tau = c * source.tau - s * source.h;
        let h = s * source.tau + c * source.h;
        let kappa = source.kappa_minus_4tau2() + 4.0 * tau * tau;
        Self { source, target: SpaceParams::with_h(kappa, tau, h), theta }
    }

    /// The inverse correspondence (phase `−θ`).
    pub fn inverse(&self) -> Self {
        Self { source: self.target, target: self.source, theta: -self.theta }
    }
}

/// Transforms fundamental data through the sister correspondence:
/// `A = Rot_θ(Ã − H̃) + H`, `T = Rot_θ T̃`, `J = J̃`, `ν = ν̃`, with
/// `Rot_θ = cos θ + sin θ J`.
pub fn daniel_transform(d: &FundamentalSample, spec: &ConjugateSpec) -> Result<FundamentalSample> {
    let spec = ConjugateSpec::new(spec.source, spec.target, spec.theta)?;
    let (s, c) = spec.theta.sin_cos();
    let rot = Matrix2::identity() * c + d.j() * s;
    let id = Matrix2::identity();
    Ok(FundamentalSample {
        a: rot * (d.a - id * spec.source.h) + id * spec.target.h,
        t: rot * d.t,
        nu: d.nu,
        orientation: d.orientation,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use ekt_surfaces::{horizontal_slice, vertical_plane};

    #[test]
    fn horizontal_slice_data() {
        let s = horizontal_slice(SpaceParams::new(-1.0, 0.0)).unwrap();
        let d = fundamental_data(&s, 0.2, -0.3).unwrap();
        assert!((d.nu.abs() - 1.0).abs() < 1e-12);
        assert!(d.t.norm() < 1e-12 && d.a.norm() < 1e-12);
    }

    #[test]
    fn vertical_plane_data() {
        let s = vertical_plane(SpaceParams::new(-1.0, 0.0)).unwrap();
        let d = fundamental_data(&s, 0.4, 0.5).unwrap();
        assert!(d.nu.abs() < 1e-12);
        assert!((d.t.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn identity_transform() {
        let p = SpaceParams::with_h(-1.0, 0.3, 0.2);
        let d = FundamentalSample { a: Matrix2::new(0.5, 0.1, 0.1, -0.1), t: Vector2::new(0.6, 0.0), nu: 0.8, orientation: 1.0 };
        let out = daniel_transform(&d, &ConjugateSpec::from_source(p, 0.0)).unwrap();
        assert!((out.a - d.a).norm() < 1e-15 && out.t == d.t && out.nu == d.nu);
    }

    #[test]
    fn quarter_turn_of_minimal_surface() {
        let p = SpaceParams::with_h(-1.0, 0.5, 0.0);
        let spec = ConjugateSpec::from_source(p, std::f64::consts::FRAC_PI_2);
        assert!((spec.target.tau).abs() < 1e-15 && (spec.target.h - 0.5).abs() < 1e-15);
        assert!((spec.target.kappa - -2.0).abs() < 1e-15);
        let d =
            FundamentalSample { a: Matrix2::new(0.3, 0.2, 0.2, -0.3), t: Vector2::new(0.0, 0.6), nu: -0.8, orientation: -1.0 };
        let out = daniel_transform(&d, &spec).unwrap();
        let expect = d.j() * d.a + Matrix2::identity() * 0.5;
        assert!((out.a - expect).norm() < 1e-15);
        assert!((out.t - d.j() * d.t).norm() < 1e-15);
    }

    #[test]
    fn inconsistent_spec_is_rejected() {
        let src = SpaceParams::with_h(-1.0, 0.5, 0.0);
        let err = ConjugateSpec::new(src, SpaceParams::with_h(-1.0, 0.5, 0.1), 0.0).unwrap_err();
        assert_eq!(err.kind(), "SpecError");
    }

    #[test]
    fn flip_is_involutive() {
        let d = FundamentalSample { a: Matrix2::new(0.3, 0.2, 0.2, -0.3), t: Vector2::new(0.0, 0.6), nu: -0.8, orientation: 1.0 };
        assert_eq!(d.flip_normal().flip_normal(), d);
        assert_eq!(d.flip_normal().j(), -d.j());
    }
}
