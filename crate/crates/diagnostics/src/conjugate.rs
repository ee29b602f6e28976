//! Quantities of the conjugate boundary read off a trace: algebraic lengths,
//! geodesic curvatures in the symmetry planes, the reconstructed symmetry
//! curve in `ℍ²(κ)` and the two period functions.

use crate::error::{DiagnosticsError, Result};
use crate::trace::{BoundaryTrace, TraceKind};

/// Trapezoid rule on the given (possibly non-uniform) samples.
pub fn trapezoid(s: &[f64], f: &[f64]) -> f64 {
    s.windows(2).zip(f.windows(2)).map(|(ds, fv)| 0.5 * (ds[1] - ds[0]) * (fv[0] + fv[1])).sum()
}

/// Algebraic length `ℓ = −∫ν` and horizontal length `μ = ∫√(1 − ν²)` of the
/// conjugate of a horizontal boundary geodesic.
pub fn conjugate_lengths(t: &BoundaryTrace) -> Result<(f64, f64)> {
    if t.kind() != TraceKind::Horizontal {
        return Err(DiagnosticsError::Kind("conjugate lengths need a horizontal trace".into()));
    }
    let neg: Vec<f64> = t.nu().iter().map(|v| -v).collect();
    let root: Vec<f64> = t.nu().iter().map(|v| (1.0 - v * v).max(0.0).sqrt()).collect();
    Ok((trapezoid(t.s(), &neg), trapezoid(t.s(), &root)))
}

/// Samples `(s, κ_g)` of a geodesic curvature.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledCurvature {
    /// Arclengths, strictly increasing.
    pub s: Vec<f64>,
    /// Geodesic curvature at each arclength.
    pub kg: Vec<f64>,
}

impl SampledCurvature {
    /// Constant curvature `kg` on `[0, length]` with `n ≥ 2` samples.
    pub fn constant(kg: f64, length: f64, n: usize) -> Self {
        let n = n.max(2);
        let s = (0..n).map(|i| length * i as f64 / (n - 1) as f64).collect();
        Self { s, kg: vec![kg; n] }
    }

    /// Linear interpolation (constant extrapolation) at `s`.
    pub fn at(&self, s: f64) -> f64 {
        let n = self.s.len();
        if s <= self.s[0] {
            return self.kg[0];
        }
        if s >= self.s[n - 1] {
            return self.kg[n - 1];
        }
        let i = self.s.partition_point(|&x| x <= s) - 1;
        let t = (s - self.s[i]) / (self.s[i + 1] - self.s[i]);
        self.kg[i] + t * (self.kg[i + 1] - self.kg[i])
    }

    fn check(&self) -> Result<()> {
        if self.s.len() < 2 || self.s.len() != self.kg.len() {
            return Err(DiagnosticsError::InvalidArgument("curvature needs ≥ 2 matching (s, κ_g) samples".into()));
        }
        if self.s.windows(2).any(|w| !(w[1] > w[0])) || self.kg.iter().any(|k| !k.is_finite()) {
            return Err(DiagnosticsError::InvalidArgument("curvature samples must be finite with increasing s".into()));
        }
        Ok(())
    }
}

/// First derivative by second-order finite differences on non-uniform
/// samples (three-point one-sided stencils at the ends).
pub fn derivative(s: &[f64], f: &[f64]) -> Vec<f64> {
    let n = s.len();
    if n == 2 {
        let d = (f[1] - f[0]) / (s[1] - s[0]);
        return vec![d, d];
    }
    // Derivative at s[j] of the parabola through samples i, i+1, i+2.
    let three = |i: usize, j: usize| {
        let (x0, x1, x2) = (s[i], s[i + 1], s[i + 2]);
        let x = s[j];
        f[i] * (2.0 * x - x1 - x2) / ((x0 - x1) * (x0 - x2))
            + f[i + 1] * (2.0 * x - x0 - x2) / ((x1 - x0) * (x1 - x2))
            + f[i + 2] * (2.0 * x - x0 - x1) / ((x2 - x0) * (x2 - x1))
    };
    (0..n)
        .map(|j| match j {
            0 => three(0, 0),
            j if j == n - 1 => three(n - 3, n - 1),
            j => three(j - 1, j),
        })
        .collect()
}

/// Geodesic curvature of the conjugate curve in its symmetry plane:
/// `θ′` for a horizontal trace (θ measured in the vertical-plane frame) and
/// `2H − θ′` for a vertical trace.
pub fn conjugate_curvature(t: &BoundaryTrace, h: f64) -> Result<SampledCurvature> {
    let theta = t.theta().ok_or_else(|| DiagnosticsError::Kind("trace carries no rotation angle θ".into()))?;
    let d = derivative(t.s(), theta);
    let kg = match t.kind() {
        TraceKind::Horizontal => d,
        TraceKind::Vertical => d.iter().map(|v| 2.0 * h - v).collect(),
    };
    Ok(SampledCurvature { s: t.s().to_vec(), kg })
}

/// Position and direction angle of a curve in the upper half-plane model
/// of `ℍ²(κ)` (or the Euclidean plane when `κ = 0`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurveState {
    /// Abscissa.
    pub x: f64,
    /// Height, positive in the half-plane.
    pub y: f64,
    /// Angle of the velocity with the horizontal direction.
    pub psi: f64,
}

impl CurveState {
    /// The gauge `(0, 1, π)`: unit height on the vertical axis, moving left.
    pub const DEFAULT: CurveState = CurveState { x: 0.0, y: 1.0, psi: std::f64::consts::PI };
}

/// A reconstructed curve sampled at the arclengths of its curvature data.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetryCurve {
    /// Arclengths.
    pub s: Vec<f64>,
    /// States at each arclength.
    pub states: Vec<CurveState>,
}

impl SymmetryCurve {
    /// State at the last sample.
    pub fn end(&self) -> CurveState {
        self.states[self.states.len() - 1]
    }
}

/// Largest RK4 step used by [`reconstruct_symmetry_curve`].
pub const MAX_RK4_STEP: f64 = 1e-3;

/// Integrates a unit-speed curve of `ℍ²(κ)` with prescribed geodesic
/// curvature, `ψ′ = −κ_g − √−κ cos ψ`, `x′ = y √−κ cos ψ`,
/// `y′ = y √−κ sin ψ` (for `κ = 0`: `ψ′ = −κ_g`, `x′ = cos ψ`,
/// `y′ = sin ψ`), by RK4 with `κ_g` interpolated linearly between samples.
pub fn reconstruct_symmetry_curve(kg: &SampledCurvature, kappa: f64, init: Option<CurveState>) -> Result<SymmetryCurve> {
    kg.check()?;
    if !(kappa <= 0.0) {
        return Err(DiagnosticsError::InvalidArgument(format!("symmetry curves live in ℍ²(κ), κ ≤ 0; got κ = {kappa}")));
    }
    let init = init.unwrap_or(CurveState::DEFAULT);
    let r = (-kappa).sqrt();
    let rhs = |s: f64, st: [f64; 3]| -> Result<[f64; 3]> {
        let [_, y, psi] = st;
        if kappa < 0.0 && !(y > 0.0) {
            return Err(DiagnosticsError::Domain(format!("curve reached y = {y} at s = {s}")));
        }
        let (c, sn) = (psi.cos(), psi.sin());
        let k = kg.at(s);
        Ok(if kappa == 0.0 { [c, sn, -k] } else { [y * r * c, y * r * sn, -k - r * c] })
    };
    let mut st = [init.x, init.y, init.psi];
    rhs(kg.s[0], st)?;
    let mut states = vec![init];
    for w in kg.s.windows(2) {
        let m = ((w[1] - w[0]) / MAX_RK4_STEP).ceil().max(1.0) as usize;
        let h = (w[1] - w[0]) / m as f64;
        for k in 0..m {
            let s = w[0] + k as f64 * h;
            let add = |a: [f64; 3], b: [f64; 3], f: f64| [a[0] + b[0] * f, a[1] + b[1] * f, a[2] + b[2] * f];
            let k1 = rhs(s, st)?;
            let k2 = rhs(s + h / 2.0, add(st, k1, h / 2.0))?;
            let k3 = rhs(s + h / 2.0, add(st, k2, h / 2.0))?;
            let k4 = rhs(s + h, add(st, k3, h))?;
            for i in 0..3 {
                st[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
            }
            rhs(s + h, st)?;
        }
        states.push(CurveState { x: st[0], y: st[1], psi: st[2] });
    }
    Ok(SymmetryCurve { s: kg.s.clone(), states })
}

/// First period: the trapezoid integral of `⟨η, ξ⟩` along a horizontal
/// trace carrying conormal samples.
pub fn period_p1(t: &BoundaryTrace) -> Result<f64> {
    if t.kind() != TraceKind::Horizontal {
        return Err(DiagnosticsError::Kind("the first period is defined on horizontal traces".into()));
    }
    let c = t.conormal_xi().ok_or_else(|| DiagnosticsError::Kind("trace carries no conormal samples".into()))?;
    Ok(trapezoid(t.s(), c))
}

/// Second period `x sin ψ / y − cos ψ` at the end of a reconstructed curve.
pub fn period_p2(end: CurveState) -> f64 {
    end.x * end.psi.sin() / end.y - end.psi.cos()
}
