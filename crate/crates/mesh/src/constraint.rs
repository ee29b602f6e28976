//! Level-set constraints on vertex positions, with closed-form projections.

use ekt_geometry::{Complex64, Vector3};

/// A constraint surface in chart coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Constraint {
    /// Affine plane `⟨normal, x⟩ = offset`.
    LinearPlane {
        /// Plane normal (any non-zero length).
        normal: Vector3<f64>,
        /// Right-hand side.
        offset: f64,
    },
    /// Sphere `|x| = radius` centred at the origin.
    OriginSphere {
        /// Radius.
        radius: f64,
    },
    /// Horizontal slice `z = z0` of the Cartan model.
    CartanSlice {
        /// Height.
        z0: f64,
    },
    /// Vertical plane of the Cartan model: the preimage under `(x, y, z) ↦ (x, y)`
    /// of the `M²(κ)` geodesic through `point` with direction `direction`.
    CartanVerticalPlane {
        /// Base curvature `κ`.
        kappa: f64,
        /// A point of the base geodesic.
        point: [f64; 2],
        /// Its (Euclidean) direction at `point`.
        direction: [f64; 2],
    },
}

/// Tolerance to which vertices satisfy their constraints after any mutation.
pub const CONSTRAINT_TOL: f64 = 1e-9;

impl Constraint {
    /// Short name used in the datafile format.
    pub fn name(&self) -> &'static str {
        match self {
            Constraint::LinearPlane { .. } => "plane",
            Constraint::OriginSphere { .. } => "sphere",
            Constraint::CartanSlice { .. } => "slice",
            Constraint::CartanVerticalPlane { .. } => "vplane",
        }
    }

    /// Nearest point of the constraint set (for vertical planes: the foot of
    /// the `M²(κ)`-perpendicular, with `z` unchanged).
    pub fn project(&self, x: &Vector3<f64>) -> Vector3<f64> {
        match *self {
            Constraint::LinearPlane { normal, offset } => x - normal * ((normal.dot(x) - offset) / normal.norm_squared()),
            Constraint::OriginSphere { radius } => {
                let n = x.norm();
                if n == 0.0 {
                    Vector3::new(radius, 0.0, 0.0)
                } else {
                    x * (radius / n)
                }
            }
            Constraint::CartanSlice { z0 } => Vector3::new(x.x, x.y, z0),
            Constraint::CartanVerticalPlane { .. } => {
                let frame = self.base_frame();
                let w = frame.to_normalized(x);
                let foot = frame.foot(w);
                let p = frame.denormalize(foot);
                Vector3::new(p.re, p.im, x.z)
            }
        }
    }

    /// Signed level function whose zero set is the constraint.
    pub fn level(&self, x: &Vector3<f64>) -> f64 {
        match *self {
            Constraint::LinearPlane { normal, offset } => (normal.dot(x) - offset) / normal.norm(),
            Constraint::OriginSphere { radius } => x.norm() - radius,
            Constraint::CartanSlice { z0 } => x.z - z0,
            Constraint::CartanVerticalPlane { .. } => {
                let frame = self.base_frame();
                frame.to_normalized(x).im
            }
        }
    }

    /// Euclidean gradient of [`Self::level`] (a normal of the constraint set).
    pub fn normal(&self, x: &Vector3<f64>) -> Vector3<f64> {
        match *self {
            Constraint::LinearPlane { normal, .. } => normal / normal.norm(),
            Constraint::OriginSphere { .. } => {
                let n = x.norm();
                if n == 0.0 {
                    Vector3::x()
                } else {
                    x / n
                }
            }
            Constraint::CartanSlice { .. } => Vector3::z(),
            Constraint::CartanVerticalPlane { .. } => {
                let h = 1e-7 * (1.0 + x.x.abs() + x.y.abs());
                let dx = (self.level(&(x + Vector3::x() * h)) - self.level(&(x - Vector3::x() * h))) / (2.0 * h);
                let dy = (self.level(&(x + Vector3::y() * h)) - self.level(&(x - Vector3::y() * h))) / (2.0 * h);
                Vector3::new(dx, dy, 0.0)
            }
        }
    }

    /// Euclidean distance from `x` to its projection.
    pub fn distance(&self, x: &Vector3<f64>) -> f64 {
        (self.project(x) - x).norm()
    }

    fn base_frame(&self) -> BaseFrame {
        match *self {
            Constraint::CartanVerticalPlane { kappa, point, direction } => BaseFrame::new(kappa, point, direction),
            _ => unreachable!("base frame only exists for vertical planes"),
        }
    }
}

/// Normalised coordinates in which a base geodesic of `M²(κ)` is the real
/// axis: `w = e^{−iθ} φ(c ζ)`, `ζ = x + iy`, `c = √|κ|/2` (1 for `κ = 0`) and
/// `φ(w) = (w − a)/(1 + s ā w)` the isometry moving the base point to 0.
struct BaseFrame {
    c: f64,
    s: f64,
    a: Complex64,
    rot: Complex64,
}

impl BaseFrame {
    fn new(kappa: f64, point: [f64; 2], direction: [f64; 2]) -> Self {
        let s = kappa.signum();
        let c = if kappa == 0.0 { 1.0 } else { kappa.abs().sqrt() / 2.0 };
        let a = Complex64::new(point[0], point[1]) * c;
        // φ'(a) = 1 / (1 + s|a|²) is real and positive, so directions are preserved.
        let d = Complex64::new(direction[0], direction[1]);
        let rot = d / d.norm();
        Self { c, s, a, rot }
    }

    fn phi(&self, w: Complex64) -> Complex64 {
        if self.s == 0.0 {
            w - self.a
        } else {
            (w - self.a) / (1.0 + self.s * self.a.conj() * w)
        }
    }

    fn phi_inv(&self, w: Complex64) -> Complex64 {
        if self.s == 0.0 {
            w + self.a
        } else {
            (w + self.a) / (1.0 - self.s * self.a.conj() * w)
        }
    }

    fn to_normalized(&self, x: &Vector3<f64>) -> Complex64 {
        self.phi(Complex64::new(x.x, x.y) * self.c) / self.rot
    }

    fn denormalize(&self, w: Complex64) -> Complex64 {
        self.phi_inv(w * self.rot) / self.c
    }

    /// Foot on the real axis of the geodesic perpendicular through `q`.
    fn foot(&self, q: Complex64) -> Complex64 {
        if self.s == 0.0 || q.re == 0.0 {
            return Complex64::new(if self.s == 0.0 { q.re } else { 0.0 }, 0.0);
        }
        // Perpendicular geodesics are circles centred at c on the real axis
        // through q, meeting the axis at the root t of t² − 2ct − s = 0 on
        // the side of q.
        let cc = (q.norm_sqr() - self.s) / (2.0 * q.re);
        let t = -self.s / (cc + cc.signum() * (cc * cc + self.s).sqrt());
        Complex64::new(t, 0.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ekt_geometry::{geodesic, Chart};

    #[test]
    fn projections_are_idempotent() {
        let cs = [
            Constraint::LinearPlane { normal: Vector3::new(1.0, -2.0, 0.5), offset: 0.3 },
            Constraint::OriginSphere { radius: 2.0 },
            Constraint::CartanSlice { z0: -0.4 },
            Constraint::CartanVerticalPlane { kappa: -1.0, point: [0.3, -0.2], direction: [0.6, 0.8] },
            Constraint::CartanVerticalPlane { kappa: 1.0, point: [0.3, 0.4], direction: [1.0, 0.2] },
            Constraint::CartanVerticalPlane { kappa: 0.0, point: [0.3, 0.4], direction: [1.0, 1.0] },
        ];
        for c in cs {
            let x = Vector3::new(0.5, 0.7, 1.1);
            let p = c.project(&x);
            assert!((c.project(&p) - p).norm() < 1e-12, "{c:?}");
            assert!(c.level(&p).abs() < 1e-12, "{c:?}");
        }
    }

    #[test]
    fn vertical_plane_contains_the_geodesic() {
        // The base geodesic, traced by the geometry kernel, lies in the plane.
        for kappa in [-1.0, 1.0] {
            let (p, d) = ([0.3, -0.2], [0.6, 0.8]);
            let c = Constraint::CartanVerticalPlane { kappa, point: p, direction: d };
            let chart = Chart::cartan(kappa, 0.0);
            let x0 = chart.point(Vector3::new(p[0], p[1], 0.0)).unwrap();
            let lam = ekt_geometry::lambda_kappa(kappa, p[0], p[1]).unwrap();
            let v = x0.vector(Vector3::new(d[0], d[1], 0.0) / lam);
            let geo = geodesic(&v, 1.0, 128).unwrap();
            for q in &geo.points {
                assert!(c.level(&q.coords).abs() < 1e-9, "κ = {kappa}: {}", c.level(&q.coords));
            }
        }
    }

    #[test]
    fn vertical_plane_foot_is_nearest() {
        // The projection minimises the M²(κ) distance; compare against nearby
        // points of the geodesic via the hyperbolic distance in the disk.
        let c = Constraint::CartanVerticalPlane { kappa: -4.0, point: [0.1, 0.1], direction: [1.0, 0.3] };
        let x = Vector3::new(0.2, 0.35, 0.0);
        let p = c.project(&x);
        let dist = |a: &Vector3<f64>, b: &Vector3<f64>| {
            // κ = −4: unit Poincaré disk, d = 2 artanh |(a − b)/(1 − ā b)|
            let (za, zb) = (Complex64::new(a.x, a.y), Complex64::new(b.x, b.y));
            2.0 * ((za - zb) / (1.0 - za.conj() * zb)).norm().atanh()
        };
        let d0 = dist(&x, &p);
        let frame = c.base_frame();
        let t0 = frame.to_normalized(&p).re;
        for dt in [-1e-3, 1e-3, -1e-2, 1e-2] {
            let q = frame.denormalize(Complex64::new(t0 + dt, 0.0));
            assert!(dist(&x, &Vector3::new(q.re, q.im, 0.0)) > d0);
        }
    }

    #[test]
    fn normals_are_unit_for_simple_sets() {
        let x = Vector3::new(0.2, -1.0, 3.0);
        assert!((Constraint::OriginSphere { radius: 1.0 }.normal(&x).norm() - 1.0).abs() < 1e-15);
        let n = Constraint::LinearPlane { normal: Vector3::new(0.0, 2.0, 0.0), offset: 0.0 }.normal(&x);
        assert_eq!(n, Vector3::y());
    }
}
