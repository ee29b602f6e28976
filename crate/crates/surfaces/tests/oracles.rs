//! Every closed-form family is checked against the independent
//! second-fundamental-form evaluator at random interior parameter points.

use std::f64::consts::PI;

use ekt_geometry::{berger_metric_4d, c2_to_r4, Complex64, SpaceParams};
use ekt_surfaces::*;
use nalgebra::Vector4;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SAMPLES: usize = 60;

/// Largest |H_numeric − H| over random points of the interior of the rectangle.
fn worst_error(s: &ParametricSurface, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rect = s.rect().shrink(0.05);
    let mut worst: f64 = 0.0;
    for _ in 0..SAMPLES {
        let (u, v) = rect.lerp(rng.random_range(0.0..1.0), rng.random_range(0.0..1.0));
        let h = numeric_mean_curvature(s, u, v).unwrap_or_else(|e| panic!("{} at ({u}, {v}): {e}", s.name()));
        worst = worst.max((h - s.expected_mean_curvature()).abs());
    }
    worst
}

fn assert_family(s: &ParametricSurface, seed: u64) {
    let err = worst_error(s, seed);
    assert!(err < 1e-5, "{} ({:?}): worst |H − H₀| = {err:e}", s.name(), s.chart().params());
}

#[test]
fn rotational_family_s() {
    for (i, p) in [
        SpaceParams::with_h(-1.0, 0.0, 0.3),
        SpaceParams::with_h(-1.0, 0.5, 0.25),
        SpaceParams::with_h(-4.0, 0.3, 0.6),
        SpaceParams::with_h(0.0, 0.5, 0.5),
        SpaceParams::with_h(1.0, -0.7, 0.4),
        SpaceParams::with_h(4.0, 0.2, 1.0),
        SpaceParams::with_h(-1.0, 0.4, -0.3),
    ]
    .into_iter()
    .enumerate()
    {
        assert_family(&surface_s(p).unwrap(), i as u64);
    }
}

#[test]
fn screw_family_c() {
    for (i, p) in [
        SpaceParams::with_h(-1.0, 0.0, 0.3),
        SpaceParams::with_h(-1.0, 0.5, 0.0),
        SpaceParams::with_h(-1.0, 0.5, 0.25),
        SpaceParams::with_h(-4.0, -0.8, 0.7),
    ]
    .into_iter()
    .enumerate()
    {
        assert_family(&surface_c(p).unwrap(), 100 + i as u64);
    }
}

#[test]
fn parabolic_family_p() {
    let s = surface_p(SpaceParams::with_h(-1.0, 0.0, 0.25)).unwrap();
    assert!((numeric_mean_curvature(&s, 0.1, 1.3).unwrap() - 0.25).abs() < 1e-5);
    for (i, p) in [
        SpaceParams::with_h(-1.0, 0.0, 0.25),
        SpaceParams::with_h(-1.0, 0.6, 0.4),
        SpaceParams::with_h(-2.0, -0.3, 0.1),
        SpaceParams::with_h(-1.0, 0.3, 0.0),
    ]
    .into_iter()
    .enumerate()
    {
        assert_family(&surface_p(p).unwrap(), 200 + i as u64);
    }
}

#[test]
fn umbrellas_and_invariant_graphs() {
    let mut seed = 300;
    for kappa in [-1.0, -3.0, 0.0, 1.0] {
        for tau in [0.0, 0.5, -1.2] {
            let g = umbrella(SpaceParams::new(kappa, tau));
            assert_family(&g.surface("umbrella", g.default_rect().shrink(0.1), 0.0), seed);
            seed += 1;
        }
    }
    for p in [SpaceParams::new(0.0, 0.7), SpaceParams::new(-1.0, 0.7), SpaceParams::new(-2.0, -0.4)] {
        let g = invariant_graph(p).unwrap();
        assert_family(&g.surface("invariant", g.default_rect().shrink(0.1), 0.0), seed);
        seed += 1;
    }
}

#[test]
fn graph_formula_agrees_with_oracle() {
    let p = SpaceParams::new(-1.0, 0.45);
    let g = GraphFunction::new(p, |x, y| 0.3 * x * x - 0.2 * x * y + 0.5 * y.sin());
    let s = g.surface("quadric", g.default_rect(), 0.0);
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..SAMPLES {
        let (x, y) = s.rect().shrink(0.1).lerp(rng.random_range(0.0..1.0), rng.random_range(0.0..1.0));
        let a = g.mean_curvature(x, y).unwrap();
        let b = numeric_mean_curvature(&s, x, y).unwrap();
        assert!((a - b).abs() < 1e-5, "divergence form {a} vs oracle {b}");
    }
}

#[test]
fn spherical_helicoids_are_minimal() {
    let mut seed = 400;
    for p in [SpaceParams::new(4.0, 1.0), SpaceParams::new(2.0, 0.4), SpaceParams::new(1.0, -1.5)] {
        for c in [0.0, 0.5, 2.0, -1.5] {
            assert_family(&spherical_helicoid(c, p).unwrap(), seed);
            seed += 1;
        }
    }
}

#[test]
fn helicoids_of_reciprocal_pitch_are_congruent() {
    let p = SpaceParams::new(2.0, 0.6);
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for c in [0.5, 2.0, -3.0] {
        let a = spherical_helicoid(c, p).unwrap();
        let b = spherical_helicoid(1.0 / c, p).unwrap();
        for _ in 0..20 {
            let u = rng.random_range(0.4..PI / 2.0 - 0.1);
            let v = rng.random_range(-1.0..1.0);
            let ia = local_geometry(&a, u, v).unwrap().first;
            let ib = local_geometry(&b, PI / 2.0 - u, c * v).unwrap().first;
            // chain rule for (u, v) ↦ (π/2 − u, c v)
            let j = nalgebra::Matrix2::new(-1.0, 0.0, 0.0, c);
            let pulled = j.transpose() * ib * j;
            assert!((ia - pulled).norm() < 1e-8 * (1.0 + ia.norm()), "c = {c}: {ia} vs {pulled}");
        }
    }
}

#[test]
fn helicoid_metric_matches_four_dimensional_model() {
    let (k, t, c) = (2.0, 0.6, 0.7);
    let s = spherical_helicoid(c, SpaceParams::new(k, t)).unwrap();
    for (u, v) in [(0.5, 0.2), (1.2, -2.0), (2.4, 1.0)] {
        let q = spherical_helicoid_s3(c, u, v);
        let i = Complex64::i();
        let du = c2_to_r4(&[Complex64::from_polar(-u.sin(), c * v), Complex64::from_polar(u.cos(), v)]);
        let dv = c2_to_r4(&[q[0] * i * c, q[1] * i]);
        let first = local_geometry(&s, u, v).unwrap().first;
        let m = |a: &Vector4<f64>, b: &Vector4<f64>| berger_metric_4d(k, t, &q, a, b);
        let expect = nalgebra::Matrix2::new(m(&du, &du), m(&du, &dv), m(&dv, &du), m(&dv, &dv));
        assert!((first - expect).norm() < 1e-10 * (1.0 + expect.norm()), "{first} vs {expect}");
    }
}

#[test]
fn profile_quadrature_is_converged() {
    let p = SpaceParams::with_h(-1.0, 0.5, 0.25);
    let (_, v1) = s_radial_range(&p).unwrap();
    for v in [0.3, 1.0, v1] {
        assert!((s_profile(&p, v, PROFILE_TOL) - s_profile(&p, v, 1e-13)).abs() < 1e-9);
    }
    let p = SpaceParams::with_h(-1.0, 0.3, 0.3);
    for v in [1.3, 1.7, 2.0 - DOMAIN_CLIP] {
        let (a, b) = (c_profile(&p, v, PROFILE_TOL), c_profile(&p, v, 1e-13));
        assert!((a - b).abs() < 1e-9, "{v}: {a} {b}");
    }
}

#[test]
fn families_with_fd_derivatives_agree() {
    // Dropping the analytic jet (finite-difference derivatives only) keeps H.
    let s = surface_s(SpaceParams::with_h(-1.0, 0.5, 0.25)).unwrap();
    let sm = s.clone();
    let fd = ParametricSurface::new("S-fd", s.chart(), s.rect(), s.expected_mean_curvature(), move |u, v| sm.point(u, v));
    assert_family(&fd, 500);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn flipping_the_normal_negates_h(s in 0.1f64..0.9, t in 0.1f64..0.9, which in 0usize..4) {
        let surf = match which {
            0 => surface_s(SpaceParams::with_h(-1.0, 0.3, 0.4)).unwrap(),
            1 => surface_c(SpaceParams::with_h(-1.0, 0.3, 0.2)).unwrap(),
            2 => surface_p(SpaceParams::with_h(-1.0, 0.3, 0.2)).unwrap(),
            _ => spherical_helicoid(0.5, SpaceParams::new(2.0, 0.3)).unwrap(),
        };
        let (u, v) = surf.rect().lerp(s, t);
        let a = numeric_mean_curvature(&surf, u, v).unwrap();
        let b = numeric_mean_curvature(&surf.with_flipped_normal(), u, v).unwrap();
        prop_assert_eq!(a, -b);
    }

    #[test]
    fn rotating_s_rotates_points(shift in -PI..PI, s in 0.0f64..1.0, t in 0.0f64..1.0) {
        let surf = surface_s(SpaceParams::with_h(1.0, -0.4, 0.5)).unwrap();
        let (u, v) = surf.rect().lerp(s, t);
        let p = surf.point(u, v).unwrap();
        let q = surf.point(u + shift, v).unwrap();
        let (sn, cs) = shift.sin_cos();
        prop_assert!((cs * p.x - sn * p.y - q.x).abs() < 1e-12);
        prop_assert!((sn * p.x + cs * p.y - q.y).abs() < 1e-12);
        prop_assert!((p.z - q.z).abs() < 1e-12);
    }
}
