//! Fundamental data of the closed-form families against the compatibility
//! equations, the q-function, the stability operator and the algebra of the
//! sister transformation.

use std::f64::consts::PI;

use ekt_fundamental::*;
use ekt_geometry::{Matrix2, SpaceParams, Vector2};
use ekt_surfaces::*;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Interior patch used for convergence studies: 30 % margins on each side,
/// away from the singular ends of the radial families.
fn patch(s: &ParametricSurface) -> ParamRect {
    s.rect().shrink(0.3)
}

/// A unit-scale patch of the parabolic helicoid (side 1/4 at height v ∈ [1, 1.25]).
fn p_patch() -> ParamRect {
    ParamRect::new(-0.125, 0.125, 1.0, 1.25)
}

fn families() -> Vec<ParametricSurface> {
    vec![
        surface_s(SpaceParams::with_h(-1.0, 0.3, 0.25)).unwrap(),
        surface_s(SpaceParams::with_h(1.0, 0.3, 0.4)).unwrap(),
        surface_c(SpaceParams::with_h(-1.0, 0.4, 0.3)).unwrap(),
        surface_p(SpaceParams::with_h(-1.0, 0.6, 0.3)).unwrap(),
        spherical_helicoid(0.5, SpaceParams::new(2.0, 0.6)).unwrap(),
    ]
}

#[test]
fn samples_satisfy_pointwise_invariants() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for s in families() {
        for _ in 0..50 {
            let (u, v) = s.rect().shrink(0.05).lerp(rng.random_range(0.0..1.0), rng.random_range(0.0..1.0));
            let d = fundamental_data(&s, u, v).unwrap();
            d.check(1e-10).unwrap();
            assert!((d.mean_curvature() - s.expected_mean_curvature()).abs() < 1e-5);
        }
    }
}

#[test]
fn normal_flip_rule() {
    for s in families() {
        let (u, v) = patch(&s).lerp(0.3, 0.7);
        let d = fundamental_data(&s, u, v).unwrap();
        let f = fundamental_data(&s.with_flipped_normal(), u, v).unwrap();
        let expect = d.flip_normal();
        assert!((f.a - expect.a).norm() < 1e-12 && (f.t - expect.t).norm() < 1e-12);
        assert_eq!(f.nu, expect.nu);
        assert_eq!(f.orientation, expect.orientation);
    }
}

#[test]
fn parabolic_helicoid_residuals_on_unit_patch() {
    for p in [SpaceParams::with_h(-1.0, 0.0, 0.25), SpaceParams::with_h(-1.0, 0.6, 0.3)] {
        let s = surface_p(p).unwrap();
        let r = gauss_codazzi_residuals(&s, &Grid::new(p_patch(), 20, 20).unwrap()).unwrap();
        for (name, m) in r.maxima() {
            assert!(m < 1e-4, "{p:?} {name}: {m:e}");
        }
    }
}

#[test]
fn parabolic_helicoid_has_constant_angle() {
    let s = surface_p(SpaceParams::with_h(-1.0, 0.4, 0.3)).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let nus: Vec<f64> = (0..60)
        .map(|_| {
            let (u, v) = s.rect().lerp(rng.random_range(0.0..1.0), rng.random_range(0.0..1.0));
            fundamental_data(&s, u, v).unwrap().nu
        })
        .collect();
    let (lo, hi) = nus.iter().fold((f64::MAX, f64::MIN), |(a, b), &x| (a.min(x), b.max(x)));
    assert!(hi - lo < 1e-8, "spread {:e}", hi - lo);
}

/// Observed orders `log₂(r_h / r_{h/2})` of the max residuals over the
/// refinements n → 2n → 4n.
fn observed_orders(s: &ParametricSurface, rect: ParamRect, n: usize, st: Stencil) -> Vec<(&'static str, f64, f64)> {
    let g = Grid::new(rect, n, n).unwrap();
    let levels: Vec<_> = [g, g.refined(), g.refined().refined()]
        .iter()
        .map(|g| gauss_codazzi_residuals_with(s, g, st).unwrap().maxima())
        .collect();
    (0..5)
        .filter(|&k| levels[0][k].1 > 1e-9)
        .map(|k| (levels[0][k].0, (levels[0][k].1 / levels[1][k].1).log2(), (levels[1][k].1 / levels[2][k].1).log2()))
        .collect()
}

#[test]
fn residuals_converge_at_least_quadratically() {
    for s in families() {
        for (st, n, min_order) in [(Stencil::Second, 20, 1.7), (Stencil::Fourth, 10, 2.5)] {
            for (name, _, order) in observed_orders(&s, patch(&s), n, st) {
                assert!(order > min_order, "{st:?} {} {:?} {name}: order {order:.2}", s.name(), s.chart().params());
            }
        }
    }
}

#[test]
fn flat_torus_helicoid() {
    let s = spherical_helicoid(1.0, SpaceParams::new(2.0, 0.6)).unwrap();
    let r = gauss_codazzi_residuals(&s, &Grid::new(patch(&s), 20, 20).unwrap()).unwrap();
    assert!(r.gauss.max_abs() < 1e-4);
    // K = 0 directly: det A + τ² + (κ − 4τ²)ν² vanishes at every sample.
    let d = fundamental_data(&s, 1.0, 0.5).unwrap();
    assert!((d.a.determinant() + 0.36 + (2.0 - 4.0 * 0.36) * d.nu * d.nu).abs() < 1e-10);
}

#[test]
fn q_vanishes_on_equivariant_families() {
    for s in families().into_iter().take(4) {
        let rect = patch(&s);
        for a in 0..=4 {
            for b in 0..=4 {
                let (u, v) = rect.lerp(a as f64 / 4.0, b as f64 / 4.0);
                let q = abresch_rosenberg_q(&s, u, v).unwrap();
                assert!(q.abs() < 1e-4, "{} at ({u}, {v}): q = {q:e}", s.name());
            }
        }
    }
    // Spherical helicoids other than the flat torus are not equivariant.
    let h = spherical_helicoid(0.5, SpaceParams::new(2.0, 0.6)).unwrap();
    assert!(abresch_rosenberg_q(&h, 1.0, 0.3).unwrap().abs() > 1e-2);
}

#[test]
fn q_is_parametrization_invariant() {
    let s = surface_c(SpaceParams::with_h(-1.0, 0.4, 0.3)).unwrap();
    let h = spherical_helicoid(0.5, SpaceParams::new(2.0, 0.6)).unwrap();
    let (a, b) = (0.4_f64, 0.9_f64);
    let m = Matrix2::new(a.cos(), -a.sin(), a.sin(), a.cos()) * b;
    for surf in [s, h] {
        let (u0, v0) = patch(&surf).lerp(0.5, 0.5);
        let r = surf.reparametrized_affine(ParamRect::new(-0.1, 0.1, -0.1, 0.1), m, (u0, v0));
        let (x, y) = (0.02, -0.03);
        let uv = m * Vector2::new(x, y);
        let q1 = abresch_rosenberg_q(&surf, u0 + uv.x, v0 + uv.y).unwrap();
        let q2 = abresch_rosenberg_q(&r, x, y).unwrap();
        assert!((q1 - q2).abs() < 1e-6, "{}: {q1} vs {q2}", surf.name());
    }
}

#[test]
fn angle_function_is_a_jacobi_field_on_p() {
    let s = surface_p(SpaceParams::with_h(-1.0, 0.0, 0.25)).unwrap();
    let sc = s.clone();
    let nu = move |u: f64, v: f64| Ok(fundamental_data(&sc, u, v)?.nu);
    let g = Grid::new(p_patch(), 40, 40).unwrap();
    let l1 = stability_apply(&s, &nu, &g).unwrap().max_abs();
    let l2 = stability_apply(&s, &nu, &g.refined()).unwrap().max_abs();
    assert!(l1 < 1e-3, "|Lν| = {l1:e}");
    let ratio = l1 / l2;
    assert!((3.0..5.0).contains(&ratio), "refinement ratio {ratio}");
}

#[test]
fn stability_operator_is_linear() {
    let s = surface_s(SpaceParams::with_h(-1.0, 0.3, 0.25)).unwrap();
    let g = Grid::new(patch(&s), 12, 12).unwrap();
    let f = |u: f64, v: f64| Ok(u.sin() * v);
    let h = |u: f64, v: f64| Ok(v * v - u);
    let (a, b) = (1.7, -0.6);
    let lf = stability_apply(&s, f, &g).unwrap();
    let lh = stability_apply(&s, h, &g).unwrap();
    let lc = stability_apply(&s, |u, v| Ok(a * f(u, v)? + b * h(u, v)?), &g).unwrap();
    for k in 0..lc.values.len() {
        let expect = a * lf.values[k] + b * lh.values[k];
        assert!((lc.values[k] - expect).abs() < 1e-10 * (1.0 + expect.abs()));
    }
}

#[test]
fn sister_data_satisfy_the_target_gauss_equation() {
    // K is intrinsic, so the transformed data must reproduce it with the
    // target parameters.
    let src = SpaceParams::with_h(-1.0, 0.3, 0.25);
    let s = surface_s(src).unwrap();
    let kt = src.kappa_minus_4tau2();
    for theta in [0.3, PI / 2.0, -1.1] {
        let spec = ConjugateSpec::from_source(src, theta);
        let (u, v) = patch(&s).lerp(0.2, 0.6);
        let d = fundamental_data(&s, u, v).unwrap();
        let t = daniel_transform(&d, &spec).unwrap();
        let k_src = d.a.determinant() + src.tau.powi(2) + kt * d.nu * d.nu;
        let k_tgt = t.a.determinant() + spec.target.tau.powi(2) + kt * t.nu * t.nu;
        assert!((k_src - k_tgt).abs() < 1e-12);
        assert!((t.mean_curvature() - spec.target.h).abs() < 1e-5);
        t.check(1e-10).unwrap();
    }
}

fn sample_strategy() -> impl Strategy<Value = (FundamentalSample, SpaceParams)> {
    (-1.0f64..1.0, -1.0f64..1.0, 0.0f64..PI, -1.0f64..1.0, any::<bool>(), -2.0f64..2.0, -1.0f64..1.0, -1.0f64..1.0).prop_map(
        |(b1, b2, phi, nu, pos, kappa, tau, h)| {
            let a = Matrix2::new(h + b1, b2, b2, h - b1);
            let tn = (1.0 - nu * nu).sqrt();
            let d = FundamentalSample {
                a,
                t: Vector2::new(tn * phi.cos(), tn * phi.sin()),
                nu,
                orientation: if pos { 1.0 } else { -1.0 },
            };
            (d, SpaceParams::with_h(kappa, tau, h))
        },
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn transform_invariants((d, src) in sample_strategy(), theta in -PI..PI) {
        let spec = ConjugateSpec::from_source(src, theta);
        let t = daniel_transform(&d, &spec).unwrap();
        prop_assert_eq!(t.nu, d.nu);
        let id = Matrix2::identity();
        let before = (d.a - id * src.h).determinant();
        let after = (t.a - id * spec.target.h).determinant();
        prop_assert!((before - after).abs() < 1e-12);
        prop_assert!((t.a.trace() - 2.0 * spec.target.h).abs() < 1e-12);
        prop_assert!((t.t.norm() - d.t.norm()).abs() < 1e-12);
    }

    #[test]
    fn transforms_compose((d, src) in sample_strategy(), t1 in -PI..PI, t2 in -PI..PI) {
        let s1 = ConjugateSpec::from_source(src, t1);
        let s2 = ConjugateSpec::from_source(s1.target, t2);
        let direct = daniel_transform(&d, &ConjugateSpec::from_source(src, t1 + t2)).unwrap();
        let composed = daniel_transform(&daniel_transform(&d, &s1).unwrap(), &s2).unwrap();
        prop_assert!((direct.a - composed.a).norm() < 1e-12);
        prop_assert!((direct.t - composed.t).norm() < 1e-12);
        let back = daniel_transform(&daniel_transform(&d, &s1).unwrap(), &s1.inverse()).unwrap();
        prop_assert!((back.a - d.a).norm() < 1e-12);
    }

    #[test]
    fn quarter_turn_formula((d, src) in sample_strategy()) {
        let src = SpaceParams::with_h(src.kappa, src.tau, 0.0);
        let d = FundamentalSample { a: d.a - Matrix2::identity() * (0.5 * d.a.trace()), ..d };
        let spec = ConjugateSpec::from_source(src, PI / 2.0);
        let t = daniel_transform(&d, &spec).unwrap();
        let expect = d.j() * d.a + Matrix2::identity() * spec.target.h;
        prop_assert!((t.a - expect).norm() < 1e-12);
        prop_assert!((t.t - d.j() * d.t).norm() < 1e-12);
    }
}
