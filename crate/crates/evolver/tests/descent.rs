//! Gradient correctness, line-search behaviour and the sphere and genus runs.

use std::f64::consts::PI;

use ekt_evolver::*;
use ekt_geometry::{Chart, Vector3};
use ekt_mesh::{parse_datafile, to_off, Constraint, TriMesh, Vertex, FACET_FLOOR};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const CUBE_R1: &str = include_str!("../../../data/cube_r1.mesh");
const CUBE_R2: &str = include_str!("../../../data/cube_r2.mesh");

/// Jittered `n × n` grid over `[x0, x0 + w]²`, lifted by `lift`.
fn patch(chart: Chart, n: usize, x0: [f64; 2], w: f64, rng: &mut ChaCha8Rng, lift: impl Fn(f64, f64) -> f64) -> TriMesh {
    let mut vs = Vec::new();
    for j in 0..=n {
        for i in 0..=n {
            let jx = rng.random_range(-0.2..0.2) * w / n as f64;
            let jy = rng.random_range(-0.2..0.2) * w / n as f64;
            let (x, y) = (x0[0] + w * i as f64 / n as f64 + jx, x0[1] + w * j as f64 / n as f64 + jy);
            vs.push(Vertex::new(Vector3::new(x, y, lift(x, y) + rng.random_range(-0.05..0.05) * w)));
        }
    }
    let id = |i: usize, j: usize| j * (n + 1) + i;
    let mut fs = Vec::new();
    for j in 0..n {
        for i in 0..n {
            fs.push([id(i, j), id(i + 1, j), id(i + 1, j + 1)]);
            fs.push([id(i, j), id(i + 1, j + 1), id(i, j + 1)]);
        }
    }
    TriMesh::new(chart, vs, fs, vec![]).unwrap()
}

fn charts() -> Vec<(Chart, [f64; 2], f64, f64)> {
    // (chart, patch corner, width, base height)
    vec![
        (Chart::cartan(0.0, 0.0), [-0.5, -0.5], 1.0, 0.0),
        (Chart::cartan(-1.0, 0.6), [-0.6, -0.4], 1.0, 0.3),
        (Chart::cartan(1.0, -0.4), [-0.5, -0.5], 1.0, -0.2),
        (Chart::half_space(-1.0, 0.5).unwrap(), [-0.5, 0.5], 1.0, 0.1),
        (Chart::berger(1.0, 0.3).unwrap(), [-0.4, -0.6], 1.0, 0.5),
        (Chart::conformal(1.0).unwrap(), [0.3, 0.4], 1.0, 0.8),
    ]
}

#[test]
fn gradient_matches_directional_derivatives() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for (chart, corner, w, z0) in charts() {
        for trial in 0..20 {
            let mut m = patch(chart, 4, corner, w, &mut rng, |x, y| z0 + 0.3 * x * y);
            // Constrain one interior vertex to a sphere through it and one to a plane.
            let (a, b) = (6, 12);
            let ra = m.position(a).norm();
            m.constraints.push(Constraint::OriginSphere { radius: ra });
            m.constraints.push(Constraint::LinearPlane { normal: Vector3::new(0.3, -0.2, 1.0), offset: 0.0 });
            let pb = m.position(b);
            m.constraints[1] =
                Constraint::LinearPlane { normal: Vector3::new(0.3, -0.2, 1.0), offset: Vector3::new(0.3, -0.2, 1.0).dot(&pb) };
            m.vertices[a].constraints.push(0);
            m.vertices[b].constraints.push(1);
            m.vertices[0].fixed = true;
            m.validate().unwrap();
            let g = area_gradient(&m).unwrap();
            let dir: Vec<Vector3<f64>> = (0..m.num_vertices())
                .map(|i| {
                    let d = Vector3::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
                    m.project_displacement(i, &d)
                })
                .collect();
            let analytic: f64 = g.iter().zip(&dir).map(|(g, d)| g.dot(d)).sum();
            let fd = directional_derivative_fd(&m, &dir, 1e-6).unwrap();
            let scale = g.iter().zip(&dir).map(|(g, d)| g.norm() * d.norm()).sum::<f64>();
            assert!(
                (analytic - fd).abs() <= 1e-6 * scale.max(analytic.abs()),
                "{:?} trial {trial}: analytic {analytic} fd {fd}",
                chart.kind()
            );
            // Admissible gradients are tangent to the constraints; fixed vertices do not move.
            assert!(g[a].dot(&m.constraints[0].normal(&m.position(a))).abs() < 1e-10);
            assert!(g[b].dot(&m.constraints[1].normal(&m.position(b))).abs() < 1e-10);
            assert_eq!(g[0], Vector3::zeros());
        }
    }
}

#[test]
fn stationary_mesh_takes_a_null_step() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut m = patch(Chart::cartan(0.0, 0.0), 4, [0.0, 0.0], 1.0, &mut rng, |_, _| 0.0);
    // Flatten, fix the boundary and let the interior relax completely.
    m.map_coordinates(|x| Vector3::new(x.x, x.y, 0.0));
    let boundary = m.boundary_vertices();
    for (i, v) in m.vertices.iter_mut().enumerate() {
        v.fixed = boundary[i];
    }
    let mut ls = LineSearch::default();
    let info = gradient_step(&mut m, &mut ls).unwrap();
    assert!(info.max_disp < 1e-10, "{}", info.max_disp);
}

#[test]
fn facet_floor_forces_a_stall() {
    // One free corner slides along a line towards the opposite side: the
    // area can only decrease by flattening the facet.
    let cs = vec![
        Constraint::LinearPlane { normal: Vector3::x(), offset: 0.5 },
        Constraint::LinearPlane { normal: Vector3::z(), offset: 0.0 },
    ];
    let vs = vec![
        Vertex::new(Vector3::new(0.0, 0.0, 0.0)).fixed(),
        Vertex::new(Vector3::new(1.0, 0.0, 0.0)).fixed(),
        Vertex::new(Vector3::new(0.5, 1.0, 0.0)).with_constraints(&[0, 1]),
    ];
    let mut m = TriMesh::new(Chart::cartan(0.0, 0.0), vs, vec![[0, 1, 2]], cs).unwrap();
    let mut ls = LineSearch::default();
    let mut stalled = false;
    for _ in 0..2000 {
        match gradient_step(&mut m, &mut ls) {
            Ok(info) => assert!(info.area_after < info.area_before),
            Err(e) => {
                assert_eq!(e.kind(), "StallError");
                stalled = true;
                break;
            }
        }
        assert!(m.facet_area(0).unwrap() > FACET_FLOOR);
    }
    assert!(stalled);
    m.validate().unwrap();
}

#[test]
fn empty_schedule_reports_initial_area() {
    let m = parse_datafile(CUBE_R1).unwrap();
    let a = m.area().unwrap();
    let r = evolve(m, &EvolveSchedule::default()).unwrap();
    assert_eq!(r.trace.len(), 1);
    assert_eq!(r.final_area(), a);
    assert_eq!(r.trace_csv().lines().next(), Some("step,area,step_size,max_disp"));
}

#[test]
fn sphere_recipe_reaches_4pi() {
    let t = std::time::Instant::now();
    let r = evolve(parse_datafile(CUBE_R1).unwrap(), &EvolveSchedule::sphere_recipe()).unwrap();
    assert!(t.elapsed().as_secs_f64() < 60.0);
    assert_eq!(r.mesh.num_facets(), 768);
    assert_eq!(r.gradient_steps(), 100);
    assert!(r.gradient_steps_decrease());
    for w in r.trace.windows(2).filter(|w| w[1].gradient) {
        assert!(w[1].area < w[0].area);
    }
    let rel = (r.final_area() - 4.0 * PI).abs() / (4.0 * PI);
    assert!(rel < 0.01, "relative error {rel}");
    assert!(r.mesh_valid());
}

#[test]
fn sphere_runs_commute_with_dilation() {
    // The conformal metric is invariant under p ↦ 2p and so is the whole
    // pipeline: the radius-2 run is the radius-1 run scaled by 2.
    let r1 = evolve(parse_datafile(CUBE_R1).unwrap(), &EvolveSchedule::sphere_recipe()).unwrap();
    let r2 = evolve(parse_datafile(CUBE_R2).unwrap(), &EvolveSchedule::sphere_recipe()).unwrap();
    assert!((r1.final_area() - r2.final_area()).abs() < 0.01 * r1.final_area());
    let (d1, d2) = (euclidean_diagnostics(&r1.mesh).unwrap(), euclidean_diagnostics(&r2.mesh).unwrap());
    assert!((d2.implied_radius / d1.implied_radius - 2.0).abs() < 0.01);
    assert!((d2.mean_curvature_avg * 2.0 / d1.mean_curvature_avg - 1.0).abs() < 0.01);
    // The surface is round: mean curvature agrees with the implied radius.
    assert!((d1.mean_curvature_avg * d1.implied_radius - 1.0).abs() < 0.02);
}

#[test]
fn runs_are_bitwise_deterministic() {
    let run = || to_off(&evolve(parse_datafile(CUBE_R1).unwrap(), &"R R V U G30".parse().unwrap()).unwrap().mesh);
    assert_eq!(run(), run());
}

#[test]
fn stop_rule_ends_run_early() {
    let mut s: EvolveSchedule = "R R G500".parse().unwrap();
    s.stop = Some(StopRule { rel_area_tol: 1e-3, window: 5 });
    let r = evolve(parse_datafile(CUBE_R1).unwrap(), &s).unwrap();
    assert!(r.stopped_early);
    assert!(r.gradient_steps() < 500);
}

#[test]
fn unit_cube_volume() {
    let flat = CUBE_R1.replace("chart conformal 1", "chart cartan 0 0");
    let mut m = parse_datafile(&flat).unwrap();
    m.map_coordinates(|x| x * (3f64.sqrt() / 2.0) + Vector3::new(0.5, 0.5, 0.5));
    assert!((euclidean_volume(&m).unwrap() - 1.0).abs() < 1e-12);
    m.facets.pop();
    assert_eq!(euclidean_volume(&m).unwrap_err().kind(), "OpenMeshError");
}

#[test]
fn cotangent_mean_curvature_of_round_sphere() {
    let mut m = parse_datafile(CUBE_R1).unwrap();
    for _ in 0..4 {
        m.refine().unwrap();
    }
    m.map_coordinates(|x| x * (1.7 / x.norm()));
    let d = euclidean_diagnostics(&m).unwrap();
    assert!((d.mean_curvature_avg - 1.0 / 1.7).abs() < 0.02 / 1.7, "{}", d.mean_curvature_avg);
    assert!((d.implied_radius - 1.7).abs() < 0.02 * 1.7);
}

#[test]
fn genus_pieces_evolve_inside_the_shell() {
    for g in [3, 5, 9] {
        let h = 0.7;
        let r = genus_experiment(g, h, 3).unwrap();
        assert!(r.gradient_steps_decrease(), "g = {g}");
        assert!(r.final_area() < r.initial_area());
        if r.stall.is_none() {
            assert_eq!(r.gradient_steps(), GENUS_STEPS);
        }
        let (lo, hi) = radial_range(&r.mesh);
        assert!(lo >= 1.0 - 1e-9 && hi <= h.exp() + 1e-9, "g = {g}: |p| in [{lo}, {hi}]");
        assert!(r.mesh_valid());
        assert!(r.mesh.constraint_violation() < 1e-9);
    }
    assert_eq!(genus_experiment(2, 0.7, 1).unwrap_err().kind(), "ScheduleError");
}

#[test]
fn genus_piece_is_a_constrained_pentagon() {
    let m = genus_piece(3, 0.7).unwrap();
    assert_eq!((m.num_vertices(), m.num_facets()), (6, 5));
    assert_eq!(m.boundary_edges().len(), 5);
    assert_eq!(m.euler_characteristic(), 1);
    for k in 1..=5 {
        assert_eq!(m.vertices[k].constraints.len(), 2);
    }
}
