//! Structural and geometric properties of constrained meshes.

use std::f64::consts::PI;

use ekt_geometry::{Chart, Vector3};
use ekt_mesh::{parse_datafile, to_datafile, to_off, Constraint, EdgeAttr, TriMesh, Vertex};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const CUBE: &str = include_str!("../../../data/cube_r1.mesh");

fn cube() -> TriMesh {
    parse_datafile(CUBE).unwrap()
}

/// Cube refined `depth` times with every vertex pushed to the unit sphere.
fn sphere(depth: usize) -> TriMesh {
    let mut m = cube();
    for _ in 0..depth {
        m.refine().unwrap();
    }
    m.map_coordinates(|x| x / x.norm());
    m.validate().unwrap();
    m
}

/// `n × n` grid of unit-diagonal right triangles over `[0, 1]²` in flat space.
fn grid(n: usize) -> TriMesh {
    let mut vs = Vec::new();
    for j in 0..=n {
        for i in 0..=n {
            vs.push(Vertex::new(Vector3::new(i as f64 / n as f64, j as f64 / n as f64, 0.0)));
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
    TriMesh::new(Chart::cartan(0.0, 0.0), vs, fs, vec![]).unwrap()
}

fn jitter(m: &mut TriMesh, amount: f64, seed: u64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let boundary = m.boundary_vertices();
    for (i, v) in m.vertices.iter_mut().enumerate() {
        if !boundary[i] {
            v.x += Vector3::new(
                rng.random_range(-amount..amount),
                rng.random_range(-amount..amount),
                rng.random_range(-amount..amount),
            );
        }
    }
    for i in 0..m.num_vertices() {
        m.project_vertex(i);
    }
    m.validate().unwrap();
}

#[test]
fn cube_datafile_counts() {
    let m = cube();
    assert_eq!((m.num_vertices(), m.num_edges(), m.num_facets()), (8, 18, 12));
    assert!(m.is_closed());
    for v in &m.vertices {
        assert!((v.x.norm() - 1.0).abs() < 1e-15);
    }
}

#[test]
fn triple_refinement_gives_768_facets() {
    let mut m = cube();
    for _ in 0..3 {
        let (v, e, f) = (m.num_vertices(), m.num_edges(), m.num_facets());
        m.refine().unwrap();
        assert_eq!((m.num_vertices(), m.num_facets()), (v + e, 4 * f));
        assert_eq!(m.euler_characteristic(), 2);
    }
    assert_eq!(m.num_facets(), 768);
}

#[test]
fn unit_right_triangle_has_area_half() {
    let vs = [Vector3::new(0.0, 0.0, 0.0), Vector3::new(1.0, 0.0, 0.0), Vector3::new(0.0, 1.0, 0.0)];
    let m = TriMesh::new(Chart::cartan(0.0, 0.0), vs.iter().map(|&x| Vertex::new(x)).collect(), vec![[0, 1, 2]], vec![]).unwrap();
    assert_eq!(m.area().unwrap(), 0.5);
}

#[test]
fn conformal_sphere_area_approaches_4pi() {
    let areas: Vec<f64> = (1..=5).map(|d| sphere(d).area().unwrap()).collect();
    let err3 = (areas[2] - 4.0 * PI).abs() / (4.0 * PI);
    assert!(err3 < 0.01, "depth 3 relative error {err3}");
    let diffs: Vec<f64> = areas.windows(2).map(|w| (w[1] - w[0]).abs()).collect();
    for w in diffs.windows(2) {
        assert!(w[1] < w[0], "area increments not decreasing: {diffs:?}");
    }
    // The conformal metric is dilation invariant: scaling leaves the area alone.
    let mut m = sphere(2);
    let a = m.area().unwrap();
    m.map_coordinates(|x| x * 3.7);
    assert!((m.area().unwrap() - a).abs() < 1e-12 * a);
}

#[test]
fn constrained_midpoints_stay_on_constraints() {
    // Quarter disk of the plane z = 0 bounded by the unit circle and the axes.
    let cs = vec![
        Constraint::OriginSphere { radius: 1.0 },
        Constraint::LinearPlane { normal: Vector3::y(), offset: 0.0 },
        Constraint::LinearPlane { normal: Vector3::x(), offset: 0.0 },
        Constraint::CartanSlice { z0: 0.0 },
    ];
    let vs = vec![
        Vertex::new(Vector3::new(0.0, 0.0, 0.0)).with_constraints(&[1, 2, 3]),
        Vertex::new(Vector3::new(1.0, 0.0, 0.0)).with_constraints(&[0, 1, 3]),
        Vertex::new(Vector3::new(0.7, 0.7, 0.0)).with_constraints(&[0, 3]),
        Vertex::new(Vector3::new(0.0, 1.0, 0.0)).with_constraints(&[0, 2, 3]),
    ];
    let mut m = TriMesh::new(Chart::cartan(0.0, 0.0), vs, vec![[0, 1, 2], [0, 2, 3]], cs).unwrap();
    m.set_edge_attr(0, 1, EdgeAttr { constraints: vec![1, 3], fixed: false });
    m.set_edge_attr(1, 2, EdgeAttr { constraints: vec![0, 3], fixed: false });
    m.set_edge_attr(2, 3, EdgeAttr { constraints: vec![0, 3], fixed: false });
    m.set_edge_attr(3, 0, EdgeAttr { constraints: vec![2, 3], fixed: false });
    let mut last = m.area().unwrap();
    for _ in 0..4 {
        m.refine().unwrap();
        assert!(m.constraint_violation() < 1e-9);
        let a = m.area().unwrap();
        assert!(a > last, "inscribed polygons grow towards the quarter disk");
        last = a;
    }
    assert!((last - PI / 4.0).abs() < 2e-3);
    let arc = m.vertices.iter().filter(|v| v.constraints.contains(&0)).count();
    assert_eq!(arc, 2 * 16 + 1);
}

#[test]
fn averaging_fixes_uniform_grid() {
    let mut m = grid(6);
    let before: Vec<Vector3<f64>> = m.vertices.iter().map(|v| v.x).collect();
    m.vertex_average().unwrap();
    let disp = m.vertices.iter().zip(&before).map(|(v, b)| (v.x - b).norm()).fold(0.0, f64::max);
    assert!(disp < 1e-12, "{disp}");
}

#[test]
fn averaging_never_increases_area_and_keeps_constraints() {
    for seed in 0..5 {
        let mut m = sphere(2);
        for i in 0..m.num_vertices() {
            m.vertices[i].constraints.clear();
        }
        m.constraints.push(Constraint::LinearPlane { normal: Vector3::z(), offset: 0.0 });
        let on_plane: Vec<usize> = (0..m.num_vertices()).filter(|&i| m.position(i).z.abs() < 1e-12).collect();
        for &i in &on_plane {
            m.vertices[i].constraints.push(0);
        }
        jitter(&mut m, 0.05, seed);
        let a0 = m.area().unwrap();
        let r = m.vertex_average().unwrap();
        assert!(r.moved > 0);
        let a1 = m.area().unwrap();
        assert!(a1 <= a0 * (1.0 + 1e-9), "{a0} -> {a1}");
        assert!(m.constraint_violation() < 1e-9);
        m.validate().unwrap();
    }
}

#[test]
fn equitriangulation_leaves_delaunay_grid_alone() {
    let mut m = grid(5);
    assert_eq!(m.equitriangulate().unwrap(), 0);
}

#[test]
fn equitriangulation_is_idempotent() {
    for seed in 0..4 {
        let mut m = grid(8);
        jitter(&mut m, 0.04, seed);
        m.map_coordinates(|x| Vector3::new(x.x * 3.0, x.y, x.z));
        let a0 = m.area().unwrap();
        let flips = m.equitriangulate().unwrap();
        assert!(flips > 0);
        m.validate().unwrap();
        assert_eq!(m.equitriangulate().unwrap(), 0);
        assert_eq!(m.euler_characteristic(), 1);
        // Flips in a (nearly) flat sheet barely change the area.
        assert!((m.area().unwrap() - a0).abs() < 0.05 * a0);
    }
}

#[test]
fn cull_leaves_clean_mesh_unchanged() {
    let mut m = sphere(2);
    let before = m.clone();
    let r = m.cull_degenerate(1e-4, 1e-8).unwrap();
    assert_eq!(r.collapsed + r.flipped, 0);
    assert_eq!(m, before);
}

#[test]
fn cull_removes_needle() {
    let mut m = grid(4);
    // Pull interior vertex (1, 1) almost onto (2, 2)'s neighbour (1, 2): a needle.
    let id = |i: usize, j: usize| j * 5 + i;
    let target = m.position(id(1, 2));
    m.vertices[id(1, 1)].x = target + Vector3::new(1e-6, -1e-6, 0.0);
    m.validate().unwrap();
    let chi = m.euler_characteristic();
    let r = m.cull_degenerate(1e-3, 1e-9).unwrap();
    assert_eq!(r.collapsed, 1);
    assert_eq!(m.euler_characteristic(), chi);
    assert_eq!(m.num_vertices(), 24);
    for f in 0..m.num_facets() {
        assert!(m.facet_area(f).unwrap() > 1e-9);
    }
}

#[test]
fn cull_never_merges_distinct_boundary_constraints() {
    let mut m = grid(3);
    m.constraints.push(Constraint::LinearPlane { normal: Vector3::y(), offset: 0.0 });
    m.constraints.push(Constraint::LinearPlane { normal: Vector3::x(), offset: 1.0 });
    // Two boundary vertices next to the corner (1, 0), each on its own side.
    let id = |i: usize, j: usize| j * 4 + i;
    m.vertices[id(2, 0)].constraints = vec![0];
    m.vertices[id(3, 1)].constraints = vec![1];
    m.vertices[id(3, 0)].constraints = vec![0, 1];
    m.vertices[id(2, 0)].x = Vector3::new(1.0 - 1e-5, 0.0, 0.0);
    m.validate().unwrap();
    let r = m.cull_degenerate(1e-3, 0.0).unwrap();
    // The short edge joins a side vertex to the corner: it collapses into the
    // corner, which carries both constraints.
    assert_eq!(r.collapsed, 1);
    assert!(m.vertices.iter().any(|v| v.constraints == vec![0, 1] && (v.x - Vector3::new(1.0, 0.0, 0.0)).norm() < 1e-15));
    assert!(m.constraint_violation() < 1e-9);

    // A corner cannot be absorbed by either side vertex.
    let mut m = grid(3);
    m.constraints.push(Constraint::LinearPlane { normal: Vector3::y(), offset: 0.0 });
    m.constraints.push(Constraint::LinearPlane { normal: Vector3::x(), offset: 1.0 });
    m.vertices[id(2, 0)].constraints = vec![0];
    m.vertices[id(3, 0)].constraints = vec![1];
    m.vertices[id(2, 0)].x = Vector3::new(1.0 - 1e-5, 0.0, 0.0);
    m.validate().unwrap();
    let r = m.cull_degenerate(1e-3, 0.0).unwrap();
    assert_eq!((r.collapsed, r.skipped), (0, 1));
}

#[test]
fn refinement_output_is_deterministic() {
    let run = || {
        let mut m = cube();
        m.refine().unwrap();
        m.refine().unwrap();
        m.vertex_average().unwrap();
        m.equitriangulate().unwrap();
        to_off(&m)
    };
    assert_eq!(run(), run());
}

#[test]
fn refined_cube_round_trips() {
    let mut m = cube();
    m.refine().unwrap();
    let again = parse_datafile(&to_datafile(&m)).unwrap();
    assert_eq!(to_off(&again), to_off(&m));
    assert_eq!(again.area().unwrap(), m.area().unwrap());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn area_ignores_relabelling_and_orientation(shift in 0usize..3, seed in 0u64..1000) {
        let mut m = sphere(1);
        jitter(&mut m, 0.05, seed);
        let a = m.area().unwrap();
        let mut rotated = m.clone();
        for f in &mut rotated.facets {
            f.rotate_left(shift);
        }
        prop_assert!((rotated.area().unwrap() - a).abs() < 1e-13 * a);
        let mut reversed = m.clone();
        for f in &mut reversed.facets {
            f.swap(1, 2);
        }
        prop_assert!((reversed.area().unwrap() - a).abs() < 1e-13 * a);
    }

    #[test]
    fn projections_are_idempotent(x in -3.0f64..3.0, y in -3.0f64..3.0, z in -3.0f64..3.0,
                                  a in -1.0f64..1.0, b in -1.0f64..1.0, th in 0.0f64..std::f64::consts::TAU) {
        let p = Vector3::new(x, y, z);
        let cs = [
            Constraint::LinearPlane { normal: Vector3::new(a, b, 1.0), offset: a },
            Constraint::OriginSphere { radius: 1.0 + b.abs() },
            Constraint::CartanSlice { z0: a },
            Constraint::CartanVerticalPlane { kappa: 0.0, point: [a, b], direction: [th.cos(), th.sin()] },
            Constraint::CartanVerticalPlane { kappa: 1.0, point: [a, b], direction: [th.cos(), th.sin()] },
        ];
        for c in cs {
            let q = c.project(&p);
            prop_assert!((c.project(&q) - q).norm() < 1e-12, "{:?}", c);
        }
        // Hyperbolic planes: stay inside the disk of radius 2/√−κ.
        let c = Constraint::CartanVerticalPlane { kappa: -1.0, point: [a, b], direction: [th.cos(), th.sin()] };
        let inside = Vector3::new(x, y, z) * (1.5 / 3f64.sqrt() / 3.0);
        let q = c.project(&inside);
        prop_assert!((c.project(&q) - q).norm() < 1e-12);
        prop_assert!(q.x * q.x + q.y * q.y < 4.0);
    }

    #[test]
    fn refinement_keeps_validity(seed in 0u64..200) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut m = sphere(1);
        let k = rng.random_range(0..m.num_vertices());
        m.vertices[k].fixed = true;
        m.refine().unwrap();
        prop_assert!(m.validate().is_ok());
        prop_assert_eq!(m.euler_characteristic(), 2);
    }
}
