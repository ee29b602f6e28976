//! The experiments behind `experiment=`.
//!
//! Each experiment first builds its inputs ([`prepare`]); any failure there
//! is a validation failure and nothing is written.  [`execute`] then
//! computes the artifacts in memory.  A line-search stall still yields the
//! partial artifacts, with [`Outcome::stall`] set.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::path::Path;

use ekt_diagnostics::{ell0_bounds, evolve_delaunay_piece, solve_period, DelaunayContour, DiagnosticsError, PeriodProblem};
use ekt_evolver::{euclidean_diagnostics, evolve, genus_piece, radial_range, EvolveError, EvolveReport};
use ekt_geometry::SpaceParams;
use ekt_mesh::{fmt_g, parse_datafile, to_obj, to_off, TriMesh};
use ekt_surfaces::{
    horizontal_slice, horocycle_cylinder, invariant_graph, numeric_mean_curvature, spherical_helicoid, surface_c, surface_p,
    surface_s, umbrella, vertical_circle_cylinder, vertical_plane, ParametricSurface,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::CliError;
use crate::settings::{Experiment, GenusSpec, OracleSpec, PeriodsSpec, Settings, SphereSpec, TraceSpec};

/// The cube inscribed in the unit sphere, in the conformal model of `S² × R`.
pub const UNIT_CUBE: &str = include_str!("../../../data/cube_r1.mesh");

/// Relative area tolerance of the sphere experiment against `4π`.
pub const SPHERE_AREA_TOL: f64 = 0.01;

/// Tolerance of the oracle experiment on `|H_numeric − H|`.
pub const ORACLE_TOL: f64 = 1e-5;

/// Fraction of the parameter rectangle trimmed on each side before sampling.
pub const ORACLE_MARGIN: f64 = 0.05;

/// A file produced by a run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Artifact {
    /// File name inside the output directory.
    pub name: &'static str,
    /// File contents.
    pub contents: String,
}

/// Everything a run produced.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Outcome {
    /// Files other than the report.
    pub artifacts: Vec<Artifact>,
    /// `key = value` result lines for the report.
    pub results: Vec<(String, String)>,
    /// Tolerances in force, for the report.
    pub tolerances: Vec<(&'static str, String)>,
    /// Stall message when the run ended in a line-search stall.
    pub stall: Option<String>,
}

impl Outcome {
    fn result(&mut self, key: &str, value: impl ToString) {
        self.results.push((key.to_string(), value.to_string()));
    }

    fn real(&mut self, key: &str, x: f64) {
        self.result(key, fmt_g(x, 17));
    }

    fn tol(&mut self, key: &'static str, x: f64) {
        self.tolerances.push((key, fmt_g(x, 17)));
    }

    fn artifact(&mut self, name: &'static str, contents: String) {
        self.artifacts.push(Artifact { name, contents });
    }

    fn evolver_tolerances(&mut self) {
        self.tol("line_search_initial_step", ekt_evolver::INITIAL_STEP);
        self.tol("line_search_min_step", ekt_evolver::MIN_STEP);
        self.tol("stationary_gradient", ekt_evolver::STATIONARY_GRADIENT);
        self.tol("facet_area_floor", ekt_mesh::FACET_FLOOR);
        self.tol("constraint_tol", ekt_mesh::CONSTRAINT_TOL);
    }

    fn mesh_artifacts(&mut self, report: &EvolveReport) {
        self.artifact("mesh.off", to_off(&report.mesh));
        self.artifact("mesh.obj", to_obj(&report.mesh));
        self.artifact("area_trace.csv", report.trace_csv());
        self.result("vertices", report.mesh.num_vertices());
        self.result("facets", report.mesh.num_facets());
        self.result("gradient_steps", report.gradient_steps());
        self.real("initial_area", report.initial_area());
        self.real("final_area", report.final_area());
        self.result("area_decreasing", report.gradient_steps_decrease());
        self.result("mesh_valid", report.mesh_valid());
    }
}

/// Inputs built from the settings before anything is written.
pub enum Prepared {
    /// Starting mesh of an evolve run.
    Mesh(TriMesh),
    /// Surface to sample.
    Surface(ParametricSurface),
    /// Nothing to prepare beyond the settings.
    Nothing,
}

/// Builds the inputs of the experiment: reads and validates datafiles,
/// constructs surfaces and checks parameter domains.
pub fn prepare(settings: &Settings, config_dir: &Path) -> Result<Prepared, CliError> {
    Ok(match &settings.experiment {
        Experiment::Sphere(s) => Prepared::Mesh(sphere_mesh(s, config_dir)?),
        Experiment::Genus(g) => Prepared::Mesh(genus_piece(g.g, g.h)?),
        Experiment::Oracle(o) => Prepared::Surface(oracle_surface(o)?),
        Experiment::Trace(t) => {
            DelaunayContour::new(t.kappa, t.h, t.lambda, t.n)?;
            Prepared::Nothing
        }
        Experiment::Periods(p) => {
            ell0_bounds(p.kappa, p.h)?;
            DelaunayContour::new(p.kappa, p.h, p.lo, p.n)?;
            DelaunayContour::new(p.kappa, p.h, p.hi, p.n)?;
            Prepared::Nothing
        }
    })
}

/// Runs the experiment on prepared inputs.
pub fn execute(settings: &Settings, prepared: Prepared) -> Result<Outcome, CliError> {
    match (&settings.experiment, prepared) {
        (Experiment::Sphere(s), Prepared::Mesh(m)) => run_sphere(s, m),
        (Experiment::Genus(g), Prepared::Mesh(m)) => run_genus(g, m),
        (Experiment::Oracle(o), Prepared::Surface(s)) => run_oracle(o, &s, settings.seed, settings.workers),
        (Experiment::Trace(t), _) => run_trace(t),
        (Experiment::Periods(p), _) => run_periods(p),
        _ => unreachable!("prepare matches the experiment"),
    }
}

fn sphere_mesh(s: &SphereSpec, config_dir: &Path) -> Result<TriMesh, CliError> {
    match &s.input {
        Some(p) => {
            let path = config_dir.join(p);
            let text = std::fs::read_to_string(&path)
                .map_err(|e| CliError::Validation(format!("cannot read input {}: {e}", p.display())))?;
            Ok(parse_datafile(&text)?)
        }
        None => {
            let mut m = parse_datafile(UNIT_CUBE)?;
            let r = s.radius;
            m.map_coordinates(|x| x * r);
            Ok(m)
        }
    }
}

/// Runs a schedule, turning a stall with a partial report into a result.
fn evolve_keeping_stall(
    mesh: TriMesh,
    schedule: &ekt_evolver::EvolveSchedule,
) -> Result<(EvolveReport, Option<String>), CliError> {
    match evolve(mesh, schedule) {
        Ok(r) => Ok((r, None)),
        Err(EvolveError::Stall { message, report: Some(r) }) => Ok((*r, Some(message))),
        Err(e) => Err(e.into()),
    }
}

fn run_sphere(s: &SphereSpec, mesh: TriMesh) -> Result<Outcome, CliError> {
    let mut out = Outcome::default();
    out.evolver_tolerances();
    out.tol("sphere_relative_area_tol", SPHERE_AREA_TOL);
    let (report, stall) = evolve_keeping_stall(mesh, &s.schedule)?;
    out.mesh_artifacts(&report);
    let target = 4.0 * PI;
    let rel = (report.final_area() - target).abs() / target;
    out.real("target_area", target);
    out.real("relative_area_error", rel);
    out.result("area_within_tol", rel < SPHERE_AREA_TOL);
    match euclidean_diagnostics(&report.mesh) {
        Ok(d) => {
            out.real("euclidean_volume", d.volume);
            out.real("implied_radius", d.implied_radius);
            out.real("mean_curvature_avg", d.mean_curvature_avg);
        }
        Err(e) => out.result("euclidean_volume", format!("unavailable ({e})")),
    }
    out.stall = stall;
    Ok(out)
}

fn run_genus(g: &GenusSpec, mesh: TriMesh) -> Result<Outcome, CliError> {
    let mut out = Outcome::default();
    out.evolver_tolerances();
    let (report, stall) = evolve_keeping_stall(mesh, &g.schedule)?;
    out.mesh_artifacts(&report);
    let (lo, hi) = radial_range(&report.mesh);
    let outer = g.h.exp();
    out.real("shell_inner", 1.0);
    out.real("shell_outer", outer);
    out.real("min_radius", lo);
    out.real("max_radius", hi);
    let tol = ekt_mesh::CONSTRAINT_TOL;
    out.result("inside_shell", lo >= 1.0 - tol && hi <= outer + tol);
    out.real("constraint_violation", report.mesh.constraint_violation());
    out.result("converged", stall.is_none());
    out.stall = stall;
    Ok(out)
}

fn oracle_surface(o: &OracleSpec) -> Result<ParametricSurface, CliError> {
    let p = SpaceParams::with_h(o.kappa, o.tau, o.h);
    let q = SpaceParams::new(o.kappa, o.tau);
    Ok(match o.family.as_str() {
        "S" => surface_s(p)?,
        "C" => surface_c(p)?,
        "P" => surface_p(p)?,
        "umbrella" => {
            let g = umbrella(q);
            g.surface("umbrella", g.default_rect().shrink(0.1), 0.0)
        }
        "invariant" => {
            let g = invariant_graph(q)?;
            g.surface("invariant", g.default_rect().shrink(0.1), 0.0)
        }
        "helicoid" => spherical_helicoid(o.c, q)?,
        "plane" => vertical_plane(q)?,
        "slice" => horizontal_slice(q)?,
        "cylinder" => vertical_circle_cylinder(q, o.cylinder_radius)?,
        "horocycle" => horocycle_cylinder(q)?,
        other => unreachable!("family {other} is validated"),
    })
}

/// Sample points: the `nu × nv` grid first, then `random` uniform points.
pub fn oracle_points(o: &OracleSpec, s: &ParametricSurface, seed: u64) -> Vec<(f64, f64)> {
    let rect = s.rect().shrink(ORACLE_MARGIN);
    let mut pts = Vec::with_capacity(o.nu * o.nv + o.random);
    for j in 0..o.nv {
        for i in 0..o.nu {
            pts.push(rect.lerp(i as f64 / (o.nu - 1) as f64, j as f64 / (o.nv - 1) as f64));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..o.random {
        let (a, b) = (rng.random_range(0.0..1.0), rng.random_range(0.0..1.0));
        pts.push(rect.lerp(a, b));
    }
    pts
}

type OracleRow = ([f64; 2], [f64; 3], f64);

fn oracle_row(s: &ParametricSurface, (u, v): (f64, f64)) -> Result<OracleRow, CliError> {
    let x = s.point(u, v)?;
    Ok(([u, v], [x.x, x.y, x.z], numeric_mean_curvature(s, u, v)?))
}

/// Evaluates the points on `workers` threads; rows come back in point order,
/// so the output does not depend on the number of workers.
fn oracle_rows(s: &ParametricSurface, pts: &[(f64, f64)], workers: usize) -> Result<Vec<OracleRow>, CliError> {
    let chunk = pts.len().div_ceil(workers.max(1)).max(1);
    std::thread::scope(|scope| {
        let handles: Vec<_> = pts
            .chunks(chunk)
            .map(|c| scope.spawn(move || c.iter().map(|&p| oracle_row(s, p)).collect::<Result<Vec<_>, _>>()))
            .collect();
        let mut rows = Vec::with_capacity(pts.len());
        for h in handles {
            rows.extend(h.join().expect("oracle worker panicked")?);
        }
        Ok(rows)
    })
}

fn run_oracle(o: &OracleSpec, s: &ParametricSurface, seed: u64, workers: usize) -> Result<Outcome, CliError> {
    let mut out = Outcome::default();
    out.tol("oracle_tol", ORACLE_TOL);
    out.tol("oracle_margin", ORACLE_MARGIN);
    out.tol("profile_quadrature_tol", ekt_surfaces::PROFILE_TOL);
    out.tol("profile_domain_clip", ekt_surfaces::DOMAIN_CLIP);
    let pts = oracle_points(o, s, seed);
    let rows = oracle_rows(s, &pts, workers)?;
    let expected = s.expected_mean_curvature();
    let mut csv = String::from("u,v,x,y,z,H_numeric\n");
    let mut worst: f64 = 0.0;
    for ([u, v], [x, y, z], h) in &rows {
        let _ = writeln!(
            csv,
            "{},{},{},{},{},{}",
            fmt_g(*u, 17),
            fmt_g(*v, 17),
            fmt_g(*x, 17),
            fmt_g(*y, 17),
            fmt_g(*z, 17),
            fmt_g(*h, 17)
        );
        worst = worst.max((h - expected).abs());
    }
    out.artifact("oracle.csv", csv);
    out.result("surface", s.name());
    out.result("samples", rows.len());
    out.real("expected_H", expected);
    out.real("max_abs_error", worst);
    out.result("within_tol", worst < ORACLE_TOL);
    Ok(out)
}

fn trace_tolerances(out: &mut Outcome) {
    out.evolver_tolerances();
    out.tol("geodesic_tol", ekt_diagnostics::GEODESIC_TOL);
    out.tol("max_angle_jump", ekt_diagnostics::MAX_ANGLE_JUMP);
}

/// Splits a Delaunay run failure into a stall (with its partial report) or
/// another error.
fn delaunay_failure(e: DiagnosticsError) -> Result<(EvolveReport, String), CliError> {
    match e {
        DiagnosticsError::Evolve(EvolveError::Stall { message, report: Some(r) }) => Ok((*r, message)),
        e => Err(e.into()),
    }
}

fn run_trace(t: &TraceSpec) -> Result<Outcome, CliError> {
    let mut out = Outcome::default();
    trace_tolerances(&mut out);
    let (lo, hi) = ell0_bounds(t.kappa, t.h)?;
    out.real("ell0_lower_bound", lo);
    out.real("ell0_upper_bound", hi);
    match evolve_delaunay_piece(t.kappa, t.h, t.lambda, t.n, &t.schedule) {
        Ok(run) => {
            out.mesh_artifacts(&run.report);
            out.artifact("trace.csv", run.trace.to_csv());
            out.result("trace_samples", run.trace.len());
            out.real("trace_length", run.trace.length());
            out.real("ell0", run.ell0);
            out.real("mu0", run.mu0);
            out.result("ell0_inside_bounds", lo < run.ell0 && run.ell0 < hi);
        }
        Err(e) => {
            let (report, message) = delaunay_failure(e)?;
            out.mesh_artifacts(&report);
            out.stall = Some(message);
        }
    }
    Ok(out)
}

fn run_periods(p: &PeriodsSpec) -> Result<Outcome, CliError> {
    let mut out = Outcome::default();
    trace_tolerances(&mut out);
    out.tol("bisection_tol", p.tol);
    let mut evaluations = String::from("lambda,ell0,residual\n");
    let mut partial: Option<EvolveReport> = None;
    let solution = solve_period(PeriodProblem {
        residual: |lambda: f64| match evolve_delaunay_piece(p.kappa, p.h, lambda, p.n, &p.schedule) {
            Ok(run) => {
                let r = run.ell0 - p.target;
                let _ = writeln!(evaluations, "{},{},{}", fmt_g(lambda, 17), fmt_g(run.ell0, 17), fmt_g(r, 17));
                Ok(r)
            }
            Err(DiagnosticsError::Evolve(EvolveError::Stall { message, report })) => {
                partial = report.map(|r| *r);
                Err(EvolveError::Stall { message: format!("at lambda = {}: {message}", fmt_g(lambda, 17)), report: None }.into())
            }
            Err(e) => Err(e),
        },
        lo: p.lo,
        hi: p.hi,
        tol: p.tol,
    });
    out.real("target", p.target);
    match solution {
        Ok(sol) => {
            out.artifact("periods.txt", sol.report());
            out.real("root", sol.root);
            out.result("iterations", sol.iterations());
            match evolve_delaunay_piece(p.kappa, p.h, sol.root, p.n, &p.schedule) {
                Ok(run) => {
                    out.mesh_artifacts(&run.report);
                    out.artifact("trace.csv", run.trace.to_csv());
                    out.real("ell0_at_root", run.ell0);
                    out.real("mu0_at_root", run.mu0);
                }
                Err(e) => {
                    let (report, message) = delaunay_failure(e)?;
                    out.mesh_artifacts(&report);
                    out.stall = Some(message);
                }
            }
        }
        Err(e) if e.kind() == "StallError" => {
            if let Some(report) = &partial {
                out.mesh_artifacts(report);
            }
            out.stall = Some(e.to_string());
        }
        Err(e) => return Err(e.into()),
    }
    out.artifact("evaluations.csv", evaluations);
    Ok(out)
}
