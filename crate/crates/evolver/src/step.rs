//! One gradient-descent step with a backtracking line search.

use ekt_geometry::Vector3;
use ekt_mesh::{TriMesh, FACET_FLOOR};

use crate::error::{EvolveError, Result};
use crate::gradient::area_gradient;

/// First trial step of a fresh line search.
pub const INITIAL_STEP: f64 = 1e-2;
/// The search gives up (stalls) once the trial step drops below this.
pub const MIN_STEP: f64 = 1e-14;
/// Projected gradients smaller than this (max norm over vertices) mark a
/// stationary mesh: the step is accepted without moving.
pub const STATIONARY_GRADIENT: f64 = 1e-12;

/// Line-search state carried between steps.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct LineSearch {
    /// Last accepted step (the next search starts from twice this value).
    pub last_step: Option<f64>,
}

impl LineSearch {
    fn first_trial(&self) -> f64 {
        self.last_step.map_or(INITIAL_STEP, |s| 2.0 * s)
    }
}

/// Outcome of an accepted step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepInfo {
    /// Area before the step.
    pub area_before: f64,
    /// Area after the step.
    pub area_after: f64,
    /// Accepted step length (multiplier of the negative gradient); 0 for a
    /// stationary mesh.
    pub step: f64,
    /// Largest coordinate displacement of a vertex.
    pub max_disp: f64,
}

/// Moves every vertex along the negative constrained area gradient,
/// re-projecting onto its constraints, with a step that starts at twice the
/// last accepted one (or [`INITIAL_STEP`]) and is halved until the area
/// strictly decreases, every facet stays above [`FACET_FLOOR`] and every
/// vertex stays in the chart.
///
/// Fails with [`EvolveError::Stall`] once the trial step falls below
/// [`MIN_STEP`]; the mesh is then unchanged.
pub fn gradient_step(m: &mut TriMesh, ls: &mut LineSearch) -> Result<StepInfo> {
    let area_before = m.area()?;
    let grad = area_gradient(m)?;
    let gmax = grad.iter().map(|g| g.norm()).fold(0.0, f64::max);
    if gmax < STATIONARY_GRADIENT {
        return Ok(StepInfo { area_before, area_after: area_before, step: 0.0, max_disp: 0.0 });
    }
    let start: Vec<Vector3<f64>> = m.vertices.iter().map(|v| v.x).collect();
    let mut t = ls.first_trial();
    while t >= MIN_STEP {
        for (i, g) in grad.iter().enumerate() {
            let trial = start[i] - g * t;
            m.vertices[i].x = m.project_point(i, &trial);
        }
        if let Some(area) = acceptable_area(m) {
            if area < area_before {
                let max_disp = m.vertices.iter().zip(&start).map(|(v, s)| (v.x - s).norm()).fold(0.0, f64::max);
                ls.last_step = Some(t);
                return Ok(StepInfo { area_before, area_after: area, step: t, max_disp });
            }
        }
        t /= 2.0;
    }
    for (v, s) in m.vertices.iter_mut().zip(&start) {
        v.x = *s;
    }
    Err(EvolveError::Stall {
        message: format!("no area decrease for steps down to {MIN_STEP:e} (area {area_before}, max |grad| {gmax:e})"),
        report: None,
    })
}

/// Total area when every vertex is in the chart and every facet is above
/// the floor.
fn acceptable_area(m: &TriMesh) -> Option<f64> {
    let areas = m.facet_areas().ok()?;
    if areas.iter().any(|a| !(*a > FACET_FLOOR)) {
        return None;
    }
    Some(ekt_mesh::pairwise_sum(&areas))
}
