//! Command schedules and their execution.

use std::fmt::Write as _;
use std::str::FromStr;

use ekt_mesh::{fmt_g, TriMesh};

use crate::error::{EvolveError, Result};
use crate::step::{gradient_step, LineSearch};

/// One schedule command.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Command {
    /// `n ≥ 1` gradient steps.
    Gradient(usize),
    /// 1-to-4 refinement.
    Refine,
    /// One vertex-averaging sweep.
    VertexAverage,
    /// Edge-flip equitriangulation.
    Equitriangulate,
    /// Removal of short edges and small facets.
    Cull {
        /// Edges shorter than this are collapsed.
        min_edge: f64,
        /// Facets smaller than this are repaired.
        min_area: f64,
    },
}

impl Command {
    /// Short label used in traces.
    pub fn label(&self) -> String {
        match self {
            Command::Gradient(n) => format!("G{n}"),
            Command::Refine => "R".into(),
            Command::VertexAverage => "V".into(),
            Command::Equitriangulate => "U".into(),
            Command::Cull { min_edge, min_area } => format!("K({},{})", fmt_g(*min_edge, 6), fmt_g(*min_area, 6)),
        }
    }
}

/// Early-stop rule: stop when the relative area decrease over the last
/// `window` gradient steps is below `rel_area_tol`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StopRule {
    /// Relative decrease threshold (> 0).
    pub rel_area_tol: f64,
    /// Number of consecutive gradient steps compared (≥ 1).
    pub window: usize,
}

/// A sequence of commands with an optional early-stop rule.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct EvolveSchedule {
    /// Commands, executed in order.
    pub commands: Vec<Command>,
    /// Early-stop rule.
    pub stop: Option<StopRule>,
}

impl EvolveSchedule {
    /// Checks `n ≥ 1`, positive thresholds and a positive window.
    pub fn validate(&self) -> Result<()> {
        for c in &self.commands {
            match *c {
                Command::Gradient(0) => return Err(EvolveError::Schedule("G needs at least one step".into())),
                Command::Cull { min_edge, min_area } if !(min_edge > 0.0 && min_area > 0.0) => {
                    return Err(EvolveError::Schedule("K thresholds must be positive".into()))
                }
                _ => {}
            }
        }
        if let Some(s) = self.stop {
            if !(s.rel_area_tol > 0.0) || s.window == 0 {
                return Err(EvolveError::Schedule("stop rule needs rel_area_tol > 0 and window ≥ 1".into()));
            }
        }
        Ok(())
    }

    /// The refinement-and-descent recipe used for the sphere experiment:
    /// three refinements, one averaging sweep, equitriangulation and 100
    /// gradient steps.
    pub fn sphere_recipe() -> Self {
        "R R R V U G100".parse().expect("static schedule")
    }
}

/// Parses whitespace- or semicolon-separated commands: `G<n>`, `R`, `V`, `U`,
/// `K(<min_edge>,<min_area>)`; case-insensitive.  A bare `G` means `G1`.
impl FromStr for EvolveSchedule {
    type Err = EvolveError;

    fn from_str(s: &str) -> Result<Self> {
        let mut commands = Vec::new();
        let bad = |t: &str| EvolveError::Schedule(format!("unknown command {t:?}"));
        let normalized = s.replace(", ", ",");
        for tok in normalized.split(|c: char| c.is_whitespace() || c == ';').filter(|t| !t.is_empty()) {
            let upper = tok.to_ascii_uppercase();
            let cmd = match upper.as_str() {
                "R" => Command::Refine,
                "V" => Command::VertexAverage,
                "U" => Command::Equitriangulate,
                "G" => Command::Gradient(1),
                t if t.starts_with('G') => Command::Gradient(t[1..].parse().map_err(|_| bad(tok))?),
                t if t.starts_with("K(") && t.ends_with(')') => {
                    let inner = &t[2..t.len() - 1];
                    let (a, b) = inner.split_once(',').ok_or_else(|| bad(tok))?;
                    let a: f64 = a.trim().parse().map_err(|_| bad(tok))?;
                    let b: f64 = b.trim().parse().map_err(|_| bad(tok))?;
                    Command::Cull { min_edge: a, min_area: b }
                }
                _ => return Err(bad(tok)),
            };
            commands.push(cmd);
        }
        let sched = EvolveSchedule { commands, stop: None };
        sched.validate()?;
        Ok(sched)
    }
}

/// One row of the area trace.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceRow {
    /// Row index (0 is the initial state).
    pub step: usize,
    /// Label of the command that produced the row.
    pub command: String,
    /// Whether the row is a gradient step.
    pub gradient: bool,
    /// Area after the command.
    pub area: f64,
    /// Accepted step (gradient rows), 0 otherwise.
    pub step_size: f64,
    /// Largest vertex displacement during the command.
    pub max_disp: f64,
}

/// Result of running a schedule.
#[derive(Debug, Clone, PartialEq)]
pub struct EvolveReport {
    /// Area trace, one row per gradient step or other command.
    pub trace: Vec<TraceRow>,
    /// Mesh at the end of the run (or at the stall).
    pub mesh: TriMesh,
    /// Whether the stop rule ended the run early.
    pub stopped_early: bool,
    /// Stall message when the run ended in a line-search stall.
    pub stall: Option<String>,
}

impl EvolveReport {
    /// Area after the last command.
    pub fn final_area(&self) -> f64 {
        self.trace.last().map_or(f64::NAN, |r| r.area)
    }

    /// Area before the first command.
    pub fn initial_area(&self) -> f64 {
        self.trace.first().map_or(f64::NAN, |r| r.area)
    }

    /// Whether every gradient row has an area strictly below the row before
    /// it (rows of stationary, zero-length steps excepted).
    pub fn gradient_steps_decrease(&self) -> bool {
        self.trace.windows(2).all(|w| !w[1].gradient || w[1].step_size == 0.0 || w[1].area < w[0].area)
    }

    /// Number of gradient rows.
    pub fn gradient_steps(&self) -> usize {
        self.trace.iter().filter(|r| r.gradient).count()
    }

    /// Whether the final mesh passes validation.
    pub fn mesh_valid(&self) -> bool {
        self.mesh.validate().is_ok()
    }

    /// The trace as CSV with header `step,area,step_size,max_disp`.
    pub fn trace_csv(&self) -> String {
        let mut out = String::from("step,area,step_size,max_disp\n");
        for r in &self.trace {
            let _ = writeln!(out, "{},{},{},{}", r.step, fmt_g(r.area, 17), fmt_g(r.step_size, 17), fmt_g(r.max_disp, 17));
        }
        out
    }
}

/// Runs `schedule` on `mesh`.  A stall aborts the run with
/// [`EvolveError::Stall`] carrying the partial report.
pub fn evolve(mesh: TriMesh, schedule: &EvolveSchedule) -> Result<EvolveReport> {
    schedule.validate()?;
    let initial = mesh.area()?;
    let mut report = EvolveReport {
        trace: vec![TraceRow { step: 0, command: "init".into(), gradient: false, area: initial, step_size: 0.0, max_disp: 0.0 }],
        mesh,
        stopped_early: false,
        stall: None,
    };
    let mut ls = LineSearch::default();
    let mut g_areas: Vec<f64> = vec![initial];
    'commands: for cmd in &schedule.commands {
        match *cmd {
            Command::Gradient(n) => {
                for _ in 0..n {
                    let info = match gradient_step(&mut report.mesh, &mut ls) {
                        Ok(info) => info,
                        Err(EvolveError::Stall { message, .. }) => {
                            report.stall = Some(message.clone());
                            return Err(EvolveError::Stall { message, report: Some(Box::new(report)) });
                        }
                        Err(e) => return Err(e),
                    };
                    push_row(&mut report, cmd, true, info.area_after, info.step, info.max_disp);
                    g_areas.push(info.area_after);
                    if let Some(stop) = schedule.stop {
                        if g_areas.len() > stop.window {
                            let old = g_areas[g_areas.len() - 1 - stop.window];
                            if (old - info.area_after) / old.abs() < stop.rel_area_tol {
                                report.stopped_early = true;
                                break 'commands;
                            }
                        }
                    }
                }
            }
            other => {
                let before: Vec<_> = report.mesh.vertices.iter().map(|v| v.x).collect();
                match other {
                    Command::Refine => report.mesh.refine()?,
                    Command::VertexAverage => {
                        report.mesh.vertex_average()?;
                    }
                    Command::Equitriangulate => {
                        report.mesh.equitriangulate()?;
                    }
                    Command::Cull { min_edge, min_area } => {
                        report.mesh.cull_degenerate(min_edge, min_area)?;
                    }
                    Command::Gradient(_) => unreachable!(),
                }
                let max_disp = if matches!(other, Command::VertexAverage) {
                    report.mesh.vertices.iter().zip(&before).map(|(v, b)| (v.x - b).norm()).fold(0.0, f64::max)
                } else {
                    0.0
                };
                let area = report.mesh.area()?;
                push_row(&mut report, cmd, false, area, 0.0, max_disp);
                g_areas.clear();
                g_areas.push(area);
            }
        }
    }
    Ok(report)
}

fn push_row(report: &mut EvolveReport, cmd: &Command, gradient: bool, area: f64, step_size: f64, max_disp: f64) {
    let step = report.trace.len();
    report.trace.push(TraceRow { step, command: cmd.label(), gradient, area, step_size, max_disp });
}
