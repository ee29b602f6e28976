//! Typed, validated run settings.
//!
//! Keys, their sections and the experiments that use them:
//!
//! | key | section | experiments | default |
//! |-----|---------|-------------|---------|
//! | `experiment` | `run` | all | required |
//! | `seed` | `run` | all | `0` |
//! | `workers` | `run` | all | `1` |
//! | `output` | `run` | all | `out` |
//! | `kappa` | `chart` | oracle, trace, periods | `-1` (oracle), `1` |
//! | `tau` | `chart` | oracle | `0` |
//! | `H` | `chart` | oracle (`S`, `C`, `P`), trace, periods | `0` (oracle), `1` |
//! | `input` | `mesh` | sphere | built-in cube |
//! | `radius` | `mesh` | sphere | `1` |
//! | `g` | `mesh` | genus_piece | `3` |
//! | `h` | `mesh` | genus_piece | `0.7` |
//! | `depth` | `evolve` | sphere, genus_piece | `3` |
//! | `steps` | `evolve` | sphere | `100` |
//! | `schedule` | `evolve` | sphere, genus_piece, trace, periods | recipe of the experiment |
//! | `family` | `oracle` | oracle | required |
//! | `c` | `oracle` | oracle (`helicoid`) | `0.5` |
//! | `cylinder_radius` | `oracle` | oracle (`cylinder`) | `1` |
//! | `nu`, `nv` | `oracle` | oracle | `9` |
//! | `random` | `oracle` | oracle | `0` |
//! | `lambda` | `delaunay` | trace | `π/4` |
//! | `n` | `delaunay` | trace, periods | `16` |
//! | `lo`, `hi` | `periods` | periods | `0`, `1.2` |
//! | `tol` | `periods` | periods | `1e-3` |
//! | `target` | `periods` | periods | `1.3` |
//!
//! `schedule` cannot be combined with `depth` or `steps`, and `input`
//! cannot be combined with `radius`.

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};
use std::path::PathBuf;

use ekt_evolver::EvolveSchedule;

use crate::config::RawConfig;
use crate::error::CliError;

/// Every key with its section.
pub const KEYS: &[(&str, &str)] = &[
    ("experiment", "run"),
    ("seed", "run"),
    ("workers", "run"),
    ("output", "run"),
    ("kappa", "chart"),
    ("tau", "chart"),
    ("H", "chart"),
    ("input", "mesh"),
    ("radius", "mesh"),
    ("g", "mesh"),
    ("h", "mesh"),
    ("depth", "evolve"),
    ("steps", "evolve"),
    ("schedule", "evolve"),
    ("family", "oracle"),
    ("c", "oracle"),
    ("cylinder_radius", "oracle"),
    ("nu", "oracle"),
    ("nv", "oracle"),
    ("random", "oracle"),
    ("lambda", "delaunay"),
    ("n", "delaunay"),
    ("lo", "periods"),
    ("hi", "periods"),
    ("tol", "periods"),
    ("target", "periods"),
];

/// Experiment names accepted by `experiment=`.
pub const EXPERIMENTS: &[&str] = &["sphere", "genus_piece", "oracle", "trace", "periods"];

/// Surface families accepted by `family=`.
pub const FAMILIES: &[&str] = &["S", "C", "P", "umbrella", "invariant", "helicoid", "plane", "slice", "cylinder", "horocycle"];

/// Sphere experiment: refine a cube in `S² × R` and minimise area.
#[derive(Debug, Clone, PartialEq)]
pub struct SphereSpec {
    /// Datafile to start from instead of the built-in cube.
    pub input: Option<PathBuf>,
    /// Circumradius of the built-in cube.
    pub radius: f64,
    /// Commands to run.
    pub schedule: EvolveSchedule,
}

/// Genus experiment: the fundamental piece for genus `g` between the
/// slices `0` and `h`.
#[derive(Debug, Clone, PartialEq)]
pub struct GenusSpec {
    /// Genus (≥ 3).
    pub g: usize,
    /// Height of the slab (> 0).
    pub h: f64,
    /// Commands to run.
    pub schedule: EvolveSchedule,
}

/// Oracle experiment: sample a closed-form family and its numerical mean
/// curvature.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleSpec {
    /// One of [`FAMILIES`].
    pub family: String,
    /// Base curvature.
    pub kappa: f64,
    /// Bundle curvature.
    pub tau: f64,
    /// Mean curvature of the `S`, `C` and `P` families.
    pub h: f64,
    /// Helicoid parameter.
    pub c: f64,
    /// Radius of the vertical cylinder.
    pub cylinder_radius: f64,
    /// Grid size along `u` (≥ 2, or 0 with `random > 0`).
    pub nu: usize,
    /// Grid size along `v`.
    pub nv: usize,
    /// Additional random points.
    pub random: usize,
}

/// Trace experiment: evolve a Delaunay-type piece and trace its
/// horizontal boundary geodesic.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceSpec {
    /// Base curvature.
    pub kappa: f64,
    /// Mean curvature.
    pub h: f64,
    /// Angle parameter in `[0, π/2)`.
    pub lambda: f64,
    /// Subdivisions per side.
    pub n: usize,
    /// Commands to run.
    pub schedule: EvolveSchedule,
}

/// Periods experiment: bisect `λ` until the traced length `ℓ₀(λ)` equals
/// `target`.
#[derive(Debug, Clone, PartialEq)]
pub struct PeriodsSpec {
    /// Base curvature.
    pub kappa: f64,
    /// Mean curvature.
    pub h: f64,
    /// Subdivisions per side.
    pub n: usize,
    /// Bracket.
    pub lo: f64,
    /// Bracket.
    pub hi: f64,
    /// Bracket width at which bisection stops.
    pub tol: f64,
    /// Length to match.
    pub target: f64,
    /// Commands run for each residual evaluation.
    pub schedule: EvolveSchedule,
}

/// The validated experiment.
#[derive(Debug, Clone, PartialEq)]
pub enum Experiment {
    /// See [`SphereSpec`].
    Sphere(SphereSpec),
    /// See [`GenusSpec`].
    Genus(GenusSpec),
    /// See [`OracleSpec`].
    Oracle(OracleSpec),
    /// See [`TraceSpec`].
    Trace(TraceSpec),
    /// See [`PeriodsSpec`].
    Periods(PeriodsSpec),
}

/// Where an effective setting came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Origin {
    /// Given in the config file.
    Config,
    /// Default applied.
    Default,
    /// Overridden on the command line.
    CommandLine,
}

impl Origin {
    /// Label used in reports.
    pub fn label(self) -> &'static str {
        match self {
            Origin::Config => "config",
            Origin::Default => "default",
            Origin::CommandLine => "command line",
        }
    }
}

/// A key with the value in force.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Setting {
    /// Key name.
    pub key: &'static str,
    /// Canonical value text.
    pub value: String,
    /// Source of the value.
    pub origin: Origin,
}

/// Validated settings of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct Settings {
    /// What to run.
    pub experiment: Experiment,
    /// Seed of random sampling.
    pub seed: u64,
    /// Worker threads for parallel sampling.
    pub workers: usize,
    /// Output directory.
    pub output: PathBuf,
    /// Every key in force, in schema order.
    pub effective: Vec<Setting>,
    /// The config file as read.
    pub config_text: String,
}

/// Canonical text of a schedule: command labels separated by spaces.
pub fn schedule_text(s: &EvolveSchedule) -> String {
    s.commands.iter().map(|c| c.label()).collect::<Vec<_>>().join(" ")
}

struct Lookup {
    given: BTreeMap<&'static str, (String, usize)>,
    used: Vec<&'static str>,
    effective: Vec<Setting>,
}

fn invalid(msg: impl Into<String>) -> CliError {
    CliError::Validation(msg.into())
}

impl Lookup {
    fn raw(&mut self, key: &'static str) -> Option<(String, usize)> {
        self.used.push(key);
        self.given.get(key).cloned()
    }

    fn has(&self, key: &str) -> bool {
        self.given.contains_key(key)
    }

    fn record(&mut self, key: &'static str, value: String, origin: Origin) {
        self.effective.push(Setting { key, value, origin });
    }

    fn parsed<T, F>(&mut self, key: &'static str, default: Option<T>, parse: F, show: fn(&T) -> String) -> Result<T, CliError>
    where
        F: Fn(&str) -> Option<T>,
    {
        match self.raw(key) {
            Some((text, line)) => {
                let v = parse(&text).ok_or_else(|| invalid(format!("line {line}: invalid value {text:?} for {key}")))?;
                self.record(key, show(&v), Origin::Config);
                Ok(v)
            }
            None => {
                let v = default.ok_or_else(|| invalid(format!("missing required key {key}")))?;
                self.record(key, show(&v), Origin::Default);
                Ok(v)
            }
        }
    }

    fn float(&mut self, key: &'static str, default: f64) -> Result<f64, CliError> {
        self.parsed(key, Some(default), |s| s.parse::<f64>().ok().filter(|x| x.is_finite()), |x| x.to_string())
    }

    fn uint(&mut self, key: &'static str, default: usize) -> Result<usize, CliError> {
        self.parsed(key, Some(default), |s| s.parse::<usize>().ok(), |x| x.to_string())
    }

    fn check(&self, key: &str, ok: bool, what: &str) -> Result<(), CliError> {
        if ok {
            Ok(())
        } else {
            let line = self.given.get(key).map_or(String::new(), |(_, l)| format!("line {l}: "));
            Err(invalid(format!("{line}{key} {what}")))
        }
    }

    fn exclusive(&self, a: &str, b: &str) -> Result<(), CliError> {
        if self.has(a) && self.has(b) {
            return Err(invalid(format!("{a} cannot be combined with {b}")));
        }
        Ok(())
    }

    fn schedule(&mut self, default: impl FnOnce() -> EvolveSchedule) -> Result<EvolveSchedule, CliError> {
        match self.raw("schedule") {
            Some((text, line)) => {
                let s: EvolveSchedule = text.parse().map_err(|e| invalid(format!("line {line}: schedule {text:?}: {e}")))?;
                if s.commands.is_empty() {
                    return Err(invalid(format!("line {line}: schedule is empty")));
                }
                self.record("schedule", schedule_text(&s), Origin::Config);
                Ok(s)
            }
            None => {
                let s = default();
                self.record("schedule", schedule_text(&s), Origin::Default);
                Ok(s)
            }
        }
    }
}

fn sphere_schedule(depth: usize, steps: usize) -> EvolveSchedule {
    let text = format!("{} V U G{steps}", vec!["R"; depth].join(" "));
    text.parse().expect("generated schedule")
}

impl Settings {
    /// Validates every key of `raw`.  `output` overrides the `output` key.
    pub fn from_raw(raw: &RawConfig, output: Option<PathBuf>) -> Result<Settings, CliError> {
        let mut given = BTreeMap::new();
        for e in &raw.entries {
            let Some(&(key, home)) = KEYS.iter().find(|(k, _)| *k == e.key) else {
                return Err(invalid(format!("line {}: unknown key {:?}", e.line, e.key)));
            };
            if let Some(sec) = &e.section {
                if !KEYS.iter().any(|(_, s)| s == sec) {
                    return Err(invalid(format!("line {}: unknown section [{sec}]", e.line)));
                }
                if sec != home {
                    return Err(invalid(format!("line {}: key {key} belongs to section [{home}], not [{sec}]", e.line)));
                }
            }
            if let Some((_, first)) = given.insert(key, (e.value.clone(), e.line)) {
                return Err(invalid(format!("line {}: key {key} repeats line {first}", e.line)));
            }
        }
        let mut lk = Lookup { given, used: Vec::new(), effective: Vec::new() };

        let experiment =
            lk.parsed("experiment", None, |s| EXPERIMENTS.iter().find(|e| **e == s).map(|e| e.to_string()), |s| s.clone())?;
        let seed = lk.parsed("seed", Some(0u64), |s| s.parse().ok(), |x| x.to_string())?;
        let workers = lk.uint("workers", 1)?;
        lk.check("workers", workers >= 1, "must be at least 1")?;
        let output = match output {
            Some(p) => {
                lk.used.push("output");
                lk.record("output", p.display().to_string(), Origin::CommandLine);
                p
            }
            None => PathBuf::from(lk.parsed("output", Some("out".to_string()), |s| Some(s.to_string()), |s| s.clone())?),
        };

        let experiment = match experiment.as_str() {
            "sphere" => {
                lk.exclusive("input", "radius")?;
                lk.exclusive("schedule", "depth")?;
                lk.exclusive("schedule", "steps")?;
                let input = match lk.raw("input") {
                    Some((p, _)) => {
                        lk.record("input", p.clone(), Origin::Config);
                        Some(PathBuf::from(p))
                    }
                    None => None,
                };
                let radius = if input.is_none() {
                    let r = lk.float("radius", 1.0)?;
                    lk.check("radius", r > 0.0, "must be positive")?;
                    r
                } else {
                    1.0
                };
                let schedule = if lk.has("schedule") {
                    lk.schedule(EvolveSchedule::default)?
                } else {
                    let depth = lk.uint("depth", 3)?;
                    let steps = lk.uint("steps", 100)?;
                    lk.check("steps", steps >= 1, "must be at least 1")?;
                    lk.check("depth", depth <= 6, "must be at most 6")?;
                    sphere_schedule(depth, steps)
                };
                Experiment::Sphere(SphereSpec { input, radius, schedule })
            }
            "genus_piece" => {
                lk.exclusive("schedule", "depth")?;
                let g = lk.uint("g", 3)?;
                lk.check("g", g >= 3, "must be at least 3")?;
                let h = lk.float("h", 0.7)?;
                lk.check("h", h > 0.0, "must be positive")?;
                let schedule = if lk.has("schedule") {
                    lk.schedule(EvolveSchedule::default)?
                } else {
                    let depth = lk.uint("depth", 3)?;
                    lk.check("depth", (1..=6).contains(&depth), "must be between 1 and 6")?;
                    ekt_evolver::genus_schedule(depth)
                };
                Experiment::Genus(GenusSpec { g, h, schedule })
            }
            "oracle" => {
                let family =
                    lk.parsed("family", None, |s| FAMILIES.iter().find(|f| **f == s).map(|f| f.to_string()), |s| s.clone())?;
                let kappa = lk.float("kappa", -1.0)?;
                let tau = lk.float("tau", 0.0)?;
                // The other families fix their own mean curvature.
                let h = if matches!(family.as_str(), "S" | "C" | "P") { lk.float("H", 0.0)? } else { 0.0 };
                let c = if family == "helicoid" {
                    let c = lk.float("c", 0.5)?;
                    lk.check("c", c > 0.0, "must be positive")?;
                    c
                } else {
                    0.5
                };
                let cylinder_radius = if family == "cylinder" {
                    let r = lk.float("cylinder_radius", 1.0)?;
                    lk.check("cylinder_radius", r > 0.0, "must be positive")?;
                    r
                } else {
                    1.0
                };
                let nu = lk.uint("nu", 9)?;
                let nv = lk.uint("nv", 9)?;
                let random = lk.uint("random", 0)?;
                lk.check("nu", nu <= 10_000 && nv <= 10_000, "and nv must be at most 10000")?;
                lk.check("nu", (nu == 0) == (nv == 0), "and nv must both be zero or both positive")?;
                lk.check("nu", nu != 1 && nv != 1, "and nv must be 0 or at least 2")?;
                lk.check("random", nu > 0 || random > 0, "must be positive when the grid is empty")?;
                lk.check("random", random <= 1_000_000, "must be at most 1000000")?;
                Experiment::Oracle(OracleSpec { family, kappa, tau, h, c, cylinder_radius, nu, nv, random })
            }
            "trace" => {
                let kappa = lk.float("kappa", 1.0)?;
                let h = lk.float("H", 1.0)?;
                let lambda = lk.float("lambda", FRAC_PI_4)?;
                lk.check("lambda", (0.0..FRAC_PI_2).contains(&lambda), "must lie in [0, π/2)")?;
                let n = lk.uint("n", 16)?;
                lk.check("n", (2..=256).contains(&n), "must be between 2 and 256")?;
                let schedule = lk.schedule(ekt_diagnostics::delaunay_schedule)?;
                Experiment::Trace(TraceSpec { kappa, h, lambda, n, schedule })
            }
            "periods" => {
                let kappa = lk.float("kappa", 1.0)?;
                let h = lk.float("H", 1.0)?;
                let n = lk.uint("n", 16)?;
                lk.check("n", (2..=256).contains(&n), "must be between 2 and 256")?;
                let lo = lk.float("lo", 0.0)?;
                let hi = lk.float("hi", 1.2)?;
                lk.check("lo", 0.0 <= lo && lo < hi && hi < FRAC_PI_2, "and hi must satisfy 0 ≤ lo < hi < π/2")?;
                let tol = lk.float("tol", 1e-3)?;
                lk.check("tol", tol > 0.0 && tol < hi - lo, "must be positive and below hi − lo")?;
                let target = lk.float("target", 1.3)?;
                let schedule = lk.schedule(ekt_diagnostics::delaunay_schedule)?;
                Experiment::Periods(PeriodsSpec { kappa, h, n, lo, hi, tol, target, schedule })
            }
            _ => unreachable!("experiment names are validated"),
        };

        if let Some((key, (_, line))) = lk.given.iter().find(|(k, _)| !lk.used.contains(k)) {
            let name = EXPERIMENTS.iter().find(|e| experiment_name(&experiment) == **e).expect("known");
            return Err(invalid(format!("line {line}: key {key} is not used by experiment {name}")));
        }
        let order = |k: &str| KEYS.iter().position(|(n, _)| *n == k).unwrap_or(usize::MAX);
        lk.effective.sort_by_key(|s| order(s.key));
        Ok(Settings { experiment, seed, workers, output, effective: lk.effective, config_text: raw.text.clone() })
    }

    /// Name of the experiment as written in the config.
    pub fn experiment_name(&self) -> &'static str {
        experiment_name(&self.experiment)
    }
}

fn experiment_name(e: &Experiment) -> &'static str {
    match e {
        Experiment::Sphere(_) => "sphere",
        Experiment::Genus(_) => "genus_piece",
        Experiment::Oracle(_) => "oracle",
        Experiment::Trace(_) => "trace",
        Experiment::Periods(_) => "periods",
    }
}
