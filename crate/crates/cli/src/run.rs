//! Running one config file: validate, compute, write artifacts and report.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::config::parse_config;
use crate::error::{error_line, CliError};
use crate::experiments::{execute, prepare, Outcome};
use crate::settings::Settings;

/// Name of the report written by every run.
pub const REPORT: &str = "report.txt";

/// What a finished run wrote.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunSummary {
    /// Output directory.
    pub output: PathBuf,
    /// Files written, report last.
    pub files: Vec<PathBuf>,
    /// Stall message when the run ended in a line-search stall.
    pub stall: Option<String>,
}

impl RunSummary {
    /// 0 for a complete run, 2 for a stalled one.
    pub fn exit_code(&self) -> i32 {
        if self.stall.is_some() {
            2
        } else {
            0
        }
    }

    /// The `ERROR kind=StallError …` line of a stalled run.
    pub fn diagnostic(&self) -> Option<String> {
        self.stall.as_deref().map(|m| error_line("StallError", m))
    }
}

/// Component versions listed in reports.
pub fn versions() -> String {
    [
        ("ekt-cli", env!("CARGO_PKG_VERSION")),
        ("ekt-geometry", ekt_geometry::VERSION),
        ("ekt-surfaces", ekt_surfaces::VERSION),
        ("ekt-mesh", ekt_mesh::VERSION),
        ("ekt-evolver", ekt_evolver::VERSION),
        ("ekt-diagnostics", ekt_diagnostics::VERSION),
    ]
    .iter()
    .map(|(n, v)| format!("{n} {v}"))
    .collect::<Vec<_>>()
    .join(", ")
}

/// Reads and validates a config file without running it.
pub fn load(config: &Path, output: Option<PathBuf>) -> Result<Settings, CliError> {
    let bytes = fs::read(config).map_err(|e| CliError::Io(format!("cannot read {}: {e}", config.display())))?;
    let text = String::from_utf8(bytes).map_err(|_| CliError::Config(format!("{} is not valid UTF-8", config.display())))?;
    Settings::from_raw(&parse_config(&text)?, output)
}

/// Renders `report.txt`.  The report holds no timestamps or paths other
/// than the configured output directory, so reruns reproduce it exactly.
pub fn render_report(settings: &Settings, outcome: &Outcome) -> String {
    let mut r = String::new();
    let status = if outcome.stall.is_some() { "stalled" } else { "ok" };
    let _ = writeln!(r, "ekt run report");
    let _ = writeln!(r, "experiment = {}", settings.experiment_name());
    let _ = writeln!(r, "status = {status}");
    let _ = writeln!(r, "versions = {}", versions());
    let _ = writeln!(r, "\n[config]");
    r.push_str(&settings.config_text);
    if !settings.config_text.ends_with('\n') {
        r.push('\n');
    }
    let _ = writeln!(r, "[end config]");
    let _ = writeln!(r, "\n[settings]");
    for s in &settings.effective {
        let _ = writeln!(r, "{} = {}  # {}", s.key, s.value, s.origin.label());
    }
    let _ = writeln!(r, "\n[tolerances]");
    for (k, v) in &outcome.tolerances {
        let _ = writeln!(r, "{k} = {v}");
    }
    let _ = writeln!(r, "\n[results]");
    for (k, v) in &outcome.results {
        let _ = writeln!(r, "{k} = {v}");
    }
    if let Some(m) = &outcome.stall {
        let _ = writeln!(r, "\n[stall]");
        let _ = writeln!(r, "message = {}", m.split_whitespace().collect::<Vec<_>>().join(" "));
    }
    let _ = writeln!(r, "\n[artifacts]");
    for a in &outcome.artifacts {
        let _ = writeln!(r, "{}", a.name);
    }
    let _ = writeln!(r, "{REPORT}");
    r
}

/// Runs `config`.  Config and validation errors return before anything is
/// written; other failures write nothing either.  A line-search stall
/// writes the partial artifacts and returns a summary with `stall` set.
/// Relative `input` paths are resolved against the config's directory.
pub fn run(config: &Path, output: Option<PathBuf>) -> Result<RunSummary, CliError> {
    let settings = load(config, output)?;
    let dir = config.parent().unwrap_or(Path::new("."));
    let prepared = prepare(&settings, dir)?;
    let outcome = execute(&settings, prepared)?;
    let report = render_report(&settings, &outcome);
    fs::create_dir_all(&settings.output)
        .map_err(|e| CliError::Io(format!("cannot create {}: {e}", settings.output.display())))?;
    let mut files = Vec::new();
    let contents = outcome.artifacts.iter().map(|a| (a.name, &a.contents)).chain([(REPORT, &report)]);
    for (name, text) in contents {
        let path = settings.output.join(name);
        fs::write(&path, text).map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))?;
        files.push(path);
    }
    Ok(RunSummary { output: settings.output, files, stall: outcome.stall })
}
