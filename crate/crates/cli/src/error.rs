//! Errors of a run and their exit codes.

use thiserror::Error;

/// Failure of a run.
#[derive(Debug, Error)]
pub enum CliError {
    /// Malformed config file.
    #[error("{0}")]
    Config(String),
    /// Well-formed config with an unknown, repeated, misplaced or invalid key.
    #[error("{0}")]
    Validation(String),
    /// File system failure.
    #[error("{0}")]
    Io(String),
    /// Failure reported by a library crate.  A line-search stall is
    /// reported here when no partial result could be kept.
    #[error("{detail}")]
    Library {
        /// Stable kind of the library error, such as `GeometryError`.
        kind: &'static str,
        /// Human-readable detail.
        detail: String,
    },
}

impl CliError {
    /// Stable identifier printed after `kind=`.
    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Config(_) => "ConfigError",
            CliError::Validation(_) => "ValidationError",
            CliError::Io(_) => "IoError",
            CliError::Library { kind, .. } => kind,
        }
    }

    /// Process exit code: 2 for a line-search stall, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        if self.kind() == "StallError" {
            2
        } else {
            1
        }
    }

    /// The one-line `ERROR kind=… detail=…` diagnostic.
    pub fn diagnostic(&self) -> String {
        error_line(self.kind(), &self.to_string())
    }
}

/// Formats `ERROR kind=<kind> detail=<detail>` on one line.
pub fn error_line(kind: &str, detail: &str) -> String {
    let detail: String = detail.split_whitespace().collect::<Vec<_>>().join(" ");
    format!("ERROR kind={kind} detail={detail}")
}

macro_rules! library_error {
    ($($t:ty),*) => {$(
        impl From<$t> for CliError {
            fn from(e: $t) -> Self {
                CliError::Library { kind: e.kind(), detail: e.to_string() }
            }
        }
    )*};
}

library_error!(
    ekt_geometry::GeometryError,
    ekt_surfaces::SurfaceError,
    ekt_mesh::MeshError,
    ekt_evolver::EvolveError,
    ekt_diagnostics::DiagnosticsError
);

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagnostic_is_one_line() {
        let e = CliError::Validation("bad\nvalue  for\tkey".into());
        assert_eq!(e.diagnostic(), "ERROR kind=ValidationError detail=bad value for key");
        assert_eq!(e.exit_code(), 1);
    }

    #[test]
    fn stalls_exit_with_two() {
        let e: CliError = ekt_evolver::EvolveError::Stall { message: "m".into(), report: None }.into();
        assert_eq!((e.kind(), e.exit_code()), ("StallError", 2));
    }
}
