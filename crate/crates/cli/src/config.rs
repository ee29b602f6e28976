//! Run configuration files.
//!
//! # Grammar
//!
//! A config file is UTF-8 text, read line by line:
//!
//! ```text
//! file     := line*
//! line     := blank | comment | section | pairs
//! comment  := '#' <anything to end of line>
//! section  := '[' name ']' [comment]
//! pairs    := pair (ws+ pair)* [ws* comment]
//! pair     := key '=' value
//! key      := [A-Za-z_][A-Za-z0-9_]*
//! name     := key
//! value    := bare | quoted
//! bare     := one or more characters other than whitespace, '#', '"' and '='
//! quoted   := '"' (any character but '"' and '\' | '\"' | '\\')* '"'
//! ```
//!
//! Several pairs may share a line (`experiment=sphere depth=3 steps=100`).
//! Quote values that contain spaces (`schedule="R R R V U G100"`).
//! No whitespace is allowed around `=`.
//!
//! A `[section]` header groups the keys after it.  Every key belongs to one
//! section (see [`crate::settings`]).  A key may be written before the first
//! header or under its own section, but nowhere else.  Unknown sections,
//! unknown keys and repeated keys are errors.

use crate::error::CliError;

/// One `key=value` occurrence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Entry {
    /// Section header in force, `None` before the first header.
    pub section: Option<String>,
    /// Key name.
    pub key: String,
    /// Unquoted value.
    pub value: String,
    /// 1-based line number.
    pub line: usize,
}

/// A syntactically valid config file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawConfig {
    /// The file as read, for the report echo.
    pub text: String,
    /// Entries in file order.
    pub entries: Vec<Entry>,
}

fn is_key(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_') && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

fn syntax(line: usize, msg: impl std::fmt::Display) -> CliError {
    CliError::Config(format!("line {line}: {msg}"))
}

/// Parses config text.  Only syntax is checked here; keys and values are
/// validated by [`crate::settings::Settings::from_raw`].
pub fn parse_config(text: &str) -> Result<RawConfig, CliError> {
    let mut entries = Vec::new();
    let mut section = None;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        if let Some(rest) = trimmed.strip_prefix('[') {
            let (name, tail) = rest.split_once(']').ok_or_else(|| syntax(line, "unterminated section header"))?;
            let tail = tail.trim_start();
            if !(tail.is_empty() || tail.starts_with('#')) {
                return Err(syntax(line, "unexpected text after section header"));
            }
            let name = name.trim();
            if !is_key(name) {
                return Err(syntax(line, format!("invalid section name {name:?}")));
            }
            section = Some(name.to_string());
            continue;
        }
        let mut rest = trimmed;
        loop {
            rest = rest.trim_start();
            if rest.is_empty() || rest.starts_with('#') {
                break;
            }
            let (key, after) = rest.split_once('=').ok_or_else(|| syntax(line, format!("expected key=value, found {rest:?}")))?;
            if !is_key(key) {
                return Err(syntax(line, format!("invalid key {key:?}")));
            }
            let (value, tail) = if let Some(q) = after.strip_prefix('"') {
                let mut value = String::new();
                let mut chars = q.char_indices();
                let end = loop {
                    match chars.next() {
                        Some((i, '"')) => break i + 1,
                        Some((_, '\\')) => match chars.next() {
                            Some((_, c @ ('"' | '\\'))) => value.push(c),
                            _ => return Err(syntax(line, "invalid escape in quoted value")),
                        },
                        Some((_, c)) => value.push(c),
                        None => return Err(syntax(line, "unterminated quoted value")),
                    }
                };
                (value, &q[end..])
            } else {
                let end = after.find(|c: char| c.is_whitespace() || c == '#').unwrap_or(after.len());
                let value = &after[..end];
                if value.is_empty() {
                    return Err(syntax(line, format!("missing value for {key:?}")));
                }
                if value.contains(['"', '=']) {
                    return Err(syntax(line, format!("invalid character in value {value:?}")));
                }
                (value.to_string(), &after[end..])
            };
            if !(tail.is_empty() || tail.starts_with(char::is_whitespace) || tail.starts_with('#')) {
                return Err(syntax(line, "values must be separated by whitespace"));
            }
            entries.push(Entry { section: section.clone(), key: key.to_string(), value, line });
            rest = tail;
        }
    }
    Ok(RawConfig { text: text.to_string(), entries })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pairs(c: &RawConfig) -> Vec<(Option<&str>, &str, &str)> {
        c.entries.iter().map(|e| (e.section.as_deref(), e.key.as_str(), e.value.as_str())).collect()
    }

    #[test]
    fn several_pairs_per_line() {
        let c = parse_config("experiment=sphere depth=3 steps=100\n").unwrap();
        assert_eq!(pairs(&c), vec![(None, "experiment", "sphere"), (None, "depth", "3"), (None, "steps", "100")]);
    }

    #[test]
    fn sections_comments_and_quotes() {
        let text =
            "# run\nexperiment=trace  # trailing\n\n[evolve]\nschedule=\"G50 V \\\"U\\\"\" steps=4\n[chart] # c\nkappa=-1\n";
        let c = parse_config(text).unwrap();
        assert_eq!(
            pairs(&c),
            vec![
                (None, "experiment", "trace"),
                (Some("evolve"), "schedule", "G50 V \"U\""),
                (Some("evolve"), "steps", "4"),
                (Some("chart"), "kappa", "-1"),
            ]
        );
        assert_eq!(c.entries[3].line, 7);
        assert_eq!(c.text, text);
    }

    #[test]
    fn syntax_errors_name_the_line() {
        for (text, line) in [
            ("a=1\nb\n", 2),
            ("a = 1\n", 1),
            ("a=\n", 1),
            ("[sec\n", 1),
            ("[1x]\n", 1),
            ("[s] x\n", 1),
            ("a=\"open\n", 1),
            ("a=\"x\"b=2\n", 1),
            ("a=\"\\n\"\n", 1),
            ("a=b=c\n", 1),
            ("9a=1\n", 1),
        ] {
            let e = parse_config(text).unwrap_err();
            assert_eq!(e.kind(), "ConfigError");
            assert!(e.to_string().contains(&format!("line {line}:")), "{text:?}: {e}");
        }
    }
}
