//! Flat `key = value` run manifests.
//!
//! Every artifact-producing run writes one, recording the subcommand,
//! tool version, and the full flag set in rerunnable form. `rerun_args`
//! reconstructs an argv that reproduces the run byte for byte (given
//! the same input files), which is also how the reproducibility tests
//! exercise the tool.

use std::fmt::Display;
use std::io;
use std::path::Path;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunManifest {
    entries: Vec<(String, String)>,
}

impl RunManifest {
    pub fn new(cmd: &str) -> Self {
        Self {
            entries: vec![
                ("cmd".into(), cmd.into()),
                ("version".into(), env!("CARGO_PKG_VERSION").into()),
            ],
        }
    }

    /// Record a valued flag (`--name value`).
    pub fn flag(&mut self, name: &str, value: impl Display) {
        self.entries.push((format!("flag.{name}"), value.to_string()));
    }

    /// Record a boolean switch (`--name`), present or not.
    pub fn switch(&mut self, name: &str, on: bool) {
        self.entries
            .push((format!("switch.{name}"), if on { "on" } else { "off" }.into()));
    }

    /// Record an output artifact path.
    pub fn output(&mut self, kind: &str, path: &Path) {
        self.entries
            .push((format!("out.{kind}"), path.display().to_string()));
    }

    /// Record a free-form informational entry.
    pub fn note(&mut self, key: &str, value: impl Display) {
        self.entries.push((format!("note.{key}"), value.to_string()));
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    pub fn entries(&self) -> &[(String, String)] {
        &self.entries
    }

    /// Rebuild the subcommand argv this manifest records: the command
    /// name, then `--name value` per flag and `--name` per switch that
    /// was on, in recorded order.
    pub fn rerun_args(&self) -> Vec<String> {
        let mut args = Vec::new();
        for (k, v) in &self.entries {
            if k == "cmd" {
                args.push(v.clone());
            } else if let Some(name) = k.strip_prefix("flag.") {
                args.push(format!("--{name}"));
                args.push(v.clone());
            } else if let Some(name) = k.strip_prefix("switch.") {
                if v == "on" {
                    args.push(format!("--{name}"));
                }
            }
        }
        args
    }

    pub fn write(&self, path: &Path) -> io::Result<()> {
        let mut text = String::new();
        for (k, v) in &self.entries {
            text.push_str(k);
            text.push_str(" = ");
            text.push_str(v);
            text.push('\n');
        }
        std::fs::write(path, text)
    }

    pub fn read(path: &Path) -> io::Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let mut entries = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let Some((k, v)) = line.split_once(" = ") else {
                return Err(io::Error::new(
                    io::ErrorKind::InvalidData,
                    format!("{}:{}: expected 'key = value'", path.display(), lineno + 1),
                ));
            };
            entries.push((k.to_string(), v.to_string()));
        }
        Ok(Self { entries })
    }
}

/// Manifest path convention for a single-file artifact.
pub fn manifest_path_for(out: &Path) -> std::path::PathBuf {
    let mut name = out
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| "out".into());
    name.push_str(".manifest.txt");
    out.with_file_name(name)
}
