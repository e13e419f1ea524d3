//! Output directory, CSV files and run manifests.
//!
//! Floats are written with Rust's shortest round-trip formatting, so equal
//! bits give equal bytes.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::Value;

use crate::exit::Failure;

pub const ARTIFACT: &str = env!("CARGO_PKG_NAME");
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// One measured quantity with its threshold.
#[derive(Debug, Clone, Serialize)]
pub struct CheckRecord {
    pub module: String,
    pub check: String,
    pub measured: f64,
    /// `"<="` or `">="`.
    pub relation: &'static str,
    pub threshold: f64,
    pub passed: bool,
    #[serde(skip_serializing_if = "String::is_empty")]
    pub note: String,
}

impl CheckRecord {
    /// Passes when `measured <= threshold` (NaN fails).
    pub fn at_most(module: &str, check: &str, measured: f64, threshold: f64) -> Self {
        CheckRecord {
            module: module.into(),
            check: check.into(),
            measured,
            relation: "<=",
            threshold,
            passed: measured <= threshold,
            note: String::new(),
        }
    }

    /// Passes when `measured >= threshold` (NaN fails).
    pub fn at_least(module: &str, check: &str, measured: f64, threshold: f64) -> Self {
        CheckRecord {
            relation: ">=",
            passed: measured >= threshold,
            ..CheckRecord::at_most(module, check, measured, threshold)
        }
    }

    /// A check that could not be evaluated.
    pub fn errored(module: &str, check: &str, error: &str) -> Self {
        CheckRecord {
            passed: false,
            note: error.into(),
            ..CheckRecord::at_most(module, check, f64::NAN, f64::NAN)
        }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = note.into();
        self
    }
}

/// A file written by a command and what its numbers are.
#[derive(Debug, Clone, Serialize)]
pub struct Artifact {
    pub file: String,
    pub describes: String,
}

/// Everything a command reports besides its data files.
#[derive(Debug, Clone, Default, Serialize)]
pub struct Report {
    pub outputs: Vec<Artifact>,
    pub checks: Vec<CheckRecord>,
    pub summary: Value,
}

impl Report {
    pub fn failed_checks(&self) -> Vec<&CheckRecord> {
        self.checks.iter().filter(|c| !c.passed).collect()
    }
}

#[derive(Debug, Serialize)]
pub struct Manifest<'a> {
    pub artifact: &'static str,
    pub version: &'static str,
    pub command: &'a str,
    pub status: &'static str,
    pub exit_code: u8,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub config: Value,
    pub wall_time_s: f64,
    pub outputs: &'a [Artifact],
    pub checks: &'a [CheckRecord],
    pub summary: &'a Value,
}

pub struct OutDir {
    root: PathBuf,
}

impl OutDir {
    pub fn create(root: &Path) -> Result<Self, Failure> {
        fs::create_dir_all(root).map_err(|e| Failure::config(format!("cannot create output directory {}: {e}", root.display())))?;
        Ok(OutDir { root: root.to_path_buf() })
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.root.join(name)
    }

    /// Writes a file through a buffered writer and records it in `report`.
    pub fn write(
        &self,
        report: &mut Report,
        name: &str,
        describes: &str,
        body: impl FnOnce(&mut dyn Write) -> randattr::Result<()>,
    ) -> Result<(), Failure> {
        let path = self.path(name);
        let mut w = BufWriter::new(File::create(&path)?);
        body(&mut w)?;
        w.flush()?;
        report.outputs.push(Artifact {
            file: name.into(),
            describes: describes.into(),
        });
        Ok(())
    }

    pub fn write_manifest(&self, manifest: &Manifest<'_>) -> Result<(), Failure> {
        let text = serde_json::to_string_pretty(manifest).map_err(|e| Failure::config(e.to_string()))?;
        fs::write(self.path("manifest.json"), text + "\n")?;
        Ok(())
    }
}

/// The check table as CSV, `module,check,measured,relation,threshold,passed`.
pub fn write_checks_csv(w: &mut dyn Write, checks: &[CheckRecord]) -> randattr::Result<()> {
    writeln!(w, "module,check,measured,relation,threshold,passed")?;
    for c in checks {
        writeln!(w, "{},{},{},{},{},{}", c.module, c.check, c.measured, c.relation, c.threshold, c.passed)?;
    }
    Ok(())
}

/// Prints the check table to stdout.
pub fn print_checks(checks: &[CheckRecord]) {
    let width = checks.iter().map(|c| c.module.len() + c.check.len() + 1).max().unwrap_or(0);
    for c in checks {
        let name = format!("{}/{}", c.module, c.check);
        println!(
            "{} {name:<width$}  {:>12.4e} {} {:<10.3e}{}",
            if c.passed { "PASS" } else { "FAIL" },
            c.measured,
            c.relation,
            c.threshold,
            if c.note.is_empty() { String::new() } else { format!("  ({})", c.note) },
        );
    }
}
