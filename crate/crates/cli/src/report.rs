//! Check records, JSON summaries and CSV tables.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::{CliError, CliResult, EXIT_CONDITION, EXIT_PASS};

/// Floats in reports: 17 significant digits.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    AtMost,
    AtLeast,
}

/// One numeric check against a tolerance.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub relation: Relation,
    pub tolerance: f64,
    pub passed: bool,
}

impl Check {
    pub fn at_most(name: impl Into<String>, value: f64, tolerance: f64) -> Self {
        Check {
            name: name.into(),
            value,
            relation: Relation::AtMost,
            tolerance,
            passed: value <= tolerance,
        }
    }

    pub fn at_least(name: impl Into<String>, value: f64, tolerance: f64) -> Self {
        Check {
            name: name.into(),
            value,
            relation: Relation::AtLeast,
            tolerance,
            passed: value >= tolerance,
        }
    }

    pub fn line(&self) -> String {
        let op = match self.relation {
            Relation::AtMost => "<=",
            Relation::AtLeast => ">=",
        };
        format!(
            "{} {}: {} {} {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            fmt_f64(self.value),
            op,
            fmt_f64(self.tolerance)
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    Error,
}

/// Everything a command produced; serialized as the JSON summary.
#[derive(Debug, Clone, Serialize)]
pub struct Summary {
    pub command: String,
    pub space: Option<String>,
    pub status: Status,
    pub exit_code: i32,
    pub checks: Vec<Check>,
    pub failures: Vec<String>,
    pub values: BTreeMap<String, f64>,
    /// Free-form structured payload (per-command).
    pub data: serde_json::Value,
    pub outputs: Vec<String>,
    #[serde(skip)]
    pub tables: Vec<(String, String)>,
}

impl Summary {
    pub fn new(command: &str, space: Option<String>) -> Self {
        Summary {
            command: command.into(),
            space,
            status: Status::Pass,
            exit_code: EXIT_PASS,
            checks: Vec::new(),
            failures: Vec::new(),
            values: BTreeMap::new(),
            data: serde_json::Value::Null,
            outputs: Vec::new(),
            tables: Vec::new(),
        }
    }

    pub fn check(&mut self, c: Check) {
        self.checks.push(c);
    }

    pub fn value(&mut self, name: &str, v: f64) {
        self.values.insert(name.into(), v);
    }

    pub fn table(&mut self, file: impl Into<String>, csv: String) {
        self.tables.push((file.into(), csv));
    }

    /// Sets status, exit code and failure list from the checks.
    pub fn finish(mut self) -> Self {
        self.failures = self.checks.iter().filter(|c| !c.passed).map(|c| c.name.clone()).collect();
        if self.failures.is_empty() {
            self.status = Status::Pass;
            self.exit_code = EXIT_PASS;
        } else {
            self.status = Status::Fail;
            self.exit_code = EXIT_CONDITION;
        }
        self
    }

    /// Summary of a run that stopped on an error.
    pub fn from_error(command: &str, space: Option<String>, err: &CliError) -> Self {
        let mut s = Summary::new(command, space);
        s.status = Status::Error;
        s.exit_code = err.exit_code();
        s.failures.push(err.to_string());
        s
    }

    /// Writes `<command>.json` and the CSV tables into `dir`; returns the paths.
    pub fn write(&mut self, dir: &Path) -> CliResult<Vec<PathBuf>> {
        std::fs::create_dir_all(dir).map_err(|source| CliError::Io {
            path: dir.to_path_buf(),
            source,
        })?;
        let mut paths = Vec::new();
        for (name, csv) in &self.tables {
            let path = dir.join(name);
            write_file(&path, csv)?;
            paths.push(path);
        }
        self.outputs = paths.iter().map(|p| p.display().to_string()).collect();
        let json_path = dir.join(format!("{}.json", self.command));
        let json = serde_json::to_string_pretty(&*self).map_err(|e| CliError::Config(e.to_string()))?;
        write_file(&json_path, &(json + "\n"))?;
        paths.push(json_path);
        Ok(paths)
    }

    /// Human-readable report for stdout.
    pub fn render(&self) -> String {
        let mut out = String::new();
        let _ = write!(out, "{}", self.command);
        if let Some(s) = &self.space {
            let _ = write!(out, " [{s}]");
        }
        out.push('\n');
        for (k, v) in &self.values {
            let _ = writeln!(out, "  {k} = {}", fmt_f64(*v));
        }
        for c in &self.checks {
            let _ = writeln!(out, "  {}", c.line());
        }
        let status = match self.status {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Error => "error",
        };
        let _ = writeln!(out, "status: {status} (exit {})", self.exit_code);
        for f in &self.failures {
            let _ = writeln!(out, "  failed: {f}");
        }
        out
    }
}

fn write_file(path: &Path, text: &str) -> CliResult<()> {
    std::fs::write(path, text).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// CSV with a header row; numbers use [`fmt_f64`].
pub struct CsvTable {
    text: String,
}

impl CsvTable {
    pub fn new(header: &[&str]) -> Self {
        CsvTable {
            text: header.join(",") + "\n",
        }
    }

    pub fn row(&mut self, cells: &[Cell]) {
        let parts: Vec<String> = cells.iter().map(Cell::render).collect();
        self.text.push_str(&parts.join(","));
        self.text.push('\n');
    }

    pub fn finish(self) -> String {
        self.text
    }
}

pub enum Cell {
    F(f64),
    I(i64),
    S(String),
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::F(x) => fmt_f64(*x),
            Cell::I(i) => i.to_string(),
            Cell::S(s) => s.clone(),
        }
    }
}
