//! Result files: `manifest.json`, `result.json` and CSV plot data.
//!
//! `result.json` and the CSV files depend only on the resolved config, so a
//! re-run reproduces them byte for byte. Wall time lives in the manifest.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::Value;

use diskfield::statistics::Check;

use crate::config::ExperimentConfig;
use crate::CliError;

/// A CSV table. Floats use shortest round-trip formatting, so numbers survive
/// a parse unchanged.
pub struct Csv {
    pub name: String,
    header: Vec<&'static str>,
    rows: Vec<String>,
}

impl Csv {
    pub fn new(name: impl Into<String>, header: &[&'static str]) -> Self {
        Csv { name: name.into(), header: header.to_vec(), rows: Vec::new() }
    }

    pub fn row(&mut self, cells: &[Cell]) {
        debug_assert_eq!(cells.len(), self.header.len());
        let line: Vec<String> = cells.iter().map(Cell::render).collect();
        self.rows.push(line.join(","));
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    fn render(&self, config_line: &str) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "# config: {config_line}");
        let _ = writeln!(s, "{}", self.header.join(","));
        for r in &self.rows {
            let _ = writeln!(s, "{r}");
        }
        s
    }
}

pub enum Cell {
    Int(i64),
    Float(f64),
    Text(String),
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Float(v) if v.is_finite() => format!("{v:?}"),
            Cell::Float(v) => if v.is_nan() { "nan" } else if *v > 0.0 { "inf" } else { "-inf" }.to_string(),
            // Labels are generated internally; quoting covers the commas in
            // index names such as `(1,2)`.
            Cell::Text(t) => format!("\"{}\"", t.replace('"', "\"\"")),
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<u32> for Cell {
    fn from(v: u32) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<i32> for Cell {
    fn from(v: i32) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

/// Builds a `&[Cell]` from heterogeneous values.
#[macro_export]
macro_rules! cells {
    ($($v:expr),* $(,)?) => { &[$($crate::output::Cell::from($v)),*] };
}

/// Everything an experiment produces.
pub struct Outcome {
    pub result: Value,
    pub checks: Vec<Check>,
    pub tables: Vec<Csv>,
}

impl Outcome {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

#[derive(Serialize)]
struct ResultFile<'a> {
    experiment: &'a str,
    seed: u64,
    config: &'a ExperimentConfig,
    passed: bool,
    checks: &'a [Check],
    result: &'a Value,
}

#[derive(Serialize)]
struct Manifest<'a> {
    experiment: &'a str,
    version: &'a str,
    seed: u64,
    config: &'a ExperimentConfig,
    workers: usize,
    wall_time_s: f64,
    passed: bool,
    files: Vec<String>,
}

/// Writes all files and returns their paths, manifest last.
pub fn write_all(config: &ExperimentConfig, outcome: &Outcome, wall_time_s: f64) -> Result<Vec<PathBuf>, CliError> {
    let dir = &config.out;
    fs::create_dir_all(dir).map_err(|e| io_error(dir, e))?;
    let config_line = serde_json::to_string(config)?;
    let name = config.experiment.name();

    let mut written = Vec::new();
    let result = ResultFile {
        experiment: name,
        seed: config.seed,
        config,
        passed: outcome.passed(),
        checks: &outcome.checks,
        result: &outcome.result,
    };
    written.push(write(dir, "result.json", serde_json::to_string_pretty(&result)? + "\n")?);
    for table in &outcome.tables {
        written.push(write(dir, &format!("{}.csv", table.name), table.render(&config_line))?);
    }

    let manifest = Manifest {
        experiment: name,
        version: env!("CARGO_PKG_VERSION"),
        seed: config.seed,
        config,
        workers: rayon::current_num_threads(),
        wall_time_s,
        passed: outcome.passed(),
        files: written.iter().filter_map(|p| p.file_name()).map(|f| f.to_string_lossy().into_owned()).collect(),
    };
    written.push(write(dir, "manifest.json", serde_json::to_string_pretty(&manifest)? + "\n")?);
    Ok(written)
}

fn write(dir: &Path, file: &str, contents: String) -> Result<PathBuf, CliError> {
    let path = dir.join(file);
    fs::write(&path, contents).map_err(|e| io_error(&path, e))?;
    Ok(path)
}

fn io_error(path: &Path, e: std::io::Error) -> CliError {
    CliError::Io(format!("{}: {e}", path.display()))
}
