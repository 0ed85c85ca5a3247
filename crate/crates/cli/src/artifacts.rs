//! Run directory layout:
//!
//! * `config.json`: resolved configuration; feeding it back via `--config`
//!   reproduces the run.
//! * `results.json`, `results.csv`: the run's output.
//! * `manifest.json`: tool, version, command, seed, threads and a unix
//!   timestamp, the only non-reproducible field of the directory.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;

use crate::config::RunConfig;
use crate::error::CliError;

pub const CONFIG_FILE: &str = "config.json";
pub const RESULTS_JSON: &str = "results.json";
pub const RESULTS_CSV: &str = "results.csv";
pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Debug, Serialize)]
pub struct Manifest<'a> {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'a str,
    pub master_seed: Option<u64>,
    pub threads: usize,
    pub status: &'a str,
    pub files: Vec<&'static str>,
    pub timestamp_unix: u64,
}

/// An output directory that has been created.
pub struct RunDir {
    root: PathBuf,
    files: Vec<&'static str>,
}

impl RunDir {
    pub fn create(root: &Path) -> Result<Self, CliError> {
        fs::create_dir_all(root)?;
        Ok(RunDir {
            root: root.to_path_buf(),
            files: Vec::new(),
        })
    }

    pub fn write_json<T: Serialize + ?Sized>(&mut self, name: &'static str, value: &T) -> Result<(), CliError> {
        let mut w = BufWriter::new(File::create(self.root.join(name))?);
        serde_json::to_writer_pretty(&mut w, value)?;
        writeln!(w)?;
        w.flush()?;
        self.files.push(name);
        Ok(())
    }

    pub fn write_config(&mut self, config: &RunConfig) -> Result<(), CliError> {
        self.write_json(CONFIG_FILE, config)
    }

    /// CSV with a header row followed by `rows`.
    pub fn write_csv<R: Serialize>(&mut self, name: &'static str, rows: &[R]) -> Result<(), CliError> {
        let mut w = csv::Writer::from_path(self.root.join(name))?;
        for row in rows {
            w.serialize(row)?;
        }
        w.flush()?;
        self.files.push(name);
        Ok(())
    }

    /// Writer for files produced by library routines.
    pub fn raw_writer(&mut self, name: &'static str) -> Result<BufWriter<File>, CliError> {
        self.files.push(name);
        Ok(BufWriter::new(File::create(self.root.join(name))?))
    }

    pub fn finish(mut self, command: &str, seed: Option<u64>, threads: usize, status: &str) -> Result<(), CliError> {
        let timestamp_unix = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        let manifest = Manifest {
            tool: "fbm-ruin",
            version: env!("CARGO_PKG_VERSION"),
            command,
            master_seed: seed,
            threads,
            status,
            files: self.files.clone(),
            timestamp_unix,
        };
        self.write_json(MANIFEST_FILE, &manifest)
    }
}
