//! `hopfc`: reports, CSV sweeps and reproducibility manifests for the
//! `hopf-collapse` library.
//!
//! Exit codes: 0 success, 1 a property or statistical check failed,
//! 2 usage error.

pub mod args;
mod commands;
pub mod manifest;

use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;
use serde_json::ser::{CompactFormatter, Formatter, PrettyFormatter};

pub use args::{Cli, Command};
pub use manifest::RunManifest;

/// Report schema shipped with the repository.
pub const REPORT_SCHEMA: &str = include_str!("../../../schemas/report.schema.json");

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug)]
pub enum CliError {
    /// Bad arguments; exit code 2.
    Usage(String),
    /// I/O or other runtime failure; exit code 1.
    Runtime(anyhow::Error),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Runtime(e) => write!(f, "error: {e:#}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<hopf_collapse::Error> for CliError {
    fn from(e: hopf_collapse::Error) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Runtime(e.into())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Runtime(e.into())
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Runtime(_) => 1,
        }
    }
}

/// The product of one command: the exact bytes to emit and whether every
/// check it ran passed.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub body: String,
    pub passed: bool,
    /// Human-oriented notes for stderr (never part of `body`).
    pub warnings: Vec<String>,
}

impl RunOutput {
    pub fn exit_code(&self) -> i32 {
        if self.passed {
            0
        } else {
            1
        }
    }
}

/// Common JSON envelope around every report.
#[derive(Serialize)]
pub(crate) struct Envelope<'a, T: Serialize> {
    pub command: &'a str,
    pub version: &'a str,
    pub parameters: serde_json::Value,
    pub seed: Option<u64>,
    pub rng: Option<&'a str>,
    pub tolerance: f64,
    pub passed: bool,
    pub result: T,
}

/// Serializes with every float written as `{:.16e}` (17 significant digits).
pub fn to_json<T: Serialize>(value: &T, compact: bool) -> Result<String, CliError> {
    let mut buf = Vec::new();
    if compact {
        value.serialize(&mut serde_json::Serializer::with_formatter(&mut buf, Sig17(CompactFormatter)))?;
    } else {
        value.serialize(&mut serde_json::Serializer::with_formatter(&mut buf, Sig17(PrettyFormatter::new())))?;
    }
    buf.push(b'\n');
    String::from_utf8(buf).map_err(|e| CliError::Runtime(e.into()))
}

struct Sig17<F>(F);

impl<F: Formatter> Formatter for Sig17<F> {
    fn write_f64<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        if value.is_finite() {
            write!(w, "{value:.16e}")
        } else {
            w.write_all(b"null")
        }
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(w, f64::from(value))
    }

    fn begin_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_array(w)
    }

    fn end_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array(w)
    }

    fn begin_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_array_value(w, first)
    }

    fn end_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array_value(w)
    }

    fn begin_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object(w)
    }

    fn end_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object(w)
    }

    fn begin_object_key<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_object_key(w, first)
    }

    fn end_object_key<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object_key(w)
    }

    fn begin_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object_value(w)
    }

    fn end_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object_value(w)
    }
}

/// Runs the command and returns its output without touching the filesystem.
pub fn execute(cli: &Cli) -> Result<RunOutput, CliError> {
    commands::dispatch(cli)
}

/// `execute` plus file output and manifest handling, as the binary does it.
pub fn run(cli: &Cli) -> Result<RunOutput, CliError> {
    let started = Instant::now();
    let output = execute(cli)?;
    let elapsed = started.elapsed().as_secs_f64();

    match &cli.global.out {
        Some(path) => std::fs::write(path, &output.body)?,
        None => std::io::stdout().write_all(output.body.as_bytes())?,
    }

    if !matches!(cli.command, Command::Replay(_) | Command::Schema) {
        if let Some(path) = manifest_path(cli) {
            let manifest = RunManifest::new(cli, &output.body, elapsed);
            std::fs::write(&path, to_json(&manifest, false)?)?;
        }
    }
    Ok(output)
}

/// Explicit `--manifest`, else `<out>.manifest.json` when writing to a file.
pub fn manifest_path(cli: &Cli) -> Option<PathBuf> {
    cli.global.manifest.clone().or_else(|| {
        cli.global.out.as_ref().map(|p: &PathBuf| {
            let mut name = p.file_name().unwrap_or_default().to_os_string();
            name.push(".manifest.json");
            p.with_file_name(name)
        })
    })
}

pub fn read_manifest(path: &Path) -> Result<RunManifest, CliError> {
    let text = std::fs::read_to_string(path)?;
    serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}
