//! Report envelopes, CSV framing and atomic file output.

use std::fmt;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;
use tempfile::NamedTempFile;

pub const TOOL: &str = "chansim";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub const EXIT_IO: u8 = 1;
pub const EXIT_VIOLATION: u8 = 2;
pub const EXIT_MALFORMED: u8 = 3;
pub const EXIT_FLOOR: u8 = 10;

/// Result of a command that produced its output.
#[derive(Debug)]
pub enum Status {
    Success,
    /// A no-go sweep found a row with a positive error floor.
    Floor,
    Violation(String),
}

/// Command that stopped before producing output.
#[derive(Debug)]
pub enum Failure {
    Malformed(String),
    Io(String),
}

impl Failure {
    pub fn code(&self) -> u8 {
        match self {
            Failure::Malformed(_) => EXIT_MALFORMED,
            Failure::Io(_) => EXIT_IO,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Malformed(m) => write!(f, "malformed input: {m}"),
            Failure::Io(m) => write!(f, "i/o: {m}"),
        }
    }
}

impl From<chansim::Error> for Failure {
    fn from(e: chansim::Error) -> Self {
        Failure::Malformed(e.to_string())
    }
}

#[derive(Serialize)]
struct Envelope<'a, C, R> {
    tool: &'static str,
    version: &'static str,
    command: &'a str,
    config: &'a C,
    result: &'a R,
}

/// Pretty JSON report wrapping `result` with the tool version and resolved config.
pub fn json_report<C: Serialize, R: Serialize>(command: &str, config: &C, result: &R) -> Result<Vec<u8>, Failure> {
    let env = Envelope { tool: TOOL, version: VERSION, command, config, result };
    let mut out = serde_json::to_vec_pretty(&env).map_err(|e| Failure::Io(e.to_string()))?;
    out.push(b'\n');
    Ok(out)
}

/// CSV with `#` header lines carrying the tool version and the resolved config as JSON.
pub fn csv_report<C: Serialize, R: Serialize>(command: &str, config: &C, rows: &[R]) -> Result<Vec<u8>, Failure> {
    let cfg = serde_json::to_string(config).map_err(|e| Failure::Io(e.to_string()))?;
    let mut out = format!("# {TOOL} {VERSION} {command}\n# config: {cfg}\n").into_bytes();
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r).map_err(|e| Failure::Io(e.to_string()))?;
    }
    out.extend(w.into_inner().map_err(|e| Failure::Io(e.to_string()))?);
    Ok(out)
}

/// Writes to `path` through a temporary file in the same directory, or to stdout.
pub fn emit(path: Option<&Path>, bytes: &[u8]) -> Result<(), Failure> {
    let Some(path) = path else {
        return io::stdout().write_all(bytes).map_err(|e| Failure::Io(e.to_string()));
    };
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let io_err = |e: io::Error| Failure::Io(format!("{}: {e}", path.display()));
    let mut tmp = NamedTempFile::new_in(dir).map_err(io_err)?;
    tmp.write_all(bytes).map_err(io_err)?;
    #[cfg(unix)]
    {
        use std::os::unix::fs::PermissionsExt;
        tmp.as_file().set_permissions(std::fs::Permissions::from_mode(0o644)).map_err(io_err)?;
    }
    tmp.as_file().sync_all().map_err(io_err)?;
    tmp.persist(path).map_err(|e| io_err(e.error))?;
    Ok(())
}

/// `dir/report.json` with tag `original` becomes `dir/report.original.json`.
pub fn sibling(path: &Path, tag: &str) -> PathBuf {
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    path.with_file_name(format!("{stem}.{tag}.json"))
}
