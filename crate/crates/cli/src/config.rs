//! Loading of per-command TOML configs.

use std::fs;
use std::path::Path;

use serde::de::DeserializeOwned;

use crate::output::Failure;

/// Reads `path` into `T`, or returns `T::default()` when no file is given.
pub fn load<T: DeserializeOwned + Default>(path: Option<&Path>) -> Result<T, Failure> {
    let Some(path) = path else {
        return Ok(T::default());
    };
    let text = fs::read_to_string(path)
        .map_err(|e| Failure::Malformed(format!("cannot read config {}: {e}", path.display())))?;
    toml::from_str(&text).map_err(|e| Failure::Malformed(format!("config {}: {e}", path.display())))
}

/// Parses a JSON input file referenced from a config. Files written by this
/// tool carry their payload under `result` and are unwrapped.
pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, Failure> {
    let malformed = |e: &dyn std::fmt::Display| Failure::Malformed(format!("{}: {e}", path.display()));
    let text = fs::read_to_string(path).map_err(|e| malformed(&e))?;
    let mut value: serde_json::Value = serde_json::from_str(&text).map_err(|e| malformed(&e))?;
    if value.get("tool").and_then(|t| t.as_str()) == Some(crate::output::TOOL) {
        if let Some(inner) = value.get_mut("result") {
            value = inner.take();
        }
    }
    serde_json::from_value(value).map_err(|e| malformed(&e))
}

/// Rejects a flag the command has no use for.
pub fn reject_flag(command: &str, flag: &str, given: bool) -> Result<(), Failure> {
    if given {
        return Err(Failure::Malformed(format!("{command} does not take --{flag}")));
    }
    Ok(())
}

/// Resolves a path from a config relative to the config file's directory.
pub fn resolve(config: Option<&Path>, p: &Path) -> std::path::PathBuf {
    match config.and_then(Path::parent) {
        Some(dir) if p.is_relative() => dir.join(p),
        _ => p.to_path_buf(),
    }
}
