//! Run manifests and output files.

use std::path::Path;

use fidelis::{Error, Result};
use serde::{Deserialize, Serialize};

use crate::Command;

#[derive(Serialize, Deserialize)]
struct Manifest {
    tool: String,
    version: String,
    /// The parsed invocation minus its output path. `fidelis replay` runs it again.
    invocation: Command,
    /// Derived settings, for reading only.
    resolved: serde_json::Value,
}

pub fn manifest_json(cmd: &Command, resolved: serde_json::Value) -> Result<String> {
    let m = Manifest {
        tool: "fidelis".into(),
        version: env!("CARGO_PKG_VERSION").into(),
        invocation: cmd.clone(),
        resolved,
    };
    Ok(serde_json::to_string_pretty(&m)? + "\n")
}

pub fn read_manifest(path: &Path) -> Result<Command> {
    let text = std::fs::read_to_string(path)?;
    let m: Manifest = serde_json::from_str(&text).map_err(|e| Error::Data(format!("{}: {e}", path.display())))?;
    Ok(m.invocation)
}

pub fn write(path: &Path, contents: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    std::fs::write(path, contents)?;
    Ok(())
}

/// Shortest text that parses back to the same float.
pub fn num(v: f64) -> String {
    format!("{v:?}")
}
