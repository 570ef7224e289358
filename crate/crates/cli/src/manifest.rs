use std::collections::BTreeMap;
use std::path::Path;

use anyhow::Result;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::io::Files;

/// Record of one run: enough to replay it and check that the outputs match.
/// Holds no timestamps or host details so it is itself reproducible.
#[derive(Debug, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub command: String,
    /// Arguments after the program name.
    pub argv: Vec<String>,
    /// Effective parameters, defaults included.
    pub config: Value,
    /// Path to SHA-256 of every file read.
    pub inputs: BTreeMap<String, String>,
    /// Path to SHA-256 of every file written.
    pub outputs: BTreeMap<String, String>,
}

impl RunManifest {
    pub fn new(command: &str, argv: Vec<String>, config: Value, files: &Files) -> Self {
        let (inputs, outputs) = files.digests();
        RunManifest {
            tool: env!("CARGO_PKG_NAME").to_owned(),
            version: env!("CARGO_PKG_VERSION").to_owned(),
            command: command.to_owned(),
            argv,
            config,
            inputs,
            outputs,
        }
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let mut text = serde_json::to_string_pretty(self)?;
        text.push('\n');
        // Not through `Files`: the manifest does not list itself.
        if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
            std::fs::create_dir_all(parent)?;
        }
        std::fs::write(path, text)?;
        Ok(())
    }
}

/// Where the manifest goes by default: next to a file output, or inside a
/// directory output.
pub fn default_location(output: &Path, command: &str, is_dir: bool) -> std::path::PathBuf {
    if is_dir {
        output.join(format!("{command}.manifest.json"))
    } else {
        let mut name = output.as_os_str().to_owned();
        name.push(".manifest.json");
        name.into()
    }
}
