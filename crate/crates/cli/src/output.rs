//! Output directory, artifact files and the run manifest.

use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::config::{Format, RunConfig};
use crate::CliError;

pub const MANIFEST: &str = "manifest.json";
pub const MANIFEST_SCHEMA: u32 = 1;

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

pub fn sha256(bytes: &[u8]) -> String {
    hex(&Sha256::digest(bytes))
}

#[derive(Clone, Debug, Serialize)]
pub struct FileEntry {
    pub name: String,
    pub bytes: usize,
    pub sha256: String,
}

#[derive(Clone, Debug, Serialize)]
struct Manifest<'a> {
    schema: u32,
    tool: &'static str,
    version: &'static str,
    core_version: &'static str,
    command: &'a str,
    status: &'static str,
    exit_code: i32,
    error: Option<String>,
    inputs_sha256: String,
    files: &'a [FileEntry],
    timings_ms: &'a [(String, f64)],
    config: &'a RunConfig,
}

/// Writes artifacts as they are produced and keeps the list for the manifest.
pub struct OutDir {
    dir: PathBuf,
    format: Format,
    files: Vec<FileEntry>,
    timings: Vec<(String, f64)>,
    clock: Instant,
}

/// `{"config": ..., "<key>": ...}` so every JSON file carries the resolved config.
#[derive(Serialize)]
struct Doc<'a, T: Serialize> {
    config: &'a RunConfig,
    #[serde(flatten)]
    body: T,
}

impl OutDir {
    pub fn create(dir: &Path, format: Format, started: Instant) -> Result<Self, CliError> {
        std::fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
        Ok(Self { dir: dir.to_path_buf(), format, files: vec![], timings: vec![], clock: started })
    }

    pub fn path(&self) -> &Path {
        &self.dir
    }

    /// Records the time since the previous lap under `label`.
    pub fn lap(&mut self, label: &str) {
        let ms = self.clock.elapsed().as_secs_f64() * 1e3;
        self.timings.push((label.into(), (ms * 1e3).round() / 1e3));
        self.clock = Instant::now();
    }

    fn write_bytes(&mut self, name: &str, bytes: &[u8]) -> Result<(), CliError> {
        let path = self.dir.join(name);
        std::fs::write(&path, bytes).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        self.files.retain(|f| f.name != name);
        self.files.push(FileEntry { name: name.into(), bytes: bytes.len(), sha256: sha256(bytes) });
        Ok(())
    }

    pub fn json<T: Serialize>(&mut self, name: &str, config: &RunConfig, body: T) -> Result<(), CliError> {
        let mut text = serde_json::to_string_pretty(&Doc { config, body })
            .map_err(|e| CliError::Io(format!("{name}: {e}")))?;
        text.push('\n');
        self.write_bytes(name, text.as_bytes())
    }

    /// CSV table headed by a `# config:` comment line; skipped for JSON-only output
    /// unless `always` is set.
    pub fn csv(&mut self, name: &str, config: &RunConfig, table: &str, always: bool) -> Result<(), CliError> {
        if self.format == Format::Json && !always {
            return Ok(());
        }
        let line = serde_json::to_string(config).map_err(|e| CliError::Io(e.to_string()))?;
        self.write_bytes(name, format!("# config: {line}\n{table}").as_bytes())
    }

    pub fn finish(mut self, config: &RunConfig, outcome: &Result<(), CliError>) -> Result<(), CliError> {
        self.lap("write");
        let canonical = serde_json::to_string(&(config.command.as_str(), &config.params, &config.inputs, &config.grid, &config.flow, &config.options))
            .map_err(|e| CliError::Io(e.to_string()))?;
        let manifest = Manifest {
            schema: MANIFEST_SCHEMA,
            tool: "kirchhoff",
            version: env!("CARGO_PKG_VERSION"),
            core_version: kirchhoff_core::VERSION,
            command: &config.command,
            status: if outcome.is_ok() { "ok" } else { "FAILED" },
            exit_code: outcome.as_ref().map(|_| 0).unwrap_or_else(CliError::exit_code),
            error: outcome.as_ref().err().map(|e| e.to_string()),
            inputs_sha256: sha256(canonical.as_bytes()),
            files: &self.files,
            timings_ms: &self.timings,
            config,
        };
        let mut text = serde_json::to_string_pretty(&manifest).map_err(|e| CliError::Io(e.to_string()))?;
        text.push('\n');
        let path = self.dir.join(MANIFEST);
        std::fs::write(&path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
    }
}
