use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Mutex;

use anyhow::{Context, Result};
use serde::Serialize;
use serde_json::Value;

use curvegait::analysis::to_json_rounded;

/// Writes `bytes` to a temporary sibling and renames it over `path`.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let name = path
        .file_name()
        .and_then(|n| n.to_str())
        .context("output path has no file name")?;
    let tmp = path.with_file_name(format!(".{name}.{}.tmp", std::process::id()));
    let result = (|| {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
        fs::rename(&tmp, path)
    })();
    if result.is_err() {
        let _ = fs::remove_file(&tmp);
    }
    result.with_context(|| format!("writing {}", path.display()))
}

/// Output directory that records every file written to it.
pub struct OutDir {
    dir: PathBuf,
    files: Mutex<Vec<String>>,
}

impl OutDir {
    pub fn create(dir: &Path) -> Result<Self> {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        Ok(Self {
            dir: dir.to_path_buf(),
            files: Mutex::new(Vec::new()),
        })
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.dir.join(name)
    }

    pub fn write(&self, name: &str, bytes: &[u8]) -> Result<()> {
        write_atomic(&self.path(name), bytes)?;
        self.files.lock().expect("file list").push(name.to_string());
        Ok(())
    }

    pub fn write_json<T: Serialize>(&self, name: &str, value: &T) -> Result<()> {
        self.write(name, to_json_rounded(value)?.as_bytes())
    }

    /// Writes `run.json` listing every output in name order.
    pub fn finish(self, command: &str, inputs: Vec<String>, parameters: Value) -> Result<()> {
        let mut outputs = self.files.into_inner().expect("file list");
        outputs.sort();
        let run = RunManifest {
            command: command.to_string(),
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            inputs,
            parameters,
            outputs,
        };
        write_atomic(&self.dir.join(RUN_MANIFEST), to_json_rounded(&run)?.as_bytes())
    }
}

pub const RUN_MANIFEST: &str = "run.json";

#[derive(Serialize)]
pub struct RunManifest {
    pub command: String,
    pub tool_version: String,
    pub inputs: Vec<String>,
    pub parameters: Value,
    /// Files written next to the manifest, excluding the manifest itself.
    pub outputs: Vec<String>,
}
