//! Run directories: resolved config, CSV and SVG files, and a manifest with
//! SHA-256 hashes of everything written.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::CliError;

pub const CONFIG_FILE: &str = "config.json";
pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Debug, Clone, PartialEq)]
pub struct Artifact {
    pub name: String,
    pub bytes: Vec<u8>,
}

impl Artifact {
    pub fn new(name: impl Into<String>, contents: impl Into<Vec<u8>>) -> Self {
        Self {
            name: name.into(),
            bytes: contents.into(),
        }
    }
}

#[derive(Debug, Serialize)]
struct ManifestEntry {
    path: String,
    bytes: usize,
    sha256: String,
}

#[derive(Debug, Serialize)]
struct Manifest<'a> {
    tool: &'static str,
    version: &'static str,
    files: Vec<ManifestEntry>,
    notes: &'a [String],
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// Makes `dir` ready for a run. A directory left by an earlier run is
/// cleared of the files its manifest lists; any other non-empty directory
/// is refused so that unrelated files are never mixed into a run.
fn prepare(dir: &Path) -> Result<(), CliError> {
    if !dir.exists() {
        return fs::create_dir_all(dir).map_err(io_err(dir));
    }
    let mut entries = fs::read_dir(dir).map_err(io_err(dir))?.peekable();
    if entries.peek().is_none() {
        return Ok(());
    }
    let manifest_path = dir.join(MANIFEST_FILE);
    let old = fs::read_to_string(&manifest_path).map_err(|_| CliError::Usage(format!(
        "output directory {} is not empty and holds no earlier run",
        dir.display()
    )))?;
    let old: serde_json::Value = serde_json::from_str(&old).map_err(|_| {
        CliError::Usage(format!("unreadable manifest in {}", dir.display()))
    })?;
    if let Some(files) = old.get("files").and_then(|f| f.as_array()) {
        for f in files {
            if let Some(name) = f.get("path").and_then(|p| p.as_str()) {
                if !name.contains(['/', '\\']) {
                    let p = dir.join(name);
                    if p.is_file() {
                        fs::remove_file(&p).map_err(io_err(&p))?;
                    }
                }
            }
        }
    }
    fs::remove_file(&manifest_path).map_err(io_err(&manifest_path))?;
    Ok(())
}

/// Writes the config, the artifacts and the manifest into `dir`.
pub fn write_run(dir: &Path, config_json: &str, files: &[Artifact], notes: &[String]) -> Result<PathBuf, CliError> {
    prepare(dir)?;
    let mut all = Vec::with_capacity(files.len() + 1);
    all.push(Artifact::new(CONFIG_FILE, config_json));
    all.extend(files.iter().cloned());
    let mut entries = Vec::with_capacity(all.len());
    for a in &all {
        if a.name == MANIFEST_FILE || a.name.contains(['/', '\\']) {
            return Err(CliError::Usage(format!("invalid artifact name `{}`", a.name)));
        }
        let path = dir.join(&a.name);
        fs::write(&path, &a.bytes).map_err(io_err(&path))?;
        entries.push(ManifestEntry {
            path: a.name.clone(),
            bytes: a.bytes.len(),
            sha256: sha256_hex(&a.bytes),
        });
    }
    entries.sort_by(|a, b| a.path.cmp(&b.path));
    let manifest = Manifest {
        tool: "antipt",
        version: env!("CARGO_PKG_VERSION"),
        files: entries,
        notes,
    };
    let mut text = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    text.push('\n');
    let path = dir.join(MANIFEST_FILE);
    fs::write(&path, text).map_err(io_err(&path))?;
    Ok(dir.to_path_buf())
}
