//! Output directory handling, run manifests and config loading.

use std::fs;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::failure::Failure;

#[derive(Debug, Serialize)]
pub struct InputRecord {
    pub path: PathBuf,
    pub sha256: String,
    pub bytes: usize,
}

/// Everything needed to repeat a run bit for bit.
#[derive(Debug, Serialize)]
pub struct Manifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'static str,
    pub argv: Vec<String>,
    pub inputs: Vec<InputRecord>,
    pub seed: Option<u64>,
    pub seed_source: Option<&'static str>,
    /// Effective constant in front of the penalty, `None` without selection.
    pub penalty_const: Option<f64>,
    pub jobs: Option<usize>,
    /// Fully resolved configuration of the run.
    pub resolved: serde_json::Value,
}

impl Manifest {
    pub fn new(command: &'static str, argv: &[String]) -> Self {
        Self {
            tool: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            command,
            argv: argv.to_vec(),
            inputs: Vec::new(),
            seed: None,
            seed_source: None,
            penalty_const: None,
            jobs: None,
            resolved: serde_json::Value::Null,
        }
    }
}

/// Reads a file and records its hash.
pub fn read_input(path: &Path, manifest: &mut Manifest) -> Result<String, Failure> {
    let bytes = fs::read(path).map_err(|e| Failure::data(format!("cannot read {}: {e}", path.display())))?;
    manifest.inputs.push(InputRecord {
        path: path.to_path_buf(),
        sha256: hex(&Sha256::digest(&bytes)),
        bytes: bytes.len(),
    });
    String::from_utf8(bytes).map_err(|_| Failure::data(format!("{} is not valid UTF-8", path.display())))
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

/// Parses a config as TOML when the path ends in `.toml`, JSON otherwise.
pub fn parse_config<T: DeserializeOwned>(path: &Path, text: &str) -> Result<T, Failure> {
    let is_toml = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("toml"));
    if is_toml {
        toml::from_str(text).map_err(|e| Failure::data(format!("invalid config {}: {e}", path.display())))
    } else {
        serde_json::from_str(text).map_err(|e| Failure::data(format!("invalid config {}: {e}", path.display())))
    }
}

/// `CIRCDECONV_SEED`, if set; a malformed value is a usage error.
pub fn seed_override() -> Result<Option<u64>, Failure> {
    match std::env::var("CIRCDECONV_SEED") {
        Ok(v) => v
            .trim()
            .parse()
            .map(Some)
            .map_err(|_| Failure::usage(format!("CIRCDECONV_SEED must be an unsigned integer, got {v:?}"))),
        Err(_) => Ok(None),
    }
}

pub struct OutDir {
    root: PathBuf,
}

impl OutDir {
    pub fn create(root: &Path) -> Result<Self, Failure> {
        fs::create_dir_all(root).map_err(|e| Failure::data(format!("cannot create {}: {e}", root.display())))?;
        Ok(Self {
            root: root.to_path_buf(),
        })
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.root.join(name)
    }

    pub fn write(&self, name: &str, contents: &str) -> Result<PathBuf, Failure> {
        let path = self.path(name);
        fs::write(&path, contents).map_err(|e| Failure::data(format!("cannot write {}: {e}", path.display())))?;
        log::debug!("wrote {}", path.display());
        Ok(path)
    }

    pub fn write_json<T: Serialize>(&self, name: &str, value: &T) -> Result<PathBuf, Failure> {
        let mut text = serde_json::to_string_pretty(value).map_err(|e| Failure::data(e))?;
        text.push('\n');
        self.write(name, &text)
    }
}
