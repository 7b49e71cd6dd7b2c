//! Run directories. Every file written through [`Run`] is hashed and listed
//! in `manifest.json` together with the configuration that produced it.

use std::collections::BTreeMap;
use std::fs;
use std::path::PathBuf;

use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::failure::At;

#[derive(Debug, Clone, Serialize)]
struct FileEntry {
    bytes: usize,
    sha256: String,
}

#[derive(Debug, Serialize)]
struct Manifest<'a> {
    tool: &'static str,
    versions: BTreeMap<&'static str, &'static str>,
    config: &'a Value,
    files: &'a BTreeMap<String, FileEntry>,
}

pub struct Run {
    dir: Option<PathBuf>,
    config: Value,
    files: BTreeMap<String, FileEntry>,
}

impl Run {
    pub fn new(dir: Option<PathBuf>, config: Value) -> anyhow::Result<Self> {
        if let Some(d) = &dir {
            fs::create_dir_all(d).at("cli", "create_output_dir")?;
        }
        Ok(Run {
            dir,
            config,
            files: BTreeMap::new(),
        })
    }

    /// Writes `name` into the run directory; a no-op without one.
    pub fn write(&mut self, name: &str, contents: &[u8]) -> anyhow::Result<()> {
        let Some(dir) = &self.dir else {
            return Ok(());
        };
        fs::write(dir.join(name), contents).at("cli", "write_artifact")?;
        self.files.insert(
            name.to_string(),
            FileEntry {
                bytes: contents.len(),
                sha256: hex::encode(Sha256::digest(contents)),
            },
        );
        Ok(())
    }

    pub fn write_json<T: Serialize>(&mut self, name: &str, value: &T) -> anyhow::Result<()> {
        let mut s = serde_json::to_string_pretty(value).at("cli", "write_artifact")?;
        s.push('\n');
        self.write(name, s.as_bytes())
    }

    pub fn finish(self) -> anyhow::Result<()> {
        let Some(dir) = &self.dir else {
            return Ok(());
        };
        let versions = BTreeMap::from([
            ("rotset-cli", env!("CARGO_PKG_VERSION")),
            ("rotset-core", rotset_core::VERSION),
        ]);
        let m = Manifest {
            tool: "rotset",
            versions,
            config: &self.config,
            files: &self.files,
        };
        let mut s = serde_json::to_string_pretty(&m).at("cli", "write_manifest")?;
        s.push('\n');
        fs::write(dir.join("manifest.json"), s).at("cli", "write_manifest")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn manifest_lists_hashes() {
        let dir = std::env::temp_dir().join(format!("rotset-manifest-{}", std::process::id()));
        let mut run = Run::new(Some(dir.clone()), serde_json::json!({"command": "test"})).unwrap();
        run.write("a.txt", b"abc").unwrap();
        run.finish().unwrap();
        let m: Value = serde_json::from_str(&fs::read_to_string(dir.join("manifest.json")).unwrap()).unwrap();
        assert_eq!(
            m["files"]["a.txt"]["sha256"],
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
        assert_eq!(m["config"]["command"], "test");
        fs::remove_dir_all(dir).unwrap();
    }

    #[test]
    fn no_directory_means_no_files() {
        let mut run = Run::new(None, Value::Null).unwrap();
        run.write("x", b"1").unwrap();
        run.finish().unwrap();
    }
}
