//! Run outputs: CSV tables with header rows, field snapshots with JSON
//! sidecars, and a manifest listing every emitted file with its content
//! hash. Floating-point formatting is shortest-round-trip, so identical
//! bit patterns give identical text.

use serde::Serialize;
use sha2::{Digest, Sha256};
use std::io::Write;
use std::path::{Path, PathBuf};

pub struct RunWriter {
    dir: PathBuf,
    command: String,
    config_sha256: String,
    files: Vec<FileEntry>,
}

#[derive(Serialize)]
struct FileEntry {
    name: String,
    sha256: String,
    bytes: u64,
}

#[derive(Serialize)]
struct Manifest<'a> {
    command: &'a str,
    config_sha256: &'a str,
    files: &'a [FileEntry],
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    let mut h = Sha256::new();
    h.update(bytes);
    let digest = h.finalize();
    let mut out = String::with_capacity(64);
    for b in digest {
        out.push_str(&format!("{b:02x}"));
    }
    out
}

pub fn fmt_f64(v: f64) -> String {
    if v == f64::INFINITY {
        "inf".into()
    } else {
        format!("{v}")
    }
}

impl RunWriter {
    pub fn new(dir: &Path, command: &str, config_bytes: &[u8]) -> std::io::Result<Self> {
        std::fs::create_dir_all(dir)?;
        Ok(RunWriter {
            dir: dir.to_path_buf(),
            command: command.to_string(),
            config_sha256: sha256_hex(config_bytes),
            files: Vec::new(),
        })
    }

    pub fn config_sha256(&self) -> &str {
        &self.config_sha256
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.dir.join(name)
    }

    /// Register an already-written file in the manifest.
    pub fn register(&mut self, name: &str) -> std::io::Result<()> {
        let bytes = std::fs::read(self.path(name))?;
        self.files.push(FileEntry {
            name: name.to_string(),
            sha256: sha256_hex(&bytes),
            bytes: bytes.len() as u64,
        });
        Ok(())
    }

    /// Write one CSV file with a header row.
    pub fn csv(
        &mut self,
        name: &str,
        header: &[&str],
        rows: impl IntoIterator<Item = Vec<String>>,
    ) -> std::io::Result<()> {
        let mut text = String::new();
        text.push_str(&header.join(","));
        text.push('\n');
        for row in rows {
            text.push_str(&row.join(","));
            text.push('\n');
        }
        std::fs::write(self.path(name), &text)?;
        self.register(name)
    }

    pub fn json<T: Serialize>(&mut self, name: &str, value: &T) -> std::io::Result<()> {
        let text = serde_json::to_string_pretty(value).expect("serializable");
        std::fs::write(self.path(name), text)?;
        self.register(name)
    }

    /// Write the run manifest; call last.
    pub fn finish(&self) -> std::io::Result<()> {
        let manifest = Manifest {
            command: &self.command,
            config_sha256: &self.config_sha256,
            files: &self.files,
        };
        let text = serde_json::to_string_pretty(&manifest).expect("serializable");
        let mut f = std::fs::File::create(self.dir.join("manifest.json"))?;
        f.write_all(text.as_bytes())
    }
}
