//! Plain-text manifest written next to every command's outputs.

use hqnn::kv::KvFile;
use hqnn::Result;
use std::path::Path;

pub const FILE_NAME: &str = "manifest.txt";

pub struct Manifest {
    kv: KvFile,
}

impl Manifest {
    pub fn new(command: &str) -> Self {
        let mut kv = KvFile::new();
        kv.push("command", command);
        kv.push("code_version", env!("CARGO_PKG_VERSION"));
        kv.push("decisions", hqnn::dse::decisions_fingerprint());
        Self { kv }
    }

    pub fn set(&mut self, key: impl Into<String>, value: impl ToString) -> &mut Self {
        self.kv.push(key, value);
        self
    }

    /// Appends every entry of `other` under `prefix.`.
    pub fn extend(&mut self, prefix: &str, other: &KvFile) -> &mut Self {
        for (k, v) in other.to_map() {
            self.kv.push(format!("{prefix}.{k}"), v);
        }
        self
    }

    pub fn write(&self, dir: &Path) -> Result<()> {
        self.kv.write(&dir.join(FILE_NAME))
    }
}
