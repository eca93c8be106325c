//! Plain-text `key = value` files used for schemas, grid specs, provenance and manifests.
//!
//! One entry per line. Blank lines and lines starting with `#` are ignored. Keys and
//! values are trimmed; a value may be empty. Later duplicates override earlier ones.

use crate::error::{Error, Result};
use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

#[derive(Debug, Clone, Default, PartialEq)]
pub struct KvFile {
    entries: Vec<(String, String)>,
}

impl KvFile {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn parse(text: &str, origin: &str) -> Result<Self> {
        let mut entries = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((k, v)) = line.split_once('=') else {
                return Err(Error::Config(format!(
                    "{origin}:{}: expected `key = value`, got `{line}`",
                    lineno + 1
                )));
            };
            let key = k.trim();
            if key.is_empty() {
                return Err(Error::Config(format!("{origin}:{}: empty key", lineno + 1)));
            }
            entries.push((key.to_string(), v.trim().to_string()));
        }
        Ok(Self { entries })
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::io(format!("reading {}", path.display()), e))?;
        Self::parse(&text, &path.display().to_string())
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries
            .iter()
            .rev()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    /// Entries whose key starts with `prefix`, with the prefix stripped.
    pub fn with_prefix<'a>(&'a self, prefix: &'a str) -> impl Iterator<Item = (&'a str, &'a str)> {
        self.entries
            .iter()
            .filter_map(move |(k, v)| k.strip_prefix(prefix).map(|rest| (rest, v.as_str())))
    }

    pub fn keys(&self) -> impl Iterator<Item = &str> {
        self.entries.iter().map(|(k, _)| k.as_str())
    }

    pub fn push(&mut self, key: impl Into<String>, value: impl ToString) {
        self.entries.push((key.into(), value.to_string()));
    }

    pub fn parse_value<V: std::str::FromStr>(&self, key: &str) -> Result<Option<V>> {
        match self.get(key) {
            None => Ok(None),
            Some(raw) => raw
                .parse()
                .map(Some)
                .map_err(|_| Error::Config(format!("invalid value for `{key}`: `{raw}`"))),
        }
    }

    /// Comma-separated list value; `None` when the key is absent.
    pub fn list(&self, key: &str) -> Option<Vec<String>> {
        self.get(key).map(|raw| {
            raw.split(',')
                .map(|s| s.trim().to_string())
                .filter(|s| !s.is_empty())
                .collect()
        })
    }

    pub fn to_map(&self) -> BTreeMap<String, String> {
        self.entries.iter().cloned().collect()
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.entries {
            let _ = writeln!(out, "{k} = {v}");
        }
        out
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.render())
            .map_err(|e| Error::io(format!("writing {}", path.display()), e))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_comments_lists_and_prefixes() {
        let kv = KvFile::parse(
            "# header\nlabel = class\n\nmap.yes = 1\nmap.no=0\nshots = 50, 100 ,\nlabel = target\n",
            "t",
        )
        .unwrap();
        assert_eq!(kv.get("label"), Some("target"));
        assert_eq!(kv.list("shots").unwrap(), vec!["50", "100"]);
        let maps: Vec<_> = kv.with_prefix("map.").collect();
        assert_eq!(maps, vec![("yes", "1"), ("no", "0")]);
        assert_eq!(kv.parse_value::<u32>("missing").unwrap(), None);
    }

    #[test]
    fn rejects_lines_without_separator() {
        let err = KvFile::parse("a = 1\noops\n", "cfg").unwrap_err();
        assert!(err.to_string().contains("cfg:2"));
    }

    #[test]
    fn render_round_trips() {
        let mut kv = KvFile::new();
        kv.push("a", 1);
        kv.push("b", "x, y");
        assert_eq!(KvFile::parse(&kv.render(), "r").unwrap(), kv);
    }
}
