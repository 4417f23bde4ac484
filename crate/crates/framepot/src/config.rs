//! Flat `key=value` configuration files and run manifests.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConfigFile {
    path: PathBuf,
    entries: BTreeMap<String, (usize, String)>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text, path)
    }

    /// Parses `key=value` lines; `#` starts a comment line. Later keys win.
    pub fn parse(text: &str, path: &Path) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::parse(path, i + 1, format!("expected key=value, found `{line}`")))?;
            entries.insert(k.trim().to_string(), (i + 1, v.trim().to_string()));
        }
        Ok(Self { path: path.to_path_buf(), entries })
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(|(_, v)| v.as_str())
    }

    pub fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>> {
        match self.entries.get(key) {
            None => Ok(None),
            Some((line, v)) => v
                .parse()
                .map(Some)
                .map_err(|_| Error::parse(&self.path, *line, format!("invalid value `{v}` for `{key}`"))),
        }
    }

    pub fn keys(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }
}

/// Ordered `key=value` record of one run, readable back as a config file.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Manifest {
    entries: Vec<(String, String)>,
}

impl Manifest {
    pub fn new(subcommand: &str) -> Self {
        let mut m = Self::default();
        m.set("subcommand", subcommand);
        m.set("framepot_version", env!("CARGO_PKG_VERSION"));
        m
    }

    pub fn set(&mut self, key: &str, value: impl ToString) {
        let value = value.to_string();
        match self.entries.iter_mut().find(|(k, _)| k == key) {
            Some(entry) => entry.1 = value,
            None => self.entries.push((key.to_string(), value)),
        }
    }

    pub fn render(&self) -> String {
        let mut out = String::from("# framepot run manifest; pass back with --config to rerun\n");
        for (k, v) in &self.entries {
            out.push_str(k);
            out.push('=');
            out.push_str(v);
            out.push('\n');
        }
        out
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        fs::write(path, self.render()).map_err(|e| Error::io(path, e))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_typed_get() {
        let c = ConfigFile::parse("# c\nn = 4\n\nepsilon=0.1\nn=6\nfamily=parallel\n", Path::new("x.cfg")).unwrap();
        assert_eq!(c.get::<usize>("n").unwrap(), Some(6));
        assert_eq!(c.get::<f64>("epsilon").unwrap(), Some(0.1));
        assert_eq!(c.raw("family"), Some("parallel"));
        assert_eq!(c.get::<u64>("seed").unwrap(), None);
        let e = c.get::<usize>("family").unwrap_err();
        assert!(e.to_string().starts_with("x.cfg:6:"), "{e}");
        assert!(ConfigFile::parse("novalue\n", Path::new("y")).is_err());
    }

    #[test]
    fn manifest_reads_back_as_config() {
        let mut m = Manifest::new("sample");
        m.set("seed", 7);
        m.set("n", "4,6");
        m.set("seed", 8);
        let c = ConfigFile::parse(&m.render(), Path::new("m")).unwrap();
        assert_eq!(c.get::<u64>("seed").unwrap(), Some(8));
        assert_eq!(c.raw("n"), Some("4,6"));
        assert_eq!(c.raw("subcommand"), Some("sample"));
    }
}
