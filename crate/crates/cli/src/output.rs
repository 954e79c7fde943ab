use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Serialize;

/// Output directory of one run. Files are written atomically through a
/// temporary name; everything written is removed again by [`cleanup`] when
/// the run fails.
///
/// [`cleanup`]: OutputDir::cleanup
pub struct OutputDir {
    root: PathBuf,
    created_root: bool,
    written: Vec<String>,
}

impl OutputDir {
    pub fn create(root: &Path) -> Result<Self> {
        let created_root = !root.exists();
        fs::create_dir_all(root)
            .with_context(|| format!("cannot create output directory {}", root.display()))?;
        Ok(Self {
            root: root.to_path_buf(),
            created_root,
            written: Vec::new(),
        })
    }

    pub fn files(&self) -> &[String] {
        &self.written
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.root.join(name)
    }

    pub fn write_bytes(&mut self, name: &str, bytes: &[u8]) -> Result<()> {
        let target = self.path(name);
        let tmp = self.path(&format!(".{name}.tmp"));
        let result = (|| -> std::io::Result<()> {
            let mut f = fs::File::create(&tmp)?;
            f.write_all(bytes)?;
            f.sync_all()?;
            fs::rename(&tmp, &target)
        })();
        if let Err(e) = result {
            let _ = fs::remove_file(&tmp);
            return Err(e).with_context(|| format!("cannot write {}", target.display()));
        }
        if !self.written.iter().any(|w| w == name) {
            self.written.push(name.to_string());
        }
        Ok(())
    }

    pub fn write_csv<T: Serialize>(&mut self, name: &str, rows: &[T]) -> Result<()> {
        let mut w = csv::Writer::from_writer(Vec::new());
        for row in rows {
            w.serialize(row)?;
        }
        let bytes = w.into_inner().context("csv buffer")?;
        self.write_bytes(name, &bytes)
    }

    pub fn write_json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<()> {
        let mut text = serde_json::to_string_pretty(value)?;
        text.push('\n');
        self.write_bytes(name, text.as_bytes())
    }

    /// Removes every file written so far, and the directory itself if this
    /// run created it.
    pub fn cleanup(self) {
        for name in &self.written {
            let _ = fs::remove_file(self.root.join(name));
        }
        if self.created_root {
            let _ = fs::remove_dir(&self.root);
        }
    }
}

/// Little-endian f64 arrays behind a one-line ASCII header describing
/// field order, sample rate and length.
pub fn series_dump(fields: &[(&str, &[f64])], fs: f64) -> Vec<u8> {
    let len = fields.first().map_or(0, |f| f.1.len());
    let names: Vec<&str> = fields.iter().map(|f| f.0).collect();
    let header = format!(
        "omrr-series v1 fields={} fs={fs} len={len} dtype=f64le layout=field-major\n",
        names.join(",")
    );
    let mut out = header.into_bytes();
    out.reserve(fields.len() * len * 8);
    for (_, values) in fields {
        for v in *values {
            out.extend_from_slice(&v.to_le_bytes());
        }
    }
    out
}
