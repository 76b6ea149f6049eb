use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Serialize;

use crate::args::Format;

/// Writes artifacts under one directory, each via a temporary file and a
/// rename so readers never see partial output.
pub struct Sink {
    dir: PathBuf,
    format: Format,
}

impl Sink {
    pub fn new(dir: &Path, format: Format) -> Result<Sink> {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        Ok(Sink { dir: dir.to_path_buf(), format })
    }

    fn write(&self, name: &str, bytes: &[u8]) -> Result<()> {
        let path = self.dir.join(name);
        let tmp = self.dir.join(format!(".{name}.tmp"));
        let mut f = fs::File::create(&tmp).with_context(|| format!("creating {}", tmp.display()))?;
        f.write_all(bytes)?;
        f.sync_all()?;
        fs::rename(&tmp, &path).with_context(|| format!("renaming to {}", path.display()))?;
        Ok(())
    }

    pub fn json<T: Serialize>(&self, name: &str, value: &T) -> Result<()> {
        if !self.format.json() {
            return Ok(());
        }
        let mut s = serde_json::to_string_pretty(value)?;
        s.push('\n');
        self.write(name, s.as_bytes())
    }

    pub fn svg(&self, name: &str, doc: &str) -> Result<()> {
        if !self.format.svg() {
            return Ok(());
        }
        self.write(name, doc.as_bytes())
    }

    /// Plain-text artifacts are written for every format.
    pub fn text(&self, name: &str, s: &str) -> Result<()> {
        self.write(name, s.as_bytes())
    }
}
