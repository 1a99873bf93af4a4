use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use serde::Serialize;

/// Shortest-form-independent rendering: 17 significant digits, lowercase `e`.
pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

/// Files written by one run, relative to its output directory.
pub struct Writer {
    dir: PathBuf,
    pub written: Vec<String>,
}

impl Writer {
    pub fn new(dir: &Path) -> io::Result<Self> {
        fs::create_dir_all(dir)?;
        Ok(Writer {
            dir: dir.to_path_buf(),
            written: Vec::new(),
        })
    }

    pub fn csv(&mut self, name: &str, header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> io::Result<()> {
        let mut w = csv::Writer::from_path(self.dir.join(name))?;
        w.write_record(header)?;
        for r in rows {
            w.write_record(&r)?;
        }
        w.flush()?;
        self.written.push(name.to_string());
        Ok(())
    }

    pub fn json<T: Serialize>(&mut self, name: &str, value: &T) -> io::Result<()> {
        let text = serde_json::to_string_pretty(value).map_err(io::Error::other)?;
        fs::write(self.dir.join(name), text + "\n")?;
        self.written.push(name.to_string());
        Ok(())
    }
}
