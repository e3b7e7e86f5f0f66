//! CSV and JSON emission with the resolved config embedded as metadata.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use super::config::Resolved;

/// 17 significant digits: enough to round-trip any `f64`.
pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn metadata_lines(cfg: &Resolved, notes: &[String]) -> String {
    let mut s = String::new();
    for line in cfg.to_toml().lines() {
        let _ = writeln!(s, "# {line}");
    }
    for note in notes {
        let _ = writeln!(s, "# note: {note}");
    }
    s
}

pub struct Csv {
    text: String,
}

impl Csv {
    pub fn new(cfg: &Resolved, notes: &[String], header: &str) -> Self {
        let mut text = metadata_lines(cfg, notes);
        text.push_str(header);
        text.push('\n');
        Csv { text }
    }

    pub fn row(&mut self, fields: &[String]) {
        self.text.push_str(&fields.join(","));
        self.text.push('\n');
    }

    pub fn into_string(self) -> String {
        self.text
    }
}

#[derive(Serialize)]
struct Envelope<'a, T: Serialize> {
    config: &'a Resolved,
    notes: &'a [String],
    result: &'a T,
}

pub fn json<T: Serialize>(cfg: &Resolved, notes: &[String], result: &T) -> String {
    let mut s = serde_json::to_string_pretty(&Envelope { config: cfg, notes, result })
        .expect("results serialize");
    s.push('\n');
    s
}

pub fn write(dir: &Path, name: &str, contents: &str) -> std::io::Result<PathBuf> {
    let path = dir.join(name);
    fs::write(&path, contents)?;
    Ok(path)
}
