//! Output staging: every file of a run is rendered in memory first and
//! written at the end, so a failing run leaves nothing behind.

use std::fs;
use std::path::{Path, PathBuf};

use ratchet_core::export::fmt_sig;
use serde::Serialize;

use crate::CliError;

#[derive(Debug, Default)]
pub struct Outputs {
    files: Vec<(String, Vec<u8>)>,
}

impl Outputs {
    pub fn add(&mut self, name: &str, bytes: Vec<u8>) {
        self.files.push((name.to_string(), bytes));
    }

    pub fn add_json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<(), CliError> {
        let mut text = serde_json::to_string_pretty(value)
            .map_err(|e| CliError::input(format!("cannot serialise {name}: {e}")))?;
        text.push('\n');
        self.add(name, text.into_bytes());
        Ok(())
    }

    /// Renders through a writer-based exporter.
    pub fn add_with(
        &mut self,
        name: &str,
        render: impl FnOnce(&mut Vec<u8>) -> std::io::Result<()>,
    ) -> Result<(), CliError> {
        let mut buf = Vec::new();
        render(&mut buf).map_err(|e| CliError::input(format!("cannot render {name}: {e}")))?;
        self.add(name, buf);
        Ok(())
    }

    /// Writes everything under `dir`; on the first failure removes what was written.
    pub fn commit(self, dir: &Path) -> Result<Vec<PathBuf>, CliError> {
        fs::create_dir_all(dir)
            .map_err(|e| CliError::input(format!("cannot create {}: {e}", dir.display())))?;
        let mut written = Vec::new();
        for (name, bytes) in self.files {
            let path = dir.join(&name);
            if let Err(e) = fs::write(&path, bytes) {
                let _ = fs::remove_file(&path);
                for w in &written {
                    let _ = fs::remove_file(w);
                }
                return Err(CliError::input(format!(
                    "cannot write {}: {e}",
                    path.display()
                )));
            }
            written.push(path);
        }
        Ok(written)
    }
}

/// One CSV table with a header row, numbers in 12 significant digits.
pub fn csv_table(header: &str, rows: impl IntoIterator<Item = Vec<f64>>) -> Vec<u8> {
    let mut out = String::from(header);
    out.push('\n');
    for row in rows {
        let cells: Vec<String> = row.iter().map(|x| fmt_sig(*x)).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out.into_bytes()
}
