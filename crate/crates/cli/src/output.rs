use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::CliError;

/// Writes reports into one output directory, stamping each file with the
/// config hash and seed.
pub struct Sink {
    pub dir: PathBuf,
    pub command: String,
    pub hash: String,
    pub seed: u64,
    pub written: Vec<PathBuf>,
}

fn io_err(path: &Path, e: impl std::fmt::Display) -> CliError {
    CliError::Io(format!("{}: {e}", path.display()))
}

impl Sink {
    pub fn new(dir: PathBuf, command: &str, hash: String, seed: u64) -> Result<Self, CliError> {
        fs::create_dir_all(&dir).map_err(|e| io_err(&dir, e))?;
        Ok(Self {
            dir,
            command: command.into(),
            hash,
            seed,
            written: Vec::new(),
        })
    }

    fn create(&mut self, name: &str) -> Result<(PathBuf, BufWriter<File>), CliError> {
        let path = self.dir.join(name);
        let f = File::create(&path).map_err(|e| io_err(&path, e))?;
        log::info!("writing {}", path.display());
        self.written.push(path.clone());
        Ok((path, BufWriter::new(f)))
    }

    fn stamp(&self) -> String {
        format!("# lmcf {} config_hash={} seed={}", self.command, self.hash, self.seed)
    }

    pub fn json<T: Serialize>(&mut self, name: &str, report: &T) -> Result<(), CliError> {
        let body = serde_json::json!({
            "command": self.command,
            "config_hash": self.hash,
            "seed": self.seed,
            "report": report,
        });
        let (path, mut w) = self.create(name)?;
        serde_json::to_writer_pretty(&mut w, &body).map_err(|e| io_err(&path, e))?;
        writeln!(w).map_err(|e| io_err(&path, e))?;
        w.flush().map_err(|e| io_err(&path, e))
    }

    /// CSV with a leading `#` stamp line.
    pub fn csv(&mut self, name: &str, header: &[&str], rows: &[Vec<f64>]) -> Result<(), CliError> {
        let stamp = self.stamp();
        let (path, mut w) = self.create(name)?;
        writeln!(w, "{stamp}").map_err(|e| io_err(&path, e))?;
        let mut c = csv::Writer::from_writer(w);
        c.write_record(header).map_err(|e| io_err(&path, e))?;
        for r in rows {
            c.write_record(r.iter().map(|v| format!("{v:e}"))).map_err(|e| io_err(&path, e))?;
        }
        c.flush().map_err(|e| io_err(&path, e))
    }

    /// Whitespace-separated columns for plotting tools.
    pub fn dat(&mut self, name: &str, header: &[&str], rows: &[Vec<f64>]) -> Result<(), CliError> {
        let stamp = self.stamp();
        let (path, mut w) = self.create(name)?;
        let mut text = format!("{stamp}\n# {}\n", header.join(" "));
        for r in rows {
            let line: Vec<String> = r.iter().map(|v| format!("{v:.16e}")).collect();
            text.push_str(&line.join(" "));
            text.push('\n');
        }
        w.write_all(text.as_bytes()).map_err(|e| io_err(&path, e))?;
        w.flush().map_err(|e| io_err(&path, e))
    }

    pub fn raw(&mut self, name: &str, write: impl FnOnce(&mut dyn Write) -> lmcf_core::Result<()>) -> Result<(), CliError> {
        let (_, mut w) = self.create(name)?;
        write(&mut w)?;
        w.flush().map_err(|e| CliError::Io(e.to_string()))
    }
}
