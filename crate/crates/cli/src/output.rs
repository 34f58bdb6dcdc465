//! Dataset sinks: CSV with fixed 17-significant-digit floats, pretty JSON.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use qho_lg::{Error, Result};
use serde::Serialize;

pub fn num(v: f64) -> String {
    format!("{v:.16e}")
}

fn io_err(path: &str, e: impl std::fmt::Display) -> Error {
    Error::Io {
        path: path.to_string(),
        message: e.to_string(),
    }
}

/// `None` or `-` means stdout.
pub struct Sink {
    name: String,
    inner: Box<dyn Write>,
}

impl Sink {
    pub fn open(path: Option<&Path>) -> Result<Self> {
        match path {
            None => Ok(Self::stdout()),
            Some(p) if p == Path::new("-") => Ok(Self::stdout()),
            Some(p) => {
                let name = p.display().to_string();
                let f = File::create(p).map_err(|e| io_err(&name, e))?;
                Ok(Self {
                    name,
                    inner: Box::new(BufWriter::new(f)),
                })
            }
        }
    }

    fn stdout() -> Self {
        Self {
            name: "<stdout>".into(),
            inner: Box::new(io::stdout().lock()),
        }
    }

    pub fn csv<I>(mut self, header: &[&str], rows: I) -> Result<()>
    where
        I: IntoIterator<Item = Vec<String>>,
    {
        let name = self.name.clone();
        {
            let mut w = csv::WriterBuilder::new()
                .terminator(csv::Terminator::Any(b'\n'))
                .from_writer(&mut self.inner);
            w.write_record(header).map_err(|e| io_err(&name, e))?;
            for r in rows {
                w.write_record(&r).map_err(|e| io_err(&name, e))?;
            }
            w.flush().map_err(|e| io_err(&name, e))?;
        }
        self.inner.flush().map_err(|e| io_err(&name, e))
    }

    pub fn json<S: Serialize>(mut self, value: &S) -> Result<()> {
        let name = self.name.clone();
        serde_json::to_writer_pretty(&mut self.inner, value).map_err(|e| io_err(&name, e))?;
        self.inner.write_all(b"\n").map_err(|e| io_err(&name, e))?;
        self.inner.flush().map_err(|e| io_err(&name, e))
    }

    /// Hands the raw writer to a module's own CSV emitter.
    pub fn with<F>(mut self, f: F) -> Result<()>
    where
        F: FnOnce(&mut dyn Write) -> Result<()>,
    {
        f(&mut self.inner)?;
        let name = self.name.clone();
        self.inner.flush().map_err(|e| io_err(&name, e))
    }
}

pub fn sink(path: &Option<PathBuf>) -> Result<Sink> {
    Sink::open(path.as_deref())
}
