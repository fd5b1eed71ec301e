//! Output bundle files. Everything is written through a temporary file in
//! the target directory and renamed into place.

use std::io::{BufWriter, Write};
use std::path::Path;

use mnls_core::{DiagnosticsSample, TrajectoryEvent};
use serde::Serialize;

use crate::error::{BenchError, Result};

pub const SERIES_COLUMNS: [&str; 9] = ["t", "layer_gamma", "mass", "kinetic", "potential", "energy", "I", "P", "linf"];

pub fn write_atomic<F>(path: &Path, fill: F) -> Result<()>
where
    F: FnOnce(&mut dyn Write) -> std::io::Result<()>,
{
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    std::fs::create_dir_all(dir).map_err(|e| BenchError::io(dir, e))?;
    let tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| BenchError::io(dir, e))?;
    {
        let mut w = BufWriter::new(tmp.as_file());
        fill(&mut w).map_err(|e| BenchError::io(path, e))?;
        w.flush().map_err(|e| BenchError::io(path, e))?;
    }
    tmp.persist(path).map_err(|e| BenchError::io(path, e.error))?;
    Ok(())
}

/// Render samples as CSV in the fixed column order.
pub fn series_csv(samples: &[DiagnosticsSample]) -> Vec<u8> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = "writing to memory cannot fail";
    w.write_record(SERIES_COLUMNS).expect(io);
    for s in samples {
        let row = [
            s.t,
            s.layer_gamma,
            s.mass,
            s.kinetic,
            s.potential,
            s.energy,
            s.variance,
            s.virial,
            s.linf,
        ];
        w.write_record(row.iter().map(|v| v.to_string())).expect(io);
    }
    w.into_inner().expect(io)
}

pub fn write_series(path: &Path, samples: &[DiagnosticsSample]) -> Result<()> {
    let bytes = series_csv(samples);
    write_atomic(path, |w| w.write_all(&bytes))
}

pub fn write_events(path: &Path, events: &[TrajectoryEvent]) -> Result<()> {
    let mut text = String::new();
    for e in events {
        text.push_str(&serde_json::to_string(e).map_err(|source| BenchError::Json {
            path: path.to_path_buf(),
            source,
        })?);
        text.push('\n');
    }
    write_atomic(path, |w| w.write_all(text.as_bytes()))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(|source| BenchError::Json {
        path: path.to_path_buf(),
        source,
    })?;
    text.push('\n');
    write_atomic(path, |w| w.write_all(text.as_bytes()))
}

/// Columns of a series file, by header name.
pub struct Series {
    pub headers: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Series {
    pub fn read(path: &Path) -> Result<Self> {
        let csv_err = |source| BenchError::Csv {
            path: path.to_path_buf(),
            source,
        };
        let mut r = csv::Reader::from_path(path).map_err(csv_err)?;
        let headers = r.headers().map_err(csv_err)?.iter().map(str::to_string).collect();
        let mut rows = Vec::new();
        for rec in r.records() {
            let rec = rec.map_err(csv_err)?;
            let row = rec
                .iter()
                .map(|f| {
                    f.trim().parse::<f64>().map_err(|_| BenchError::Malformed {
                        path: path.to_path_buf(),
                        reason: format!("non-numeric entry `{f}`"),
                    })
                })
                .collect::<Result<Vec<f64>>>()?;
            rows.push(row);
        }
        Ok(Self { headers, rows })
    }

    pub fn column(&self, name: &str) -> Result<Vec<f64>> {
        let i = self
            .headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| BenchError::MissingColumn(name.to_string()))?;
        Ok(self.rows.iter().map(|r| r[i]).collect())
    }
}
