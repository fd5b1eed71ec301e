//! Binary field snapshots.
//!
//! Layout, all little-endian: the magic `MNLS`, then `u64` version, `u64`
//! dim, `u64` points per axis, `f64` half-width, `f64` time, followed by the
//! values as interleaved `f64` real and imaginary parts in row-major node
//! order.

use std::io::Read;
use std::path::Path;

use mnls_core::{Complex64, ComplexField, Grid};

use crate::error::{BenchError, Result};
use crate::output::write_atomic;

const MAGIC: &[u8; 4] = b"MNLS";
const VERSION: u64 = 1;
const HEADER_LEN: usize = 4 + 8 * 5;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Header {
    pub dim: usize,
    pub points: usize,
    pub half_width: f64,
    pub time: f64,
}

fn bad(path: &Path, reason: impl Into<String>) -> BenchError {
    BenchError::Snapshot {
        path: path.to_path_buf(),
        reason: reason.into(),
    }
}

pub fn encode(field: &ComplexField) -> Vec<u8> {
    let g = field.grid();
    let mut out = Vec::with_capacity(HEADER_LEN + 16 * field.values().len());
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    out.extend_from_slice(&(g.dim() as u64).to_le_bytes());
    out.extend_from_slice(&(g.points() as u64).to_le_bytes());
    out.extend_from_slice(&g.half_width().to_le_bytes());
    out.extend_from_slice(&field.time().to_le_bytes());
    for v in field.values() {
        out.extend_from_slice(&v.re.to_le_bytes());
        out.extend_from_slice(&v.im.to_le_bytes());
    }
    out
}

fn word(bytes: &[u8], i: usize) -> [u8; 8] {
    bytes[4 + 8 * i..12 + 8 * i].try_into().expect("header word")
}

fn parse_header(path: &Path, bytes: &[u8]) -> Result<Header> {
    if bytes.len() < HEADER_LEN || &bytes[..4] != MAGIC {
        return Err(bad(path, "not an MNLS snapshot"));
    }
    let version = u64::from_le_bytes(word(bytes, 0));
    if version != VERSION {
        return Err(bad(path, format!("unsupported version {version}")));
    }
    Ok(Header {
        dim: u64::from_le_bytes(word(bytes, 1)) as usize,
        points: u64::from_le_bytes(word(bytes, 2)) as usize,
        half_width: f64::from_le_bytes(word(bytes, 3)),
        time: f64::from_le_bytes(word(bytes, 4)),
    })
}

pub fn decode(path: &Path, bytes: &[u8]) -> Result<ComplexField> {
    let h = parse_header(path, bytes)?;
    let grid = Grid::new(h.dim, h.half_width, h.points).map_err(|e| bad(path, e.to_string()))?;
    let body = &bytes[HEADER_LEN..];
    if body.len() != 16 * grid.len() {
        return Err(bad(
            path,
            format!("expected {} values, found {} bytes", grid.len(), body.len()),
        ));
    }
    let values = body
        .chunks_exact(16)
        .map(|c| {
            Complex64::new(
                f64::from_le_bytes(c[..8].try_into().expect("re")),
                f64::from_le_bytes(c[8..].try_into().expect("im")),
            )
        })
        .collect();
    ComplexField::new(&grid, values, h.time).map_err(|e| bad(path, e.to_string()))
}

pub fn write(path: &Path, field: &ComplexField) -> Result<()> {
    let bytes = encode(field);
    write_atomic(path, |w| w.write_all(&bytes))
}

pub fn read(path: &Path) -> Result<ComplexField> {
    let bytes = std::fs::read(path).map_err(|e| BenchError::io(path, e))?;
    decode(path, &bytes)
}

pub fn read_header(path: &Path) -> Result<Header> {
    let mut buf = vec![0u8; HEADER_LEN];
    let mut f = std::fs::File::open(path).map_err(|e| BenchError::io(path, e))?;
    f.read_exact(&mut buf).map_err(|_| bad(path, "truncated header"))?;
    parse_header(path, &buf)
}
