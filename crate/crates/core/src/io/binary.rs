//! Little-endian binary containers for grids (`TAWG`) and traces (`TAWS`).

use std::path::Path;

use super::atomic::{read_file, write_atomic};
use crate::error::{Error, Result};
use crate::grid_field::{Grid, ScalarField};
use crate::wave::BoundaryTrace;

pub const GRID_MAGIC: [u8; 4] = *b"TAWG";
pub const TRACE_MAGIC: [u8; 4] = *b"TAWS";
pub const VERSION: u32 = 1;
pub const GRID_HEADER_LEN: usize = 48;
pub const TRACE_HEADER_LEN: usize = 32;

struct Cursor<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn new(buf: &'a [u8]) -> Self {
        Cursor { buf, pos: 0 }
    }

    fn fail(&self, offset: usize, message: impl Into<String>) -> Error {
        Error::Format {
            offset: offset as u64,
            message: message.into(),
        }
    }

    fn take(&mut self, n: usize, what: &str) -> Result<&'a [u8]> {
        if self.buf.len() - self.pos < n {
            return Err(self.fail(
                self.buf.len(),
                format!("truncated {what}: need {n} bytes at offset {}, file has {}", self.pos, self.buf.len()),
            ));
        }
        let s = &self.buf[self.pos..self.pos + n];
        self.pos += n;
        Ok(s)
    }

    fn magic(&mut self, expected: [u8; 4]) -> Result<()> {
        let m = self.take(4, "magic")?;
        if m != expected {
            return Err(self.fail(
                0,
                format!(
                    "bad magic {:?}, expected {:?}",
                    String::from_utf8_lossy(m),
                    String::from_utf8_lossy(&expected)
                ),
            ));
        }
        Ok(())
    }

    fn u32(&mut self, what: &str) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4, what)?.try_into().unwrap()))
    }

    fn u64(&mut self, what: &str) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8, what)?.try_into().unwrap()))
    }

    fn f64(&mut self, what: &str) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take(8, what)?.try_into().unwrap()))
    }

    fn version(&mut self) -> Result<()> {
        let at = self.pos;
        let v = self.u32("version")?;
        if v != VERSION {
            return Err(self.fail(at, format!("unsupported version {v}, expected {VERSION}")));
        }
        Ok(())
    }

    /// Reads `count` finite f64 values, checking the exact payload length
    /// first.
    fn payload(&mut self, count: usize, what: &str) -> Result<Vec<f64>> {
        let start = self.pos;
        let need = count
            .checked_mul(8)
            .ok_or_else(|| self.fail(start, format!("{what} size overflows")))?;
        let have = self.buf.len() - start;
        if have != need {
            return Err(self.fail(
                start,
                format!("{what} payload should be {need} bytes, found {have}"),
            ));
        }
        let bytes = self.take(need, what)?;
        let mut out = Vec::with_capacity(count);
        for (n, c) in bytes.chunks_exact(8).enumerate() {
            let v = f64::from_le_bytes(c.try_into().unwrap());
            if !v.is_finite() {
                return Err(self.fail(start + 8 * n, format!("non-finite value in {what}")));
            }
            out.push(v);
        }
        Ok(out)
    }
}

pub fn encode_grid(field: &ScalarField) -> Vec<u8> {
    let g = field.grid();
    let mut b = Vec::with_capacity(GRID_HEADER_LEN + 8 * g.len());
    b.extend_from_slice(&GRID_MAGIC);
    b.extend_from_slice(&VERSION.to_le_bytes());
    b.extend_from_slice(&(g.nx as u64).to_le_bytes());
    b.extend_from_slice(&(g.ny as u64).to_le_bytes());
    for v in [g.ox, g.oy, g.h] {
        b.extend_from_slice(&v.to_le_bytes());
    }
    for v in field.data() {
        b.extend_from_slice(&v.to_le_bytes());
    }
    b
}

pub fn decode_grid(bytes: &[u8]) -> Result<ScalarField> {
    let mut c = Cursor::new(bytes);
    c.magic(GRID_MAGIC)?;
    c.version()?;
    let nx = c.u64("nx")?;
    let ny = c.u64("ny")?;
    let ox = c.f64("ox")?;
    let oy = c.f64("oy")?;
    let h = c.f64("h")?;
    let grid = usize::try_from(nx)
        .ok()
        .zip(usize::try_from(ny).ok())
        .ok_or_else(|| c.fail(8, "grid size does not fit in memory"))
        .and_then(|(nx, ny)| Grid::new(nx, ny, h, ox, oy).map_err(|e| c.fail(8, format!("invalid grid header: {e}"))))?;
    let n = grid.nx.checked_mul(grid.ny).ok_or_else(|| c.fail(8, "grid size overflows"))?;
    let data = c.payload(n, "grid data")?;
    ScalarField::from_vec(grid, data)
}

pub fn encode_trace(trace: &BoundaryTrace) -> Vec<u8> {
    let mut b = Vec::with_capacity(TRACE_HEADER_LEN + 16 * trace.n_det() + 8 * trace.values().len());
    b.extend_from_slice(&TRACE_MAGIC);
    b.extend_from_slice(&VERSION.to_le_bytes());
    b.extend_from_slice(&(trace.n_times() as u64).to_le_bytes());
    b.extend_from_slice(&(trace.n_det() as u64).to_le_bytes());
    b.extend_from_slice(&trace.dt().to_le_bytes());
    for &(x, y) in trace.points() {
        b.extend_from_slice(&x.to_le_bytes());
        b.extend_from_slice(&y.to_le_bytes());
    }
    for v in trace.values() {
        b.extend_from_slice(&v.to_le_bytes());
    }
    b
}

/// The decoded trace carries detector coordinates only; bind it to a region
/// with [`BoundaryTrace::bind`] before solving.
pub fn decode_trace(bytes: &[u8]) -> Result<BoundaryTrace> {
    let mut c = Cursor::new(bytes);
    c.magic(TRACE_MAGIC)?;
    c.version()?;
    let n_times = c.u64("n_times")?;
    let n_det = c.u64("n_det")?;
    let dt = c.f64("dt")?;
    if n_times == 0 || n_det == 0 {
        return Err(c.fail(8, "trace must have at least one time level and one detector"));
    }
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(c.fail(24, format!("time step must be positive, got {dt}")));
    }
    let n_det = usize::try_from(n_det).map_err(|_| c.fail(16, "detector count too large"))?;
    let n_times = usize::try_from(n_times).map_err(|_| c.fail(8, "time count too large"))?;
    let coord_bytes = n_det.checked_mul(16).ok_or_else(|| c.fail(16, "detector count too large"))?;
    let coords = c.take(coord_bytes, "detector coordinates")?;
    let mut points = Vec::with_capacity(n_det);
    for (n, p) in coords.chunks_exact(16).enumerate() {
        let x = f64::from_le_bytes(p[..8].try_into().unwrap());
        let y = f64::from_le_bytes(p[8..].try_into().unwrap());
        if !(x.is_finite() && y.is_finite()) {
            return Err(c.fail(TRACE_HEADER_LEN + 16 * n, "non-finite detector coordinate"));
        }
        points.push((x, y));
    }
    let count = n_times.checked_mul(n_det).ok_or_else(|| c.fail(8, "trace size overflows"))?;
    let values = c.payload(count, "trace values")?;
    BoundaryTrace::new(dt, points, Vec::new(), values)
}

pub fn write_grid(path: &Path, field: &ScalarField) -> Result<()> {
    write_atomic(path, &encode_grid(field))
}

pub fn read_grid(path: &Path) -> Result<ScalarField> {
    decode_grid(&read_file(path)?)
}

pub fn write_trace(path: &Path, trace: &BoundaryTrace) -> Result<()> {
    write_atomic(path, &encode_trace(trace))
}

pub fn read_trace(path: &Path) -> Result<BoundaryTrace> {
    decode_trace(&read_file(path)?)
}
