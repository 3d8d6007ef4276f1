use std::path::Path;

use super::atomic::write_atomic;
use crate::error::{Error, Result};
use crate::grid_field::ScalarField;

/// Binary 16-bit PGM of `field` in storage order, mapping `[lo, hi]`
/// linearly onto `[0, 65535]` with rounding to nearest and clamping.
pub fn pgm_bytes(field: &ScalarField, range: Option<(f64, f64)>) -> Result<Vec<u8>> {
    let (lo, hi) = range.unwrap_or_else(|| field.min_max());
    if !(lo.is_finite() && hi.is_finite()) || lo == hi {
        return Err(Error::Degenerate(format!("image range [{lo}, {hi}] is empty")));
    }
    let g = field.grid();
    let mut out = format!("P5\n{} {}\n65535\n", g.nx, g.ny).into_bytes();
    out.reserve(2 * g.len());
    let scale = 65535.0 / (hi - lo);
    for &v in field.data() {
        let p = ((v - lo) * scale).round().clamp(0.0, 65535.0) as u16;
        out.extend_from_slice(&p.to_be_bytes());
    }
    Ok(out)
}

pub fn emit_pgm(field: &ScalarField, path: &Path, range: Option<(f64, f64)>) -> Result<()> {
    write_atomic(path, &pgm_bytes(field, range)?)
}
