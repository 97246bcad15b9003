//! Wavefunction dump formats.
//!
//! One-particle: CSV with header `x,re,im`, one row per sample, floats in
//! shortest round-trip form.
//!
//! Two-particle: little-endian binary
//!
//! ```text
//! magic    4 bytes  b"DGW2"
//! version  u32      1
//! n1       u64, x_min1 f64, x_max1 f64
//! n2       u64, x_min2 f64, x_max2 f64
//! data     n1 * n2 pairs (re f64, im f64), row-major: index i * n2 + j
//! ```

use std::io::{self, BufRead, Read, Write};

use num_complex::Complex64;

use crate::grid::{Amplitudes, Grid1D, WaveFn, WaveFn2};

pub const MAGIC: &[u8; 4] = b"DGW2";
pub const VERSION: u32 = 1;

pub fn write_csv<W: Write>(psi: &WaveFn, mut out: W) -> io::Result<()> {
    writeln!(out, "x,re,im")?;
    let grid = psi.grid();
    for (i, a) in psi.amps().iter().enumerate() {
        writeln!(out, "{},{},{}", grid.x(i), a.re, a.im)?;
    }
    Ok(())
}

fn invalid(msg: impl Into<String>) -> io::Error {
    io::Error::new(io::ErrorKind::InvalidData, msg.into())
}

/// Reads a CSV dump back onto `grid`; the sample count must match.
pub fn read_csv<R: BufRead>(grid: Grid1D, input: R) -> io::Result<WaveFn> {
    let mut lines = input.lines();
    match lines.next() {
        Some(Ok(h)) if h.trim() == "x,re,im" => {}
        _ => return Err(invalid("missing `x,re,im` header")),
    }
    let mut amps = Vec::with_capacity(grid.n());
    for line in lines {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 3 {
            return Err(invalid(format!("expected 3 fields, got `{line}`")));
        }
        let parse = |s: &str| s.trim().parse::<f64>().map_err(|e| invalid(e.to_string()));
        amps.push(Complex64::new(parse(fields[1])?, parse(fields[2])?));
    }
    WaveFn::new(grid, amps).map_err(|e| invalid(e.to_string()))
}

pub fn write_binary<W: Write>(psi: &WaveFn2, mut out: W) -> io::Result<()> {
    out.write_all(MAGIC)?;
    out.write_all(&VERSION.to_le_bytes())?;
    for g in [psi.grid1(), psi.grid2()] {
        out.write_all(&(g.n() as u64).to_le_bytes())?;
        out.write_all(&g.x_min().to_le_bytes())?;
        out.write_all(&g.x_max().to_le_bytes())?;
    }
    for a in psi.amps() {
        out.write_all(&a.re.to_le_bytes())?;
        out.write_all(&a.im.to_le_bytes())?;
    }
    Ok(())
}

pub fn read_binary<R: Read>(mut input: R) -> io::Result<WaveFn2> {
    let mut magic = [0u8; 4];
    input.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(invalid("bad magic"));
    }
    let mut u32buf = [0u8; 4];
    input.read_exact(&mut u32buf)?;
    let version = u32::from_le_bytes(u32buf);
    if version != VERSION {
        return Err(invalid(format!("unsupported version {version}")));
    }
    let mut b8 = [0u8; 8];
    let mut read_f64 = |input: &mut R| -> io::Result<f64> {
        input.read_exact(&mut b8)?;
        Ok(f64::from_le_bytes(b8))
    };
    let mut grids = Vec::with_capacity(2);
    for _ in 0..2 {
        let mut nb = [0u8; 8];
        input.read_exact(&mut nb)?;
        let n = u64::from_le_bytes(nb) as usize;
        let x_min = read_f64(&mut input)?;
        let x_max = read_f64(&mut input)?;
        grids.push(Grid1D::new(n, x_min, x_max).map_err(|e| invalid(e.to_string()))?);
    }
    let count = grids[0].n() * grids[1].n();
    let mut amps = Vec::with_capacity(count);
    for _ in 0..count {
        let re = read_f64(&mut input)?;
        let im = read_f64(&mut input)?;
        amps.push(Complex64::new(re, im));
    }
    WaveFn2::new(grids[0], grids[1], amps).map_err(|e| invalid(e.to_string()))
}
