//! `FHWG` binary grid files.
//!
//! Layout (little endian): magic `FHWG`, `u32` version (1), `u32` dimension
//! `n`, `n` x `u32` axis sizes, `f64` half length, then the samples as `f64`
//! in row-major order.

use std::io::{Read, Write};
use std::path::Path;

use super::{BoxGrid, GridFunction};
use crate::error::{FhwError, Result};

pub const MAGIC: &[u8; 4] = b"FHWG";
pub const VERSION: u32 = 1;

pub fn write<W: Write>(mut w: W, f: &GridFunction) -> Result<()> {
    let grid = f.grid();
    w.write_all(MAGIC)?;
    w.write_all(&VERSION.to_le_bytes())?;
    w.write_all(&(grid.dim() as u32).to_le_bytes())?;
    for &s in grid.sizes() {
        w.write_all(&(s as u32).to_le_bytes())?;
    }
    w.write_all(&grid.half_length().to_le_bytes())?;
    let mut buf = Vec::with_capacity(8 * f.values().len());
    for v in f.values() {
        buf.extend_from_slice(&v.to_le_bytes());
    }
    w.write_all(&buf)?;
    Ok(())
}

fn read_u32<R: Read>(r: &mut R) -> Result<u32> {
    let mut b = [0u8; 4];
    r.read_exact(&mut b)
        .map_err(|e| FhwError::Format(format!("truncated header: {e}")))?;
    Ok(u32::from_le_bytes(b))
}

pub fn read<R: Read>(mut r: R) -> Result<GridFunction> {
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic)
        .map_err(|e| FhwError::Format(format!("truncated header: {e}")))?;
    if &magic != MAGIC {
        return Err(FhwError::Format(format!("bad magic {magic:?}")));
    }
    let version = read_u32(&mut r)?;
    if version != VERSION {
        return Err(FhwError::Format(format!("unsupported version {version}")));
    }
    let n = read_u32(&mut r)? as usize;
    if !(1..=3).contains(&n) {
        return Err(FhwError::Format(format!("dimension {n} out of range")));
    }
    let mut sizes = Vec::with_capacity(n);
    for _ in 0..n {
        sizes.push(read_u32(&mut r)? as usize);
    }
    let mut b = [0u8; 8];
    r.read_exact(&mut b)
        .map_err(|e| FhwError::Format(format!("truncated header: {e}")))?;
    let half_length = f64::from_le_bytes(b);
    let grid = BoxGrid::new(sizes, half_length).map_err(|e| FhwError::Format(e.to_string()))?;
    let mut raw = vec![0u8; 8 * grid.len()];
    r.read_exact(&mut raw)
        .map_err(|e| FhwError::Format(format!("truncated sample block: {e}")))?;
    let values = raw
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect();
    let mut rest = Vec::new();
    r.read_to_end(&mut rest)?;
    if !rest.is_empty() {
        return Err(FhwError::Format(format!("{} trailing bytes", rest.len())));
    }
    GridFunction::new(grid, values).map_err(|e| FhwError::Format(e.to_string()))
}

pub fn write_file(path: impl AsRef<Path>, f: &GridFunction) -> Result<()> {
    let file = std::fs::File::create(path)?;
    write(std::io::BufWriter::new(file), f)
}

pub fn read_file(path: impl AsRef<Path>) -> Result<GridFunction> {
    let file = std::fs::File::open(path)?;
    read(std::io::BufReader::new(file))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_bytes() {
        let g = BoxGrid::new(vec![8, 16], 2.5).unwrap();
        let f = GridFunction::from_fn(g, |x| x[0] * 3.0 - x[1]).unwrap();
        let mut buf = Vec::new();
        write(&mut buf, &f).unwrap();
        assert_eq!(&buf[..4], b"FHWG");
        assert_eq!(buf.len(), 4 + 4 + 4 + 8 + 8 + 8 * 128);
        let back = read(&buf[..]).unwrap();
        assert_eq!(back, f);
    }

    #[test]
    fn malformed_inputs() {
        assert!(matches!(read(&b"XXXX"[..]), Err(FhwError::Format(_))));
        let g = BoxGrid::cube(1, 8, 1.0).unwrap();
        let f = GridFunction::zeros(g);
        let mut buf = Vec::new();
        write(&mut buf, &f).unwrap();
        assert!(read(&buf[..buf.len() - 3]).is_err());
        buf.push(0);
        assert!(read(&buf[..]).is_err());
        let mut bad = buf.clone();
        bad[4] = 9;
        assert!(read(&bad[..bad.len() - 1]).is_err());
    }
}
