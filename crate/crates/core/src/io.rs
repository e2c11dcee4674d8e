//! Binary snapshots and JSON-lines output.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::SpectralField;
use crate::grid::GridSpec;

const MAGIC: &[u8; 4] = b"ADLB";
const VERSION: u32 = 1;

/// A vorticity field with its time and viscosity.
#[derive(Clone, Debug)]
pub struct Snapshot {
    pub field: SpectralField,
    pub t: f64,
    pub nu: f64,
}

/// Layout: "ADLB", version u32, nx u32, ny u32, t f64, ν f64, then nx·ny
/// physical values as f64, row-major, all little-endian.
pub fn write_snapshot(path: &Path, field: &SpectralField, t: f64, nu: f64) -> Result<()> {
    let n = field.grid().n() as u32;
    let mut w = BufWriter::new(File::create(path)?);
    w.write_all(MAGIC)?;
    for v in [VERSION, n, n] {
        w.write_all(&v.to_le_bytes())?;
    }
    w.write_all(&t.to_le_bytes())?;
    w.write_all(&nu.to_le_bytes())?;
    for v in field.physical() {
        w.write_all(&v.to_le_bytes())?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_snapshot(path: &Path) -> Result<Snapshot> {
    let bad = |reason: String| Error::Snapshot { path: path.to_path_buf(), reason };
    let mut r = BufReader::new(File::open(path)?);
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(bad(format!("bad magic {magic:?}")));
    }
    let mut u = [0u8; 4];
    let mut read_u32 = |r: &mut BufReader<File>| -> Result<u32> {
        r.read_exact(&mut u)?;
        Ok(u32::from_le_bytes(u))
    };
    let version = read_u32(&mut r)?;
    if version != VERSION {
        return Err(bad(format!("unsupported version {version}")));
    }
    let nx = read_u32(&mut r)? as usize;
    let ny = read_u32(&mut r)? as usize;
    if nx != ny {
        return Err(bad(format!("non-square grid {nx}×{ny}")));
    }
    let grid = GridSpec::new(nx).map_err(|e| bad(e.to_string()))?;
    let mut f = [0u8; 8];
    let mut read_f64 = |r: &mut BufReader<File>| -> Result<f64> {
        r.read_exact(&mut f)?;
        Ok(f64::from_le_bytes(f))
    };
    let t = read_f64(&mut r)?;
    let nu = read_f64(&mut r)?;
    let values = (0..nx * ny)
        .map(|_| read_f64(&mut r))
        .collect::<Result<Vec<f64>>>()
        .map_err(|e| bad(format!("truncated payload: {e}")))?;
    let mut rest = Vec::new();
    r.read_to_end(&mut rest)?;
    if !rest.is_empty() {
        return Err(bad(format!("{} trailing bytes", rest.len())));
    }
    Ok(Snapshot { field: SpectralField::from_physical(&grid, values)?, t, nu })
}

/// Writes one JSON object per line.
pub fn write_json_lines<T: Serialize>(path: &Path, items: &[T]) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    for item in items {
        serde_json::to_writer(&mut w, item)?;
        w.write_all(b"\n")?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn snapshot_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("s.bin");
        let g = GridSpec::new(16).unwrap();
        let f = SpectralField::from_fn(&g, |x, y| (x - y).sin() + 0.25 * x);
        write_snapshot(&path, &f, 0.75, 1e-3).unwrap();
        let s = read_snapshot(&path).unwrap();
        assert_eq!(s.field.physical(), f.physical());
        assert_eq!((s.t, s.nu), (0.75, 1e-3));
        let bytes = std::fs::read(&path).unwrap();
        assert_eq!(&bytes[..4], b"ADLB");
        assert_eq!(bytes.len(), 4 + 12 + 16 + 8 * 256);
    }

    #[test]
    fn corrupt_snapshots_are_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("s.bin");
        let g = GridSpec::new(16).unwrap();
        write_snapshot(&path, &SpectralField::zeros(&g), 0.0, 1.0).unwrap();
        let mut bytes = std::fs::read(&path).unwrap();
        bytes.truncate(bytes.len() - 8);
        std::fs::write(&path, &bytes).unwrap();
        assert!(matches!(read_snapshot(&path), Err(Error::Snapshot { .. })));
        bytes[0] = b'X';
        std::fs::write(&path, &bytes).unwrap();
        assert!(matches!(read_snapshot(&path), Err(Error::Snapshot { .. })));
    }
}
