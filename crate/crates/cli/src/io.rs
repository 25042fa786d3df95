//! Artifact formats.
//!
//! * grid binary: eight little-endian `f64` header values
//!   `[L, N, h, x₀ = -L, Δξ, complex flag, ‖f‖₂, 0]`, then the samples row
//!   by row (real parts, or interleaved re/im when the flag is 1);
//! * grid CSV: `N` rows of `N` real parts;
//! * coefficient binary: magic `RLCF`, `u32` version, `u64` count, then the
//!   columns `j: u32`, `ℓ: u32`, `k₁: i64`, `k₂: i64`, `re: f64`, `im: f64`;
//! * coefficient CSV: `j,l,k1,k2,re,im`.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use ridgelab_core::geometry::FrameIndex;
use ridgelab_core::grid::{GridFunction, GridSpec};
use ridgelab_core::seqspace::CurvePoint;
use ridgelab_core::Complex64;
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum IoError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error("malformed {0} file")]
    Format(&'static str),
}

const COEFF_MAGIC: &[u8; 4] = b"RLCF";

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), IoError> {
    let mut w = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut w, value)?;
    w.write_all(b"\n")?;
    Ok(())
}

fn is_real(f: &GridFunction) -> bool {
    f.values.iter().all(|v| v.im == 0.0)
}

pub fn write_grid_bin(path: &Path, f: &GridFunction) -> Result<(), IoError> {
    let g = f.spec;
    let complex = !is_real(f);
    let header = [g.l, g.n as f64, g.h(), -g.l, g.dxi(), if complex { 1.0 } else { 0.0 }, f.l2_norm(), 0.0];
    let mut w = BufWriter::new(File::create(path)?);
    for v in header {
        w.write_all(&v.to_le_bytes())?;
    }
    for v in &f.values {
        w.write_all(&v.re.to_le_bytes())?;
        if complex {
            w.write_all(&v.im.to_le_bytes())?;
        }
    }
    w.flush()?;
    Ok(())
}

fn read_f64(r: &mut impl Read) -> Result<f64, IoError> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(f64::from_le_bytes(b))
}

pub fn read_grid_bin(path: &Path) -> Result<GridFunction, IoError> {
    let mut r = BufReader::new(File::open(path)?);
    let mut h = [0.0; 8];
    for v in h.iter_mut() {
        *v = read_f64(&mut r)?;
    }
    let spec = GridSpec::new(h[0], h[1] as usize).map_err(|_| IoError::Format("grid"))?;
    let complex = h[5] == 1.0;
    let values = (0..spec.len())
        .map(|_| Ok(Complex64::new(read_f64(&mut r)?, if complex { read_f64(&mut r)? } else { 0.0 })))
        .collect::<Result<Vec<_>, IoError>>()?;
    GridFunction::from_values(spec, values).map_err(|_| IoError::Format("grid"))
}

pub fn write_grid_csv(path: &Path, f: &GridFunction) -> Result<(), IoError> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_path(path)?;
    for row in f.values.chunks(f.spec.n) {
        w.serialize(row.iter().map(|v| v.re).collect::<Vec<_>>())?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_coefficients_csv<'a>(
    path: &Path,
    entries: impl IntoIterator<Item = &'a (FrameIndex, Complex64)>,
) -> Result<(), IoError> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["j", "l", "k1", "k2", "re", "im"])?;
    for (lam, v) in entries {
        w.serialize((lam.j, lam.l, lam.k[0], lam.k[1], v.re, v.im))?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_coefficients_bin(path: &Path, entries: &[(FrameIndex, Complex64)]) -> Result<(), IoError> {
    let mut w = BufWriter::new(File::create(path)?);
    w.write_all(COEFF_MAGIC)?;
    w.write_all(&1u32.to_le_bytes())?;
    w.write_all(&(entries.len() as u64).to_le_bytes())?;
    for (lam, _) in entries {
        w.write_all(&lam.j.to_le_bytes())?;
    }
    for (lam, _) in entries {
        w.write_all(&lam.l.to_le_bytes())?;
    }
    for col in 0..2 {
        for (lam, _) in entries {
            w.write_all(&lam.k[col].to_le_bytes())?;
        }
    }
    for (_, v) in entries {
        w.write_all(&v.re.to_le_bytes())?;
    }
    for (_, v) in entries {
        w.write_all(&v.im.to_le_bytes())?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_coefficients_bin(path: &Path) -> Result<Vec<(FrameIndex, Complex64)>, IoError> {
    let mut bytes = Vec::new();
    File::open(path)?.read_to_end(&mut bytes)?;
    if bytes.len() < 16 || &bytes[..4] != COEFF_MAGIC {
        return Err(IoError::Format("coefficient"));
    }
    let n = u64::from_le_bytes(bytes[8..16].try_into().expect("8 bytes")) as usize;
    if bytes.len() != 16 + n * 40 {
        return Err(IoError::Format("coefficient"));
    }
    let body = &bytes[16..];
    let u32_at = |i: usize| u32::from_le_bytes(body[4 * i..4 * i + 4].try_into().expect("4 bytes"));
    let w8 = |off: usize, i: usize| -> [u8; 8] { body[off + 8 * i..off + 8 * i + 8].try_into().expect("8 bytes") };
    Ok((0..n)
        .map(|i| {
            let lam = FrameIndex {
                j: u32_at(i),
                l: u32_at(n + i),
                k: [i64::from_le_bytes(w8(8 * n, i)), i64::from_le_bytes(w8(16 * n, i))],
            };
            let v = Complex64::new(f64::from_le_bytes(w8(24 * n, i)), f64::from_le_bytes(w8(32 * n, i)));
            (lam, v)
        })
        .collect())
}

pub fn write_curve_csv(path: &Path, curve: &[CurvePoint]) -> Result<(), IoError> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["N", "error_L2", "error_Hs"])?;
    for p in curve {
        w.serialize((p.n, p.error_l2, p.error_hs))?;
    }
    w.flush()?;
    Ok(())
}

// floats go through `serialize`, which prints the shortest round-trip form

/// Generic table writer for `data.csv` files.
pub fn write_table<S: Serialize>(path: &Path, rows: &[S]) -> Result<(), IoError> {
    let mut w = csv::Writer::from_path(path)?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let g = GridSpec::new(1.5, 8).unwrap();
        for complex in [false, true] {
            let f = GridFunction::from_complex(g, |x| Complex64::new(x[0] - 2.0 * x[1], if complex { x[0] } else { 0.0 }));
            let p = dir.path().join("f.bin");
            write_grid_bin(&p, &f).unwrap();
            assert_eq!(std::fs::metadata(&p).unwrap().len() as usize, 8 * (8 + 64 * if complex { 2 } else { 1 }));
            assert_eq!(read_grid_bin(&p).unwrap(), f);
        }
        let f = GridFunction::from_real(g, |x| x[0]);
        let p = dir.path().join("f.csv");
        write_grid_csv(&p, &f).unwrap();
        let text = std::fs::read_to_string(&p).unwrap();
        assert_eq!(text.lines().count(), 8);
        assert_eq!(text.lines().next().unwrap().split(',').next().unwrap(), "-1.5");
    }

    #[test]
    fn coefficient_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let e = vec![
            (FrameIndex { j: 0, l: 0, k: [-3, 4] }, Complex64::new(0.5, -1.0)),
            (FrameIndex { j: 5, l: 17, k: [12, -40] }, Complex64::new(1e-300, 3.25)),
        ];
        let p = dir.path().join("c.bin");
        write_coefficients_bin(&p, &e).unwrap();
        assert_eq!(read_coefficients_bin(&p).unwrap(), e);
        let p = dir.path().join("c.csv");
        write_coefficients_csv(&p, &e).unwrap();
        let text = std::fs::read_to_string(&p).unwrap();
        assert_eq!(text.lines().nth(2).unwrap(), "5,17,12,-40,1e-300,3.25");
    }
}
