//! Field serialization: a self-describing binary layout and a lossy PGM
//! grayscale export for quick viewing.
//!
//! Binary layout, all little-endian: magic `UOL1`, then `nx`, `ny` as u64,
//! `h` and the two origin coordinates as f64, then the row-major f64 values.

use std::io::{Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::field::{GridSpec, ScalarField};

const MAGIC: &[u8; 4] = b"UOL1";

impl ScalarField {
    pub fn write_binary(&self, w: &mut impl Write) -> Result<()> {
        w.write_all(MAGIC)?;
        w.write_all(&(self.spec().nx as u64).to_le_bytes())?;
        w.write_all(&(self.spec().ny as u64).to_le_bytes())?;
        w.write_all(&self.spec().h.to_le_bytes())?;
        w.write_all(&self.spec().origin[0].to_le_bytes())?;
        w.write_all(&self.spec().origin[1].to_le_bytes())?;
        for v in self.values() {
            w.write_all(&v.to_le_bytes())?;
        }
        Ok(())
    }

    pub fn read_binary(r: &mut impl Read) -> Result<ScalarField> {
        let mut magic = [0u8; 4];
        r.read_exact(&mut magic)?;
        if &magic != MAGIC {
            return Err(Error::InvalidParameter(format!(
                "bad magic bytes {magic:?}, expected {MAGIC:?}"
            )));
        }
        let mut b8 = [0u8; 8];
        let mut read_u64 = |r: &mut dyn Read| -> Result<u64> {
            r.read_exact(&mut b8)?;
            Ok(u64::from_le_bytes(b8))
        };
        let nx = read_u64(r)? as usize;
        let ny = read_u64(r)? as usize;
        let read_f64 = |r: &mut dyn Read| -> Result<f64> {
            let mut b = [0u8; 8];
            r.read_exact(&mut b)?;
            Ok(f64::from_le_bytes(b))
        };
        let h = read_f64(r)?;
        let ox = read_f64(r)?;
        let oy = read_f64(r)?;
        let spec = GridSpec::new(nx, ny, h, [ox, oy])?;
        let mut values = Vec::with_capacity(spec.len());
        for _ in 0..spec.len() {
            values.push(read_f64(r)?);
        }
        ScalarField::from_values(spec, values)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut file = std::io::BufWriter::new(std::fs::File::create(path)?);
        self.write_binary(&mut file)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<ScalarField> {
        let mut file = std::io::BufReader::new(std::fs::File::open(path)?);
        ScalarField::read_binary(&mut file)
    }

    /// 8-bit binary PGM with the value range mapped linearly onto 0..=255.
    /// Rows are written top-down so the image matches the usual orientation.
    pub fn to_pgm(&self) -> Vec<u8> {
        let (lo, hi) = (self.min(), self.max());
        let span = if hi > lo { hi - lo } else { 1.0 };
        let spec = self.spec();
        let mut out = format!("P5\n{} {}\n255\n", spec.nx, spec.ny).into_bytes();
        for j in (0..spec.ny).rev() {
            for i in 0..spec.nx {
                let t = (self.at(i, j) - lo) / span;
                out.push((t * 255.0).round().clamp(0.0, 255.0) as u8);
            }
        }
        out
    }

    pub fn save_pgm(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_pgm())?;
        Ok(())
    }
}
