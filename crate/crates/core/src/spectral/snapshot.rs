//! `SVF1` binary snapshots of dense spectral fields.
//!
//! Layout: magic `SVF1`, `n` as u32, flags as u32 (bit 0 real, bit 1 solenoidal),
//! then for every `k` in lexicographic order over `-n/2+1 ..= n/2` the three
//! components as little-endian `f64` (re, im) pairs.

use std::io::{Read, Write};

use num_complex::Complex64;

use super::field::SpectralField;
use super::grid::GridSpec;
use crate::error::{LabError, Result};

pub const MAGIC: &[u8; 4] = b"SVF1";
pub const FLAG_REAL: u32 = 1;
pub const FLAG_SOLENOIDAL: u32 = 2;

fn lex_order(n: usize) -> impl Iterator<Item = [i64; 3]> {
    let lo = -(n as i64) / 2 + 1;
    let hi = n as i64 / 2;
    (lo..=hi).flat_map(move |a| (lo..=hi).flat_map(move |b| (lo..=hi).map(move |c| [a, b, c])))
}

pub fn write_svf<W: Write>(w: &mut W, f: &SpectralField) -> Result<()> {
    let g = f.grid();
    let n = g.n();
    let mut flags = 0;
    if f.is_real() {
        flags |= FLAG_REAL;
    }
    if f.is_solenoidal() {
        flags |= FLAG_SOLENOIDAL;
    }
    w.write_all(MAGIC)?;
    w.write_all(&(n as u32).to_le_bytes())?;
    w.write_all(&flags.to_le_bytes())?;
    let mut bytes = Vec::with_capacity(n * n * 48);
    for k in lex_order(n) {
        let v = f.get(k);
        for z in v {
            bytes.extend_from_slice(&z.re.to_le_bytes());
            bytes.extend_from_slice(&z.im.to_le_bytes());
        }
        if bytes.len() >= 1 << 20 {
            w.write_all(&bytes)?;
            bytes.clear();
        }
    }
    w.write_all(&bytes)?;
    Ok(())
}

/// Reads a snapshot; returns the field and the stored flags.
pub fn read_svf<R: Read>(r: &mut R) -> Result<(SpectralField, u32)> {
    let mut head = [0u8; 12];
    r.read_exact(&mut head)?;
    if &head[..4] != MAGIC {
        return Err(LabError::Format("bad SVF magic".into()));
    }
    let n = u32::from_le_bytes(head[4..8].try_into().unwrap()) as usize;
    let flags = u32::from_le_bytes(head[8..12].try_into().unwrap());
    let g = GridSpec::new(n)?;
    let mut f = SpectralField::zeros(g);
    let mut rec = [0u8; 48];
    for k in lex_order(n) {
        r.read_exact(&mut rec)?;
        let mut v = [Complex64::default(); 3];
        for (c, z) in v.iter_mut().enumerate() {
            let re = f64::from_le_bytes(rec[16 * c..16 * c + 8].try_into().unwrap());
            let im = f64::from_le_bytes(rec[16 * c + 8..16 * c + 16].try_into().unwrap());
            *z = Complex64::new(re, im);
        }
        if g.in_band(k) {
            f.set(k, v)?;
        } else if v.iter().any(|z| *z != Complex64::default()) {
            return Err(LabError::Format(format!("nonzero Nyquist coefficient at {k:?}")));
        }
    }
    Ok((f, flags))
}
