//! Binary field snapshots.
//!
//! ```text
//! offset  size  field
//! 0       4     magic "KGH1"
//! 4       4     n          (u32, little endian)
//! 8       8     L          (f64, little endian)
//! 16      8     gamma      (f64, little endian)
//! 24      8     t          (f64, little endian)
//! 32      1     kind       (0 = position, 1 = velocity)
//! 33      8n³   samples    (f64 little endian, x fastest)
//! ```
//!
//! Samples are physical-space values; the spectrum can be recovered with the
//! forward transform `f̂(ξ_k) = (L/n)^3 (2π)^{-3/2} Σ_x f(x) e^{-iξ_k·x}`.

use std::io::{Read, Write};

use super::{GridSpec, RealField};
use crate::error::{KghError, Result};

pub const MAGIC: &[u8; 4] = b"KGH1";
pub const HEADER_LEN: usize = 33;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u8)]
pub enum FieldKind {
    Position = 0,
    Velocity = 1,
}

impl TryFrom<u8> for FieldKind {
    type Error = KghError;

    fn try_from(v: u8) -> Result<Self> {
        match v {
            0 => Ok(FieldKind::Position),
            1 => Ok(FieldKind::Velocity),
            other => Err(KghError::Format(format!("unknown field kind {other}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub field: RealField,
    pub time: f64,
    pub kind: FieldKind,
}

pub fn write_snapshot<W: Write>(
    mut w: W,
    field: &RealField,
    time: f64,
    kind: FieldKind,
) -> Result<()> {
    let g = field.grid();
    let n = u32::try_from(g.n()).map_err(|_| KghError::Format("n exceeds u32".into()))?;
    let mut buf = Vec::with_capacity(HEADER_LEN + 8 * g.len());
    buf.extend_from_slice(MAGIC);
    buf.extend_from_slice(&n.to_le_bytes());
    buf.extend_from_slice(&g.box_length().to_le_bytes());
    buf.extend_from_slice(&g.gamma().to_le_bytes());
    buf.extend_from_slice(&time.to_le_bytes());
    buf.push(kind as u8);
    for v in field.values() {
        buf.extend_from_slice(&v.to_le_bytes());
    }
    w.write_all(&buf)?;
    Ok(())
}

pub fn read_snapshot<R: Read>(mut r: R) -> Result<Snapshot> {
    let mut header = [0u8; HEADER_LEN];
    r.read_exact(&mut header)
        .map_err(|e| KghError::Format(format!("truncated header: {e}")))?;
    if &header[0..4] != MAGIC {
        return Err(KghError::Format("bad magic".into()));
    }
    let f64_at = |o: usize| f64::from_le_bytes(header[o..o + 8].try_into().unwrap());
    let n = u32::from_le_bytes(header[4..8].try_into().unwrap()) as usize;
    let grid = GridSpec::new(n, f64_at(8), f64_at(16))?;
    let time = f64_at(24);
    let kind = FieldKind::try_from(header[32])?;

    let mut body = vec![0u8; 8 * grid.len()];
    r.read_exact(&mut body)
        .map_err(|e| KghError::Format(format!("truncated samples: {e}")))?;
    let values = body
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect();
    Ok(Snapshot {
        field: RealField::new(grid, values)?,
        time,
        kind,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_layout_is_bit_exact() {
        let g = GridSpec::new(8, 2.0, 2.5).unwrap();
        let f = RealField::from_fn(g, |x| x[0] + 10.0 * x[1]).unwrap();
        let mut buf = Vec::new();
        write_snapshot(&mut buf, &f, 0.25, FieldKind::Velocity).unwrap();
        assert_eq!(buf.len(), HEADER_LEN + 8 * 512);
        assert_eq!(&buf[0..4], b"KGH1");
        assert_eq!(&buf[4..8], &[8, 0, 0, 0]);
        assert_eq!(&buf[8..16], &2.0f64.to_le_bytes());
        assert_eq!(&buf[16..24], &2.5f64.to_le_bytes());
        assert_eq!(&buf[24..32], &0.25f64.to_le_bytes());
        assert_eq!(buf[32], 1);
        // second sample is x = L/n, first row, x fastest
        assert_eq!(&buf[41..49], &0.25f64.to_le_bytes());
        // sample 8 starts the next y row
        assert_eq!(&buf[33 + 64..33 + 72], &2.5f64.to_le_bytes());

        let back = read_snapshot(buf.as_slice()).unwrap();
        assert_eq!(back.field, f);
        assert_eq!(back.time, 0.25);
        assert_eq!(back.kind, FieldKind::Velocity);
    }

    #[test]
    fn corrupt_input_rejected() {
        assert!(read_snapshot(&b"KGH0"[..]).is_err());
        let g = GridSpec::new(8, 2.0, 2.5).unwrap();
        let mut buf = Vec::new();
        write_snapshot(&mut buf, &RealField::zeros(g), 0.0, FieldKind::Position).unwrap();
        buf[0] = b'X';
        assert!(read_snapshot(buf.as_slice()).is_err());
        buf[0] = b'K';
        buf[32] = 7;
        assert!(read_snapshot(buf.as_slice()).is_err());
        buf[32] = 0;
        buf.truncate(100);
        assert!(read_snapshot(buf.as_slice()).is_err());
    }
}
