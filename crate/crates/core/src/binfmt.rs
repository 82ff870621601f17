//! Little-endian binary container for dense `f32` embedding matrices.
//!
//! ```text
//! bytes 0..4    magic "FSEL"
//! bytes 4..8    u32 version (= 1)
//! bytes 8..12   u32 row count
//! bytes 12..16  u32 dimension
//! bytes 16..    rows * dimension f32 values, row-major
//! ```
//!
//! No trailing bytes are permitted. Query vectors are stored with one row.

use std::io::Cursor;
use std::path::Path;

use byteorder::{LittleEndian, ReadBytesExt, WriteBytesExt};

use crate::error::{Error, Result};
use crate::io;

pub const MAGIC: [u8; 4] = *b"FSEL";
pub const VERSION: u32 = 1;
pub const HEADER_LEN: usize = 16;

/// Raw matrix exactly as stored on disk.
#[derive(Debug, Clone, PartialEq)]
pub struct StoredMatrix {
    pub rows: usize,
    pub dim: usize,
    pub data: Vec<f32>,
}

impl StoredMatrix {
    pub fn new(rows: usize, dim: usize, data: Vec<f32>) -> Result<Self> {
        if data.len() != rows * dim {
            return Err(Error::Format(format!(
                "{} values do not fill a {rows} x {dim} matrix",
                data.len()
            )));
        }
        Ok(StoredMatrix { rows, dim, data })
    }

    pub fn from_rows(rows: &[Vec<f32>]) -> Result<Self> {
        let dim = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != dim) {
            return Err(Error::Format("rows have differing lengths".into()));
        }
        Self::new(rows.len(), dim, rows.concat())
    }

    pub fn row(&self, i: usize) -> &[f32] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }
}

pub fn encode(m: &StoredMatrix) -> Result<Vec<u8>> {
    let rows = u32::try_from(m.rows).map_err(|_| Error::Format("row count exceeds u32".into()))?;
    let dim = u32::try_from(m.dim).map_err(|_| Error::Format("dimension exceeds u32".into()))?;
    let mut out = Vec::with_capacity(HEADER_LEN + 4 * m.data.len());
    out.extend_from_slice(&MAGIC);
    out.write_u32::<LittleEndian>(VERSION).expect("vec write");
    out.write_u32::<LittleEndian>(rows).expect("vec write");
    out.write_u32::<LittleEndian>(dim).expect("vec write");
    for &v in &m.data {
        out.write_f32::<LittleEndian>(v).expect("vec write");
    }
    Ok(out)
}

pub fn decode(bytes: &[u8]) -> Result<StoredMatrix> {
    if bytes.len() < HEADER_LEN {
        return Err(Error::Format(format!(
            "file is {} bytes, shorter than the {HEADER_LEN}-byte header",
            bytes.len()
        )));
    }
    if bytes[..4] != MAGIC {
        return Err(Error::Format(format!(
            "bad magic {:?}, expected \"FSEL\"",
            String::from_utf8_lossy(&bytes[..4])
        )));
    }
    let mut cur = Cursor::new(&bytes[4..HEADER_LEN]);
    let version = cur.read_u32::<LittleEndian>().expect("header length checked");
    let rows = cur.read_u32::<LittleEndian>().expect("header length checked") as usize;
    let dim = cur.read_u32::<LittleEndian>().expect("header length checked") as usize;
    if version != VERSION {
        return Err(Error::Format(format!(
            "unsupported version {version}, expected {VERSION}"
        )));
    }
    if dim == 0 {
        return Err(Error::Format("dimension must be at least 1".into()));
    }
    let expected = rows
        .checked_mul(dim)
        .and_then(|n| n.checked_mul(4))
        .and_then(|n| n.checked_add(HEADER_LEN))
        .ok_or_else(|| Error::Format("header sizes overflow".into()))?;
    if bytes.len() != expected {
        return Err(Error::Format(format!(
            "payload is {} bytes but header declares {rows} x {dim} ({expected} bytes total)",
            bytes.len()
        )));
    }
    let mut cur = Cursor::new(&bytes[HEADER_LEN..]);
    let mut data = vec![0f32; rows * dim];
    cur.read_f32_into::<LittleEndian>(&mut data)
        .expect("payload length checked");
    Ok(StoredMatrix { rows, dim, data })
}

pub fn read_file(path: &Path) -> Result<StoredMatrix> {
    let bytes = io::read_bytes(path)?;
    decode(&bytes).map_err(|e| match e {
        Error::Format(msg) => Error::Format(format!("{}: {msg}", path.display())),
        other => other,
    })
}

pub fn write_file(path: &Path, m: &StoredMatrix) -> Result<()> {
    io::write_atomic(path, &encode(m)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> StoredMatrix {
        StoredMatrix::from_rows(&[vec![1.0, -2.5, 0.0], vec![3.25, 4.0, -0.125]]).unwrap()
    }

    #[test]
    fn header_layout() {
        let bytes = encode(&sample()).unwrap();
        assert_eq!(&bytes[..4], b"FSEL");
        assert_eq!(&bytes[4..8], &[1, 0, 0, 0]);
        assert_eq!(&bytes[8..12], &[2, 0, 0, 0]);
        assert_eq!(&bytes[12..16], &[3, 0, 0, 0]);
        assert_eq!(&bytes[16..20], &1.0f32.to_le_bytes());
        assert_eq!(bytes.len(), 16 + 6 * 4);
    }

    #[test]
    fn decode_inverts_encode() {
        let m = sample();
        assert_eq!(decode(&encode(&m).unwrap()).unwrap(), m);
    }

    #[test]
    fn corrupted_headers_are_format_errors() {
        let good = encode(&sample()).unwrap();

        let mut bad_magic = good.clone();
        bad_magic[..4].copy_from_slice(b"XXXX");
        assert!(matches!(decode(&bad_magic), Err(Error::Format(m)) if m.contains("magic")));

        let mut bad_version = good.clone();
        bad_version[4] = 2;
        assert!(matches!(decode(&bad_version), Err(Error::Format(m)) if m.contains("version")));

        let mut bad_rows = good.clone();
        bad_rows[8] = 3;
        assert!(matches!(decode(&bad_rows), Err(Error::Format(_))));

        let mut trailing = good.clone();
        trailing.push(0);
        assert!(matches!(decode(&trailing), Err(Error::Format(_))));

        assert!(matches!(decode(&good[..10]), Err(Error::Format(_))));
    }
}
