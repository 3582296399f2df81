//! Binary matrix dump: `b"QESM"`, truncation `N` as `u32` little-endian,
//! then the `2(N+1) × 2(N+1)` matrix row-major as `f64` little-endian.

use std::io::{self, Read, Write};

use nalgebra::DMatrix;

pub const MAGIC: [u8; 4] = *b"QESM";

pub fn write_matrix<W: Write>(mut w: W, truncation: usize, m: &DMatrix<f64>) -> io::Result<()> {
    let dim = 2 * (truncation + 1);
    if m.nrows() != dim || m.ncols() != dim {
        return Err(io::Error::new(io::ErrorKind::InvalidInput, "matrix size does not match the truncation"));
    }
    let n = u32::try_from(truncation).map_err(|_| io::Error::new(io::ErrorKind::InvalidInput, "truncation too large"))?;
    w.write_all(&MAGIC)?;
    w.write_all(&n.to_le_bytes())?;
    for i in 0..dim {
        for j in 0..dim {
            w.write_all(&m[(i, j)].to_le_bytes())?;
        }
    }
    w.flush()
}

pub fn read_matrix<R: Read>(mut r: R) -> io::Result<(usize, DMatrix<f64>)> {
    let bad = |msg: &str| io::Error::new(io::ErrorKind::InvalidData, msg.to_string());
    let mut header = [0u8; 8];
    r.read_exact(&mut header)?;
    if header[..4] != MAGIC {
        return Err(bad("bad magic"));
    }
    let n = u32::from_le_bytes(header[4..].try_into().expect("four bytes")) as usize;
    let dim = 2 * (n + 1);
    let mut body = Vec::new();
    r.read_to_end(&mut body)?;
    if body.len() != dim * dim * 8 {
        return Err(bad("payload length does not match the header"));
    }
    let values: Vec<f64> = body
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("eight bytes")))
        .collect();
    Ok((n, DMatrix::from_row_slice(dim, dim, &values)))
}
