//! MatrixMarket coordinate / array I/O for fixtures and debug dumps.

use std::io::{BufRead, BufReader, Read, Write};

use super::{CsrMatrix, DenseColumnBlock};
use crate::error::{Error, Result};

const COORD_HEADER: &str = "%%MatrixMarket matrix coordinate real general";
const ARRAY_HEADER: &str = "%%MatrixMarket matrix array real general";

/// Writes `a` in coordinate format with 1-based indices, rows in order.
pub fn write_csr<W: Write>(mut w: W, a: &CsrMatrix<f64>) -> Result<()> {
    writeln!(w, "{COORD_HEADER}")?;
    writeln!(w, "{} {} {}", a.nrows(), a.ncols(), a.nnz())?;
    for i in 0..a.nrows() {
        let (cols, vals) = a.row(i);
        for (&c, &v) in cols.iter().zip(vals) {
            writeln!(w, "{} {} {:e}", i + 1, c + 1, v)?;
        }
    }
    Ok(())
}

/// Reads a coordinate-format real matrix (`general` or `symmetric`).
/// Duplicate entries are summed.
pub fn read_csr<R: Read>(r: R) -> Result<CsrMatrix<f64>> {
    let mut lines = BufReader::new(r).lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::MatrixMarket("empty input".into()))??;
    let lower = header.to_ascii_lowercase();
    let fields: Vec<&str> = lower.split_whitespace().collect();
    if fields.len() < 5 || fields[0] != "%%matrixmarket" || fields[1] != "matrix" {
        return Err(Error::MatrixMarket(format!("bad header: {header}")));
    }
    if fields[2] != "coordinate" || fields[3] != "real" {
        return Err(Error::MatrixMarket(format!(
            "unsupported format {} {}",
            fields[2], fields[3]
        )));
    }
    let symmetric = match fields[4] {
        "general" => false,
        "symmetric" => true,
        other => return Err(Error::MatrixMarket(format!("unsupported symmetry {other}"))),
    };
    let mut size: Option<(usize, usize, usize)> = None;
    let mut trip = Vec::new();
    for line in lines {
        let line = line?;
        let t = line.trim();
        if t.is_empty() || t.starts_with('%') {
            continue;
        }
        let parts: Vec<&str> = t.split_whitespace().collect();
        match size {
            None => {
                if parts.len() != 3 {
                    return Err(Error::MatrixMarket(format!("bad size line: {t}")));
                }
                let p = |s: &str| {
                    s.parse::<usize>()
                        .map_err(|e| Error::MatrixMarket(format!("{s}: {e}")))
                };
                let s = (p(parts[0])?, p(parts[1])?, p(parts[2])?);
                trip.reserve(if symmetric { 2 * s.2 } else { s.2 });
                size = Some(s);
            }
            Some((m, n, _)) => {
                if parts.len() != 3 {
                    return Err(Error::MatrixMarket(format!("bad entry line: {t}")));
                }
                let idx = |s: &str, bound: usize| -> Result<usize> {
                    let v = s
                        .parse::<usize>()
                        .map_err(|e| Error::MatrixMarket(format!("{s}: {e}")))?;
                    if v == 0 || v > bound {
                        return Err(Error::MatrixMarket(format!("index {v} out of 1..={bound}")));
                    }
                    Ok(v - 1)
                };
                let i = idx(parts[0], m)?;
                let j = idx(parts[1], n)?;
                let v = parts[2]
                    .parse::<f64>()
                    .map_err(|e| Error::MatrixMarket(format!("{}: {e}", parts[2])))?;
                trip.push((i, j, v));
                if symmetric && i != j {
                    trip.push((j, i, v));
                }
            }
        }
    }
    let (m, n, nnz) = size.ok_or_else(|| Error::MatrixMarket("missing size line".into()))?;
    let stored = if symmetric {
        trip.iter().filter(|t| t.0 >= t.1).count()
    } else {
        trip.len()
    };
    if stored != nnz {
        return Err(Error::MatrixMarket(format!(
            "expected {nnz} entries, found {stored}"
        )));
    }
    CsrMatrix::from_triplets(m, n, &trip)
}

/// Writes a dense block in column-major array format.
pub fn write_dense<W: Write>(mut w: W, z: &DenseColumnBlock<f64>) -> Result<()> {
    writeln!(w, "{ARRAY_HEADER}")?;
    writeln!(w, "{} {}", z.nrows(), z.ncols())?;
    for v in z.values() {
        writeln!(w, "{v:e}")?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_general() {
        let a = CsrMatrix::from_triplets(
            3,
            2,
            &[(0, 0, 1.5), (2, 1, -0.1), (1, 0, 1e-20)],
        )
        .unwrap();
        let mut buf = Vec::new();
        write_csr(&mut buf, &a).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with(COORD_HEADER));
        assert!(text.contains("3 2 -1e-1"));
        assert_eq!(read_csr(&buf[..]).unwrap(), a);
    }

    #[test]
    fn reads_symmetric_storage() {
        let text = "%%MatrixMarket matrix coordinate real symmetric\n% c\n2 2 2\n1 1 2\n2 1 -1\n";
        let a = read_csr(text.as_bytes()).unwrap();
        assert_eq!(a.to_dense(), vec![2.0, -1.0, -1.0, 0.0]);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(read_csr("%%MatrixMarket matrix array real general\n1 1\n1\n".as_bytes()).is_err());
        assert!(read_csr(
            "%%MatrixMarket matrix coordinate real general\n2 2 1\n3 1 1.0\n".as_bytes()
        )
        .is_err());
        assert!(read_csr(
            "%%MatrixMarket matrix coordinate real general\n2 2 2\n1 1 1.0\n".as_bytes()
        )
        .is_err());
    }
}
