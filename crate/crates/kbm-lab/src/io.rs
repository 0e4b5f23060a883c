//! Persistence helpers: content fingerprints and CSV tables.

use crate::error::Result;
use serde::Serialize;
use sha2::{Digest, Sha256};
use std::path::Path;

/// Hex SHA-256 of a byte slice.
pub fn sha256_hex(bytes: &[u8]) -> String {
    let digest = Sha256::digest(bytes);
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

/// Hex SHA-256 of the JSON serialization of `value`.
pub fn fingerprint<T: Serialize>(value: &T) -> String {
    let json = serde_json::to_vec(value).unwrap_or_default();
    sha256_hex(&json)
}

/// Hex SHA-256 of a file's contents.
pub fn file_sha256(path: &Path) -> Result<String> {
    Ok(sha256_hex(&std::fs::read(path)?))
}

/// Shortest round-trip decimal representation of `x`.
pub fn fmt_f64(x: f64) -> String {
    format!("{x}")
}

/// CSV bytes of a numeric table with the given header.
pub fn table_bytes(header: &[String], rows: impl IntoIterator<Item = Vec<f64>>) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for row in rows {
        w.write_record(row.iter().map(|x| fmt_f64(*x)))?;
    }
    w.into_inner().map_err(|e| crate::error::Error::Io(e.into_error()))
}

/// Writes a numeric table with the given header to `path`.
pub fn write_table(path: &Path, header: &[String], rows: impl IntoIterator<Item = Vec<f64>>) -> Result<()> {
    std::fs::write(path, table_bytes(header, rows)?)?;
    Ok(())
}

/// Reads a numeric table written by [`write_table`], returning header and rows.
pub fn read_table(path: &Path) -> Result<(Vec<String>, Vec<Vec<f64>>)> {
    let mut r = csv::Reader::from_path(path)?;
    let header = r.headers()?.iter().map(str::to_owned).collect();
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        let row = rec
            .iter()
            .map(|s| s.parse::<f64>().map_err(|e| crate::error::Error::Input(format!("bad number `{s}`: {e}"))))
            .collect::<Result<Vec<_>>>()?;
        rows.push(row);
    }
    Ok((header, rows))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sha256_known_vector() {
        assert_eq!(sha256_hex(b"abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    }

    #[test]
    fn table_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("t.csv");
        let header = vec!["t".to_string(), "x".to_string()];
        write_table(&p, &header, vec![vec![0.0, 0.1], vec![1e-300, -2.5e7]]).unwrap();
        let (h, rows) = read_table(&p).unwrap();
        assert_eq!(h, header);
        assert_eq!(rows, vec![vec![0.0, 0.1], vec![1e-300, -2.5e7]]);
    }
}
