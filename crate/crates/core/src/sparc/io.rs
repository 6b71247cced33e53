//! Source-block files: raw little-endian `f64` arrays or CSV with one
//! sample per line and no header.

use std::fs;
use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};

/// Storage format of a source block.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SampleFormat {
    F64Le,
    Csv,
}

impl SampleFormat {
    /// `.csv` files are CSV; everything else is raw `f64`.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("csv") => SampleFormat::Csv,
            _ => SampleFormat::F64Le,
        }
    }
}

pub fn decode_f64_le(bytes: &[u8]) -> Result<Vec<f64>> {
    if !bytes.len().is_multiple_of(8) {
        return Err(Error::domain(format!("raw sample file length {} is not a multiple of 8", bytes.len())));
    }
    Ok(bytes.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().expect("chunk of 8"))).collect())
}

pub fn encode_f64_le(samples: &[f64]) -> Vec<u8> {
    samples.iter().flat_map(|v| v.to_le_bytes()).collect()
}

pub fn parse_csv_samples(text: &[u8]) -> Result<Vec<f64>> {
    let mut reader = csv::ReaderBuilder::new().has_headers(false).trim(csv::Trim::All).from_reader(text);
    let mut out = Vec::new();
    for (line, record) in reader.records().enumerate() {
        let record = record?;
        if record.len() != 1 {
            return Err(Error::domain(format!(
                "line {}: expected one sample, found {} fields",
                line + 1,
                record.len()
            )));
        }
        let v: f64 = record[0]
            .parse()
            .map_err(|e| Error::domain(format!("line {}: cannot parse {:?}: {e}", line + 1, &record[0])))?;
        out.push(v);
    }
    Ok(out)
}

pub fn format_csv_samples(samples: &[f64]) -> Vec<u8> {
    let mut out = Vec::with_capacity(samples.len() * 20);
    for v in samples {
        // `{}` on f64 is the shortest representation that round-trips
        writeln!(out, "{v}").expect("write to Vec");
    }
    out
}

pub fn read_samples(path: &Path) -> Result<Vec<f64>> {
    let bytes = fs::read(path)?;
    match SampleFormat::from_path(path) {
        SampleFormat::F64Le => decode_f64_le(&bytes),
        SampleFormat::Csv => parse_csv_samples(&bytes),
    }
}

pub fn write_samples(path: &Path, samples: &[f64]) -> Result<()> {
    let bytes = match SampleFormat::from_path(path) {
        SampleFormat::F64Le => encode_f64_le(samples),
        SampleFormat::Csv => format_csv_samples(samples),
    };
    fs::write(path, bytes)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trips_both_formats() {
        let dir = tempfile::tempdir().unwrap();
        let samples = vec![0.1, -2.5e-300, 1.0 / 3.0, 7.0];
        for name in ["s.bin", "s.csv"] {
            let path = dir.path().join(name);
            write_samples(&path, &samples).unwrap();
            assert_eq!(read_samples(&path).unwrap(), samples);
        }
    }

    #[test]
    fn rejects_malformed_input() {
        assert!(decode_f64_le(&[0u8; 7]).is_err());
        assert!(parse_csv_samples(b"1.0\nabc\n").is_err());
        assert!(parse_csv_samples(b"1.0,2.0\n").is_err());
    }
}
