//! Little-endian float64 payloads, base64 embedding and grid dumps.

use crate::error::{Error, Result};
use base64::engine::general_purpose::STANDARD;
use base64::Engine;
use serde::Serialize;
use std::path::Path;

pub fn encode_f64(values: &[f64]) -> String {
    let bytes: Vec<u8> = values.iter().flat_map(|v| v.to_le_bytes()).collect();
    STANDARD.encode(bytes)
}

pub fn decode_f64(text: &str) -> Result<Vec<f64>> {
    let bytes = STANDARD
        .decode(text)
        .map_err(|e| Error::Format(format!("base64: {e}")))?;
    f64_from_le_bytes(&bytes)
}

pub fn f64_from_le_bytes(bytes: &[u8]) -> Result<Vec<f64>> {
    if bytes.len() % 8 != 0 {
        return Err(Error::Format(format!(
            "payload of {} bytes is not a whole number of float64 values",
            bytes.len()
        )));
    }
    Ok(bytes
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect())
}

/// Writes `values` to `<path>.f64` and `header` to `<path>.json`.
pub fn write_f64_with_header<H: Serialize>(path: &Path, values: &[f64], header: &H) -> Result<()> {
    let bytes: Vec<u8> = values.iter().flat_map(|v| v.to_le_bytes()).collect();
    std::fs::write(path.with_extension("f64"), bytes)?;
    std::fs::write(path.with_extension("json"), serde_json::to_string_pretty(header)?)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn base64_roundtrip_is_bit_exact() {
        let v = vec![1.0, -0.0, f64::MIN_POSITIVE, 1e300, std::f64::consts::PI];
        let back = decode_f64(&encode_f64(&v)).unwrap();
        assert_eq!(
            v.iter().map(|x| x.to_bits()).collect::<Vec<_>>(),
            back.iter().map(|x| x.to_bits()).collect::<Vec<_>>()
        );
    }

    #[test]
    fn ragged_payload_is_rejected() {
        assert!(f64_from_le_bytes(&[0u8; 7]).is_err());
    }
}
