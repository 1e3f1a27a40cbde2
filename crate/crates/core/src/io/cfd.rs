//! The native on-disk container for complex fields.
//!
//! Layout: magic `"CDID1"` (5 bytes), height and width as little-endian
//! u32, one dtype byte (0 = f64 pairs), then the payload — row-major
//! samples as interleaved (re, im) little-endian f64. Write → read round
//! trips are bit-exact; sides are capped at 65535.

use std::fs;
use std::path::Path;

use num_complex::Complex;

use crate::error::{CdidError, Result};
use crate::field::ComplexField;

const MAGIC: &[u8; 5] = b"CDID1";
const DTYPE_F64: u8 = 0;
const HEADER_LEN: usize = 5 + 4 + 4 + 1;
const MAX_SIDE: usize = u16::MAX as usize;

/// Serializes a field into the container layout.
pub fn encode_field(field: &ComplexField<f64>) -> Result<Vec<u8>> {
    let (h, w) = (field.height(), field.width());
    if h > MAX_SIDE {
        return Err(CdidError::SideTooLarge(h));
    }
    if w > MAX_SIDE {
        return Err(CdidError::SideTooLarge(w));
    }
    let mut out = Vec::with_capacity(HEADER_LEN + 16 * h * w);
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&(h as u32).to_le_bytes());
    out.extend_from_slice(&(w as u32).to_le_bytes());
    out.push(DTYPE_F64);
    for z in field.data() {
        out.extend_from_slice(&z.re.to_le_bytes());
        out.extend_from_slice(&z.im.to_le_bytes());
    }
    Ok(out)
}

/// Parses a field from the container layout, enforcing magic, dtype,
/// side limits, and exact payload length.
pub fn decode_field(bytes: &[u8]) -> Result<ComplexField<f64>> {
    if bytes.len() < HEADER_LEN {
        return Err(CdidError::TruncatedPayload {
            expected: HEADER_LEN,
            found: bytes.len(),
        });
    }
    if &bytes[..5] != MAGIC {
        return Err(CdidError::BadMagic {
            expected: String::from_utf8_lossy(MAGIC).into_owned(),
            found: String::from_utf8_lossy(&bytes[..5]).into_owned(),
        });
    }
    let h = u32::from_le_bytes(bytes[5..9].try_into().unwrap()) as usize;
    let w = u32::from_le_bytes(bytes[9..13].try_into().unwrap()) as usize;
    let dtype = bytes[13];
    if dtype != DTYPE_F64 {
        return Err(CdidError::UnsupportedDtype(dtype));
    }
    if h > MAX_SIDE {
        return Err(CdidError::SideTooLarge(h));
    }
    if w > MAX_SIDE {
        return Err(CdidError::SideTooLarge(w));
    }
    let expected = HEADER_LEN + 16 * h * w;
    if bytes.len() < expected {
        return Err(CdidError::TruncatedPayload {
            expected,
            found: bytes.len(),
        });
    }
    if bytes.len() > expected {
        return Err(CdidError::InvalidConfig(format!(
            "{} trailing bytes after the field payload",
            bytes.len() - expected
        )));
    }
    let mut data = Vec::with_capacity(h * w);
    for chunk in bytes[HEADER_LEN..].chunks_exact(16) {
        let re = f64::from_le_bytes(chunk[..8].try_into().unwrap());
        let im = f64::from_le_bytes(chunk[8..].try_into().unwrap());
        data.push(Complex::new(re, im));
    }
    ComplexField::new(h, w, data)
}

/// Writes a field to `path` in the container layout.
pub fn write_field<P: AsRef<Path>>(field: &ComplexField<f64>, path: P) -> Result<()> {
    let bytes = encode_field(field)?;
    fs::write(path, bytes)?;
    Ok(())
}

/// Reads a field from `path`.
pub fn read_field<P: AsRef<Path>>(path: P) -> Result<ComplexField<f64>> {
    let bytes = fs::read(path)?;
    decode_field(&bytes)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_field(h: usize, w: usize) -> ComplexField<f64> {
        let data = (0..h * w)
            .map(|i| {
                let x = i as f64;
                Complex::new((1.7 * x).sin() * 3.5 - 1.0, (0.9 * x).cos() / (x + 0.5))
            })
            .collect();
        ComplexField::new(h, w, data).unwrap()
    }

    #[test]
    fn round_trip_is_bit_exact() {
        let field = sample_field(16, 16);
        let back = decode_field(&encode_field(&field).unwrap()).unwrap();
        assert_eq!(back.height(), 16);
        assert_eq!(back.width(), 16);
        for (a, b) in field.data().iter().zip(back.data()) {
            assert_eq!(a.re.to_bits(), b.re.to_bits());
            assert_eq!(a.im.to_bits(), b.im.to_bits());
        }
    }

    #[test]
    fn file_round_trip_via_paths() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("field.cfd");
        let field = sample_field(5, 9);
        write_field(&field, &path).unwrap();
        let back = read_field(&path).unwrap();
        assert_eq!(field.data(), back.data());
    }

    #[test]
    fn wrong_magic_is_reported() {
        let mut bytes = encode_field(&sample_field(2, 2)).unwrap();
        bytes[0] = b'X';
        assert!(matches!(
            decode_field(&bytes),
            Err(CdidError::BadMagic { .. })
        ));
    }

    #[test]
    fn truncation_is_reported_with_sizes() {
        let bytes = encode_field(&sample_field(4, 4)).unwrap();
        match decode_field(&bytes[..bytes.len() - 3]) {
            Err(CdidError::TruncatedPayload { expected, found }) => {
                assert_eq!(expected, bytes.len());
                assert_eq!(found, bytes.len() - 3);
            }
            other => panic!("expected TruncatedPayload, got {other:?}"),
        }
    }

    #[test]
    fn trailing_bytes_are_rejected() {
        let mut bytes = encode_field(&sample_field(2, 3)).unwrap();
        bytes.push(0);
        assert!(matches!(
            decode_field(&bytes),
            Err(CdidError::InvalidConfig(_))
        ));
    }

    #[test]
    fn unsupported_dtype_is_rejected() {
        let mut bytes = encode_field(&sample_field(2, 2)).unwrap();
        bytes[13] = 7;
        assert!(matches!(
            decode_field(&bytes),
            Err(CdidError::UnsupportedDtype(7))
        ));
    }

    #[test]
    fn oversized_side_is_rejected_on_decode() {
        // Forge a header claiming 70000 rows; the size gate must fire
        // before any payload-length arithmetic.
        let mut bytes = Vec::new();
        bytes.extend_from_slice(b"CDID1");
        bytes.extend_from_slice(&70000u32.to_le_bytes());
        bytes.extend_from_slice(&1u32.to_le_bytes());
        bytes.push(0);
        assert!(matches!(
            decode_field(&bytes),
            Err(CdidError::SideTooLarge(70000))
        ));
    }

    #[test]
    fn non_finite_payload_is_rejected() {
        let field = sample_field(1, 2);
        let mut bytes = encode_field(&field).unwrap();
        bytes[HEADER_LEN..HEADER_LEN + 8].copy_from_slice(&f64::NAN.to_le_bytes());
        assert!(matches!(
            decode_field(&bytes),
            Err(CdidError::NonFinite(_))
        ));
    }
}
