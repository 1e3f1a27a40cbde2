//! Binary grayscale PGM (P5) reading and writing.
//!
//! Supports 8-bit (maxval ≤ 255, one byte per sample) and 16-bit rasters
//! (maxval ≤ 65535, two bytes per sample, big-endian), with `#` comments
//! in the header. Color (P6) and ASCII (P2) variants are rejected — the
//! pipeline only ever needs a grayscale phase source.

use std::fs;
use std::path::Path;

use crate::error::{CdidError, Result};

const MAX_SIDE: usize = u16::MAX as usize;

/// A decoded grayscale raster with its quantization ceiling.
#[derive(Clone, Debug)]
pub struct GrayImage {
    pub height: usize,
    pub width: usize,
    pub maxval: u16,
    /// Row-major raw sample values in `[0, maxval]`.
    pub samples: Vec<u16>,
}

impl GrayImage {
    /// Samples as reals, divided by `maxval` onto `[0, 1]` when
    /// `normalize` is set, raw counts otherwise.
    pub fn to_real(&self, normalize: bool) -> Vec<f64> {
        let scale = if normalize {
            1.0 / self.maxval as f64
        } else {
            1.0
        };
        self.samples.iter().map(|&s| s as f64 * scale).collect()
    }
}

/// Header tokenizer: skips whitespace and `#`-to-end-of-line comments.
struct Tokens<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Tokens<'a> {
    fn next_token(&mut self) -> Result<&'a [u8]> {
        loop {
            while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
                self.pos += 1;
            }
            if self.pos < self.bytes.len() && self.bytes[self.pos] == b'#' {
                while self.pos < self.bytes.len() && self.bytes[self.pos] != b'\n' {
                    self.pos += 1;
                }
            } else {
                break;
            }
        }
        let start = self.pos;
        while self.pos < self.bytes.len() && !self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(CdidError::BadPgm("unexpected end of header".into()));
        }
        Ok(&self.bytes[start..self.pos])
    }

    fn next_number(&mut self, what: &str) -> Result<usize> {
        let token = self.next_token()?;
        std::str::from_utf8(token)
            .ok()
            .and_then(|s| s.parse::<usize>().ok())
            .ok_or_else(|| {
                CdidError::BadPgm(format!(
                    "{what} is not a decimal number: {:?}",
                    String::from_utf8_lossy(token)
                ))
            })
    }
}

/// Parses a binary PGM byte stream.
pub fn decode_pgm(bytes: &[u8]) -> Result<GrayImage> {
    let mut tokens = Tokens { bytes, pos: 0 };
    let magic = tokens.next_token()?;
    match magic {
        b"P5" => {}
        b"P6" => {
            return Err(CdidError::BadPgm(
                "color (P6) input; only grayscale P5 is supported".into(),
            ))
        }
        b"P2" => {
            return Err(CdidError::BadPgm(
                "ASCII (P2) input; only binary P5 is supported".into(),
            ))
        }
        other => {
            return Err(CdidError::BadPgm(format!(
                "not a PGM stream (magic {:?})",
                String::from_utf8_lossy(other)
            )))
        }
    }
    let width = tokens.next_number("width")?;
    let height = tokens.next_number("height")?;
    let maxval = tokens.next_number("maxval")?;
    if width == 0 || height == 0 {
        return Err(CdidError::BadPgm("zero image dimension".into()));
    }
    if height > MAX_SIDE {
        return Err(CdidError::SideTooLarge(height));
    }
    if width > MAX_SIDE {
        return Err(CdidError::SideTooLarge(width));
    }
    if maxval == 0 || maxval > u16::MAX as usize {
        return Err(CdidError::BadPgm(format!(
            "maxval {maxval} outside [1, 65535]"
        )));
    }
    // The raster starts after exactly one whitespace byte following maxval.
    let raster = &bytes[(tokens.pos + 1).min(bytes.len())..];
    let bytes_per = if maxval > 255 { 2 } else { 1 };
    let expected = height * width * bytes_per;
    if raster.len() < expected {
        return Err(CdidError::TruncatedPayload {
            expected,
            found: raster.len(),
        });
    }
    if raster[expected..].iter().any(|b| !b.is_ascii_whitespace()) {
        return Err(CdidError::BadPgm(
            "non-whitespace bytes after the raster".into(),
        ));
    }
    let samples = if bytes_per == 1 {
        raster[..expected].iter().map(|&b| b as u16).collect()
    } else {
        raster[..expected]
            .chunks_exact(2)
            .map(|c| u16::from_be_bytes([c[0], c[1]]))
            .collect()
    };
    Ok(GrayImage {
        height,
        width,
        maxval: maxval as u16,
        samples,
    })
}

/// Reads a binary PGM file.
pub fn read_pgm<P: AsRef<Path>>(path: P) -> Result<GrayImage> {
    decode_pgm(&fs::read(path)?)
}

/// Reads a grayscale PGM as a row-major real plane: `(samples, height,
/// width)`, scaled onto `[0, 1]` when `normalize` is set.
pub fn load_gray_image<P: AsRef<Path>>(path: P, normalize: bool) -> Result<(Vec<f64>, usize, usize)> {
    let img = read_pgm(path)?;
    Ok((img.to_real(normalize), img.height, img.width))
}

/// Serializes a real plane with values in `[0, 1]` (clamped) as binary PGM,
/// quantizing to `round(v * maxval)`.
pub fn encode_pgm(samples: &[f64], height: usize, width: usize, maxval: u16) -> Result<Vec<u8>> {
    if samples.len() != height * width {
        return Err(CdidError::DimensionMismatch(format!(
            "raster {height}x{width} needs {} samples, got {}",
            height * width,
            samples.len()
        )));
    }
    if maxval == 0 {
        return Err(CdidError::BadPgm("maxval 0".into()));
    }
    if samples.iter().any(|v| !v.is_finite()) {
        return Err(CdidError::NonFinite("PGM encoding"));
    }
    let mut out = format!("P5\n{width} {height}\n{maxval}\n").into_bytes();
    for &v in samples {
        let q = (v.clamp(0.0, 1.0) * maxval as f64).round() as u16;
        if maxval > 255 {
            out.extend_from_slice(&q.to_be_bytes());
        } else {
            out.push(q as u8);
        }
    }
    Ok(out)
}

/// Writes a real plane to `path` as binary PGM (see [`encode_pgm`]).
pub fn write_pgm<P: AsRef<Path>>(
    path: P,
    samples: &[f64],
    height: usize,
    width: usize,
    maxval: u16,
) -> Result<()> {
    let bytes = encode_pgm(samples, height, width, maxval)?;
    fs::write(path, bytes)?;
    Ok(())
}
