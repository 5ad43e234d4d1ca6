//! Netpbm graymap (PGM) decoding and encoding.
//!
//! Decodes both the binary (`P5`) and plain (`P2`) variants with maxval up to
//! 65535; 16-bit binary samples are big-endian. Encoding always emits binary
//! 8-bit `P5` with the header `P5\n<w> <h>\n255\n`.

use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};

/// Upper bound on `width * height` accepted by the decoder.
pub const MAX_PIXELS: usize = 1 << 26;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Pgm {
    pub width: usize,
    pub height: usize,
    pub maxval: u16,
    /// Row-major samples, each `<= maxval`.
    pub samples: Vec<u16>,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Variant {
    Plain,
    Binary,
}

struct Cursor<'a> {
    data: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn skip_whitespace_and_comments(&mut self) {
        while let Some(&b) = self.data.get(self.pos) {
            if b == b'#' {
                while let Some(&c) = self.data.get(self.pos) {
                    self.pos += 1;
                    if c == b'\n' || c == b'\r' {
                        break;
                    }
                }
            } else if b.is_ascii_whitespace() {
                self.pos += 1;
            } else {
                break;
            }
        }
    }

    fn read_number(&mut self, what: &str) -> Result<usize> {
        self.skip_whitespace_and_comments();
        let start = self.pos;
        let mut value: usize = 0;
        while let Some(&b) = self.data.get(self.pos) {
            if !b.is_ascii_digit() {
                break;
            }
            value = value
                .checked_mul(10)
                .and_then(|v| v.checked_add(usize::from(b - b'0')))
                .ok_or_else(|| Error::Format(format!("{what} overflows")))?;
            self.pos += 1;
        }
        if self.pos == start {
            return Err(Error::Format(format!("expected {what}")));
        }
        Ok(value)
    }
}

pub fn decode(data: &[u8]) -> Result<Pgm> {
    let variant = match data.get(..2) {
        Some(b"P5") => Variant::Binary,
        Some(b"P2") => Variant::Plain,
        _ => return Err(Error::Format("not a PGM file (expected P2 or P5 magic)".into())),
    };
    let mut cur = Cursor { data, pos: 2 };
    let width = cur.read_number("width")?;
    let height = cur.read_number("height")?;
    let maxval = cur.read_number("maxval")?;
    if width == 0 || height == 0 {
        return Err(Error::Format(format!("empty raster {width}x{height}")));
    }
    if maxval == 0 || maxval > usize::from(u16::MAX) {
        return Err(Error::Format(format!("maxval {maxval} outside 1..=65535")));
    }
    let count = width
        .checked_mul(height)
        .filter(|&c| c <= MAX_PIXELS)
        .ok_or_else(|| Error::Format(format!("raster {width}x{height} too large")))?;
    let maxval = maxval as u16;

    let samples = match variant {
        Variant::Binary => {
            // exactly one whitespace byte separates the header from the raster
            match data.get(cur.pos) {
                Some(b) if b.is_ascii_whitespace() => cur.pos += 1,
                _ => return Err(Error::Format("missing whitespace after maxval".into())),
            }
            let bytes_per_sample = if maxval > 255 { 2 } else { 1 };
            let raster = &data[cur.pos..];
            let needed = count * bytes_per_sample;
            if raster.len() < needed {
                return Err(Error::Format(format!(
                    "truncated raster: {} of {needed} bytes",
                    raster.len()
                )));
            }
            let raster = &raster[..needed];
            if bytes_per_sample == 1 {
                raster.iter().map(|&b| u16::from(b)).collect::<Vec<_>>()
            } else {
                raster
                    .chunks_exact(2)
                    .map(|c| u16::from_be_bytes([c[0], c[1]]))
                    .collect()
            }
        }
        Variant::Plain => {
            let mut samples = Vec::with_capacity(count);
            for _ in 0..count {
                let v = cur.read_number("sample")?;
                samples.push(v.min(usize::from(u16::MAX)) as u16);
            }
            samples
        }
    };
    if let Some(bad) = samples.iter().find(|&&s| s > maxval) {
        return Err(Error::Format(format!("sample {bad} exceeds maxval {maxval}")));
    }
    Ok(Pgm {
        width,
        height,
        maxval,
        samples,
    })
}

/// Binary 8-bit `P5` bytes. Samples are rescaled to 255 when `maxval != 255`.
pub fn encode(pgm: &Pgm) -> Vec<u8> {
    let mut out = format!("P5\n{} {}\n255\n", pgm.width, pgm.height).into_bytes();
    if pgm.maxval == 255 {
        out.extend(pgm.samples.iter().map(|&s| s as u8));
    } else {
        let scale = 255.0 / f64::from(pgm.maxval);
        out.extend(pgm.samples.iter().map(|&s| (f64::from(s) * scale).round() as u8));
    }
    out
}

pub fn read(path: &Path) -> Result<Pgm> {
    let data = std::fs::read(path)?;
    decode(&data)
}

pub fn write(path: &Path, pgm: &Pgm) -> Result<()> {
    let mut file = std::fs::File::create(path)?;
    file.write_all(&encode(pgm))?;
    Ok(())
}
