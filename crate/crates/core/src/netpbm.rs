//! Netpbm codec: PBM (P1, P4) and PGM (P2, P5, up to 16-bit samples).
//!
//! PBM `1` (black) is foreground. Graymaps become binary images by
//! thresholding: samples strictly above the threshold are foreground.

use thiserror::Error;

use crate::edt::SquaredDistanceMap;
use crate::grid::BinaryImage;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    /// P1
    PlainPbm,
    /// P2
    PlainPgm,
    /// P4
    RawPbm,
    /// P5
    RawPgm,
}

impl Format {
    pub fn magic(self) -> &'static [u8; 2] {
        match self {
            Format::PlainPbm => b"P1",
            Format::PlainPgm => b"P2",
            Format::RawPbm => b"P4",
            Format::RawPgm => b"P5",
        }
    }

    fn is_pgm(self) -> bool {
        matches!(self, Format::PlainPgm | Format::RawPgm)
    }
}

/// Why decoding failed, and the byte offset where it did.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DecodeError {
    #[error("byte {offset}: unsupported or missing magic number")]
    BadMagic { offset: usize },
    #[error("byte {offset}: expected {what}")]
    Expected { offset: usize, what: &'static str },
    #[error("byte {offset}: number too large")]
    Overflow { offset: usize },
    #[error("byte {offset}: {what} must be positive")]
    Zero { offset: usize, what: &'static str },
    #[error("byte {offset}: maxval {maxval} outside 1..=65535")]
    BadMaxval { offset: usize, maxval: u32 },
    #[error("byte {offset}: sample {value} exceeds maxval {maxval}")]
    SampleRange { offset: usize, value: u32, maxval: u16 },
    #[error("byte {offset}: image data truncated")]
    Truncated { offset: usize },
}

impl DecodeError {
    pub fn offset(&self) -> usize {
        match *self {
            DecodeError::BadMagic { offset }
            | DecodeError::Expected { offset, .. }
            | DecodeError::Overflow { offset }
            | DecodeError::Zero { offset, .. }
            | DecodeError::BadMaxval { offset, .. }
            | DecodeError::SampleRange { offset, .. }
            | DecodeError::Truncated { offset } => offset,
        }
    }
}

/// Grayscale image as decoded from a PGM file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graymap {
    pub width: usize,
    pub height: usize,
    pub maxval: u16,
    pub samples: Vec<u16>,
}

impl Graymap {
    /// Foreground where the sample is strictly greater than `t`.
    pub fn threshold(&self, t: u16) -> BinaryImage {
        BinaryImage::from_cells(self.width, self.height, self.samples.iter().map(|&s| s > t).collect())
            .expect("decoded dimensions are positive")
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Decoded {
    Bitmap(BinaryImage),
    Graymap(Graymap),
}

impl Decoded {
    /// Bitmaps as is, graymaps thresholded at `t`.
    pub fn into_binary(self, t: u16) -> BinaryImage {
        match self {
            Decoded::Bitmap(img) => img,
            Decoded::Graymap(g) => g.threshold(t),
        }
    }
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl Cursor<'_> {
    fn peek(&self) -> Option<u8> {
        self.bytes.get(self.pos).copied()
    }

    fn remaining(&self) -> usize {
        self.bytes.len() - self.pos
    }

    /// Skips whitespace and `#` comments.
    fn skip_blank(&mut self) {
        while let Some(b) = self.peek() {
            if b == b'#' {
                while let Some(b) = self.peek() {
                    self.pos += 1;
                    if b == b'\n' || b == b'\r' {
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

    fn number(&mut self, what: &'static str) -> Result<u32, DecodeError> {
        self.skip_blank();
        let start = self.pos;
        let mut value: u32 = 0;
        while let Some(b @ b'0'..=b'9') = self.peek() {
            value = value
                .checked_mul(10)
                .and_then(|v| v.checked_add(u32::from(b - b'0')))
                .ok_or(DecodeError::Overflow { offset: start })?;
            self.pos += 1;
        }
        if self.pos == start {
            return Err(match self.peek() {
                None => DecodeError::Truncated { offset: start },
                Some(_) => DecodeError::Expected { offset: start, what },
            });
        }
        Ok(value)
    }

    fn positive(&mut self, what: &'static str) -> Result<usize, DecodeError> {
        self.skip_blank();
        let offset = self.pos;
        match self.number(what)? {
            0 => Err(DecodeError::Zero { offset, what }),
            v => Ok(v as usize),
        }
    }

    /// The single whitespace byte between a raw header and its raster.
    fn raster_separator(&mut self) -> Result<(), DecodeError> {
        match self.peek() {
            Some(b) if b.is_ascii_whitespace() => {
                self.pos += 1;
                Ok(())
            }
            None => Err(DecodeError::Truncated { offset: self.pos }),
            Some(_) => Err(DecodeError::Expected {
                offset: self.pos,
                what: "whitespace after header",
            }),
        }
    }
}

/// Decodes one netpbm image. Trailing bytes after the raster are ignored.
pub fn decode(bytes: &[u8]) -> Result<Decoded, DecodeError> {
    let format = match bytes.get(..2) {
        Some(b"P1") => Format::PlainPbm,
        Some(b"P2") => Format::PlainPgm,
        Some(b"P4") => Format::RawPbm,
        Some(b"P5") => Format::RawPgm,
        _ => return Err(DecodeError::BadMagic { offset: 0 }),
    };
    let mut cur = Cursor { bytes, pos: 2 };
    if !cur.peek().is_some_and(|b| b.is_ascii_whitespace() || b == b'#') {
        return Err(match cur.peek() {
            None => DecodeError::Truncated { offset: 2 },
            Some(_) => DecodeError::BadMagic { offset: 0 },
        });
    }
    let width = cur.positive("width")?;
    let height = cur.positive("height")?;
    let maxval = if format.is_pgm() {
        cur.skip_blank();
        let offset = cur.pos;
        let m = cur.number("maxval")?;
        if !(1..=65535).contains(&m) {
            return Err(DecodeError::BadMaxval { offset, maxval: m });
        }
        m as u16
    } else {
        1
    };
    let pixels = width
        .checked_mul(height)
        .ok_or(DecodeError::Overflow { offset: cur.pos })?;

    match format {
        Format::PlainPbm => {
            // At least one byte per pixel: reject impossible sizes before allocating.
            cur.skip_blank();
            if pixels > cur.remaining() {
                return Err(DecodeError::Truncated { offset: bytes.len() });
            }
            let mut cells = Vec::with_capacity(pixels);
            while cells.len() < pixels {
                cur.skip_blank();
                match cur.peek() {
                    Some(b'0') => cells.push(false),
                    Some(b'1') => cells.push(true),
                    None => return Err(DecodeError::Truncated { offset: cur.pos }),
                    Some(_) => {
                        return Err(DecodeError::Expected {
                            offset: cur.pos,
                            what: "0 or 1",
                        })
                    }
                }
                cur.pos += 1;
            }
            Ok(Decoded::Bitmap(bitmap(width, height, cells)))
        }
        Format::RawPbm => {
            cur.raster_separator()?;
            let stride = width.div_ceil(8);
            let need = stride
                .checked_mul(height)
                .ok_or(DecodeError::Overflow { offset: cur.pos })?;
            if cur.remaining() < need {
                return Err(DecodeError::Truncated { offset: bytes.len() });
            }
            let raster = &bytes[cur.pos..cur.pos + need];
            let cells = (0..pixels)
                .map(|i| {
                    let (r, c) = (i / width, i % width);
                    raster[r * stride + c / 8] & (0x80 >> (c % 8)) != 0
                })
                .collect();
            Ok(Decoded::Bitmap(bitmap(width, height, cells)))
        }
        Format::PlainPgm => {
            cur.skip_blank();
            if pixels > cur.remaining() {
                return Err(DecodeError::Truncated { offset: bytes.len() });
            }
            let mut samples = Vec::with_capacity(pixels);
            while samples.len() < pixels {
                cur.skip_blank();
                let offset = cur.pos;
                let v = cur.number("sample")?;
                if v > u32::from(maxval) {
                    return Err(DecodeError::SampleRange {
                        offset,
                        value: v,
                        maxval,
                    });
                }
                samples.push(v as u16);
            }
            Ok(Decoded::Graymap(Graymap {
                width,
                height,
                maxval,
                samples,
            }))
        }
        Format::RawPgm => {
            cur.raster_separator()?;
            let depth = if maxval > 255 { 2 } else { 1 };
            let need = pixels
                .checked_mul(depth)
                .ok_or(DecodeError::Overflow { offset: cur.pos })?;
            if cur.remaining() < need {
                return Err(DecodeError::Truncated { offset: bytes.len() });
            }
            let start = cur.pos;
            let mut samples = Vec::with_capacity(pixels);
            for (i, chunk) in bytes[start..start + need].chunks_exact(depth).enumerate() {
                let v = match *chunk {
                    [b] => u16::from(b),
                    [hi, lo] => u16::from_be_bytes([hi, lo]),
                    _ => unreachable!(),
                };
                if v > maxval {
                    return Err(DecodeError::SampleRange {
                        offset: start + i * depth,
                        value: u32::from(v),
                        maxval,
                    });
                }
                samples.push(v);
            }
            Ok(Decoded::Graymap(Graymap {
                width,
                height,
                maxval,
                samples,
            }))
        }
    }
}

fn bitmap(width: usize, height: usize, cells: Vec<bool>) -> BinaryImage {
    BinaryImage::from_cells(width, height, cells).expect("decoded dimensions are positive")
}

/// Decodes any supported file to a binary image, thresholding graymaps at `t`.
pub fn decode_binary(bytes: &[u8], t: u16) -> Result<BinaryImage, DecodeError> {
    decode(bytes).map(|d| d.into_binary(t))
}

/// Encodes a binary image as P1 (`plain`) or P4.
pub fn encode_pbm(img: &BinaryImage, plain: bool) -> Vec<u8> {
    let (w, h) = (img.width(), img.height());
    let magic = if plain { "P1" } else { "P4" };
    let mut out = format!("{magic}\n{w} {h}\n").into_bytes();
    if plain {
        for r in 0..h {
            // Plain PBM lines should stay under 70 characters.
            for (i, c) in (0..w).enumerate() {
                if i > 0 && i % 64 == 0 {
                    out.push(b'\n');
                }
                out.push(if img.pixel(r, c) { b'1' } else { b'0' });
            }
            out.push(b'\n');
        }
    } else {
        let stride = w.div_ceil(8);
        for r in 0..h {
            let mut row = vec![0u8; stride];
            for c in 0..w {
                if img.pixel(r, c) {
                    row[c / 8] |= 0x80 >> (c % 8);
                }
            }
            out.extend_from_slice(&row);
        }
    }
    out
}

/// Encodes a graymap as P5.
pub fn encode_pgm(g: &Graymap) -> Vec<u8> {
    let mut out = format!("P5\n{} {}\n{}\n", g.width, g.height, g.maxval).into_bytes();
    for &s in &g.samples {
        if g.maxval > 255 {
            out.extend_from_slice(&s.to_be_bytes());
        } else {
            out.push(s as u8);
        }
    }
    out
}

/// Sample written for unreachable pixels in [`distance_graymap`].
pub const INF_SAMPLE: u16 = u16::MAX;

/// 16-bit graymap of Euclidean distances: the integer square root of each
/// squared distance, clamped below [`INF_SAMPLE`], which marks pixels with no
/// target in the image.
pub fn distance_graymap(map: &SquaredDistanceMap) -> Graymap {
    let samples = map
        .values()
        .iter()
        .map(|&d| {
            if d >= map.inf() {
                INF_SAMPLE
            } else {
                d.isqrt().min(u64::from(INF_SAMPLE - 1)) as u16
            }
        })
        .collect();
    Graymap {
        width: map.width(),
        height: map.height(),
        maxval: u16::MAX,
        samples,
    }
}

/// [`distance_graymap`] as P5 bytes. A header comment flags maps where no
/// pixel has a target.
pub fn encode_distance_pgm(map: &SquaredDistanceMap) -> Vec<u8> {
    let g = distance_graymap(map);
    let body = encode_pgm(&g);
    if !map.all_inf() {
        return body;
    }
    let mut out = b"P5\n# all-inf: no target pixel\n".to_vec();
    out.extend_from_slice(&body[3..]);
    out
}
