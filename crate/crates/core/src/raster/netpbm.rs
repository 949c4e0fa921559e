//! Netpbm reader and writer for the PBM (P1/P4) and PGM (P2/P5) variants.
//!
//! Gray images must use maxval 255. In PBM files a 1 bit is black, which maps to
//! foreground. Comments (`#` to end of line) are accepted anywhere whitespace is
//! allowed in a header, and a single whitespace byte separates the header from a
//! binary payload.

use std::fmt;

use super::{BinaryImage, GrayImage, Image};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum NetpbmFormat {
    /// Plain PBM
    P1,
    /// Plain PGM
    P2,
    /// Raw PBM
    P4,
    /// Raw PGM
    P5,
}

impl NetpbmFormat {
    fn magic(self) -> &'static str {
        match self {
            NetpbmFormat::P1 => "P1",
            NetpbmFormat::P2 => "P2",
            NetpbmFormat::P4 => "P4",
            NetpbmFormat::P5 => "P5",
        }
    }

    fn is_bitmap(self) -> bool {
        matches!(self, NetpbmFormat::P1 | NetpbmFormat::P4)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ParseErrorKind {
    BadMagic,
    ExpectedNumber,
    NumberOverflow,
    ZeroDimension,
    UnsupportedMaxval(u64),
    MissingPayloadSeparator,
    Truncated,
    BadSample(u64),
    BadBit(u8),
}

impl fmt::Display for ParseErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParseErrorKind::BadMagic => write!(f, "unknown magic number"),
            ParseErrorKind::ExpectedNumber => write!(f, "expected a decimal number"),
            ParseErrorKind::NumberOverflow => write!(f, "number too large"),
            ParseErrorKind::ZeroDimension => write!(f, "zero width or height"),
            ParseErrorKind::UnsupportedMaxval(m) => write!(f, "unsupported maxval {m}"),
            ParseErrorKind::MissingPayloadSeparator => {
                write!(f, "missing whitespace before payload")
            }
            ParseErrorKind::Truncated => write!(f, "truncated data"),
            ParseErrorKind::BadSample(v) => write!(f, "sample {v} exceeds maxval"),
            ParseErrorKind::BadBit(b) => write!(f, "invalid bit character {:?}", *b as char),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("netpbm parse error at byte {offset}: {kind}")]
pub struct ParseError {
    pub offset: usize,
    pub kind: ParseErrorKind,
}

struct Reader<'a> {
    data: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn err(&self, kind: ParseErrorKind) -> ParseError {
        ParseError { offset: self.pos, kind }
    }

    fn skip_whitespace_and_comments(&mut self) {
        while let Some(&b) = self.data.get(self.pos) {
            if b == b'#' {
                while let Some(&c) = self.data.get(self.pos) {
                    if c == b'\n' || c == b'\r' {
                        break;
                    }
                    self.pos += 1;
                }
            } else if b.is_ascii_whitespace() {
                self.pos += 1;
            } else {
                break;
            }
        }
    }

    fn number(&mut self) -> std::result::Result<u64, ParseError> {
        self.skip_whitespace_and_comments();
        let start = self.pos;
        let mut value: u64 = 0;
        while let Some(&b) = self.data.get(self.pos) {
            if !b.is_ascii_digit() {
                break;
            }
            value = value
                .checked_mul(10)
                .and_then(|v| v.checked_add(u64::from(b - b'0')))
                .ok_or(ParseError {
                    offset: start,
                    kind: ParseErrorKind::NumberOverflow,
                })?;
            self.pos += 1;
        }
        if self.pos == start {
            let kind = if self.pos >= self.data.len() {
                ParseErrorKind::Truncated
            } else {
                ParseErrorKind::ExpectedNumber
            };
            return Err(self.err(kind));
        }
        Ok(value)
    }

    fn dimension(&mut self) -> std::result::Result<usize, ParseError> {
        self.skip_whitespace_and_comments();
        let start = self.pos;
        let v = self.number()?;
        if v == 0 {
            return Err(ParseError {
                offset: start,
                kind: ParseErrorKind::ZeroDimension,
            });
        }
        usize::try_from(v).map_err(|_| ParseError {
            offset: start,
            kind: ParseErrorKind::NumberOverflow,
        })
    }

    /// Consumes the single whitespace byte that ends a raw-format header.
    fn payload_separator(&mut self) -> std::result::Result<(), ParseError> {
        match self.data.get(self.pos) {
            Some(b) if b.is_ascii_whitespace() => {
                self.pos += 1;
                Ok(())
            }
            Some(_) => Err(self.err(ParseErrorKind::MissingPayloadSeparator)),
            None => Err(self.err(ParseErrorKind::Truncated)),
        }
    }

    fn take(&mut self, n: usize) -> std::result::Result<&'a [u8], ParseError> {
        let end = self.pos.checked_add(n).filter(|&e| e <= self.data.len());
        match end {
            Some(end) => {
                let slice = &self.data[self.pos..end];
                self.pos = end;
                Ok(slice)
            }
            None => Err(ParseError {
                offset: self.data.len(),
                kind: ParseErrorKind::Truncated,
            }),
        }
    }
}

/// Parses a P1, P2, P4 or P5 file.
pub fn load_image(bytes: &[u8]) -> Result<Image> {
    let mut r = Reader { data: bytes, pos: 0 };
    let format = match bytes.get(..2) {
        Some(b"P1") => NetpbmFormat::P1,
        Some(b"P2") => NetpbmFormat::P2,
        Some(b"P4") => NetpbmFormat::P4,
        Some(b"P5") => NetpbmFormat::P5,
        Some(_) => return Err(r.err(ParseErrorKind::BadMagic).into()),
        None => return Err(r.err(ParseErrorKind::Truncated).into()),
    };
    r.pos = 2;
    let width = r.dimension()?;
    let height = r.dimension()?;
    let count = width.checked_mul(height).ok_or(ParseError {
        offset: r.pos,
        kind: ParseErrorKind::NumberOverflow,
    })?;

    if !format.is_bitmap() {
        r.skip_whitespace_and_comments();
        let at = r.pos;
        let maxval = r.number()?;
        if maxval != 255 {
            return Err(ParseError {
                offset: at,
                kind: ParseErrorKind::UnsupportedMaxval(maxval),
            }
            .into());
        }
    }

    let image = match format {
        NetpbmFormat::P1 => {
            let mut pixels = Vec::with_capacity(count);
            while pixels.len() < count {
                r.skip_whitespace_and_comments();
                match r.data.get(r.pos) {
                    Some(b'0') => pixels.push(false),
                    Some(b'1') => pixels.push(true),
                    Some(&b) => return Err(r.err(ParseErrorKind::BadBit(b)).into()),
                    None => return Err(r.err(ParseErrorKind::Truncated).into()),
                }
                r.pos += 1;
            }
            Image::Binary(BinaryImage::new(width, height, pixels)?)
        }
        NetpbmFormat::P2 => {
            let mut pixels = Vec::with_capacity(count);
            while pixels.len() < count {
                r.skip_whitespace_and_comments();
                let at = r.pos;
                let v = r.number()?;
                let v = u8::try_from(v).map_err(|_| ParseError {
                    offset: at,
                    kind: ParseErrorKind::BadSample(v),
                })?;
                pixels.push(v);
            }
            Image::Gray(GrayImage::new(width, height, pixels)?)
        }
        NetpbmFormat::P4 => {
            r.payload_separator()?;
            let stride = width.div_ceil(8);
            let payload = r.take(stride * height)?;
            let mut pixels = Vec::with_capacity(count);
            for row in payload.chunks_exact(stride) {
                pixels.extend((0..width).map(|c| row[c / 8] & (0x80 >> (c % 8)) != 0));
            }
            Image::Binary(BinaryImage::new(width, height, pixels)?)
        }
        NetpbmFormat::P5 => {
            r.payload_separator()?;
            let payload = r.take(count)?;
            Image::Gray(GrayImage::new(width, height, payload.to_vec())?)
        }
    };
    Ok(image)
}

/// Serializes an image. Binary images go to P1/P4, gray images to P2/P5.
pub fn save_image(img: &Image, format: NetpbmFormat) -> Result<Vec<u8>> {
    let mut out = Vec::new();
    match (img, format) {
        (Image::Binary(b), NetpbmFormat::P1) => {
            header(&mut out, format, b.width(), b.height(), false);
            let mut line = LineWrap::new(&mut out);
            for row in b.pixels().chunks_exact(b.width()) {
                for &v in row {
                    line.token(if v { "1" } else { "0" });
                }
                line.newline();
            }
        }
        (Image::Binary(b), NetpbmFormat::P4) => {
            header(&mut out, format, b.width(), b.height(), false);
            for row in b.pixels().chunks_exact(b.width()) {
                for byte_bits in row.chunks(8) {
                    let byte = byte_bits
                        .iter()
                        .enumerate()
                        .fold(0u8, |acc, (i, &v)| if v { acc | (0x80 >> i) } else { acc });
                    out.push(byte);
                }
            }
        }
        (Image::Gray(g), NetpbmFormat::P2) => {
            header(&mut out, format, g.width(), g.height(), true);
            let mut line = LineWrap::new(&mut out);
            for row in g.pixels().chunks_exact(g.width()) {
                for v in row {
                    line.token(&v.to_string());
                }
                line.newline();
            }
        }
        (Image::Gray(g), NetpbmFormat::P5) => {
            header(&mut out, format, g.width(), g.height(), true);
            out.extend_from_slice(g.pixels());
        }
        (img, format) => {
            return Err(Error::IncompatibleFormat {
                kind: match img {
                    Image::Gray(_) => "gray",
                    Image::Binary(_) => "binary",
                },
                format: format.magic(),
            })
        }
    }
    Ok(out)
}

fn header(out: &mut Vec<u8>, format: NetpbmFormat, width: usize, height: usize, gray: bool) {
    out.extend_from_slice(format!("{}\n{} {}\n", format.magic(), width, height).as_bytes());
    if gray {
        out.extend_from_slice(b"255\n");
    }
}

/// Plain formats limit lines to 70 characters.
struct LineWrap<'a> {
    out: &'a mut Vec<u8>,
    len: usize,
}

impl<'a> LineWrap<'a> {
    const MAX: usize = 70;

    fn new(out: &'a mut Vec<u8>) -> Self {
        Self { out, len: 0 }
    }

    fn token(&mut self, tok: &str) {
        if self.len > 0 {
            if self.len + 1 + tok.len() > Self::MAX {
                self.out.push(b'\n');
                self.len = 0;
            } else {
                self.out.push(b' ');
                self.len += 1;
            }
        }
        self.out.extend_from_slice(tok.as_bytes());
        self.len += tok.len();
    }

    fn newline(&mut self) {
        self.out.push(b'\n');
        self.len = 0;
    }
}
