//! Raster types, Netpbm I/O and the preprocessing stage (threshold + filter).

pub mod filter;
pub mod netpbm;
pub mod threshold;

pub use filter::despeckle;
pub use netpbm::{load_image, save_image, NetpbmFormat};
pub use threshold::{binarize, otsu_level, Polarity};

use crate::{Error, Result};

/// Pixel adjacency: edge neighbors only, or edges and corners.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Connectivity {
    Four,
    Eight,
}

impl Connectivity {
    pub fn value(self) -> u8 {
        match self {
            Connectivity::Four => 4,
            Connectivity::Eight => 8,
        }
    }

    /// Neighbor offsets as `(drow, dcol)`.
    pub fn offsets(self) -> &'static [(isize, isize)] {
        const FOUR: [(isize, isize); 4] = [(-1, 0), (0, -1), (0, 1), (1, 0)];
        const EIGHT: [(isize, isize); 8] = [(-1, -1), (-1, 0), (-1, 1), (0, -1), (0, 1), (1, -1), (1, 0), (1, 1)];
        match self {
            Connectivity::Four => &FOUR,
            Connectivity::Eight => &EIGHT,
        }
    }
}

impl TryFrom<u8> for Connectivity {
    type Error = Error;

    fn try_from(v: u8) -> Result<Self> {
        match v {
            4 => Ok(Connectivity::Four),
            8 => Ok(Connectivity::Eight),
            other => Err(Error::Connectivity(other)),
        }
    }
}

impl std::fmt::Display for Connectivity {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.value())
    }
}

/// A pixel position; rows grow downward.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Pixel {
    pub row: usize,
    pub col: usize,
}

impl Pixel {
    pub const fn new(row: usize, col: usize) -> Self {
        Self { row, col }
    }

    /// Moves by a signed offset, returning `None` when a coordinate would go negative.
    pub fn offset(self, drow: isize, dcol: isize) -> Option<Pixel> {
        Some(Pixel {
            row: self.row.checked_add_signed(drow)?,
            col: self.col.checked_add_signed(dcol)?,
        })
    }
}

/// 8-bit grayscale raster, row-major, 0 = black.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GrayImage {
    width: usize,
    height: usize,
    pixels: Vec<u8>,
}

impl GrayImage {
    pub fn new(width: usize, height: usize, pixels: Vec<u8>) -> Result<Self> {
        check_dims(width, height, pixels.len())?;
        Ok(Self { width, height, pixels })
    }

    pub fn filled(width: usize, height: usize, value: u8) -> Result<Self> {
        Self::new(width, height, vec![value; width * height])
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn pixels(&self) -> &[u8] {
        &self.pixels
    }

    pub fn get(&self, row: usize, col: usize) -> u8 {
        self.pixels[row * self.width + col]
    }

    pub fn set(&mut self, row: usize, col: usize, value: u8) {
        self.pixels[row * self.width + col] = value;
    }
}

/// Binary raster, row-major, `true` = foreground (character stroke).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BinaryImage {
    width: usize,
    height: usize,
    pixels: Vec<bool>,
}

impl BinaryImage {
    pub fn new(width: usize, height: usize, pixels: Vec<bool>) -> Result<Self> {
        check_dims(width, height, pixels.len())?;
        Ok(Self { width, height, pixels })
    }

    /// All-background image.
    pub fn blank(width: usize, height: usize) -> Result<Self> {
        Self::new(width, height, vec![false; width * height])
    }

    /// Builds an image from rows of `#` (foreground) and any other character.
    ///
    /// Mostly useful in tests; panics on ragged or empty input.
    pub fn from_ascii(rows: &[&str]) -> Self {
        let height = rows.len();
        let width = rows.first().map_or(0, |r| r.chars().count());
        let mut pixels = Vec::with_capacity(width * height);
        for row in rows {
            assert_eq!(row.chars().count(), width, "ragged ascii image");
            pixels.extend(row.chars().map(|c| c == '#'));
        }
        Self::new(width, height, pixels).expect("non-empty ascii image")
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn pixels(&self) -> &[bool] {
        &self.pixels
    }

    pub fn get(&self, row: usize, col: usize) -> bool {
        self.pixels[row * self.width + col]
    }

    /// Like [`get`](Self::get) but treats anything outside the image as background.
    pub fn get_signed(&self, row: isize, col: isize) -> bool {
        row >= 0
            && col >= 0
            && (row as usize) < self.height
            && (col as usize) < self.width
            && self.get(row as usize, col as usize)
    }

    pub fn set(&mut self, row: usize, col: usize, value: bool) {
        self.pixels[row * self.width + col] = value;
    }

    pub fn contains(&self, p: Pixel) -> bool {
        p.row < self.height && p.col < self.width
    }

    pub fn foreground_count(&self) -> usize {
        self.pixels.iter().filter(|&&v| v).count()
    }

    /// Foreground pixels in raster order.
    pub fn foreground(&self) -> impl Iterator<Item = Pixel> + '_ {
        self.pixels
            .iter()
            .enumerate()
            .filter(|(_, &v)| v)
            .map(|(i, _)| Pixel::new(i / self.width, i % self.width))
    }
}

/// Either kind of raster, as produced by [`load_image`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Image {
    Gray(GrayImage),
    Binary(BinaryImage),
}

impl Image {
    pub fn width(&self) -> usize {
        match self {
            Image::Gray(g) => g.width(),
            Image::Binary(b) => b.width(),
        }
    }

    pub fn height(&self) -> usize {
        match self {
            Image::Gray(g) => g.height(),
            Image::Binary(b) => b.height(),
        }
    }
}

impl Image {
    /// Gray view of either kind; binary foreground becomes black.
    pub fn into_gray(self) -> GrayImage {
        match self {
            Image::Gray(g) => g,
            Image::Binary(b) => {
                let pixels = b.pixels().iter().map(|&v| if v { 0 } else { 255 }).collect();
                GrayImage::new(b.width(), b.height(), pixels).expect("same dimensions")
            }
        }
    }
}

impl From<GrayImage> for Image {
    fn from(img: GrayImage) -> Self {
        Image::Gray(img)
    }
}

impl From<BinaryImage> for Image {
    fn from(img: BinaryImage) -> Self {
        Image::Binary(img)
    }
}

fn check_dims(width: usize, height: usize, len: usize) -> Result<()> {
    if width == 0 || height == 0 || width.checked_mul(height) != Some(len) {
        return Err(Error::InvalidDimensions { width, height });
    }
    Ok(())
}
