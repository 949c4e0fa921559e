//! Freeman chain codes: clockwise outer-boundary tracing, decoding, and the
//! per-direction code histogram used as the recognition feature.
//!
//! Codes count counter-clockwise from East. With rows growing downward:
//!
//! ```text
//!   8-direction        4-direction
//!    3  2  1               1
//!    4  .  0            2  .  0
//!    5  6  7               3
//! ```

use std::collections::VecDeque;
use std::fmt;

use crate::raster::{BinaryImage, Connectivity, Pixel};
use crate::{Error, Result};

/// Direction numbering; the scheme also fixes which neighbors are adjacent.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum DirectionScheme {
    Four,
    Eight,
}

const EIGHT_STEPS: [(isize, isize); 8] = [(0, 1), (-1, 1), (-1, 0), (-1, -1), (0, -1), (1, -1), (1, 0), (1, 1)];

const FOUR_STEPS: [(isize, isize); 4] = [(0, 1), (-1, 0), (0, -1), (1, 0)];

impl DirectionScheme {
    /// Number of distinct codes (4 or 8).
    #[allow(clippy::len_without_is_empty)]
    pub fn len(self) -> usize {
        match self {
            DirectionScheme::Four => 4,
            DirectionScheme::Eight => 8,
        }
    }

    pub fn connectivity(self) -> Connectivity {
        match self {
            DirectionScheme::Four => Connectivity::Four,
            DirectionScheme::Eight => Connectivity::Eight,
        }
    }

    /// Unit displacement `(drow, dcol)` of a code.
    pub fn step(self, code: u8) -> (isize, isize) {
        match self {
            DirectionScheme::Four => FOUR_STEPS[code as usize],
            DirectionScheme::Eight => EIGHT_STEPS[code as usize],
        }
    }

    pub fn is_valid(self, code: u8) -> bool {
        (code as usize) < self.len()
    }

    /// The code pointing the opposite way.
    pub fn opposite(self, code: u8) -> u8 {
        let n = self.len() as u8;
        (code + n / 2) % n
    }

    fn checked(self, code: u8) -> Result<u8> {
        if self.is_valid(code) {
            Ok(code)
        } else {
            Err(Error::InvalidCode {
                code,
                connectivity: self.len() as u8,
            })
        }
    }
}

impl From<Connectivity> for DirectionScheme {
    fn from(c: Connectivity) -> Self {
        match c {
            Connectivity::Four => DirectionScheme::Four,
            Connectivity::Eight => DirectionScheme::Eight,
        }
    }
}

impl TryFrom<u8> for DirectionScheme {
    type Error = Error;

    fn try_from(v: u8) -> Result<Self> {
        Connectivity::try_from(v).map(Into::into)
    }
}

impl fmt::Display for DirectionScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.len())
    }
}

/// A start pixel plus the direction of each move along the boundary.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ChainCode {
    start: Pixel,
    scheme: DirectionScheme,
    codes: Vec<u8>,
}

impl ChainCode {
    pub fn new(start: Pixel, scheme: DirectionScheme, codes: Vec<u8>) -> Result<Self> {
        for &c in &codes {
            scheme.checked(c)?;
        }
        Ok(Self { start, scheme, codes })
    }

    pub fn start(&self) -> Pixel {
        self.start
    }

    pub fn scheme(&self) -> DirectionScheme {
        self.scheme
    }

    pub fn codes(&self) -> &[u8] {
        &self.codes
    }

    pub fn len(&self) -> usize {
        self.codes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.codes.is_empty()
    }
}

/// Codes as concatenated digits, e.g. `0642`.
impl fmt::Display for ChainCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &c in &self.codes {
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

/// Traces the outer boundary of the component containing `seed`.
///
/// The walk starts at the component's topmost-then-leftmost pixel, sweeps that
/// pixel's neighbors clockwise beginning at West, and continues Moore-neighbor
/// style with the background kept on the left. It stops when the start pixel
/// is about to be left along the same move that opened the walk, so one-pixel
/// strokes that pass back through the start are followed to the end.
///
/// Under the 4-direction scheme the component must also be 4-connected;
/// shapes that only hang together through corners are rejected.
pub fn trace_boundary(img: &BinaryImage, seed: Pixel, scheme: DirectionScheme) -> Result<ChainCode> {
    if img.foreground_count() == 0 {
        return Err(Error::EmptyImage);
    }
    if !img.contains(seed) || !img.get(seed.row, seed.col) {
        return Err(Error::BackgroundSeed {
            row: seed.row,
            col: seed.col,
        });
    }

    let (start, size) = component_origin(img, seed, Connectivity::Eight);
    if scheme == DirectionScheme::Four {
        let (_, size4) = component_origin(img, seed, Connectivity::Four);
        if size4 != size {
            return Err(Error::NotTraversable {
                row: seed.row,
                col: seed.col,
                connectivity: 4,
            });
        }
    }

    let n = scheme.len() as u8;
    let fg = |p: Pixel, code: u8| -> Option<Pixel> {
        let (dr, dc) = scheme.step(code);
        let q = p.offset(dr, dc)?;
        (img.contains(q) && img.get(q.row, q.col)).then_some(q)
    };
    // Clockwise sweep from `from` (inclusive); returns the first foreground move.
    let sweep = |p: Pixel, from: u8| -> Option<(u8, Pixel)> {
        (0..n).find_map(|i| {
            let code = (from + n - i) % n;
            fg(p, code).map(|q| (code, q))
        })
    };
    // Where the sweep resumes after arriving along `code`.
    let resume = |code: u8| -> u8 {
        match scheme {
            DirectionScheme::Eight => (code + if code.is_multiple_of(2) { 2 } else { 3 }) % 8,
            DirectionScheme::Four => (code + 1) % 4,
        }
    };

    let west = n / 2;
    let Some((first_code, first_pixel)) = sweep(start, west) else {
        return ChainCode::new(start, scheme, Vec::new());
    };

    let mut codes = vec![first_code];
    let mut current = first_pixel;
    let mut last = first_code;
    // Each boundary pixel is entered at most once per incident boundary edge.
    let limit = 4 * size + 4;
    loop {
        let (code, next) = sweep(current, resume(last)).expect("a traced pixel has a neighbor");
        if current == start && code == first_code {
            break;
        }
        codes.push(code);
        current = next;
        last = code;
        if codes.len() > limit {
            return Err(Error::NotTraversable {
                row: seed.row,
                col: seed.col,
                connectivity: n,
            });
        }
    }
    ChainCode::new(start, scheme, codes)
}

/// Topmost-then-leftmost pixel and size of the component containing `seed`.
fn component_origin(img: &BinaryImage, seed: Pixel, connectivity: Connectivity) -> (Pixel, usize) {
    let mut seen = vec![false; img.width() * img.height()];
    let mut queue = VecDeque::from([seed]);
    seen[seed.row * img.width() + seed.col] = true;
    let (mut origin, mut size) = (seed, 0);
    while let Some(p) = queue.pop_front() {
        size += 1;
        origin = origin.min(p);
        for &(dr, dc) in connectivity.offsets() {
            let Some(q) = p.offset(dr, dc) else { continue };
            if !img.contains(q) || !img.get(q.row, q.col) {
                continue;
            }
            let idx = q.row * img.width() + q.col;
            if !seen[idx] {
                seen[idx] = true;
                queue.push_back(q);
            }
        }
    }
    (origin, size)
}

/// Walks the codes from the start pixel; yields `len + 1` pixels.
pub fn decode(cc: &ChainCode) -> Result<Vec<Pixel>> {
    let mut out = Vec::with_capacity(cc.len() + 1);
    let mut p = cc.start;
    out.push(p);
    for (step, &code) in cc.codes.iter().enumerate() {
        let (dr, dc) = cc.scheme.step(code);
        p = p.offset(dr, dc).ok_or(Error::NegativeCoordinate { step })?;
        out.push(p);
    }
    Ok(out)
}

/// Sum of the unit displacements; `(0, 0)` for a closed walk.
pub fn net_displacement(cc: &ChainCode) -> (isize, isize) {
    cc.codes.iter().fold((0, 0), |(r, c), &code| {
        let (dr, dc) = cc.scheme.step(code);
        (r + dr, c + dc)
    })
}

/// Occurrence count of each code.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CodeHistogram {
    scheme: DirectionScheme,
    counts: Vec<u64>,
}

impl CodeHistogram {
    pub fn from_counts(scheme: DirectionScheme, counts: Vec<u64>) -> Result<Self> {
        if counts.len() != scheme.len() {
            return Err(Error::SchemeMismatch {
                left: scheme.len() as u8,
                right: counts.len() as u8,
            });
        }
        Ok(Self { scheme, counts })
    }

    pub fn scheme(&self) -> DirectionScheme {
        self.scheme
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }
}

pub fn code_histogram(cc: &ChainCode) -> CodeHistogram {
    let mut counts = vec![0u64; cc.scheme.len()];
    for &c in &cc.codes {
        counts[c as usize] += 1;
    }
    CodeHistogram {
        scheme: cc.scheme,
        counts,
    }
}

/// Relative frequency of each code; errors on an empty histogram.
pub fn normalize(h: &CodeHistogram) -> Result<Vec<f64>> {
    let total = h.total();
    if total == 0 {
        return Err(Error::DegenerateHistogram);
    }
    Ok(h.counts.iter().map(|&c| c as f64 / total as f64).collect())
}
