//! Embedded 5×7 bitmap font covering `A`–`Z` and `0`–`9`.
//!
//! Similar-looking pairs (`O`/`0`, `B`/`8`, `G`/`6`, `D`/`0`) share most of
//! their outer outline, as they do on real plates.

use crate::raster::BinaryImage;
use crate::{Error, Result};

pub const GLYPH_WIDTH: usize = 5;
pub const GLYPH_HEIGHT: usize = 7;

/// Every renderable character, digits first.
pub const CHARSET: &str = "0123456789ABCDEFGHIJKLMNOPQRSTUVWXYZ";

type Bitmap = [&'static str; GLYPH_HEIGHT];

const GLYPHS: [(char, Bitmap); 36] = [
    ('0', [".####", "#..##", "#.#.#", "#.#.#", "#.#.#", "##..#", "####."]),
    ('1', ["..#..", ".##..", "..#..", "..#..", "..#..", "..#..", ".###."]),
    ('2', [".###.", "#...#", "....#", "...#.", "..#..", ".#...", "#####"]),
    ('3', ["#####", "...#.", "..#..", "...#.", "....#", "#...#", ".###."]),
    ('4', ["...#.", "..##.", ".#.#.", "#..#.", "#####", "...#.", "...#."]),
    ('5', ["#####", "#....", "####.", "....#", "....#", "#...#", ".###."]),
    ('6', [".###.", "#...#", "#....", "####.", "#...#", "#...#", ".###."]),
    ('7', ["#####", "....#", "...#.", "..#..", ".#...", ".#...", ".#..."]),
    ('8', [".###.", "#...#", "#...#", "####.", "#...#", "#...#", ".###."]),
    ('9', [".###.", "#...#", "#...#", ".####", "....#", "...#.", ".##.."]),
    ('A', [".###.", "#...#", "#...#", "#####", "#...#", "#...#", "#...#"]),
    ('B', ["####.", "#...#", "#...#", "####.", "#...#", "#...#", "####."]),
    ('C', [".###.", "#...#", "#....", "#....", "#....", "#...#", ".###."]),
    ('D', ["####.", "#...#", "#...#", "#...#", "#...#", "#...#", "####."]),
    ('E', ["#####", "#....", "#....", "####.", "#....", "#....", "#####"]),
    ('F', ["#####", "#....", "#....", "####.", "#....", "#....", "#...."]),
    ('G', [".###.", "#...#", "#....", "#.###", "#...#", "#...#", ".###."]),
    ('H', ["#...#", "#...#", "#...#", "#####", "#...#", "#...#", "#...#"]),
    ('I', ["#####", "..#..", "..#..", "..#..", "..#..", "..#..", "#####"]),
    ('J', ["..###", "...#.", "...#.", "...#.", "...#.", "#..#.", ".##.."]),
    ('K', ["#...#", "#..#.", "#.#..", "##...", "#.#..", "#..#.", "#...#"]),
    ('L', ["#....", "#....", "#....", "#....", "#....", "#....", "#####"]),
    ('M', ["#...#", "##.##", "#.#.#", "#.#.#", "#...#", "#...#", "#...#"]),
    ('N', ["#...#", "#...#", "##..#", "#.#.#", "#..##", "#...#", "#...#"]),
    ('O', [".###.", "#...#", "#...#", "#...#", "#...#", "#...#", ".###."]),
    ('P', ["####.", "#...#", "#...#", "####.", "#....", "#....", "#...."]),
    ('Q', [".###.", "#...#", "#...#", "#...#", "#.#.#", "#..#.", ".##.#"]),
    ('R', ["####.", "#...#", "#...#", "####.", "#.#..", "#..#.", "#...#"]),
    ('S', [".####", "#....", "#....", ".###.", "....#", "....#", "####."]),
    ('T', ["#####", "..#..", "..#..", "..#..", "..#..", "..#..", "..#.."]),
    ('U', ["#...#", "#...#", "#...#", "#...#", "#...#", "#...#", "#####"]),
    ('V', ["#...#", "#...#", "#...#", "#...#", "#...#", ".#.#.", "..#.."]),
    ('W', ["#...#", "#...#", "#...#", "#.#.#", "#.#.#", "#.#.#", ".#.#."]),
    ('X', ["#...#", "#...#", ".#.#.", "..#..", ".#.#.", "#...#", "#...#"]),
    ('Y', ["#...#", "#...#", ".#.#.", "..#..", "..#..", "..#..", "..#.."]),
    ('Z', ["#####", "....#", "...#.", "..#..", ".#...", "#....", "#####"]),
];

fn bitmap(ch: char) -> Result<&'static Bitmap> {
    GLYPHS
        .iter()
        .find(|(c, _)| *c == ch)
        .map(|(_, b)| b)
        .ok_or(Error::UnknownCharacter(ch))
}

pub fn is_supported(ch: char) -> bool {
    CHARSET.contains(ch)
}

/// Renders one glyph tightly: `5*scale` wide (plus one column when bold) by
/// `7*scale` high, foreground = stroke.
///
/// The bold variant ORs the glyph with itself shifted one pixel right, which
/// also turns corner-only joints into edge joints.
pub fn render_glyph(ch: char, scale: usize, bold: bool) -> Result<BinaryImage> {
    if scale == 0 {
        return Err(Error::InvalidSynthSpec("scale must be at least 1".into()));
    }
    let rows = bitmap(ch)?;
    let width = GLYPH_WIDTH * scale + usize::from(bold);
    let height = GLYPH_HEIGHT * scale;
    let mut img = BinaryImage::blank(width, height)?;
    for (r, line) in rows.iter().enumerate() {
        for (c, cell) in line.bytes().enumerate() {
            if cell != b'#' {
                continue;
            }
            for dr in 0..scale {
                for dc in 0..scale + usize::from(bold) {
                    img.set(r * scale + dr, c * scale + dc, true);
                }
            }
        }
    }
    Ok(img)
}
