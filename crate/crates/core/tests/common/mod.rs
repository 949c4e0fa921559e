//! Independent reference implementations shared by the integration tests.
#![allow(dead_code)]

use std::collections::{BTreeSet, VecDeque};
use std::path::PathBuf;

use fccplate::raster::{BinaryImage, Connectivity, GrayImage, Pixel};
use num::{BigInt, BigRational, Zero};
use rand::Rng;

const N4: [(isize, isize); 4] = [(-1, 0), (0, -1), (0, 1), (1, 0)];
const N8: [(isize, isize); 8] = [(-1, -1), (-1, 0), (-1, 1), (0, -1), (0, 1), (1, -1), (1, 0), (1, 1)];

fn neighbors(c: Connectivity) -> &'static [(isize, isize)] {
    match c {
        Connectivity::Four => &N4,
        Connectivity::Eight => &N8,
    }
}

fn at(img: &BinaryImage, r: isize, c: isize) -> bool {
    r >= 0 && c >= 0 && (r as usize) < img.height() && (c as usize) < img.width() && img.get(r as usize, c as usize)
}

/// Flood-fill labeling; components numbered in order of their first pixel in
/// raster order.
pub fn flood_labels(img: &BinaryImage, conn: Connectivity) -> (Vec<u32>, u32) {
    let (w, h) = (img.width(), img.height());
    let mut labels = vec![0u32; w * h];
    let mut next = 0;
    for start in 0..w * h {
        if !img.pixels()[start] || labels[start] != 0 {
            continue;
        }
        next += 1;
        labels[start] = next;
        let mut stack = vec![start];
        while let Some(i) = stack.pop() {
            let (r, c) = ((i / w) as isize, (i % w) as isize);
            for &(dr, dc) in neighbors(conn) {
                let (nr, nc) = (r + dr, c + dc);
                if at(img, nr, nc) {
                    let j = nr as usize * w + nc as usize;
                    if labels[j] == 0 {
                        labels[j] = next;
                        stack.push(j);
                    }
                }
            }
        }
    }
    (labels, next)
}

/// Pixels of the component holding `seed`.
pub fn component(img: &BinaryImage, seed: Pixel, conn: Connectivity) -> BTreeSet<Pixel> {
    let mut set = BTreeSet::from([seed]);
    let mut queue = VecDeque::from([seed]);
    while let Some(p) = queue.pop_front() {
        for &(dr, dc) in neighbors(conn) {
            let (r, c) = (p.row as isize + dr, p.col as isize + dc);
            if at(img, r, c) {
                let q = Pixel::new(r as usize, c as usize);
                if set.insert(q) {
                    queue.push_back(q);
                }
            }
        }
    }
    set
}

/// Outer boundary of the component holding `seed`: its pixels that touch, via
/// `touch` adjacency, background reachable from outside the image. The
/// background flood uses the dual of the component's connectivity.
pub fn outer_boundary(img: &BinaryImage, seed: Pixel, conn: Connectivity) -> BTreeSet<Pixel> {
    let comp = component(img, seed, conn);
    let (touch, bg) = match conn {
        Connectivity::Eight => (Connectivity::Four, Connectivity::Four),
        Connectivity::Four => (Connectivity::Eight, Connectivity::Eight),
    };
    // Padded canvas with one ring of background around the image.
    let (w, h) = (img.width() as isize + 2, img.height() as isize + 2);
    let inside = |r: isize, c: isize| comp.contains(&Pixel::new((r - 1) as usize, (c - 1) as usize));
    let is_comp = |r: isize, c: isize| r >= 1 && c >= 1 && r < h - 1 && c < w - 1 && inside(r, c);
    let mut outside = vec![false; (w * h) as usize];
    outside[0] = true;
    let mut stack = vec![(0isize, 0isize)];
    while let Some((r, c)) = stack.pop() {
        for &(dr, dc) in neighbors(bg) {
            let (nr, nc) = (r + dr, c + dc);
            if nr < 0 || nc < 0 || nr >= h || nc >= w || is_comp(nr, nc) {
                continue;
            }
            let i = (nr * w + nc) as usize;
            if !outside[i] {
                outside[i] = true;
                stack.push((nr, nc));
            }
        }
    }
    comp.iter()
        .copied()
        .filter(|p| {
            let (r, c) = (p.row as isize + 1, p.col as isize + 1);
            neighbors(touch)
                .iter()
                .any(|&(dr, dc)| outside[((r + dr) * w + c + dc) as usize])
        })
        .collect()
}

/// Exhaustive between-class-variance scan in exact arithmetic; smallest
/// maximizer wins.
pub fn otsu_oracle(img: &GrayImage) -> u8 {
    let n = img.pixels().len() as i64;
    let mut best: Option<(BigRational, u8)> = None;
    for t in 0..=255u8 {
        let (mut n0, mut s0, mut s1) = (0i64, 0i64, 0i64);
        for &v in img.pixels() {
            if v <= t {
                n0 += 1;
                s0 += v as i64;
            } else {
                s1 += v as i64;
            }
        }
        let n1 = n - n0;
        let var = if n0 == 0 || n1 == 0 {
            BigRational::zero()
        } else {
            let r = |a: i64, b: i64| BigRational::new(BigInt::from(a), BigInt::from(b));
            let diff = r(s0, n0) - r(s1, n1);
            r(n0, n) * r(n1, n) * diff.clone() * diff
        };
        if best.as_ref().is_none_or(|(b, _)| var > *b) {
            best = Some((var, t));
        }
    }
    best.unwrap().1
}

/// A connected blob grown from a random pixel inside a random canvas of at
/// most `max`×`max`, plus optional unrelated specks.
pub fn random_blob(rng: &mut impl Rng, max: usize, conn: Connectivity, specks: usize) -> (BinaryImage, Pixel) {
    let w = rng.gen_range(1..=max);
    let h = rng.gen_range(1..=max);
    let mut img = BinaryImage::blank(w, h).unwrap();
    let seed = Pixel::new(rng.gen_range(0..h), rng.gen_range(0..w));
    img.set(seed.row, seed.col, true);
    let mut grown = vec![seed];
    let steps = rng.gen_range(0..=w * h);
    for _ in 0..steps {
        let p = grown[rng.gen_range(0..grown.len())];
        let offs = neighbors(conn);
        let (dr, dc) = offs[rng.gen_range(0..offs.len())];
        let (r, c) = (p.row as isize + dr, p.col as isize + dc);
        if r >= 0 && c >= 0 && (r as usize) < h && (c as usize) < w && !img.get(r as usize, c as usize) {
            img.set(r as usize, c as usize, true);
            grown.push(Pixel::new(r as usize, c as usize));
        }
    }
    for _ in 0..specks {
        img.set(rng.gen_range(0..h), rng.gen_range(0..w), true);
    }
    (img, seed)
}

pub fn random_binary(rng: &mut impl Rng, w: usize, h: usize, density: f64) -> BinaryImage {
    BinaryImage::new(w, h, (0..w * h).map(|_| rng.gen_bool(density)).collect()).unwrap()
}

/// Image holding exactly `pixels`.
pub fn draw(pixels: &[Pixel], width: usize, height: usize) -> BinaryImage {
    let mut img = BinaryImage::blank(width, height).unwrap();
    for p in pixels {
        img.set(p.row, p.col, true);
    }
    img
}

/// `img` moved by (dr, dc) on a canvas grown by the same amount.
pub fn translate(img: &BinaryImage, dr: usize, dc: usize) -> BinaryImage {
    let mut out = BinaryImage::blank(img.width() + dc, img.height() + dr).unwrap();
    for p in img.foreground() {
        out.set(p.row + dr, p.col + dc, true);
    }
    out
}

pub fn golden_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests").join("golden")
}

/// Compares `actual` with a golden file, rewriting it instead when
/// `FCCPLATE_BLESS` is set.
pub fn check_golden(name: &str, actual: &str) -> Result<(), String> {
    let path = golden_dir().join(name);
    if std::env::var_os("FCCPLATE_BLESS").is_some() {
        std::fs::create_dir_all(golden_dir()).map_err(|e| e.to_string())?;
        std::fs::write(&path, actual).map_err(|e| e.to_string())?;
        return Ok(());
    }
    let expected = std::fs::read_to_string(&path).map_err(|e| format!("{}: {e}", path.display()))?;
    if expected == actual {
        Ok(())
    } else {
        Err(format!("{} differs from the current output", path.display()))
    }
}
