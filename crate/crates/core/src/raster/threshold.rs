use std::cmp::Ordering;

use super::{BinaryImage, GrayImage};

/// Which side of the threshold counts as character stroke.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Polarity {
    /// Dark characters on a light plate.
    #[default]
    DarkForeground,
    LightForeground,
}

/// Otsu's threshold: the level `t` that maximizes the between-class variance of
/// the split `{v <= t}` / `{v > t}`. Ties resolve to the smallest `t`, so a
/// constant image yields 0.
///
/// Levels are compared exactly. For a split with `n0` pixels and intensity sum
/// `s0` out of `n` pixels summing to `s`, the variance is proportional to
/// `(n*s0 - n0*s)^2 / (n0*n1)`, which is kept as an integer fraction.
pub fn otsu_level(img: &GrayImage) -> u8 {
    let mut hist = [0u64; 256];
    for &v in img.pixels() {
        hist[v as usize] += 1;
    }
    let n = img.pixels().len() as u128;
    let s: u128 = hist.iter().enumerate().map(|(v, &c)| v as u128 * c as u128).sum();

    let mut best = 0u8;
    let mut best_score: Option<Fraction> = None;
    let (mut n0, mut s0) = (0u128, 0u128);
    for (t, &count) in hist.iter().enumerate() {
        n0 += count as u128;
        s0 += t as u128 * count as u128;
        let n1 = n - n0;
        let score = if n0 == 0 || n1 == 0 {
            Fraction::ZERO
        } else {
            let d = (n * s0).abs_diff(n0 * s);
            Fraction::new(d * d, n0 * n1)
        };
        if best_score.as_ref().is_none_or(|b| score.cmp(b) == Ordering::Greater) {
            best = t as u8;
            best_score = Some(score);
        }
    }
    best
}

/// Non-negative fraction compared without overflow by continued-fraction expansion.
#[derive(Clone, Copy, Debug)]
struct Fraction {
    num: u128,
    den: u128,
}

impl Fraction {
    const ZERO: Fraction = Fraction { num: 0, den: 1 };

    fn new(num: u128, den: u128) -> Self {
        debug_assert!(den > 0);
        Self { num, den }
    }

    fn cmp(&self, other: &Fraction) -> Ordering {
        let (mut a, mut b, mut c, mut d) = (self.num, self.den, other.num, other.den);
        // Compares a/b with c/d; `flip` tracks reciprocal steps.
        let mut flip = false;
        loop {
            let (qa, ra) = (a / b, a % b);
            let (qc, rc) = (c / d, c % d);
            let ord = qa.cmp(&qc);
            if ord != Ordering::Equal {
                return if flip { ord.reverse() } else { ord };
            }
            match (ra == 0, rc == 0) {
                (true, true) => return Ordering::Equal,
                (true, false) => return if flip { Ordering::Greater } else { Ordering::Less },
                (false, true) => return if flip { Ordering::Less } else { Ordering::Greater },
                (false, false) => {
                    // ra/b vs rc/d is the reverse of b/ra vs d/rc
                    (a, b, c, d) = (b, ra, d, rc);
                    flip = !flip;
                }
            }
        }
    }
}

/// Per-pixel threshold. With dark foreground a pixel is set iff `v <= level`,
/// otherwise iff `v > level`.
pub fn binarize(img: &GrayImage, level: u8, polarity: Polarity) -> BinaryImage {
    let pixels = img
        .pixels()
        .iter()
        .map(|&v| match polarity {
            Polarity::DarkForeground => v <= level,
            Polarity::LightForeground => v > level,
        })
        .collect();
    BinaryImage::new(img.width(), img.height(), pixels).expect("same dimensions")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gray(pixels: Vec<u8>) -> GrayImage {
        GrayImage::new(pixels.len(), 1, pixels).unwrap()
    }

    #[test]
    fn two_level_image_picks_smallest_separator() {
        let img = gray([0u8, 255].repeat(8));
        assert_eq!(otsu_level(&img), 0);
    }

    #[test]
    fn constant_image_is_zero() {
        assert_eq!(otsu_level(&gray(vec![128; 40])), 0);
        assert_eq!(otsu_level(&gray(vec![255; 3])), 0);
    }

    #[test]
    fn bimodal_lands_between_modes() {
        let mut px = vec![50u8; 100];
        px.extend(std::iter::repeat_n(200u8, 100));
        let t = otsu_level(&gray(px));
        assert!((50..200).contains(&t), "got {t}");
    }

    #[test]
    fn fraction_ordering() {
        let f = Fraction::new;
        assert_eq!(f(1, 3).cmp(&f(2, 6)), Ordering::Equal);
        assert_eq!(f(1, 3).cmp(&f(1, 2)), Ordering::Less);
        assert_eq!(f(7, 5).cmp(&f(4, 3)), Ordering::Greater);
        assert_eq!(f(0, 1).cmp(&f(0, 9)), Ordering::Equal);
        assert_eq!(f(u128::MAX, 3).cmp(&f(u128::MAX - 1, 3)), Ordering::Greater);
        assert_eq!(f(355, 113).cmp(&f(22, 7)), Ordering::Less);
    }

    #[test]
    fn binarize_examples() {
        let img = gray(vec![0, 255]);
        assert_eq!(binarize(&img, 0, Polarity::DarkForeground).pixels(), &[true, false]);
        assert_eq!(binarize(&img, 255, Polarity::DarkForeground).pixels(), &[true, true]);
        let img = gray(vec![10, 20, 30]);
        assert_eq!(
            binarize(&img, 20, Polarity::DarkForeground).pixels(),
            &[true, true, false]
        );
        assert_eq!(
            binarize(&img, 20, Polarity::LightForeground).pixels(),
            &[false, false, true]
        );
    }
}
