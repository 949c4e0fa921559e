//! Synthetic plate rendering with seeded salt-and-pepper noise.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::font::{self, render_glyph, GLYPH_HEIGHT};
use crate::raster::GrayImage;
use crate::{Error, Result};

pub const INK: u8 = 0;
pub const PAPER: u8 = 255;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SynthSpec {
    pub text: String,
    pub scale: usize,
    /// Blank columns between glyphs, also used as the margin on every side.
    pub gap: usize,
    /// Per-pixel probability of flipping ink and paper.
    pub noise: f64,
    pub seed: u64,
    #[serde(default)]
    pub bold: bool,
}

impl SynthSpec {
    pub fn new(text: impl Into<String>, scale: usize) -> Self {
        Self {
            text: text.into(),
            scale,
            gap: 4,
            noise: 0.0,
            seed: 0,
            bold: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(c) = self.text.chars().find(|&c| !font::is_supported(c)) {
            return Err(Error::UnknownCharacter(c));
        }
        if self.text.is_empty() {
            return Err(Error::InvalidSynthSpec("text is empty".into()));
        }
        if self.scale == 0 {
            return Err(Error::InvalidSynthSpec("scale must be at least 1".into()));
        }
        if self.gap < 2 {
            return Err(Error::InvalidSynthSpec("gap must be at least 2".into()));
        }
        if !(0.0..1.0).contains(&self.noise) {
            return Err(Error::InvalidSynthSpec(format!("noise {} outside [0, 1)", self.noise)));
        }
        Ok(())
    }
}

/// Renders dark glyphs on a light plate, then flips each pixel with
/// probability `noise`. Identical specs give identical images.
pub fn render_plate(spec: &SynthSpec) -> Result<GrayImage> {
    spec.validate()?;
    let glyphs = spec
        .text
        .chars()
        .map(|c| render_glyph(c, spec.scale, spec.bold))
        .collect::<Result<Vec<_>>>()?;
    let glyph_height = GLYPH_HEIGHT * spec.scale;
    let width = 2 * spec.gap + glyphs.iter().map(|g| g.width()).sum::<usize>() + spec.gap * (glyphs.len() - 1);
    let height = glyph_height + 2 * spec.gap;

    let mut img = GrayImage::filled(width, height, PAPER)?;
    let mut left = spec.gap;
    for g in &glyphs {
        for p in g.foreground() {
            img.set(spec.gap + p.row, left + p.col, INK);
        }
        left += g.width() + spec.gap;
    }

    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    for row in 0..height {
        for col in 0..width {
            if rng.gen::<f64>() < spec.noise {
                let v = img.get(row, col);
                img.set(row, col, PAPER - v);
            }
        }
    }
    Ok(img)
}

/// Parameters for a batch of random plates.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorpusSpec {
    pub count: usize,
    pub length: usize,
    /// Each plate picks one of these scales.
    pub scales: Vec<usize>,
    pub gap: usize,
    pub noise: f64,
    pub seed: u64,
    #[serde(default)]
    pub bold: bool,
    /// Characters to draw plate text from; the full font when empty.
    #[serde(default)]
    pub charset: String,
}

pub struct CorpusPlate {
    pub name: String,
    pub spec: SynthSpec,
    pub image: GrayImage,
}

/// Generates `count` plates named `plate_0000.pgm`, ... from one seeded stream.
pub fn generate_corpus(spec: &CorpusSpec) -> Result<Vec<CorpusPlate>> {
    if spec.scales.is_empty() {
        return Err(Error::InvalidSynthSpec("no scales given".into()));
    }
    if spec.length == 0 {
        return Err(Error::InvalidSynthSpec("plate length must be at least 1".into()));
    }
    let charset: Vec<char> = if spec.charset.is_empty() {
        font::CHARSET.chars().collect()
    } else {
        spec.charset.chars().collect()
    };
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    (0..spec.count)
        .map(|i| {
            let text: String = (0..spec.length)
                .map(|_| charset[rng.gen_range(0..charset.len())])
                .collect();
            let plate = SynthSpec {
                text,
                scale: spec.scales[rng.gen_range(0..spec.scales.len())],
                gap: spec.gap,
                noise: spec.noise,
                seed: rng.gen(),
                bold: spec.bold,
            };
            let image = render_plate(&plate)?;
            Ok(CorpusPlate {
                name: format!("plate_{i:04}.pgm"),
                spec: plate,
                image,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::font::GLYPH_WIDTH;

    #[test]
    fn single_glyph_layout() {
        let mut spec = SynthSpec::new("A", 1);
        spec.gap = 2;
        let img = render_plate(&spec).unwrap();
        assert_eq!((img.width(), img.height()), (GLYPH_WIDTH + 4, GLYPH_HEIGHT + 4));
        let glyph = render_glyph('A', 1, false).unwrap();
        for r in 0..img.height() {
            for c in 0..img.width() {
                let inside = (2..2 + GLYPH_HEIGHT).contains(&r) && (2..2 + GLYPH_WIDTH).contains(&c);
                let ink = inside && glyph.get(r - 2, c - 2);
                assert_eq!(img.get(r, c), if ink { INK } else { PAPER });
            }
        }
    }

    #[test]
    fn deterministic_noise() {
        let mut spec = SynthSpec::new("WGN8871", 2);
        spec.noise = 0.05;
        spec.seed = 9;
        let a = render_plate(&spec).unwrap();
        assert_eq!(a, render_plate(&spec).unwrap());
        assert_ne!(
            a,
            render_plate(&SynthSpec {
                noise: 0.0,
                ..spec.clone()
            })
            .unwrap()
        );
        spec.seed = 10;
        assert_ne!(a, render_plate(&spec).unwrap());
    }

    #[test]
    fn validation() {
        assert!(matches!(
            render_plate(&SynthSpec::new("a", 1)),
            Err(Error::UnknownCharacter('a'))
        ));
        assert!(render_plate(&SynthSpec::new("", 1)).is_err());
        assert!(render_plate(&SynthSpec::new("A", 0)).is_err());
        assert!(render_plate(&SynthSpec {
            gap: 1,
            ..SynthSpec::new("A", 1)
        })
        .is_err());
        assert!(render_plate(&SynthSpec {
            noise: 1.0,
            ..SynthSpec::new("A", 1)
        })
        .is_err());
    }

    #[test]
    fn corpus_is_reproducible() {
        let spec = CorpusSpec {
            count: 4,
            length: 7,
            scales: vec![2, 3],
            gap: 4,
            noise: 0.01,
            seed: 5,
            bold: false,
            charset: String::new(),
        };
        let a = generate_corpus(&spec).unwrap();
        let b = generate_corpus(&spec).unwrap();
        assert_eq!(a.len(), 4);
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.name, y.name);
            assert_eq!(x.spec, y.spec);
            assert_eq!(x.image, y.image);
            assert_eq!(x.spec.text.chars().count(), 7);
        }
        assert_eq!(a[3].name, "plate_0003.pgm");
    }
}
