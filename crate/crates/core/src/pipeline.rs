//! End-to-end plate reading: threshold, despeckle, segment, trace, classify.

use std::time::Instant;

use serde::Serialize;

use crate::chaincode::code_histogram;
use crate::raster::{binarize, despeckle, otsu_level, BinaryImage, Connectivity, GrayImage, Polarity};
use crate::recognize::{classify_with, glyph_chain_code, Matching, RecognitionResult, TemplateSet};
use crate::segment::{
    components_to_boxes, crop, label_components, segment_by_projection, BoundingBox, Segmentation, Technique,
};
use crate::Result;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Threshold {
    Otsu,
    Fixed(u8),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Options {
    pub threshold: Threshold,
    pub polarity: Polarity,
    /// Despeckle and CCL box filter area.
    pub min_area: usize,
    pub min_height_fraction: f64,
    pub gap_threshold: usize,
    pub technique: Technique,
    pub matching: Matching,
}

impl Default for Options {
    fn default() -> Self {
        Self {
            threshold: Threshold::Otsu,
            polarity: Polarity::DarkForeground,
            min_area: 8,
            min_height_fraction: 0.3,
            gap_threshold: 0,
            technique: Technique::Ccl,
            matching: Matching::Normalized,
        }
    }
}

/// Segmentation and despeckling adjacency. Characters may hang together
/// through corners, so this is fixed at 8.
pub const SEGMENT_CONNECTIVITY: Connectivity = Connectivity::Eight;

/// Threshold then despeckle.
pub fn preprocess(img: &GrayImage, opts: &Options) -> BinaryImage {
    let level = match opts.threshold {
        Threshold::Otsu => otsu_level(img),
        Threshold::Fixed(level) => level,
    };
    let binary = binarize(img, level, opts.polarity);
    despeckle(&binary, opts.min_area, SEGMENT_CONNECTIVITY)
}

pub fn segment(img: &BinaryImage, technique: Technique, opts: &Options) -> Segmentation {
    match technique {
        Technique::Projection => segment_by_projection(img, opts.gap_threshold),
        Technique::Ccl => components_to_boxes(
            &label_components(img, SEGMENT_CONNECTIVITY),
            opts.min_area,
            opts.min_height_fraction,
        ),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CharacterReading {
    pub bbox: BoundingBox,
    pub result: RecognitionResult,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PlateReading {
    pub segmentation: Segmentation,
    pub characters: Vec<CharacterReading>,
}

impl PlateReading {
    pub fn text(&self) -> String {
        self.characters.iter().map(|c| c.result.label).collect()
    }
}

/// Traces and classifies one character; `elapsed` covers trace, histogram and
/// classification.
pub fn recognize_glyph(glyph: &BinaryImage, templates: &TemplateSet, matching: Matching) -> Result<RecognitionResult> {
    let started = Instant::now();
    let cc = glyph_chain_code(glyph, templates.scheme())?;
    let mut result = classify_with(&code_histogram(&cc), templates, matching)?;
    result.elapsed = started.elapsed().as_secs_f64();
    Ok(result)
}

pub fn recognize_boxes(
    img: &BinaryImage,
    segmentation: Segmentation,
    templates: &TemplateSet,
    matching: Matching,
) -> Result<PlateReading> {
    let characters = segmentation
        .boxes
        .iter()
        .map(|bbox| {
            let glyph = crop(img, bbox)?;
            Ok(CharacterReading {
                bbox: *bbox,
                result: recognize_glyph(&glyph, templates, matching)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(PlateReading {
        segmentation,
        characters,
    })
}

/// Full pipeline with the segmenter chosen in `opts`. An image with no
/// character boxes yields a reading with no characters.
pub fn read_plate(img: &GrayImage, templates: &TemplateSet, opts: &Options) -> Result<PlateReading> {
    let binary = preprocess(img, opts);
    let segmentation = segment(&binary, opts.technique, opts);
    recognize_boxes(&binary, segmentation, templates, opts.matching)
}
