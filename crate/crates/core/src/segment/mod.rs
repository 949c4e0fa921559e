//! Character segmentation: vertical projection ("pixel count") and
//! connected-component labeling.

mod label;

pub use label::{label_components, LabelMap};

use serde::{Deserialize, Serialize};

use crate::raster::BinaryImage;
pub use crate::raster::Connectivity;
use crate::{Error, Result};

/// Inclusive pixel rectangle.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BoundingBox {
    pub top: usize,
    pub left: usize,
    pub bottom: usize,
    pub right: usize,
}

impl BoundingBox {
    pub fn width(&self) -> usize {
        self.right - self.left + 1
    }

    pub fn height(&self) -> usize {
        self.bottom - self.top + 1
    }

    /// The whole image.
    pub fn full(img: &BinaryImage) -> Self {
        Self {
            top: 0,
            left: 0,
            bottom: img.height() - 1,
            right: img.width() - 1,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Technique {
    Projection,
    Ccl,
}

impl std::fmt::Display for Technique {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Technique::Projection => "projection",
            Technique::Ccl => "ccl",
        })
    }
}

/// Character boxes ordered left to right (ties broken by top edge).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Segmentation {
    pub boxes: Vec<BoundingBox>,
    pub technique: Technique,
}

/// Foreground pixel count of every column.
pub fn column_profile(img: &BinaryImage) -> Vec<usize> {
    let mut profile = vec![0usize; img.width()];
    for row in img.pixels().chunks_exact(img.width()) {
        for (count, &v) in profile.iter_mut().zip(row) {
            *count += usize::from(v);
        }
    }
    profile
}

/// Splits at columns whose foreground count is `<= gap_threshold`. Each maximal
/// run of columns above the threshold becomes one box spanning the rows that
/// hold foreground within those columns.
pub fn segment_by_projection(img: &BinaryImage, gap_threshold: usize) -> Segmentation {
    let profile = column_profile(img);
    let mut boxes = Vec::new();
    let mut col = 0;
    while col < profile.len() {
        if profile[col] <= gap_threshold {
            col += 1;
            continue;
        }
        let left = col;
        while col < profile.len() && profile[col] > gap_threshold {
            col += 1;
        }
        let right = col - 1;
        let rows_with_ink = (0..img.height()).filter(|&r| (left..=right).any(|c| img.get(r, c)));
        let (mut top, mut bottom) = (usize::MAX, 0);
        for r in rows_with_ink {
            top = top.min(r);
            bottom = bottom.max(r);
        }
        boxes.push(BoundingBox {
            top,
            left,
            bottom,
            right,
        });
    }
    Segmentation {
        boxes,
        technique: Technique::Projection,
    }
}

/// Keeps components with at least `min_area` pixels and a height of at least
/// `min_height_fraction` of the image height.
pub fn components_to_boxes(lm: &LabelMap, min_area: usize, min_height_fraction: f64) -> Segmentation {
    let n = lm.n_components() as usize;
    let mut bounds: Vec<Option<BoundingBox>> = vec![None; n];
    let mut areas = vec![0usize; n];
    for row in 0..lm.height() {
        for col in 0..lm.width() {
            let l = lm.get(row, col);
            if l == 0 {
                continue;
            }
            let i = l as usize - 1;
            areas[i] += 1;
            let b = bounds[i].get_or_insert(BoundingBox {
                top: row,
                left: col,
                bottom: row,
                right: col,
            });
            b.top = b.top.min(row);
            b.bottom = b.bottom.max(row);
            b.left = b.left.min(col);
            b.right = b.right.max(col);
        }
    }
    let min_height = min_height_fraction * lm.height() as f64;
    let mut boxes: Vec<BoundingBox> = bounds
        .into_iter()
        .zip(areas)
        .filter_map(|(b, area)| b.filter(|b| area >= min_area && b.height() as f64 >= min_height))
        .collect();
    boxes.sort_by_key(|b| (b.left, b.top));
    Segmentation {
        boxes,
        technique: Technique::Ccl,
    }
}

/// Copies out the region covered by `bbox`.
pub fn crop(img: &BinaryImage, bbox: &BoundingBox) -> Result<BinaryImage> {
    if bbox.top > bbox.bottom || bbox.left > bbox.right || bbox.bottom >= img.height() || bbox.right >= img.width() {
        return Err(Error::BoxOutOfBounds {
            top: bbox.top,
            left: bbox.left,
            bottom: bbox.bottom,
            right: bbox.right,
            width: img.width(),
            height: img.height(),
        });
    }
    let mut pixels = Vec::with_capacity(bbox.width() * bbox.height());
    for row in bbox.top..=bbox.bottom {
        pixels.extend((bbox.left..=bbox.right).map(|c| img.get(row, c)));
    }
    BinaryImage::new(bbox.width(), bbox.height(), pixels)
}
