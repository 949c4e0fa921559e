use super::BinaryImage;
use super::Connectivity;
use crate::segment::label_components;

/// Removes every foreground component smaller than `min_area` pixels.
///
/// Output foreground is a subset of the input foreground; `min_area <= 1` is the
/// identity.
pub fn despeckle(img: &BinaryImage, min_area: usize, connectivity: Connectivity) -> BinaryImage {
    if min_area <= 1 {
        return img.clone();
    }
    let labels = label_components(img, connectivity);
    let areas = labels.areas();
    let pixels = labels
        .labels()
        .iter()
        .map(|&l| l != 0 && areas[l as usize - 1] >= min_area)
        .collect();
    BinaryImage::new(img.width(), img.height(), pixels).expect("same dimensions")
}
