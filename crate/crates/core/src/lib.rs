//! Character recognition for single-line license plates using Freeman chain codes.
//!
//! The pipeline runs in this order:
//!
//! 1. [`raster`]: Netpbm I/O, Otsu thresholding and small-component removal.
//! 2. [`segment`]: split the plate into character boxes, either by column
//!    projection ("pixel count") or by connected-component labeling.
//! 3. [`chaincode`]: clockwise Moore-neighbor tracing of each character's
//!    outer boundary into a Freeman chain code.
//! 4. [`recognize`]: per-direction code histograms matched against templates.
//!
//! [`synth`] renders plates from an embedded 5×7 font so that every stage can be
//! tested without external assets, and [`bench`] aggregates segmentation and
//! recognition accuracy plus per-character timing over a corpus.

pub mod bench;
pub mod chaincode;
mod error;
pub mod font;
pub mod pipeline;
pub mod raster;
pub mod recognize;
pub mod segment;
pub mod synth;

pub use error::{Error, Result};
