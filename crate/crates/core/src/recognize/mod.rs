//! Template matching on chain-code histograms.
//!
//! Each template holds the mean normalized code histogram of its sample glyphs.
//! A glyph is assigned the label of the nearest template under L1 distance.

mod format;

pub use format::{parse_templates, write_templates};

use std::collections::BTreeMap;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::chaincode::{code_histogram, normalize, trace_boundary, ChainCode, CodeHistogram, DirectionScheme};
use crate::raster::BinaryImage;
use crate::segment::{label_components, Connectivity};
use crate::{Error, Result};

/// Tolerance for a template's frequencies summing to one.
pub const FREQUENCY_SUM_TOLERANCE: f64 = 1e-9;

/// How a glyph histogram is compared with templates.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Matching {
    /// L1 between relative frequencies.
    #[default]
    Normalized,
    /// L1 between raw code totals and the templates' mean totals; sensitive to
    /// glyph size.
    RawTotals,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Template {
    pub label: char,
    pub scheme: DirectionScheme,
    pub frequencies: Vec<f64>,
    pub sample_count: usize,
    /// Mean raw code counts, present when built for raw-total matching.
    pub mean_counts: Option<Vec<f64>>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TemplateSet {
    scheme: DirectionScheme,
    templates: Vec<Template>,
}

impl TemplateSet {
    pub fn new(scheme: DirectionScheme, templates: Vec<Template>) -> Result<Self> {
        for t in &templates {
            if t.scheme != scheme {
                return Err(Error::SchemeMismatch {
                    left: scheme.len() as u8,
                    right: t.scheme.len() as u8,
                });
            }
        }
        Ok(Self { scheme, templates })
    }

    pub fn scheme(&self) -> DirectionScheme {
        self.scheme
    }

    pub fn templates(&self) -> &[Template] {
        &self.templates
    }

    pub fn is_empty(&self) -> bool {
        self.templates.is_empty()
    }

    pub fn len(&self) -> usize {
        self.templates.len()
    }

    /// True when every template carries raw counts.
    pub fn has_raw_counts(&self) -> bool {
        !self.templates.is_empty() && self.templates.iter().all(|t| t.mean_counts.is_some())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RecognitionResult {
    pub label: char,
    pub distance: f64,
    pub runner_up: Option<(char, f64)>,
    /// Wall-clock seconds spent on this character.
    pub elapsed: f64,
}

/// L1 distance. Bounded by 2 for normalized inputs.
pub fn distance(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::SchemeMismatch {
            left: a.len() as u8,
            right: b.len() as u8,
        });
    }
    Ok(a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum())
}

pub fn classify(h: &CodeHistogram, ts: &TemplateSet) -> Result<RecognitionResult> {
    classify_with(h, ts, Matching::Normalized)
}

/// Nearest-template classification. Equal distances go to the smaller label.
pub fn classify_with(h: &CodeHistogram, ts: &TemplateSet, matching: Matching) -> Result<RecognitionResult> {
    let started = Instant::now();
    if ts.is_empty() {
        return Err(Error::EmptyTemplateSet);
    }
    if h.scheme() != ts.scheme() {
        return Err(Error::SchemeMismatch {
            left: h.scheme().len() as u8,
            right: ts.scheme().len() as u8,
        });
    }
    let query: Vec<f64> = match matching {
        Matching::Normalized => normalize(h)?,
        Matching::RawTotals => {
            if h.total() == 0 {
                return Err(Error::DegenerateHistogram);
            }
            h.counts().iter().map(|&c| c as f64).collect()
        }
    };

    // Best distance per label.
    let mut per_label: BTreeMap<char, f64> = BTreeMap::new();
    for t in ts.templates() {
        let reference = match matching {
            Matching::Normalized => &t.frequencies,
            Matching::RawTotals => t.mean_counts.as_ref().ok_or(Error::MissingRawCounts(t.label))?,
        };
        let d = distance(&query, reference)?;
        per_label
            .entry(t.label)
            .and_modify(|best| *best = best.min(d))
            .or_insert(d);
    }
    let mut ranked: Vec<(char, f64)> = per_label.into_iter().collect();
    ranked.sort_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)));

    let (label, distance) = ranked[0];
    Ok(RecognitionResult {
        label,
        distance,
        runner_up: ranked.get(1).copied(),
        elapsed: started.elapsed().as_secs_f64(),
    })
}

/// Chain code of a glyph image's main stroke: the largest 8-connected
/// component, earliest in raster order on ties.
pub fn glyph_chain_code(glyph: &BinaryImage, scheme: DirectionScheme) -> Result<ChainCode> {
    let lm = label_components(glyph, Connectivity::Eight);
    let areas = lm.areas();
    let Some(best) = (0..areas.len()).max_by(|&a, &b| areas[a].cmp(&areas[b]).then(b.cmp(&a))) else {
        return Err(Error::EmptyImage);
    };
    let target = best as u32 + 1;
    let seed = glyph
        .foreground()
        .find(|p| lm.get(p.row, p.col) == target)
        .expect("component has pixels");
    trace_boundary(glyph, seed, scheme)
}

/// Averages the normalized histograms (and raw counts) of the sample glyphs.
pub fn build_template(label: char, glyphs: &[BinaryImage], scheme: DirectionScheme) -> Result<Template> {
    if glyphs.is_empty() {
        return Err(Error::UntraceableGlyph {
            index: 0,
            source: Box::new(Error::EmptyImage),
        });
    }
    let n = scheme.len();
    let mut freq_sum = vec![0.0f64; n];
    let mut count_sum = vec![0.0f64; n];
    for (index, glyph) in glyphs.iter().enumerate() {
        let wrap = |e: Error| Error::UntraceableGlyph {
            index,
            source: Box::new(e),
        };
        let h = code_histogram(&glyph_chain_code(glyph, scheme).map_err(wrap)?);
        let f = normalize(&h).map_err(wrap)?;
        for k in 0..n {
            freq_sum[k] += f[k];
            count_sum[k] += h.counts()[k] as f64;
        }
    }
    let m = glyphs.len() as f64;
    Ok(Template {
        label,
        scheme,
        frequencies: freq_sum.into_iter().map(|s| s / m).collect(),
        sample_count: glyphs.len(),
        mean_counts: Some(count_sum.into_iter().map(|s| s / m).collect()),
    })
}

/// Counts per (truth, predicted) label pair.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    counts: BTreeMap<(char, char), usize>,
}

impl ConfusionMatrix {
    pub fn record(&mut self, truth: char, predicted: char) {
        *self.counts.entry((truth, predicted)).or_default() += 1;
    }

    pub fn get(&self, truth: char, predicted: char) -> usize {
        self.counts.get(&(truth, predicted)).copied().unwrap_or(0)
    }

    pub fn total(&self) -> usize {
        self.counts.values().sum()
    }

    pub fn correct(&self) -> usize {
        self.counts.iter().filter(|((t, p), _)| t == p).map(|(_, c)| c).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    /// Nonzero cells in (truth, predicted) order.
    pub fn entries(&self) -> impl Iterator<Item = (char, char, usize)> + '_ {
        self.counts.iter().map(|(&(t, p), &c)| (t, p, c))
    }

    pub fn off_diagonal(&self) -> impl Iterator<Item = (char, char, usize)> + '_ {
        self.entries().filter(|(t, p, _)| t != p)
    }

    /// Samples per truth label.
    pub fn row_sums(&self) -> BTreeMap<char, usize> {
        let mut rows = BTreeMap::new();
        for (t, _, c) in self.entries() {
            *rows.entry(t).or_default() += c;
        }
        rows
    }

    pub fn merge(&mut self, other: &ConfusionMatrix) {
        for (t, p, c) in other.entries() {
            *self.counts.entry((t, p)).or_default() += c;
        }
    }
}

pub fn confusion<'a, I>(results: I) -> ConfusionMatrix
where
    I: IntoIterator<Item = (char, &'a RecognitionResult)>,
{
    let mut m = ConfusionMatrix::default();
    for (truth, r) in results {
        m.record(truth, r.label);
    }
    m
}
