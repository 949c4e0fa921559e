//! Corpus benchmark: segmentation success per technique, recognition accuracy
//! over successfully segmented plates, confusion counts and per-character
//! timing.
//!
//! Recognition is scored only on plates whose segmentation produced exactly
//! one box per truth character, so its denominator is the number of characters
//! on those plates.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::pipeline::{preprocess, recognize_boxes, segment, Options};
use crate::raster::{load_image, GrayImage};
use crate::recognize::{ConfusionMatrix, TemplateSet};
use crate::segment::Technique;
use crate::synth::CorpusSpec;
use crate::{Error, Result};

/// Name of the optional corpus manifest written next to generated plates.
pub const MANIFEST_FILE: &str = "corpus.json";
pub const TRUTH_FILE: &str = "truth.csv";

/// Label recorded when a segmented box cannot be traced or classified.
pub const UNREADABLE: char = '?';

pub struct PlateSample {
    pub name: String,
    pub truth: String,
    pub image: GrayImage,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorpusDescriptor {
    pub plates: usize,
    pub glyphs: usize,
    pub scales: Option<Vec<usize>>,
    pub noise: Option<f64>,
    pub seed: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Ratio {
    pub successes: usize,
    pub total: usize,
    pub ratio: f64,
}

impl Ratio {
    fn new(successes: usize, total: usize) -> Self {
        Self {
            successes,
            total,
            ratio: if total == 0 {
                0.0
            } else {
                successes as f64 / total as f64
            },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SegmentationSummary {
    #[serde(flatten)]
    pub ratio: Ratio,
    /// Plates whose box count differed from the truth length.
    pub failures: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RecognitionSummary {
    pub segmenter: Technique,
    pub plates_scored: usize,
    #[serde(flatten)]
    pub ratio: Ratio,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConfusionEntry {
    pub truth: char,
    pub predicted: char,
    pub count: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub samples: usize,
    pub min_seconds: f64,
    pub max_seconds: f64,
    pub mean_seconds: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    pub corpus: CorpusDescriptor,
    pub segmentation: BTreeMap<Technique, SegmentationSummary>,
    pub recognition: RecognitionSummary,
    pub confusion: Vec<ConfusionEntry>,
    /// Wall-clock fields; the only part of the report that varies between runs.
    pub timing: Timing,
}

impl BenchReport {
    pub fn confusion_matrix(&self) -> ConfusionMatrix {
        let mut m = ConfusionMatrix::default();
        for e in &self.confusion {
            for _ in 0..e.count {
                m.record(e.truth, e.predicted);
            }
        }
        m
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }

    /// JSON with the timing block removed.
    pub fn deterministic_json(&self) -> String {
        #[derive(Serialize)]
        struct Untimed<'a> {
            corpus: &'a CorpusDescriptor,
            segmentation: &'a BTreeMap<Technique, SegmentationSummary>,
            recognition: &'a RecognitionSummary,
            confusion: &'a [ConfusionEntry],
        }
        let view = Untimed {
            corpus: &self.corpus,
            segmentation: &self.segmentation,
            recognition: &self.recognition,
            confusion: &self.confusion,
        };
        serde_json::to_string_pretty(&view).expect("report serializes") + "\n"
    }

    /// Plain-text summary laid out like a results table.
    pub fn table(&self) -> String {
        let mut out = String::new();
        let pct = |r: &Ratio| format!("{:.2}%", 100.0 * r.ratio);
        let frac = |r: &Ratio| format!("{}/{}", r.successes, r.total);
        writeln!(
            out,
            "{:<14}{:<32}{:>12}{:>12}",
            "Phase", "Technique", "Successful", "Percentage"
        )
        .unwrap();
        let mut phase = "Segmentation";
        for (technique, name) in [
            (Technique::Projection, "Pixel count (projection)"),
            (Technique::Ccl, "Connected component labeling"),
        ] {
            if let Some(s) = self.segmentation.get(&technique) {
                writeln!(
                    out,
                    "{:<14}{:<32}{:>12}{:>12}",
                    phase,
                    name,
                    frac(&s.ratio),
                    pct(&s.ratio)
                )
                .unwrap();
                phase = "";
            }
        }
        let r = &self.recognition;
        writeln!(
            out,
            "{:<14}{:<32}{:>12}{:>12}",
            "Recognition",
            format!("FCC (on {})", r.segmenter),
            frac(&r.ratio),
            pct(&r.ratio)
        )
        .unwrap();
        writeln!(
            out,
            "\nTime per character over {} samples: min {:.6} s, mean {:.6} s, max {:.6} s",
            self.timing.samples, self.timing.min_seconds, self.timing.mean_seconds, self.timing.max_seconds
        )
        .unwrap();
        let mut errors: Vec<&ConfusionEntry> = self.confusion.iter().filter(|e| e.truth != e.predicted).collect();
        errors.sort_by(|a, b| {
            b.count
                .cmp(&a.count)
                .then(a.truth.cmp(&b.truth))
                .then(a.predicted.cmp(&b.predicted))
        });
        if errors.is_empty() {
            writeln!(out, "No confusions.").unwrap();
        } else {
            writeln!(out, "Confusions (truth -> predicted):").unwrap();
            for e in errors {
                writeln!(out, "  {} -> {}  {}", e.truth, e.predicted, e.count).unwrap();
            }
        }
        out
    }
}

struct PlateOutcome {
    box_counts: BTreeMap<Technique, usize>,
    /// (truth, predicted, elapsed) per character when the recognition
    /// segmenter succeeded.
    characters: Option<Vec<(char, char, Option<f64>)>>,
}

fn evaluate(sample: &PlateSample, templates: &TemplateSet, opts: &Options) -> Result<PlateOutcome> {
    let binary = preprocess(&sample.image, opts);
    let expected = sample.truth.chars().count();
    let mut box_counts = BTreeMap::new();
    let mut characters = None;
    for technique in [Technique::Projection, Technique::Ccl] {
        let seg = segment(&binary, technique, opts);
        box_counts.insert(technique, seg.boxes.len());
        if technique != opts.technique || seg.boxes.len() != expected {
            continue;
        }
        let mut chars = Vec::with_capacity(expected);
        for (truth, bbox) in sample.truth.chars().zip(&seg.boxes) {
            let single = crate::segment::Segmentation {
                boxes: vec![*bbox],
                technique,
            };
            match recognize_boxes(&binary, single, templates, opts.matching) {
                Ok(reading) => {
                    let r = &reading.characters[0].result;
                    chars.push((truth, r.label, Some(r.elapsed)));
                }
                Err(_) => chars.push((truth, UNREADABLE, None)),
            }
        }
        characters = Some(chars);
    }
    Ok(PlateOutcome { box_counts, characters })
}

/// Runs both segmenters on every plate and recognition with `opts.technique`.
/// Plates are processed in parallel; the reduction follows input order.
pub fn run_bench(
    samples: &[PlateSample],
    templates: &TemplateSet,
    opts: &Options,
    manifest: Option<&CorpusSpec>,
) -> Result<BenchReport> {
    if samples.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    if templates.is_empty() {
        return Err(Error::EmptyTemplateSet);
    }
    let outcomes = samples
        .par_iter()
        .map(|s| evaluate(s, templates, opts))
        .collect::<Result<Vec<_>>>()?;

    let mut segmentation = BTreeMap::new();
    for technique in [Technique::Projection, Technique::Ccl] {
        let failures: Vec<String> = samples
            .iter()
            .zip(&outcomes)
            .filter(|(s, o)| o.box_counts[&technique] != s.truth.chars().count())
            .map(|(s, _)| s.name.clone())
            .collect();
        segmentation.insert(
            technique,
            SegmentationSummary {
                ratio: Ratio::new(samples.len() - failures.len(), samples.len()),
                failures,
            },
        );
    }

    let mut matrix = ConfusionMatrix::default();
    let mut times = Vec::new();
    let mut plates_scored = 0;
    for chars in outcomes.iter().filter_map(|o| o.characters.as_ref()) {
        plates_scored += 1;
        for &(truth, predicted, elapsed) in chars {
            matrix.record(truth, predicted);
            times.extend(elapsed);
        }
    }

    let timing = if times.is_empty() {
        Timing {
            samples: 0,
            min_seconds: 0.0,
            max_seconds: 0.0,
            mean_seconds: 0.0,
        }
    } else {
        Timing {
            samples: times.len(),
            min_seconds: times.iter().copied().fold(f64::INFINITY, f64::min),
            max_seconds: times.iter().copied().fold(0.0, f64::max),
            mean_seconds: times.iter().sum::<f64>() / times.len() as f64,
        }
    };

    Ok(BenchReport {
        corpus: CorpusDescriptor {
            plates: samples.len(),
            glyphs: samples.iter().map(|s| s.truth.chars().count()).sum(),
            scales: manifest.map(|m| m.scales.clone()),
            noise: manifest.map(|m| m.noise),
            seed: manifest.map(|m| m.seed),
        },
        segmentation,
        recognition: RecognitionSummary {
            segmenter: opts.technique,
            plates_scored,
            ratio: Ratio::new(matrix.correct(), matrix.total()),
        },
        confusion: matrix
            .entries()
            .map(|(truth, predicted, count)| ConfusionEntry {
                truth,
                predicted,
                count,
            })
            .collect(),
        timing,
    })
}

/// Parses `filename,plate_string` lines (no header).
pub fn parse_truth(text: &str) -> Result<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    for (i, line) in text.lines().enumerate() {
        let line_no = i + 1;
        if line.trim().is_empty() {
            continue;
        }
        let err = |message: &str| Error::Truth {
            line: line_no,
            message: message.to_string(),
        };
        let mut fields = line.split(',');
        let (Some(name), Some(text), None) = (fields.next(), fields.next(), fields.next()) else {
            return Err(err("expected exactly two comma-separated fields"));
        };
        if name.is_empty() {
            return Err(err("empty file name"));
        }
        if out.insert(name.to_string(), text.to_string()).is_some() {
            return Err(err("duplicate file name"));
        }
    }
    Ok(out)
}

pub fn truth_line(name: &str, text: &str) -> String {
    format!("{name},{text}\n")
}

/// Loads every `.pgm`/`.pbm` file in `dir` (sorted by name) with its truth
/// string, plus the corpus manifest when present.
pub fn load_corpus(dir: &Path, truth_path: &Path) -> Result<(Vec<PlateSample>, Option<CorpusSpec>)> {
    let truth = parse_truth(&fs::read_to_string(truth_path)?)?;
    let mut names: Vec<String> = fs::read_dir(dir)?
        .filter_map(|e| e.ok())
        .filter(|e| e.path().is_file())
        .filter_map(|e| e.file_name().into_string().ok())
        .filter(|n| {
            let lower = n.to_ascii_lowercase();
            lower.ends_with(".pgm") || lower.ends_with(".pbm")
        })
        .collect();
    names.sort();

    let mut samples = Vec::with_capacity(names.len());
    for name in names {
        let text = truth.get(&name).ok_or_else(|| Error::MissingTruth(name.clone()))?;
        let image = load_image(&fs::read(dir.join(&name))?)?.into_gray();
        samples.push(PlateSample {
            name,
            truth: text.clone(),
            image,
        });
    }

    let manifest_path = dir.join(MANIFEST_FILE);
    let manifest = if manifest_path.is_file() {
        let text = fs::read_to_string(&manifest_path)?;
        Some(serde_json::from_str(&text).map_err(|e| Error::Truth {
            line: e.line(),
            message: format!("{MANIFEST_FILE}: {e}"),
        })?)
    } else {
        None
    };
    Ok((samples, manifest))
}
