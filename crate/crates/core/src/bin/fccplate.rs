use std::collections::BTreeMap;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use fccplate::bench::{self, load_corpus, run_bench, MANIFEST_FILE, TRUTH_FILE};
use fccplate::chaincode::{code_histogram, trace_boundary, DirectionScheme};
use fccplate::font::{render_glyph, CHARSET};
use fccplate::pipeline::{self, Options, Threshold};
use fccplate::raster::{load_image, save_image, BinaryImage, Image, NetpbmFormat, Pixel, Polarity};
use fccplate::recognize::{build_template, parse_templates, write_templates, Matching, TemplateSet};
use fccplate::segment::Technique;
use fccplate::synth::{generate_corpus, render_plate, CorpusSpec, SynthSpec};
use fccplate::Error;

#[derive(Parser)]
#[command(
    name = "fccplate",
    version,
    about = "Plate character recognition with Freeman chain codes"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Render a synthetic plate, a corpus of plates, or the font's glyphs
    Synth(SynthArgs),
    /// Build a template file from labeled glyph images
    BuildTemplates(BuildArgs),
    /// Read the characters on one plate image
    Recognize(RecognizeArgs),
    /// Score segmentation and recognition over a corpus
    Bench(BenchArgs),
    /// Print the chain code of one component
    Trace(TraceArgs),
}

#[derive(Args)]
struct SynthArgs {
    /// Plate text (A-Z, 0-9)
    #[arg(long, conflicts_with_all = ["count", "glyphs"])]
    text: Option<String>,
    /// Generate this many random plates into the --out directory
    #[arg(long)]
    count: Option<usize>,
    /// Characters per random plate
    #[arg(long, default_value_t = 7)]
    length: usize,
    /// Characters random plates draw from (default: the whole font)
    #[arg(long, default_value = "")]
    charset: String,
    /// Write one tight glyph image per character into the --out directory
    #[arg(long)]
    glyphs: bool,
    /// Integer scale; a comma list picks one per plate
    #[arg(long, value_delimiter = ',', default_value = "3")]
    scale: Vec<usize>,
    #[arg(long, default_value_t = 4)]
    gap: usize,
    /// Salt-and-pepper flip probability
    #[arg(long, default_value_t = 0.0)]
    noise: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Bold variant (one-pixel horizontal dilation)
    #[arg(long)]
    bold: bool,
    /// Output file (single plate) or directory (--count, --glyphs)
    #[arg(long)]
    out: PathBuf,
    /// Truth CSV to append `filename,text` to (single plate)
    #[arg(long)]
    truth: Option<PathBuf>,
}

#[derive(Args)]
struct BuildArgs {
    /// Glyph files or directories; the label is the file name up to the first `_` or `.`
    #[arg(required = true)]
    inputs: Vec<PathBuf>,
    #[arg(long, default_value_t = 8)]
    connectivity: u8,
    /// Also store mean raw code totals (FCCR1 file)
    #[arg(long)]
    raw_totals: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Segmenter {
    Projection,
    Ccl,
}

impl From<Segmenter> for Technique {
    fn from(s: Segmenter) -> Self {
        match s {
            Segmenter::Projection => Technique::Projection,
            Segmenter::Ccl => Technique::Ccl,
        }
    }
}

#[derive(Args)]
struct PipelineArgs {
    #[arg(long, value_enum, default_value_t = Segmenter::Ccl)]
    segmenter: Segmenter,
    /// Columns with at most this many foreground pixels separate characters
    #[arg(long, default_value_t = 0)]
    gap_threshold: usize,
    /// Smallest component kept by despeckling and the CCL box filter
    #[arg(long, default_value_t = 8)]
    min_area: usize,
    /// `otsu` or a fixed level 0-255
    #[arg(long, default_value = "otsu", value_parser = parse_threshold)]
    threshold: Threshold,
    /// Light characters on a dark plate
    #[arg(long)]
    invert: bool,
    /// Match raw code totals instead of frequencies (needs an FCCR1 file)
    #[arg(long)]
    raw_totals: bool,
    /// Expected chain-code connectivity; must match the template file
    #[arg(long)]
    connectivity: Option<u8>,
}

impl PipelineArgs {
    fn options(&self) -> Options {
        Options {
            threshold: self.threshold,
            polarity: if self.invert {
                Polarity::LightForeground
            } else {
                Polarity::DarkForeground
            },
            min_area: self.min_area,
            gap_threshold: self.gap_threshold,
            technique: self.segmenter.into(),
            matching: if self.raw_totals {
                Matching::RawTotals
            } else {
                Matching::Normalized
            },
            ..Options::default()
        }
    }

    fn check_templates(&self, ts: &TemplateSet) -> Result<(), CliError> {
        if let Some(c) = self.connectivity {
            let wanted = DirectionScheme::try_from(c).map_err(|e| CliError::Usage(e.into()))?;
            if wanted != ts.scheme() {
                return Err(CliError::Recognition(anyhow!(Error::SchemeMismatch {
                    left: c,
                    right: ts.scheme().len() as u8,
                })));
            }
        }
        if ts.is_empty() {
            return Err(CliError::Recognition(Error::EmptyTemplateSet.into()));
        }
        if self.raw_totals && !ts.has_raw_counts() {
            return Err(CliError::Recognition(anyhow!(
                "--raw-totals needs a template file built with --raw-totals"
            )));
        }
        Ok(())
    }
}

fn parse_threshold(s: &str) -> Result<Threshold, String> {
    if s.eq_ignore_ascii_case("otsu") {
        return Ok(Threshold::Otsu);
    }
    s.parse::<u8>()
        .map(Threshold::Fixed)
        .map_err(|_| format!("expected `otsu` or a level 0-255, got {s:?}"))
}

#[derive(Args)]
struct RecognizeArgs {
    image: PathBuf,
    #[arg(long)]
    templates: PathBuf,
    #[command(flatten)]
    pipeline: PipelineArgs,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct BenchArgs {
    corpus: PathBuf,
    #[arg(long)]
    templates: PathBuf,
    /// Truth CSV (default: truth.csv in the corpus directory)
    #[arg(long)]
    truth: Option<PathBuf>,
    #[command(flatten)]
    pipeline: PipelineArgs,
    /// Print the JSON report instead of the table
    #[arg(long)]
    json: bool,
    /// Also write the JSON report to this path
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct TraceArgs {
    image: PathBuf,
    #[arg(long, default_value_t = 8)]
    connectivity: u8,
    /// Seed row (default: first foreground pixel)
    #[arg(long, requires = "col")]
    row: Option<usize>,
    #[arg(long, requires = "row")]
    col: Option<usize>,
    #[arg(long, default_value = "otsu", value_parser = parse_threshold)]
    threshold: Threshold,
    #[arg(long)]
    invert: bool,
}

/// Failure classes, each with its own exit status.
enum CliError {
    Usage(anyhow::Error),
    Io(anyhow::Error),
    Segmentation(anyhow::Error),
    Recognition(anyhow::Error),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Io(_) => 2,
            CliError::Segmentation(_) => 3,
            CliError::Recognition(_) => 4,
        }
    }

    fn error(&self) -> &anyhow::Error {
        match self {
            CliError::Usage(e) | CliError::Io(e) | CliError::Segmentation(e) | CliError::Recognition(e) => e,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::UnknownCharacter(_) | Error::InvalidSynthSpec(_) | Error::Connectivity(_) => {
                CliError::Usage(e.into())
            }
            Error::Parse(_)
            | Error::Io(_)
            | Error::TemplateFormat { .. }
            | Error::Truth { .. }
            | Error::MissingTruth(_)
            | Error::EmptyCorpus
            | Error::IncompatibleFormat { .. }
            | Error::InvalidDimensions { .. } => CliError::Io(e.into()),
            _ => CliError::Recognition(e.into()),
        }
    }
}

fn io_context<T>(r: std::io::Result<T>, path: &Path) -> Result<T, CliError> {
    r.with_context(|| format!("{}", path.display())).map_err(CliError::Io)
}

fn read_image(path: &Path) -> Result<Image, CliError> {
    let bytes = io_context(fs::read(path), path)?;
    load_image(&bytes).map_err(|e| CliError::Io(anyhow!(e).context(path.display().to_string())))
}

fn read_templates(path: &Path) -> Result<TemplateSet, CliError> {
    let text = io_context(fs::read_to_string(path), path)?;
    parse_templates(&text).map_err(|e| CliError::Io(anyhow!(e).context(path.display().to_string())))
}

fn write_output(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    io_context(fs::write(path, bytes), path)
}

fn synth(args: SynthArgs) -> Result<(), CliError> {
    let scale = *args
        .scale
        .first()
        .ok_or_else(|| CliError::Usage(anyhow!("--scale is empty")))?;
    if args.glyphs {
        io_context(fs::create_dir_all(&args.out), &args.out)?;
        for ch in CHARSET.chars() {
            let glyph = render_glyph(ch, scale, args.bold)?;
            let bytes = save_image(&Image::Binary(glyph), NetpbmFormat::P4)?;
            write_output(&args.out.join(format!("{ch}.pbm")), &bytes)?;
        }
        return Ok(());
    }

    if let Some(count) = args.count {
        let spec = CorpusSpec {
            count,
            length: args.length,
            scales: args.scale.clone(),
            gap: args.gap,
            noise: args.noise,
            seed: args.seed,
            bold: args.bold,
            charset: args.charset.clone(),
        };
        if let Some(c) = spec.charset.chars().find(|&c| !fccplate::font::is_supported(c)) {
            return Err(Error::UnknownCharacter(c).into());
        }
        let plates = generate_corpus(&spec)?;
        io_context(fs::create_dir_all(&args.out), &args.out)?;
        let mut truth = String::new();
        for plate in &plates {
            let bytes = save_image(&Image::Gray(plate.image.clone()), NetpbmFormat::P5)?;
            write_output(&args.out.join(&plate.name), &bytes)?;
            truth.push_str(&bench::truth_line(&plate.name, &plate.spec.text));
        }
        write_output(&args.out.join(TRUTH_FILE), truth.as_bytes())?;
        let manifest = serde_json::to_string_pretty(&spec).expect("spec serializes") + "\n";
        write_output(&args.out.join(MANIFEST_FILE), manifest.as_bytes())?;
        return Ok(());
    }

    let text = args
        .text
        .ok_or_else(|| CliError::Usage(anyhow!("one of --text, --count or --glyphs is required")))?;
    let spec = SynthSpec {
        text,
        scale,
        gap: args.gap,
        noise: args.noise,
        seed: args.seed,
        bold: args.bold,
    };
    let img = render_plate(&spec)?;
    write_output(&args.out, &save_image(&Image::Gray(img), NetpbmFormat::P5)?)?;
    if let Some(truth) = args.truth {
        let name = args
            .out
            .file_name()
            .and_then(|n| n.to_str())
            .ok_or_else(|| CliError::Usage(anyhow!("output path has no file name")))?;
        let mut file = io_context(fs::OpenOptions::new().create(true).append(true).open(&truth), &truth)?;
        io_context(file.write_all(bench::truth_line(name, &spec.text).as_bytes()), &truth)?;
    }
    Ok(())
}

/// Label from a glyph file name: the part before the first `_` or `.`.
fn glyph_label(path: &Path) -> Option<char> {
    let name = path.file_name()?.to_str()?;
    let stem = name.split(['_', '.']).next()?;
    let mut chars = stem.chars();
    match (chars.next(), chars.next()) {
        (Some(c), None) if c.is_ascii_uppercase() || c.is_ascii_digit() => Some(c),
        _ => None,
    }
}

fn build_templates(args: BuildArgs) -> Result<(), CliError> {
    let scheme = DirectionScheme::try_from(args.connectivity)?;
    let mut files = Vec::new();
    for input in &args.inputs {
        if input.is_dir() {
            for entry in io_context(fs::read_dir(input), input)? {
                let path = io_context(entry, input)?.path();
                let ext = path.extension().and_then(|e| e.to_str()).map(str::to_ascii_lowercase);
                if matches!(ext.as_deref(), Some("pbm" | "pgm")) {
                    files.push(path);
                }
            }
        } else if input.exists() {
            files.push(input.clone());
        } else {
            return Err(CliError::Io(anyhow!("{}: no such file", input.display())));
        }
    }
    files.sort();

    let mut groups: BTreeMap<char, Vec<(PathBuf, BinaryImage)>> = BTreeMap::new();
    for path in files {
        let label = glyph_label(&path)
            .ok_or_else(|| CliError::Usage(anyhow!("{}: cannot derive a label from the name", path.display())))?;
        let gray = read_image(&path)?.into_gray();
        let binary = pipeline::preprocess(
            &gray,
            &Options {
                min_area: 1,
                ..Options::default()
            },
        );
        groups.entry(label).or_default().push((path, binary));
    }
    if groups.is_empty() {
        return Err(CliError::Usage(anyhow!("no glyph images found")));
    }

    let mut templates = Vec::with_capacity(groups.len());
    for (label, glyphs) in &groups {
        let images: Vec<BinaryImage> = glyphs.iter().map(|(_, g)| g.clone()).collect();
        let t = build_template(*label, &images, scheme).map_err(|e| match &e {
            Error::UntraceableGlyph { index, .. } => {
                CliError::Recognition(anyhow!(e.to_string()).context(glyphs[*index].0.display().to_string()))
            }
            _ => e.into(),
        })?;
        templates.push(t);
    }
    let ts = TemplateSet::new(scheme, templates)?;
    let text = write_templates(&ts, args.raw_totals)?;
    match args.out {
        Some(path) => write_output(&path, text.as_bytes()),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

#[derive(Serialize)]
struct CharacterJson {
    label: char,
    distance: f64,
    runner_up: Option<(char, f64)>,
    elapsed_seconds: f64,
    top: usize,
    left: usize,
    bottom: usize,
    right: usize,
}

#[derive(Serialize)]
struct RecognizeJson {
    text: String,
    segmenter: Technique,
    characters: Vec<CharacterJson>,
}

fn recognize(args: RecognizeArgs) -> Result<(), CliError> {
    let ts = read_templates(&args.templates)?;
    args.pipeline.check_templates(&ts)?;
    let gray = read_image(&args.image)?.into_gray();
    let opts = args.pipeline.options();
    let reading = pipeline::read_plate(&gray, &ts, &opts)?;
    if reading.characters.is_empty() {
        return Err(CliError::Segmentation(anyhow!(
            "{}: no characters found by {} segmentation",
            args.image.display(),
            opts.technique
        )));
    }
    if args.json {
        let out = RecognizeJson {
            text: reading.text(),
            segmenter: opts.technique,
            characters: reading
                .characters
                .iter()
                .map(|c| CharacterJson {
                    label: c.result.label,
                    distance: c.result.distance,
                    runner_up: c.result.runner_up,
                    elapsed_seconds: c.result.elapsed,
                    top: c.bbox.top,
                    left: c.bbox.left,
                    bottom: c.bbox.bottom,
                    right: c.bbox.right,
                })
                .collect(),
        };
        println!("{}", serde_json::to_string_pretty(&out).expect("serializes"));
    } else {
        println!("{}", reading.text());
        for c in &reading.characters {
            let runner = c
                .result
                .runner_up
                .map_or_else(String::new, |(l, d)| format!("  (next {l} {d:.6})"));
            println!(
                "{}  distance {:.6}  {:.6} s{}",
                c.result.label, c.result.distance, c.result.elapsed, runner
            );
        }
    }
    Ok(())
}

fn bench_cmd(args: BenchArgs) -> Result<(), CliError> {
    let ts = read_templates(&args.templates)?;
    args.pipeline.check_templates(&ts)?;
    let truth = args.truth.clone().unwrap_or_else(|| args.corpus.join(TRUTH_FILE));
    let (samples, manifest) = load_corpus(&args.corpus, &truth)?;
    let report = run_bench(&samples, &ts, &args.pipeline.options(), manifest.as_ref())?;
    if let Some(path) = &args.out {
        write_output(path, report.to_json().as_bytes())?;
    }
    if args.json {
        print!("{}", report.to_json());
    } else {
        print!("{}", report.table());
    }
    Ok(())
}

fn trace(args: TraceArgs) -> Result<(), CliError> {
    let scheme = DirectionScheme::try_from(args.connectivity)?;
    let img = match read_image(&args.image)? {
        Image::Binary(b) => b,
        Image::Gray(g) => {
            let opts = Options {
                threshold: args.threshold,
                polarity: if args.invert {
                    Polarity::LightForeground
                } else {
                    Polarity::DarkForeground
                },
                min_area: 1,
                ..Options::default()
            };
            pipeline::preprocess(&g, &opts)
        }
    };
    let seed = match (args.row, args.col) {
        (Some(row), Some(col)) => Pixel::new(row, col),
        _ => img.foreground().next().ok_or(Error::EmptyImage)?,
    };
    let cc = trace_boundary(&img, seed, scheme)?;
    let counts: Vec<String> = code_histogram(&cc).counts().iter().map(u64::to_string).collect();
    println!("{},{}", cc.start().row, cc.start().col);
    println!("{cc}");
    println!("{}", counts.join(" "));
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let result = match cli.command {
        Command::Synth(a) => synth(a),
        Command::BuildTemplates(a) => build_templates(a),
        Command::Recognize(a) => recognize(a),
        Command::Bench(a) => bench_cmd(a),
        Command::Trace(a) => trace(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {:#}", e.error());
            ExitCode::from(e.code())
        }
    }
}
