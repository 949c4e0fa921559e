use crate::raster::netpbm::ParseError;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] ParseError),

    #[error("{kind} image cannot be written as {format}")]
    IncompatibleFormat { kind: &'static str, format: &'static str },

    #[error("invalid dimensions {width}x{height}")]
    InvalidDimensions { width: usize, height: usize },

    #[error("box {top},{left}..{bottom},{right} outside {width}x{height} image")]
    BoxOutOfBounds {
        top: usize,
        left: usize,
        bottom: usize,
        right: usize,
        width: usize,
        height: usize,
    },

    #[error("image has no foreground")]
    EmptyImage,

    #[error("seed pixel ({row},{col}) is not foreground")]
    BackgroundSeed { row: usize, col: usize },

    #[error("component at ({row},{col}) is not {connectivity}-connected")]
    NotTraversable { row: usize, col: usize, connectivity: u8 },

    #[error("decoded pixel has negative coordinate at step {step}")]
    NegativeCoordinate { step: usize },

    #[error("invalid code {code} for {connectivity}-direction scheme")]
    InvalidCode { code: u8, connectivity: u8 },

    #[error("unsupported connectivity {0} (expected 4 or 8)")]
    Connectivity(u8),

    #[error("histogram has zero total")]
    DegenerateHistogram,

    #[error("scheme mismatch: {left}-direction vs {right}-direction")]
    SchemeMismatch { left: u8, right: u8 },

    #[error("template set is empty")]
    EmptyTemplateSet,

    #[error("glyph {index} cannot be traced: {source}")]
    UntraceableGlyph {
        index: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("template set has no raw counts for label {0:?}")]
    MissingRawCounts(char),

    #[error("template file line {line}: {message}")]
    TemplateFormat { line: usize, message: String },

    #[error("character {0:?} is not in the embedded font")]
    UnknownCharacter(char),

    #[error("invalid synthesis parameter: {0}")]
    InvalidSynthSpec(String),

    #[error("corpus is empty")]
    EmptyCorpus,

    #[error("no truth entry for {0}")]
    MissingTruth(String),

    #[error("truth file line {line}: {message}")]
    Truth { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
