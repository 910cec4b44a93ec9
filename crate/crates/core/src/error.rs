use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("unreadable wav file {path}: {message}")]
    UnreadableWav { path: PathBuf, message: String },

    #[error("unsupported wav encoding in {path}: {encoding}")]
    UnsupportedEncoding { path: PathBuf, encoding: String },

    #[error("zero-length audio")]
    ZeroLengthAudio,

    #[error("invalid audio: {0}")]
    InvalidAudio(String),

    #[error("invalid frame plan: {0}")]
    InvalidFramePlan(String),

    #[error("fft size {fft_size} is smaller than the frame length {frame_length}")]
    FftTooSmall { fft_size: usize, frame_length: usize },

    #[error("fft size {0} is not a power of two")]
    FftNotPowerOfTwo(usize),

    #[error("invalid band [{lo_hz}, {hi_hz}] Hz: {reason}")]
    InvalidBand { lo_hz: f64, hi_hz: f64, reason: String },

    #[error("unknown feature '{0}'")]
    UnknownFeature(String),

    #[error("invalid convex combination: {0}")]
    InvalidCombination(String),

    #[error("invalid boundaries: b1 = {b1} must be strictly below b2 = {b2}")]
    InvalidBoundaries { b1: f64, b2: f64 },

    #[error(
        "quantile cut points ({p1}, {p2}) give identical boundaries ({value}); choose different cut points"
    )]
    DegenerateQuantiles { p1: f64, p2: f64, value: f64 },

    #[error("invalid quantile cut points ({p1}, {p2}): need 0 < p1 < p2 < 1")]
    InvalidQuantiles { p1: f64, p2: f64 },

    #[error("class id {0} out of range; expected 0, 1 or 2")]
    InvalidClass(u8),

    #[error("cannot classify non-finite value {0}")]
    NonFiniteValue(f64),

    #[error("empty collection: {0}")]
    Empty(String),

    #[error("invalid scheme config {path}: {message}")]
    SchemeConfig { path: String, message: String },

    #[error("{path}:{line}: {message}")]
    Row {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("no entries in {0}")]
    NoEntries(PathBuf),

    #[error("no ratings in {0}")]
    NoRatings(PathBuf),

    #[error("{rejected} of {total} rating rows rejected in {path}; first problem: {first}")]
    TooManyRejected {
        path: PathBuf,
        rejected: usize,
        total: usize,
        first: String,
    },

    #[error("unknown scheme '{0}'")]
    UnknownScheme(String),

    #[error("every utterance is flagged; nothing to label")]
    AllFlagged,

    #[error("malformed manifest {path}: {message}")]
    Manifest { path: PathBuf, message: String },

    #[error("invalid feature cache {path}: {message}")]
    Cache { path: PathBuf, message: String },

    #[error("no ratings for the {0} dimension")]
    NoMatchingRatings(String),

    #[error("serialization failed: {0}")]
    Serialize(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
