use std::path::PathBuf;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("shape mismatch in {context}: expected {expected}, got {actual}")]
    ShapeMismatch {
        context: &'static str,
        expected: String,
        actual: String,
    },

    #[error("kernel {kernel_h}x{kernel_w} (h x w) does not fit input {height}x{width}")]
    KernelTooLarge {
        kernel_h: usize,
        kernel_w: usize,
        height: usize,
        width: usize,
    },

    #[error("max-pool input must have even dimensions, got {height}x{width} (h x w)")]
    OddPoolInput { height: usize, width: usize },

    #[error("dropout probability must lie in [0, 1), got {0}")]
    InvalidDropout(f64),

    #[error("tensor data contains a non-finite value")]
    NonFinite,

    #[error("invalid network: {0}")]
    InvalidNetwork(String),

    #[error("parameters are in training mode; inference requires eval mode")]
    TrainingMode,

    #[error("image {image_w}x{image_h} is smaller than the {window_w}x{window_h} window")]
    ImageTooSmall {
        image_w: usize,
        image_h: usize,
        window_w: usize,
        window_h: usize,
    },

    #[error("unsupported character {ch:?} (U+{code:04X})")]
    UnsupportedChar { ch: char, code: u32 },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("synthesis failed: geometry constraints not met after {0} attempts")]
    GenerationFailed(usize),

    #[error("bad magic: expected {expected:?}")]
    BadMagic { expected: &'static str },

    #[error("truncated file: {0}")]
    Truncated(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("trailing data: {0} unexpected bytes after the payload")]
    TrailingData(usize),

    #[error("invalid label byte {0}")]
    InvalidLabel(u8),

    #[error("unknown layer tag {0}")]
    UnknownLayerTag(u8),

    #[error("unknown network kind tag {0}")]
    UnknownKindTag(u8),

    #[error("empty dataset")]
    EmptyDataset,

    #[error("scored set needs both classes, got {positives} positives and {negatives} negatives")]
    SingleClass { positives: usize, negatives: usize },

    #[error("target precision {target} unreachable; max achievable precision is {max_precision}")]
    PrecisionUnreachable { target: f64, max_precision: f64 },

    #[error("baseline already perfect: baseline false positive rate is 0")]
    BaselinePerfect,

    #[error("malformed PGM: {0}")]
    Pgm(String),

    #[error("malformed CSV: {0}")]
    Csv(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
