use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid modulus {0}: must be at least 2")]
    InvalidModulus(u64),

    #[error("invalid split: fraction {fraction} of {total} samples leaves an empty side")]
    InvalidSplit { fraction: f64, total: usize },

    #[error("value {0} is outside the encodable domain [0, 2^32]")]
    Domain(u64),

    #[error("decoding is not supported for non-positional encoder `{0}`")]
    UnsupportedDecode(&'static str),

    #[error("malformed feature vector: {0}")]
    Malformed(String),

    #[error("row {row}: {source}")]
    Row { row: usize, source: Box<Error> },

    #[error("dimension mismatch: expected {expected}, got {actual} ({context})")]
    Dimension {
        expected: usize,
        actual: usize,
        context: &'static str,
    },

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("residue class {missing} has no training samples for modulus {modulus}")]
    UnderdeterminedLabels { missing: u64, modulus: u64 },

    #[error("modulus mismatch: model uses {model}, data uses {data}")]
    ModulusMismatch { model: u64, data: u64 },

    #[error("label {label} out of range for {classes} classes")]
    LabelOutOfRange { label: usize, classes: usize },

    #[error("invalid config: {0}")]
    Config(String),

    #[error("invalid grid: {0}")]
    Grid(String),

    #[error("unknown table `{name}`; valid names: {valid}")]
    UnknownTable { name: String, valid: String },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl Error {
    /// Stable identifier used in one-line CLI error output.
    pub fn code(&self) -> &'static str {
        match self {
            Error::InvalidModulus(_) => "invalid_modulus",
            Error::InvalidSplit { .. } => "invalid_split",
            Error::Domain(_) => "domain",
            Error::UnsupportedDecode(_) => "unsupported",
            Error::Malformed(_) => "malformed",
            Error::Row { source, .. } => source.code(),
            Error::Dimension { .. } => "dimension",
            Error::NonFinite(_) => "non_finite",
            Error::UnderdeterminedLabels { .. } => "underdetermined_labels",
            Error::ModulusMismatch { .. } => "modulus_mismatch",
            Error::LabelOutOfRange { .. } => "label_out_of_range",
            Error::Config(_) => "config",
            Error::Grid(_) => "grid",
            Error::UnknownTable { .. } => "unknown_table",
            Error::Parse(_) => "parse",
            Error::Io(_) => "io",
        }
    }
}
