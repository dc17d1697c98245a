use thiserror::Error;

/// Errors raised by the bent-square toolkit.
///
/// Variant names are part of the command-line contract: the CLI prints them
/// verbatim, so renaming one is a breaking change.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("vector is not the Walsh spectrum of any Boolean function")]
    NotASpectrum,
    #[error("operation needs an even number of variables, got {0}")]
    OddVariableCount(u32),
    #[error("B*H/2^k has an entry that is not +-1")]
    NotABentSquareImage,
    #[error("bad shape: {0}")]
    BadShape(String),
    #[error("expected 4 distinct indices, got {0}")]
    BadCardinality(usize),
    #[error("{what} = {value} exceeds the supported maximum {max}")]
    TooLarge {
        what: &'static str,
        value: usize,
        max: usize,
    },
    #[error("{0} is not a power of two")]
    NotPowerOfTwo(usize),
    #[error("matrices of different sizes: {0} and {1}")]
    MixedSizes(usize, usize),
    #[error("n must be even and at least 4, got {0}")]
    OddOrSmallN(u32),
    #[error("invalid truth table encoding: {0}")]
    BadTruthTable(String),
    #[error("invalid 2-regular matrix: {0}")]
    InvalidMatrix(String),
}

impl Error {
    /// The variant name, e.g. `"NotASpectrum"`.
    pub fn name(&self) -> &'static str {
        match self {
            Error::NotASpectrum => "NotASpectrum",
            Error::OddVariableCount(_) => "OddVariableCount",
            Error::NotABentSquareImage => "NotABentSquareImage",
            Error::BadShape(_) => "BadShape",
            Error::BadCardinality(_) => "BadCardinality",
            Error::TooLarge { .. } => "TooLarge",
            Error::NotPowerOfTwo(_) => "NotPowerOfTwo",
            Error::MixedSizes(..) => "MixedSizes",
            Error::OddOrSmallN(_) => "OddOrSmallN",
            Error::BadTruthTable(_) => "BadTruthTable",
            Error::InvalidMatrix(_) => "InvalidMatrix",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
