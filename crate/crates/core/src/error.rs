use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("chaotic state became non-finite at iteration {iteration}")]
    NonFiniteState { iteration: usize },
    #[error("invalid sequence length: {0}")]
    InvalidLength(String),
    #[error("window [{start}, {start}+{len}) does not fit in a sequence of length {available}")]
    WindowOutOfRange {
        start: usize,
        len: usize,
        available: usize,
    },
    #[error("non-finite value at index {0}")]
    NonFiniteValue(usize),

    #[error("bitstream length {0} is not divisible by 3")]
    LengthNotDivisibleBy3(usize),
    #[error("invalid obfuscation key digit {0:?} (expected 0..=7)")]
    InvalidKeyDigit(char),
    #[error("obfuscation key must not be empty")]
    EmptyKey,

    #[error("hex key has {actual} digits, expected {expected}")]
    BadKeyLength { expected: usize, actual: usize },
    #[error("permutation has length {actual}, expected {expected}")]
    BadPermutationLength { expected: usize, actual: usize },
    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),
    #[error("invalid hex key character {0:?}")]
    InvalidHexKey(char),
    #[error("integer sequence too short: need {needed}, have {available}")]
    InsufficientSequence { needed: usize, available: usize },

    #[error("sequence exhausted after {consumed} values with only {found} distinct S-box entries")]
    SequenceExhausted { consumed: usize, found: usize },
    #[error("value {0} out of range for a 6-bit S-box")]
    ValueOutOfRange(u8),
    #[error("S-box table is not a permutation of 0..64")]
    NotBijective,

    #[error("round-key schedule has {actual} subkeys, expected an even count")]
    BadScheduleLength { actual: usize },

    #[error("image is empty")]
    EmptyImage,
    #[error("bad length: {0}")]
    BadLength(String),
    #[error("key bundle has no digest for the {0} channel")]
    MissingDigest(&'static str),
    #[error("could not find a bounded chaotic orbit after {0} digest re-hashes")]
    NoBoundedOrbit(usize),
    #[error("unsupported configuration: {0}")]
    Unsupported(String),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("format error: {0}")]
    Format(String),

    #[error("plane is empty")]
    EmptyPlane,
    #[error("plane too small for the requested sampling")]
    PlaneTooSmall,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("region {x},{y} {w}x{h} is outside a {width}x{height} plane")]
    RegionOutOfBounds {
        x: usize,
        y: usize,
        w: usize,
        h: usize,
        width: usize,
        height: usize,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
