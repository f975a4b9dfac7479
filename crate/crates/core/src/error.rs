use thiserror::Error;

use crate::lz::Violation;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("empty text")]
    EmptyText,

    #[error("invalid factorization: phrase {index}: {reason}")]
    InvalidFactorization { index: usize, reason: Violation },

    #[error("non-monotone roots: pushed end {ell} after {last}")]
    NonMonotoneRoots { ell: u64, last: u64 },

    #[error("range [{i}..{j}] out of bounds (length {len})")]
    RangeOutOfBounds { i: u64, j: u64, len: u64 },

    #[error("unknown nonterminal {0}")]
    UnknownId(u32),

    #[error("grammar has no start symbol")]
    NoStart,

    #[error("sampling probability {0} outside [0, 1]")]
    BadProbability(f64),

    #[error("text too long: {0} symbols")]
    TextTooLong(usize),

    #[error(transparent)]
    Format(#[from] FormatError),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Errors raised while decoding the binary LZ7F and AVLG formats.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FormatError {
    #[error("bad magic: expected {expected:?}")]
    BadMagic { expected: &'static str },
    #[error("unsupported version {0}")]
    UnsupportedVersion(u8),
    #[error("unexpected end")]
    UnexpectedEnd,
    #[error("trailing bytes after last record")]
    TrailingBytes,
    #[error("record {record}: unknown tag {tag}")]
    BadTag { record: u64, tag: u8 },
    #[error("record {record}: literal code {code} does not fit a byte")]
    BadLiteral { record: u64, code: u64 },
    #[error("record {record}: dangling id {child}")]
    DanglingId { record: u64, child: u64 },
    #[error("record {record}: acyclicity violated (child {child})")]
    AcyclicityViolated { record: u64, child: u64 },
    #[error("record {record}: AVL condition violated")]
    AvlViolation { record: u64 },
    #[error("start id {0} out of range")]
    BadStart(u64),
}

impl FormatError {
    /// Stable numeric code, one per variant.
    pub fn code(&self) -> u8 {
        match self {
            FormatError::BadMagic { .. } => 1,
            FormatError::UnsupportedVersion(_) => 2,
            FormatError::UnexpectedEnd => 3,
            FormatError::TrailingBytes => 4,
            FormatError::BadTag { .. } => 5,
            FormatError::BadLiteral { .. } => 6,
            FormatError::DanglingId { .. } => 7,
            FormatError::AcyclicityViolated { .. } => 8,
            FormatError::AvlViolation { .. } => 9,
            FormatError::BadStart(_) => 10,
        }
    }
}
