use alloc::string::String;
use core::fmt;

/// Errors reported by schema construction, sketch maintenance, and the
/// monitoring/reordering operations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// Schema must carry at least two distinct values.
    SchemaTooSmall { cardinality: usize },
    /// A schema label appeared twice.
    DuplicateLabel { label: String },
    /// A value label (or index) is not part of the schema.
    UnknownValue { label: String },
    /// Window geometry is inconsistent (`s` must divide `|W|`, sizes positive).
    InvalidWindowSpec { reason: &'static str },
    /// Fairness proportions are inconsistent with the schema.
    InvalidConstraint { reason: &'static str },
    /// An input sequence had the wrong length for the operation.
    LengthMismatch { expected: usize, got: usize },
    /// An item arrived with an unexpected stream position.
    OutOfOrder { expected: u64, got: u64 },
    /// A block index fell outside `1..=k`.
    BlockIndexOutOfRange { index: usize, blocks: usize },
    /// The stream is shorter than one block.
    StreamTooShort { len: usize, block_size: usize },
    /// Input exceeds a hard size guard (brute-force enumeration).
    TooLargeForBruteForce { len: usize, max: usize },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::SchemaTooSmall { cardinality } => {
                write!(f, "attribute schema needs at least 2 values, got {cardinality}")
            }
            Error::DuplicateLabel { label } => {
                write!(f, "duplicate attribute label {label:?}")
            }
            Error::UnknownValue { label } => {
                write!(f, "value {label:?} is not in the attribute schema")
            }
            Error::InvalidWindowSpec { reason } => {
                write!(f, "invalid window spec: {reason}")
            }
            Error::InvalidConstraint { reason } => {
                write!(f, "invalid fairness constraint: {reason}")
            }
            Error::LengthMismatch { expected, got } => {
                write!(f, "expected {expected} items, got {got}")
            }
            Error::OutOfOrder { expected, got } => {
                write!(f, "out-of-order stream position: expected {expected}, got {got}")
            }
            Error::BlockIndexOutOfRange { index, blocks } => {
                write!(f, "block index {index} out of range 1..={blocks}")
            }
            Error::StreamTooShort { len, block_size } => {
                write!(f, "stream of {len} items is shorter than one block of {block_size}")
            }
            Error::TooLargeForBruteForce { len, max } => {
                write!(f, "brute-force enumeration refused: {len} items exceeds the {max}-item guard")
            }
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for Error {}
