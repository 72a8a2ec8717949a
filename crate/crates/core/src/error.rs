use std::fmt;

/// Decoding stage that produced a failure.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    /// Recovery of the checksum from the repetition segment.
    Repetition,
    /// Recovery of the syndrome tag from its checksum.
    Checksum,
    /// Recovery of the BCH codeword from the syndrome tag.
    Tag,
    /// Decoding of a sieve code.
    Sieve,
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Stage::Repetition => "repetition",
            Stage::Checksum => "checksum",
            Stage::Tag => "tag",
            Stage::Sieve => "sieve",
        };
        f.write_str(name)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("position {pos} out of range for length {len}")]
    PositionOutOfRange { pos: usize, len: usize },
    #[error("string of length {len} is too short (need at least {min})")]
    TooShort { len: usize, min: usize },
    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },
    #[error("weight order {order} out of range [1, {max}]")]
    OrderOutOfRange { order: usize, max: usize },
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("checksum component {index} out of range")]
    ComponentOutOfRange { index: usize },
    #[error("packed checksum value out of range")]
    ValueOutOfRange,
    #[error("empty message")]
    EmptyMessage,
    #[error("input is not a codeword")]
    NotACodeword,
    #[error("distinct neighbors share a checksum (internal invariant violated)")]
    ChecksumCollision,
    #[error("modulus does not fit in {width} bits")]
    ModulusOverflow { width: usize },
    #[error("{stage} stage: no candidate is consistent with the input")]
    NoSurvivor { stage: Stage },
    #[error("{stage} stage: {count} distinct candidates survived (internal invariant violated)")]
    MultipleSurvivors { stage: Stage, count: usize },
    #[error("length {n} exceeds the enumeration limit {max}")]
    TooLarge { n: usize, max: usize },
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
