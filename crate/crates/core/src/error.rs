use thiserror::Error;

use crate::ring::RingParams;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("invalid ring parameters: {0}")]
    InvalidParams(String),
    #[error("{what} needs {needed}, cap is {cap}")]
    CapExceeded { what: &'static str, needed: u128, cap: u128 },
    #[error("no irreducible polynomial of degree {f} over F_{p}")]
    NoIrreducible { p: u64, f: u32 },
    #[error("internal fault: {0}")]
    Internal(String),
    #[error("level mismatch: {left} vs {right}")]
    LevelMismatch { left: u32, right: u32 },
    #[error("ring mismatch: {left} vs {right}")]
    RingMismatch { left: RingParams, right: RingParams },
    #[error("level {level} exceeds {max}")]
    LevelOverflow { level: u32, max: u32 },
    #[error("index {index} out of range [0, {size})")]
    IndexOutOfRange { index: u64, size: u64 },
    #[error("residue {0} is not in the residue field")]
    NotAResidue(u64),
    #[error("element is not a unit")]
    NotAUnit,
    #[error("conditioning on a null fiber")]
    NullFiber,
    #[error("measure carriers differ")]
    CarrierMismatch,
    #[error("partitions do not refine one another")]
    NonRefining,
    #[error("empty set")]
    EmptySet,
    #[error("0 is missing from an operand")]
    MissingZero,
    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("arithmetic overflow in {0}")]
    Overflow(&'static str),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("missing witness: {0}")]
    MissingWitness(String),
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

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}
