use num_bigint::BigUint;
use thiserror::Error;

use crate::presentation::Letter;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid surface parameters: {0}")]
    InvalidParams(String),

    #[error("letter {0} is not a generator for these surface parameters")]
    InvalidLetter(Letter),

    #[error("cannot move {conjugator} left past {target}: second index is not smaller")]
    NotSwappable { conjugator: Letter, target: Letter },

    #[error("syntax error at byte {position}: {message}")]
    Syntax { position: usize, message: String },

    #[error("budget of {budget} letters exceeded")]
    BudgetExceeded { budget: u64 },

    #[error("evaluation has length {length}, above the limit of {limit}")]
    TooLong { length: BigUint, limit: u64 },

    #[error("terminal alphabets of the two programs are incompatible")]
    AlphabetMismatch,

    #[error("malformed straight-line program: {0}")]
    MalformedSlp(String),

    #[error("letter {0} is not a kernel generator (second index is the first strand)")]
    NotKernel(Letter),

    #[error("no relator subword found while eliminating the first-strand word `{0}`")]
    ReductionStuck(String),

    #[error("json: {0}")]
    Json(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl From<serde_json::Error> for Error {
    fn from(err: serde_json::Error) -> Self {
        Error::Json(err.to_string())
    }
}
