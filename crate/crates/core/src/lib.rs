//! Combing of pure surface braids with straight-line programs.
//!
//! Braids on an orientable surface of genus `g` with `p` boundary components
//! are words in the generators `A(i, j)`. [`combing::comb_compressed`] turns a
//! word of length `m` into one straight-line program per strand, each of size
//! `O((2g + p + n) m)`, even though the combed factors themselves can be
//! exponentially long. Equality of braids then reduces to equality of
//! compressed free-group words, decided by [`fingerprint::EqualityChecker`].

pub mod closed;
pub mod combing;
pub mod error;
pub mod fingerprint;
pub mod presentation;
pub mod slp;

pub use combing::{beta_m, comb_classical, comb_compressed, compare_words, words_equal, CombedNormalForm};
pub use error::{Error, Result};
pub use fingerprint::{CheckerConfig, EqualityChecker, Verdict};
pub use presentation::{free_reduce, parse_word, parse_word_for, BraidWord, Letter, SurfaceParams};
pub use slp::{CompressedWord, Symbol};
