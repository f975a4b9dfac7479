//! Conversion of LZ77-like parses into AVL grammars.
//!
//! The two converters are [`basic::convert_basic`], which keeps one
//! nonterminal per prefix, and [`lazy::convert_lazy`], which keeps a
//! sequence of roots and merges them only when a copy needs them.

pub mod basic;
pub mod bench;
pub mod containers;
pub mod corpus;
pub mod error;
pub mod fingerprint;
pub mod grammar;
pub mod io;
pub mod lazy;
pub mod repair;
pub mod lz;

pub use basic::convert_basic;
pub use error::{Error, FormatError, Result};
pub use fingerprint::{DedupMap, Fingerprint, FingerprintContext};
pub use grammar::{Grammar, Rule};
pub use lazy::{convert_lazy, LazyConverter, LazyStats};
pub use lz::{lz77_parse, lz_decode, validate, Factorization, Phrase};
