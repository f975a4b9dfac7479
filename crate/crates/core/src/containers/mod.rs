//! Low-overhead storage used by the converters.

mod blocked;
mod roots;
mod side_tables;

pub use blocked::{BlockedArray, GROWTH_DIVISOR, MIN_BLOCK};
pub use roots::{RootSpan, RootsSequence, RootsStats};
pub use side_tables::{SideTables, LONG_THRESHOLD};
