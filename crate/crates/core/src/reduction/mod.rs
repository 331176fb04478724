//! Interactive-to-non-interactive reduction.
//!
//! [`reduce`] turns a mechanism and a dataset pair into seeds `(Y, Y')` plus a
//! [`PostProcessor`]; [`verify_reduction`] replays every adversary against
//! both the mechanism and the processor.
//!
//! Seed labels mirror the recursion: the unit tuple at a leaf, `a` or
//! `(a, child)` after a mechanism answer `a`, and one coordinate per possible
//! query when the adversary speaks.

mod processor;
mod reduce;
mod verify;

pub use processor::{simulate_view, PostProcessor};
pub use reduce::{reduce, ReductionResult};
pub use verify::{verify_reduction, ReductionReport};
