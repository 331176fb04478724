//! Blackwell channel synthesis and couplings.
//!
//! Orientation: a channel from the source pair `(p, p')` onto the target pair
//! `(x, x')` exists iff `T(p, p') <= T(x, x')` pointwise, that is iff the target
//! is at least as private as the source. Couplings always use the canonical
//! pair of the target curve as the source.

mod channel;
mod coupling;
mod simplex;

pub use channel::{find_channel, ChannelSearch};
pub use coupling::{couple, multi_couple, MultiCoupling};
pub use simplex::{solve_feasibility, Feasibility, FeasibilityProblem};
