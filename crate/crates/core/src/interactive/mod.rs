//! Finite-communication interactive mechanisms and their adversaries.
//!
//! Kernel keys are `"<dataset>|<prefix>"`, where a prefix lists the completed
//! steps as `query=answer` separated by `;`, followed by the pending query.
//! The prologue of a mechanism-first mechanism has the empty query, so its
//! key is `"<dataset>|"` and later keys start with `=<answer>;`.

mod adversary;
mod concomp;
mod labels;
mod mechanism;
mod privacy;

pub use adversary::{
    count_adversaries, enumerate_adversaries, enumerate_adversaries_on, view_distribution, AdversaryStrategy,
};
pub(crate) use adversary::finish_view;
pub use concomp::{concomp, ConcurrentComposition, HALT};
pub use labels::{decode_prefix, encode_prefix, kernel_key, Step, Transcript, RESERVED};
pub use mechanism::{randomized_response, Mechanism, Round};
pub use privacy::mechanism_privacy;
