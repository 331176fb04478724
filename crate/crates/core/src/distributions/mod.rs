//! Finite discrete distributions, stochastic kernels and divergences.

mod dist;
mod divergence;
mod kernel;
pub mod measure;
mod outcome;

pub use dist::{mixture, product, product_many, FiniteDistribution, JointDistribution};
pub use divergence::{kl_divergence, max_divergence, renyi_divergence, ExtReal};
pub use kernel::{pushforward, StochasticKernel};
pub use measure::PrivacyMeasure;
pub use outcome::Outcome;
