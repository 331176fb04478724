//! Constructive concurrent composition for interactive differential privacy.
//!
//! The crate is organized bottom-up:
//!
//! - [`distributions`]: finite distributions, kernels, divergences and the
//!   generic privacy-measure contract.
//! - [`tradeoff`]: piecewise-linear trade-off functions, the Neyman–Pearson
//!   construction, suprema, the f-DP chain rule and canonical pairs.
//! - [`blackwell`]: channel synthesis by LP feasibility and the coupling
//!   construction built on it.
//! - [`interactive`]: finite-communication mechanisms, deterministic
//!   adversaries, views and concurrent composition.
//! - [`reduction`]: simulating an interactive mechanism by interactive
//!   post-processing of a non-interactive pair.
//! - [`rdp`]: optimal Rényi adversaries and concurrent RDP composition.
//! - [`campaign`]: seeded verification campaigns over random instances.
//!
//! All probabilities are `f64`; equality checks use [`tol::EQ`].

pub mod blackwell;
pub mod campaign;
pub mod distributions;
pub mod error;
pub mod interactive;
pub mod rdp;
pub mod reduction;
pub mod tol;
pub mod tradeoff;

pub use distributions::{ExtReal, FiniteDistribution, JointDistribution, Outcome, StochasticKernel};
pub use error::{Error, Result};
pub use tradeoff::TradeoffFunction;
