//! Numerical laboratory for loss-versus-rebalancing (LVR) when the
//! arbitrageur's counterpart venue is itself imperfectly liquid.
//!
//! A passive pool with demand curve `x*(Q)` is arbitraged against a liquid
//! venue whose trading cost is `Δx² / (2|x̃*'(Q)|)`. The equilibrium price
//! follows a zero-drift GBM. The crate simulates the discretized arbitrage
//! gains `ARB_T^(N)` and compares them to the closed-form rate
//!
//! ```text
//! ℓ(σ, Q) = σ²Q²/2 · (1 − |x*'(Q)| / |x̃*'(Q)|) · |x*'(Q)|
//! ```
//!
//! Modules:
//! - [`curves`]: venue demand curves (CPMM, tabulated).
//! - [`cost_models`]: quadratic, exact-CPMM and piecewise trading costs.
//! - [`price_dynamics`]: exact GBM path sampling.
//! - [`arb_engine`]: per-step arbitrage, per-path results, experiments.
//! - [`analytics`]: closed-form `ℓ`, its integrals and oracles.
//! - [`book_depth`]: order-book snapshots and slope regression.
//! - [`cli`]: the `lvrlab` command line.

// `!(x > 0.0)` is used on purpose so NaN fails validation too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analytics;
pub mod arb_engine;
pub mod book_depth;
pub mod cli;
pub mod config;
pub mod cost_models;
pub mod curves;
pub mod error;
pub mod price_dynamics;
pub mod report;
pub mod stats;

pub use error::{Error, Result};
