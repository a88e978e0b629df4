//! Probabilistic diffusion auctions over social networks.
//!
//! The crate provides the single-item path mechanism, the maps that reduce a
//! general network to an ordering, the resulting single- and multi-unit
//! mechanisms, and brute-force checkers for their incentive properties.

pub mod baselines;
pub mod error;
pub mod fixtures;
pub mod fpdm;
pub mod gen;
pub mod graph;
pub mod lottery;
pub mod maps;
pub mod mechanism;
pub mod montecarlo;
pub mod mupdm;
pub mod pdm;
pub mod rational;
pub mod verify;

pub use error::{Error, Result};
pub use rational::Rational;
