//! Analysis toolkit for two-tier cellular networks with and without a
//! control/user-plane split.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod association;
pub mod cli;
pub mod config;
pub mod coverage;
pub mod error;
pub mod mobility;
pub mod montecarlo;
pub mod specialfns;
pub mod throughput;

pub use config::{DerivedRatios, MobilityConfig, ModelConfig, NetworkConfig, SplitConfig};
pub use error::{Error, Result};
pub use mobility::Architecture;
