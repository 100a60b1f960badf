//! Hierarchical distributional-label learning for loneliness expressions in
//! social-media posts: label aggregation, corpus handling, from-scratch
//! classifiers (per-block MLP heads and the global/local HDLN network),
//! evaluation metrics, and corpus analyses.

pub mod analysis;
pub mod cli;
pub mod corpus;
pub mod error;
pub mod io;
pub mod metrics;
pub mod models;
pub mod nn;
pub mod rng;
pub mod schema;
pub mod synthetic;

pub use error::{Error, Result};
