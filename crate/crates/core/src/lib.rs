//! Question-tagging toolkit for StackExchange dumps.
//!
//! Streams `Posts.xml` into corpora, computes tag usage statistics, builds
//! coverage-targeted tag vocabularies, trains majority and linear baselines,
//! assembles generated tag token streams into final predictions, and scores
//! them with Hit@k and paired significance tests.

pub mod error;
pub mod analytics;
pub mod baselines;
pub mod config;
pub mod decoder;
pub mod eval;
pub mod ingest;
pub mod predictions;
pub mod report;
pub mod rng;
pub mod vocab;

pub use error::{Error, Result};
