//! Hyperdimensional-computing (HDC) sequence classifiers whose every
//! architectural knob is a runtime parameter, plus a policy-gradient search
//! that picks those knobs for a dataset.
//!
//! The pipeline is:
//!
//! 1. [`tokenizer`] turns text into character ids.
//! 2. [`encoder`] maps each id to a seeded base hypervector and binds
//!    rotated n-gram windows into one encoded hypervector per sample.
//! 3. [`model`] bundles encoded hypervectors into per-class accumulators,
//!    retrains them perceptron-style and answers similarity queries.
//! 4. [`search`] samples architectures from a recurrent controller, scores
//!    them with steps 1-3 and updates the controller with REINFORCE.
//!
//! [`data`] loads labeled corpora and builds splits.

pub mod data;
pub mod encoder;
mod error;
pub mod hv;
pub mod model;
pub mod rng;
pub mod search;
pub mod tokenizer;

pub use error::{HdcError, Result};
