//! Labeled corpora: loaders, splits and a synthetic generator.

mod corpus;
mod split;
mod synthetic;

pub use corpus::{load_csv, load_language_dirs, load_presplit_csv, LabeledCorpus};
pub use split::{split, Split, SplitSpec};
pub use synthetic::{synthetic_corpus, SyntheticSpec};
