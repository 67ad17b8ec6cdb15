//! Associative-memory classifier: training, perceptron-style retraining,
//! similarity inference and evaluation metrics.

mod memory;
pub mod metrics;
mod persist;

pub use memory::{AssociativeMemory, Prediction, Refresh};
pub use metrics::{accuracy, roc_auc, roc_auc_from_scores, softmax};
pub use persist::{ModelFile, ModelHeader, FORMAT_VERSION, MODEL_MAGIC};
