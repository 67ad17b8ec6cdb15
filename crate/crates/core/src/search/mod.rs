//! Architecture search: a recurrent policy samples one choice per decision
//! of the [`SearchSpace`], the executor scores the resulting architecture on
//! a dataset, and REINFORCE with a moving-average baseline updates the
//! policy.

mod checkpoint;
mod controller;
mod episode;
mod evaluate;
mod finalize;
mod run;
mod space;

pub use checkpoint::{load_checkpoint, save_checkpoint, CHECKPOINT_MAGIC, CHECKPOINT_VERSION};
pub use controller::{Controller, ControllerConfig, PolicyKind, SampledPath, UpdateInfo};
pub use episode::{read_log, EpisodeRecord, EpisodeWriter};
pub use evaluate::{
    evaluate_reward, score_config, train_model, EvalSettings, PreparedData, ScoreMetric,
    TrainedModel,
};
pub use finalize::{finalize, FinalReport, Selection};
pub use run::{
    best_episode, random_search, random_search_with, search_loop, search_with, SearchOutcome,
    SearchSettings, SearchState, SeedPolicy,
};
pub use space::{Decision, SearchSpace};
