use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::Split;
use crate::encoder::{encode_all, ArchConfig, ItemMemory};
use crate::hv::{Hypervector, Metric};
use crate::model::{accuracy, roc_auc, AssociativeMemory, Refresh};
use crate::rng::{derive_seed, Domain};
use crate::tokenizer::Vocabulary;
use crate::{HdcError, Result};

/// Score reported for a trained model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum ScoreMetric {
    #[default]
    Accuracy,
    /// Area under the ROC curve of a two-class task.
    RocAuc { positive_class: usize },
}

impl ScoreMetric {
    pub fn name(self) -> &'static str {
        match self {
            ScoreMetric::Accuracy => "accuracy",
            ScoreMetric::RocAuc { .. } => "roc_auc",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvalSettings {
    pub retrain_epochs: usize,
    pub score: ScoreMetric,
    pub similarity: Metric,
    /// Visit training examples in a fresh seeded order every retrain epoch.
    pub shuffle: bool,
    pub refresh: Refresh,
}

impl Default for EvalSettings {
    fn default() -> Self {
        Self {
            retrain_epochs: 10,
            score: ScoreMetric::Accuracy,
            similarity: Metric::Cosine,
            shuffle: true,
            refresh: Refresh::Eager,
        }
    }
}

/// A split tokenized with a vocabulary built from its training part.
#[derive(Debug, Clone)]
pub struct PreparedData {
    pub vocabulary: Vocabulary,
    pub class_names: Vec<String>,
    pub train: Vec<Vec<u32>>,
    pub train_labels: Vec<usize>,
    pub valid: Vec<Vec<u32>>,
    pub valid_labels: Vec<usize>,
    pub test: Option<(Vec<Vec<u32>>, Vec<usize>)>,
}

impl PreparedData {
    pub fn new(split: &Split) -> Result<Self> {
        split.validate()?;
        let vocabulary = Vocabulary::build(&split.train.texts)?;
        Self::with_vocabulary(split, vocabulary)
    }

    /// Tokenize with an existing vocabulary, e.g. one saved with a model.
    pub fn with_vocabulary(split: &Split, vocabulary: Vocabulary) -> Result<Self> {
        let tok = |texts: &[String]| -> Result<Vec<Vec<u32>>> {
            texts.iter().map(|t| vocabulary.tokenize(t)).collect()
        };
        Ok(Self {
            class_names: split.train.class_names.clone(),
            train: tok(&split.train.texts)?,
            train_labels: split.train.labels.clone(),
            valid: tok(&split.valid.texts)?,
            valid_labels: split.valid.labels.clone(),
            test: match &split.test {
                Some(t) => Some((tok(&t.texts)?, t.labels.clone())),
                None => None,
            },
            vocabulary,
        })
    }

    pub fn classes(&self) -> usize {
        self.class_names.len()
    }
}

/// A trained classifier and everything needed to query it.
#[derive(Debug, Clone)]
pub struct TrainedModel {
    pub arch: ArchConfig,
    pub seed: u64,
    pub item_memory: ItemMemory,
    pub memory: AssociativeMemory,
    /// Misclassified training examples per retrain epoch that was run.
    pub retrain_errors: Vec<usize>,
}

impl TrainedModel {
    pub fn encode(&self, seqs: &[Vec<u32>]) -> Result<Vec<Hypervector>> {
        encode_all(&self.arch, &self.item_memory, seqs)
    }

    pub fn score_encoded(&self, queries: &[Hypervector], labels: &[usize], settings: &EvalSettings) -> Result<f64> {
        score_memory(&self.memory, queries, labels, settings)
    }

    pub fn score(&self, seqs: &[Vec<u32>], labels: &[usize], settings: &EvalSettings) -> Result<f64> {
        self.score_encoded(&self.encode(seqs)?, labels, settings)
    }
}

pub(crate) fn score_memory(
    am: &AssociativeMemory,
    queries: &[Hypervector],
    labels: &[usize],
    settings: &EvalSettings,
) -> Result<f64> {
    match settings.score {
        ScoreMetric::Accuracy => accuracy(am, queries, labels, settings.similarity),
        ScoreMetric::RocAuc { positive_class } => {
            roc_auc(am, queries, labels, positive_class, settings.similarity)
        }
    }
}

/// Shuffle seed for retrain epoch `epoch` (1-based) of a model seeded `seed`.
pub(crate) fn epoch_order(seed: u64, epoch: usize, settings: &EvalSettings) -> Option<u64> {
    settings.shuffle.then(|| derive_seed(seed, Domain::Shuffle, epoch as u64))
}

/// Item memory, encoded training set and the plainly trained memory.
pub(crate) fn train_plain(
    cfg: &ArchConfig,
    data: &PreparedData,
    seed: u64,
    settings: &EvalSettings,
) -> Result<(TrainedModel, Vec<Hypervector>)> {
    cfg.validate(false)?;
    if let ScoreMetric::RocAuc { .. } = settings.score {
        if data.classes() != 2 {
            return Err(HdcError::UndefinedMetric(format!(
                "ROC-AUC is defined for binary tasks only, this task has {} classes",
                data.classes()
            )));
        }
    }
    let item_memory = ItemMemory::generate(seed, data.vocabulary.item_count(), cfg)?;
    let train = encode_all(cfg, &item_memory, &data.train)?;
    let memory = AssociativeMemory::train(
        data.classes(),
        cfg.resultant_dtype,
        cfg.resultant_regime(),
        &train,
        &data.train_labels,
    )?
    .with_refresh(settings.refresh);
    let model = TrainedModel { arch: *cfg, seed, item_memory, memory, retrain_errors: Vec::new() };
    Ok((model, train))
}

/// Train one model: bundle the training set, then retrain for up to
/// `settings.retrain_epochs` epochs. An epoch without errors leaves the
/// memory unchanged, so retraining stops there.
pub fn train_model(cfg: &ArchConfig, data: &PreparedData, seed: u64, settings: &EvalSettings) -> Result<TrainedModel> {
    let (mut model, train) = train_plain(cfg, data, seed, settings)?;
    for epoch in 1..=settings.retrain_epochs {
        let errors = model.memory.retrain_epoch(
            &train,
            &data.train_labels,
            settings.similarity,
            epoch_order(seed, epoch, settings),
        )?;
        model.retrain_errors.push(errors);
        if errors == 0 {
            break;
        }
    }
    Ok(model)
}

/// Validation score of one architecture under one seed.
pub fn score_config(cfg: &ArchConfig, data: &PreparedData, seed: u64, settings: &EvalSettings) -> Result<f64> {
    let model = train_model(cfg, data, seed, settings)?;
    model.score(&data.valid, &data.valid_labels, settings)
}

/// Mean validation score over `seeds`, with the per-seed scores. Seeds are
/// evaluated in parallel; the result does not depend on scheduling.
pub fn evaluate_reward(
    cfg: &ArchConfig,
    data: &PreparedData,
    seeds: &[u64],
    settings: &EvalSettings,
) -> Result<(f64, Vec<f64>)> {
    if seeds.is_empty() {
        return Err(HdcError::InvalidConfig { field: "n_seeds", reason: "must be positive".into() });
    }
    let scores = seeds
        .par_iter()
        .map(|&s| score_config(cfg, data, s, settings))
        .collect::<Result<Vec<f64>>>()?;
    Ok((mean(&scores), scores))
}

pub(crate) fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}
