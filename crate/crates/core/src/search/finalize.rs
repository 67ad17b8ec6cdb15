use serde::{Deserialize, Serialize};

use super::evaluate::{epoch_order, score_memory, train_plain, EvalSettings, PreparedData, TrainedModel};
use crate::encoder::ArchConfig;
use crate::{HdcError, Result};

/// Split used to pick the best retraining epoch.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Selection {
    #[default]
    Validation,
    /// Select on the test split after every epoch, as in the original
    /// protocol. The reported test score is then optimistic.
    PaperModeTest,
}

impl Selection {
    pub fn label(self) -> &'static str {
        match self {
            Selection::Validation => "validation",
            Selection::PaperModeTest => "test (paper mode: selection sees the test set)",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FinalReport {
    pub arch: ArchConfig,
    pub seed: u64,
    pub selection: Selection,
    pub selection_label: String,
    pub metric: String,
    /// Selection-split score after plain training (index 0) and after each
    /// retrain epoch that was run.
    pub epoch_scores: Vec<f64>,
    pub epoch_errors: Vec<usize>,
    pub best_epoch: usize,
    pub best_score: f64,
    pub valid_score: f64,
    pub test_score: Option<f64>,
    /// True when an epoch without training errors ended retraining early.
    pub converged: bool,
}

/// Retrain `cfg` for up to `final_epochs` epochs and keep the snapshot that
/// scores best on the selection split.
pub fn finalize(
    cfg: &ArchConfig,
    data: &PreparedData,
    seed: u64,
    final_epochs: usize,
    selection: Selection,
    settings: &EvalSettings,
) -> Result<(TrainedModel, FinalReport)> {
    let (mut model, train) = train_plain(cfg, data, seed, settings)?;
    let valid = model.encode(&data.valid)?;
    let test = match &data.test {
        Some((seqs, labels)) => Some((model.encode(seqs)?, labels.as_slice())),
        None => None,
    };
    let (sel_q, sel_y) = match selection {
        Selection::Validation => (&valid, data.valid_labels.as_slice()),
        Selection::PaperModeTest => {
            let (q, y) = test
                .as_ref()
                .ok_or_else(|| HdcError::Split("paper_mode_test selection needs a test split".into()))?;
            (q, *y)
        }
    };

    let mut scores = vec![score_memory(&model.memory, sel_q, sel_y, settings)?];
    let mut errors = Vec::new();
    let mut best = (0, scores[0], model.memory.clone());
    let mut converged = false;
    for epoch in 1..=final_epochs {
        let e = model.memory.retrain_epoch(
            &train,
            &data.train_labels,
            settings.similarity,
            epoch_order(seed, epoch, settings),
        )?;
        errors.push(e);
        let s = score_memory(&model.memory, sel_q, sel_y, settings)?;
        scores.push(s);
        if s > best.1 {
            best = (epoch, s, model.memory.clone());
        }
        if e == 0 {
            // Nothing changes from here on.
            converged = true;
            break;
        }
    }

    model.memory = best.2;
    model.retrain_errors = errors.clone();
    let valid_score = score_memory(&model.memory, &valid, &data.valid_labels, settings)?;
    let test_score = match &test {
        Some((q, y)) => Some(score_memory(&model.memory, q, y, settings)?),
        None => None,
    };
    let report = FinalReport {
        arch: *cfg,
        seed,
        selection,
        selection_label: selection.label().to_string(),
        metric: settings.score.name().to_string(),
        epoch_scores: scores,
        epoch_errors: errors,
        best_epoch: best.0,
        best_score: best.1,
        valid_score,
        test_score,
        converged,
    };
    Ok((model, report))
}
