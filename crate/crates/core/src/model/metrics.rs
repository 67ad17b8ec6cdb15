//! Softmax, accuracy and ROC-AUC.

use super::AssociativeMemory;
use crate::hv::{Hypervector, Metric};
use crate::{HdcError, Result};

/// Numerically stable softmax.
pub fn softmax(xs: &[f64]) -> Vec<f64> {
    let max = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = xs.iter().map(|&x| (x - max).exp()).collect();
    let total: f64 = exps.iter().sum();
    exps.into_iter().map(|e| e / total).collect()
}

/// Index of the largest value, ties to the lowest index.
pub fn argmax(xs: &[f64]) -> usize {
    let mut best = 0;
    for (i, &x) in xs.iter().enumerate().skip(1) {
        if x > xs[best] {
            best = i;
        }
    }
    best
}

/// Area under the ROC curve via the Mann-Whitney rank statistic. Tied scores
/// share their average rank, so each tied positive/negative pair counts 1/2.
pub fn roc_auc_from_scores(scores: &[f64], positive: &[bool]) -> Result<f64> {
    if scores.len() != positive.len() {
        return Err(HdcError::UndefinedMetric(format!(
            "{} scores for {} labels",
            scores.len(),
            positive.len()
        )));
    }
    if scores.iter().any(|s| s.is_nan()) {
        return Err(HdcError::UndefinedMetric("NaN score".into()));
    }
    let n_pos = positive.iter().filter(|&&p| p).count();
    let n_neg = positive.len() - n_pos;
    if n_pos == 0 || n_neg == 0 {
        return Err(HdcError::UndefinedMetric(
            "ROC-AUC needs both positive and negative examples".into(),
        ));
    }

    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]));

    // Sum of 1-based ranks of the positives, averaged over tie groups.
    let mut rank_sum = 0.0;
    let mut i = 0;
    while i < order.len() {
        let mut j = i + 1;
        while j < order.len() && scores[order[j]] == scores[order[i]] {
            j += 1;
        }
        let avg_rank = (i + 1 + j) as f64 / 2.0;
        let pos_in_group = order[i..j].iter().filter(|&&k| positive[k]).count();
        rank_sum += avg_rank * pos_in_group as f64;
        i = j;
    }
    let (p, n) = (n_pos as f64, n_neg as f64);
    let u = rank_sum - p * (p + 1.0) / 2.0;
    Ok(u / (p * n))
}

pub fn accuracy(
    am: &AssociativeMemory,
    queries: &[Hypervector],
    labels: &[usize],
    metric: Metric,
) -> Result<f64> {
    if queries.is_empty() {
        return Err(HdcError::UndefinedMetric("accuracy of an empty set".into()));
    }
    if queries.len() != labels.len() {
        return Err(HdcError::DimensionMismatch { left: queries.len(), right: labels.len() });
    }
    let mut correct = 0usize;
    for (q, &y) in queries.iter().zip(labels) {
        if am.classify(q, metric)? == y {
            correct += 1;
        }
    }
    Ok(correct as f64 / queries.len() as f64)
}

/// ROC-AUC of a two-class memory, scoring each query by the softmax
/// probability of `positive_class`.
pub fn roc_auc(
    am: &AssociativeMemory,
    queries: &[Hypervector],
    labels: &[usize],
    positive_class: usize,
    metric: Metric,
) -> Result<f64> {
    if am.classes() != 2 {
        return Err(HdcError::UndefinedMetric(format!(
            "ROC-AUC is defined for binary tasks only, this task has {} classes",
            am.classes()
        )));
    }
    if positive_class >= 2 {
        return Err(HdcError::LabelOutOfRange { label: positive_class, classes: 2 });
    }
    if queries.len() != labels.len() {
        return Err(HdcError::DimensionMismatch { left: queries.len(), right: labels.len() });
    }
    let scores = queries
        .iter()
        .map(|q| Ok(am.predict(q, metric)?.probabilities[positive_class]))
        .collect::<Result<Vec<f64>>>()?;
    let positive: Vec<bool> = labels.iter().map(|&y| y == positive_class).collect();
    roc_auc_from_scores(&scores, &positive)
}
