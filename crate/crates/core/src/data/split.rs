use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use super::LabeledCorpus;
use crate::rng::{self, Domain};
use crate::{HdcError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SplitSpec {
    pub train: f64,
    pub valid: f64,
    /// Zero for a two-way split.
    pub test: f64,
    pub seed: u64,
    /// Split every class separately so class proportions are preserved.
    pub stratified: bool,
}

impl Default for SplitSpec {
    fn default() -> Self {
        Self { train: 0.8, valid: 0.2, test: 0.0, seed: 0, stratified: true }
    }
}

impl SplitSpec {
    pub fn validate(&self) -> Result<()> {
        let ok = |f: f64| f.is_finite() && f >= 0.0;
        if !(ok(self.train) && ok(self.valid) && ok(self.test)) || self.train <= 0.0 || self.valid <= 0.0 {
            return Err(HdcError::Split(format!(
                "fractions ({}, {}, {}) must be positive",
                self.train, self.valid, self.test
            )));
        }
        let sum = self.train + self.valid + self.test;
        if (sum - 1.0).abs() > 1e-9 {
            return Err(HdcError::Split(format!("fractions sum to {sum}, not 1")));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Split {
    pub train: LabeledCorpus,
    pub valid: LabeledCorpus,
    pub test: Option<LabeledCorpus>,
}

impl Split {
    pub fn classes(&self) -> usize {
        self.train.classes()
    }

    /// Check that labels agree and every class appears in training.
    pub fn validate(&self) -> Result<()> {
        self.train.validate()?;
        self.valid.validate()?;
        if self.valid.class_names != self.train.class_names {
            return Err(HdcError::Split("train and validation class lists differ".into()));
        }
        if let Some(t) = &self.test {
            t.validate()?;
            if t.class_names != self.train.class_names {
                return Err(HdcError::Split("train and test class lists differ".into()));
            }
        }
        if let Some(c) = self.train.class_counts().iter().position(|&n| n == 0) {
            return Err(HdcError::Split(format!(
                "class {:?} is absent from the training split",
                self.train.class_names[c]
            )));
        }
        if self.valid.is_empty() {
            return Err(HdcError::Split("validation split is empty".into()));
        }
        Ok(())
    }
}

/// Distribute `total` units over quotas by largest remainder, never giving a
/// slot more than `cap`.
fn apportion(quotas: &[f64], caps: &[usize], total: usize) -> Vec<usize> {
    let mut out: Vec<usize> = quotas
        .iter()
        .zip(caps)
        .map(|(&q, &c)| (q.floor() as usize).min(c))
        .collect();
    let mut left = total.saturating_sub(out.iter().sum());
    let mut order: Vec<usize> = (0..quotas.len()).collect();
    // Largest fractional part first; stable on index.
    order.sort_by(|&a, &b| {
        let fa = quotas[a] - quotas[a].floor();
        let fb = quotas[b] - quotas[b].floor();
        fb.total_cmp(&fa)
    });
    while left > 0 {
        let mut progressed = false;
        for &i in &order {
            if left == 0 {
                break;
            }
            if out[i] < caps[i] {
                out[i] += 1;
                left -= 1;
                progressed = true;
            }
        }
        if !progressed {
            break;
        }
    }
    out
}

/// Seeded random split. Part sizes are `round(f * n)`; in stratified mode
/// each class contributes within one record of its proportional share.
pub fn split(corpus: &LabeledCorpus, spec: &SplitSpec) -> Result<Split> {
    spec.validate()?;
    corpus.validate()?;
    let n = corpus.len();
    let n_train = (spec.train * n as f64).round() as usize;
    let n_valid = if spec.test == 0.0 {
        n - n_train.min(n)
    } else {
        ((spec.valid * n as f64).round() as usize).min(n - n_train.min(n))
    };

    let mut rng = rng::stream(spec.seed, Domain::Split, 0);
    let (mut tr, mut va, mut te) = (Vec::new(), Vec::new(), Vec::new());
    if spec.stratified {
        let mut members: Vec<Vec<usize>> = vec![Vec::new(); corpus.classes()];
        for (i, &l) in corpus.labels.iter().enumerate() {
            members[l].push(i);
        }
        for m in &mut members {
            m.shuffle(&mut rng);
        }
        let sizes: Vec<usize> = members.iter().map(Vec::len).collect();
        let q_train: Vec<f64> = sizes.iter().map(|&s| spec.train * s as f64).collect();
        let per_train = apportion(&q_train, &sizes, n_train);
        let room: Vec<usize> = sizes.iter().zip(&per_train).map(|(s, t)| s - t).collect();
        let q_valid: Vec<f64> = sizes.iter().map(|&s| spec.valid * s as f64).collect();
        let per_valid = apportion(&q_valid, &room, n_valid);
        for (c, m) in members.iter().enumerate() {
            let (a, b) = (per_train[c], per_train[c] + per_valid[c]);
            tr.extend_from_slice(&m[..a]);
            va.extend_from_slice(&m[a..b]);
            te.extend_from_slice(&m[b..]);
        }
        tr.shuffle(&mut rng);
        va.shuffle(&mut rng);
        te.shuffle(&mut rng);
    } else {
        let mut all: Vec<usize> = (0..n).collect();
        all.shuffle(&mut rng);
        tr = all[..n_train].to_vec();
        va = all[n_train..n_train + n_valid].to_vec();
        te = all[n_train + n_valid..].to_vec();
    }

    let out = Split {
        train: corpus.subset(&tr, "train"),
        valid: corpus.subset(&va, "validation"),
        test: (spec.test > 0.0).then(|| corpus.subset(&te, "test")),
    };
    out.validate()?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn corpus(n: usize, classes: usize) -> LabeledCorpus {
        LabeledCorpus {
            texts: (0..n).map(|i| format!("s{i}")).collect(),
            labels: (0..n).map(|i| i % classes).collect(),
            class_names: (0..classes).map(|c| format!("c{c}")).collect(),
            provenance: "test".into(),
        }
    }

    #[test]
    fn sizes_and_determinism() {
        let c = corpus(100, 2);
        let spec = SplitSpec { seed: 4, ..Default::default() };
        let s = split(&c, &spec).unwrap();
        assert_eq!((s.train.len(), s.valid.len()), (80, 20));
        assert!(s.test.is_none());
        assert_eq!(s, split(&c, &spec).unwrap());
        assert_ne!(s, split(&c, &SplitSpec { seed: 5, ..spec }).unwrap());

        let s = split(&c, &SplitSpec { train: 0.8, valid: 0.1, test: 0.1, ..spec }).unwrap();
        assert_eq!((s.train.len(), s.valid.len(), s.test.unwrap().len()), (80, 10, 10));
    }

    #[test]
    fn disjoint_and_covering() {
        for stratified in [true, false] {
            let c = corpus(57, 3);
            let spec = SplitSpec { train: 0.7, valid: 0.2, test: 0.1, seed: 1, stratified };
            let s = split(&c, &spec).unwrap();
            let mut all: Vec<String> = s.train.texts.clone();
            all.extend(s.valid.texts.clone());
            all.extend(s.test.unwrap().texts);
            all.sort();
            let mut expect = c.texts.clone();
            expect.sort();
            assert_eq!(all, expect);
        }
    }

    #[test]
    fn stratified_proportions() {
        // Ten classes of uneven size.
        let mut c = corpus(0, 10);
        for class in 0..10 {
            for k in 0..(7 + 3 * class) {
                c.texts.push(format!("{class}-{k}"));
                c.labels.push(class);
            }
        }
        let spec = SplitSpec { train: 0.8, valid: 0.2, test: 0.0, seed: 9, stratified: true };
        let s = split(&c, &spec).unwrap();
        let total = c.class_counts();
        let got = s.train.class_counts();
        for k in 0..10 {
            let want = 0.8 * total[k] as f64;
            assert!((got[k] as f64 - want).abs() <= 1.0, "class {k}: {} vs {want}", got[k]);
        }
        assert_eq!(s.train.len(), (0.8 * c.len() as f64).round() as usize);
    }

    #[test]
    fn errors() {
        let c = corpus(10, 2);
        assert!(split(&c, &SplitSpec { train: 0.5, valid: 0.2, ..Default::default() }).is_err());
        assert!(split(&c, &SplitSpec { train: 0.0, valid: 1.0, ..Default::default() }).is_err());
        // Class 2 has a single record and nothing lands in train.
        let mut c = corpus(3, 3);
        c.labels = vec![0, 1, 2];
        let e = split(&c, &SplitSpec { train: 0.34, valid: 0.66, ..Default::default() });
        assert!(e.is_err());
    }

    #[test]
    fn apportion_respects_caps() {
        assert_eq!(apportion(&[0.5, 0.5], &[1, 1], 1), vec![1, 0]);
        assert_eq!(apportion(&[0.5, 0.5], &[0, 1], 1), vec![0, 1]);
        assert_eq!(apportion(&[2.6, 1.4], &[3, 2], 4), vec![3, 1]);
    }
}
