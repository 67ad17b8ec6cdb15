use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::metrics::{argmax, softmax};
use crate::hv::ops_kernels::{dot_f64, matching_fraction, norm_f64};
use crate::hv::{cast, Accumulator, ElementType, Hypervector, Metric, Regime};
use crate::{HdcError, Result};

/// When class views are recomputed during retraining.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Refresh {
    /// After every update, so later examples in the epoch see it.
    #[default]
    Eager,
    /// Once at the end of each epoch.
    PerEpoch,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Prediction {
    pub class_id: usize,
    pub similarities: Vec<f64>,
    pub probabilities: Vec<f64>,
}

/// Per-class accumulators and their quantized views.
#[derive(Debug, Clone)]
pub struct AssociativeMemory {
    accs: Vec<Accumulator>,
    resultant_dtype: ElementType,
    regime: Regime,
    refresh: Refresh,
    views: Vec<Hypervector>,
    // Views widened to reals, with their norms, for cosine queries.
    reals: Vec<Vec<f64>>,
    norms: Vec<f64>,
}

impl AssociativeMemory {
    /// Bundle every example into its class accumulator.
    pub fn train(
        classes: usize,
        resultant_dtype: ElementType,
        regime: Regime,
        examples: &[Hypervector],
        labels: &[usize],
    ) -> Result<Self> {
        if classes < 2 {
            return Err(HdcError::TooFewClasses(classes));
        }
        check_lengths(examples, labels)?;
        let dim = examples.first().ok_or(HdcError::EmptyClass(0))?.dim();
        let mut accs = vec![Accumulator::new(dim)?; classes];
        for (hv, &label) in examples.iter().zip(labels) {
            let acc = accs
                .get_mut(label)
                .ok_or(HdcError::LabelOutOfRange { label, classes })?;
            acc.add(hv)?;
        }
        if let Some(empty) = accs.iter().position(|a| a.count() == 0) {
            return Err(HdcError::EmptyClass(empty));
        }
        Ok(Self::from_accumulators(accs, resultant_dtype, regime))
    }

    pub fn from_accumulators(
        accs: Vec<Accumulator>,
        resultant_dtype: ElementType,
        regime: Regime,
    ) -> Self {
        let mut am = Self {
            views: Vec::with_capacity(accs.len()),
            reals: Vec::with_capacity(accs.len()),
            norms: Vec::with_capacity(accs.len()),
            accs,
            resultant_dtype,
            regime,
            refresh: Refresh::Eager,
        };
        for j in 0..am.accs.len() {
            let (v, r, n) = am.view_of(j);
            am.views.push(v);
            am.reals.push(r);
            am.norms.push(n);
        }
        am
    }

    pub fn with_refresh(mut self, refresh: Refresh) -> Self {
        self.refresh = refresh;
        self
    }

    fn view_of(&self, j: usize) -> (Hypervector, Vec<f64>, f64) {
        let view = cast(&self.accs[j], self.resultant_dtype, self.regime);
        let norm = norm_f64(view.elements());
        let reals = view.to_f64();
        (view, reals, norm)
    }

    fn refresh_view(&mut self, j: usize) {
        let (v, r, n) = self.view_of(j);
        self.views[j] = v;
        self.reals[j] = r;
        self.norms[j] = n;
    }

    pub fn classes(&self) -> usize {
        self.accs.len()
    }

    pub fn dim(&self) -> usize {
        self.accs[0].dim()
    }

    pub fn resultant_dtype(&self) -> ElementType {
        self.resultant_dtype
    }

    pub fn regime(&self) -> Regime {
        self.regime
    }

    pub fn accumulators(&self) -> &[Accumulator] {
        &self.accs
    }

    pub fn views(&self) -> &[Hypervector] {
        &self.views
    }

    pub fn similarities(&self, q: &Hypervector, metric: Metric) -> Result<Vec<f64>> {
        if q.dim() != self.dim() {
            return Err(HdcError::DimensionMismatch { left: self.dim(), right: q.dim() });
        }
        match metric {
            Metric::Cosine => {
                let nq = norm_f64(q.elements());
                Ok(self
                    .reals
                    .iter()
                    .zip(&self.norms)
                    .map(|(r, &nr)| {
                        if nq == 0.0 || nr == 0.0 {
                            0.0
                        } else {
                            (dot_f64(q.elements(), r) / (nq * nr)).clamp(-1.0, 1.0)
                        }
                    })
                    .collect())
            }
            Metric::Hamming => {
                if q.dtype() != self.resultant_dtype {
                    return Err(HdcError::DtypeMismatch {
                        left: q.dtype(),
                        right: self.resultant_dtype,
                    });
                }
                let qv = q.as_i8().filter(|_| q.dtype().is_base());
                let qv = qv.ok_or(HdcError::NotBinaryOrBipolar(q.dtype()))?;
                Ok(self
                    .views
                    .iter()
                    .map(|v| matching_fraction(qv, v.as_i8().unwrap()))
                    .collect())
            }
        }
    }

    pub fn classify(&self, q: &Hypervector, metric: Metric) -> Result<usize> {
        Ok(argmax(&self.similarities(q, metric)?))
    }

    /// Most similar class (ties to the lowest id) with softmax probabilities.
    pub fn predict(&self, q: &Hypervector, metric: Metric) -> Result<Prediction> {
        let similarities = self.similarities(q, metric)?;
        Ok(Prediction {
            class_id: argmax(&similarities),
            probabilities: softmax(&similarities),
            similarities,
        })
    }

    /// One retraining pass. For every misclassified example, subtract it from
    /// the predicted class and add it to the true class. Returns the number of
    /// mistakes made.
    pub fn retrain_epoch(
        &mut self,
        examples: &[Hypervector],
        labels: &[usize],
        metric: Metric,
        order_seed: Option<u64>,
    ) -> Result<usize> {
        check_lengths(examples, labels)?;
        let mut order: Vec<usize> = (0..examples.len()).collect();
        if let Some(seed) = order_seed {
            order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        }
        let classes = self.classes();
        let mut errors = 0;
        let mut dirty = vec![false; classes];
        for k in order {
            let (hv, truth) = (&examples[k], labels[k]);
            if truth >= classes {
                return Err(HdcError::LabelOutOfRange { label: truth, classes });
            }
            let guess = self.classify(hv, metric)?;
            if guess == truth {
                continue;
            }
            errors += 1;
            self.accs[guess].sub(hv)?;
            self.accs[truth].add(hv)?;
            match self.refresh {
                Refresh::Eager => {
                    self.refresh_view(guess);
                    self.refresh_view(truth);
                }
                Refresh::PerEpoch => {
                    dirty[guess] = true;
                    dirty[truth] = true;
                }
            }
        }
        for (j, d) in dirty.into_iter().enumerate() {
            if d {
                self.refresh_view(j);
            }
        }
        Ok(errors)
    }
}

fn check_lengths(examples: &[Hypervector], labels: &[usize]) -> Result<()> {
    if examples.len() != labels.len() {
        return Err(HdcError::DimensionMismatch { left: examples.len(), right: labels.len() });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hv(t: ElementType, v: &[i64]) -> Hypervector {
        Hypervector::from_values(t, v).unwrap()
    }

    fn i32v(v: &[i64]) -> Hypervector {
        hv(ElementType::Int32, v)
    }

    #[test]
    fn one_example_per_class() {
        let a = hv(ElementType::Bipolar, &[1, -1, 1, -1]);
        let b = hv(ElementType::Bipolar, &[1, 1, -1, -1]);
        let am = AssociativeMemory::train(
            2,
            ElementType::Bipolar,
            Regime::Bipolar,
            &[a.clone(), b.clone()],
            &[0, 1],
        )
        .unwrap();
        assert_eq!(am.views()[0], a);
        assert_eq!(am.views()[1], b);

        let p = am.predict(&a, Metric::Cosine).unwrap();
        assert_eq!(p.class_id, 0);
        assert!((p.similarities[0] - 1.0).abs() < 1e-12);
        assert!(p.similarities[1].abs() < 1e-12);
        let e = std::f64::consts::E;
        assert!((p.probabilities[0] - e / (e + 1.0)).abs() < 1e-12);
    }

    #[test]
    fn duplicates_double() {
        let a = i32v(&[1, 2, 3]);
        let b = i32v(&[0, 0, 1]);
        let am = AssociativeMemory::train(
            2,
            ElementType::Int64,
            Regime::Bipolar,
            &[a.clone(), a, b],
            &[0, 0, 1],
        )
        .unwrap();
        assert_eq!(am.accumulators()[0].sums(), &[2, 4, 6]);
    }

    #[test]
    fn d8_three_examples() {
        let xs = [
            i32v(&[1, 0, 2, 0, 1, 1, 0, 3]),
            i32v(&[0, 1, 1, 0, 2, 0, 0, 1]),
            i32v(&[2, 2, 0, 1, 0, 0, 1, 0]),
            i32v(&[5, 0, 0, 0, 0, 0, 0, 0]),
        ];
        let am = AssociativeMemory::train(2, ElementType::Int32, Regime::Binary, &xs, &[0, 0, 0, 1])
            .unwrap();
        assert_eq!(am.accumulators()[0].sums(), &[3, 3, 3, 1, 3, 1, 1, 4]);
        assert_eq!(am.accumulators()[0].count(), 3);
    }

    #[test]
    fn ties_pick_lowest_class() {
        let z = i32v(&[1, 1]);
        let am = AssociativeMemory::train(
            3,
            ElementType::Int32,
            Regime::Bipolar,
            &[z.clone(), z.clone(), z.clone()],
            &[0, 1, 2],
        )
        .unwrap();
        let p = am.predict(&z, Metric::Cosine).unwrap();
        assert_eq!(p.class_id, 0);
        for pr in p.probabilities {
            assert!((pr - 1.0 / 3.0).abs() < 1e-12);
        }
    }

    #[test]
    fn train_errors() {
        let a = i32v(&[1, 2]);
        assert!(matches!(
            AssociativeMemory::train(2, ElementType::Int32, Regime::Bipolar, &[a.clone()], &[0]),
            Err(HdcError::EmptyClass(1))
        ));
        assert!(matches!(
            AssociativeMemory::train(2, ElementType::Int32, Regime::Bipolar, &[a.clone()], &[2]),
            Err(HdcError::LabelOutOfRange { .. })
        ));
        assert!(matches!(
            AssociativeMemory::train(1, ElementType::Int32, Regime::Bipolar, &[a], &[0]),
            Err(HdcError::TooFewClasses(1))
        ));
    }

    #[test]
    fn hamming_requires_matching_base_dtype() {
        let a = hv(ElementType::Binary, &[1, 0, 1, 0]);
        let b = hv(ElementType::Binary, &[0, 1, 0, 1]);
        let am = AssociativeMemory::train(2, ElementType::Binary, Regime::Binary, &[a.clone(), b], &[0, 1])
            .unwrap();
        assert_eq!(am.similarities(&a, Metric::Hamming).unwrap(), vec![1.0, 0.0]);
        assert!(am.similarities(&i32v(&[1, 0, 1, 0]), Metric::Hamming).is_err());
        assert!(am.similarities(&i32v(&[1, 0]), Metric::Cosine).is_err());
    }

    #[test]
    fn retrain_noop_when_all_correct() {
        let a = i32v(&[3, 0, 0]);
        let b = i32v(&[0, 0, 3]);
        let mut am = AssociativeMemory::train(
            2,
            ElementType::Int32,
            Regime::Bipolar,
            &[a.clone(), b.clone()],
            &[0, 1],
        )
        .unwrap();
        let before = am.accumulators().to_vec();
        let errs = am.retrain_epoch(&[a, b], &[0, 1], Metric::Cosine, None).unwrap();
        assert_eq!(errs, 0);
        assert_eq!(am.accumulators(), &before[..]);
    }

    #[test]
    fn retrain_moves_one_example() {
        // x looks like class 0 but is labeled 1.
        let a = i32v(&[4, 0, 0]);
        let b = i32v(&[0, 0, 4]);
        let x = i32v(&[2, 1, 0]);
        let mut am = AssociativeMemory::train(
            2,
            ElementType::Int32,
            Regime::Bipolar,
            &[a.clone(), b.clone()],
            &[0, 1],
        )
        .unwrap();
        let errs = am.retrain_epoch(&[x], &[1], Metric::Cosine, None).unwrap();
        assert_eq!(errs, 1);
        assert_eq!(am.accumulators()[0].sums(), &[2, -1, 0]);
        assert_eq!(am.accumulators()[1].sums(), &[2, 1, 4]);
        assert_eq!(am.views()[0].to_vec(), vec![2, -1, 0]);
    }

    #[test]
    fn per_epoch_refresh_defers_views() {
        let a = i32v(&[4, 0, 0]);
        let b = i32v(&[0, 0, 4]);
        let x = i32v(&[2, 0, 1]);
        let mk = |r| {
            AssociativeMemory::train(2, ElementType::Int32, Regime::Bipolar, &[a.clone(), b.clone()], &[0, 1])
                .unwrap()
                .with_refresh(r)
        };
        // The same mislabeled example twice: eager refresh sees the first
        // update, per-epoch refresh repeats the mistake.
        let (mut eager, mut lazy) = (mk(Refresh::Eager), mk(Refresh::PerEpoch));
        let xs = [x.clone(), x];
        let e1 = eager.retrain_epoch(&xs, &[1, 1], Metric::Cosine, None).unwrap();
        let e2 = lazy.retrain_epoch(&xs, &[1, 1], Metric::Cosine, None).unwrap();
        assert_eq!(e1, 1);
        assert_eq!(e2, 2);
        for j in 0..2 {
            assert_eq!(lazy.views()[j], cast(&lazy.accumulators()[j], ElementType::Int32, Regime::Bipolar));
        }
    }
}
