use rand::Rng;

use super::LabeledCorpus;
use crate::rng::{self, Domain};
use crate::{HdcError, Result};

/// Parameters for a corpus whose classes use disjoint alphabets.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SyntheticSpec {
    pub classes: usize,
    pub samples: usize,
    pub alphabet: usize,
    pub min_len: usize,
    pub max_len: usize,
    /// Probability that a character is replaced by one drawn from the union
    /// of all class alphabets.
    pub noise: f64,
    pub seed: u64,
}

impl Default for SyntheticSpec {
    fn default() -> Self {
        Self { classes: 2, samples: 200, alphabet: 6, min_len: 8, max_len: 24, noise: 0.0, seed: 0 }
    }
}

/// Printable, non-whitespace characters that need no CSV quoting.
fn symbol(i: usize) -> char {
    const ASCII: &str =
        "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789!#$%&()*+-./:;<=>?@[]^_{|}~";
    ASCII
        .chars()
        .nth(i)
        .unwrap_or_else(|| char::from_u32(0x100 + (i - ASCII.len()) as u32).unwrap())
}

/// Balanced corpus: sample `i` belongs to class `i % classes`.
pub fn synthetic_corpus(spec: &SyntheticSpec) -> Result<LabeledCorpus> {
    if spec.classes < 2 {
        return Err(HdcError::TooFewClasses(spec.classes));
    }
    if spec.alphabet == 0 || spec.min_len == 0 || spec.min_len > spec.max_len || spec.samples < spec.classes {
        return Err(HdcError::Split(format!("bad synthetic corpus parameters {spec:?}")));
    }
    if !(0.0..=1.0).contains(&spec.noise) {
        return Err(HdcError::Split(format!("noise {} is outside [0, 1]", spec.noise)));
    }
    let mut rng = rng::stream(spec.seed, Domain::Synthetic, 0);
    let pool = spec.classes * spec.alphabet;
    let mut corpus = LabeledCorpus {
        class_names: (0..spec.classes).map(|c| format!("class{c}")).collect(),
        provenance: format!(
            "synthetic classes={} samples={} noise={} seed={}",
            spec.classes, spec.samples, spec.noise, spec.seed
        ),
        ..Default::default()
    };
    for i in 0..spec.samples {
        let class = i % spec.classes;
        let len = rng.gen_range(spec.min_len..=spec.max_len);
        let text: String = (0..len)
            .map(|_| {
                if rng.gen_bool(spec.noise) {
                    symbol(rng.gen_range(0..pool))
                } else {
                    symbol(class * spec.alphabet + rng.gen_range(0..spec.alphabet))
                }
            })
            .collect();
        corpus.texts.push(text);
        corpus.labels.push(class);
    }
    Ok(corpus)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    #[test]
    fn disjoint_alphabets_without_noise() {
        let c = synthetic_corpus(&SyntheticSpec { classes: 3, samples: 30, seed: 1, ..Default::default() }).unwrap();
        assert_eq!(c.len(), 30);
        assert_eq!(c.class_counts(), vec![10, 10, 10]);
        let sets: Vec<HashSet<char>> = (0..3)
            .map(|k| {
                c.texts
                    .iter()
                    .zip(&c.labels)
                    .filter(|(_, &l)| l == k)
                    .flat_map(|(t, _)| t.chars())
                    .collect()
            })
            .collect();
        assert!(sets[0].is_disjoint(&sets[1]));
        assert!(sets[1].is_disjoint(&sets[2]));
        assert!(c.texts.iter().all(|t| (8..=24).contains(&t.chars().count())));
    }

    #[test]
    fn seeded() {
        let spec = SyntheticSpec { noise: 0.3, seed: 5, ..Default::default() };
        assert_eq!(synthetic_corpus(&spec).unwrap(), synthetic_corpus(&spec).unwrap());
        assert!(synthetic_corpus(&SyntheticSpec { classes: 1, ..spec }).is_err());
        assert!(synthetic_corpus(&SyntheticSpec { noise: 1.5, ..spec }).is_err());
    }

    #[test]
    fn many_symbols_are_distinct() {
        let s: HashSet<char> = (0..500).map(symbol).collect();
        assert_eq!(s.len(), 500);
        assert!(s.iter().all(|c| !c.is_whitespace() && *c != ',' && *c != '"'));
    }
}
