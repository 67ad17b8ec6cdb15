//! Character-level tokenization.
//!
//! Every distinct character of the training corpus gets a dense id; one extra
//! id (equal to the vocabulary size) is reserved for characters first seen at
//! inference time.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::{HdcError, Result};

/// How ids are assigned while scanning the corpus.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VocabOrder {
    /// Order of first appearance.
    #[default]
    FirstAppearance,
    /// Descending occurrence count, ties by first appearance.
    Frequency,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vocabulary {
    token_to_id: HashMap<char, u32>,
    id_to_token: Vec<char>,
}

impl Vocabulary {
    pub fn build<S: AsRef<str>>(corpus: &[S]) -> Result<Self> {
        Self::build_with(corpus, VocabOrder::FirstAppearance)
    }

    pub fn build_with<S: AsRef<str>>(corpus: &[S], order: VocabOrder) -> Result<Self> {
        let mut first: Vec<char> = Vec::new();
        let mut counts: HashMap<char, (usize, usize)> = HashMap::new();
        for text in corpus {
            for ch in text.as_ref().chars() {
                let n = first.len();
                let entry = counts.entry(ch).or_insert_with(|| {
                    first.push(ch);
                    (n, 0)
                });
                entry.1 += 1;
            }
        }
        if first.is_empty() {
            return Err(HdcError::EmptyCorpus);
        }
        if order == VocabOrder::Frequency {
            first.sort_by_key(|c| {
                let (pos, count) = counts[c];
                (std::cmp::Reverse(count), pos)
            });
        }
        Ok(Self::from_ordered(first))
    }

    fn from_ordered(id_to_token: Vec<char>) -> Self {
        let token_to_id = id_to_token
            .iter()
            .enumerate()
            .map(|(i, &c)| (c, i as u32))
            .collect();
        Self {
            token_to_id,
            id_to_token,
        }
    }

    /// Number of known characters, `m`.
    pub fn len(&self) -> usize {
        self.id_to_token.len()
    }

    pub fn is_empty(&self) -> bool {
        self.id_to_token.is_empty()
    }

    /// The id reserved for unseen characters (equals `len()`).
    pub fn unknown_id(&self) -> u32 {
        self.id_to_token.len() as u32
    }

    /// Ids in use including the unknown id; the item memory needs this many
    /// entries.
    pub fn item_count(&self) -> usize {
        self.id_to_token.len() + 1
    }

    pub fn id(&self, ch: char) -> Option<u32> {
        self.token_to_id.get(&ch).copied()
    }

    pub fn token(&self, id: u32) -> Option<char> {
        self.id_to_token.get(id as usize).copied()
    }

    pub fn tokenize(&self, text: &str) -> Result<Vec<u32>> {
        if text.is_empty() {
            return Err(HdcError::EmptyText);
        }
        let unk = self.unknown_id();
        Ok(text.chars().map(|c| self.id(c).unwrap_or(unk)).collect())
    }

    /// Sidecar text form: one `<codepoint-hex> <id>` line per token.
    pub fn to_sidecar(&self) -> String {
        let mut out = String::new();
        for (id, ch) in self.id_to_token.iter().enumerate() {
            writeln!(out, "{:x} {}", *ch as u32, id).unwrap();
        }
        out
    }

    pub fn from_sidecar(text: &str) -> Result<Self> {
        let mut slots: Vec<Option<char>> = Vec::new();
        for (n, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let bad = |why: &str| HdcError::Format(format!("vocabulary line {}: {why}", n + 1));
            let (hex, id) = line.split_once(' ').ok_or_else(|| bad("expected two fields"))?;
            let cp = u32::from_str_radix(hex, 16).map_err(|_| bad("bad codepoint"))?;
            let ch = char::from_u32(cp).ok_or_else(|| bad("invalid codepoint"))?;
            let id: usize = id.trim().parse().map_err(|_| bad("bad id"))?;
            if id >= slots.len() {
                slots.resize(id + 1, None);
            }
            if slots[id].replace(ch).is_some() {
                return Err(bad("duplicate id"));
            }
        }
        let tokens: Vec<char> = slots
            .into_iter()
            .collect::<Option<_>>()
            .ok_or_else(|| HdcError::Format("vocabulary ids are not dense".into()))?;
        if tokens.is_empty() {
            return Err(HdcError::EmptyCorpus);
        }
        let vocab = Self::from_ordered(tokens);
        if vocab.token_to_id.len() != vocab.id_to_token.len() {
            return Err(HdcError::Format("vocabulary repeats a character".into()));
        }
        Ok(vocab)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_sidecar())?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_sidecar(&std::fs::read_to_string(path)?)
    }
}
