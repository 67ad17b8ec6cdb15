use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::encoder::ArchConfig;
use crate::{HdcError, Result};

/// One line of the episode log.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpisodeRecord {
    pub episode: usize,
    #[serde(flatten)]
    pub config: ArchConfig,
    /// Choice index per decision, in sampling order.
    pub choices: Vec<usize>,
    pub seeds: Vec<u64>,
    /// Per-seed validation scores; empty when the evaluation failed.
    pub scores: Vec<f64>,
    pub reward: f64,
    /// Baseline the advantage was computed against.
    pub baseline: f64,
    /// Wall-clock time of the evaluation; zero when timing is masked.
    pub duration_ms: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl EpisodeRecord {
    pub fn failed(&self) -> bool {
        self.error.is_some()
    }
}

/// Appends records as JSON lines, flushing after each one so a crashed run
/// leaves a readable log.
pub struct EpisodeWriter {
    out: BufWriter<File>,
}

impl EpisodeWriter {
    pub fn create(path: &Path) -> Result<Self> {
        Ok(Self { out: BufWriter::new(File::create(path)?) })
    }

    pub fn append(path: &Path) -> Result<Self> {
        let file = std::fs::OpenOptions::new().create(true).append(true).open(path)?;
        Ok(Self { out: BufWriter::new(file) })
    }

    pub fn write(&mut self, record: &EpisodeRecord) -> Result<()> {
        serde_json::to_writer(&mut self.out, record)?;
        self.out.write_all(b"\n")?;
        self.out.flush()?;
        Ok(())
    }
}

pub fn read_log(path: &Path) -> Result<Vec<EpisodeRecord>> {
    let reader = BufReader::new(File::open(path)?);
    let mut out = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let rec = serde_json::from_str(&line).map_err(|e| HdcError::DataLine {
            path: path.to_path_buf(),
            line: i as u64 + 1,
            message: e.to_string(),
        })?;
        out.push(rec);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("log.jsonl");
        let rec = EpisodeRecord {
            episode: 0,
            config: ArchConfig::default(),
            choices: vec![9, 4, 2, 1, 2, 3, 1, 0],
            seeds: vec![1, 2],
            scores: vec![0.5, 0.75],
            reward: 0.625,
            baseline: 0.0,
            duration_ms: 0,
            error: None,
        };
        let mut w = EpisodeWriter::create(&path).unwrap();
        w.write(&rec).unwrap();
        let mut failed = rec.clone();
        failed.episode = 1;
        failed.scores.clear();
        failed.reward = 0.0;
        failed.error = Some("boom".into());
        w.write(&failed).unwrap();
        drop(w);

        let text = std::fs::read_to_string(&path).unwrap();
        assert!(text.lines().next().unwrap().contains("\"dim\":10000"));
        assert_eq!(read_log(&path).unwrap(), vec![rec, failed]);
    }
}
