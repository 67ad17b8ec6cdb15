use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;

use crate::rng::{self, Domain};
use crate::{HdcError, Result};

/// Texts with dense class labels.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct LabeledCorpus {
    pub texts: Vec<String>,
    pub labels: Vec<usize>,
    pub class_names: Vec<String>,
    pub provenance: String,
}

impl LabeledCorpus {
    pub fn len(&self) -> usize {
        self.texts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.texts.is_empty()
    }

    pub fn classes(&self) -> usize {
        self.class_names.len()
    }

    pub fn class_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.classes()];
        for &l in &self.labels {
            counts[l] += 1;
        }
        counts
    }

    /// Check the corpus invariants: no empty text, labels in range.
    pub fn validate(&self) -> Result<()> {
        if self.texts.len() != self.labels.len() {
            return Err(HdcError::Split("texts and labels differ in length".into()));
        }
        if let Some(i) = self.texts.iter().position(|t| t.is_empty()) {
            return Err(HdcError::Split(format!("record {i} has empty text")));
        }
        if let Some(&label) = self.labels.iter().find(|&&l| l >= self.classes()) {
            return Err(HdcError::LabelOutOfRange { label, classes: self.classes() });
        }
        Ok(())
    }

    pub(crate) fn subset(&self, idx: &[usize], note: &str) -> Self {
        Self {
            texts: idx.iter().map(|&i| self.texts[i].clone()).collect(),
            labels: idx.iter().map(|&i| self.labels[i]).collect(),
            class_names: self.class_names.clone(),
            provenance: format!("{} [{note}]", self.provenance),
        }
    }

    /// Keep `round(fraction * n_c)` (at least one) records of every class,
    /// chosen by a seeded shuffle; original order is preserved.
    pub fn subsample(&self, fraction: f64, seed: u64) -> Result<Self> {
        if !(fraction > 0.0 && fraction <= 1.0) {
            return Err(HdcError::Split(format!("subsample fraction {fraction} is outside (0, 1]")));
        }
        if fraction == 1.0 {
            return Ok(self.clone());
        }
        let mut rng = rng::stream(seed, Domain::Subsample, 0);
        let mut keep = Vec::new();
        for c in 0..self.classes() {
            let mut members: Vec<usize> = (0..self.len()).filter(|&i| self.labels[i] == c).collect();
            let k = ((fraction * members.len() as f64).round() as usize).clamp(1, members.len().max(1));
            members.shuffle(&mut rng);
            keep.extend(members.into_iter().take(k));
        }
        keep.sort_unstable();
        Ok(self.subset(&keep, &format!("subsample {fraction}")))
    }

    /// Relabel onto another class list (by name), e.g. to evaluate a
    /// separately collected test corpus against a trained model.
    pub fn align_to(&self, class_names: &[String]) -> Result<Self> {
        let map = self
            .class_names
            .iter()
            .map(|n| {
                class_names
                    .iter()
                    .position(|m| m == n)
                    .ok_or_else(|| HdcError::Split(format!("unknown class {n:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            texts: self.texts.clone(),
            labels: self.labels.iter().map(|&l| map[l]).collect(),
            class_names: class_names.to_vec(),
            provenance: self.provenance.clone(),
        })
    }
}

/// Sorted label order; numeric when every label parses as an integer.
fn sorted_labels(raw: &BTreeSet<String>) -> Vec<String> {
    let mut names: Vec<String> = raw.iter().cloned().collect();
    let numeric: Option<Vec<i64>> = names.iter().map(|n| n.trim().parse().ok()).collect();
    if let Some(nums) = numeric {
        let mut pairs: Vec<(i64, String)> = nums.into_iter().zip(names).collect();
        pairs.sort();
        names = pairs.into_iter().map(|(_, n)| n).collect();
    }
    names
}

fn read_csv_rows(path: &Path, text_column: &str, label_column: &str) -> Result<Vec<(String, String)>> {
    let data_err = |message: String| HdcError::Data { path: path.to_path_buf(), message };
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_path(path)
        .map_err(|e| data_err(e.to_string()))?;
    let headers = reader.headers().map_err(|e| data_err(e.to_string()))?.clone();
    if headers.is_empty() {
        return Err(data_err("empty file".into()));
    }
    let column = |name: &str| {
        headers
            .iter()
            .position(|h| h.trim() == name)
            .ok_or_else(|| data_err(format!("missing column {name:?}")))
    };
    let (ti, li) = (column(text_column)?, column(label_column)?);

    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| {
            let line = e.position().map(|p| p.line()).unwrap_or(0);
            HdcError::DataLine { path: path.to_path_buf(), line, message: e.to_string() }
        })?;
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        let line_err = |message: &str| HdcError::DataLine {
            path: path.to_path_buf(),
            line,
            message: message.into(),
        };
        let text = record.get(ti).ok_or_else(|| line_err("missing text field"))?;
        let label = record.get(li).ok_or_else(|| line_err("missing label field"))?;
        if text.trim().is_empty() {
            return Err(line_err("empty text"));
        }
        if label.trim().is_empty() {
            return Err(line_err("empty label"));
        }
        rows.push((text.to_string(), label.trim().to_string()));
    }
    if rows.is_empty() {
        return Err(data_err("empty file".into()));
    }
    Ok(rows)
}

fn build_corpus(rows: Vec<(String, String)>, class_names: &[String], provenance: String) -> LabeledCorpus {
    let (texts, labels) = rows
        .into_iter()
        .map(|(t, l)| (t, class_names.iter().position(|n| *n == l).unwrap()))
        .unzip();
    LabeledCorpus { texts, labels, class_names: class_names.to_vec(), provenance }
}

/// One record per CSV row (header required); labels map to dense ids in
/// sorted label order.
pub fn load_csv(path: &Path, text_column: &str, label_column: &str) -> Result<LabeledCorpus> {
    let rows = read_csv_rows(path, text_column, label_column)?;
    let names = sorted_labels(&rows.iter().map(|(_, l)| l.clone()).collect());
    Ok(build_corpus(rows, &names, format!("csv {}", path.display())))
}

/// Externally produced train/validation(/test) files, labeled over the union
/// of their labels so ids agree across parts.
pub fn load_presplit_csv(
    train: &Path,
    valid: &Path,
    test: Option<&Path>,
    text_column: &str,
    label_column: &str,
) -> Result<(LabeledCorpus, LabeledCorpus, Option<LabeledCorpus>)> {
    let parts: Vec<(PathBuf, Vec<(String, String)>)> = std::iter::once(train)
        .chain(std::iter::once(valid))
        .chain(test)
        .map(|p| Ok((p.to_path_buf(), read_csv_rows(p, text_column, label_column)?)))
        .collect::<Result<_>>()?;
    let all: BTreeSet<String> = parts.iter().flat_map(|(_, r)| r.iter().map(|(_, l)| l.clone())).collect();
    let names = sorted_labels(&all);
    let mut corpora = parts
        .into_iter()
        .map(|(p, rows)| build_corpus(rows, &names, format!("presplit csv {}", p.display())));
    let tr = corpora.next().unwrap();
    let va = corpora.next().unwrap();
    Ok((tr, va, corpora.next()))
}

/// `root/<label>/<file>`: one class per subdirectory, one sample per
/// nonempty line.
pub fn load_language_dirs(root: &Path) -> Result<LabeledCorpus> {
    let data_err = |path: &Path, message: String| HdcError::Data { path: path.to_path_buf(), message };
    let mut dirs: Vec<PathBuf> = fs::read_dir(root)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_dir())
        .collect();
    dirs.sort();
    if dirs.len() < 2 {
        return Err(HdcError::TooFewClasses(dirs.len()));
    }

    let mut corpus = LabeledCorpus {
        provenance: format!("language dirs {}", root.display()),
        ..Default::default()
    };
    for (label, dir) in dirs.iter().enumerate() {
        let name = dir.file_name().unwrap().to_string_lossy().into_owned();
        let mut files: Vec<PathBuf> = fs::read_dir(dir)?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.is_file())
            .collect();
        files.sort();
        let before = corpus.len();
        for file in files {
            let content = fs::read_to_string(&file)
                .map_err(|e| data_err(&file, format!("not readable as UTF-8 text: {e}")))?;
            for line in content.lines() {
                let line = line.trim_end_matches('\r');
                if line.trim().is_empty() {
                    continue;
                }
                corpus.texts.push(line.to_string());
                corpus.labels.push(label);
            }
        }
        if corpus.len() == before {
            return Err(data_err(dir, "empty directory".into()));
        }
        corpus.class_names.push(name);
    }
    Ok(corpus)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn write(dir: &Path, name: &str, body: &str) -> PathBuf {
        let p = dir.join(name);
        let mut f = fs::File::create(&p).unwrap();
        f.write_all(body.as_bytes()).unwrap();
        p
    }

    #[test]
    fn csv_basic() {
        let dir = tempfile::tempdir().unwrap();
        let p = write(dir.path(), "a.csv", "smiles,label\nCCO,0\nc1ccccc1,1\nCC(=O)O,0\n");
        let c = load_csv(&p, "smiles", "label").unwrap();
        assert_eq!(c.len(), 3);
        assert_eq!(c.classes(), 2);
        assert_eq!(c.labels, vec![0, 1, 0]);
    }

    #[test]
    fn csv_sorted_label_names() {
        let dir = tempfile::tempdir().unwrap();
        let p = write(dir.path(), "a.csv", "text,label\nx,toxic\ny,safe\n");
        let c = load_csv(&p, "text", "label").unwrap();
        assert_eq!(c.class_names, vec!["safe", "toxic"]);
        assert_eq!(c.labels, vec![1, 0]);

        let p = write(dir.path(), "n.csv", "text,label\nx,10\ny,2\n");
        let c = load_csv(&p, "text", "label").unwrap();
        assert_eq!(c.class_names, vec!["2", "10"]);
    }

    #[test]
    fn csv_errors() {
        let dir = tempfile::tempdir().unwrap();
        let p = write(dir.path(), "e.csv", "text,label\nab,0\n,1\n");
        let e = load_csv(&p, "text", "label").unwrap_err();
        assert!(matches!(e, HdcError::DataLine { line: 3, .. }), "{e}");

        let p = write(dir.path(), "m.csv", "text,y\nab,0\n");
        let e = load_csv(&p, "text", "label").unwrap_err();
        assert!(e.to_string().contains("missing column"), "{e}");

        let p = write(dir.path(), "z.csv", "");
        assert!(load_csv(&p, "text", "label").is_err());
        let p = write(dir.path(), "h.csv", "text,label\n");
        assert!(load_csv(&p, "text", "label").unwrap_err().to_string().contains("empty"));

        let p = write(dir.path(), "r.csv", "text,label\nab,0\nab,0,extra\n");
        assert!(matches!(load_csv(&p, "text", "label"), Err(HdcError::DataLine { line: 3, .. })));
    }

    #[test]
    fn presplit_shares_labels() {
        let dir = tempfile::tempdir().unwrap();
        let tr = write(dir.path(), "tr.csv", "text,label\na,x\nb,y\n");
        let va = write(dir.path(), "va.csv", "text,label\nc,z\n");
        let (tr, va, te) = load_presplit_csv(&tr, &va, None, "text", "label").unwrap();
        assert_eq!(tr.class_names, vec!["x", "y", "z"]);
        assert_eq!(va.labels, vec![2]);
        assert!(te.is_none());
    }

    #[test]
    fn language_dirs() {
        let dir = tempfile::tempdir().unwrap();
        for (lang, body) in [("en", "hello there\n\nhow are you\n"), ("de", "guten tag\r\nwie geht es\n  \n")] {
            fs::create_dir(dir.path().join(lang)).unwrap();
            write(&dir.path().join(lang), "a.txt", body);
        }
        let c = load_language_dirs(dir.path()).unwrap();
        assert_eq!(c.len(), 4);
        assert_eq!(c.class_names, vec!["de", "en"]);
        assert_eq!(c.texts[0], "guten tag");
        assert_eq!(c.labels, vec![0, 0, 1, 1]);

        fs::create_dir(dir.path().join("fr")).unwrap();
        assert!(load_language_dirs(dir.path()).unwrap_err().to_string().contains("empty directory"));
    }

    #[test]
    fn language_dirs_class_count() {
        let dir = tempfile::tempdir().unwrap();
        fs::create_dir(dir.path().join("en")).unwrap();
        write(&dir.path().join("en"), "a.txt", "x\n");
        assert!(matches!(load_language_dirs(dir.path()), Err(HdcError::TooFewClasses(1))));

        let dir = tempfile::tempdir().unwrap();
        for i in 0..21 {
            let d = dir.path().join(format!("l{i:02}"));
            fs::create_dir(&d).unwrap();
            write(&d, "s.txt", "sample\n");
        }
        assert_eq!(load_language_dirs(dir.path()).unwrap().classes(), 21);
    }

    #[test]
    fn subsample_and_align() {
        let c = LabeledCorpus {
            texts: (0..100).map(|i| format!("t{i}")).collect(),
            labels: (0..100).map(|i| i % 2).collect(),
            class_names: vec!["a".into(), "b".into()],
            provenance: "test".into(),
        };
        let s = c.subsample(0.1, 3).unwrap();
        assert_eq!(s.class_counts(), vec![5, 5]);
        assert_eq!(s, c.subsample(0.1, 3).unwrap());
        let tiny = c.subsample(0.001, 3).unwrap();
        assert_eq!(tiny.class_counts(), vec![1, 1]);

        let a = c.align_to(&["b".into(), "a".into()]).unwrap();
        assert_eq!(&a.labels[..2], &[1, 0]);
        assert!(c.align_to(&["a".into()]).is_err());
    }
}
