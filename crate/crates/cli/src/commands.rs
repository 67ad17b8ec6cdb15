use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{bail, Context, Result};
use hdcsearch::data::{
    load_csv, load_language_dirs, load_presplit_csv, split, synthetic_corpus, LabeledCorpus, Split, SyntheticSpec,
};
use hdcsearch::encoder::{encode_all, ArchConfig, ItemMemory};
use hdcsearch::hv::Hypervector;
use hdcsearch::model::{accuracy, roc_auc, AssociativeMemory, ModelFile, ModelHeader};
use hdcsearch::rng::{derive_seed, Domain};
use hdcsearch::search::{
    best_episode, finalize, load_checkpoint, random_search, read_log, save_checkpoint, search_loop, EpisodeRecord,
    EpisodeWriter, PreparedData, SearchOutcome, SearchState, SeedPolicy,
};
use hdcsearch::tokenizer::Vocabulary;
use serde::Deserialize;

use crate::config::{DatasetKind, RunConfig};

const LOG_FILE: &str = "episodes.jsonl";
const CHECKPOINT_FILE: &str = "controller.ckpt";
const BEST_FILE: &str = "best_config.toml";
const SUMMARY_FILE: &str = "summary.txt";

fn required<'a>(p: &'a Option<PathBuf>, key: &str) -> Result<&'a Path> {
    p.as_deref().with_context(|| format!("{key}: required for this dataset kind"))
}

fn load_split(cfg: &RunConfig) -> Result<Split> {
    let sub_seed = derive_seed(cfg.master_seed, Domain::Subsample, 0);
    let sub = |c: LabeledCorpus| c.subsample(cfg.subsample, sub_seed);
    let spec = cfg.split_spec();
    let s = match cfg.dataset {
        DatasetKind::Synthetic => {
            let corpus = synthetic_corpus(&SyntheticSpec {
                classes: cfg.synthetic_classes,
                samples: cfg.synthetic_samples,
                noise: cfg.synthetic_noise,
                seed: derive_seed(cfg.master_seed, Domain::Synthetic, 0),
                ..SyntheticSpec::default()
            })?;
            split(&sub(corpus)?, &spec)?
        }
        DatasetKind::Csv => {
            let corpus = load_csv(required(&cfg.data_path, "data_path")?, &cfg.text_column, &cfg.label_column)?;
            split(&sub(corpus)?, &spec)?
        }
        DatasetKind::PresplitCsv => {
            let (train, valid, test) = load_presplit_csv(
                required(&cfg.data_path, "data_path")?,
                required(&cfg.valid_path, "valid_path")?,
                cfg.test_path.as_deref(),
                &cfg.text_column,
                &cfg.label_column,
            )?;
            Split { train: sub(train)?, valid: sub(valid)?, test: test.map(sub).transpose()? }
        }
        DatasetKind::LanguageDirs => {
            let corpus = load_language_dirs(required(&cfg.data_path, "data_path")?)?;
            let mut s = split(&sub(corpus)?, &spec)?;
            if let Some(dir) = &cfg.test_path {
                if s.test.is_some() {
                    bail!("split_test: must be 0 when test_path supplies the test set");
                }
                let test = load_language_dirs(dir)?.align_to(&s.train.class_names)?;
                s.test = Some(sub(test)?);
            }
            s
        }
    };
    s.validate()?;
    Ok(s)
}

fn prepare(cfg: &RunConfig) -> Result<(Split, PreparedData)> {
    let s = load_split(cfg)?;
    let data = PreparedData::new(&s)?;
    Ok((s, data))
}

fn default_model_seed(cfg: &RunConfig) -> u64 {
    SeedPolicy::Fixed.seeds(cfg.master_seed, 1, 0)[0]
}

#[derive(Deserialize)]
struct ArchExtras {
    model_seed: Option<u64>,
}

fn read_arch(path: Option<&Path>) -> Result<(ArchConfig, Option<u64>)> {
    let Some(path) = path else { return Ok((ArchConfig::default(), None)) };
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let arch: ArchConfig = toml::from_str(&text).map_err(|e| anyhow::anyhow!("{}: {}", path.display(), e.message()))?;
    let extras: ArchExtras = toml::from_str(&text).map_err(|e| anyhow::anyhow!("{}: {}", path.display(), e.message()))?;
    Ok((arch, extras.model_seed))
}

fn write_best(path: &Path, rec: &EpisodeRecord) -> Result<()> {
    let mut text = toml::to_string(&rec.config)?;
    // Seed of the best single run, so `train` can rebuild that exact model.
    let best_seed = rec
        .scores
        .iter()
        .enumerate()
        .fold(None, |b: Option<(usize, f64)>, (i, &s)| match b {
            Some((_, bs)) if bs >= s => b,
            _ => Some((i, s)),
        })
        .map(|(i, _)| rec.seeds[i]);
    if let Some(seed) = best_seed {
        text.push_str(&format!("model_seed = {seed}\n"));
    }
    text.push_str(&format!("episode = {}\nreward = {:?}\n", rec.episode, rec.reward));
    fs::write(path, text)?;
    Ok(())
}

fn progress(rec: &EpisodeRecord, total: usize) {
    match &rec.error {
        None => eprintln!("episode {}/{}: reward {:.4} [{}]", rec.episode + 1, total, rec.reward, rec.config),
        Some(e) => eprintln!("episode {}/{}: failed ({e}) [{}]", rec.episode + 1, total, rec.config),
    }
}

pub fn search(cfg: &RunConfig, random: bool, resume: bool) -> Result<()> {
    let start = Instant::now();
    let space = cfg.space();
    let settings = cfg.search_settings();
    let (_, data) = prepare(cfg)?;
    let out = &cfg.output_dir;
    fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    fs::write(out.join("run_config.toml"), cfg.to_toml()?)?;
    let log_path = out.join(LOG_FILE);
    let ckpt_path = out.join(CHECKPOINT_FILE);

    let mut previous = Vec::new();
    let state = if resume {
        let (controller, rng, next_episode) = load_checkpoint(&ckpt_path)
            .with_context(|| format!("loading {}", ckpt_path.display()))?;
        previous = read_log(&log_path)?;
        previous.truncate(next_episode);
        if previous.len() != next_episode {
            bail!("{} has {} episodes, checkpoint expects {next_episode}", log_path.display(), previous.len());
        }
        // Rewrite so the log ends exactly where the checkpoint does.
        let mut w = EpisodeWriter::create(&log_path)?;
        for r in &previous {
            w.write(r)?;
        }
        Some(SearchState { controller, rng, next_episode })
    } else {
        None
    };
    let mut writer = if resume { EpisodeWriter::append(&log_path)? } else { EpisodeWriter::create(&log_path)? };

    let outcome: SearchOutcome = if random {
        random_search(&space, &data, &settings, |rec| {
            writer.write(rec)?;
            progress(rec, settings.episodes);
            Ok(())
        })?
    } else {
        search_loop(&space, &data, &settings, state, |rec, st| {
            writer.write(rec)?;
            save_checkpoint(&ckpt_path, &st.controller, &st.rng, st.next_episode)?;
            progress(rec, settings.episodes);
            Ok(())
        })?
    };

    previous.extend(outcome.log);
    let best = best_episode(&previous).context("no episodes")?;
    write_best(&out.join(BEST_FILE), best)?;
    let failures = previous.iter().filter(|r| r.failed()).count();
    let summary = format!(
        "strategy: {}\nepisodes: {} ({failures} failed)\nbest episode: {}\nbest reward: {:.6}\nbest scores: {:?}\nbest config: {}\nruntime: {:.1}s\nlog: {}\nbest config file: {}\n",
        if random { "random" } else { "reinforce" },
        previous.len(),
        best.episode,
        best.reward,
        best.scores,
        best.config,
        start.elapsed().as_secs_f64(),
        log_path.display(),
        out.join(BEST_FILE).display(),
    );
    fs::write(out.join(SUMMARY_FILE), &summary)?;
    print!("{summary}");
    Ok(())
}

fn merged_for_final(s: &Split) -> Split {
    let mut train = s.train.clone();
    train.texts.extend(s.valid.texts.iter().cloned());
    train.labels.extend(s.valid.labels.iter().copied());
    Split { train, valid: s.valid.clone(), test: s.test.clone() }
}

/// Accuracy, plus ROC-AUC on two-class tasks.
fn metric_lines(
    am: &AssociativeMemory,
    queries: &[Hypervector],
    labels: &[usize],
    cfg: &RunConfig,
) -> Result<Vec<(String, f64)>> {
    let mut out = vec![("accuracy".to_string(), accuracy(am, queries, labels, cfg.similarity)?)];
    if am.classes() == 2 {
        let positives = labels.iter().filter(|&&y| y == cfg.positive_class).count();
        if positives > 0 && positives < labels.len() {
            out.push(("roc_auc".into(), roc_auc(am, queries, labels, cfg.positive_class, cfg.similarity)?));
        }
    }
    Ok(out)
}

fn sidecar_path(model: &Path) -> PathBuf {
    let stem = model.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    model.with_file_name(format!("{stem}.vocab.txt"))
}

pub fn train(cfg: &RunConfig, arch_path: Option<&Path>, seed: Option<u64>, out: Option<&Path>) -> Result<()> {
    let (arch, file_seed) = read_arch(arch_path)?;
    arch.validate(true)?;
    let seed = seed.or(file_seed).unwrap_or_else(|| default_model_seed(cfg));
    let mut s = load_split(cfg)?;
    if cfg.final_train_full {
        s = merged_for_final(&s);
    }
    let data = PreparedData::new(&s)?;
    let (model, report) = finalize(&arch, &data, seed, cfg.final_epochs, cfg.selection, &cfg.eval_settings())?;

    println!("architecture: {arch}");
    println!("model seed: {seed}");
    println!("selection: {}", report.selection_label);
    println!("best epoch: {} of {} run ({}: {:.6})", report.best_epoch, report.epoch_scores.len() - 1, report.metric, report.best_score);
    let valid = model.encode(&data.valid)?;
    for (name, v) in metric_lines(&model.memory, &valid, &data.valid_labels, cfg)? {
        println!("valid {name}: {v:.6}");
    }
    if let Some((seqs, labels)) = &data.test {
        let test = model.encode(seqs)?;
        for (name, v) in metric_lines(&model.memory, &test, labels, cfg)? {
            println!("test {name}: {v:.6}");
        }
    }

    let model_path = match out {
        Some(p) => p.to_path_buf(),
        None => cfg.output_dir.join("model.hdcm"),
    };
    if let Some(dir) = model_path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    let vocab_path = sidecar_path(&model_path);
    data.vocabulary.save(&vocab_path)?;
    let file = ModelFile {
        header: ModelHeader {
            arch,
            master_seed: seed,
            vocabulary: vocab_path.file_name().unwrap().to_string_lossy().into_owned(),
            vocab_size: data.vocabulary.len(),
            class_names: data.class_names.clone(),
            metric: cfg.similarity,
            regime: model.memory.regime(),
            classes: data.classes(),
            dim: arch.dim,
        },
        memory: model.memory,
    };
    file.save(&model_path)?;
    let report_path = model_path.with_extension("report.json");
    fs::write(&report_path, serde_json::to_string_pretty(&report)?)?;
    println!("model: {}", model_path.display());
    Ok(())
}

pub fn eval(cfg: &RunConfig, model_path: &Path, part: &str) -> Result<()> {
    let file = ModelFile::load(model_path).with_context(|| format!("loading {}", model_path.display()))?;
    let h = &file.header;
    let dir = model_path.parent().unwrap_or(Path::new("."));
    let vocab = Vocabulary::load(&dir.join(&h.vocabulary))?;
    let s = load_split(cfg)?;
    let corpus = match part {
        "train" => &s.train,
        "valid" => &s.valid,
        "test" => s.test.as_ref().context("the configured dataset has no test split")?,
        other => bail!("split: {other:?} is not train, valid or test"),
    };
    let corpus = corpus.align_to(&h.class_names)?;
    let seqs = corpus.texts.iter().map(|t| vocab.tokenize(t)).collect::<hdcsearch::Result<Vec<_>>>()?;
    let im = ItemMemory::generate(h.master_seed, vocab.item_count(), &h.arch)?;
    let queries = encode_all(&h.arch, &im, &seqs)?;
    let cfg = RunConfig { similarity: h.metric, ..cfg.clone() };
    println!("architecture: {}", h.arch);
    for (name, v) in metric_lines(&file.memory, &queries, &corpus.labels, &cfg)? {
        println!("{part} {name}: {v:.6}");
    }
    Ok(())
}

pub fn sweep(
    cfg: &RunConfig,
    dims: &[usize],
    sparsities: &[f64],
    arch_path: Option<&Path>,
    seed: Option<u64>,
    out: Option<&Path>,
) -> Result<()> {
    if dims.is_empty() || sparsities.is_empty() {
        bail!("sweep: empty grid");
    }
    let (base, file_seed) = read_arch(arch_path)?;
    let seed = seed.or(file_seed).unwrap_or_else(|| default_model_seed(cfg));
    let (_, data) = prepare(cfg)?;
    let settings = cfg.eval_settings();
    let mut csv = String::from("dim,sparsity,score\n");
    for &dim in dims {
        for &sparsity in sparsities {
            let arch = ArchConfig { dim, sparsity, ..base };
            arch.validate(true)?;
            let (_, report) = finalize(&arch, &data, seed, cfg.final_epochs, cfg.selection, &settings)?;
            eprintln!("dim {dim} sparsity {sparsity}: {:.6}", report.valid_score);
            csv.push_str(&format!("{dim},{sparsity},{}\n", report.valid_score));
        }
    }
    match out {
        Some(p) => fs::write(p, csv)?,
        None => std::io::stdout().write_all(csv.as_bytes())?,
    }
    Ok(())
}

pub fn inspect_log(path: &Path, top: usize) -> Result<()> {
    let log = read_log(path)?;
    let best = best_episode(&log).context("empty log")?;
    let ok: Vec<&EpisodeRecord> = log.iter().filter(|r| !r.failed()).collect();
    let mean = ok.iter().map(|r| r.reward).sum::<f64>() / ok.len().max(1) as f64;
    println!("episodes: {} ({} failed)", log.len(), log.len() - ok.len());
    println!("mean reward: {mean:.6}");
    println!("best: episode {} reward {:.6} [{}]", best.episode, best.reward, best.config);
    if let Some(last) = log.last() {
        println!("final baseline: {:.6}", last.baseline);
    }
    let total_ms: u64 = log.iter().map(|r| r.duration_ms).sum();
    println!("evaluation time: {:.1}s", total_ms as f64 / 1000.0);
    let mut ranked: Vec<&EpisodeRecord> = log.iter().collect();
    ranked.sort_by(|a, b| b.reward.total_cmp(&a.reward).then(a.episode.cmp(&b.episode)));
    println!("top {}:", top.min(ranked.len()));
    for r in ranked.into_iter().take(top) {
        println!("  {:>5}  {:.6}  {}", r.episode, r.reward, r.config);
    }
    Ok(())
}
