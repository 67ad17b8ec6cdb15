//! Run configuration: a flat TOML file with a `version` key, overridden by
//! `HDCSEARCH_<KEY>` environment variables, overridden in turn by flags.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use hdcsearch::data::{SplitSpec, SyntheticSpec};
use hdcsearch::hv::{ElementType, EwiseOp, Metric};
use hdcsearch::model::Refresh;
use hdcsearch::search::{
    ControllerConfig, EvalSettings, PolicyKind, ScoreMetric, SearchSettings, SearchSpace, SeedPolicy, Selection,
};
use serde::{Deserialize, Serialize};
use toml::{Table, Value};

pub const CONFIG_VERSION: i64 = 1;
pub const ENV_PREFIX: &str = "HDCSEARCH_";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DatasetKind {
    /// One CSV, split by `split_*`.
    Csv,
    /// `data_path`, `valid_path` and optional `test_path` CSVs.
    PresplitCsv,
    /// `data_path/<label>/*` text files, one sample per line; optional
    /// `test_path` directory with the same layout as a separate test set.
    LanguageDirs,
    /// Generated disjoint-alphabet corpus.
    Synthetic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MetricKind {
    Accuracy,
    RocAuc,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub version: i64,

    pub dataset: DatasetKind,
    pub data_path: Option<PathBuf>,
    pub valid_path: Option<PathBuf>,
    pub test_path: Option<PathBuf>,
    pub text_column: String,
    pub label_column: String,
    /// Stratified fraction of the loaded corpus to keep.
    pub subsample: f64,
    pub synthetic_classes: usize,
    pub synthetic_samples: usize,
    pub synthetic_noise: f64,

    pub split_train: f64,
    pub split_valid: f64,
    pub split_test: f64,
    pub stratified: bool,

    pub space_dims: Option<Vec<usize>>,
    pub space_sparsities: Option<Vec<f64>>,
    pub space_gram_sizes: Option<Vec<usize>>,
    pub space_base_dtypes: Option<Vec<ElementType>>,
    pub space_encoded_dtypes: Option<Vec<ElementType>>,
    pub space_resultant_dtypes: Option<Vec<ElementType>>,
    pub space_shifts: Option<Vec<usize>>,
    pub space_ops: Option<Vec<EwiseOp>>,

    pub policy: PolicyKind,
    pub controller_hidden: usize,
    pub controller_embed: usize,
    pub lr: f64,
    pub baseline_decay: f64,
    pub entropy_coef: f64,

    pub episodes: usize,
    pub n_seeds: usize,
    pub seed_policy: SeedPolicy,
    pub retrain_epochs: usize,
    pub final_epochs: usize,
    pub selection: Selection,
    /// Train the final model on train and validation together.
    pub final_train_full: bool,

    pub metric: MetricKind,
    pub positive_class: usize,
    pub similarity: Metric,
    pub refresh: Refresh,
    pub shuffle: bool,

    pub master_seed: u64,
    pub output_dir: PathBuf,
    /// Worker threads; 0 uses every core.
    pub jobs: usize,
    pub mask_timing: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        let ctrl = ControllerConfig::default();
        let eval = EvalSettings::default();
        let split = SplitSpec::default();
        let synth = SyntheticSpec::default();
        Self {
            version: CONFIG_VERSION,
            dataset: DatasetKind::Synthetic,
            data_path: None,
            valid_path: None,
            test_path: None,
            text_column: "text".into(),
            label_column: "label".into(),
            subsample: 1.0,
            synthetic_classes: synth.classes,
            synthetic_samples: synth.samples,
            synthetic_noise: synth.noise,
            split_train: split.train,
            split_valid: split.valid,
            split_test: split.test,
            stratified: split.stratified,
            space_dims: None,
            space_sparsities: None,
            space_gram_sizes: None,
            space_base_dtypes: None,
            space_encoded_dtypes: None,
            space_resultant_dtypes: None,
            space_shifts: None,
            space_ops: None,
            policy: ctrl.policy,
            controller_hidden: ctrl.hidden,
            controller_embed: ctrl.embed,
            lr: ctrl.lr,
            baseline_decay: ctrl.baseline_decay,
            entropy_coef: ctrl.entropy_coef,
            episodes: 500,
            n_seeds: 5,
            seed_policy: SeedPolicy::Fixed,
            retrain_epochs: eval.retrain_epochs,
            final_epochs: 1000,
            selection: Selection::Validation,
            final_train_full: false,
            metric: MetricKind::Accuracy,
            positive_class: 1,
            similarity: eval.similarity,
            refresh: eval.refresh,
            shuffle: eval.shuffle,
            master_seed: 0,
            output_dir: PathBuf::from("runs/default"),
            jobs: 0,
            mask_timing: false,
        }
    }
}

/// Parse a scalar override: TOML syntax when it parses, a bare string otherwise.
fn parse_value(raw: &str) -> Value {
    match format!("v = {raw}").parse::<Table>() {
        Ok(mut t) => t.remove("v").unwrap(),
        Err(_) => Value::String(raw.to_string()),
    }
}

fn known_keys() -> Vec<String> {
    let mut keys: Vec<String> = toml::Value::try_from(RunConfig::default())
        .ok()
        .and_then(|v| v.as_table().map(|t| t.keys().cloned().collect()))
        .unwrap_or_default();
    // Optional keys are absent from the serialized defaults.
    for k in [
        "data_path",
        "valid_path",
        "test_path",
        "space_dims",
        "space_sparsities",
        "space_gram_sizes",
        "space_base_dtypes",
        "space_encoded_dtypes",
        "space_resultant_dtypes",
        "space_shifts",
        "space_ops",
    ] {
        if !keys.iter().any(|x| x == k) {
            keys.push(k.to_string());
        }
    }
    keys
}

/// Layered loader. Later layers win.
#[derive(Debug, Default)]
pub struct Layers {
    table: Table,
}

impl Layers {
    pub fn from_file(path: Option<&Path>) -> Result<Self> {
        let Some(path) = path else { return Ok(Self::default()) };
        let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        let table: Table = text.parse().with_context(|| format!("parsing config {}", path.display()))?;
        match table.get("version") {
            Some(Value::Integer(CONFIG_VERSION)) => {}
            Some(v) => bail!("config {}: version: unsupported value {v}", path.display()),
            None => bail!("config {}: version: missing (expected version = {CONFIG_VERSION})", path.display()),
        }
        Ok(Self { table })
    }

    /// Apply `HDCSEARCH_<KEY>` variables from `vars`.
    pub fn env<I: IntoIterator<Item = (String, String)>>(&mut self, vars: I) {
        let keys = known_keys();
        for (name, value) in vars {
            let Some(key) = name.strip_prefix(ENV_PREFIX) else { continue };
            let key = key.to_ascii_lowercase();
            if keys.contains(&key) {
                self.table.insert(key, parse_value(&value));
            }
        }
    }

    /// Apply one `key=value` override.
    pub fn set(&mut self, assignment: &str) -> Result<()> {
        let (key, value) = assignment
            .split_once('=')
            .with_context(|| format!("override {assignment:?} is not key=value"))?;
        let key = key.trim();
        if !known_keys().iter().any(|k| k == key) {
            bail!("{key}: unknown configuration key");
        }
        self.table.insert(key.to_string(), parse_value(value.trim()));
        Ok(())
    }

    pub fn set_value<T: Into<Value>>(&mut self, key: &str, value: T) {
        self.table.insert(key.to_string(), value.into());
    }

    pub fn resolve(self) -> Result<RunConfig> {
        let text = toml::to_string(&self.table)?;
        let cfg: RunConfig = toml::from_str(&text).map_err(|e| {
            // Name the offending key from the error span when there is one.
            let key = e.span().and_then(|span| {
                let line_start = text[..span.start].rfind('\n').map_or(0, |i| i + 1);
                text[line_start..].split_once('=').map(|(k, _)| k.trim().to_string())
            });
            match key {
                Some(k) => anyhow::anyhow!("{k}: {}", e.message()),
                None => anyhow::anyhow!("configuration: {}", e.message()),
            }
        })?;
        cfg.validate()?;
        Ok(cfg)
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if self.version != CONFIG_VERSION {
            bail!("version: unsupported value {}", self.version);
        }
        if self.n_seeds == 0 {
            bail!("n_seeds: must be positive");
        }
        if !(self.subsample > 0.0 && self.subsample <= 1.0) {
            bail!("subsample: {} is outside (0, 1]", self.subsample);
        }
        if !(0.0..1.0).contains(&self.baseline_decay) {
            bail!("baseline_decay: {} is outside [0, 1)", self.baseline_decay);
        }
        if !self.lr.is_finite() || self.lr < 0.0 {
            bail!("lr: {} must be a non-negative number", self.lr);
        }
        if !self.entropy_coef.is_finite() {
            bail!("entropy_coef: must be finite");
        }
        self.split_spec().validate().context("split_train/split_valid/split_test")?;
        self.space().validate(true)?;
        Ok(())
    }

    pub fn space(&self) -> SearchSpace {
        let d = SearchSpace::default();
        SearchSpace {
            dims: self.space_dims.clone().unwrap_or(d.dims),
            sparsities: self.space_sparsities.clone().unwrap_or(d.sparsities),
            gram_sizes: self.space_gram_sizes.clone().unwrap_or(d.gram_sizes),
            base_dtypes: self.space_base_dtypes.clone().unwrap_or(d.base_dtypes),
            encoded_dtypes: self.space_encoded_dtypes.clone().unwrap_or(d.encoded_dtypes),
            resultant_dtypes: self.space_resultant_dtypes.clone().unwrap_or(d.resultant_dtypes),
            shifts: self.space_shifts.clone().unwrap_or(d.shifts),
            ops: self.space_ops.clone().unwrap_or(d.ops),
        }
    }

    pub fn split_spec(&self) -> SplitSpec {
        SplitSpec {
            train: self.split_train,
            valid: self.split_valid,
            test: self.split_test,
            seed: hdcsearch::rng::derive_seed(self.master_seed, hdcsearch::rng::Domain::Split, 0),
            stratified: self.stratified,
        }
    }

    pub fn eval_settings(&self) -> EvalSettings {
        EvalSettings {
            retrain_epochs: self.retrain_epochs,
            score: match self.metric {
                MetricKind::Accuracy => ScoreMetric::Accuracy,
                MetricKind::RocAuc => ScoreMetric::RocAuc { positive_class: self.positive_class },
            },
            similarity: self.similarity,
            shuffle: self.shuffle,
            refresh: self.refresh,
        }
    }

    pub fn search_settings(&self) -> SearchSettings {
        SearchSettings {
            episodes: self.episodes,
            n_seeds: self.n_seeds,
            master_seed: self.master_seed,
            seed_policy: self.seed_policy,
            eval: self.eval_settings(),
            controller: ControllerConfig {
                policy: self.policy,
                hidden: self.controller_hidden,
                embed: self.controller_embed,
                lr: self.lr,
                baseline_decay: self.baseline_decay,
                entropy_coef: self.entropy_coef,
                ..ControllerConfig::default()
            },
            mask_timing: self.mask_timing,
        }
    }

    /// The configuration as a loadable file.
    pub fn to_toml(&self) -> Result<String> {
        Ok(toml::to_string(self)?)
    }
}
