use std::time::Instant;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::evaluate::{evaluate_reward, EvalSettings, PreparedData};
use super::{Controller, ControllerConfig, EpisodeRecord, SearchSpace};
use crate::encoder::ArchConfig;
use crate::rng::{self, derive_seed, Domain};
use crate::{HdcError, Result};

/// Whether every episode scores its architecture under the same model seeds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SeedPolicy {
    #[default]
    Fixed,
    Fresh,
}

impl SeedPolicy {
    /// Model seeds for `episode`.
    pub fn seeds(self, master: u64, n: usize, episode: usize) -> Vec<u64> {
        (0..n as u64)
            .map(|k| match self {
                SeedPolicy::Fixed => derive_seed(master, Domain::EvalSeeds, k),
                SeedPolicy::Fresh => derive_seed(master, Domain::EvalSeeds, ((episode as u64 + 1) << 20) | k),
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SearchSettings {
    pub episodes: usize,
    pub n_seeds: usize,
    pub master_seed: u64,
    pub seed_policy: SeedPolicy,
    pub eval: EvalSettings,
    pub controller: ControllerConfig,
    /// Record zero durations so logs are byte-comparable.
    pub mask_timing: bool,
}

impl Default for SearchSettings {
    fn default() -> Self {
        Self {
            episodes: 500,
            n_seeds: 5,
            master_seed: 0,
            seed_policy: SeedPolicy::Fixed,
            eval: EvalSettings::default(),
            controller: ControllerConfig::default(),
            mask_timing: false,
        }
    }
}

/// Everything needed to continue a search: the policy, its sampling stream
/// and the next episode index.
#[derive(Debug, Clone)]
pub struct SearchState {
    pub controller: Controller,
    pub rng: ChaCha8Rng,
    pub next_episode: usize,
}

impl SearchState {
    pub fn new(space: &SearchSpace, settings: &SearchSettings) -> Result<Self> {
        let mut init = rng::stream(settings.master_seed, Domain::ControllerInit, 0);
        Ok(Self {
            controller: Controller::new(settings.controller, &space.arities(), &mut init)?,
            rng: rng::stream(settings.master_seed, Domain::Controller, 0),
            next_episode: 0,
        })
    }
}

#[derive(Debug, Clone)]
pub struct SearchOutcome {
    pub best: EpisodeRecord,
    pub log: Vec<EpisodeRecord>,
    /// Final policy state; `None` for random search.
    pub state: Option<SearchState>,
}

/// Highest reward, ties going to the earliest episode.
pub fn best_episode(log: &[EpisodeRecord]) -> Option<&EpisodeRecord> {
    log.iter().fold(None, |best: Option<&EpisodeRecord>, r| match best {
        Some(b) if b.reward >= r.reward => Some(b),
        _ => Some(r),
    })
}

fn check(space: &SearchSpace, settings: &SearchSettings) -> Result<()> {
    space.validate(false)?;
    if settings.n_seeds == 0 {
        return Err(HdcError::InvalidConfig { field: "n_seeds", reason: "must be positive".into() });
    }
    Ok(())
}

fn run_episode<F>(
    episode: usize,
    cfg: ArchConfig,
    choices: Vec<usize>,
    settings: &SearchSettings,
    evaluate: &mut F,
) -> EpisodeRecord
where
    F: FnMut(&ArchConfig, &[u64]) -> Result<Vec<f64>>,
{
    let seeds = settings.seed_policy.seeds(settings.master_seed, settings.n_seeds, episode);
    let start = Instant::now();
    let outcome = cfg.validate(false).and_then(|_| evaluate(&cfg, &seeds)).and_then(|scores| {
        let reward = super::evaluate::mean(&scores);
        if reward.is_finite() {
            Ok((reward, scores))
        } else {
            Err(HdcError::NonFiniteReward(reward))
        }
    });
    let duration_ms = if settings.mask_timing { 0 } else { start.elapsed().as_millis() as u64 };
    let (reward, scores, error) = match outcome {
        Ok((r, s)) => (r, s, None),
        Err(e) => (0.0, Vec::new(), Some(e.to_string())),
    };
    EpisodeRecord { episode, config: cfg, choices, seeds, scores, reward, baseline: 0.0, duration_ms, error }
}

/// The REINFORCE loop with a caller-supplied evaluator mapping an
/// architecture and model seeds to per-seed scores. Runs episodes
/// `state.next_episode..settings.episodes`. A failed evaluation is logged
/// with reward 0 and the search continues.
pub fn search_with<F, G>(
    space: &SearchSpace,
    settings: &SearchSettings,
    state: &mut SearchState,
    mut evaluate: F,
    mut on_episode: G,
) -> Result<Vec<EpisodeRecord>>
where
    F: FnMut(&ArchConfig, &[u64]) -> Result<Vec<f64>>,
    G: FnMut(&EpisodeRecord, &SearchState) -> Result<()>,
{
    check(space, settings)?;
    if state.controller.arities() != space.arities() {
        return Err(HdcError::InvalidConfig {
            field: "controller",
            reason: "controller arities do not match the search space".into(),
        });
    }
    let mut log = Vec::new();
    while state.next_episode < settings.episodes {
        let episode = state.next_episode;
        let path = state.controller.sample(&mut state.rng);
        let cfg = space.decode(&path.choices)?;
        let mut rec = run_episode(episode, cfg, path.choices.clone(), settings, &mut evaluate);
        rec.baseline = state.controller.update(&path, rec.reward)?.baseline;
        state.next_episode += 1;
        on_episode(&rec, state)?;
        log.push(rec);
    }
    Ok(log)
}

fn outcome(log: Vec<EpisodeRecord>, state: Option<SearchState>) -> Result<SearchOutcome> {
    let best = best_episode(&log)
        .cloned()
        .ok_or(HdcError::InvalidConfig { field: "episodes", reason: "no episodes were run".into() })?;
    Ok(SearchOutcome { best, log, state })
}

/// Search `space` on `data`, starting from `state` or a fresh controller.
pub fn search_loop<G>(
    space: &SearchSpace,
    data: &PreparedData,
    settings: &SearchSettings,
    state: Option<SearchState>,
    on_episode: G,
) -> Result<SearchOutcome>
where
    G: FnMut(&EpisodeRecord, &SearchState) -> Result<()>,
{
    let mut state = match state {
        Some(s) => s,
        None => SearchState::new(space, settings)?,
    };
    let log = search_with(
        space,
        settings,
        &mut state,
        |cfg, seeds| evaluate_reward(cfg, data, seeds, &settings.eval).map(|(_, s)| s),
        on_episode,
    )?;
    outcome(log, Some(state))
}

/// Uniform random architectures scored exactly like search episodes.
pub fn random_search_with<F, G>(
    space: &SearchSpace,
    settings: &SearchSettings,
    mut evaluate: F,
    mut on_episode: G,
) -> Result<SearchOutcome>
where
    F: FnMut(&ArchConfig, &[u64]) -> Result<Vec<f64>>,
    G: FnMut(&EpisodeRecord) -> Result<()>,
{
    check(space, settings)?;
    let mut rng = rng::stream(settings.master_seed, Domain::RandomSearch, 0);
    let arities = space.arities();
    let mut log = Vec::with_capacity(settings.episodes);
    for episode in 0..settings.episodes {
        let choices: Vec<usize> = arities.iter().map(|&a| rng.gen_range(0..a)).collect();
        let cfg = space.decode(&choices)?;
        let rec = run_episode(episode, cfg, choices, settings, &mut evaluate);
        on_episode(&rec)?;
        log.push(rec);
    }
    outcome(log, None)
}

pub fn random_search<G>(
    space: &SearchSpace,
    data: &PreparedData,
    settings: &SearchSettings,
    on_episode: G,
) -> Result<SearchOutcome>
where
    G: FnMut(&EpisodeRecord) -> Result<()>,
{
    random_search_with(
        space,
        settings,
        |cfg, seeds| evaluate_reward(cfg, data, seeds, &settings.eval).map(|(_, s)| s),
        on_episode,
    )
}
