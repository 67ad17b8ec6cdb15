use hdcsearch::data::{split, synthetic_corpus, SplitSpec, SyntheticSpec};
use hdcsearch::encoder::ArchConfig;
use hdcsearch::hv::ElementType;
use hdcsearch::rng::{stream, Domain};
use hdcsearch::search::*;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn toy_data(noise: f64, seed: u64) -> PreparedData {
    let corpus = synthetic_corpus(&SyntheticSpec { noise, seed, ..Default::default() }).unwrap();
    PreparedData::new(&split(&corpus, &SplitSpec { seed, ..Default::default() }).unwrap()).unwrap()
}

fn small_space() -> SearchSpace {
    SearchSpace { dims: vec![1000, 2000], ..SearchSpace::default() }
}

#[test]
fn uniform_controller_samples_first_decision_uniformly() {
    let space = SearchSpace::default();
    let c = Controller::new(ControllerConfig::default(), &space.arities(), &mut ChaCha8Rng::seed_from_u64(1)).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut counts = [0usize; 20];
    let draws = 10_000;
    for _ in 0..draws {
        let path = c.sample(&mut rng);
        counts[path.choices[0]] += 1;
        assert!(space.contains(&space.decode(&path.choices).unwrap()));
    }
    for n in counts {
        assert!((n as f64 / draws as f64 - 0.05).abs() <= 0.02, "{counts:?}");
    }
}

#[test]
fn zero_learning_rate_keeps_the_policy_fixed() {
    let space = SearchSpace::default();
    let cfg = ControllerConfig { lr: 0.0, zero_output: false, ..Default::default() };
    let mut c = Controller::new(cfg, &space.arities(), &mut ChaCha8Rng::seed_from_u64(1)).unwrap();
    let probe = [3, 1, 4, 1, 5, 2, 6, 3];
    let before = c.distributions(&probe);
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for r in [1.0, 0.0, 0.5] {
        let path = c.sample(&mut rng);
        c.update(&path, r).unwrap();
    }
    assert_eq!(c.distributions(&probe), before);
}

#[test]
fn bandit_on_shift_converges() {
    let arities = SearchSpace::default().arities();
    let mut c = Controller::new(ControllerConfig::default(), &arities, &mut stream(0, Domain::ControllerInit, 0)).unwrap();
    let mut rng = stream(0, Domain::Controller, 0);
    for _ in 0..2000 {
        let path = c.sample(&mut rng);
        c.update(&path, if path.choices[6] == 3 { 1.0 } else { 0.0 }).unwrap();
    }
    assert!(c.marginal(6, 3, 500, &mut ChaCha8Rng::seed_from_u64(5)) > 0.9);
}

#[test]
fn reward_is_the_mean_of_seed_scores() {
    let data = toy_data(0.0, 1);
    let settings = EvalSettings::default();
    let cfg = ArchConfig { dim: 1000, ..ArchConfig::default() };
    let (r1, s1) = evaluate_reward(&cfg, &data, &[42], &settings).unwrap();
    assert_eq!(s1.len(), 1);
    assert_eq!(r1, s1[0]);
    let (r2, _) = evaluate_reward(&cfg, &data, &[42], &settings).unwrap();
    assert_eq!(r1, r2);
    let (r3, s3) = evaluate_reward(&cfg, &data, &[1, 2, 3], &settings).unwrap();
    assert!((r3 - s3.iter().sum::<f64>() / 3.0).abs() < 1e-15);
    assert!(r1 >= 0.9 && r3 >= 0.9, "{r1} {r3}");
}

#[test]
fn roc_auc_reward_needs_two_classes() {
    let corpus = synthetic_corpus(&SyntheticSpec { classes: 3, ..Default::default() }).unwrap();
    let data = PreparedData::new(&split(&corpus, &SplitSpec::default()).unwrap()).unwrap();
    let settings = EvalSettings { score: ScoreMetric::RocAuc { positive_class: 1 }, ..Default::default() };
    let cfg = ArchConfig { dim: 1000, ..ArchConfig::default() };
    assert!(evaluate_reward(&cfg, &data, &[1], &settings).is_err());
}

#[test]
fn single_episode_search() {
    let data = toy_data(0.2, 2);
    let settings = SearchSettings { episodes: 1, n_seeds: 2, mask_timing: true, ..Default::default() };
    let out = search_loop(&small_space(), &data, &settings, None, |_, _| Ok(())).unwrap();
    assert_eq!(out.log.len(), 1);
    assert_eq!(out.best, out.log[0]);
}

#[test]
fn search_is_deterministic() {
    let data = toy_data(0.3, 3);
    let settings = SearchSettings { episodes: 4, n_seeds: 2, mask_timing: true, master_seed: 8, ..Default::default() };
    let run = || {
        let out = search_loop(&small_space(), &data, &settings, None, |_, _| Ok(())).unwrap();
        out.log.iter().map(|r| serde_json::to_string(r).unwrap()).collect::<Vec<_>>()
    };
    assert_eq!(run(), run());
}

#[test]
fn finalize_bookkeeping() {
    let data = toy_data(0.5, 4);
    let settings = EvalSettings::default();
    let cfg = ArchConfig { dim: 1000, gram_size: 2, ..ArchConfig::default() };

    let (plain, report0) = finalize(&cfg, &data, 7, 0, Selection::Validation, &settings).unwrap();
    assert_eq!(report0.epoch_scores.len(), 1);
    assert_eq!(report0.best_epoch, 0);
    let trained = train_model(&cfg, &data, 7, &EvalSettings { retrain_epochs: 0, ..settings }).unwrap();
    assert_eq!(plain.memory.accumulators(), trained.memory.accumulators());

    let (_, report) = finalize(&cfg, &data, 7, 30, Selection::Validation, &settings).unwrap();
    let max = report.epoch_scores.iter().cloned().fold(f64::MIN, f64::max);
    assert_eq!(report.best_score, max);
    assert_eq!(report.best_score, report.epoch_scores[report.best_epoch]);
    assert!(report.best_score >= report.epoch_scores[0]);
    assert_eq!(report.valid_score, report.best_score);
    assert!(finalize(&cfg, &data, 7, 3, Selection::PaperModeTest, &settings).is_err());
}

#[test]
fn paper_mode_selects_on_test() {
    let corpus = synthetic_corpus(&SyntheticSpec { noise: 0.5, samples: 300, ..Default::default() }).unwrap();
    let s = split(&corpus, &SplitSpec { train: 0.8, valid: 0.1, test: 0.1, ..Default::default() }).unwrap();
    let data = PreparedData::new(&s).unwrap();
    let cfg = ArchConfig { dim: 1000, gram_size: 2, ..ArchConfig::default() };
    let (_, report) = finalize(&cfg, &data, 3, 20, Selection::PaperModeTest, &EvalSettings::default()).unwrap();
    assert_eq!(report.test_score, Some(report.best_score));
    assert!(report.selection_label.contains("test"));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn policy_outputs_are_distributions(seed in any::<u64>(), factorized in any::<bool>()) {
        let space = SearchSpace::default();
        let policy = if factorized { PolicyKind::Factorized } else { PolicyKind::Recurrent };
        let cfg = ControllerConfig { policy, zero_output: false, init_scale: 0.5, ..Default::default() };
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let c = Controller::new(cfg, &space.arities(), &mut rng).unwrap();
        let path = c.sample(&mut rng);
        let cfg = space.decode(&path.choices).unwrap();
        prop_assert!(space.contains(&cfg));
        prop_assert!(cfg.validate(true).is_ok());
        for (probs, a) in c.distributions(&path.choices).iter().zip(space.arities()) {
            prop_assert_eq!(probs.len(), a);
            prop_assert!(probs.iter().all(|&p| p > 0.0));
            prop_assert!((probs.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        }
    }
}

#[test]
fn restricted_space_decodes_inside_menus() {
    let space = SearchSpace { base_dtypes: vec![ElementType::Binary], ..small_space() };
    let cfg = space.decode(&[1, 0, 0, 0, 0, 0, 0, 0]).unwrap();
    assert_eq!(cfg.dim, 2000);
    assert_eq!(cfg.base_dtype, ElementType::Binary);
}
