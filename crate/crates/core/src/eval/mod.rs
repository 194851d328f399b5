//! Accuracy estimation and the threshold-searching wrapper.

mod report;

pub use report::{binomial_std, mean_and_sample_std, render, render_json, render_table, EvalReport, ReportFormat};

use std::time::Instant;

use rayon::prelude::*;

use crate::data::{cv_folds, split_holdout, Dataset};
use crate::error::{Error, Result};
use crate::infotheory::{CmiCache, CmiSource, MiThreshold};
use crate::learners::{learn_with, ClassifierKind, LearnedStructure, LearnerConfig};
use crate::model::{fit_cpts, BayesNet, Smoothing};

#[derive(Debug, Clone, PartialEq)]
pub struct EvalConfig {
    pub learner: LearnerConfig,
    pub smoothing: Smoothing,
    /// Name recorded in reports.
    pub dataset: String,
}

impl EvalConfig {
    pub fn new(learner: LearnerConfig) -> Self {
        EvalConfig {
            learner,
            smoothing: Smoothing::default(),
            dataset: String::from("data"),
        }
    }

    pub fn named(mut self, dataset: impl Into<String>) -> Self {
        self.dataset = dataset.into();
        self
    }
}

/// Fraction of `test` cases whose class `net` predicts correctly.
pub fn accuracy(net: &BayesNet, test: &Dataset) -> Result<f64> {
    let binding = net.bind(test)?;
    let mut correct = 0usize;
    for r in 0..test.n_cases() {
        let predicted = net.predict(&binding.instance(r)?)?;
        correct += (binding.class_value(r) == Some(predicted)) as usize;
    }
    Ok(correct as f64 / test.n_cases() as f64)
}

/// Learns structure and tables on `train`.
pub fn train_with(source: &dyn CmiSource, learner: &LearnerConfig, smoothing: Smoothing) -> Result<(LearnedStructure, BayesNet)> {
    let structure = learn_with(source, learner)?;
    let net = fit_cpts(&structure, source.dataset(), smoothing)?;
    Ok((structure, net))
}

pub fn train(ds: &Dataset, learner: &LearnerConfig, smoothing: Smoothing) -> Result<BayesNet> {
    Ok(train_with(&CmiCache::new(ds), learner, smoothing)?.1)
}

fn check_test(train: &Dataset, test: &Dataset) -> Result<()> {
    if !train.shares_schema(test) {
        return Err(Error::Schema("train and test sets have different schemas".into()));
    }
    if test.n_cases() == 0 {
        return Err(Error::EmptyInput);
    }
    Ok(())
}

/// Trains on `train`, scores on `test`; std is the binomial standard error.
pub fn evaluate_holdout(train_set: &Dataset, test: &Dataset, config: &EvalConfig) -> Result<EvalReport> {
    check_test(train_set, test)?;
    let start = Instant::now();
    let net = train(train_set, &config.learner, config.smoothing)?;
    let acc = accuracy(&net, test)?;
    Ok(EvalReport {
        dataset: config.dataset.clone(),
        kind: config.learner.kind,
        accuracy: acc,
        std: binomial_std(acc, test.n_cases()),
        n_test: test.n_cases(),
        per_fold: None,
        features_retained: net.structure().retained_features.len(),
        features_total: train_set.feature_indices().len(),
        threshold: config.learner.threshold.map(MiThreshold::epsilon),
        seconds: start.elapsed().as_secs_f64(),
    })
}

/// k-fold cross-validation: mean of fold accuracies with their sample std.
/// `features_retained` is the rounded mean over folds.
pub fn evaluate_cv(ds: &Dataset, k: usize, config: &EvalConfig, seed: u64) -> Result<EvalReport> {
    let start = Instant::now();
    let folds = cv_folds(ds, k, seed)?;
    let results: Vec<(f64, usize)> = folds
        .par_iter()
        .map(|(train_part, test_part)| {
            let net = train(train_part, &config.learner, config.smoothing)?;
            Ok((accuracy(&net, test_part)?, net.structure().retained_features.len()))
        })
        .collect::<Result<_>>()?;
    let per_fold: Vec<f64> = results.iter().map(|r| r.0).collect();
    let (mean, std) = mean_and_sample_std(&per_fold);
    let retained = results.iter().map(|r| r.1).sum::<usize>() as f64 / k as f64;
    Ok(EvalReport {
        dataset: config.dataset.clone(),
        kind: config.learner.kind,
        accuracy: mean,
        std,
        n_test: ds.n_cases(),
        per_fold: Some(per_fold),
        features_retained: retained.round() as usize,
        features_total: ds.feature_indices().len(),
        threshold: config.learner.threshold.map(MiThreshold::epsilon),
        seconds: start.elapsed().as_secs_f64(),
    })
}

pub const DEFAULT_GRID: [f64; 7] = [0.001, 0.0025, 0.005, 0.01, 0.02, 0.05, 0.1];

#[derive(Debug, Clone, PartialEq)]
pub struct WrapperConfig {
    pub threshold_grid: Vec<MiThreshold>,
    pub internal_train_fraction: f64,
    pub seed: u64,
    pub smoothing: Smoothing,
    /// Learners searched, in tie-break priority order.
    pub learners: Vec<ClassifierKind>,
    /// Below this many training cases grid points are scored by internal
    /// cross-validation instead of a single holdout.
    pub small_data_cases: usize,
    pub small_data_folds: usize,
}

impl Default for WrapperConfig {
    fn default() -> Self {
        WrapperConfig {
            threshold_grid: DEFAULT_GRID.iter().map(|&t| MiThreshold::new(t).expect("valid grid")).collect(),
            internal_train_fraction: 2.0 / 3.0,
            seed: 0,
            smoothing: Smoothing::default(),
            learners: vec![ClassifierKind::Gbn, ClassifierKind::Ban],
            small_data_cases: 500,
            small_data_folds: 3,
        }
    }
}

impl WrapperConfig {
    pub fn with_grid(mut self, grid: Vec<MiThreshold>) -> Self {
        self.threshold_grid = grid;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.threshold_grid.is_empty() {
            return Err(Error::Config("threshold grid is empty".into()));
        }
        if self.threshold_grid.windows(2).any(|w| w[0].epsilon() >= w[1].epsilon()) {
            return Err(Error::Config("threshold grid must be strictly ascending".into()));
        }
        if self.learners.is_empty() || self.learners.iter().any(|k| !k.uses_threshold()) {
            return Err(Error::Config("wrapper searches BAN and GBN learners only".into()));
        }
        if self.small_data_folds < 2 {
            return Err(Error::Config("internal cross-validation needs at least 2 folds".into()));
        }
        Ok(())
    }
}

/// Score of one learner at one threshold on the internal data.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridPoint {
    pub kind: ClassifierKind,
    pub threshold: f64,
    pub score: f64,
}

#[derive(Debug, Clone)]
pub struct WrapperOutcome {
    pub net: BayesNet,
    /// Internal score and settings of the chosen model.
    pub report: EvalReport,
    pub trace: Vec<GridPoint>,
    /// Distinct score computations over the whole search.
    pub distinct_evaluations: usize,
    pub cross_validated: bool,
}

impl WrapperOutcome {
    pub fn best(&self, kind: ClassifierKind) -> Option<GridPoint> {
        pick(self.trace.iter().filter(|g| g.kind == kind).copied())
    }
}

/// Highest score; ties go to the larger threshold (the sparser model).
fn pick(points: impl Iterator<Item = GridPoint>) -> Option<GridPoint> {
    points.fold(None, |best: Option<GridPoint>, g| match best {
        Some(b) if b.score > g.score || (b.score == g.score && b.threshold >= g.threshold) => Some(b),
        _ => Some(g),
    })
}

/// Searches the threshold grid for each learner on an internal split of
/// `train`, keeps the better learner (ties go to the earlier entry of
/// `wc.learners`) and refits its tables on all of `train`.
///
/// Mutual-information scores are cached and shared by every grid point.
/// With fewer than `small_data_cases` cases each point is scored by internal
/// cross-validation, and the winner is relearned on all of `train`.
pub fn wrapper_select(train: &Dataset, wc: &WrapperConfig) -> Result<WrapperOutcome> {
    wc.validate()?;
    train.require_learnable()?;
    let start = Instant::now();
    let configs: Vec<LearnerConfig> = wc
        .learners
        .iter()
        .flat_map(|&kind| wc.threshold_grid.iter().map(move |&t| LearnerConfig { kind, threshold: Some(t) }))
        .collect();

    let cross_validated = train.n_cases() < wc.small_data_cases;
    let (trace, chosen_structure, distinct) = if cross_validated {
        let folds = cv_folds(train, wc.small_data_folds, wc.seed)?;
        let caches: Vec<CmiCache> = folds.iter().map(|(t, _)| CmiCache::new(t)).collect();
        let mut trace = Vec::with_capacity(configs.len());
        for cfg in &configs {
            let mut total = 0.0;
            for ((_, test), cache) in folds.iter().zip(&caches) {
                let (_, net) = train_with(cache, cfg, wc.smoothing)?;
                total += accuracy(&net, test)?;
            }
            trace.push(point(cfg, total / folds.len() as f64));
        }
        let distinct = caches.iter().map(|c| c.evaluations()).sum();
        (trace, None, distinct)
    } else {
        let (inner, holdout) = split_holdout(train, wc.internal_train_fraction, wc.seed)?;
        let cache = CmiCache::new(&inner);
        let mut trace = Vec::with_capacity(configs.len());
        let mut structures = Vec::with_capacity(configs.len());
        for cfg in &configs {
            let (structure, net) = train_with(&cache, cfg, wc.smoothing)?;
            trace.push(point(cfg, accuracy(&net, &holdout)?));
            structures.push(structure);
        }
        (trace, Some(structures), cache.evaluations())
    };

    let mut winner: Option<(usize, GridPoint)> = None;
    for &kind in &wc.learners {
        let best = pick(trace.iter().filter(|g| g.kind == kind).copied()).expect("non-empty grid");
        if winner.map_or(true, |(_, w)| best.score > w.score) {
            let idx = trace.iter().position(|g| *g == best).expect("from trace");
            winner = Some((idx, best));
        }
    }
    let (idx, best) = winner.expect("at least one learner");
    let structure = match chosen_structure {
        Some(mut structures) => structures.swap_remove(idx),
        None => learn_with(&CmiCache::new(train), &configs[idx])?,
    };
    let net = fit_cpts(&structure, train, wc.smoothing)?;
    let report = EvalReport {
        dataset: String::from("wrapper"),
        kind: best.kind,
        accuracy: best.score,
        std: 0.0,
        n_test: 0,
        per_fold: None,
        features_retained: structure.retained_features.len(),
        features_total: train.feature_indices().len(),
        threshold: Some(best.threshold),
        seconds: start.elapsed().as_secs_f64(),
    };
    Ok(WrapperOutcome {
        net,
        report,
        trace,
        distinct_evaluations: distinct,
        cross_validated,
    })
}

fn point(cfg: &LearnerConfig, score: f64) -> GridPoint {
    GridPoint {
        kind: cfg.kind,
        threshold: cfg.threshold.map_or(0.0, MiThreshold::epsilon),
        score,
    }
}
