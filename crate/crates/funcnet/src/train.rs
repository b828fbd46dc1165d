//! Full-batch gradient descent with k-fold cross-validation.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use spli_core::config::FunctionsConfig;

use crate::graph::RelGraph;
use crate::model::{argmax, ModelError, Rgcn};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TrainError {
    #[error("need at least two labelled classes, found {0}")]
    SingleClass(usize),
    #[error("loss became non-finite at epoch {epoch} (fold {fold:?})")]
    NonFiniteLoss { epoch: usize, fold: Option<usize> },
    #[error(transparent)]
    Model(#[from] ModelError),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrainParams {
    pub layers: usize,
    pub hidden: usize,
    pub dropout: f64,
    pub learning_rate: f64,
    pub epochs: usize,
    pub folds: usize,
    pub seed: u64,
}

impl TrainParams {
    pub fn from_config(cfg: &FunctionsConfig, seed: u64) -> TrainParams {
        TrainParams {
            layers: cfg.layers,
            hidden: cfg.hidden,
            dropout: cfg.dropout,
            learning_rate: cfg.learning_rate,
            epochs: cfg.epochs,
            folds: cfg.folds,
            seed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainReport {
    pub classes: Vec<String>,
    /// Training loss of the final model, one entry per epoch.
    pub losses: Vec<f64>,
    pub fold_accuracies: Vec<f64>,
    /// Held-out accuracy pooled over all folds.
    pub cv_accuracy: f64,
    /// Share of the most frequent class among labelled nodes.
    pub majority_baseline: f64,
    /// confusion[true][predicted], pooled over held-out folds.
    pub confusion: Vec<Vec<usize>>,
}

/// Trains on `targets` (node, class) for `p.epochs` epochs and returns the
/// model with its per-epoch loss.
pub fn fit(g: &RelGraph, targets: &[(usize, usize)], p: &TrainParams, seed: u64, fold: Option<usize>) -> Result<(Rgcn, Vec<f64>), TrainError> {
    let mut model = Rgcn::new(g.features.cols, p.hidden, g.classes.len(), p.layers, g.relations.len(), p.dropout, seed);
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
    let mut losses = Vec::with_capacity(p.epochs);
    for epoch in 0..p.epochs {
        let (logits, caches) = model.forward_cached(&g.features, &g.relations, Some(&mut rng))?;
        let (loss, dlogits) = crate::model::cross_entropy(&logits, targets);
        if !loss.is_finite() {
            return Err(TrainError::NonFiniteLoss { epoch, fold });
        }
        losses.push(loss);
        let grads = model.backward(&caches, &g.relations, dlogits);
        model.step(&grads, p.learning_rate);
        if !model.is_finite() {
            return Err(TrainError::NonFiniteLoss { epoch, fold });
        }
    }
    Ok((model, losses))
}

/// Class predicted for every node, evaluation mode.
pub fn predict_classes(model: &Rgcn, g: &RelGraph) -> Result<Vec<usize>, ModelError> {
    let logits = model.forward(&g.features, &g.relations, None)?;
    Ok((0..logits.rows).map(|r| argmax(logits.row(r))).collect())
}

struct FoldResult {
    correct: usize,
    total: usize,
    pairs: Vec<(usize, usize)>,
}

fn run_fold(g: &RelGraph, targets: &[(usize, usize)], k: usize, f: usize, p: &TrainParams) -> Result<FoldResult, TrainError> {
    let (test, train): (Vec<_>, Vec<_>) = targets.iter().enumerate().partition(|(i, _)| i % k == f);
    let train: Vec<(usize, usize)> = train.into_iter().map(|(_, t)| *t).collect();
    let (model, _) = fit(g, &train, p, p.seed.wrapping_add(1 + f as u64), Some(f))?;
    let pred = predict_classes(&model, g)?;
    let pairs: Vec<(usize, usize)> = test.iter().map(|(_, &(node, c))| (c, pred[node])).collect();
    Ok(FoldResult {
        correct: pairs.iter().filter(|(a, b)| a == b).count(),
        total: pairs.len(),
        pairs,
    })
}

#[cfg(feature = "parallel")]
fn run_folds(g: &RelGraph, targets: &[(usize, usize)], k: usize, p: &TrainParams) -> Vec<Result<FoldResult, TrainError>> {
    use rayon::prelude::*;
    (0..k).into_par_iter().map(|f| run_fold(g, targets, k, f, p)).collect()
}

#[cfg(not(feature = "parallel"))]
fn run_folds(g: &RelGraph, targets: &[(usize, usize)], k: usize, p: &TrainParams) -> Vec<Result<FoldResult, TrainError>> {
    (0..k).map(|f| run_fold(g, targets, k, f, p)).collect()
}

/// Cross-validates, then fits the returned model on every labelled node.
pub fn train(g: &RelGraph, p: &TrainParams) -> Result<(Rgcn, TrainReport), TrainError> {
    let c = g.classes.len();
    let mut targets: Vec<(usize, usize)> = g.labels.iter().enumerate().filter_map(|(i, l)| l.map(|c| (i, c))).collect();
    let mut counts = vec![0usize; c];
    for &(_, k) in &targets {
        counts[k] += 1;
    }
    let present = counts.iter().filter(|&&n| n > 0).count();
    if present < 2 {
        return Err(TrainError::SingleClass(present));
    }
    targets.shuffle(&mut ChaCha8Rng::seed_from_u64(p.seed));

    let k = p.folds.clamp(2, targets.len().max(2)).min(targets.len());
    let mut confusion = vec![vec![0usize; c]; c];
    let mut fold_accuracies = Vec::with_capacity(k);
    let (mut correct, mut total) = (0, 0);
    for res in run_folds(g, &targets, k, p) {
        let res = res?;
        fold_accuracies.push(if res.total == 0 { 0.0 } else { res.correct as f64 / res.total as f64 });
        for (t, q) in res.pairs {
            confusion[t][q] += 1;
        }
        correct += res.correct;
        total += res.total;
    }
    log::info!("cross-validation accuracy {correct}/{total}");

    let (model, losses) = fit(g, &targets, p, p.seed, None)?;
    let report = TrainReport {
        classes: g.classes.clone(),
        losses,
        fold_accuracies,
        cv_accuracy: if total == 0 { 0.0 } else { correct as f64 / total as f64 },
        majority_baseline: *counts.iter().max().unwrap_or(&0) as f64 / targets.len() as f64,
        confusion,
    };
    Ok((model, report))
}
