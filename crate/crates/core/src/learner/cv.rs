//! Document-level cross-validation and hyper-parameter grid search.
//!
//! Folds are assigned to *documents*, never to individual pairs, so pairs
//! from one document can never straddle the train/test boundary. The grid
//! re-uses one fold assignment for every point, making the per-point scores
//! directly comparable.

use super::forest::{train_forest, GridPoint};
use super::sampling::TrainingExample;
use super::tree::Criterion;
use super::TrainData;
use crate::error::{Error, Result};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;

/// Pair-classification counts and rates for one held-out fold.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FoldScore {
    pub true_positives: usize,
    pub false_positives: usize,
    pub false_negatives: usize,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

impl FoldScore {
    pub fn from_counts(tp: usize, fp: usize, fn_: usize) -> Self {
        let ratio = |num: usize, den: usize| {
            if den == 0 {
                0.0
            } else {
                num as f64 / den as f64
            }
        };
        let precision = ratio(tp, tp + fp);
        let recall = ratio(tp, tp + fn_);
        let f1 = if precision + recall == 0.0 {
            0.0
        } else {
            2.0 * precision * recall / (precision + recall)
        };
        FoldScore {
            true_positives: tp,
            false_positives: fp,
            false_negatives: fn_,
            precision,
            recall,
            f1,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CvReport {
    pub folds: Vec<FoldScore>,
    pub mean_precision: f64,
    pub mean_recall: f64,
    pub mean_f1: f64,
}

impl CvReport {
    fn from_folds(folds: Vec<FoldScore>) -> Self {
        let mean = |f: fn(&FoldScore) -> f64| {
            folds.iter().map(f).sum::<f64>() / folds.len() as f64
        };
        CvReport {
            mean_precision: mean(|s| s.precision),
            mean_recall: mean(|s| s.recall),
            mean_f1: mean(|s| s.f1),
            folds,
        }
    }
}

/// Splits the distinct document ids of `examples` into `k` shuffled folds
/// whose sizes differ by at most one.
pub fn document_folds(
    examples: &[TrainingExample],
    k: usize,
    seed: u64,
) -> Result<Vec<BTreeSet<String>>> {
    let mut ids: Vec<&str> = Vec::new();
    for e in examples {
        if !ids.contains(&e.doc_id.as_str()) {
            ids.push(&e.doc_id);
        }
    }
    if ids.len() < k || k == 0 {
        return Err(Error::TooFewDocuments {
            folds: k,
            found: ids.len(),
        });
    }
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    ids.shuffle(&mut rng);
    let mut folds = vec![BTreeSet::new(); k];
    for (i, id) in ids.into_iter().enumerate() {
        folds[i % k].insert(id.to_string());
    }
    Ok(folds)
}

fn score_fold(
    examples: &[TrainingExample],
    categorical: &BTreeSet<usize>,
    held_out: &BTreeSet<String>,
    point: GridPoint,
    seed: u64,
) -> Result<FoldScore> {
    let train: Vec<&TrainingExample> = examples
        .iter()
        .filter(|e| !held_out.contains(&e.doc_id))
        .collect();
    let test: Vec<&TrainingExample> = examples
        .iter()
        .filter(|e| held_out.contains(&e.doc_id))
        .collect();
    let data = TrainData::from_examples(train.iter().copied(), categorical)?;
    let forest = train_forest(&data, point, seed)?;
    let (mut tp, mut fp, mut fn_) = (0usize, 0usize, 0usize);
    for e in &test {
        let linked = forest.predict_proba(&e.features)? >= 0.5;
        match (linked, e.label) {
            (true, true) => tp += 1,
            (true, false) => fp += 1,
            (false, true) => fn_ += 1,
            (false, false) => {}
        }
    }
    Ok(FoldScore::from_counts(tp, fp, fn_))
}

/// K-fold cross-validation of a forest configuration at the 0.5 pair
/// decision threshold.
pub fn cross_validate(
    examples: &[TrainingExample],
    categorical: &BTreeSet<usize>,
    point: GridPoint,
    k: usize,
    seed: u64,
) -> Result<CvReport> {
    let folds = document_folds(examples, k, seed)?;
    let scores = folds
        .iter()
        .enumerate()
        .map(|(i, fold)| {
            score_fold(
                examples,
                categorical,
                fold,
                point,
                seed.wrapping_add(i as u64 + 1),
            )
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CvReport::from_folds(scores))
}

/// The searched hyper-parameter space: every combination of the three axes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub max_depths: Vec<Option<usize>>,
    pub n_estimators: Vec<usize>,
    pub criteria: Vec<Criterion>,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec {
            max_depths: std::iter::once(None)
                .chain((1..=10).map(|i| Some(i * 10)))
                .collect(),
            n_estimators: vec![100, 200, 500, 1000],
            criteria: vec![Criterion::Gini, Criterion::Entropy],
        }
    }
}

impl GridSpec {
    pub fn points(&self) -> Vec<GridPoint> {
        let mut points = Vec::new();
        for &max_depth in &self.max_depths {
            for &n_estimators in &self.n_estimators {
                for &criterion in &self.criteria {
                    points.push(GridPoint {
                        max_depth,
                        n_estimators,
                        criterion,
                    });
                }
            }
        }
        points
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridResult {
    pub point: GridPoint,
    pub mean_precision: f64,
    pub mean_recall: f64,
    pub mean_f1: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridReport {
    pub results: Vec<GridResult>,
    pub best: GridPoint,
}

/// Orders candidate winners: higher F1 first, then fewer trees, then
/// shallower depth (unbounded last), then Gini before entropy.
pub fn preference_key(r: &GridResult) -> impl Ord {
    (
        std::cmp::Reverse((r.mean_f1 * 1e12).round() as i64),
        r.point.n_estimators,
        r.point.max_depth.unwrap_or(usize::MAX),
        match r.point.criterion {
            Criterion::Gini => 0u8,
            Criterion::Entropy => 1u8,
        },
    )
}

/// Cross-validates every grid point over one shared fold assignment and
/// picks the best by [`preference_key`].
pub fn grid_search(
    examples: &[TrainingExample],
    categorical: &BTreeSet<usize>,
    grid: &GridSpec,
    k: usize,
    seed: u64,
) -> Result<GridReport> {
    let points = grid.points();
    if points.is_empty() {
        return Err(Error::InvalidSpec("empty hyper-parameter grid".into()));
    }
    let results = points
        .into_par_iter()
        .map(|point| {
            let report = cross_validate(examples, categorical, point, k, seed)?;
            Ok(GridResult {
                point,
                mean_precision: report.mean_precision,
                mean_recall: report.mean_recall,
                mean_f1: report.mean_f1,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let best = results
        .iter()
        .min_by_key(|r| preference_key(r))
        .expect("grid is non-empty")
        .point;
    Ok(GridReport { results, best })
}
