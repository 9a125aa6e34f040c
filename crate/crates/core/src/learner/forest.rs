//! Bagged random forests over the CART trees.
//!
//! Every tree sees a bootstrap resample (same size, with replacement) and
//! considers √d features per node. Per-tree seeds are drawn from the master
//! seed up front, so training is reproducible even when the trees are built
//! in parallel.

use super::tree::{train_tree, Criterion, TreeNode, TreeParams};
use super::TrainData;
use crate::error::{Error, Result};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// One hyper-parameter combination.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridPoint {
    /// `None` grows trees until pure.
    pub max_depth: Option<usize>,
    pub n_estimators: usize,
    pub criterion: Criterion,
}

impl Default for GridPoint {
    fn default() -> Self {
        Self {
            max_depth: None,
            n_estimators: 100,
            criterion: Criterion::Gini,
        }
    }
}

impl std::fmt::Display for GridPoint {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self.max_depth {
            Some(d) => write!(f, "depth={d}"),
            None => write!(f, "depth=none"),
        }?;
        write!(f, " trees={} criterion={}", self.n_estimators, self.criterion.name())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ForestModel {
    pub trees: Vec<TreeNode>,
    pub point: GridPoint,
    pub n_features: usize,
    pub feature_subsample: usize,
    pub seed: u64,
}

impl ForestModel {
    /// Mean of the leaf positive fractions across trees.
    pub fn predict_proba(&self, features: &[f64]) -> Result<f64> {
        if features.len() != self.n_features {
            return Err(Error::VocabMismatch(format!(
                "feature vector has {} slots, model expects {}",
                features.len(),
                self.n_features
            )));
        }
        let sum: f64 = self.trees.iter().map(|t| t.predict(features)).sum();
        Ok(sum / self.trees.len() as f64)
    }
}

/// √d, the conventional per-node feature budget.
pub fn default_feature_subsample(n_slots: usize) -> usize {
    ((n_slots as f64).sqrt().round() as usize).max(1)
}

pub fn train_forest(data: &TrainData, point: GridPoint, seed: u64) -> Result<ForestModel> {
    if data.is_empty() {
        return Err(Error::EmptyTrainingSet);
    }
    if point.n_estimators == 0 {
        return Err(Error::Config("n_estimators must be positive".into()));
    }
    let n = data.len();
    let feature_subsample = default_feature_subsample(data.n_slots);

    // Draw all per-tree seeds first; parallel build order then cannot
    // affect the result.
    let mut master = ChaCha20Rng::seed_from_u64(seed);
    let tree_seeds: Vec<u64> = (0..point.n_estimators).map(|_| master.random()).collect();

    let params = TreeParams {
        max_depth: point.max_depth,
        criterion: point.criterion,
        feature_subsample,
    };
    let trees: Vec<TreeNode> = tree_seeds
        .par_iter()
        .map(|tree_seed| {
            let mut rng = ChaCha20Rng::seed_from_u64(*tree_seed);
            let indices: Vec<usize> = (0..n).map(|_| rng.random_range(0..n)).collect();
            train_tree(data, &indices, &params, &mut rng)
        })
        .collect();

    Ok(ForestModel {
        trees,
        point,
        n_features: data.n_slots,
        feature_subsample,
        seed,
    })
}
