//! The learned linking stage: training-pair sampling, CART trees, bagged
//! forests, a logistic baseline, cross-validation and grid search.

pub mod cv;
pub mod forest;
pub mod logistic;
pub mod sampling;
pub mod tree;

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Either of the trainable scorers.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Classifier {
    Forest(forest::ForestModel),
    Logistic(logistic::LinearModel),
}

impl Classifier {
    pub fn predict_proba(&self, features: &[f64]) -> Result<f64> {
        match self {
            Classifier::Forest(m) => m.predict_proba(features),
            Classifier::Logistic(m) => m.predict_proba(features),
        }
    }

    pub fn n_features(&self) -> usize {
        match self {
            Classifier::Forest(m) => m.n_features,
            Classifier::Logistic(m) => m.n_features(),
        }
    }
}

/// Shared view over a training set: dense features, binary labels, and
/// which slots hold category codes.
pub struct TrainData<'a> {
    pub features: Vec<&'a [f64]>,
    pub labels: Vec<bool>,
    pub categorical: &'a std::collections::BTreeSet<usize>,
    pub n_slots: usize,
}

impl<'a> TrainData<'a> {
    pub fn from_examples<I>(
        examples: I,
        categorical: &'a std::collections::BTreeSet<usize>,
    ) -> Result<Self>
    where
        I: IntoIterator<Item = &'a sampling::TrainingExample>,
    {
        let mut features = Vec::new();
        let mut labels = Vec::new();
        let mut n_slots = 0usize;
        for e in examples {
            if features.is_empty() {
                n_slots = e.features.len();
            } else if e.features.len() != n_slots {
                return Err(Error::VocabMismatch(format!(
                    "example width {} differs from {}",
                    e.features.len(),
                    n_slots
                )));
            }
            features.push(e.features.as_slice());
            labels.push(e.label);
        }
        if features.is_empty() {
            return Err(Error::EmptyTrainingSet);
        }
        Ok(Self {
            features,
            labels,
            categorical,
            n_slots,
        })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }
}
