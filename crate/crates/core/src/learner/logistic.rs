//! Logistic-regression baseline.
//!
//! Numeric slots are standardized with training-set statistics; categorical
//! slots are one-hot encoded over the codes seen in training (unseen codes
//! encode to all zeros). Training is full-batch gradient descent on the
//! L2-regularized negative log-likelihood — deterministic, no RNG.

use super::TrainData;
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Encoder {
    /// (slot, training mean, training standard deviation) per numeric slot.
    pub numeric: Vec<(usize, f64, f64)>,
    /// (slot, sorted codes) per categorical slot.
    pub categorical: Vec<(usize, Vec<u32>)>,
    pub n_slots: usize,
}

impl Encoder {
    pub fn fit(data: &TrainData) -> Self {
        let mut numeric = Vec::new();
        let mut categorical = Vec::new();
        for slot in 0..data.n_slots {
            if data.categorical.contains(&slot) {
                let codes: BTreeSet<u32> = data
                    .features
                    .iter()
                    .map(|f| f[slot] as u32)
                    .collect();
                categorical.push((slot, codes.into_iter().collect()));
            } else {
                let n = data.len() as f64;
                let mean = data.features.iter().map(|f| f[slot]).sum::<f64>() / n;
                let var = data
                    .features
                    .iter()
                    .map(|f| (f[slot] - mean).powi(2))
                    .sum::<f64>()
                    / n;
                let std = var.sqrt();
                numeric.push((slot, mean, if std > 0.0 { std } else { 1.0 }));
            }
        }
        Self {
            numeric,
            categorical,
            n_slots: data.n_slots,
        }
    }

    pub fn width(&self) -> usize {
        self.numeric.len() + self.categorical.iter().map(|(_, c)| c.len()).sum::<usize>()
    }

    pub fn encode(&self, features: &[f64]) -> Result<Vec<f64>> {
        if features.len() != self.n_slots {
            return Err(Error::VocabMismatch(format!(
                "feature vector has {} slots, encoder expects {}",
                features.len(),
                self.n_slots
            )));
        }
        let mut out = Vec::with_capacity(self.width());
        for (slot, mean, std) in &self.numeric {
            out.push((features[*slot] - mean) / std);
        }
        for (slot, codes) in &self.categorical {
            let value = features[*slot] as u32;
            for code in codes {
                out.push(f64::from(*code == value));
            }
        }
        Ok(out)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LinearModel {
    pub encoder: Encoder,
    pub weights: Vec<f64>,
    pub bias: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LogisticParams {
    pub epochs: usize,
    pub learning_rate: f64,
    pub l2: f64,
}

impl Default for LogisticParams {
    fn default() -> Self {
        Self {
            epochs: 200,
            learning_rate: 0.5,
            l2: 1e-4,
        }
    }
}

fn sigmoid(z: f64) -> f64 {
    1.0 / (1.0 + (-z).exp())
}

impl LinearModel {
    pub fn n_features(&self) -> usize {
        self.encoder.n_slots
    }

    pub fn predict_proba(&self, features: &[f64]) -> Result<f64> {
        let x = self.encoder.encode(features)?;
        let z: f64 = self.bias + x.iter().zip(&self.weights).map(|(a, w)| a * w).sum::<f64>();
        Ok(sigmoid(z))
    }
}

/// Mean regularized negative log-likelihood and its gradient at (w, b).
/// Exposed for the finite-difference check in the tests.
pub fn nll_and_gradient(
    xs: &[Vec<f64>],
    labels: &[bool],
    weights: &[f64],
    bias: f64,
    l2: f64,
) -> (f64, Vec<f64>, f64) {
    let n = xs.len() as f64;
    let mut loss = 0.0;
    let mut grad_w = vec![0.0; weights.len()];
    let mut grad_b = 0.0;
    for (x, y) in xs.iter().zip(labels) {
        let z: f64 = bias + x.iter().zip(weights).map(|(a, w)| a * w).sum::<f64>();
        let p = sigmoid(z);
        let y = f64::from(*y);
        // clamp away from 0/1 to keep the loss finite on separable data
        let p_safe = p.clamp(1e-12, 1.0 - 1e-12);
        loss -= y * p_safe.ln() + (1.0 - y) * (1.0 - p_safe).ln();
        let err = p - y;
        for (g, a) in grad_w.iter_mut().zip(x) {
            *g += err * a;
        }
        grad_b += err;
    }
    loss /= n;
    for (g, w) in grad_w.iter_mut().zip(weights) {
        *g = *g / n + l2 * w;
    }
    grad_b /= n;
    loss += 0.5 * l2 * weights.iter().map(|w| w * w).sum::<f64>();
    (loss, grad_w, grad_b)
}

/// Trains the baseline. Zero epochs leave all coefficients at zero, so
/// every prediction is exactly 0.5.
pub fn train_logistic(data: &TrainData, params: LogisticParams) -> Result<LinearModel> {
    if data.is_empty() {
        return Err(Error::EmptyTrainingSet);
    }
    let encoder = Encoder::fit(data);
    let xs: Vec<Vec<f64>> = data
        .features
        .iter()
        .map(|f| encoder.encode(f))
        .collect::<Result<_>>()?;
    let mut weights = vec![0.0; encoder.width()];
    let mut bias = 0.0;
    for _ in 0..params.epochs {
        let (_, grad_w, grad_b) = nll_and_gradient(&xs, &data.labels, &weights, bias, params.l2);
        for (w, g) in weights.iter_mut().zip(&grad_w) {
            *w -= params.learning_rate * g;
        }
        bias -= params.learning_rate * grad_b;
    }
    Ok(LinearModel {
        encoder,
        weights,
        bias,
    })
}
