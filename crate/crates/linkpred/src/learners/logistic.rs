//! L2-regularized logistic regression trained by full-batch gradient
//! descent on standardized features.
//!
//! The loss (mean cross-entropy plus `l2/2 · ||w||²`, bias excluded from
//! the penalty) must never increase across accepted steps: a step that
//! would increase it is retried with the rate halved, and the halving
//! count is recorded on the model.

use serde::{Deserialize, Serialize};

use crate::dataset::{Label, LabeledInstance};

use super::LogisticConfig;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogisticModel {
    pub weights: Vec<f64>,
    pub bias: f64,
    pub means: Vec<f64>,
    pub stds: Vec<f64>,
    pub lr_halvings: usize,
}

pub(super) fn fit(instances: &[&LabeledInstance], cfg: &LogisticConfig) -> LogisticModel {
    let n = instances.len();
    let n_features = instances[0].features.len();

    let mut means = vec![0.0; n_features];
    for inst in instances {
        for (m, x) in means.iter_mut().zip(&inst.features) {
            *m += x;
        }
    }
    for m in means.iter_mut() {
        *m /= n as f64;
    }
    let mut stds = vec![0.0; n_features];
    for inst in instances {
        for f in 0..n_features {
            let d = inst.features[f] - means[f];
            stds[f] += d * d;
        }
    }
    for s in stds.iter_mut() {
        *s = (*s / n as f64).sqrt();
        if *s == 0.0 {
            *s = 1.0;
        }
    }

    let x: Vec<Vec<f64>> = instances
        .iter()
        .map(|inst| {
            inst.features
                .iter()
                .zip(means.iter().zip(&stds))
                .map(|(v, (m, s))| (v - m) / s)
                .collect()
        })
        .collect();
    let y: Vec<f64> = instances
        .iter()
        .map(|inst| if inst.label == Label::Real { 1.0 } else { 0.0 })
        .collect();

    let mut weights = vec![0.0; n_features];
    let mut bias = 0.0;
    let mut lr = cfg.learning_rate;
    let mut lr_halvings = 0usize;
    let mut loss = loss_of(&x, &y, &weights, bias, cfg.l2);

    let mut epoch = 0;
    while epoch < cfg.epochs {
        let mut grad_w = vec![0.0; n_features];
        let mut grad_b = 0.0;
        for (xi, &yi) in x.iter().zip(&y) {
            let err = sigmoid(dot(&weights, xi) + bias) - yi;
            for (g, v) in grad_w.iter_mut().zip(xi) {
                *g += err * v;
            }
            grad_b += err;
        }
        for (g, w) in grad_w.iter_mut().zip(&weights) {
            *g = *g / n as f64 + cfg.l2 * w;
        }
        grad_b /= n as f64;

        let candidate_w: Vec<f64> = weights
            .iter()
            .zip(&grad_w)
            .map(|(w, g)| w - lr * g)
            .collect();
        let candidate_b = bias - lr * grad_b;
        let candidate_loss = loss_of(&x, &y, &candidate_w, candidate_b, cfg.l2);

        if candidate_loss > loss {
            lr /= 2.0;
            lr_halvings += 1;
            if lr < 1e-15 {
                break;
            }
            continue;
        }
        weights = candidate_w;
        bias = candidate_b;
        loss = candidate_loss;
        epoch += 1;
    }

    LogisticModel {
        weights,
        bias,
        means,
        stds,
        lr_halvings,
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// Mean cross-entropy plus the L2 penalty, computed in a saturation-safe
/// form: `ln(1 + e^z) - y·z = max(z, 0) - y·z + ln(1 + e^{-|z|})`.
fn loss_of(x: &[Vec<f64>], y: &[f64], w: &[f64], b: f64, l2: f64) -> f64 {
    let mut total = 0.0;
    for (xi, &yi) in x.iter().zip(y) {
        let z = dot(w, xi) + b;
        total += z.max(0.0) - yi * z + (-z.abs()).exp().ln_1p();
    }
    total / x.len() as f64 + 0.5 * l2 * w.iter().map(|v| v * v).sum::<f64>()
}

impl LogisticModel {
    pub fn n_features(&self) -> usize {
        self.weights.len()
    }

    pub fn score(&self, features: &[f64]) -> f64 {
        let z: f64 = features
            .iter()
            .zip(self.means.iter().zip(&self.stds))
            .zip(&self.weights)
            .map(|((x, (m, s)), w)| w * (x - m) / s)
            .sum::<f64>()
            + self.bias;
        sigmoid(z)
    }
}
