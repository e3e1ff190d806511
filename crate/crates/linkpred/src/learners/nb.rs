//! Gaussian naive Bayes: class priors plus per-class per-feature mean and
//! (floored, population) variance; posteriors computed in log space.

use serde::{Deserialize, Serialize};

use crate::dataset::{Label, LabeledInstance};

use super::NbConfig;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassStats {
    pub prior: f64,
    pub means: Vec<f64>,
    pub variances: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NbModel {
    pub real: ClassStats,
    pub false_class: ClassStats,
}

pub(super) fn fit(instances: &[&LabeledInstance], cfg: &NbConfig) -> NbModel {
    let n_features = instances[0].features.len();
    let total = instances.len() as f64;
    let stats_for = |label: Label| {
        let class: Vec<&&LabeledInstance> = instances.iter().filter(|i| i.label == label).collect();
        let n = class.len() as f64;
        let mut means = vec![0.0; n_features];
        let mut variances = vec![0.0; n_features];
        for inst in &class {
            for (m, x) in means.iter_mut().zip(&inst.features) {
                *m += x;
            }
        }
        for m in means.iter_mut() {
            *m /= n;
        }
        for inst in &class {
            for f in 0..n_features {
                let d = inst.features[f] - means[f];
                variances[f] += d * d;
            }
        }
        for v in variances.iter_mut() {
            *v = (*v / n).max(cfg.variance_floor);
        }
        ClassStats {
            prior: n / total,
            means,
            variances,
        }
    };
    NbModel {
        real: stats_for(Label::Real),
        false_class: stats_for(Label::False),
    }
}

impl NbModel {
    pub fn n_features(&self) -> usize {
        self.real.means.len()
    }

    /// Posterior probability of the `real` class.
    pub fn score(&self, features: &[f64]) -> f64 {
        self.posteriors(features).0
    }

    /// `(P(real | x), P(false | x))`; the pair sums to 1.
    pub fn posteriors(&self, features: &[f64]) -> (f64, f64) {
        let log_real = log_likelihood(&self.real, features);
        let log_false = log_likelihood(&self.false_class, features);
        let max = log_real.max(log_false);
        let er = (log_real - max).exp();
        let ef = (log_false - max).exp();
        (er / (er + ef), ef / (er + ef))
    }
}

fn log_likelihood(stats: &ClassStats, features: &[f64]) -> f64 {
    let mut ll = stats.prior.ln();
    for ((x, m), v) in features.iter().zip(&stats.means).zip(&stats.variances) {
        ll += -0.5 * (2.0 * std::f64::consts::PI * v).ln() - (x - m) * (x - m) / (2.0 * v);
    }
    ll
}
