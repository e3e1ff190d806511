//! From-scratch binary classifiers (Gaussian naive Bayes, logistic
//! regression, an information-gain decision tree with pessimistic-error
//! pruning), information-gain feature ranking, and stratified k-fold
//! cross-validation.
//!
//! The decision threshold is fixed at 0.5; the continuous score (the
//! probability of the `real` class) feeds the ROC/PRC columns.

mod logistic;
mod nb;
mod tree;

pub use logistic::LogisticModel;
pub use nb::NbModel;
pub use tree::TreeModel;

use std::io::{Read, Write};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dataset::{Dataset, Label, FEATURE_NAMES};
use crate::error::{Error, Result};
use crate::metrics::{build_report, MetricsReport};

/// Solver selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variant {
    GaussianNb,
    Logistic,
    Tree,
}

impl Variant {
    pub fn as_str(&self) -> &'static str {
        match self {
            Variant::GaussianNb => "nb",
            Variant::Logistic => "logistic",
            Variant::Tree => "tree",
        }
    }

    pub fn parse(text: &str) -> Option<Variant> {
        match text {
            "nb" => Some(Variant::GaussianNb),
            "logistic" => Some(Variant::Logistic),
            "tree" => Some(Variant::Tree),
            _ => None,
        }
    }
}

/// A trained model of any variant, serializable as tagged JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "snake_case")]
pub enum Model {
    GaussianNb(NbModel),
    Logistic(LogisticModel),
    Tree(TreeModel),
}

impl Model {
    pub fn variant(&self) -> Variant {
        match self {
            Model::GaussianNb(_) => Variant::GaussianNb,
            Model::Logistic(_) => Variant::Logistic,
            Model::Tree(_) => Variant::Tree,
        }
    }

    pub fn n_features(&self) -> usize {
        match self {
            Model::GaussianNb(m) => m.n_features(),
            Model::Logistic(m) => m.n_features(),
            Model::Tree(m) => m.n_features(),
        }
    }

    pub fn save_json<W: Write>(&self, w: W) -> Result<()> {
        serde_json::to_writer_pretty(w, self)?;
        Ok(())
    }

    pub fn load_json<R: Read>(r: R) -> Result<Model> {
        Ok(serde_json::from_reader(r)?)
    }
}

/// One scored prediction; `label` is `Real` exactly when `score >= 0.5`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Prediction {
    pub label: Label,
    /// Probability of the `real` class.
    pub score: f64,
}

impl Prediction {
    fn from_score(score: f64) -> Prediction {
        Prediction {
            label: if score >= 0.5 {
                Label::Real
            } else {
                Label::False
            },
            score,
        }
    }
}

/// Decision tree hyperparameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TreeConfig {
    pub min_leaf: usize,
    pub max_depth: Option<usize>,
    /// Confidence for the pessimistic error bound; smaller prunes harder.
    pub pruning_confidence: f64,
    pub prune: bool,
}

impl Default for TreeConfig {
    fn default() -> Self {
        TreeConfig {
            min_leaf: 2,
            max_depth: None,
            pruning_confidence: 0.25,
            prune: true,
        }
    }
}

/// Logistic regression hyperparameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogisticConfig {
    pub learning_rate: f64,
    pub epochs: usize,
    pub l2: f64,
}

impl Default for LogisticConfig {
    fn default() -> Self {
        LogisticConfig {
            learning_rate: 0.1,
            epochs: 200,
            l2: 1e-4,
        }
    }
}

/// Gaussian naive Bayes hyperparameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NbConfig {
    pub variance_floor: f64,
}

impl Default for NbConfig {
    fn default() -> Self {
        NbConfig {
            variance_floor: 1e-9,
        }
    }
}

/// Hyperparameters for all solvers plus the fold-assignment seed.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct TrainConfig {
    pub tree: TreeConfig,
    pub logistic: LogisticConfig,
    pub nb: NbConfig,
    pub rng_seed: u64,
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("tree.min_leaf", self.tree.min_leaf as f64),
            ("tree.pruning_confidence", self.tree.pruning_confidence),
            ("logistic.learning_rate", self.logistic.learning_rate),
            ("nb.variance_floor", self.nb.variance_floor),
        ];
        for (name, value) in positive {
            if !value.is_finite() || value <= 0.0 {
                return Err(Error::InvalidArgument(format!(
                    "{name} must be positive, got {value}"
                )));
            }
        }
        if self.tree.pruning_confidence >= 0.5 {
            return Err(Error::InvalidArgument(
                "tree.pruning_confidence must be below 0.5".into(),
            ));
        }
        Ok(())
    }
}

fn class_counts(instances: &[&crate::dataset::LabeledInstance]) -> (usize, usize) {
    let real = instances.iter().filter(|i| i.label == Label::Real).count();
    (real, instances.len() - real)
}

fn check_class_minimum(
    instances: &[&crate::dataset::LabeledInstance],
    minimum: usize,
    variant: Variant,
) -> Result<()> {
    let (real, false_) = class_counts(instances);
    if real < minimum || false_ < minimum {
        return Err(Error::Training(format!(
            "{} requires at least {minimum} instance(s) per class (got real={real}, false={false_})",
            variant.as_str()
        )));
    }
    Ok(())
}

/// Trains one solver on the whole dataset.
pub fn train(ds: &Dataset, cfg: &TrainConfig, variant: Variant) -> Result<Model> {
    let refs: Vec<&crate::dataset::LabeledInstance> = ds.instances.iter().collect();
    train_on(&refs, cfg, variant)
}

fn train_on(
    instances: &[&crate::dataset::LabeledInstance],
    cfg: &TrainConfig,
    variant: Variant,
) -> Result<Model> {
    cfg.validate()?;
    match variant {
        Variant::GaussianNb => {
            check_class_minimum(instances, 2, variant)?;
            Ok(Model::GaussianNb(nb::fit(instances, &cfg.nb)))
        }
        Variant::Logistic => {
            check_class_minimum(instances, 2, variant)?;
            Ok(Model::Logistic(logistic::fit(instances, &cfg.logistic)))
        }
        Variant::Tree => {
            check_class_minimum(instances, 1, variant)?;
            Ok(Model::Tree(tree::fit(instances, &cfg.tree)))
        }
    }
}

/// Scores one feature vector with a trained model.
pub fn predict(model: &Model, features: &[f64]) -> Result<Prediction> {
    if features.len() != model.n_features() {
        return Err(Error::InvalidArgument(format!(
            "expected {} features, got {}",
            model.n_features(),
            features.len()
        )));
    }
    let score = match model {
        Model::GaussianNb(m) => m.score(features),
        Model::Logistic(m) => m.score(features),
        Model::Tree(m) => m.score(features),
    };
    Ok(Prediction::from_score(score))
}

/// Information gain (bits) of one feature for the label, after
/// equal-frequency discretization into `bins` bins with ties grouped.
pub fn info_gain(ds: &Dataset, feature_index: usize, bins: usize) -> Result<f64> {
    if ds.is_empty() {
        return Err(Error::InvalidArgument(
            "info gain requires a nonempty dataset".into(),
        ));
    }
    if bins < 2 {
        return Err(Error::InvalidArgument("bins must be at least 2".into()));
    }
    if feature_index >= FEATURE_NAMES.len() {
        return Err(Error::InvalidArgument(format!(
            "feature index {feature_index} out of range"
        )));
    }

    let n = ds.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        ds.instances[a].features[feature_index].total_cmp(&ds.instances[b].features[feature_index])
    });
    let value = |rank: usize| ds.instances[order[rank]].features[feature_index];

    // Ideal equal-frequency boundaries, shifted right past ties so equal
    // values never straddle a bin edge.
    let mut boundaries = Vec::new();
    for b in 1..bins {
        let mut cut = b * n / bins;
        while cut > 0 && cut < n && value(cut) == value(cut - 1) {
            cut += 1;
        }
        if cut > 0 && cut < n {
            boundaries.push(cut);
        }
    }
    boundaries.dedup();

    let real_total = ds
        .instances
        .iter()
        .filter(|i| i.label == Label::Real)
        .count();
    let h_label = entropy2(real_total, n - real_total);

    let mut conditional = 0.0;
    let mut start = 0;
    for &end in boundaries.iter().chain(std::iter::once(&n)) {
        let seg_real = order[start..end]
            .iter()
            .filter(|&&i| ds.instances[i].label == Label::Real)
            .count();
        let seg_len = end - start;
        conditional += seg_len as f64 / n as f64 * entropy2(seg_real, seg_len - seg_real);
        start = end;
    }

    Ok(h_label - conditional)
}

fn entropy2(a: usize, b: usize) -> f64 {
    let n = (a + b) as f64;
    if n == 0.0 {
        return 0.0;
    }
    let mut h = 0.0;
    for count in [a, b] {
        if count > 0 {
            let p = count as f64 / n;
            h -= p * p.log2();
        }
    }
    h
}

/// Information gain of all six features, sorted descending; ties keep the
/// column order.
pub fn rank_features(ds: &Dataset, bins: usize) -> Result<Vec<(String, f64)>> {
    let mut gains = Vec::with_capacity(FEATURE_NAMES.len());
    for (i, name) in FEATURE_NAMES.iter().enumerate() {
        gains.push((name.to_string(), info_gain(ds, i, bins)?));
    }
    gains.sort_by(|a, b| b.1.total_cmp(&a.1));
    Ok(gains)
}

/// Stratified k-fold cross-validation: trains on k−1 folds, predicts the
/// held-out fold, pools predictions across folds (fold order, ascending
/// instance index within a fold), and builds one report.
pub fn cross_validate(
    ds: &Dataset,
    cfg: &TrainConfig,
    variant: Variant,
    k: usize,
    rng_seed: u64,
) -> Result<MetricsReport> {
    cfg.validate()?;
    if k < 2 {
        return Err(Error::InvalidArgument("k must be at least 2".into()));
    }
    let (real, false_) = ds.class_counts();
    if real < k || false_ < k {
        return Err(Error::InvalidArgument(format!(
            "each class needs at least k={k} instances (got real={real}, false={false_})"
        )));
    }

    // Stratified assignment: shuffle each class, then deal round-robin.
    let mut fold_of = vec![0usize; ds.len()];
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    for label in [Label::Real, Label::False] {
        let mut idx: Vec<usize> = (0..ds.len())
            .filter(|&i| ds.instances[i].label == label)
            .collect();
        idx.shuffle(&mut rng);
        for (pos, &i) in idx.iter().enumerate() {
            fold_of[i] = pos % k;
        }
    }

    let fold_outputs: Vec<Result<Vec<(f64, Label, Label)>>> = (0..k)
        .into_par_iter()
        .map(|fold| {
            let train_set: Vec<&crate::dataset::LabeledInstance> = ds
                .instances
                .iter()
                .enumerate()
                .filter(|(i, _)| fold_of[*i] != fold)
                .map(|(_, inst)| inst)
                .collect();
            let model = train_on(&train_set, cfg, variant)?;
            let mut out = Vec::new();
            for (i, inst) in ds.instances.iter().enumerate() {
                if fold_of[i] == fold {
                    let p = predict(&model, &inst.features)?;
                    out.push((p.score, p.label, inst.label));
                }
            }
            Ok(out)
        })
        .collect();

    let mut scores = Vec::with_capacity(ds.len());
    let mut preds = Vec::with_capacity(ds.len());
    let mut actual = Vec::with_capacity(ds.len());
    for fold in fold_outputs {
        for (s, p, a) in fold? {
            scores.push(s);
            preds.push(p);
            actual.push(a);
        }
    }
    build_report(&scores, &preds, &actual)
}

/// Effect of tree pruning on pooled cross-validation F-measure.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct PruningEffect {
    pub weighted_f_pruned: f64,
    pub weighted_f_unpruned: f64,
    /// `pruned − unpruned`; negative when pruning costs F-measure.
    pub f_delta: f64,
    pub nodes_pruned: usize,
    pub nodes_unpruned: usize,
}

/// Compares pruned and unpruned trees under the same folds and reports
/// the weighted F-measure delta and node counts.
pub fn tree_pruning_effect(
    ds: &Dataset,
    cfg: &TrainConfig,
    k: usize,
    rng_seed: u64,
) -> Result<PruningEffect> {
    let mut pruned_cfg = *cfg;
    pruned_cfg.tree.prune = true;
    let mut raw_cfg = *cfg;
    raw_cfg.tree.prune = false;

    let pruned = cross_validate(ds, &pruned_cfg, Variant::Tree, k, rng_seed)?;
    let unpruned = cross_validate(ds, &raw_cfg, Variant::Tree, k, rng_seed)?;

    let count_nodes = |cfg: &TrainConfig| -> Result<usize> {
        match train(ds, cfg, Variant::Tree)? {
            Model::Tree(t) => Ok(t.node_count()),
            _ => unreachable!(),
        }
    };

    Ok(PruningEffect {
        weighted_f_pruned: pruned.weighted_f_measure(),
        weighted_f_unpruned: unpruned.weighted_f_measure(),
        f_delta: pruned.weighted_f_measure() - unpruned.weighted_f_measure(),
        nodes_pruned: count_nodes(&pruned_cfg)?,
        nodes_unpruned: count_nodes(&raw_cfg)?,
    })
}


#[cfg(test)]
mod tests {
    use super::test_support::{dataset_from_rows, single_feature};
    use super::*;
    use Label::{False as F, Real as R};

    fn separable_dataset(n_per_class: usize) -> Dataset {
        let mut rows = Vec::new();
        for i in 0..n_per_class {
            let jitter = i as f64 * 1e-3;
            rows.push((single_feature(0, 1.0 + jitter), R));
            rows.push((single_feature(0, -1.0 - jitter), F));
        }
        dataset_from_rows(&rows)
    }

    #[test]
    fn info_gain_constant_feature_is_zero() {
        let ds = dataset_from_rows(&[
            (single_feature(0, 1.0), R),
            (single_feature(0, 1.0), R),
            (single_feature(0, 1.0), F),
            (single_feature(0, 1.0), F),
        ]);
        assert_eq!(info_gain(&ds, 0, 2).unwrap(), 0.0);
    }

    #[test]
    fn info_gain_perfect_separation_is_one_bit() {
        let ds = separable_dataset(4);
        assert!((info_gain(&ds, 0, 2).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn info_gain_interleaved_bins_is_zero() {
        // Frozen from the exhaustive entropy oracle: bins {0.1, 0.2} and
        // {0.8, 0.9} each hold one real and one false.
        let ds = dataset_from_rows(&[
            (single_feature(0, 0.1), R),
            (single_feature(0, 0.8), R),
            (single_feature(0, 0.2), F),
            (single_feature(0, 0.9), F),
        ]);
        assert!(info_gain(&ds, 0, 2).unwrap().abs() < 1e-12);
    }

    #[test]
    fn info_gain_bounds() {
        let ds = separable_dataset(6);
        for bins in [2, 3, 5, 10] {
            for f in 0..6 {
                let g = info_gain(&ds, f, bins).unwrap();
                assert!((0.0..=1.0 + 1e-12).contains(&g), "gain {g} out of bounds");
            }
        }
    }

    #[test]
    fn info_gain_rejects_bad_arguments() {
        let ds = separable_dataset(2);
        assert!(info_gain(&ds, 0, 1).is_err());
        assert!(info_gain(&ds, 9, 2).is_err());
        let empty = dataset_from_rows(&[]);
        assert!(info_gain(&empty, 0, 2).is_err());
    }

    #[test]
    fn rank_features_finds_planted_column() {
        // Label depends only on authority2 (column 1).
        let mut rows = Vec::new();
        for i in 0..20 {
            let x = i as f64 / 20.0;
            let label = if x >= 0.5 { R } else { F };
            let mut f = [0.3; 6];
            f[1] = x;
            rows.push((f, label));
        }
        let ds = dataset_from_rows(&rows);
        let ranked = rank_features(&ds, 4).unwrap();
        assert_eq!(ranked[0].0, "authority2");
        assert!(ranked[0].1 > 0.9);
    }

    #[test]
    fn rank_features_all_constant() {
        let ds = dataset_from_rows(&[([0.5; 6], R), ([0.5; 6], R), ([0.5; 6], F), ([0.5; 6], F)]);
        let ranked = rank_features(&ds, 3).unwrap();
        assert!(ranked.iter().all(|(_, g)| *g == 0.0));
        let names: Vec<&str> = ranked.iter().map(|(n, _)| n.as_str()).collect();
        assert_eq!(names, FEATURE_NAMES.to_vec());
    }

    #[test]
    fn all_variants_fit_separable_data() {
        let ds = separable_dataset(8);
        let cfg = TrainConfig::default();
        for variant in [Variant::GaussianNb, Variant::Logistic, Variant::Tree] {
            let model = train(&ds, &cfg, variant).unwrap();
            let correct = ds
                .instances
                .iter()
                .filter(|i| predict(&model, &i.features).unwrap().label == i.label)
                .count();
            assert_eq!(correct, ds.len(), "variant {variant:?}");
        }
    }

    #[test]
    fn training_rejects_single_class() {
        let ds = dataset_from_rows(&[
            (single_feature(0, 1.0), R),
            (single_feature(0, 2.0), R),
            (single_feature(0, 3.0), R),
        ]);
        let cfg = TrainConfig::default();
        for variant in [Variant::GaussianNb, Variant::Logistic, Variant::Tree] {
            assert!(matches!(
                train(&ds, &cfg, variant).unwrap_err(),
                Error::Training(_)
            ));
        }
    }

    #[test]
    fn nb_and_logistic_need_two_per_class() {
        let ds = dataset_from_rows(&[
            (single_feature(0, 1.0), R),
            (single_feature(0, 2.0), R),
            (single_feature(0, -1.0), F),
        ]);
        let cfg = TrainConfig::default();
        assert!(train(&ds, &cfg, Variant::GaussianNb).is_err());
        assert!(train(&ds, &cfg, Variant::Logistic).is_err());
        assert!(train(&ds, &cfg, Variant::Tree).is_ok());
    }

    #[test]
    fn predict_rejects_dimension_mismatch() {
        let ds = separable_dataset(3);
        let model = train(&ds, &TrainConfig::default(), Variant::Tree).unwrap();
        assert!(predict(&model, &[0.0; 4]).is_err());
    }

    #[test]
    fn model_json_round_trip() {
        let ds = separable_dataset(5);
        let cfg = TrainConfig::default();
        for variant in [Variant::GaussianNb, Variant::Logistic, Variant::Tree] {
            let model = train(&ds, &cfg, variant).unwrap();
            let mut buf = Vec::new();
            model.save_json(&mut buf).unwrap();
            let back = Model::load_json(buf.as_slice()).unwrap();
            assert_eq!(model, back);
        }
    }

    #[test]
    fn cross_validation_perfect_on_separable_data() {
        let ds = separable_dataset(20);
        let cfg = TrainConfig::default();
        for variant in [Variant::GaussianNb, Variant::Logistic, Variant::Tree] {
            let report = cross_validate(&ds, &cfg, variant, 5, 7).unwrap();
            assert!(
                (report.weighted_f_measure() - 1.0).abs() < 1e-12,
                "variant {variant:?} F = {}",
                report.weighted_f_measure()
            );
        }
    }

    #[test]
    fn cross_validation_is_deterministic() {
        let ds = separable_dataset(15);
        let cfg = TrainConfig::default();
        let a = cross_validate(&ds, &cfg, Variant::Tree, 5, 3).unwrap();
        let b = cross_validate(&ds, &cfg, Variant::Tree, 5, 3).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn cross_validation_rejects_small_classes() {
        let ds = separable_dataset(3);
        let err = cross_validate(&ds, &TrainConfig::default(), Variant::Tree, 5, 1).unwrap_err();
        assert!(matches!(err, Error::InvalidArgument(_)));
    }

    #[test]
    fn random_labels_give_chance_level_roc() {
        // Labels are assigned independently of the features.
        let mut rows = Vec::new();
        let mut x = 0x2545f4914f6cdd1du64;
        for _ in 0..1000 {
            x ^= x << 13;
            x ^= x >> 7;
            x ^= x << 17;
            let feature = (x >> 11) as f64 / (1u64 << 53) as f64;
            x ^= x << 13;
            x ^= x >> 7;
            x ^= x << 17;
            let label = if x & 1 == 0 { R } else { F };
            rows.push((single_feature(1, feature), label));
        }
        let ds = dataset_from_rows(&rows);
        let report = cross_validate(&ds, &TrainConfig::default(), Variant::Tree, 5, 11).unwrap();
        assert!(
            (report.real_row.roc_area - 0.5).abs() < 0.05,
            "ROC {} should be near chance",
            report.real_row.roc_area
        );
    }

    #[test]
    fn tree_beats_logistic_on_xor() {
        // XOR labels with slightly unbalanced quadrants: a perfectly
        // balanced XOR gives every axis split exactly zero gain, so a
        // greedy learner could not even start.
        let mut rows = Vec::new();
        for (a, b, count) in [(0, 0, 14), (0, 1, 10), (1, 0, 12), (1, 1, 8)] {
            let label = if a != b { R } else { F };
            for _ in 0..count {
                let mut f = [0.0; 6];
                f[0] = a as f64;
                f[1] = b as f64;
                rows.push((f, label));
            }
        }
        let ds = dataset_from_rows(&rows);
        let cfg = TrainConfig::default();

        let tree = train(&ds, &cfg, Variant::Tree).unwrap();
        let logistic = train(&ds, &cfg, Variant::Logistic).unwrap();
        let accuracy = |m: &Model| {
            ds.instances
                .iter()
                .filter(|i| predict(m, &i.features).unwrap().label == i.label)
                .count() as f64
                / ds.len() as f64
        };
        let tree_acc = accuracy(&tree);
        let logistic_acc = accuracy(&logistic);
        assert_eq!(tree_acc, 1.0);
        assert!(logistic_acc <= 0.75, "logistic acc {logistic_acc}");
    }

    #[test]
    fn pruning_effect_reports_node_counts() {
        // Noisy labels so the unpruned tree overfits and pruning bites.
        let mut rows = Vec::new();
        let mut x = 0x9e3779b97f4a7c15u64;
        for i in 0..200 {
            x ^= x << 13;
            x ^= x >> 7;
            x ^= x << 17;
            let v = (x >> 11) as f64 / (1u64 << 53) as f64;
            let noise = x.is_multiple_of(10);
            let label = if (v > 0.5) ^ noise { R } else { F };
            rows.push((single_feature(0, v + i as f64 * 1e-9), label));
        }
        let ds = dataset_from_rows(&rows);
        let effect = tree_pruning_effect(&ds, &TrainConfig::default(), 5, 21).unwrap();
        assert!(effect.nodes_pruned <= effect.nodes_unpruned);
        assert!(effect.f_delta.is_finite());
    }
}
