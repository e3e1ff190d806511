//! Binary decision tree with information-gain splits and C4.5-style
//! pessimistic-error pruning.
//!
//! Split thresholds are midpoints between consecutive distinct sorted
//! feature values, so a threshold always lies strictly between observed
//! values. Leaf scores use Laplace smoothing: `(real + 1) / (n + 2)`.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::dataset::{Label, LabeledInstance};

use super::TreeConfig;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum TreeNode {
    Leaf {
        real_count: usize,
        false_count: usize,
    },
    Split {
        feature: usize,
        threshold: f64,
        real_count: usize,
        false_count: usize,
        left: Box<TreeNode>,
        right: Box<TreeNode>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TreeModel {
    pub root: TreeNode,
    pub n_features: usize,
}

pub(super) fn fit(instances: &[&LabeledInstance], cfg: &TreeConfig) -> TreeModel {
    let n_features = instances[0].features.len();
    let idx: Vec<usize> = (0..instances.len()).collect();
    let mut root = grow(instances, &idx, cfg, 0, n_features);
    if cfg.prune {
        let z = Normal::standard().inverse_cdf(1.0 - cfg.pruning_confidence);
        prune(&mut root, z);
    }
    TreeModel { root, n_features }
}

fn counts_of(instances: &[&LabeledInstance], idx: &[usize]) -> (usize, usize) {
    let real = idx
        .iter()
        .filter(|&&i| instances[i].label == Label::Real)
        .count();
    (real, idx.len() - real)
}

fn entropy(real: usize, false_: usize) -> f64 {
    let n = (real + false_) as f64;
    let mut h = 0.0;
    for c in [real, false_] {
        if c > 0 {
            let p = c as f64 / n;
            h -= p * p.log2();
        }
    }
    h
}

struct BestSplit {
    gain: f64,
    feature: usize,
    threshold: f64,
}

fn grow(
    instances: &[&LabeledInstance],
    idx: &[usize],
    cfg: &TreeConfig,
    depth: usize,
    n_features: usize,
) -> TreeNode {
    let (real_count, false_count) = counts_of(instances, idx);
    let leaf = TreeNode::Leaf {
        real_count,
        false_count,
    };
    if real_count == 0
        || false_count == 0
        || idx.len() < 2 * cfg.min_leaf
        || cfg.max_depth.is_some_and(|d| depth >= d)
    {
        return leaf;
    }

    let parent_entropy = entropy(real_count, false_count);
    let n = idx.len() as f64;
    let mut best: Option<BestSplit> = None;

    for feature in 0..n_features {
        let mut sorted: Vec<usize> = idx.to_vec();
        sorted.sort_by(|&a, &b| {
            instances[a].features[feature].total_cmp(&instances[b].features[feature])
        });
        let mut left_real = 0usize;
        for cut in 1..sorted.len() {
            if instances[sorted[cut - 1]].label == Label::Real {
                left_real += 1;
            }
            let prev = instances[sorted[cut - 1]].features[feature];
            let next = instances[sorted[cut]].features[feature];
            if prev == next {
                continue;
            }
            if cut < cfg.min_leaf || sorted.len() - cut < cfg.min_leaf {
                continue;
            }
            let left_false = cut - left_real;
            let right_real = real_count - left_real;
            let right_false = false_count - left_false;
            let cond = cut as f64 / n * entropy(left_real, left_false)
                + (sorted.len() - cut) as f64 / n * entropy(right_real, right_false);
            let gain = parent_entropy - cond;
            if gain > 1e-12 && best.as_ref().is_none_or(|b| gain > b.gain) {
                best = Some(BestSplit {
                    gain,
                    feature,
                    threshold: (prev + next) / 2.0,
                });
            }
        }
    }

    let Some(split) = best else {
        return leaf;
    };

    let (left_idx, right_idx): (Vec<usize>, Vec<usize>) = idx
        .iter()
        .partition(|&&i| instances[i].features[split.feature] <= split.threshold);
    TreeNode::Split {
        feature: split.feature,
        threshold: split.threshold,
        real_count,
        false_count,
        left: Box::new(grow(instances, &left_idx, cfg, depth + 1, n_features)),
        right: Box::new(grow(instances, &right_idx, cfg, depth + 1, n_features)),
    }
}

/// Pessimistic error count: the upper confidence bound of the binomial
/// error rate at `e` errors out of `n`, scaled back to a count.
fn pessimistic_errors(e: usize, n: usize, z: f64) -> f64 {
    let nf = n as f64;
    let f = e as f64 / nf;
    let z2 = z * z;
    let upper = (f + z2 / (2.0 * nf) + z * (f / nf - f * f / nf + z2 / (4.0 * nf * nf)).sqrt())
        / (1.0 + z2 / nf);
    upper * nf
}

/// Bottom-up subtree replacement: a node becomes a leaf when its
/// pessimistic error as a leaf does not exceed the sum over its subtree's
/// leaves. Returns the pessimistic error of the (possibly replaced) node.
fn prune(node: &mut TreeNode, z: f64) -> f64 {
    match node {
        TreeNode::Leaf {
            real_count,
            false_count,
        } => {
            let n = *real_count + *false_count;
            pessimistic_errors((*real_count).min(*false_count), n, z)
        }
        TreeNode::Split {
            real_count,
            false_count,
            left,
            right,
            ..
        } => {
            let subtree = prune(left, z) + prune(right, z);
            let n = *real_count + *false_count;
            let as_leaf = pessimistic_errors((*real_count).min(*false_count), n, z);
            if as_leaf <= subtree + 1e-9 {
                let replacement = TreeNode::Leaf {
                    real_count: *real_count,
                    false_count: *false_count,
                };
                *node = replacement;
                as_leaf
            } else {
                subtree
            }
        }
    }
}

impl TreeModel {
    pub fn n_features(&self) -> usize {
        self.n_features
    }

    pub fn node_count(&self) -> usize {
        fn count(node: &TreeNode) -> usize {
            match node {
                TreeNode::Leaf { .. } => 1,
                TreeNode::Split { left, right, .. } => 1 + count(left) + count(right),
            }
        }
        count(&self.root)
    }

    pub fn depth(&self) -> usize {
        fn depth(node: &TreeNode) -> usize {
            match node {
                TreeNode::Leaf { .. } => 0,
                TreeNode::Split { left, right, .. } => 1 + depth(left).max(depth(right)),
            }
        }
        depth(&self.root)
    }

    /// Laplace-smoothed probability of `real` at the reached leaf.
    pub fn score(&self, features: &[f64]) -> f64 {
        let mut node = &self.root;
        loop {
            match node {
                TreeNode::Leaf {
                    real_count,
                    false_count,
                } => {
                    return (*real_count as f64 + 1.0)
                        / ((*real_count + *false_count) as f64 + 2.0);
                }
                TreeNode::Split {
                    feature,
                    threshold,
                    left,
                    right,
                    ..
                } => {
                    node = if features[*feature] <= *threshold {
                        left
                    } else {
                        right
                    };
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::super::test_support::{dataset_from_rows, single_feature};
    use super::super::{predict, train, Model, TrainConfig, Variant};
    use super::*;
    use crate::dataset::Label::{False as F, Real as R};

    fn tree_of(ds: &crate::dataset::Dataset, cfg: &TrainConfig) -> TreeModel {
        match train(ds, cfg, Variant::Tree).unwrap() {
            Model::Tree(t) => t,
            _ => unreachable!(),
        }
    }

    #[test]
    fn threshold_lies_between_observed_values() {
        // Label flips at feature2 > 0.35; the split must land in
        // (0.3, 0.4), the gap between the extreme observed values.
        let ds = dataset_from_rows(&[
            (single_feature(2, 0.1), F),
            (single_feature(2, 0.2), F),
            (single_feature(2, 0.3), F),
            (single_feature(2, 0.4), R),
            (single_feature(2, 0.5), R),
            (single_feature(2, 0.6), R),
        ]);
        let tree = tree_of(&ds, &TrainConfig::default());
        match &tree.root {
            TreeNode::Split {
                feature, threshold, ..
            } => {
                assert_eq!(*feature, 2);
                assert!(*threshold > 0.3 && *threshold < 0.4);
            }
            other => panic!("expected a depth-1 split, got {other:?}"),
        }
        assert_eq!(tree.depth(), 1);
    }

    #[test]
    fn leaf_score_uses_laplace_smoothing() {
        let node = TreeNode::Leaf {
            real_count: 3,
            false_count: 1,
        };
        let model = TreeModel {
            root: node,
            n_features: 6,
        };
        assert!((model.score(&[0.0; 6]) - 4.0 / 6.0).abs() < 1e-12);
    }

    #[test]
    fn pure_node_is_a_leaf() {
        let ds = dataset_from_rows(&[
            (single_feature(0, 1.0), R),
            (single_feature(0, 2.0), R),
            (single_feature(0, -1.0), F),
            (single_feature(0, -2.0), F),
        ]);
        let tree = tree_of(&ds, &TrainConfig::default());
        assert_eq!(tree.node_count(), 3);
        for inst in &ds.instances {
            let model = Model::Tree(tree.clone());
            assert_eq!(predict(&model, &inst.features).unwrap().label, inst.label);
        }
    }

    #[test]
    fn max_depth_limits_growth() {
        let mut rows = Vec::new();
        for i in 0..32 {
            let label = if (i / 4) % 2 == 0 { R } else { F };
            rows.push((single_feature(0, i as f64), label));
        }
        let ds = dataset_from_rows(&rows);
        let mut cfg = TrainConfig::default();
        cfg.tree.max_depth = Some(2);
        cfg.tree.prune = false;
        let tree = tree_of(&ds, &cfg);
        assert!(tree.depth() <= 2);
    }

    #[test]
    fn pruning_never_grows_the_tree() {
        let mut rows = Vec::new();
        let mut x = 123456789u64;
        for _ in 0..120 {
            x ^= x << 13;
            x ^= x >> 7;
            x ^= x << 17;
            let v = (x >> 11) as f64 / (1u64 << 53) as f64;
            let label = if (v > 0.5) ^ x.is_multiple_of(5) {
                R
            } else {
                F
            };
            rows.push((single_feature(1, v), label));
        }
        let ds = dataset_from_rows(&rows);
        let mut pruned_cfg = TrainConfig::default();
        pruned_cfg.tree.prune = true;
        let mut raw_cfg = TrainConfig::default();
        raw_cfg.tree.prune = false;
        let pruned = tree_of(&ds, &pruned_cfg);
        let raw = tree_of(&ds, &raw_cfg);
        assert!(pruned.node_count() <= raw.node_count());
    }

    #[test]
    fn pessimistic_errors_increase_with_confidence_z() {
        let loose = pessimistic_errors(2, 10, 0.67448975);
        let tight = pessimistic_errors(2, 10, 1.6448536);
        assert!(loose > 2.0);
        assert!(tight > loose);
    }

    #[test]
    fn min_leaf_respected() {
        let ds = dataset_from_rows(&[(single_feature(0, 1.0), R), (single_feature(0, 2.0), F)]);
        // min_leaf 2 forbids any split of two instances.
        let tree = tree_of(&ds, &TrainConfig::default());
        assert_eq!(tree.node_count(), 1);
    }
}
