//! Rank features by information gain, train the three solvers, and
//! compare their cross-validated reports.
//!
//! Run with: `cargo run --example train_and_evaluate`

use linkpred::dataset::{balance, build_threshold_dataset};
use linkpred::features::compute_global_features;
use linkpred::graph::{snapshot_at, window_edges};
use linkpred::learners::{
    cross_validate, predict, rank_features, train, tree_pruning_effect, Model, TrainConfig, Variant,
};
use linkpred::synthgen::{generate, GenConfig};

fn main() -> linkpred::Result<()> {
    let gen = generate(&GenConfig {
        n: 2000,
        m_per_step: 3,
        t0_fraction: 0.995,
        triangle_prob: 0.8,
        window_edges: 1500,
        authority_bias: 3.0,
        locality_bias: 2.0,
        noise: 0.1,
        rng_seed: 12,
    })?;
    let snap = snapshot_at(&gen.graph, gen.t0);
    let feats = compute_global_features(&snap, 1e-10, 1000)?;
    let window = window_edges(&gen.graph, &snap, gen.t0, gen.t_end)?;
    let ds = build_threshold_dataset(&snap, &window, &feats, 0.1, 12)?;
    let balanced = balance(&ds, 12)?;
    let (real, false_) = balanced.class_counts();
    println!("balanced dataset: {real} real / {false_} false\n");

    println!("information gain ranking (10 equal-frequency bins):");
    for (name, gain) in rank_features(&balanced, 10)? {
        println!("  {name:<14} {gain:.4}");
    }

    let cfg = TrainConfig::default();
    println!("\n5-fold cross-validation, weighted rows:");
    println!("solver    tp_rate  precision  recall   f_measure  mcc      roc_area");
    for variant in [Variant::GaussianNb, Variant::Logistic, Variant::Tree] {
        let report = cross_validate(&balanced, &cfg, variant, 5, 99)?;
        let w = &report.weighted_avg;
        println!(
            "{:<9} {:<8.3} {:<10.3} {:<8.3} {:<10.3} {:<8.3} {:<8.3}",
            variant.as_str(),
            w.tp_rate,
            w.precision,
            w.recall,
            w.f_measure,
            w.mcc,
            w.roc_area
        );
    }

    let effect = tree_pruning_effect(&balanced, &cfg, 5, 99)?;
    println!(
        "\npruning: {} -> {} nodes, weighted F changes by {:+.4}",
        effect.nodes_unpruned, effect.nodes_pruned, effect.f_delta
    );

    // Models serialize to tagged JSON and predict single instances.
    let model = train(&balanced, &cfg, Variant::Tree)?;
    let mut json = Vec::new();
    model.save_json(&mut json)?;
    let model = Model::load_json(json.as_slice())?;
    let example = &balanced.instances[0];
    let p = predict(&model, &example.features)?;
    println!(
        "\nsample instance ({}, {}): predicted {} with score {:.3} (actual {})",
        example.u,
        example.v,
        p.label.as_str(),
        p.score,
        example.label.as_str()
    );
    Ok(())
}
