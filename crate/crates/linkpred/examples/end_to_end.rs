//! The full experiment in one program: generate a temporal graph with a
//! planted signal, freeze the cutoff snapshot, compute global features,
//! build threshold datasets at several locality thresholds, balance them,
//! and cross-validate the three solvers — showing the precision/recall
//! tradeoff the locality threshold controls.
//!
//! Run with: `cargo run --release --example end_to_end`

use linkpred::dataset::{active_users, balance, build_threshold_dataset};
use linkpred::features::compute_global_features;
use linkpred::graph::{snapshot_at, window_edges};
use linkpred::learners::{cross_validate, rank_features, TrainConfig, Variant};
use linkpred::ranker::{predict_links, RankerConfig};
use linkpred::synthgen::{generate, GenConfig};

fn main() -> linkpred::Result<()> {
    let gen = generate(&GenConfig {
        n: 4000,
        m_per_step: 3,
        t0_fraction: 0.998,
        triangle_prob: 0.8,
        window_edges: 3000,
        authority_bias: 3.0,
        locality_bias: 2.0,
        noise: 0.1,
        rng_seed: 1,
    })?;
    println!(
        "graph: {} vertices, {} edges; window holds {} planted pairs",
        gen.graph.vertex_count(),
        gen.graph.temporal_edge_count(),
        gen.planted_edges
    );

    let snap = snapshot_at(&gen.graph, gen.t0);
    let feats = compute_global_features(&snap, 1e-10, 1000)?;
    let window = window_edges(&gen.graph, &snap, gen.t0, gen.t_end)?;
    let active = active_users(&snap, &window, None);
    println!(
        "cutoff snapshot: {} edges; {} active users; {} window pairs\n",
        snap.edge_count(),
        active.len(),
        window.new_edge_count()
    );

    let cfg = TrainConfig::default();
    println!("th    seeds   candidates  real   false   tree_F  logistic_F  nb_F");
    for th in [0.1, 0.2, 0.3] {
        let batch = predict_links(&snap, &feats, &active, &RankerConfig::new(th, 10))?;
        let seeds: usize = batch.results.iter().map(|r| r.seed_count).sum();
        let candidates: usize = batch.results.iter().map(|r| r.candidate_count).sum();

        let ds = build_threshold_dataset(&snap, &window, &feats, th, 1)?;
        let (real, false_) = ds.class_counts();
        let balanced = balance(&ds, 1)?;

        let mut f_scores = Vec::new();
        for variant in [Variant::Tree, Variant::Logistic, Variant::GaussianNb] {
            let report = cross_validate(&balanced, &cfg, variant, 5, 1)?;
            f_scores.push(report.weighted_f_measure());
        }
        println!(
            "{th:<5} {seeds:<7} {candidates:<11} {real:<6} {false_:<7} {:<7.3} {:<11.3} {:<6.3}",
            f_scores[0], f_scores[1], f_scores[2]
        );
    }

    println!("\ninformation gain ranking at th = 0.1 (balanced dataset):");
    let ds = build_threshold_dataset(&snap, &window, &feats, 0.1, 1)?;
    let balanced = balance(&ds, 1)?;
    for (name, gain) in rank_features(&balanced, 10)? {
        println!("  {name:<14} {gain:.4}");
    }
    println!("\nthe candidate's authority dominates: exactly the signal the");
    println!("generator planted, recovered end to end from topology alone.");
    Ok(())
}
