//! The two-phase ranking walkthrough: retrieve seeds above a locality
//! threshold, then rank the seeds' neighborhoods by a global feature.
//!
//! Run with: `cargo run --example rank_candidates`

use linkpred::features::{compute_global_features, jaccard};
use linkpred::graph::{snapshot_at, TemporalGraph, VertexId};
use linkpred::ranker::{predict_links, rank_candidates, retrieve_seeds, RankerConfig, Scoring};

fn main() -> linkpred::Result<()> {
    let edges: Vec<(u64, u64, i64)> = [(1, 2), (2, 3), (1, 3), (3, 4), (2, 5)]
        .iter()
        .map(|&(u, v)| (u, v, 1))
        .collect();
    let graph = TemporalGraph::from_edges(&edges);
    let snap = snapshot_at(&graph, 10);
    let feats = compute_global_features(&snap, 1e-10, 1000)?;

    let user = VertexId(1);
    println!("query vertex {user}; neighbors and their Jaccard scores:");
    for v in snap.neighbors(user)?.collect::<Vec<_>>() {
        println!("  jaccard({user}, {v}) = {:.4}", jaccard(&snap, user, v)?);
    }

    let th = 0.2;
    let seeds = retrieve_seeds(&snap, user, th)?;
    println!(
        "\nseeds at threshold {th}: [{}]",
        seeds
            .iter()
            .map(|s| s.to_string())
            .collect::<Vec<_>>()
            .join(", ")
    );

    let cfg = RankerConfig {
        th,
        k: 10,
        scoring: Scoring::Authority,
    };
    let ranked = rank_candidates(&snap, &feats, user, &seeds, &cfg)?;
    println!("\nrank  candidate  score      via_seeds");
    for (i, c) in ranked.iter().enumerate() {
        println!(
            "{:>4}  {:>9}  {:<9.4}  {}",
            i + 1,
            c.vertex,
            c.score,
            c.via_seed_count
        );
    }

    // Batch mode over every vertex; failures (unknown ids) never abort.
    let users: Vec<VertexId> = snap.vertices().chain([VertexId(99)]).collect();
    let batch = predict_links(&snap, &feats, &users, &cfg)?;
    println!("\nbatch run over {} users:", users.len());
    for r in &batch.results {
        println!(
            "  user {}: {} seed(s), {} candidate(s) before truncation",
            r.user, r.seed_count, r.candidate_count
        );
    }
    for (user, err) in &batch.failures {
        println!("  user {user} skipped: {err}");
    }
    Ok(())
}
