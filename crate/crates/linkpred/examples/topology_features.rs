//! Compute the local and global topology features on a small graph:
//! pairwise Jaccard, HITS authority, normalized degree, and transitivity.
//!
//! Run with: `cargo run --example topology_features`

use linkpred::features::{
    compute_global_features, feature_histogram, jaccard, FeatureColumn, ValueTransform,
};
use linkpred::graph::{snapshot_at, TemporalGraph, VertexId};

fn main() -> linkpred::Result<()> {
    // Two tight clusters bridged by vertex 4.
    let edges: Vec<(u64, u64, i64)> = [
        (1, 2),
        (1, 3),
        (2, 3),
        (2, 4),
        (3, 4),
        (4, 5),
        (4, 6),
        (5, 6),
        (5, 7),
        (6, 7),
    ]
    .iter()
    .map(|&(u, v)| (u, v, 1))
    .collect();
    let graph = TemporalGraph::from_edges(&edges);
    let snap = snapshot_at(&graph, 10);

    let table = compute_global_features(&snap, 1e-10, 1000)?;
    println!(
        "HITS converged in {} sweeps (residual {:.2e})\n",
        table.hits_iterations, table.hits_residual
    );
    println!("vertex  authority  degree_norm  transitivity");
    for (v, f) in table.iter() {
        println!(
            "{v:>6}  {:>9.4}  {:>11.4}  {:>12.4}",
            f.authority, f.degree_norm, f.transitivity
        );
    }

    println!("\npairwise Jaccard around the bridge:");
    for (u, v) in [(2, 3), (2, 5), (3, 6), (5, 6), (1, 7)] {
        println!(
            "  jaccard({u}, {v}) = {:.4}",
            jaccard(&snap, VertexId(u), VertexId(v))?
        );
    }

    let hist = feature_histogram(&table, FeatureColumn::Authority, 5, ValueTransform::Log1p)?;
    println!("\nlog(authority + 1) histogram (5 bins):");
    for (lower, count) in hist {
        println!("  >= {lower:.4}: {count}");
    }
    Ok(())
}
