//! Load a timestamped edge list, freeze a snapshot at a cutoff, and pull
//! the new pairs of the observation window.
//!
//! Run with: `cargo run --example build_snapshot`

use std::io::Cursor;

use linkpred::graph::{load_edge_list, snapshot_at, window_edges, VertexId};

const EDGES: &str = "\
# u v t  (one contact per line; '#' lines are comments)
1 2 10
1 3 12
2 3 15
2 4 20
3 4 22
4 4 23
2 5 31
4 5 33
1 4 35
";

fn main() -> linkpred::Result<()> {
    let graph = load_edge_list(Cursor::new(EDGES))?;
    println!(
        "loaded {} temporal edges over {} vertices ({} self-loop dropped)",
        graph.temporal_edge_count(),
        graph.vertex_count(),
        graph.dropped_self_loops()
    );

    // Everything up to t0 = 25 is the observed topology.
    let t0 = 25;
    let snap = snapshot_at(&graph, t0);
    println!(
        "\nsnapshot at t0={t0}: {} vertices, {} unique edges, max degree {}",
        snap.vertex_count(),
        snap.edge_count(),
        snap.max_degree()
    );
    for u in snap.vertices() {
        let neighbors: Vec<String> = snap.neighbors(u)?.map(|v| v.to_string()).collect();
        println!("  neighbors({u}) = [{}]", neighbors.join(", "));
    }
    println!(
        "  has_edge(1, 4) at t0 = {}",
        snap.has_edge(VertexId(1), VertexId(4))?
    );

    // Pairs first seen in (t0, t_end] are the prediction targets.
    let window = window_edges(&graph, &snap, t0, 40)?;
    println!(
        "\nobservation window ({}, {}]: {} new pair(s)",
        window.t_start(),
        window.t_end(),
        window.new_edge_count()
    );
    for (u, v) in window.new_edges() {
        println!("  new link {u} - {v}");
    }
    Ok(())
}
