//! Shared test fixtures and independent oracles.
//!
//! Everything here recomputes expected values from first principles with
//! hash sets and dense linear algebra, deliberately avoiding the library's
//! CSR/merge code paths.

use std::collections::{HashMap, HashSet, VecDeque};

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use linkpred::graph::{snapshot_at, Snapshot, TemporalGraph, VertexId};

/// Erdős–Rényi G(n, p) graph with ids 1..=n; every vertex is registered
/// (via a dropped self-loop) even when isolated.
pub fn gnp_graph(n: u64, p: f64, seed: u64) -> TemporalGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut raw: Vec<(u64, u64, i64)> = (1..=n).map(|i| (i, i, 0)).collect();
    for u in 1..=n {
        for v in (u + 1)..=n {
            if rng.gen::<f64>() < p {
                raw.push((u, v, 1));
            }
        }
    }
    TemporalGraph::from_edges(&raw)
}

pub fn snapshot_of(graph: &TemporalGraph) -> Snapshot {
    snapshot_at(graph, i64::MAX)
}

/// Adjacency sets keyed by external id, covering every snapshot vertex.
pub fn adjacency_sets(snap: &Snapshot) -> HashMap<u64, HashSet<u64>> {
    snap.vertices()
        .map(|u| {
            let set = snap.neighbors(u).unwrap().map(|v| v.0).collect();
            (u.0, set)
        })
        .collect()
}

pub fn jaccard_oracle(adj: &HashMap<u64, HashSet<u64>>, u: u64, v: u64) -> f64 {
    let a = &adj[&u];
    let b = &adj[&v];
    let inter = a.intersection(b).count();
    let union = a.union(b).count();
    if union == 0 {
        0.0
    } else {
        inter as f64 / union as f64
    }
}

pub fn degree_coeff_oracle(adj: &HashMap<u64, HashSet<u64>>, u: u64) -> f64 {
    let max_deg = adj.values().map(|s| s.len()).max().unwrap_or(0);
    if max_deg == 0 {
        0.0
    } else {
        adj[&u].len() as f64 / max_deg as f64
    }
}

pub fn transitivity_oracle(adj: &HashMap<u64, HashSet<u64>>, u: u64) -> f64 {
    let neigh: Vec<u64> = adj[&u].iter().copied().collect();
    let d = neigh.len();
    if d <= 1 {
        return 0.0;
    }
    let mut edges = 0;
    for i in 0..d {
        for j in (i + 1)..d {
            if adj[&neigh[i]].contains(&neigh[j]) {
                edges += 1;
            }
        }
    }
    edges as f64 / (d * (d - 1) / 2) as f64
}

/// Dominant eigenvector of the adjacency operator by dense power
/// iteration on A + I (the shift keeps the iteration convergent on any
/// connected graph without changing eigenvectors). Returns the
/// L2-normalized non-negative vector indexed like `ids`.
pub fn dense_authority_oracle(snap: &Snapshot) -> (Vec<u64>, Vec<f64>) {
    let ids: Vec<u64> = snap.vertices().map(|v| v.0).collect();
    let index: HashMap<u64, usize> = ids.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let n = ids.len();
    let mut a = vec![vec![0.0f64; n]; n];
    for (u, v) in snap.edges() {
        let (i, j) = (index[&u.0], index[&v.0]);
        a[i][j] = 1.0;
        a[j][i] = 1.0;
    }
    let mut x = vec![1.0 / (n as f64).sqrt(); n];
    let mut next = vec![0.0; n];
    for _ in 0..200_000 {
        for i in 0..n {
            let mut acc = x[i]; // the +I shift
            for j in 0..n {
                acc += a[i][j] * x[j];
            }
            next[i] = acc;
        }
        let norm = next.iter().map(|v| v * v).sum::<f64>().sqrt();
        for v in next.iter_mut() {
            *v /= norm;
        }
        let delta: f64 = x
            .iter()
            .zip(&next)
            .map(|(p, q)| (p - q) * (p - q))
            .sum::<f64>()
            .sqrt();
        std::mem::swap(&mut x, &mut next);
        if delta < 1e-14 {
            break;
        }
    }
    (ids, x)
}

pub fn cosine(a: &[f64], b: &[f64]) -> f64 {
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let na: f64 = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nb: f64 = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    dot / (na * nb)
}

/// True when all vertices that have edges form one connected component.
pub fn is_connected(snap: &Snapshot) -> bool {
    let with_edges: Vec<VertexId> = snap
        .vertices()
        .filter(|&v| snap.degree(v).unwrap() > 0)
        .collect();
    if with_edges.is_empty() {
        return false;
    }
    let mut seen = HashSet::new();
    let mut queue = VecDeque::from([with_edges[0]]);
    seen.insert(with_edges[0].0);
    while let Some(u) = queue.pop_front() {
        for v in snap.neighbors(u).unwrap() {
            if seen.insert(v.0) {
                queue.push_back(v);
            }
        }
    }
    with_edges.iter().all(|v| seen.contains(&v.0))
}

/// Two-coloring test over the non-isolated part.
pub fn is_bipartite(snap: &Snapshot) -> bool {
    let mut color: HashMap<u64, bool> = HashMap::new();
    for start in snap.vertices() {
        if color.contains_key(&start.0) || snap.degree(start).unwrap() == 0 {
            continue;
        }
        color.insert(start.0, false);
        let mut queue = VecDeque::from([start]);
        while let Some(u) = queue.pop_front() {
            let cu = color[&u.0];
            for v in snap.neighbors(u).unwrap() {
                match color.get(&v.0) {
                    None => {
                        color.insert(v.0, !cu);
                        queue.push_back(v);
                    }
                    Some(&cv) if cv == cu => return false, // odd cycle
                    _ => {}
                }
            }
        }
    }
    true
}
