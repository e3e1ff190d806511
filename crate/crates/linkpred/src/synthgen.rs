//! Seedable synthetic temporal graphs: preferential-attachment growth
//! (with optional triangle closure for clustering) and a plantable
//! affinity signal in the observation window, plus the per-user and
//! per-step link count summaries.
//!
//! Planted pairs are drawn among old-vertex non-edges of the cutoff
//! snapshot with weight `(1 + √n·authority(target))^authority_bias ·
//! (1 + common_neighbors)^locality_bias` (authority and common neighbors
//! from the cutoff snapshot), or uniformly with probability `noise`.

use std::collections::HashSet;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::features::hits;
use crate::graph::{snapshot_at, Snapshot, TemporalGraph};
use crate::ranker::collect_candidates_internal;

/// Generator parameters.
#[derive(Debug, Clone, Copy)]
pub struct GenConfig {
    pub n: usize,
    /// Edges per arriving vertex; the growth starts from a clique on
    /// `m_per_step + 1` vertices.
    pub m_per_step: usize,
    /// Share of growth edges placed before the cutoff; the rest land in
    /// the observation window as organic new-vertex arrivals.
    pub t0_fraction: f64,
    /// Probability that a follow-up edge of an arriving vertex closes a
    /// triangle with the previous target instead of taking a fresh
    /// degree-weighted draw. Zero gives plain preferential attachment;
    /// higher values add the neighborhood overlap that locality-based
    /// retrieval needs.
    pub triangle_prob: f64,
    /// Number of planted window edges between old vertices.
    pub window_edges: usize,
    pub authority_bias: f64,
    pub locality_bias: f64,
    /// Probability that a planted edge ignores the biases and falls on a
    /// uniform non-edge.
    pub noise: f64,
    pub rng_seed: u64,
}

impl GenConfig {
    fn validate(&self) -> Result<()> {
        if self.m_per_step == 0 {
            return Err(Error::Generation("m_per_step must be at least 1".into()));
        }
        if self.n < self.m_per_step + 1 {
            return Err(Error::Generation(format!(
                "n ({}) must be at least m_per_step + 1 ({})",
                self.n,
                self.m_per_step + 1
            )));
        }
        if !(self.t0_fraction > 0.0 && self.t0_fraction < 1.0) {
            return Err(Error::Generation(format!(
                "t0_fraction must be in (0, 1), got {}",
                self.t0_fraction
            )));
        }
        if !(0.0..=1.0).contains(&self.noise) {
            return Err(Error::Generation(format!(
                "noise must be in [0, 1], got {}",
                self.noise
            )));
        }
        if !(0.0..=1.0).contains(&self.triangle_prob) {
            return Err(Error::Generation(format!(
                "triangle_prob must be in [0, 1], got {}",
                self.triangle_prob
            )));
        }
        if self.authority_bias < 0.0 || self.locality_bias < 0.0 {
            return Err(Error::Generation("biases must be non-negative".into()));
        }
        Ok(())
    }
}

/// A generated graph with its cutoff and window end.
#[derive(Debug)]
pub struct Generated {
    pub graph: TemporalGraph,
    pub t0: i64,
    pub t_end: i64,
    pub planted_edges: usize,
    pub organic_window_edges: usize,
}

/// Grows the attachment graph with consecutive integer timestamps, places
/// the cutoff at the `t0_fraction` point of the growth edges, and samples
/// `window_edges` planted pairs after the cutoff. Deterministic for a
/// given seed.
pub fn generate(cfg: &GenConfig) -> Result<Generated> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.rng_seed);

    // External ids are 1..=n.
    let m = cfg.m_per_step;
    let clique = m + 1;
    let mut edges: Vec<(u64, u64, i64)> = Vec::new();
    // Endpoint pool: each vertex appears once per incident edge, so a
    // uniform draw is degree-proportional.
    let mut pool: Vec<u64> = Vec::new();
    let mut adjacency: Vec<Vec<u64>> = vec![Vec::new(); cfg.n + 1];
    let mut t = 0i64;
    let push_edge = |edges: &mut Vec<(u64, u64, i64)>,
                     pool: &mut Vec<u64>,
                     adjacency: &mut Vec<Vec<u64>>,
                     t: &mut i64,
                     a: u64,
                     b: u64| {
        *t += 1;
        edges.push((a, b, *t));
        pool.push(a);
        pool.push(b);
        adjacency[a as usize].push(b);
        adjacency[b as usize].push(a);
    };

    for i in 1..=clique as u64 {
        for j in (i + 1)..=clique as u64 {
            push_edge(&mut edges, &mut pool, &mut adjacency, &mut t, i, j);
        }
    }
    for v in (clique as u64 + 1)..=(cfg.n as u64) {
        let mut chosen: Vec<u64> = Vec::with_capacity(m);
        let mut last_pref = 0u64;
        while chosen.len() < m {
            let mut target = 0u64;
            // Triad step: follow an edge of the previous fresh target.
            if !chosen.is_empty() && rng.gen::<f64>() < cfg.triangle_prob {
                for _ in 0..8 {
                    let neigh = &adjacency[last_pref as usize];
                    let w = neigh[rng.gen_range(0..neigh.len())];
                    if w != v && !chosen.contains(&w) {
                        target = w;
                        break;
                    }
                }
            }
            if target == 0 {
                loop {
                    let w = pool[rng.gen_range(0..pool.len())];
                    if w != v && !chosen.contains(&w) {
                        target = w;
                        break;
                    }
                }
                last_pref = target;
            }
            chosen.push(target);
        }
        for target in chosen {
            push_edge(&mut edges, &mut pool, &mut adjacency, &mut t, v, target);
        }
    }

    let growth_edges = edges.len();
    let cut = ((cfg.t0_fraction * growth_edges as f64).ceil() as usize).min(growth_edges);
    let t0 = cut as i64;

    let organic_window_edges = growth_edges - cut;
    let growth_graph = TemporalGraph::from_edges(&edges);
    let snap = snapshot_at(&growth_graph, t0);

    let planted = plant_window_edges(cfg, &snap, &mut rng)?;
    for (i, &(u, v)) in planted.iter().enumerate() {
        edges.push((u, v, growth_edges as i64 + 1 + i as i64));
    }

    let t_end = (growth_edges + planted.len()).max(cut + 1) as i64;
    Ok(Generated {
        graph: TemporalGraph::from_edges(&edges),
        t0,
        t_end,
        planted_edges: planted.len(),
        organic_window_edges,
    })
}

/// Samples the planted pairs among old-vertex non-edges of the cutoff
/// snapshot.
///
/// The weighted draw decomposes exactly into a "base" stratum (every
/// non-edge pair, weight `(1+deg(v))^a`) and an "excess" stratum (pairs
/// with at least one common neighbor, weight
/// `(1+deg(v))^a ((1+cn)^l - 1)`), so no rejection against the weight is
/// needed; only collisions with already-planted pairs are redrawn.
fn plant_window_edges(
    cfg: &GenConfig,
    snap: &Snapshot,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<(u64, u64)>> {
    if cfg.window_edges == 0 {
        return Ok(Vec::new());
    }

    // Old vertices are those with an edge at the cutoff. Internal ids are
    // dense and ascend with external ids.
    let old: Vec<u32> = (0..snap.vertex_count() as u32)
        .filter(|&v| snap.degree_internal(v) >= 1)
        .collect();
    let n_old = old.len();

    let pre_pairs: usize = old
        .iter()
        .map(|&v| snap.adj_of(v).iter().filter(|&&w| w > v).count())
        .sum();
    let available = n_old * (n_old - 1) / 2 - pre_pairs;
    if cfg.window_edges > available {
        return Err(Error::Generation(format!(
            "cannot plant {} window edges: only {} old-vertex non-edges exist",
            cfg.window_edges, available
        )));
    }

    // Target weights come from the cutoff snapshot's authority scores so
    // the planted signal is recoverable from cutoff-time features.
    // Scores are rescaled by √n_old, putting an "average" vertex near 1.
    let authority = hits(snap, 1e-10, 1000)?.authority;
    let a = cfg.authority_bias;
    let scale = 2.0 * (n_old as f64).sqrt();
    let weight_of = |v: u32| (1.0 + authority[v as usize] * scale).powf(a);

    // Base stratum: target weight times the number of valid partners.
    let mut base_cum = Vec::with_capacity(n_old);
    let mut base_total = 0.0;
    for &v in &old {
        base_total += weight_of(v) * (n_old - 1 - snap.degree_internal(v)) as f64;
        base_cum.push(base_total);
    }

    // Excess stratum: only pairs with common neighbors carry it.
    let mut excess_pairs: Vec<(u32, u32)> = Vec::new();
    let mut excess_cum: Vec<f64> = Vec::new();
    let mut excess_total = 0.0;
    if cfg.locality_bias > 0.0 {
        for &u in &old {
            let neigh: Vec<u32> = snap.adj_of(u).to_vec();
            for (c, cn) in collect_candidates_internal(snap, u, &neigh) {
                let w = weight_of(c) * ((1.0 + cn as f64).powf(cfg.locality_bias) - 1.0);
                if w > 0.0 {
                    excess_total += w;
                    excess_pairs.push((u, c));
                    excess_cum.push(excess_total);
                }
            }
        }
    }

    let mut planted: Vec<(u64, u64)> = Vec::with_capacity(cfg.window_edges);
    let mut taken: HashSet<(u32, u32)> = HashSet::new();
    let budget = cfg.window_edges * 1000 + 10_000;
    let mut attempts = 0usize;

    while planted.len() < cfg.window_edges {
        attempts += 1;
        if attempts > budget {
            return Err(Error::Generation(
                "window edge sampling exhausted its retry budget".into(),
            ));
        }

        let pair = if rng.gen::<f64>() < cfg.noise {
            let u = old[rng.gen_range(0..n_old)];
            let v = old[rng.gen_range(0..n_old)];
            if u == v || snap.has_edge_internal(u, v) {
                continue;
            }
            (u, v)
        } else {
            let r = rng.gen::<f64>() * (base_total + excess_total);
            if r < base_total || excess_total == 0.0 {
                let x = rng.gen::<f64>() * base_total;
                let vi = base_cum.partition_point(|&c| c <= x).min(n_old - 1);
                let v = old[vi];
                // The target marginal already carries the valid-partner
                // count, so the partner must be uniform over the valid
                // set: retry the partner draw alone, never the target.
                let u = loop {
                    let u = old[rng.gen_range(0..n_old)];
                    if u != v && !snap.has_edge_internal(u, v) {
                        break u;
                    }
                };
                (u, v)
            } else {
                let x = rng.gen::<f64>() * excess_total;
                let i = excess_cum
                    .partition_point(|&c| c <= x)
                    .min(excess_pairs.len() - 1);
                excess_pairs[i]
            }
        };

        let key = (pair.0.min(pair.1), pair.0.max(pair.1));
        if taken.insert(key) {
            planted.push((snap.external(pair.0).0, snap.external(pair.1).0));
        }
    }

    Ok(planted)
}

/// Histogram of per-vertex temporal edge counts: `(degree, vertex count)`
/// rows ascending by degree.
pub fn degree_histogram(g: &TemporalGraph) -> Vec<(u64, u64)> {
    let mut per_vertex: std::collections::HashMap<u64, u64> = std::collections::HashMap::new();
    for e in g.edges() {
        *per_vertex.entry(e.u.0).or_insert(0) += 1;
        *per_vertex.entry(e.v.0).or_insert(0) += 1;
    }
    let mut hist: std::collections::HashMap<u64, u64> = std::collections::HashMap::new();
    for v in g.vertices() {
        let d = per_vertex.get(&v.0).copied().unwrap_or(0);
        *hist.entry(d).or_insert(0) += 1;
    }
    let mut rows: Vec<(u64, u64)> = hist.into_iter().collect();
    rows.sort_unstable();
    rows
}

/// Edge counts per time step (`t / divisor`), ascending by step.
pub fn links_per_step(g: &TemporalGraph, divisor: i64) -> Result<Vec<(i64, u64)>> {
    if divisor < 1 {
        return Err(Error::InvalidArgument(format!(
            "step divisor must be at least 1, got {divisor}"
        )));
    }
    let mut counts: std::collections::HashMap<i64, u64> = std::collections::HashMap::new();
    for e in g.edges() {
        *counts.entry(e.t / divisor).or_insert(0) += 1;
    }
    let mut rows: Vec<(i64, u64)> = counts.into_iter().collect();
    rows.sort_unstable();
    Ok(rows)
}
