//! Two-phase candidate ranking: threshold-gated seed retrieval from a
//! query vertex's neighborhood, then scoring of the seeds' neighborhoods
//! by a global feature.
//!
//! A *seed* is a neighbor whose Jaccard score with the query vertex
//! strictly exceeds the locality threshold. Candidates are the union of
//! the seeds' neighbor lists minus the query vertex and its existing
//! neighbors; each candidate is scored once (assignment, not
//! accumulation), sorted by score descending with ascending-id
//! tie-breaks, and truncated to the top `k`.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::features::{jaccard_internal, FeatureTable, VertexFeatures};
use crate::graph::{Snapshot, VertexId};

/// Candidate scoring function over the global feature table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Scoring {
    /// HITS authority of the candidate (default).
    Authority,
    DegreeNorm,
    Transitivity,
    /// Non-negative linear combination of the three global features.
    Weighted {
        authority: f64,
        degree: f64,
        transitivity: f64,
    },
}

impl Scoring {
    pub fn score(&self, f: &VertexFeatures) -> f64 {
        match *self {
            Scoring::Authority => f.authority,
            Scoring::DegreeNorm => f.degree_norm,
            Scoring::Transitivity => f.transitivity,
            Scoring::Weighted {
                authority,
                degree,
                transitivity,
            } => authority * f.authority + degree * f.degree_norm + transitivity * f.transitivity,
        }
    }

    fn validate(&self) -> Result<()> {
        if let Scoring::Weighted {
            authority,
            degree,
            transitivity,
        } = *self
        {
            if authority < 0.0 || degree < 0.0 || transitivity < 0.0 {
                return Err(Error::InvalidArgument(
                    "scoring weights must be non-negative".into(),
                ));
            }
            if authority == 0.0 && degree == 0.0 && transitivity == 0.0 {
                return Err(Error::InvalidArgument(
                    "scoring weights must not all be zero".into(),
                ));
            }
        }
        Ok(())
    }
}

/// Ranking parameters: locality threshold, list length, and scoring.
#[derive(Debug, Clone, Copy)]
pub struct RankerConfig {
    /// Locality threshold in `[0, 1)`; seeds must exceed it strictly.
    pub th: f64,
    /// Maximum candidates returned per user.
    pub k: usize,
    pub scoring: Scoring,
}

impl RankerConfig {
    pub fn new(th: f64, k: usize) -> Self {
        RankerConfig {
            th,
            k,
            scoring: Scoring::Authority,
        }
    }

    pub fn validate(&self) -> Result<()> {
        validate_threshold(self.th)?;
        if self.k == 0 {
            return Err(Error::InvalidArgument("k must be at least 1".into()));
        }
        self.scoring.validate()
    }
}

pub(crate) fn validate_threshold(th: f64) -> Result<()> {
    if !(0.0..1.0).contains(&th) {
        return Err(Error::InvalidArgument(format!(
            "locality threshold must be in [0, 1), got {th}"
        )));
    }
    Ok(())
}

/// One ranked candidate for a query vertex.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RankedCandidate {
    pub vertex: VertexId,
    pub score: f64,
    /// Number of seeds whose neighborhood contributed this candidate.
    pub via_seed_count: usize,
}

/// Neighbors of `u` with `jaccard(u, v) > th`, ascending by id.
pub fn retrieve_seeds(snap: &Snapshot, u: VertexId, th: f64) -> Result<Vec<VertexId>> {
    validate_threshold(th)?;
    let ui = snap.internal(u)?;
    Ok(retrieve_seeds_internal(snap, ui, th)
        .into_iter()
        .map(|v| snap.external(v))
        .collect())
}

pub(crate) fn retrieve_seeds_internal(snap: &Snapshot, u: u32, th: f64) -> Vec<u32> {
    snap.adj_of(u)
        .iter()
        .copied()
        .filter(|&v| jaccard_internal(snap, u, v) > th)
        .collect()
}

/// Candidate vertices reachable through `seeds`, with the number of seeds
/// that contributed each, ascending by id. Excludes `u` and `Γ(u)`.
pub(crate) fn collect_candidates_internal(
    snap: &Snapshot,
    u: u32,
    seeds: &[u32],
) -> Vec<(u32, usize)> {
    let mut pool: Vec<u32> = Vec::new();
    for &s in seeds {
        pool.extend_from_slice(snap.adj_of(s));
    }
    pool.sort_unstable();

    let own = snap.adj_of(u);
    let mut out: Vec<(u32, usize)> = Vec::new();
    let mut i = 0;
    while i < pool.len() {
        let c = pool[i];
        let mut count = 1;
        while i + 1 < pool.len() && pool[i + 1] == c {
            count += 1;
            i += 1;
        }
        i += 1;
        if c != u && own.binary_search(&c).is_err() {
            out.push((c, count));
        }
    }
    out
}

/// Scores and ranks the candidates reached through `seeds`.
///
/// Every seed must be a neighbor of `u`. Each candidate is scored once by
/// `cfg.scoring` on its feature row; ties break toward the smaller id.
pub fn rank_candidates(
    snap: &Snapshot,
    feats: &FeatureTable,
    u: VertexId,
    seeds: &[VertexId],
    cfg: &RankerConfig,
) -> Result<Vec<RankedCandidate>> {
    cfg.validate()?;
    let ui = snap.internal(u)?;
    let own = snap.adj_of(ui);
    let mut internal_seeds = Vec::with_capacity(seeds.len());
    for &s in seeds {
        let si = snap.internal(s)?;
        if own.binary_search(&si).is_err() {
            return Err(Error::InvalidArgument(format!(
                "seed {s} is not a neighbor of {u}"
            )));
        }
        internal_seeds.push(si);
    }
    Ok(rank_candidates_internal(
        snap,
        feats,
        ui,
        &internal_seeds,
        cfg,
    ))
}

fn rank_candidates_internal(
    snap: &Snapshot,
    feats: &FeatureTable,
    u: u32,
    seeds: &[u32],
    cfg: &RankerConfig,
) -> Vec<RankedCandidate> {
    let mut scored: Vec<(u32, usize, f64)> = collect_candidates_internal(snap, u, seeds)
        .into_iter()
        .map(|(c, via)| (c, via, cfg.scoring.score(feats.row(c))))
        .collect();
    // Internal ids ascend with external ids, so the id tie-break below is
    // the external-id tie-break.
    scored.sort_by(|a, b| b.2.total_cmp(&a.2).then(a.0.cmp(&b.0)));
    scored.truncate(cfg.k);
    scored
        .into_iter()
        .map(|(c, via, score)| RankedCandidate {
            vertex: snap.external(c),
            score,
            via_seed_count: via,
        })
        .collect()
}

/// Ranked output for one user in a batch run.
#[derive(Debug)]
pub struct UserPrediction {
    pub user: VertexId,
    pub candidates: Vec<RankedCandidate>,
    pub seed_count: usize,
    /// Candidate count before top-k truncation, for tradeoff analysis.
    pub candidate_count: usize,
}

/// Batch result: per-user predictions in input order plus per-user
/// failures that did not abort the rest of the batch.
#[derive(Debug)]
pub struct BatchPrediction {
    pub results: Vec<UserPrediction>,
    pub failures: Vec<(VertexId, Error)>,
}

/// Runs seed retrieval plus ranking for each user. Users may be processed
/// concurrently; the output order matches the input order either way.
pub fn predict_links(
    snap: &Snapshot,
    feats: &FeatureTable,
    users: &[VertexId],
    cfg: &RankerConfig,
) -> Result<BatchPrediction> {
    cfg.validate()?;
    let per_user: Vec<std::result::Result<UserPrediction, (VertexId, Error)>> = users
        .par_iter()
        .map(|&user| {
            let ui = snap.internal(user).map_err(|e| (user, e))?;
            let seeds = retrieve_seeds_internal(snap, ui, cfg.th);
            let all = collect_candidates_internal(snap, ui, &seeds);
            let candidate_count = all.len();
            let candidates = rank_candidates_internal(snap, feats, ui, &seeds, cfg);
            Ok(UserPrediction {
                user,
                candidates,
                seed_count: seeds.len(),
                candidate_count,
            })
        })
        .collect();

    let mut results = Vec::with_capacity(users.len());
    let mut failures = Vec::new();
    for item in per_user {
        match item {
            Ok(p) => results.push(p),
            Err(f) => failures.push(f),
        }
    }
    Ok(BatchPrediction { results, failures })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::features::compute_global_features;
    use crate::graph::{snapshot_at, TemporalGraph};

    fn snap_of(edges: &[(u64, u64)]) -> Snapshot {
        let raw: Vec<(u64, u64, i64)> = edges.iter().map(|&(u, v)| (u, v, 1)).collect();
        snapshot_at(&TemporalGraph::from_edges(&raw), 10)
    }

    fn v(id: u64) -> VertexId {
        VertexId(id)
    }

    const EXAMPLE: &[(u64, u64)] = &[(1, 2), (2, 3), (1, 3), (3, 4), (2, 5)];

    #[test]
    fn seeds_empty_for_isolated_vertex() {
        let snap = snap_of(&[(1, 2), (9, 9)]);
        assert!(retrieve_seeds(&snap, v(9), 0.0).unwrap().is_empty());
    }

    #[test]
    fn threshold_is_strict() {
        // Triangle: every adjacent pair has jaccard exactly 1/3.
        let snap = snap_of(&[(1, 2), (2, 3), (1, 3)]);
        let j = crate::features::jaccard(&snap, v(1), v(2)).unwrap();
        assert!(retrieve_seeds(&snap, v(1), j).unwrap().is_empty());
        assert_eq!(retrieve_seeds(&snap, v(1), j - 1e-9).unwrap().len(), 2);
    }

    #[test]
    fn seeds_worked_example() {
        // Frozen from the set-enumeration oracle: jaccard(1,2) and
        // jaccard(1,3) are both 0.25.
        let snap = snap_of(EXAMPLE);
        let seeds = retrieve_seeds(&snap, v(1), 0.2).unwrap();
        assert_eq!(seeds, vec![v(2), v(3)]);
    }

    #[test]
    fn rank_with_no_seeds_is_empty() {
        let snap = snap_of(EXAMPLE);
        let feats = compute_global_features(&snap, 1e-10, 1000).unwrap();
        let out = rank_candidates(&snap, &feats, v(1), &[], &RankerConfig::new(0.2, 10)).unwrap();
        assert!(out.is_empty());
    }

    #[test]
    fn rank_worked_example_with_tie_break() {
        // Candidates {4, 5}; the 2↔3 / 4↔5 automorphism makes their
        // authorities equal, so ascending id decides.
        let snap = snap_of(EXAMPLE);
        let feats = compute_global_features(&snap, 1e-10, 1000).unwrap();
        let seeds = retrieve_seeds(&snap, v(1), 0.2).unwrap();
        let out =
            rank_candidates(&snap, &feats, v(1), &seeds, &RankerConfig::new(0.2, 10)).unwrap();
        let ids: Vec<u64> = out.iter().map(|c| c.vertex.0).collect();
        assert_eq!(ids, vec![4, 5]);
        assert!((out[0].score - out[1].score).abs() < 1e-12);
        assert_eq!(out[0].via_seed_count, 1);

        let top1 =
            rank_candidates(&snap, &feats, v(1), &seeds, &RankerConfig::new(0.2, 1)).unwrap();
        assert_eq!(top1.len(), 1);
        assert_eq!(top1[0].vertex, v(4));
    }

    #[test]
    fn candidates_exclude_query_and_neighbors() {
        let snap = snap_of(EXAMPLE);
        let feats = compute_global_features(&snap, 1e-10, 1000).unwrap();
        for u in snap.vertices() {
            let seeds = retrieve_seeds(&snap, u, 0.0).unwrap();
            let out =
                rank_candidates(&snap, &feats, u, &seeds, &RankerConfig::new(0.0, 100)).unwrap();
            for c in &out {
                assert_ne!(c.vertex, u);
                assert!(!snap.has_edge(u, c.vertex).unwrap());
            }
        }
    }

    #[test]
    fn rejects_seed_not_adjacent_to_query() {
        let snap = snap_of(EXAMPLE);
        let feats = compute_global_features(&snap, 1e-10, 1000).unwrap();
        let err = rank_candidates(&snap, &feats, v(1), &[v(4)], &RankerConfig::new(0.0, 5));
        assert!(matches!(err.unwrap_err(), Error::InvalidArgument(_)));
    }

    #[test]
    fn config_validation() {
        assert!(RankerConfig::new(1.0, 5).validate().is_err());
        assert!(RankerConfig::new(-0.1, 5).validate().is_err());
        assert!(RankerConfig::new(0.5, 0).validate().is_err());
        let bad = RankerConfig {
            th: 0.1,
            k: 5,
            scoring: Scoring::Weighted {
                authority: 0.0,
                degree: 0.0,
                transitivity: 0.0,
            },
        };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn weighted_scoring_is_the_linear_combination() {
        let snap = snap_of(EXAMPLE);
        let feats = compute_global_features(&snap, 1e-10, 1000).unwrap();
        let scoring = Scoring::Weighted {
            authority: 0.5,
            degree: 0.25,
            transitivity: 0.25,
        };
        for u in snap.vertices() {
            let f = feats.get(u).unwrap();
            let expected = 0.5 * f.authority + 0.25 * f.degree_norm + 0.25 * f.transitivity;
            assert_eq!(scoring.score(f), expected);
        }
        let cfg = RankerConfig {
            th: 0.0,
            k: 10,
            scoring,
        };
        let seeds = retrieve_seeds(&snap, v(1), 0.0).unwrap();
        let ranked = rank_candidates(&snap, &feats, v(1), &seeds, &cfg).unwrap();
        for w in ranked.windows(2) {
            assert!(w[0].score >= w[1].score);
        }
    }

    #[test]
    fn batch_empty_users() {
        let snap = snap_of(EXAMPLE);
        let feats = compute_global_features(&snap, 1e-10, 1000).unwrap();
        let out = predict_links(&snap, &feats, &[], &RankerConfig::new(0.1, 5)).unwrap();
        assert!(out.results.is_empty());
        assert!(out.failures.is_empty());
    }

    #[test]
    fn batch_isolated_user_gets_empty_list() {
        let snap = snap_of(&[(1, 2), (9, 9)]);
        let feats = compute_global_features(&snap, 1e-10, 1000).unwrap();
        let out = predict_links(&snap, &feats, &[v(9)], &RankerConfig::new(0.1, 5)).unwrap();
        assert_eq!(out.results.len(), 1);
        assert!(out.results[0].candidates.is_empty());
        assert_eq!(out.results[0].seed_count, 0);
    }

    #[test]
    fn batch_reports_failures_without_aborting() {
        let snap = snap_of(EXAMPLE);
        let feats = compute_global_features(&snap, 1e-10, 1000).unwrap();
        let out = predict_links(
            &snap,
            &feats,
            &[v(1), v(99), v(2)],
            &RankerConfig::new(0.1, 5),
        )
        .unwrap();
        assert_eq!(out.results.len(), 2);
        assert_eq!(out.failures.len(), 1);
        assert_eq!(out.failures[0].0, v(99));
    }

    #[test]
    fn seed_sets_shrink_as_threshold_grows() {
        let snap = snap_of(&[
            (1, 2),
            (2, 3),
            (1, 3),
            (3, 4),
            (2, 5),
            (4, 5),
            (1, 4),
            (5, 6),
            (6, 7),
            (2, 7),
        ]);
        for u in snap.vertices() {
            let mut prev: Option<Vec<VertexId>> = None;
            for th in [0.0, 0.1, 0.2, 0.3, 0.5, 0.9] {
                let seeds = retrieve_seeds(&snap, u, th).unwrap();
                if let Some(prev) = &prev {
                    assert!(
                        seeds.iter().all(|s| prev.contains(s)),
                        "seeds at higher threshold must be a subset"
                    );
                }
                prev = Some(seeds);
            }
        }
    }

    #[test]
    fn output_is_sorted_and_bounded() {
        let snap = snap_of(&[
            (1, 2),
            (1, 3),
            (1, 4),
            (2, 3),
            (2, 4),
            (3, 4),
            (4, 5),
            (5, 6),
            (2, 6),
            (3, 6),
        ]);
        let feats = compute_global_features(&snap, 1e-10, 1000).unwrap();
        let cfg = RankerConfig::new(0.0, 3);
        for u in snap.vertices() {
            let seeds = retrieve_seeds(&snap, u, cfg.th).unwrap();
            let out = rank_candidates(&snap, &feats, u, &seeds, &cfg).unwrap();
            assert!(out.len() <= cfg.k);
            for w in out.windows(2) {
                assert!(
                    w[0].score > w[1].score
                        || (w[0].score == w[1].score && w[0].vertex < w[1].vertex)
                );
            }
        }
    }
}
