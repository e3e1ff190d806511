//! Labeled real/false link dataset construction.
//!
//! Both builders follow the same framing: features come from the cutoff
//! snapshot only, real labels come from the observation window, and every
//! instance is an unordered vertex pair that is not an edge at the cutoff.
//!
//! The classification variant pairs active users with each other and
//! samples capped per-user negatives. The threshold variant enumerates
//! each active user's ranked-retrieval candidates and labels them by
//! window membership.

use std::collections::HashSet;
use std::io::{BufRead, Write};

use rand::seq::SliceRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::features::FeatureTable;
use crate::graph::{ObservationWindow, Snapshot, VertexId};
use crate::ranker::{collect_candidates_internal, retrieve_seeds_internal, validate_threshold};

/// Binary instance label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Label {
    Real,
    False,
}

impl Label {
    pub fn as_str(&self) -> &'static str {
        match self {
            Label::Real => "real",
            Label::False => "false",
        }
    }

    pub fn parse(text: &str) -> Option<Label> {
        match text {
            "real" => Some(Label::Real),
            "false" => Some(Label::False),
            _ => None,
        }
    }
}

/// Column order of the six per-instance features. Subindex 1 is the
/// active user's slot, subindex 2 the candidate's.
pub const FEATURE_NAMES: [&str; 6] = [
    "authority1",
    "authority2",
    "degree1",
    "degree2",
    "transitivity1",
    "transitivity2",
];

/// One candidate link with its features and label.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LabeledInstance {
    pub u: VertexId,
    pub v: VertexId,
    /// `[authority1, authority2, degree1, degree2, transitivity1, transitivity2]`
    pub features: [f64; 6],
    pub label: Label,
}

/// Which builder produced a dataset.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DatasetVariant {
    Classification,
    Threshold,
}

impl DatasetVariant {
    pub fn as_str(&self) -> &'static str {
        match self {
            DatasetVariant::Classification => "classification",
            DatasetVariant::Threshold => "threshold",
        }
    }

    fn parse(text: &str) -> Option<Self> {
        match text {
            "classification" => Some(DatasetVariant::Classification),
            "threshold" => Some(DatasetVariant::Threshold),
            _ => None,
        }
    }
}

/// Everything needed to regenerate a dataset bit-identically.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Provenance {
    pub t0: i64,
    pub t_end: i64,
    pub variant: DatasetVariant,
    pub th: Option<f64>,
    pub rng_seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub instances: Vec<LabeledInstance>,
    pub provenance: Provenance,
}

impl Dataset {
    pub fn len(&self) -> usize {
        self.instances.len()
    }

    pub fn is_empty(&self) -> bool {
        self.instances.is_empty()
    }

    /// `(real, false)` instance counts.
    pub fn class_counts(&self) -> (usize, usize) {
        let real = self
            .instances
            .iter()
            .filter(|i| i.label == Label::Real)
            .count();
        (real, self.instances.len() - real)
    }
}

/// Vertices that exist at the cutoff and gained at least one new link in
/// the window, ascending by id.
///
/// "Exists at the cutoff" means at least one snapshot edge; the optional
/// roster adds vertices that should count as existing despite having no
/// edges (the account-creation information a raw edge list lacks).
pub fn active_users(
    snap: &Snapshot,
    window: &ObservationWindow,
    roster: Option<&HashSet<VertexId>>,
) -> Vec<VertexId> {
    active_users_internal(snap, window, roster)
        .into_iter()
        .map(|u| snap.external(u))
        .collect()
}

fn active_users_internal(
    snap: &Snapshot,
    window: &ObservationWindow,
    roster: Option<&HashSet<VertexId>>,
) -> Vec<u32> {
    let n = snap.vertex_count();
    let mut touched = vec![false; n];
    for (a, b) in window.pairs_internal() {
        touched[a as usize] = true;
        touched[b as usize] = true;
    }
    (0..n as u32)
        .filter(|&u| {
            touched[u as usize]
                && (snap.degree_internal(u) >= 1
                    || roster.is_some_and(|r| r.contains(&snap.external(u))))
        })
        .collect()
}

fn instance_for_pair(
    snap: &Snapshot,
    feats: &FeatureTable,
    slot1: u32,
    slot2: u32,
    label: Label,
) -> LabeledInstance {
    let f1 = feats.row(slot1);
    let f2 = feats.row(slot2);
    LabeledInstance {
        u: snap.external(slot1),
        v: snap.external(slot2),
        features: [
            f1.authority,
            f2.authority,
            f1.degree_norm,
            f2.degree_norm,
            f1.transitivity,
            f2.transitivity,
        ],
        label,
    }
}

/// Builds the full-classification dataset: window edges between active
/// users become real instances; per-user capped uniform samples of
/// non-edges between active users become false instances.
pub fn build_classification_dataset(
    snap: &Snapshot,
    window: &ObservationWindow,
    feats: &FeatureTable,
    neg_cap_per_user: usize,
    rng_seed: u64,
) -> Result<Dataset> {
    if neg_cap_per_user == 0 {
        return Err(Error::InvalidArgument(
            "neg_cap_per_user must be at least 1".into(),
        ));
    }
    build_classification_with_roster(snap, window, feats, neg_cap_per_user, rng_seed, None)
}

pub fn build_classification_with_roster(
    snap: &Snapshot,
    window: &ObservationWindow,
    feats: &FeatureTable,
    neg_cap_per_user: usize,
    rng_seed: u64,
    roster: Option<&HashSet<VertexId>>,
) -> Result<Dataset> {
    let active = active_users_internal(snap, window, roster);
    let is_active = membership(snap.vertex_count(), &active);

    let mut instances = Vec::new();
    let mut used: HashSet<(u32, u32)> = HashSet::new();

    // Real instances: window pairs whose endpoints are both eligible.
    // Window pairs are normalized (min, max), so the earlier external id
    // already occupies slot 1.
    for (a, b) in window.pairs_internal() {
        if is_active[a as usize] && is_active[b as usize] {
            used.insert((a, b));
            instances.push(instance_for_pair(snap, feats, a, b, Label::Real));
        }
    }

    // False instances: seeded uniform non-edges between active users,
    // capped per source user. Small eligible sets are enumerated exactly;
    // large ones use rejection sampling.
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    const ENUMERATE_LIMIT: usize = 2048;
    for &u in &active {
        if active.len() <= ENUMERATE_LIMIT {
            let mut valid: Vec<u32> = active
                .iter()
                .copied()
                .filter(|&c| {
                    c != u
                        && !snap.has_edge_internal(u, c)
                        && !window.contains_internal(u, c)
                        && !used.contains(&norm(u, c))
                })
                .collect();
            let take = neg_cap_per_user.min(valid.len());
            // Partial Fisher-Yates: the first `take` entries are a uniform
            // sample without replacement.
            for i in 0..take {
                let j = rng.gen_range(i..valid.len());
                valid.swap(i, j);
            }
            for &c in &valid[..take] {
                used.insert(norm(u, c));
                instances.push(instance_for_pair(
                    snap,
                    feats,
                    u.min(c),
                    u.max(c),
                    Label::False,
                ));
            }
        } else {
            let mut drawn = 0usize;
            let mut attempts = 0usize;
            let budget = neg_cap_per_user * 30 + 100;
            while drawn < neg_cap_per_user && attempts < budget {
                attempts += 1;
                let c = active[rng.gen_range(0..active.len())];
                if c == u
                    || snap.has_edge_internal(u, c)
                    || window.contains_internal(u, c)
                    || used.contains(&norm(u, c))
                {
                    continue;
                }
                used.insert(norm(u, c));
                instances.push(instance_for_pair(
                    snap,
                    feats,
                    u.min(c),
                    u.max(c),
                    Label::False,
                ));
                drawn += 1;
            }
        }
    }

    if instances.is_empty() {
        log::warn!("classification dataset is empty: no eligible pairs");
    }

    Ok(Dataset {
        instances,
        provenance: Provenance {
            t0: snap.cutoff(),
            t_end: window.t_end(),
            variant: DatasetVariant::Classification,
            th: None,
            rng_seed,
        },
    })
}

/// Builds the threshold-retrieval dataset: each active user's candidates
/// (via seeds above the Jaccard threshold) become instances, labeled real
/// when the pair appears in the window.
pub fn build_threshold_dataset(
    snap: &Snapshot,
    window: &ObservationWindow,
    feats: &FeatureTable,
    th: f64,
    rng_seed: u64,
) -> Result<Dataset> {
    build_threshold_with_roster(snap, window, feats, th, rng_seed, None)
}

pub fn build_threshold_with_roster(
    snap: &Snapshot,
    window: &ObservationWindow,
    feats: &FeatureTable,
    th: f64,
    rng_seed: u64,
    roster: Option<&HashSet<VertexId>>,
) -> Result<Dataset> {
    validate_threshold(th)?;
    let active = active_users_internal(snap, window, roster);

    // Candidate collection is independent per user; the sequential merge
    // below keeps output order and deduplication deterministic.
    let per_user: Vec<(u32, Vec<u32>)> = active
        .par_iter()
        .map(|&u| {
            let seeds = retrieve_seeds_internal(snap, u, th);
            let candidates = collect_candidates_internal(snap, u, &seeds)
                .into_iter()
                .map(|(c, _)| c)
                .collect();
            (u, candidates)
        })
        .collect();

    let mut instances = Vec::new();
    let mut seen: HashSet<(u32, u32)> = HashSet::new();
    for (u, candidates) in per_user {
        for c in candidates {
            let key = norm(u, c);
            if !seen.insert(key) {
                continue;
            }
            let label = if window.contains_internal(u, c) {
                Label::Real
            } else {
                Label::False
            };
            // The retrieving active user takes slot 1, the candidate
            // slot 2. Users iterate in ascending id order, so when both
            // sides retrieve the same pair the earlier id wins the slot.
            instances.push(instance_for_pair(snap, feats, u, c, label));
        }
    }

    Ok(Dataset {
        instances,
        provenance: Provenance {
            t0: snap.cutoff(),
            t_end: window.t_end(),
            variant: DatasetVariant::Threshold,
            th: Some(th),
            rng_seed,
        },
    })
}

fn membership(n: usize, members: &[u32]) -> Vec<bool> {
    let mut mask = vec![false; n];
    for &m in members {
        mask[m as usize] = true;
    }
    mask
}

fn norm(a: u32, b: u32) -> (u32, u32) {
    (a.min(b), a.max(b))
}

/// Uniformly undersamples the majority class to the minority count and
/// shuffles the result, both driven by `rng_seed`.
pub fn balance(ds: &Dataset, rng_seed: u64) -> Result<Dataset> {
    let (real, false_) = ds.class_counts();
    if real == 0 || false_ == 0 {
        return Err(Error::Balance(format!(
            "both classes must be nonempty to balance (real={real}, false={false_})"
        )));
    }
    let minority = real.min(false_);

    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let mut keep: Vec<usize> = Vec::with_capacity(2 * minority);
    for label in [Label::Real, Label::False] {
        let mut idx: Vec<usize> = ds
            .instances
            .iter()
            .enumerate()
            .filter(|(_, inst)| inst.label == label)
            .map(|(i, _)| i)
            .collect();
        idx.shuffle(&mut rng);
        idx.truncate(minority);
        keep.extend(idx);
    }
    keep.shuffle(&mut rng);

    Ok(Dataset {
        instances: keep.into_iter().map(|i| ds.instances[i]).collect(),
        provenance: ds.provenance,
    })
}

/// Checks the dataset invariants against its source snapshot and window;
/// violations indicate a construction bug.
pub fn verify_dataset(ds: &Dataset, snap: &Snapshot, window: &ObservationWindow) -> Result<()> {
    let mut seen = HashSet::new();
    for inst in &ds.instances {
        if inst.u == inst.v {
            return Err(Error::Internal(format!("self-pair instance {}", inst.u)));
        }
        if snap.has_edge(inst.u, inst.v)? {
            return Err(Error::Internal(format!(
                "instance ({}, {}) is an observed edge at the cutoff",
                inst.u, inst.v
            )));
        }
        let in_window = window.contains(inst.u, inst.v);
        if (inst.label == Label::Real) != in_window {
            return Err(Error::Internal(format!(
                "label of ({}, {}) disagrees with window membership",
                inst.u, inst.v
            )));
        }
        let key = (inst.u.min(inst.v), inst.u.max(inst.v));
        if !seen.insert(key) {
            return Err(Error::Internal(format!(
                "duplicate instance pair ({}, {})",
                inst.u, inst.v
            )));
        }
    }
    Ok(())
}

const CSV_HEADER: &str =
    "u,v,authority1,authority2,degree1,degree2,transitivity1,transitivity2,label";

/// Writes the dataset as CSV with a provenance comment line. Floats use
/// the shortest representation that round-trips exactly.
pub fn write_dataset<W: Write>(ds: &Dataset, mut w: W) -> Result<()> {
    let p = &ds.provenance;
    write!(
        w,
        "# t0={} t_end={} variant={}",
        p.t0,
        p.t_end,
        p.variant.as_str()
    )?;
    if let Some(th) = p.th {
        write!(w, " th={th}")?;
    }
    writeln!(w, " seed={}", p.rng_seed)?;
    writeln!(w, "{CSV_HEADER}")?;
    for inst in &ds.instances {
        let f = &inst.features;
        writeln!(
            w,
            "{},{},{},{},{},{},{},{},{}",
            inst.u,
            inst.v,
            f[0],
            f[1],
            f[2],
            f[3],
            f[4],
            f[5],
            inst.label.as_str()
        )?;
    }
    Ok(())
}

/// Reads a dataset written by [`write_dataset`].
pub fn read_dataset<R: BufRead>(reader: R) -> Result<Dataset> {
    let mut lines = reader.lines().enumerate();

    let (_, first) = lines.next().ok_or_else(|| Error::Parse {
        line: 1,
        message: "empty dataset file".into(),
    })?;
    let first = first?;
    let provenance = parse_provenance(first.trim())?;

    let (line_no, header) = lines.next().ok_or_else(|| Error::Parse {
        line: 2,
        message: "missing header line".into(),
    })?;
    let header = header?;
    if header.trim() != CSV_HEADER {
        return Err(Error::Parse {
            line: line_no + 1,
            message: format!("unexpected header {:?}", header.trim()),
        });
    }

    let mut instances = Vec::new();
    for (idx, line) in lines {
        let line_no = idx + 1;
        let line = line?;
        let text = line.trim();
        if text.is_empty() {
            continue;
        }
        let fields: Vec<&str> = text.split(',').collect();
        if fields.len() != 9 {
            return Err(Error::Parse {
                line: line_no,
                message: format!("expected 9 fields, found {}", fields.len()),
            });
        }
        let parse_u64 = |s: &str| -> Result<u64> {
            s.parse().map_err(|_| Error::Parse {
                line: line_no,
                message: format!("invalid vertex id {s:?}"),
            })
        };
        let parse_f64 = |s: &str| -> Result<f64> {
            s.parse().map_err(|_| Error::Parse {
                line: line_no,
                message: format!("invalid feature value {s:?}"),
            })
        };
        let mut features = [0.0; 6];
        for (slot, field) in features.iter_mut().zip(&fields[2..8]) {
            *slot = parse_f64(field)?;
        }
        let label = Label::parse(fields[8]).ok_or_else(|| Error::Parse {
            line: line_no,
            message: format!("invalid label {:?}", fields[8]),
        })?;
        instances.push(LabeledInstance {
            u: VertexId(parse_u64(fields[0])?),
            v: VertexId(parse_u64(fields[1])?),
            features,
            label,
        });
    }

    Ok(Dataset {
        instances,
        provenance,
    })
}

fn parse_provenance(line: &str) -> Result<Provenance> {
    let body = line.strip_prefix('#').ok_or_else(|| Error::Parse {
        line: 1,
        message: "missing provenance comment line".into(),
    })?;
    let mut t0 = None;
    let mut t_end = None;
    let mut variant = None;
    let mut th = None;
    let mut seed = None;
    for token in body.split_whitespace() {
        let (key, value) = token.split_once('=').ok_or_else(|| Error::Parse {
            line: 1,
            message: format!("malformed provenance token {token:?}"),
        })?;
        let bad = |what: &str| Error::Parse {
            line: 1,
            message: format!("invalid provenance {what} {value:?}"),
        };
        match key {
            "t0" => t0 = Some(value.parse().map_err(|_| bad("t0"))?),
            "t_end" => t_end = Some(value.parse().map_err(|_| bad("t_end"))?),
            "variant" => {
                variant = Some(DatasetVariant::parse(value).ok_or_else(|| bad("variant"))?)
            }
            "th" => th = Some(value.parse().map_err(|_| bad("th"))?),
            "seed" => seed = Some(value.parse().map_err(|_| bad("seed"))?),
            _ => {
                return Err(Error::Parse {
                    line: 1,
                    message: format!("unknown provenance key {key:?}"),
                })
            }
        }
    }
    match (t0, t_end, variant, seed) {
        (Some(t0), Some(t_end), Some(variant), Some(rng_seed)) => Ok(Provenance {
            t0,
            t_end,
            variant,
            th,
            rng_seed,
        }),
        _ => Err(Error::Parse {
            line: 1,
            message: "provenance line must define t0, t_end, variant, and seed".into(),
        }),
    }
}
