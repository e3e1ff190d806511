//! Local and global topology features over a snapshot.
//!
//! Local: the Jaccard coefficient between two vertices' neighbor sets.
//! Global (per vertex): HITS authority/hub, degree normalized by the
//! graph's maximum degree, and the transitivity (clustering) coefficient.
//!
//! All functions are pure reads over an immutable [`Snapshot`] and are safe
//! to call concurrently. Parallel passes write each vertex's slot
//! independently and reduce sequentially, so results do not depend on the
//! worker count.

use std::io::Write;
use std::sync::Arc;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::{Snapshot, VertexId};

/// Global features of one vertex.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VertexFeatures {
    /// HITS authority score; L2-normalized over the whole graph. Equals
    /// `hub` on undirected graphs.
    pub authority: f64,
    pub hub: f64,
    /// Degree divided by the snapshot's maximum degree.
    pub degree_norm: f64,
    /// Fraction of realized edges among the vertex's neighbors.
    pub transitivity: f64,
}

/// Per-vertex global feature table for one snapshot.
#[derive(Debug)]
pub struct FeatureTable {
    rows: Vec<VertexFeatures>,
    index: Arc<crate::graph::VertexIndex>,
    pub hits_iterations: usize,
    pub hits_residual: f64,
}

impl FeatureTable {
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn get(&self, u: VertexId) -> Result<&VertexFeatures> {
        Ok(&self.rows[self.index.internal(u)? as usize])
    }

    pub(crate) fn row(&self, internal: u32) -> &VertexFeatures {
        &self.rows[internal as usize]
    }

    pub fn iter(&self) -> impl Iterator<Item = (VertexId, &VertexFeatures)> + '_ {
        self.rows
            .iter()
            .enumerate()
            .map(|(i, f)| (self.index.external(i as u32), f))
    }

    /// Writes `vertex,authority,degree_norm,transitivity` rows with
    /// full-precision floats.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "vertex,authority,degree_norm,transitivity")?;
        for (v, f) in self.iter() {
            writeln!(
                w,
                "{},{},{},{}",
                v, f.authority, f.degree_norm, f.transitivity
            )?;
        }
        Ok(())
    }
}

/// Jaccard coefficient `|Γ(u) ∩ Γ(v)| / |Γ(u) ∪ Γ(v)|` on raw neighbor
/// sets; 0 when both neighborhoods are empty.
pub fn jaccard(snap: &Snapshot, u: VertexId, v: VertexId) -> Result<f64> {
    let ui = snap.internal(u)?;
    let vi = snap.internal(v)?;
    Ok(jaccard_internal(snap, ui, vi))
}

pub(crate) fn jaccard_internal(snap: &Snapshot, u: u32, v: u32) -> f64 {
    let a = snap.adj_of(u);
    let b = snap.adj_of(v);
    let common = sorted_intersection_count(a, b);
    let union = a.len() + b.len() - common;
    if union == 0 {
        0.0
    } else {
        common as f64 / union as f64
    }
}

fn sorted_intersection_count(a: &[u32], b: &[u32]) -> usize {
    let mut count = 0;
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                count += 1;
                i += 1;
                j += 1;
            }
        }
    }
    count
}

/// Degree of `u` over the snapshot's maximum degree; 0 on edgeless graphs.
pub fn degree_coeff(snap: &Snapshot, u: VertexId) -> Result<f64> {
    let ui = snap.internal(u)?;
    Ok(degree_coeff_internal(snap, ui))
}

fn degree_coeff_internal(snap: &Snapshot, u: u32) -> f64 {
    if snap.max_degree() == 0 {
        0.0
    } else {
        snap.degree_internal(u) as f64 / snap.max_degree() as f64
    }
}

/// Realized edges among `Γ(u)` over `|Γ(u)|·(|Γ(u)|−1)/2`; 0 when the
/// degree is at most 1.
pub fn transitivity_coeff(snap: &Snapshot, u: VertexId) -> Result<f64> {
    let ui = snap.internal(u)?;
    Ok(transitivity_internal(snap, ui))
}

fn transitivity_internal(snap: &Snapshot, u: u32) -> f64 {
    let neigh = snap.adj_of(u);
    let d = neigh.len();
    if d <= 1 {
        return 0.0;
    }
    // Count each neighbor-neighbor edge once (w > v), probing Γ(u) by
    // binary search instead of materializing the induced subgraph.
    let mut edges = 0usize;
    for &v in neigh {
        for &w in snap.adj_of(v) {
            if w > v && neigh.binary_search(&w).is_ok() {
                edges += 1;
            }
        }
    }
    edges as f64 / (d * (d - 1) / 2) as f64
}

/// Outcome of the HITS fixed-point iteration.
#[derive(Debug)]
pub struct HitsScores {
    pub authority: Vec<f64>,
    pub hub: Vec<f64>,
    pub iterations: usize,
    pub residual: f64,
}

/// Runs the HITS fixed-point iteration from a uniform start.
///
/// One sweep updates the authority vector from the hub vector and then the
/// hub vector from the new authority vector, L2-normalizing after each
/// update; iteration stops when the L2 change of the authority vector
/// drops below `tol`. The returned scores are the normalized sum of the
/// two vectors, which leaves non-bipartite fixed points untouched and
/// resolves the degenerate ±λ mix on bipartite components to the principal
/// eigenvector, so authority and hub always coincide on undirected graphs.
pub fn hits(snap: &Snapshot, tol: f64, max_iter: usize) -> Result<HitsScores> {
    if !tol.is_finite() || tol <= 0.0 {
        return Err(Error::InvalidArgument(format!(
            "hits tolerance must be positive, got {tol}"
        )));
    }
    if max_iter == 0 {
        return Err(Error::InvalidArgument(
            "hits max_iter must be at least 1".into(),
        ));
    }

    let n = snap.vertex_count();
    if n == 0 {
        return Ok(HitsScores {
            authority: Vec::new(),
            hub: Vec::new(),
            iterations: 0,
            residual: 0.0,
        });
    }

    let init = 1.0 / (n as f64).sqrt();
    let mut auth = vec![init; n];
    let mut hub = vec![init; n];
    let mut next = vec![0.0; n];
    let mut iterations = 0;
    let mut residual = f64::INFINITY;

    while iterations < max_iter {
        iterations += 1;

        sweep(snap, &hub, &mut next);
        normalize_l2(&mut next);
        residual = l2_distance(&auth, &next);
        std::mem::swap(&mut auth, &mut next);

        sweep(snap, &auth, &mut next);
        normalize_l2(&mut next);
        std::mem::swap(&mut hub, &mut next);

        if residual < tol {
            break;
        }
    }

    let mut combined: Vec<f64> = auth.iter().zip(&hub).map(|(a, h)| a + h).collect();
    normalize_l2(&mut combined);

    Ok(HitsScores {
        authority: combined.clone(),
        hub: combined,
        iterations,
        residual,
    })
}

fn sweep(snap: &Snapshot, src: &[f64], dst: &mut [f64]) {
    dst.par_iter_mut().enumerate().for_each(|(u, out)| {
        // Fixed ascending accumulation order keeps results bit-identical
        // for any worker count.
        let mut acc = 0.0;
        for &v in snap.adj_of(u as u32) {
            acc += src[v as usize];
        }
        *out = acc;
    });
}

fn normalize_l2(v: &mut [f64]) {
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm > 0.0 {
        for x in v.iter_mut() {
            *x /= norm;
        }
    }
}

fn l2_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

pub const DEFAULT_HITS_TOL: f64 = 1e-10;
pub const DEFAULT_HITS_MAX_ITER: usize = 1000;

/// Computes authority/hub, normalized degree, and transitivity for every
/// snapshot vertex. Deterministic for a given snapshot regardless of the
/// rayon worker count.
pub fn compute_global_features(snap: &Snapshot, tol: f64, max_iter: usize) -> Result<FeatureTable> {
    let scores = hits(snap, tol, max_iter)?;
    let n = snap.vertex_count();
    let mut rows = vec![
        VertexFeatures {
            authority: 0.0,
            hub: 0.0,
            degree_norm: 0.0,
            transitivity: 0.0,
        };
        n
    ];
    rows.par_iter_mut().enumerate().for_each(|(i, row)| {
        let u = i as u32;
        *row = VertexFeatures {
            authority: scores.authority[i],
            hub: scores.hub[i],
            degree_norm: degree_coeff_internal(snap, u),
            transitivity: transitivity_internal(snap, u),
        };
    });
    Ok(FeatureTable {
        rows,
        index: Arc::clone(snap.index()),
        hits_iterations: scores.iterations,
        hits_residual: scores.residual,
    })
}

/// Feature column selector for histograms and ranking.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FeatureColumn {
    Authority,
    Hub,
    DegreeNorm,
    Transitivity,
}

impl FeatureColumn {
    pub fn value(&self, f: &VertexFeatures) -> f64 {
        match self {
            FeatureColumn::Authority => f.authority,
            FeatureColumn::Hub => f.hub,
            FeatureColumn::DegreeNorm => f.degree_norm,
            FeatureColumn::Transitivity => f.transitivity,
        }
    }
}

/// Value transform applied before binning.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ValueTransform {
    Identity,
    /// `ln(x + 1)`, matching the log-scaled score histograms.
    Log1p,
}

impl ValueTransform {
    fn apply(&self, x: f64) -> f64 {
        match self {
            ValueTransform::Identity => x,
            ValueTransform::Log1p => x.ln_1p(),
        }
    }
}

/// Equal-width histogram of one feature column after an optional
/// transform. Returns `(bin_lower, count)` rows; counts sum to the vertex
/// count. An empty table yields an empty histogram.
pub fn feature_histogram(
    table: &FeatureTable,
    column: FeatureColumn,
    bins: usize,
    transform: ValueTransform,
) -> Result<Vec<(f64, usize)>> {
    if bins == 0 {
        return Err(Error::InvalidArgument("bins must be at least 1".into()));
    }
    if table.is_empty() {
        return Ok(Vec::new());
    }
    let values: Vec<f64> = table
        .rows
        .iter()
        .map(|f| transform.apply(column.value(f)))
        .collect();
    Ok(equal_width_histogram(&values, bins))
}

fn equal_width_histogram(values: &[f64], bins: usize) -> Vec<(f64, usize)> {
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let width = (max - min) / bins as f64;
    let mut counts = vec![0usize; bins];
    for &x in values {
        let idx = if width > 0.0 {
            (((x - min) / width) as usize).min(bins - 1)
        } else {
            0
        };
        counts[idx] += 1;
    }
    counts
        .into_iter()
        .enumerate()
        .map(|(i, c)| (min + i as f64 * width, c))
        .collect()
}
