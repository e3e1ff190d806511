//! Binary classification metrics: confusion counts, per-class rates,
//! F-measure, MCC, ROC area, and PRC area (average precision), plus the
//! two-class report layout with a support-weighted average row.
//!
//! Degenerate 0/0 denominators evaluate to 0 throughout. ROC area is the
//! normalized Mann-Whitney statistic computed exactly with mid-rank ties,
//! which agrees with trapezoidal curve integration whenever scores are
//! tie-free.

use std::io::Write;

use crate::dataset::Label;
use crate::error::{Error, Result};

/// Confusion counts for a designated positive class.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ConfusionCounts {
    pub true_pos: usize,
    pub false_pos: usize,
    pub true_neg: usize,
    pub false_neg: usize,
}

impl ConfusionCounts {
    pub fn total(&self) -> usize {
        self.true_pos + self.false_pos + self.true_neg + self.false_neg
    }
}

/// Counts prediction/label agreement with `positive` as the positive class.
pub fn confusion(
    predictions: &[Label],
    labels: &[Label],
    positive: Label,
) -> Result<ConfusionCounts> {
    if predictions.len() != labels.len() {
        return Err(Error::InvalidArgument(format!(
            "predictions ({}) and labels ({}) must have equal length",
            predictions.len(),
            labels.len()
        )));
    }
    if predictions.is_empty() {
        return Err(Error::InvalidArgument(
            "cannot build a confusion matrix from zero instances".into(),
        ));
    }
    let mut c = ConfusionCounts {
        true_pos: 0,
        false_pos: 0,
        true_neg: 0,
        false_neg: 0,
    };
    for (&pred, &actual) in predictions.iter().zip(labels) {
        match (pred == positive, actual == positive) {
            (true, true) => c.true_pos += 1,
            (true, false) => c.false_pos += 1,
            (false, false) => c.true_neg += 1,
            (false, true) => c.false_neg += 1,
        }
    }
    Ok(c)
}

/// Threshold metrics of one confusion matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassMetrics {
    pub tp_rate: f64,
    pub fp_rate: f64,
    pub precision: f64,
    pub recall: f64,
    pub f_measure: f64,
    pub mcc: f64,
}

fn ratio(num: f64, den: f64) -> f64 {
    if den == 0.0 {
        0.0
    } else {
        num / den
    }
}

pub fn class_metrics(c: &ConfusionCounts) -> ClassMetrics {
    let (tp, fp, tn, fn_) = (
        c.true_pos as f64,
        c.false_pos as f64,
        c.true_neg as f64,
        c.false_neg as f64,
    );
    let recall = ratio(tp, tp + fn_);
    let precision = ratio(tp, tp + fp);
    let fp_rate = ratio(fp, fp + tn);
    let f_measure = ratio(2.0 * precision * recall, precision + recall);
    let mcc_den = ((tp + fp) * (tp + fn_) * (tn + fp) * (tn + fn_)).sqrt();
    let mcc = ratio(tp * tn - fp * fn_, mcc_den);
    ClassMetrics {
        tp_rate: recall,
        fp_rate,
        precision,
        recall,
        f_measure,
        mcc,
    }
}

/// ROC area: `P(score_pos > score_neg) + ½·P(score_pos = score_neg)`,
/// computed exactly via mid-rank sums. `true` marks the positive class.
pub fn roc_area(scores: &[f64], labels: &[bool]) -> Result<f64> {
    if scores.len() != labels.len() {
        return Err(Error::InvalidArgument(
            "scores and labels must have equal length".into(),
        ));
    }
    let n_pos = labels.iter().filter(|&&l| l).count();
    let n_neg = labels.len() - n_pos;
    if n_pos == 0 || n_neg == 0 {
        return Err(Error::Metric(
            "ROC area requires both classes present".into(),
        ));
    }

    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]));

    let mut rank_sum_pos = 0.0;
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && scores[order[j + 1]] == scores[order[i]] {
            j += 1;
        }
        // Ranks are 1-based; tied scores share the mid-rank.
        let mid_rank = (i + 1 + j + 1) as f64 / 2.0;
        for &idx in &order[i..=j] {
            if labels[idx] {
                rank_sum_pos += mid_rank;
            }
        }
        i = j + 1;
    }

    let n_pos_f = n_pos as f64;
    Ok((rank_sum_pos - n_pos_f * (n_pos_f + 1.0) / 2.0) / (n_pos_f * n_neg as f64))
}

/// PRC area as average precision: precision at each positive's rank in
/// descending score order, averaged over the positives. Tied scores form
/// one group whose precision is evaluated at the group's end.
pub fn prc_area(scores: &[f64], labels: &[bool]) -> Result<f64> {
    if scores.len() != labels.len() {
        return Err(Error::InvalidArgument(
            "scores and labels must have equal length".into(),
        ));
    }
    let n_pos = labels.iter().filter(|&&l| l).count();
    if n_pos == 0 {
        return Err(Error::Metric(
            "PRC area requires at least one positive".into(),
        ));
    }

    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]));

    let mut sum = 0.0;
    let mut cum_pos = 0usize;
    let mut cum_all = 0usize;
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && scores[order[j + 1]] == scores[order[i]] {
            j += 1;
        }
        let group_pos = order[i..=j].iter().filter(|&&idx| labels[idx]).count();
        cum_pos += group_pos;
        cum_all += j - i + 1;
        sum += group_pos as f64 * (cum_pos as f64 / cum_all as f64);
        i = j + 1;
    }

    Ok(sum / n_pos as f64)
}

/// One row of the evaluation report.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricsRow {
    pub tp_rate: f64,
    pub fp_rate: f64,
    pub precision: f64,
    pub recall: f64,
    pub f_measure: f64,
    pub mcc: f64,
    pub roc_area: f64,
    pub prc_area: f64,
}

impl MetricsRow {
    fn from_parts(cm: ClassMetrics, roc: f64, prc: f64) -> Self {
        MetricsRow {
            tp_rate: cm.tp_rate,
            fp_rate: cm.fp_rate,
            precision: cm.precision,
            recall: cm.recall,
            f_measure: cm.f_measure,
            mcc: cm.mcc,
            roc_area: roc,
            prc_area: prc,
        }
    }

    fn weighted_with(&self, other: &MetricsRow, w_self: f64, w_other: f64) -> MetricsRow {
        let total = w_self + w_other;
        let avg = |a: f64, b: f64| (a * w_self + b * w_other) / total;
        MetricsRow {
            tp_rate: avg(self.tp_rate, other.tp_rate),
            fp_rate: avg(self.fp_rate, other.fp_rate),
            precision: avg(self.precision, other.precision),
            recall: avg(self.recall, other.recall),
            f_measure: avg(self.f_measure, other.f_measure),
            mcc: avg(self.mcc, other.mcc),
            roc_area: avg(self.roc_area, other.roc_area),
            prc_area: avg(self.prc_area, other.prc_area),
        }
    }
}

/// Per-class rows plus the support-weighted average, matching the
/// `class,tp_rate,...,prc_area` CSV layout.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricsReport {
    pub real_row: MetricsRow,
    pub false_row: MetricsRow,
    pub weighted_avg: MetricsRow,
    pub support_real: usize,
    pub support_false: usize,
}

impl MetricsReport {
    pub fn weighted_f_measure(&self) -> f64 {
        self.weighted_avg.f_measure
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(
            w,
            "class,tp_rate,fp_rate,precision,recall,f_measure,mcc,roc_area,prc_area"
        )?;
        for (name, row) in [
            ("real", &self.real_row),
            ("false", &self.false_row),
            ("weighted_avg", &self.weighted_avg),
        ] {
            writeln!(
                w,
                "{},{},{},{},{},{},{},{},{}",
                name,
                row.tp_rate,
                row.fp_rate,
                row.precision,
                row.recall,
                row.f_measure,
                row.mcc,
                row.roc_area,
                row.prc_area
            )?;
        }
        Ok(())
    }
}

/// Builds the full report from scores oriented toward the `real` class
/// (probability of `real`), hard predictions, and true labels.
///
/// The `false` row treats `false` as the positive class; its ranking
/// metrics use `1 − score`.
pub fn build_report(
    scores_real: &[f64],
    predictions: &[Label],
    labels: &[Label],
) -> Result<MetricsReport> {
    if scores_real.len() != predictions.len() || predictions.len() != labels.len() {
        return Err(Error::InvalidArgument(
            "scores, predictions, and labels must have equal length".into(),
        ));
    }
    let support_real = labels.iter().filter(|&&l| l == Label::Real).count();
    let support_false = labels.len() - support_real;
    if support_real == 0 || support_false == 0 {
        return Err(Error::Metric(
            "report requires both classes present in the labels".into(),
        ));
    }

    let pos_real: Vec<bool> = labels.iter().map(|&l| l == Label::Real).collect();
    let real_cm = class_metrics(&confusion(predictions, labels, Label::Real)?);
    let real_row = MetricsRow::from_parts(
        real_cm,
        roc_area(scores_real, &pos_real)?,
        prc_area(scores_real, &pos_real)?,
    );

    let scores_false: Vec<f64> = scores_real.iter().map(|s| 1.0 - s).collect();
    let pos_false: Vec<bool> = pos_real.iter().map(|&p| !p).collect();
    let false_cm = class_metrics(&confusion(predictions, labels, Label::False)?);
    let false_row = MetricsRow::from_parts(
        false_cm,
        roc_area(&scores_false, &pos_false)?,
        prc_area(&scores_false, &pos_false)?,
    );

    let weighted_avg =
        real_row.weighted_with(&false_row, support_real as f64, support_false as f64);

    Ok(MetricsReport {
        real_row,
        false_row,
        weighted_avg,
        support_real,
        support_false,
    })
}
