//! Confusion-matrix metrics, AUC, composite GPS scores and threshold sweeps.
//!
//! Ratios with a zero denominator evaluate to 0 and are listed in the report's
//! `degenerate` field instead of producing NaN.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

/// Decision threshold for scalar reports.
pub const DEFAULT_THRESHOLD: f64 = 0.5;
/// Number of evenly spaced thresholds in a curve.
pub const CURVE_POINTS: usize = 101;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionCounts {
    pub tp: u64,
    pub tn: u64,
    pub fp: u64,
    #[serde(rename = "fn")]
    pub fn_: u64,
}

impl ConfusionCounts {
    pub fn total(&self) -> u64 {
        self.tp + self.tn + self.fp + self.fn_
    }
}

/// Counts predictions `p ≥ threshold` as positive.
pub fn confusion(labels: &[u8], probabilities: &[f64], threshold: f64) -> Result<ConfusionCounts> {
    if labels.len() != probabilities.len() {
        return Err(Error::Validation(format!(
            "{} labels but {} probabilities",
            labels.len(),
            probabilities.len()
        )));
    }
    if labels.is_empty() {
        return Err(Error::Validation("no samples to evaluate".into()));
    }
    let mut c = ConfusionCounts::default();
    for (&y, &p) in labels.iter().zip(probabilities) {
        match (y == 1, p >= threshold) {
            (true, true) => c.tp += 1,
            (true, false) => c.fn_ += 1,
            (false, true) => c.fp += 1,
            (false, false) => c.tn += 1,
        }
    }
    Ok(c)
}

fn ratio(num: u64, den: u64, name: &'static str, degenerate: &mut Vec<String>) -> f64 {
    if den == 0 {
        degenerate.push(name.to_string());
        0.0
    } else {
        num as f64 / den as f64
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointMetrics {
    pub accuracy: f64,
    pub precision: f64,
    pub recall: f64,
    pub specificity: f64,
    pub f1: f64,
    pub balanced_accuracy: f64,
    pub degenerate: Vec<String>,
}

pub fn point_metrics(c: &ConfusionCounts) -> PointMetrics {
    let mut degenerate = Vec::new();
    let accuracy = ratio(c.tp + c.tn, c.total(), "accuracy", &mut degenerate);
    let precision = ratio(c.tp, c.tp + c.fp, "precision", &mut degenerate);
    let recall = ratio(c.tp, c.tp + c.fn_, "recall", &mut degenerate);
    let specificity = ratio(c.tn, c.tn + c.fp, "specificity", &mut degenerate);
    let f1 = if precision + recall > 0.0 {
        2.0 * precision * recall / (precision + recall)
    } else {
        degenerate.push("f1".into());
        0.0
    };
    PointMetrics {
        accuracy,
        precision,
        recall,
        specificity,
        f1,
        balanced_accuracy: (recall + specificity) / 2.0,
        degenerate,
    }
}

/// Matthews correlation coefficient; 0 when any marginal is empty.
pub fn mcc(c: &ConfusionCounts) -> f64 {
    let (tp, tn, fp, fn_) = (c.tp as f64, c.tn as f64, c.fp as f64, c.fn_ as f64);
    let den = (tp + fp) * (tp + fn_) * (tn + fp) * (tn + fn_);
    if den == 0.0 {
        return 0.0;
    }
    ((tp * tn - fp * fn_) / den.sqrt()).clamp(-1.0, 1.0)
}

/// Area under the ROC curve via the rank-sum statistic; tied scores count one half.
pub fn auc(labels: &[u8], scores: &[f64]) -> Result<f64> {
    if labels.len() != scores.len() {
        return Err(Error::Validation(format!(
            "{} labels but {} scores",
            labels.len(),
            scores.len()
        )));
    }
    let n_pos = labels.iter().filter(|&&y| y == 1).count();
    let n_neg = labels.len() - n_pos;
    if n_pos == 0 || n_neg == 0 {
        return Err(Error::Metric("AUC needs both classes present".into()));
    }
    if scores.iter().any(|s| s.is_nan()) {
        return Err(Error::Metric("NaN score".into()));
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
        // 1-based ranks i+1..=j+1 share their average.
        let avg_rank = (i + j + 2) as f64 / 2.0;
        rank_sum_pos += order[i..=j].iter().filter(|&&k| labels[k] == 1).count() as f64 * avg_rank;
        i = j + 1;
    }
    let (np, nn) = (n_pos as f64, n_neg as f64);
    Ok((rank_sum_pos - np * (np + 1.0) / 2.0) / (np * nn))
}

/// Harmonic mean; 0 if any component is zero or negative.
pub fn harmonic_mean(values: &[f64]) -> f64 {
    if values.is_empty() || values.iter().any(|&v| v <= 0.0 || v.is_nan()) {
        return 0.0;
    }
    values.len() as f64 / values.iter().map(|v| 1.0 / v).sum::<f64>()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GpsInputs {
    pub accuracy: f64,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub balanced_accuracy: f64,
    pub auc: f64,
    pub test_accuracy_mean: f64,
    pub cv_accuracy_mean: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GpsScores {
    pub gps1: f64,
    pub gps2: f64,
    pub gps3: f64,
    pub gps4: f64,
}

pub fn gps(m: &GpsInputs) -> GpsScores {
    GpsScores {
        gps1: harmonic_mean(&[m.balanced_accuracy, m.auc, m.f1]),
        gps2: harmonic_mean(&[m.accuracy, m.precision, m.recall, m.f1]),
        gps3: harmonic_mean(&[m.balanced_accuracy, m.auc, m.test_accuracy_mean]),
        gps4: harmonic_mean(&[m.balanced_accuracy, m.auc, m.f1, m.cv_accuracy_mean]),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CurveKind {
    /// x = F1, y = MCC.
    MccF1,
    /// x = specificity, y = sensitivity.
    SensSpec,
    /// x = false-positive rate, y = true-positive rate.
    Roc,
}

impl CurveKind {
    pub const ALL: [CurveKind; 3] = [CurveKind::MccF1, CurveKind::SensSpec, CurveKind::Roc];

    pub fn slug(self) -> &'static str {
        match self {
            CurveKind::MccF1 => "mcc-f1",
            CurveKind::SensSpec => "sens-spec",
            CurveKind::Roc => "roc",
        }
    }

    pub fn axis_names(self) -> (&'static str, &'static str) {
        match self {
            CurveKind::MccF1 => ("f1", "mcc"),
            CurveKind::SensSpec => ("specificity", "sensitivity"),
            CurveKind::Roc => ("fpr", "tpr"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdCurve {
    pub kind: CurveKind,
    pub thresholds: Vec<f64>,
    pub x_values: Vec<f64>,
    pub y_values: Vec<f64>,
}

pub fn threshold_curve(
    labels: &[u8],
    probabilities: &[f64],
    kind: CurveKind,
    n_thresholds: usize,
) -> Result<ThresholdCurve> {
    if n_thresholds < 2 {
        return Err(Error::Validation("a curve needs at least 2 thresholds".into()));
    }
    let thresholds: Vec<f64> = (0..n_thresholds)
        .map(|i| i as f64 / (n_thresholds - 1) as f64)
        .collect();
    let mut x_values = Vec::with_capacity(n_thresholds);
    let mut y_values = Vec::with_capacity(n_thresholds);
    for &t in &thresholds {
        let c = confusion(labels, probabilities, t)?;
        let pm = point_metrics(&c);
        let (x, y) = match kind {
            CurveKind::MccF1 => (pm.f1, mcc(&c)),
            CurveKind::SensSpec => (pm.specificity, pm.recall),
            CurveKind::Roc => (1.0 - pm.specificity, pm.recall),
        };
        x_values.push(x);
        y_values.push(y);
    }
    Ok(ThresholdCurve {
        kind,
        thresholds,
        x_values,
        y_values,
    })
}

/// Named scalar metrics available for ranking and aggregation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MetricName {
    Accuracy,
    Precision,
    Recall,
    Specificity,
    BalancedAccuracy,
    F1,
    Mcc,
    Auc,
    Gps1,
    Gps2,
    Gps3,
    Gps4,
    CvAccuracyMean,
    TestAccuracyMean,
    MccF1,
    SensSpec,
}

impl MetricName {
    pub const ALL: [MetricName; 16] = [
        MetricName::Accuracy,
        MetricName::Precision,
        MetricName::Recall,
        MetricName::Specificity,
        MetricName::BalancedAccuracy,
        MetricName::F1,
        MetricName::Mcc,
        MetricName::Auc,
        MetricName::Gps1,
        MetricName::Gps2,
        MetricName::Gps3,
        MetricName::Gps4,
        MetricName::CvAccuracyMean,
        MetricName::TestAccuracyMean,
        MetricName::MccF1,
        MetricName::SensSpec,
    ];

    /// Column set of the Top-5 overlap tables.
    pub const OVERLAP_DEFAULT: [MetricName; 7] = [
        MetricName::Accuracy,
        MetricName::MccF1,
        MetricName::SensSpec,
        MetricName::Gps1,
        MetricName::Gps2,
        MetricName::Gps3,
        MetricName::Gps4,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            MetricName::Accuracy => "accuracy",
            MetricName::Precision => "precision",
            MetricName::Recall => "recall",
            MetricName::Specificity => "specificity",
            MetricName::BalancedAccuracy => "balanced_accuracy",
            MetricName::F1 => "f1",
            MetricName::Mcc => "mcc",
            MetricName::Auc => "auc",
            MetricName::Gps1 => "gps1",
            MetricName::Gps2 => "gps2",
            MetricName::Gps3 => "gps3",
            MetricName::Gps4 => "gps4",
            MetricName::CvAccuracyMean => "cv_accuracy_mean",
            MetricName::TestAccuracyMean => "test_accuracy_mean",
            MetricName::MccF1 => "mcc_f1",
            MetricName::SensSpec => "sens_spec",
        }
    }
}

impl fmt::Display for MetricName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for MetricName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let norm = s.trim().to_ascii_lowercase().replace('-', "_");
        let norm = match norm.as_str() {
            "acc" => "accuracy",
            "sensitivity" | "tpr" => "recall",
            "tnr" => "specificity",
            other => other,
        };
        MetricName::ALL
            .into_iter()
            .find(|m| m.as_str() == norm)
            .ok_or_else(|| Error::Query(format!("unknown metric `{s}`")))
    }
}

/// Every scalar metric of one evaluated configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub threshold: f64,
    pub confusion: ConfusionCounts,
    pub accuracy: f64,
    pub precision: f64,
    pub recall: f64,
    pub specificity: f64,
    pub balanced_accuracy: f64,
    pub f1: f64,
    pub mcc: f64,
    pub auc: f64,
    pub gps1: f64,
    pub gps2: f64,
    pub gps3: f64,
    pub gps4: f64,
    pub cv_accuracy_mean: f64,
    /// Mean test accuracy of the per-fold models.
    pub test_accuracy_mean: f64,
    /// Harmonic mean of MCC and F1 at the report threshold (0 if MCC ≤ 0).
    pub mcc_f1: f64,
    /// Mean of sensitivity and specificity at the report threshold.
    pub sens_spec: f64,
    pub degenerate: Vec<String>,
}

impl MetricsReport {
    pub fn compute(
        labels: &[u8],
        probabilities: &[f64],
        cv_accuracy_mean: f64,
        test_accuracy_mean: f64,
    ) -> Result<Self> {
        let c = confusion(labels, probabilities, DEFAULT_THRESHOLD)?;
        let pm = point_metrics(&c);
        let mcc = mcc(&c);
        let auc = auc(labels, probabilities)?;
        let g = gps(&GpsInputs {
            accuracy: pm.accuracy,
            precision: pm.precision,
            recall: pm.recall,
            f1: pm.f1,
            balanced_accuracy: pm.balanced_accuracy,
            auc,
            test_accuracy_mean,
            cv_accuracy_mean,
        });
        Ok(Self {
            threshold: DEFAULT_THRESHOLD,
            confusion: c,
            accuracy: pm.accuracy,
            precision: pm.precision,
            recall: pm.recall,
            specificity: pm.specificity,
            balanced_accuracy: pm.balanced_accuracy,
            f1: pm.f1,
            mcc,
            auc,
            gps1: g.gps1,
            gps2: g.gps2,
            gps3: g.gps3,
            gps4: g.gps4,
            cv_accuracy_mean,
            test_accuracy_mean,
            mcc_f1: harmonic_mean(&[mcc, pm.f1]),
            sens_spec: pm.balanced_accuracy,
            degenerate: pm.degenerate,
        })
    }

    pub fn get(&self, name: MetricName) -> f64 {
        match name {
            MetricName::Accuracy => self.accuracy,
            MetricName::Precision => self.precision,
            MetricName::Recall => self.recall,
            MetricName::Specificity => self.specificity,
            MetricName::BalancedAccuracy => self.balanced_accuracy,
            MetricName::F1 => self.f1,
            MetricName::Mcc => self.mcc,
            MetricName::Auc => self.auc,
            MetricName::Gps1 => self.gps1,
            MetricName::Gps2 => self.gps2,
            MetricName::Gps3 => self.gps3,
            MetricName::Gps4 => self.gps4,
            MetricName::CvAccuracyMean => self.cv_accuracy_mean,
            MetricName::TestAccuracyMean => self.test_accuracy_mean,
            MetricName::MccF1 => self.mcc_f1,
            MetricName::SensSpec => self.sens_spec,
        }
    }

    /// Sets a named metric; used to build reports from published tables.
    pub fn set(&mut self, name: MetricName, value: f64) {
        let slot = match name {
            MetricName::Accuracy => &mut self.accuracy,
            MetricName::Precision => &mut self.precision,
            MetricName::Recall => &mut self.recall,
            MetricName::Specificity => &mut self.specificity,
            MetricName::BalancedAccuracy => &mut self.balanced_accuracy,
            MetricName::F1 => &mut self.f1,
            MetricName::Mcc => &mut self.mcc,
            MetricName::Auc => &mut self.auc,
            MetricName::Gps1 => &mut self.gps1,
            MetricName::Gps2 => &mut self.gps2,
            MetricName::Gps3 => &mut self.gps3,
            MetricName::Gps4 => &mut self.gps4,
            MetricName::CvAccuracyMean => &mut self.cv_accuracy_mean,
            MetricName::TestAccuracyMean => &mut self.test_accuracy_mean,
            MetricName::MccF1 => &mut self.mcc_f1,
            MetricName::SensSpec => &mut self.sens_spec,
        };
        *slot = value;
    }

    /// A report with every metric equal to `value` (MCC included).
    pub fn uniform(value: f64) -> Self {
        let mut r = Self {
            threshold: DEFAULT_THRESHOLD,
            confusion: ConfusionCounts::default(),
            accuracy: 0.0,
            precision: 0.0,
            recall: 0.0,
            specificity: 0.0,
            balanced_accuracy: 0.0,
            f1: 0.0,
            mcc: 0.0,
            auc: 0.0,
            gps1: 0.0,
            gps2: 0.0,
            gps3: 0.0,
            gps4: 0.0,
            cv_accuracy_mean: 0.0,
            test_accuracy_mean: 0.0,
            mcc_f1: 0.0,
            sens_spec: 0.0,
            degenerate: Vec::new(),
        };
        for m in MetricName::ALL {
            r.set(m, value);
        }
        r
    }

    /// Checks every field against its declared range.
    pub fn check_ranges(&self) -> Result<()> {
        for m in MetricName::ALL {
            let v = self.get(m);
            let (lo, hi) = if m == MetricName::Mcc { (-1.0, 1.0) } else { (0.0, 1.0) };
            if !(lo..=hi).contains(&v) {
                return Err(Error::Metric(format!("{m} = {v} outside [{lo}, {hi}]")));
            }
        }
        Ok(())
    }
}
