//! Views over persisted run records: factor means, box-plot statistics, Top-5 overlap,
//! and plot-ready CSV exports. Failed runs are skipped everywhere except the failure report.

use super::RunRecord;
use crate::error::{Error, Result};
use crate::metrics::{CurveKind, MetricName, ThresholdCurve};
use crate::model::HqnnConfig;
use serde::{Deserialize, Serialize};
use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::fmt::Write as _;
use std::str::FromStr;

pub const TOP_K: usize = 5;
pub const DEFAULT_MIN_COUNT: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Factor {
    Encoding,
    Architecture,
    Measurement,
    Shots,
}

impl Factor {
    pub const ALL: [Factor; 4] = [Factor::Encoding, Factor::Architecture, Factor::Measurement, Factor::Shots];

    pub fn slug(self) -> &'static str {
        match self {
            Factor::Encoding => "encoding",
            Factor::Architecture => "architecture",
            Factor::Measurement => "measurement",
            Factor::Shots => "shots",
        }
    }

    /// Sort key and display label of the config's level.
    fn level(self, c: &HqnnConfig) -> ((u64, u64), String) {
        match self {
            Factor::Encoding => ((c.encoding as u64, 0), c.encoding.label().to_string()),
            Factor::Architecture => ((c.architecture as u64, 0), c.architecture.label().to_string()),
            Factor::Measurement => ((c.measurement as u64, 0), c.measurement.label().to_string()),
            Factor::Shots => match c.shots.count() {
                None => ((0, 0), c.shots.to_string()),
                Some(n) => ((1, n as u64), c.shots.to_string()),
            },
        }
    }
}

impl fmt::Display for Factor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.slug())
    }
}

impl FromStr for Factor {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "encoding" => Ok(Factor::Encoding),
            "architecture" | "arch" => Ok(Factor::Architecture),
            "measurement" | "measure" => Ok(Factor::Measurement),
            "shots" => Ok(Factor::Shots),
            _ => Err(Error::Query(format!(
                "unknown factor `{s}` (valid: encoding, architecture, measurement, shots)"
            ))),
        }
    }
}

fn ok_values(records: &[RunRecord], metric: MetricName) -> impl Iterator<Item = (&RunRecord, f64)> {
    records
        .iter()
        .filter_map(move |r| r.metrics.as_ref().filter(|_| r.is_ok()).map(|m| (r, m.get(metric))))
}

fn group_by_level(records: &[RunRecord], factor: Factor, metric: MetricName) -> Result<Vec<(String, Vec<f64>)>> {
    let mut groups: BTreeMap<(u64, u64), (String, Vec<f64>)> = BTreeMap::new();
    for (r, v) in ok_values(records, metric) {
        let (key, label) = factor.level(&r.config);
        groups.entry(key).or_insert_with(|| (label, Vec::new())).1.push(v);
    }
    if groups.is_empty() {
        return Err(Error::Query("no successful records to aggregate".into()));
    }
    Ok(groups.into_values().collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelMean {
    pub level: String,
    pub mean: f64,
    /// Sample standard deviation; 0 for a single record.
    pub std: f64,
    pub n: usize,
}

pub fn factor_means(records: &[RunRecord], factor: Factor, metric: MetricName) -> Result<Vec<LevelMean>> {
    Ok(group_by_level(records, factor, metric)?
        .into_iter()
        .map(|(level, vals)| {
            let n = vals.len();
            let mean = vals.iter().sum::<f64>() / n as f64;
            let std = if n > 1 {
                (vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt()
            } else {
                0.0
            };
            LevelMean { level, mean, std, n }
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoxStats {
    pub level: String,
    pub n: usize,
    pub min: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub max: f64,
    /// Most extreme values inside the 1.5·IQR fences.
    pub whisker_low: f64,
    pub whisker_high: f64,
    pub outliers: Vec<f64>,
}

/// Linear interpolation between order statistics at position `p·(n−1)`.
fn quantile(sorted: &[f64], p: f64) -> f64 {
    let pos = p * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (pos - lo as f64) * (sorted[hi] - sorted[lo])
}

pub fn box_stats(level: impl Into<String>, values: &[f64]) -> BoxStats {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let (q1, median, q3) = (quantile(&v, 0.25), quantile(&v, 0.5), quantile(&v, 0.75));
    let iqr = q3 - q1;
    let (lo_fence, hi_fence) = (q1 - 1.5 * iqr, q3 + 1.5 * iqr);
    let inside: Vec<f64> = v.iter().copied().filter(|x| (lo_fence..=hi_fence).contains(x)).collect();
    BoxStats {
        level: level.into(),
        n: v.len(),
        min: v[0],
        q1,
        median,
        q3,
        max: v[v.len() - 1],
        whisker_low: inside.first().copied().unwrap_or(q1),
        whisker_high: inside.last().copied().unwrap_or(q3),
        outliers: v.iter().copied().filter(|x| !(lo_fence..=hi_fence).contains(x)).collect(),
    }
}

pub fn factor_distribution(records: &[RunRecord], factor: Factor, metric: MetricName) -> Result<Vec<BoxStats>> {
    Ok(group_by_level(records, factor, metric)?
        .into_iter()
        .map(|(level, vals)| box_stats(level, &vals))
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OverlapCell {
    /// 1-based.
    pub rank: usize,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OverlapRow {
    pub run_id: String,
    /// e.g. `Angle/Strong/Pauli-Y/400`.
    pub label: String,
    pub count: usize,
    /// One per requested metric; `None` when outside that metric's Top-5.
    pub cells: Vec<Option<OverlapCell>>,
}

impl OverlapRow {
    fn rank_key(&self) -> Vec<usize> {
        self.cells.iter().map(|c| c.map_or(TOP_K + 1, |c| c.rank)).collect()
    }
}

pub fn compact_label(c: &HqnnConfig) -> String {
    format!(
        "{}/{}/{}/{}",
        c.encoding.label(),
        c.architecture.label(),
        c.measurement.label(),
        c.shots
    )
}

/// Top-5 per metric (value descending, run_id ascending on ties), then configurations that
/// appear in at least `min_count` of those lists. Rows sort by count, then by the rank
/// vector in metric order, then by run_id.
pub fn top5_overlap(records: &[RunRecord], metrics: &[MetricName], min_count: usize) -> Result<Vec<OverlapRow>> {
    if metrics.is_empty() {
        return Err(Error::Query("overlap needs at least one metric".into()));
    }
    let mut rows: BTreeMap<String, OverlapRow> = BTreeMap::new();
    for (m_idx, &metric) in metrics.iter().enumerate() {
        let mut ranked: Vec<(&RunRecord, f64)> = ok_values(records, metric).collect();
        ranked.sort_by(|a, b| match b.1.total_cmp(&a.1) {
            Ordering::Equal => a.0.run_id.cmp(&b.0.run_id),
            o => o,
        });
        for (rank, (r, value)) in ranked.into_iter().take(TOP_K).enumerate() {
            let row = rows.entry(r.run_id.clone()).or_insert_with(|| OverlapRow {
                run_id: r.run_id.clone(),
                label: compact_label(&r.config),
                count: 0,
                cells: vec![None; metrics.len()],
            });
            row.count += 1;
            row.cells[m_idx] = Some(OverlapCell { rank: rank + 1, value });
        }
    }
    let mut out: Vec<OverlapRow> = rows.into_values().filter(|r| r.count >= min_count).collect();
    out.sort_by(|a, b| {
        b.count
            .cmp(&a.count)
            .then_with(|| a.rank_key().cmp(&b.rank_key()))
            .then_with(|| a.run_id.cmp(&b.run_id))
    });
    Ok(out)
}

/// `(run_id, error)` of every failed record.
pub fn failure_report(records: &[RunRecord]) -> Vec<(String, String)> {
    records
        .iter()
        .filter(|r| !r.is_ok())
        .map(|r| (r.run_id.clone(), r.error.clone().unwrap_or_default()))
        .collect()
}

pub fn factor_means_csv(factor: Factor, tables: &[(MetricName, Vec<LevelMean>)]) -> String {
    let mut out = String::from("factor,level,metric,mean,std,n\n");
    for (metric, rows) in tables {
        for r in rows {
            let _ = writeln!(out, "{factor},{},{metric},{},{},{}", r.level, r.mean, r.std, r.n);
        }
    }
    out
}

pub fn factor_distribution_csv(factor: Factor, metric: MetricName, rows: &[BoxStats]) -> String {
    let mut out = String::from("factor,level,metric,n,min,q1,median,q3,max,whisker_low,whisker_high,outliers\n");
    for r in rows {
        let outliers = r.outliers.iter().map(f64::to_string).collect::<Vec<_>>().join(";");
        let _ = writeln!(
            out,
            "{factor},{},{metric},{},{},{},{},{},{},{},{},{outliers}",
            r.level, r.n, r.min, r.q1, r.median, r.q3, r.max, r.whisker_low, r.whisker_high
        );
    }
    out
}

/// Cells rendered as `rank(value)` with four decimals, `--` when absent.
pub fn overlap_csv(metrics: &[MetricName], rows: &[OverlapRow]) -> String {
    let mut out = String::from("configuration,count");
    for m in metrics {
        let _ = write!(out, ",{m}");
    }
    out.push('\n');
    for r in rows {
        let _ = write!(out, "{},{}", r.label, r.count);
        for c in &r.cells {
            match c {
                Some(c) => {
                    let _ = write!(out, ",{}({:.4})", c.rank, c.value);
                }
                None => out.push_str(",--"),
            }
        }
        out.push('\n');
    }
    out
}

pub fn curve_csv(curve: &ThresholdCurve) -> String {
    let (x, y) = curve.kind.axis_names();
    let mut out = format!("threshold,{x},{y}\n");
    for ((t, xv), yv) in curve.thresholds.iter().zip(&curve.x_values).zip(&curve.y_values) {
        let _ = writeln!(out, "{t},{xv},{yv}");
    }
    out
}

/// One point per successful configuration at the report threshold.
pub fn scatter_csv(records: &[RunRecord], kind: CurveKind) -> String {
    let (x, y) = kind.axis_names();
    let mut out = format!("run_id,configuration,{x},{y}\n");
    for r in records.iter().filter(|r| r.is_ok()) {
        let Some(m) = &r.metrics else { continue };
        let (xv, yv) = match kind {
            CurveKind::MccF1 => (m.f1, m.mcc),
            CurveKind::SensSpec => (m.specificity, m.recall),
            CurveKind::Roc => (1.0 - m.specificity, m.recall),
        };
        let _ = writeln!(out, "{},{},{xv},{yv}", r.run_id, compact_label(&r.config));
    }
    out
}
