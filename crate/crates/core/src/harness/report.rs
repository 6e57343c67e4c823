use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::config::ExperimentKind;
use super::runner::{ExperimentOutput, RunRecord, SpectralSummary};
use super::{HarnessError, RNG_ID};
use crate::topology::Topology;

/// Histogram bin width for shares.
pub const BIN_WIDTH: f64 = 0.01;
/// Distance from the lower end of the range that counts as the maximum share.
pub const ENDPOINT_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub count: usize,
    pub mean: f64,
    pub min: f64,
    pub max: f64,
    pub p10: f64,
    pub p50: f64,
    pub p90: f64,
}

/// Nearest-rank summary statistics; `None` for an empty sample.
pub fn summarize(values: &[f64]) -> Option<Summary> {
    if values.is_empty() {
        return None;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let q = |p: f64| v[((p * v.len() as f64).ceil() as usize).clamp(1, v.len()) - 1];
    Some(Summary {
        count: v.len(),
        mean: v.iter().sum::<f64>() / v.len() as f64,
        min: v[0],
        max: v[v.len() - 1],
        p10: q(0.1),
        p50: q(0.5),
        p90: q(0.9),
    })
}

/// Delay eccentricity of every candidate head with the best and worst case.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HeadBounds {
    pub per_node: Vec<f64>,
    pub best: f64,
    pub worst: f64,
}

pub fn head_bounds(topo: &Topology) -> HeadBounds {
    let per_node: Vec<f64> = (0..topo.node_count()).map(|h| topo.delay_eccentricity(h)).collect();
    let best = per_node.iter().copied().fold(f64::INFINITY, f64::min);
    let worst = per_node.iter().copied().fold(0.0, f64::max);
    HeadBounds { per_node, best, worst }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    pub lo: f64,
    pub width: f64,
    pub counts: Vec<usize>,
}

impl Histogram {
    /// Bins of [`BIN_WIDTH`] covering `[lo, hi]`; values within
    /// [`ENDPOINT_TOL`] outside the range go to the end bins.
    pub fn build(lo: f64, hi: f64, values: &[f64]) -> Self {
        let bins = (((hi - lo) / BIN_WIDTH).round() as usize).max(1);
        let mut counts = vec![0; bins];
        for &v in values {
            if v < lo - ENDPOINT_TOL || v > hi + ENDPOINT_TOL {
                continue;
            }
            let k = (((v - lo) / BIN_WIDTH).floor().max(0.0) as usize).min(bins - 1);
            counts[k] += 1;
        }
        Histogram {
            lo,
            width: BIN_WIDTH,
            counts,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregateReport {
    pub rng: String,
    pub trials: usize,
    pub converged: usize,
    pub failed: usize,
    pub failures: Vec<(u64, String)>,
    pub time: Option<Summary>,
    pub metric: Option<Summary>,
    /// Empirical head distribution `p̂_h` over converged trials with a head.
    pub head_distribution: Vec<f64>,
    pub head_bounds: Option<HeadBounds>,
    /// Mean `Δmax` over the trials that define `p̂_h`.
    pub delta_mean_headed: Option<f64>,
    /// `Σ_h p̂_h max_j τ_{h→j}`, averaged per trial when topologies vary.
    pub delta_bound: Option<f64>,
    pub tau_max: Option<f64>,
    /// Mean `Δmax / τ_max` over converged trials.
    pub ratio: Option<f64>,
    pub prediction_matches: Option<usize>,
    pub max_sum_error: Option<f64>,
    pub orders_preserved: Option<bool>,
    pub histogram: Option<Histogram>,
    pub max_share_fraction: Option<f64>,
}

fn empty(records: &[RunRecord]) -> AggregateReport {
    let failures: Vec<(u64, String)> = records
        .iter()
        .filter_map(|r| r.error.as_ref().map(|e| (r.seed, e.clone())))
        .collect();
    let times: Vec<f64> = records.iter().filter(|r| r.converged).map(|r| r.time).collect();
    AggregateReport {
        rng: RNG_ID.to_string(),
        trials: records.len(),
        converged: records.iter().filter(|r| r.converged).count(),
        failed: failures.len(),
        failures,
        time: summarize(&times),
        metric: None,
        head_distribution: Vec::new(),
        head_bounds: None,
        delta_mean_headed: None,
        delta_bound: None,
        tau_max: None,
        ratio: None,
        prediction_matches: None,
        max_sum_error: None,
        orders_preserved: None,
        histogram: None,
        max_share_fraction: None,
    }
}

pub fn aggregate_sync(records: &[RunRecord], topo: Option<&Topology>, tau_max: Option<f64>) -> AggregateReport {
    let mut rep = empty(records);
    let conv: Vec<&RunRecord> = records.iter().filter(|r| r.converged).collect();
    let deltas: Vec<f64> = conv.iter().filter_map(|r| r.metric).collect();
    rep.metric = summarize(&deltas);
    let headed: Vec<&&RunRecord> = conv.iter().filter(|r| r.head.is_some()).collect();
    let nodes = records.iter().filter_map(|r| r.head).max().map_or(0, |h| h + 1);
    let nodes = topo.map_or(nodes, Topology::node_count);
    let mut dist = vec![0.0; nodes];
    for r in &headed {
        dist[r.head.expect("filtered")] += 1.0;
    }
    if !headed.is_empty() {
        for p in &mut dist {
            *p /= headed.len() as f64;
        }
        let k = headed.len() as f64;
        rep.delta_mean_headed = Some(headed.iter().filter_map(|r| r.metric).sum::<f64>() / k);
        rep.delta_bound = Some(match topo {
            Some(t) => (0..nodes).map(|h| dist[h] * t.delay_eccentricity(h)).sum(),
            None => headed.iter().filter_map(|r| r.head_bound).sum::<f64>() / k,
        });
    }
    rep.head_distribution = dist;
    rep.head_bounds = topo.map(head_bounds);
    rep.tau_max = tau_max;
    rep.ratio = match (tau_max, &rep.metric) {
        (Some(t), Some(m)) => Some(m.mean / t),
        _ => None,
    };
    rep
}

pub fn aggregate_sched(records: &[RunRecord], theta_range: Option<(f64, f64)>) -> AggregateReport {
    let mut rep = empty(records);
    let thetas: Vec<f64> = records.iter().filter(|r| r.converged).filter_map(|r| r.metric).collect();
    rep.metric = summarize(&thetas);
    rep.prediction_matches = Some(records.iter().filter(|r| r.matched == Some(true)).count());
    rep.max_sum_error = records.iter().filter_map(|r| r.sum_error).reduce(f64::max);
    rep.orders_preserved = Some(records.iter().all(|r| r.order_preserved != Some(false)));
    if let Some((lo, hi)) = theta_range {
        rep.histogram = Some(Histogram::build(lo, hi, &thetas));
        let at_max = thetas.iter().filter(|&&t| (t - lo).abs() <= ENDPOINT_TOL).count();
        rep.max_share_fraction = Some(at_max as f64 / records.len().max(1) as f64);
    }
    rep
}

/// Per-trial CSV with columns `seed, converged, time, <metric>, head`.
pub fn records_csv(records: &[RunRecord], metric_name: &str) -> String {
    let mut out = format!("seed,converged,time,{metric_name},head\n");
    for r in records {
        let metric = r.metric.map(|m| m.to_string()).unwrap_or_default();
        let head = r.head.map(|h| h.to_string()).unwrap_or_default();
        writeln!(out, "{},{},{},{},{}", r.seed, r.converged, r.time, metric, head).expect("write to string");
    }
    out
}

fn histogram_csv(h: &Histogram) -> String {
    let mut out = String::from("lo,hi,count\n");
    for (k, c) in h.counts.iter().enumerate() {
        let lo = h.lo + k as f64 * h.width;
        writeln!(out, "{:.2},{:.2},{}", lo, lo + h.width, c).expect("write to string");
    }
    out
}

/// Pretty JSON with the aggregate of every group and the spectral report.
pub fn summary_json(output: &ExperimentOutput) -> Result<String, HarnessError> {
    #[derive(Serialize)]
    struct GroupSummary<'a> {
        label: &'a str,
        size: Option<usize>,
        aggregate: &'a AggregateReport,
    }
    #[derive(Serialize)]
    struct FileSummary<'a> {
        kind: ExperimentKind,
        rng: &'a str,
        base_seed: u64,
        groups: Vec<GroupSummary<'a>>,
        spectral: Option<&'a SpectralSummary>,
    }
    let summary = FileSummary {
        kind: output.kind,
        rng: &output.rng,
        base_seed: output.base_seed,
        groups: output
            .groups
            .iter()
            .map(|g| GroupSummary {
                label: &g.label,
                size: g.size,
                aggregate: &g.aggregate,
            })
            .collect(),
        spectral: output.spectral.as_ref(),
    };
    let mut text = serde_json::to_string_pretty(&summary).map_err(|e| HarnessError::Config(e.to_string()))?;
    text.push('\n');
    Ok(text)
}

/// Writes per-group trial CSVs, histograms and a JSON summary into `dir`.
pub fn emit_results(output: &ExperimentOutput, dir: &Path) -> Result<Vec<PathBuf>, HarnessError> {
    fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    let mut write = |name: String, body: String| -> Result<(), HarnessError> {
        let path = dir.join(name);
        fs::write(&path, body)?;
        written.push(path);
        Ok(())
    };
    let single = output.groups.len() == 1;
    for g in &output.groups {
        let suffix = if single { String::new() } else { format!("_{}", g.label) };
        write(format!("trials{suffix}.csv"), records_csv(&g.records, &output.metric_name))?;
        if let Some(h) = &g.aggregate.histogram {
            write(format!("histogram{suffix}.csv"), histogram_csv(h))?;
        }
    }
    if output.groups.is_empty() && output.spectral.is_none() {
        write("trials.csv".into(), records_csv(&[], &output.metric_name))?;
    }
    write("summary.json".into(), summary_json(output)?)?;
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::topology::generators::{line, star};

    #[test]
    fn quantiles_and_empty_summary() {
        assert!(summarize(&[]).is_none());
        let s = summarize(&[3.0, 1.0, 2.0, 4.0]).unwrap();
        assert_eq!((s.min, s.max, s.p50, s.mean), (1.0, 4.0, 2.0, 2.5));
    }

    #[test]
    fn bounds_examples() {
        let b = head_bounds(&line(5, 0.25 / 4.0).unwrap());
        assert!((b.best - 0.125).abs() < 1e-12 && (b.worst - 0.25).abs() < 1e-12);
        let b = head_bounds(&line(2, 0.01).unwrap());
        assert_eq!((b.best, b.worst), (0.01, 0.01));
        let b = head_bounds(&star(4, 0.01).unwrap());
        assert!((b.per_node[0] - 0.01).abs() < 1e-15 && (b.per_node[1] - 0.02).abs() < 1e-15);
    }

    #[test]
    fn header_only_csv() {
        assert_eq!(records_csv(&[], "delta_max"), "seed,converged,time,delta_max,head\n");
    }

    #[test]
    fn histogram_bins_cover_range() {
        let h = Histogram::build(0.05, 0.30, &[0.05, 0.0500000001, 0.30, 0.155, 0.4]);
        assert_eq!(h.counts.len(), 25);
        assert_eq!(h.counts[0], 2);
        assert_eq!(h.counts[24], 1);
        assert_eq!(h.counts[10], 1);
        assert_eq!(h.counts.iter().sum::<usize>(), 4);
    }
}
