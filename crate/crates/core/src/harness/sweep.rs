use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::config::{ExperimentConfig, Metric};
use super::run::{run_experiment, write_results, ExperimentOutput};
use super::HarnessError;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub n: usize,
    pub runs: usize,
    pub completed: usize,
    pub timeout_fraction: f64,
    /// Over completed runs only.
    pub median: Option<f64>,
    pub mean: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepSummary {
    pub points: Vec<SweepPoint>,
    /// Least-squares slope of `log2 median` against `log2 n`; needs three
    /// sizes with at least one completed run.
    pub slope: Option<f64>,
}

pub fn median(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let mid = v.len() / 2;
    Some(if v.len() % 2 == 1 { v[mid] } else { (v[mid - 1] + v[mid]) / 2.0 })
}

/// Ordinary least squares; returns `(slope, intercept)`.
pub fn fit_line(points: &[(f64, f64)]) -> Option<(f64, f64)> {
    if points.len() < 2 {
        return None;
    }
    let m = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / m;
    let my = points.iter().map(|p| p.1).sum::<f64>() / m;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    Some((slope, my - slope * mx))
}

/// Summarizes `(n, value)` observations; `None` values are censored.
/// Sizes appear in first-seen order.
pub fn summarize(observations: &[(usize, Option<f64>)]) -> SweepSummary {
    let mut sizes: Vec<usize> = Vec::new();
    for &(n, _) in observations {
        if !sizes.contains(&n) {
            sizes.push(n);
        }
    }
    let points: Vec<SweepPoint> = sizes
        .into_iter()
        .map(|n| {
            let all: Vec<Option<f64>> = observations.iter().filter(|o| o.0 == n).map(|o| o.1).collect();
            let done: Vec<f64> = all.iter().flatten().copied().collect();
            SweepPoint {
                n,
                runs: all.len(),
                completed: done.len(),
                timeout_fraction: (all.len() - done.len()) as f64 / all.len() as f64,
                median: median(&done),
                mean: (!done.is_empty()).then(|| done.iter().sum::<f64>() / done.len() as f64),
            }
        })
        .collect();
    let fit: Vec<(f64, f64)> = points
        .iter()
        .filter_map(|p| p.median.filter(|&m| m > 0.0).map(|m| ((p.n as f64).log2(), m.log2())))
        .collect();
    let slope = if fit.len() >= 3 { fit_line(&fit).map(|f| f.0) } else { None };
    SweepSummary { points, slope }
}

impl SweepSummary {
    pub fn csv(&self) -> String {
        let mut out = String::from("n,runs,completed,timeout_fraction,median_rounds,mean_rounds\n");
        let opt = |v: Option<f64>| v.map_or(String::new(), |x| format!("{x:.3}"));
        for p in &self.points {
            writeln!(
                out,
                "{},{},{},{:.4},{},{}",
                p.n,
                p.runs,
                p.completed,
                p.timeout_fraction,
                opt(p.median),
                opt(p.mean)
            )
            .unwrap();
        }
        out
    }

    /// Gnuplot-ready `log2 n` / `log2 median` columns.
    pub fn plot_data(&self) -> String {
        let mut out = String::from("# log2(n) log2(median_rounds)\n");
        for p in &self.points {
            if let Some(m) = p.median.filter(|&m| m > 0.0) {
                writeln!(out, "{:.6} {:.6}", (p.n as f64).log2(), m.log2()).unwrap();
            }
        }
        out
    }
}

/// The observations a sweep fits, per the config's metric.
pub fn observations(config: &ExperimentConfig, output: &ExperimentOutput) -> Result<Vec<(usize, Option<f64>)>, HarnessError> {
    output
        .cells
        .iter()
        .map(|c| {
            let value = match config.metric {
                Metric::Completion => c.completion_round,
                Metric::Sentinel => c
                    .sentinel_round
                    .ok_or_else(|| HarnessError::Config("metric `sentinel` needs a schedule with sentinels".into()))?,
            };
            Ok((c.n, value.map(f64::from)))
        })
        .collect()
}

pub struct SweepReport {
    pub output: ExperimentOutput,
    pub summary: SweepSummary,
}

/// Runs the experiment, writes all outputs named in the config, and fits
/// the scaling slope. Fails after writing when fewer than three sizes
/// completed.
pub fn sweep(config: &ExperimentConfig) -> Result<SweepReport, HarnessError> {
    let mut sizes = config.n.clone();
    sizes.sort_unstable();
    sizes.dedup();
    if sizes.len() < 3 {
        return Err(HarnessError::Config("a sweep needs at least three n values".into()));
    }
    let output = run_experiment(config)?;
    let summary = summarize(&observations(config, &output)?);
    if let Some(csv) = &config.outputs.csv {
        write_results(config, &output, csv)?;
    }
    if let Some(path) = &config.outputs.summary {
        std::fs::write(path, summary.csv())?;
    }
    if let Some(path) = &config.outputs.plot {
        std::fs::write(path, summary.plot_data())?;
    }
    if summary.slope.is_none() {
        let completed = summary.points.iter().filter(|p| p.completed > 0).count();
        return Err(HarnessError::InsufficientPoints { completed });
    }
    Ok(SweepReport { output, summary })
}
