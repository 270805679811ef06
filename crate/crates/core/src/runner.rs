//! Replicated experiments over a list of mixing values.
//!
//! Each (mixing index, replicate) pair owns a random stream derived from the
//! root seed, so a replicate's output depends only on its own key. Runs may
//! execute in any order and on any number of threads; results are merged by
//! key before aggregation.

use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::Path;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::engine;
use crate::export::{export_edges, export_nodes, EdgeList, ExportFormat};
use crate::metrics::{census_csv, component_census, series_csv, ComponentSummary, MetricsRow, METRIC_NAMES};
use crate::rng::RngStream;
use crate::types::{ModelParams, ParamErrors};

pub const DEFAULT_BURN_IN: u64 = 500;

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub params: ModelParams,
    pub ticks: u64,
    pub replicates: u32,
    pub mixing_values: Vec<f64>,
    pub metrics_window: usize,
}

#[derive(Debug, Error)]
pub enum RunnerError {
    #[error("invalid experiment: {0}")]
    Spec(String),
    #[error("mixing {mixing}: {source}")]
    Params {
        mixing: f64,
        #[source]
        source: ParamErrors,
    },
    #[error("burn-in {burn_in} must be below the run length {ticks}")]
    BurnIn { burn_in: u64, ticks: u64 },
    #[error("thread pool: {0}")]
    Pool(#[from] rayon::ThreadPoolBuildError),
}

impl ExperimentSpec {
    pub fn validate(&self) -> Result<(), RunnerError> {
        if self.ticks == 0 {
            return Err(RunnerError::Spec("ticks must be at least 1".into()));
        }
        if self.replicates == 0 {
            return Err(RunnerError::Spec("replicates must be at least 1".into()));
        }
        if self.metrics_window == 0 {
            return Err(RunnerError::Spec("metrics window must be at least 1".into()));
        }
        if self.mixing_values.is_empty() {
            return Err(RunnerError::Spec("no mixing values".into()));
        }
        for &mixing in &self.mixing_values {
            self.params_for(mixing)
                .validate()
                .map_err(|source| RunnerError::Params { mixing, source })?;
        }
        Ok(())
    }

    pub fn params_for(&self, mixing: f64) -> ModelParams {
        ModelParams { mixing, ..self.params.clone() }
    }
}

/// Stream number of a replicate; independent of the replicate count so that
/// adding replicates never changes existing ones.
pub fn stream_id(mixing_index: usize, replicate: u32) -> u64 {
    ((mixing_index as u64) << 32) | u64::from(replicate)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReplicateRun {
    pub mixing_index: usize,
    pub mixing: f64,
    pub replicate: u32,
    pub stream: u64,
    pub series: Vec<MetricsRow>,
    pub census: Vec<ComponentSummary>,
    pub edges: EdgeList,
    pub agents_created: u64,
    pub newcomers_total: u64,
}

/// One replicate: `ticks` steps from an empty population.
pub fn run_replicate(
    params: &ModelParams,
    mixing_index: usize,
    replicate: u32,
    ticks: u64,
    window: usize,
) -> ReplicateRun {
    let stream = stream_id(mixing_index, replicate);
    let mut series = Vec::with_capacity(ticks as usize);
    let mut newcomers_total = 0u64;
    let state = engine::run(params, ticks, RngStream::new(params.seed, stream), window, |team, state| {
        newcomers_total += team.newcomer_count as u64;
        series.push(MetricsRow::observe(state));
    });
    ReplicateRun {
        mixing_index,
        mixing: params.mixing,
        replicate,
        stream,
        series,
        census: component_census(state.graph()),
        edges: EdgeList::from_graph(state.graph()),
        agents_created: state.created_count(),
        newcomers_total,
    }
}

/// Cross-replicate mean and sample standard deviation at one tick, in
/// [`METRIC_NAMES`] order.
#[derive(Debug, Clone, PartialEq)]
pub struct AggregateRow {
    pub tick: u64,
    pub mean: [f64; 6],
    pub sd: [f64; 6],
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentResult {
    pub spec: ExperimentSpec,
    /// Sorted by (mixing index, replicate).
    pub runs: Vec<ReplicateRun>,
    /// One series per mixing value.
    pub aggregates: Vec<Vec<AggregateRow>>,
}

impl ExperimentResult {
    pub fn runs_for(&self, mixing_index: usize) -> impl Iterator<Item = &ReplicateRun> {
        self.runs.iter().filter(move |r| r.mixing_index == mixing_index)
    }
}

fn mean_sd(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    if n == 0 {
        return (0.0, 0.0);
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    if n == 1 {
        return (mean, 0.0);
    }
    let ss: f64 = values.iter().map(|v| (v - mean) * (v - mean)).sum();
    (mean, (ss / (n - 1) as f64).sqrt())
}

/// Tick-aligned mean and sample standard deviation over replicates.
pub fn aggregate(runs: &[&ReplicateRun]) -> Vec<AggregateRow> {
    let Some(first) = runs.first() else {
        return Vec::new();
    };
    let mut column = Vec::with_capacity(runs.len());
    (0..first.series.len())
        .map(|t| {
            let mut mean = [0.0; 6];
            let mut sd = [0.0; 6];
            for m in 0..6 {
                column.clear();
                column.extend(runs.iter().map(|r| r.series[t].values()[m]));
                (mean[m], sd[m]) = mean_sd(&column);
            }
            AggregateRow {
                tick: first.series[t].tick,
                mean,
                sd,
            }
        })
        .collect()
}

/// Runs every (mixing, replicate) pair. `jobs` caps worker threads; `None`
/// uses the global pool. Output does not depend on `jobs`.
pub fn run_experiment(spec: &ExperimentSpec, jobs: Option<usize>) -> Result<ExperimentResult, RunnerError> {
    spec.validate()?;
    let tasks: Vec<(usize, u32)> = (0..spec.mixing_values.len())
        .flat_map(|m| (0..spec.replicates).map(move |r| (m, r)))
        .collect();
    let work = || {
        tasks
            .par_iter()
            .map(|&(m, r)| {
                let mixing = spec.mixing_values[m];
                let run = run_replicate(&spec.params_for(mixing), m, r, spec.ticks, spec.metrics_window);
                log::info!("mixing {mixing} replicate {r} done");
                run
            })
            .collect::<Vec<_>>()
    };
    let mut runs = match jobs {
        Some(n) => rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build()?.install(work),
        None => work(),
    };
    runs.sort_by_key(|r| (r.mixing_index, r.replicate));

    let aggregates = (0..spec.mixing_values.len())
        .map(|m| {
            let group: Vec<&ReplicateRun> = runs.iter().filter(|r| r.mixing_index == m).collect();
            aggregate(&group)
        })
        .collect();
    Ok(ExperimentResult {
        spec: spec.clone(),
        runs,
        aggregates,
    })
}

/// Ordinary least-squares slope of `ys` against `xs`; 0 when undefined.
pub fn least_squares_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len().min(ys.len());
    if n < 2 {
        return 0.0;
    }
    let mx = xs[..n].iter().sum::<f64>() / n as f64;
    let my = ys[..n].iter().sum::<f64>() / n as f64;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for (x, y) in xs[..n].iter().zip(&ys[..n]) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
    }
    if sxx == 0.0 {
        0.0
    } else {
        sxy / sxx
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricSummary {
    pub metric: &'static str,
    /// Over every (replicate, tick > burn-in) value.
    pub mean: f64,
    pub sd: f64,
    /// Least-squares slope of the cross-replicate mean series after burn-in.
    pub slope: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MixingSummary {
    pub mixing: f64,
    pub metrics: Vec<MetricSummary>,
}

impl MixingSummary {
    pub fn metric(&self, name: &str) -> &MetricSummary {
        self.metrics
            .iter()
            .find(|m| m.metric == name)
            .unwrap_or_else(|| panic!("unknown metric `{name}`"))
    }
}

/// Stationary-tail statistics per mixing value, over ticks after `burn_in`.
pub fn summarize(result: &ExperimentResult, burn_in: u64) -> Result<Vec<MixingSummary>, RunnerError> {
    let ticks = result.spec.ticks;
    if burn_in >= ticks {
        return Err(RunnerError::BurnIn { burn_in, ticks });
    }
    Ok(result
        .spec
        .mixing_values
        .iter()
        .enumerate()
        .map(|(m, &mixing)| {
            let tail: Vec<&AggregateRow> = result.aggregates[m].iter().filter(|a| a.tick > burn_in).collect();
            let xs: Vec<f64> = tail.iter().map(|a| a.tick as f64).collect();
            let metrics = METRIC_NAMES
                .iter()
                .enumerate()
                .map(|(k, &name)| {
                    let pooled: Vec<f64> = result
                        .runs_for(m)
                        .flat_map(|r| r.series.iter().filter(|row| row.tick > burn_in))
                        .map(|row| row.values()[k])
                        .collect();
                    let (mean, sd) = mean_sd(&pooled);
                    let ys: Vec<f64> = tail.iter().map(|a| a.mean[k]).collect();
                    MetricSummary {
                        metric: name,
                        mean,
                        sd,
                        slope: least_squares_slope(&xs, &ys),
                    }
                })
                .collect();
            MixingSummary { mixing, metrics }
        })
        .collect())
}

pub fn aggregate_csv(rows: &[AggregateRow]) -> String {
    let mut out = String::from("tick");
    for name in METRIC_NAMES {
        let _ = write!(out, ",{name}_mean,{name}_sd");
    }
    out.push('\n');
    for row in rows {
        let _ = write!(out, "{}", row.tick);
        for k in 0..6 {
            let _ = write!(out, ",{},{}", row.mean[k], row.sd[k]);
        }
        out.push('\n');
    }
    out
}

#[derive(Serialize)]
struct RunRecord {
    mixing: f64,
    replicate: u32,
    seed: u64,
    stream: u64,
    agents_created: u64,
    final_active_agents: usize,
}

#[derive(Serialize)]
struct SummaryFile<'a> {
    params: &'a ModelParams,
    ticks: u64,
    replicates: u32,
    metrics_window: usize,
    mixing_values: &'a [f64],
    burn_in: u64,
    runs: Vec<RunRecord>,
    summaries: &'a [MixingSummary],
}

pub fn summary_json(result: &ExperimentResult, summaries: &[MixingSummary], burn_in: u64) -> String {
    let spec = &result.spec;
    let file = SummaryFile {
        params: &spec.params,
        ticks: spec.ticks,
        replicates: spec.replicates,
        metrics_window: spec.metrics_window,
        mixing_values: &spec.mixing_values,
        burn_in,
        runs: result
            .runs
            .iter()
            .map(|r| RunRecord {
                mixing: r.mixing,
                replicate: r.replicate,
                seed: spec.params.seed,
                stream: r.stream,
                agents_created: r.agents_created,
                final_active_agents: r.series.last().map_or(0, |s| s.active_agents),
            })
            .collect(),
        summaries,
    };
    let mut text = serde_json::to_string_pretty(&file).expect("plain data serializes");
    text.push('\n');
    text
}

/// Writes the per-replicate series, census, edge and node files of one run.
pub fn write_replicate(dir: &Path, run: &ReplicateRun) -> io::Result<()> {
    let key = format!("{}_{}", run.mixing, run.replicate);
    fs::write(dir.join(format!("series_{key}.csv")), series_csv(&run.series))?;
    fs::write(dir.join(format!("census_{key}.csv")), census_csv(&run.census))?;
    fs::write(dir.join(format!("edges_{key}.csv")), export_edges(&run.edges, ExportFormat::EdgeCsv))?;
    fs::write(dir.join(format!("nodes_{key}.csv")), export_nodes(&run.edges))?;
    Ok(())
}

/// Writes the full experiment file set into `dir`, creating it if needed.
pub fn write_experiment(dir: &Path, result: &ExperimentResult, burn_in: u64) -> Result<(), WriteError> {
    let summaries = summarize(result, burn_in)?;
    fs::create_dir_all(dir)?;
    for run in &result.runs {
        write_replicate(dir, run)?;
    }
    for (m, mixing) in result.spec.mixing_values.iter().enumerate() {
        fs::write(dir.join(format!("aggregate_{mixing}.csv")), aggregate_csv(&result.aggregates[m]))?;
    }
    fs::write(dir.join("summary.json"), summary_json(result, &summaries, burn_in))?;
    Ok(())
}

#[derive(Debug, Error)]
pub enum WriteError {
    #[error(transparent)]
    Runner(#[from] RunnerError),
    #[error(transparent)]
    Io(#[from] io::Error),
}
