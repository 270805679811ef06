use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use teamsim::runner::{
    aggregate, run_experiment, run_replicate, summarize, write_experiment, ExperimentResult, ExperimentSpec,
    ReplicateRun,
};
use teamsim::ModelParams;

fn spec(ticks: u64, replicates: u32, mixing_values: Vec<f64>) -> ExperimentSpec {
    ExperimentSpec {
        params: ModelParams::default(),
        ticks,
        replicates,
        mixing_values,
        metrics_window: 100,
    }
}

fn dir_bytes(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().to_string_lossy().into_owned(), fs::read(e.path()).unwrap())
        })
        .collect()
}

#[test]
fn replicate_order_does_not_change_outputs() {
    let s = spec(120, 3, vec![0.14, 0.79]);
    let result = run_experiment(&s, Some(2)).unwrap();

    let mut runs: Vec<ReplicateRun> = Vec::new();
    for m in (0..s.mixing_values.len()).rev() {
        for r in (0..s.replicates).rev() {
            runs.push(run_replicate(&s.params_for(s.mixing_values[m]), m, r, s.ticks, s.metrics_window));
        }
    }
    runs.sort_by_key(|r| (r.mixing_index, r.replicate));
    let aggregates = (0..2)
        .map(|m| aggregate(&runs.iter().filter(|r| r.mixing_index == m).collect::<Vec<_>>()))
        .collect();
    let manual = ExperimentResult { spec: s.clone(), runs, aggregates };
    assert_eq!(manual, result);

    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    write_experiment(a.path(), &result, 50).unwrap();
    write_experiment(b.path(), &manual, 50).unwrap();
    let files = dir_bytes(a.path());
    assert_eq!(files.len(), 2 * 3 * 4 + 2 + 1);
    assert_eq!(files, dir_bytes(b.path()));
}

#[test]
fn aggregates_are_exact_over_stored_series() {
    let result = run_experiment(&spec(60, 4, vec![0.46]), Some(1)).unwrap();
    let runs: Vec<&ReplicateRun> = result.runs_for(0).collect();
    for (t, row) in result.aggregates[0].iter().enumerate() {
        for k in 0..6 {
            let xs: Vec<f64> = runs.iter().map(|r| r.series[t].values()[k]).collect();
            let mut sum = 0.0;
            for x in &xs {
                sum += x;
            }
            let mean = sum / 4.0;
            let mut ss = 0.0;
            for x in &xs {
                ss += (x - mean) * (x - mean);
            }
            assert_eq!(row.mean[k], mean);
            assert_eq!(row.sd[k], (ss / 3.0).sqrt());
        }
    }
}

#[test]
fn zero_mixing_is_never_interdisciplinary() {
    let result = run_experiment(&spec(300, 3, vec![0.0]), None).unwrap();
    for run in &result.runs {
        assert!(run.series.iter().all(|r| r.pct_interdisciplinary == 0.0));
        assert!(run.census.iter().all(|c| c.basic == 0 || c.clinical == 0));
    }
}

#[test]
fn longer_and_wider_runs_extend_shorter_ones() {
    let short = run_experiment(&spec(50, 2, vec![0.14, 0.46]), None).unwrap();
    let long = run_experiment(&spec(80, 4, vec![0.14, 0.46]), None).unwrap();
    for s in &short.runs {
        let l = long
            .runs
            .iter()
            .find(|l| (l.mixing_index, l.replicate) == (s.mixing_index, s.replicate))
            .unwrap();
        assert_eq!(s.stream, l.stream);
        assert_eq!(&l.series[..50], &s.series[..]);
    }
}

#[test]
fn seed_change_changes_some_row() {
    let a = spec(100, 1, vec![0.46]);
    let mut b = a.clone();
    b.params.seed += 1;
    let (ra, rb) = (run_experiment(&a, None).unwrap(), run_experiment(&b, None).unwrap());
    assert_ne!(ra.runs[0].series, rb.runs[0].series);
}

#[test]
fn minimal_experiment() {
    let result = run_experiment(&spec(1, 1, vec![0.14, 0.46, 0.79]), None).unwrap();
    assert_eq!(result.runs.len(), 3);
    assert!(result.runs.iter().all(|r| r.series.len() == 1));
    assert!(result.aggregates.iter().all(|a| a.len() == 1 && a[0].sd == [0.0; 6]));
    assert!(summarize(&result, 0).is_ok());
    assert!(summarize(&result, 1).is_err());
}

#[test]
fn invalid_specs_are_rejected() {
    assert!(run_experiment(&spec(0, 1, vec![0.1]), None).is_err());
    assert!(run_experiment(&spec(10, 0, vec![0.1]), None).is_err());
    assert!(run_experiment(&spec(10, 1, vec![]), None).is_err());
    assert!(run_experiment(&spec(10, 1, vec![0.1, 1.2]), None).is_err());
}
