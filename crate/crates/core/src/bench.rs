//! Batch runs over a graph corpus and their aggregated metrics.

use std::path::Path;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use serde::{Deserialize, Serialize};

use crate::cfg::Cfg;
use crate::milp::{Limits, SolveStatus};
use crate::strategies::{GenerationReport, Strategy};
use crate::synth::{Manifest, ManifestEntry};

/// Holistic runs are skipped on graphs above this complexity.
pub const HOLISTIC_MAX_CC: usize = 10;
pub const DEFAULT_SEEDS: usize = 50;
pub const DEFAULT_RUN_SECONDS: f64 = 60.0;

#[derive(Debug, Clone)]
pub struct BenchConfig {
    pub strategies: Vec<Strategy>,
    pub limits: Limits,
    pub jobs: usize,
    pub holistic_max_cc: usize,
}

impl BenchConfig {
    pub fn new(strategies: Vec<Strategy>) -> Self {
        BenchConfig {
            strategies,
            limits: Limits::with_time(DEFAULT_RUN_SECONDS),
            jobs: 1,
            holistic_max_cc: HOLISTIC_MAX_CC,
        }
    }
}

/// Outcome of one (graph, strategy) run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub group: String,
    pub seed: u64,
    pub strategy: String,
    pub k: usize,
    pub skipped: bool,
    pub success: bool,
    pub paths: usize,
    pub rank: usize,
    pub covered_edges: usize,
    pub total_edges: usize,
    /// A time or node budget ended the run before it could finish.
    pub budget_hit: bool,
    pub error: Option<String>,
    pub wall_time_s: f64,
}

impl RunRecord {
    fn from_report(entry: &ManifestEntry, report: &GenerationReport) -> Self {
        let budget_hit =
            report.iterations.iter().any(|r| matches!(r.status, Some(SolveStatus::TimedOut | SolveStatus::Feasible)))
                || report.failure.as_deref().is_some_and(|f| f.contains("time limit"));
        RunRecord {
            group: entry.group.clone(),
            seed: entry.seed,
            strategy: report.strategy.id().to_string(),
            k: report.k,
            skipped: false,
            success: report.success,
            paths: report.paths.len(),
            rank: report.rank,
            covered_edges: report.edge_coverage.covered,
            total_edges: report.edge_coverage.total,
            budget_hit,
            error: report.failure.clone(),
            wall_time_s: report.wall_time_s,
        }
    }

    fn without_run(entry: &ManifestEntry, strategy: Strategy, skipped: bool, error: Option<String>) -> Self {
        RunRecord {
            group: entry.group.clone(),
            seed: entry.seed,
            strategy: strategy.id().to_string(),
            k: entry.cc,
            skipped,
            success: false,
            paths: 0,
            rank: 0,
            covered_edges: 0,
            total_edges: 0,
            budget_hit: false,
            error,
            wall_time_s: 0.0,
        }
    }
}

/// Aggregated metrics of one (group, strategy) pair. Percentages are means
/// over runs; `mean_time_s` is `None` when any run hit its budget.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsRow {
    pub group: String,
    pub method: String,
    pub runs: usize,
    pub successes: usize,
    pub skipped: bool,
    pub success_pct: f64,
    pub coverage_pct: f64,
    pub independent_pct: f64,
    pub mean_time_s: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Experiment {
    pub records: Vec<RunRecord>,
    pub metrics: Vec<MetricsRow>,
}

/// Runs every strategy on every manifest entry. Graph paths are resolved
/// against `base`. Failures are recorded per run and never abort the batch.
pub fn run_experiment(manifest: &Manifest, base: &Path, config: &BenchConfig) -> Experiment {
    let tasks: Vec<(usize, Strategy)> =
        (0..manifest.entries.len()).flat_map(|i| config.strategies.iter().map(move |&s| (i, s))).collect();
    let graphs: Vec<Result<Cfg, String>> = manifest
        .entries
        .iter()
        .map(|e| {
            crate::read_file(&base.join(&e.path)).and_then(|text| Cfg::from_json(&text)).map_err(|err| err.to_string())
        })
        .collect();
    let run_one = |(i, strategy): (usize, Strategy)| -> RunRecord {
        let entry = &manifest.entries[i];
        match &graphs[i] {
            Err(e) => RunRecord::without_run(entry, strategy, false, Some(e.clone())),
            Ok(cfg) if strategy.is_holistic() && cfg.cyclomatic_complexity() > config.holistic_max_cc => {
                RunRecord::without_run(entry, strategy, true, Some("skipped: scale".into()))
            }
            Ok(cfg) => RunRecord::from_report(entry, &strategy.run(cfg, config.limits)),
        }
    };
    let mut slots: Vec<Option<RunRecord>> = vec![None; tasks.len()];
    if config.jobs <= 1 {
        for (slot, &task) in slots.iter_mut().zip(&tasks) {
            *slot = Some(run_one(task));
        }
    } else {
        let next = AtomicUsize::new(0);
        let done = Mutex::new(&mut slots);
        std::thread::scope(|scope| {
            for _ in 0..config.jobs {
                scope.spawn(|| loop {
                    let t = next.fetch_add(1, Ordering::Relaxed);
                    let Some(&task) = tasks.get(t) else { break };
                    let record = run_one(task);
                    done.lock().expect("no worker panicked")[t] = Some(record);
                });
            }
        });
    }
    let records: Vec<RunRecord> = slots.into_iter().map(|r| r.expect("every task ran")).collect();
    let metrics = aggregate(&records);
    Experiment { records, metrics }
}

/// Groups records by (group, strategy) in first-appearance order.
pub fn aggregate(records: &[RunRecord]) -> Vec<MetricsRow> {
    let mut keys: Vec<(&str, &str)> = Vec::new();
    for r in records {
        let key = (r.group.as_str(), r.strategy.as_str());
        if !keys.contains(&key) {
            keys.push(key);
        }
    }
    keys.into_iter()
        .map(|(group, method)| {
            let runs: Vec<&RunRecord> = records.iter().filter(|r| r.group == group && r.strategy == method).collect();
            let n = runs.len() as f64;
            let mean = |f: &dyn Fn(&RunRecord) -> f64| runs.iter().map(|r| f(r)).sum::<f64>() / n;
            let skipped = runs.iter().all(|r| r.skipped);
            let successes = runs.iter().filter(|r| r.success).count();
            MetricsRow {
                group: group.to_string(),
                method: method.to_string(),
                runs: runs.len(),
                successes,
                skipped,
                success_pct: 100.0 * successes as f64 / n,
                coverage_pct: mean(&|r| {
                    if r.total_edges == 0 {
                        0.0
                    } else {
                        100.0 * r.covered_edges as f64 / r.total_edges as f64
                    }
                }),
                independent_pct: mean(&|r| 100.0 * r.rank as f64 / r.k.max(1) as f64),
                mean_time_s: (!skipped && !runs.iter().any(|r| r.budget_hit)).then(|| mean(&|r| r.wall_time_s)),
            }
        })
        .collect()
}

const HEADER: [&str; 6] = ["group", "method", "success %", "coverage %", "time s", "independent %"];

fn cells(row: &MetricsRow) -> [String; 6] {
    if row.skipped {
        return [row.group.clone(), row.method.clone(), "skipped: scale".into(), "-".into(), "-".into(), "-".into()];
    }
    [
        row.group.clone(),
        row.method.clone(),
        format!("{:.1}", row.success_pct),
        format!("{:.1}", row.coverage_pct),
        row.mean_time_s.map_or_else(|| "-".to_string(), |t| format!("{t:.3}")),
        format!("{:.1}", row.independent_pct),
    ]
}

pub fn render_csv(metrics: &[MetricsRow]) -> String {
    let mut out = HEADER.join(",") + "\n";
    for row in metrics {
        out += &(cells(row).join(",") + "\n");
    }
    out
}

pub fn render_text(metrics: &[MetricsRow]) -> String {
    let rows: Vec<[String; 6]> = metrics.iter().map(cells).collect();
    let mut widths = HEADER.map(str::len);
    for r in &rows {
        for (w, c) in widths.iter_mut().zip(r) {
            *w = (*w).max(c.len());
        }
    }
    let line = |cols: &[String]| -> String {
        let padded: Vec<String> = cols
            .iter()
            .zip(widths)
            .enumerate()
            .map(|(i, (c, w))| if i < 2 { format!("{c:<w$}") } else { format!("{c:>w$}") })
            .collect();
        padded.join("  ").trim_end().to_string() + "\n"
    };
    let mut out = line(&HEADER.map(String::from));
    out += &(widths.iter().map(|&w| "-".repeat(w)).collect::<Vec<_>>().join("  ") + "\n");
    for r in &rows {
        out += &line(r);
    }
    out
}

/// Writes `metrics.csv`, `metrics.txt` and `runs.jsonl` into `dir`.
pub fn write_outputs(dir: &Path, experiment: &Experiment) -> Result<(), crate::Error> {
    std::fs::create_dir_all(dir).map_err(|source| crate::Error::Io { path: dir.display().to_string(), source })?;
    crate::write_file(&dir.join("metrics.csv"), &render_csv(&experiment.metrics))?;
    crate::write_file(&dir.join("metrics.txt"), &render_text(&experiment.metrics))?;
    let mut jsonl = String::new();
    for r in &experiment.records {
        jsonl += &(serde_json::to_string(r)? + "\n");
    }
    crate::write_file(&dir.join("runs.jsonl"), &jsonl)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record(group: &str, strategy: &str, success: bool, budget_hit: bool) -> RunRecord {
        RunRecord {
            group: group.into(),
            seed: 0,
            strategy: strategy.into(),
            k: 4,
            skipped: false,
            success,
            paths: 4,
            rank: if success { 4 } else { 3 },
            covered_edges: 5,
            total_edges: 5,
            budget_hit,
            error: None,
            wall_time_s: 0.5,
        }
    }

    #[test]
    fn empty_corpus_gives_empty_table() {
        let exp = run_experiment(&Manifest::default(), Path::new("."), &BenchConfig::new(Strategy::ALL.to_vec()));
        assert!(exp.records.is_empty() && exp.metrics.is_empty());
        assert_eq!(render_csv(&exp.metrics).lines().count(), 1);
    }

    #[test]
    fn one_row_csv() {
        let m = aggregate(&[record("g", "bfs", true, false)]);
        assert_eq!(
            render_csv(&m),
            "group,method,success %,coverage %,time s,independent %\ng,bfs,100.0,100.0,0.500,100.0\n"
        );
    }

    #[test]
    fn budget_hits_and_skips_render_as_dashes() {
        let m = aggregate(&[
            record("g", "holistic", true, true),
            record("g", "holistic", false, false),
            RunRecord { skipped: true, ..record("h", "holistic", false, false) },
        ]);
        assert_eq!(m[0].success_pct, 50.0);
        assert_eq!(m[0].independent_pct, 87.5);
        assert_eq!(m[0].mean_time_s, None);
        let text = render_text(&m);
        assert!(text.lines().nth(2).unwrap().contains(" - "));
        assert!(text.contains("skipped: scale"));
    }
}
