//! Acceptance suite. Runs without the libtest harness so that every
//! criterion prints one PASS or FAIL line, even under `cargo test`.

mod common;

use std::collections::BTreeSet;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::time::{Duration, Instant};

use basispath_core::extract::{extract_walk, ExtractError};
use basispath_core::fixtures;
use basispath_core::milp::{self, Limits, SolveStatus};
use basispath_core::models::{build_holistic, encode_assignment, incremental_model};
use basispath_core::synth::Manifest;
use basispath_core::{Cfg, GenerationReport, Strategy};

use common::{incidence, is_walk, rank_of};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(started: Instant, budget: Duration) -> Result<(), String> {
    ensure(started.elapsed() < budget, || {
        format!("took {:.1}s, budget {}s", started.elapsed().as_secs_f64(), budget.as_secs())
    })
}

/// Checks a report with the oracles: walks, rank, coverage and count.
fn valid_basis(cfg: &Cfg, report: &GenerationReport) -> Result<(), String> {
    let k = cfg.cyclomatic_complexity();
    let vectors: Vec<Vec<u32>> = report
        .paths
        .iter()
        .map(|p| {
            if is_walk(cfg, p.nodes()) {
                Ok(incidence(cfg, p.nodes()))
            } else {
                Err(format!("{} is not a source-to-sink walk", p.trace()))
            }
        })
        .collect::<Result<_, _>>()?;
    let rank = rank_of(&vectors);
    let covered = (0..cfg.edge_count()).filter(|&e| vectors.iter().any(|v| v[e] > 0)).count();
    ensure(vectors.len() == k && rank == k && covered == cfg.edge_count(), || {
        format!(
            "{}: {} paths, rank {rank}, coverage {covered}/{}, k {k}",
            report.strategy,
            vectors.len(),
            cfg.edge_count()
        )
    })
}

const HOLISTIC_NODES: u64 = 5000;

fn a1() -> Outcome {
    let started = Instant::now();
    let cfg = fixtures::double_diamond();
    let r = Strategy::IncrNovelty.run(&cfg, Limits::unlimited());
    valid_basis(&cfg, &r)?;
    ensure(r.paths.len() == 3, || format!("{} paths", r.paths.len()))?;
    within(started, Duration::from_secs(5))?;
    Ok("3 paths, rank 3, coverage 8/8".into())
}

fn a2() -> Outcome {
    let started = Instant::now();
    let cfg = fixtures::double_diamond();
    let all: BTreeSet<usize> = (0..cfg.edge_count()).collect();
    for novelty in [false, true] {
        let (model, _) = incremental_model(&cfg, &all, novelty);
        let s = milp::solve(&model, Limits::unlimited()).map_err(|e| e.to_string())?;
        ensure(s.status == SolveStatus::Infeasible, || format!("status {:?}", s.status))?;
    }
    within(started, Duration::from_secs(1))?;
    Ok("incremental model with all 8 edges covered is infeasible".into())
}

fn a3() -> Outcome {
    let started = Instant::now();
    let cfg = fixtures::illustrative();
    let flows: Vec<Vec<u32>> = fixtures::HOLISTIC_NO_CONNECTIVITY_FLOWS
        .iter()
        .map(|pieces| {
            let mut v = vec![0u32; cfg.edge_count()];
            for p in *pieces {
                for (x, y) in v.iter_mut().zip(incidence(&cfg, p)) {
                    *x += y;
                }
            }
            v
        })
        .collect();

    let (loose, loose_layout) = build_holistic(&cfg, false);
    let values = encode_assignment(&cfg, &loose, &loose_layout, &flows);
    loose
        .check_assignment(&values, milp::FEAS_TOL)
        .map_err(|v| format!("model without connectivity rejects it: {v:?}"))?;

    let (strict, strict_layout) = build_holistic(&cfg, true);
    let values = encode_assignment(&cfg, &strict, &strict_layout, &flows);
    let violated: Vec<&str> = strict
        .violated_rows(&values, milp::FEAS_TOL)
        .iter()
        .map(|&(row, _)| strict.constraints()[row].group.as_str())
        .collect();
    ensure(violated.contains(&"aux_flow"), || format!("violated groups {violated:?}"))?;

    let path4 = &flows[3];
    match extract_walk(&cfg, path4) {
        Err(ExtractError::DisconnectedFlow { .. }) => {}
        other => return Err(format!("path 4 decoded as {other:?}")),
    }
    within(started, Duration::from_secs(1))?;
    Ok(format!(
        "path 4 feasible without connectivity, {} aux_flow rows violated with it",
        violated.iter().filter(|g| **g == "aux_flow").count()
    ))
}

fn a4() -> Outcome {
    let started = Instant::now();
    let mut checked = Vec::new();
    for (name, cfg) in fixtures::small_graphs() {
        if cfg.edge_count() > 10 {
            continue;
        }
        let want = common::brute_force_min_length(&cfg).ok_or_else(|| format!("{name}: no basis exists"))?;
        let r = Strategy::Holistic.run(&cfg, Limits::unlimited());
        valid_basis(&cfg, &r).map_err(|e| format!("{name}: {e}"))?;
        let status = r.iterations.first().and_then(|i| i.status);
        ensure(status == Some(SolveStatus::Optimal), || format!("{name}: status {status:?}"))?;
        let got = r.total_length() as u32;
        ensure(got == want, || format!("{name}: holistic {got}, brute force {want}"))?;
        checked.push(format!("{name}={got}"));
    }
    within(started, Duration::from_secs(60))?;
    Ok(checked.join(" "))
}

fn a5_reports() -> Vec<GenerationReport> {
    let cfg = fixtures::illustrative();
    [
        (Strategy::Holistic, Limits::with_nodes(HOLISTIC_NODES)),
        (Strategy::IncrGreedy, Limits::unlimited()),
        (Strategy::IncrNovelty, Limits::unlimited()),
    ]
    .into_iter()
    .map(|(s, limits)| s.run(&cfg, limits))
    .collect()
}

fn a5() -> Outcome {
    let started = Instant::now();
    let cfg = fixtures::illustrative();
    let reports = a5_reports();
    for r in &reports {
        valid_basis(&cfg, r)?;
    }
    within(started, Duration::from_secs(120))?;
    Ok(reports
        .iter()
        .map(|r| format!("{}: 9 paths, length {}", r.strategy, r.total_length()))
        .collect::<Vec<_>>()
        .join("; "))
}

fn corpus() -> Vec<Cfg> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/corpus-cc10-v9");
    let manifest = Manifest::load(&dir.join("manifest.json")).expect("shipped manifest");
    assert_eq!(manifest.entries.len(), 50);
    manifest
        .entries
        .iter()
        .map(|e| Cfg::from_json(&std::fs::read_to_string(dir.join(&e.path)).unwrap()).unwrap())
        .collect()
}

const A6_STRATEGIES: [Strategy; 3] = [Strategy::IncrNovelty, Strategy::IncrGreedy, Strategy::Bfs];

fn a6_reports(graphs: &[Cfg]) -> Vec<Vec<GenerationReport>> {
    A6_STRATEGIES.iter().map(|s| graphs.iter().map(|g| s.run(g, Limits::with_time(60.0))).collect()).collect()
}

fn a6() -> Outcome {
    let graphs = corpus();
    let reports = a6_reports(&graphs);
    let mut rates = Vec::new();
    for runs in &reports {
        let mut ok = 0;
        for (g, r) in graphs.iter().zip(runs) {
            ensure(r.wall_time_s < 60.0, || format!("{} exceeded 60 s", r.strategy))?;
            if valid_basis(g, r).is_ok() {
                ok += 1;
            }
            ensure(r.success == valid_basis(g, r).is_ok(), || {
                format!("{} reported success {} against the oracle", r.strategy, r.success)
            })?;
        }
        rates.push(100.0 * ok as f64 / graphs.len() as f64);
    }
    let (novelty, greedy, bfs) = (rates[0], rates[1], rates[2]);
    let line = format!("novelty {novelty:.1}%, greedy {greedy:.1}%, bfs {bfs:.1}%");
    ensure(novelty == 100.0 && greedy <= novelty && bfs <= greedy && greedy >= 80.0 && bfs < novelty, || line.clone())?;
    Ok(line)
}

fn a7() -> Outcome {
    let started = Instant::now();
    let mut rng = common::rng(7);
    let (mut feasible, mut infeasible) = (0, 0);
    for case in 0..200 {
        let ip = common::SmallIp::random(&mut rng);
        let want = ip.enumerate_optimum();
        let s = milp::solve(&ip.to_model(), Limits::unlimited()).map_err(|e| format!("case {case}: {e}"))?;
        match want {
            None => {
                ensure(s.status == SolveStatus::Infeasible, || {
                    format!("case {case}: {:?} on an infeasible IP", s.status)
                })?;
                infeasible += 1;
            }
            Some(opt) => {
                ensure(s.status == SolveStatus::Optimal, || format!("case {case}: {:?}, optimum {opt}", s.status))?;
                let got = ip.verify(&s.values).map_err(|e| format!("case {case}: {e}"))?;
                ensure(got == opt, || format!("case {case}: solver {got}, enumeration {opt}"))?;
                ensure((s.objective - opt as f64).abs() < 1e-6, || {
                    format!("case {case}: reported objective {}", s.objective)
                })?;
                feasible += 1;
            }
        }
    }
    within(started, Duration::from_secs(120))?;
    Ok(format!("{feasible} optimal, {infeasible} infeasible"))
}

fn a8() -> Outcome {
    let path_sets =
        |reports: &[GenerationReport]| reports.iter().map(GenerationReport::path_set_json).collect::<Vec<_>>();
    let cfg = fixtures::double_diamond();
    let a1 = || path_sets(&[Strategy::IncrNovelty.run(&cfg, Limits::unlimited())]);
    ensure(a1() == a1(), || "double diamond path sets differ".into())?;
    ensure(path_sets(&a5_reports()) == path_sets(&a5_reports()), || "illustrative path sets differ".into())?;
    let graphs = corpus();
    let flat = |r: Vec<Vec<GenerationReport>>| path_sets(&r.into_iter().flatten().collect::<Vec<_>>());
    let first = flat(a6_reports(&graphs));
    ensure(first == flat(a6_reports(&graphs)), || "corpus path sets differ".into())?;
    Ok(format!("{} path sets byte-identical across two runs", 2 + first.len()))
}

fn main() {
    let criteria: [Criterion; 8] = [
        ("A1 double diamond completeness", a1),
        ("A2 greedy trap", a2),
        ("A3 connectivity rows", a3),
        ("A4 holistic optimality", a4),
        ("A5 illustrative graph", a5),
        ("A6 scalability ordering", a6),
        ("A7 solver soundness", a7),
        ("A8 determinism", a8),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (name, run) in criteria {
        if !filter.is_empty() && !filter.iter().any(|f| name.contains(f.as_str())) {
            continue;
        }
        let started = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".into()))
        });
        let secs = started.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS {name} ({secs:.2}s): {detail}"),
            Err(reason) => {
                failed += 1;
                println!("FAIL {name} ({secs:.2}s): {reason}");
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
