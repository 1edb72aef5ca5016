use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use basispath_core::bench::{self, BenchConfig};
use basispath_core::bridge::{self, LayoutFile};
use basispath_core::cfg::{to_dot, EdgeId};
use basispath_core::synth::{self, Manifest};
use basispath_core::{Cfg, Error, Limits, Strategy};

const EXIT_FAILED: u8 = 1;
const EXIT_INPUT: u8 = 2;

#[derive(Parser)]
#[command(name = "basispath", version, about = "Basis path generation for control-flow graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Validate a graph and print its cyclomatic complexity.
    Analyze { cfg: PathBuf },
    /// Generate a basis path set.
    Generate {
        cfg: PathBuf,
        #[arg(long, value_parser = parse_strategy, default_value = "incr-novelty")]
        strategy: Strategy,
        /// Wall-clock budget in seconds for the whole run.
        #[arg(long, env = "BASISPATH_TIME_LIMIT")]
        time_limit: Option<f64>,
        /// Branch-and-bound node budget per solve.
        #[arg(long)]
        node_limit: Option<u64>,
        /// Path set JSON destination.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Report JSON with per-iteration diagnostics.
        #[arg(long)]
        report: Option<PathBuf>,
        #[arg(long)]
        dot: Option<PathBuf>,
    },
    /// Write random graphs and a manifest.
    Synth {
        #[arg(long)]
        cc: usize,
        #[arg(long)]
        nodes: usize,
        /// First seed; subsequent graphs use consecutive seeds.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        count: usize,
        #[arg(long)]
        out_dir: PathBuf,
    },
    /// Run strategies over a corpus and write metric tables.
    Bench {
        #[arg(long)]
        manifest: PathBuf,
        /// Comma-separated strategy ids.
        #[arg(long, value_delimiter = ',', value_parser = parse_strategy, default_value = "holistic,incr-greedy,incr-novelty,bfs")]
        strategies: Vec<Strategy>,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        /// Per-run budget in seconds.
        #[arg(long, env = "BASISPATH_TIME_LIMIT", default_value_t = bench::DEFAULT_RUN_SECONDS)]
        time_limit: f64,
        #[arg(long)]
        node_limit: Option<u64>,
        #[arg(long)]
        out_dir: PathBuf,
    },
    /// Write a model in CPLEX LP format plus a `<out>-layout` file.
    ExportLp {
        cfg: PathBuf,
        #[arg(long, value_enum)]
        model: ModelArg,
        /// JSON array of already covered edge ids (incremental model).
        #[arg(long)]
        covered: Option<PathBuf>,
        /// Omit the connectivity rows (holistic model).
        #[arg(long)]
        no_connectivity: bool,
        /// Add the novelty penalty (incremental model).
        #[arg(long)]
        novelty: bool,
        #[arg(long)]
        out: PathBuf,
    },
    /// Verify an external solver's assignment and decode it into paths.
    ImportSolution {
        cfg: PathBuf,
        layout: PathBuf,
        solution: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ModelArg {
    Holistic,
    Incremental,
}

fn parse_strategy(s: &str) -> Result<Strategy, String> {
    s.parse()
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_INPUT)
        }
    }
}

fn read(path: &Path) -> Result<String, Error> {
    std::fs::read_to_string(path).map_err(|source| Error::Io { path: path.display().to_string(), source })
}

fn write(path: &Path, text: &str) -> Result<(), Error> {
    std::fs::write(path, text).map_err(|source| Error::Io { path: path.display().to_string(), source })
}

fn load_cfg(path: &Path) -> Result<Cfg, Error> {
    Cfg::from_json(&read(path)?)
}

fn limits(time: Option<f64>, nodes: Option<u64>) -> Limits {
    Limits { time: Some(time.map_or(Limits::DEFAULT_TIME, std::time::Duration::from_secs_f64)), nodes }
}

fn run(command: Command) -> Result<u8, Error> {
    match command {
        Command::Analyze { cfg } => {
            let g = load_cfg(&cfg)?;
            let norm = g.normalization();
            println!("nodes: {}", g.node_count());
            println!("edges: {}", g.edge_count());
            println!("source: {}", g.source());
            println!("sink: {}", g.sink());
            println!("cyclomatic complexity: {}", g.cyclomatic_complexity());
            if let Some(v) = norm.virtual_source {
                println!("virtual source added: {v}");
            }
            if let Some(v) = norm.virtual_sink {
                println!("virtual sink added: {v}");
            }
            println!("valid");
            Ok(0)
        }
        Command::Generate { cfg, strategy, time_limit, node_limit, out, report, dot } => {
            let g = load_cfg(&cfg)?;
            let result = strategy.run(&g, limits(time_limit, node_limit));
            for (i, p) in result.paths.iter().enumerate() {
                println!("path {}: {}", i + 1, p.trace());
            }
            println!(
                "strategy {}: {} of {} paths, rank {}, coverage {}/{}",
                strategy,
                result.paths.len(),
                result.k,
                result.rank,
                result.edge_coverage.covered,
                result.edge_coverage.total
            );
            if let Some(f) = &result.failure {
                println!("failure: {f}");
            }
            if let Some(path) = out {
                write(&path, &result.path_set_json())?;
            }
            if let Some(path) = report {
                write(&path, &(serde_json::to_string_pretty(&result.report_json())? + "\n"))?;
            }
            if let Some(path) = dot {
                write(&path, &to_dot(&g, &result.paths))?;
            }
            Ok(if result.success { 0 } else { EXIT_FAILED })
        }
        Command::Synth { cc, nodes, seed, count, out_dir } => {
            let manifest = synth::write_corpus(&out_dir, cc, nodes, seed, count)?;
            println!("wrote {} graphs to {}", manifest.entries.len(), out_dir.display());
            Ok(0)
        }
        Command::Bench { manifest, strategies, jobs, time_limit, node_limit, out_dir } => {
            let m = Manifest::load(&manifest)?;
            let base = manifest.parent().unwrap_or(Path::new("."));
            let mut config = BenchConfig::new(strategies);
            config.jobs = jobs.max(1);
            config.limits = Limits { time: Some(std::time::Duration::from_secs_f64(time_limit)), nodes: node_limit };
            let exp = bench::run_experiment(&m, base, &config);
            bench::write_outputs(&out_dir, &exp)?;
            print!("{}", bench::render_text(&exp.metrics));
            Ok(0)
        }
        Command::ExportLp { cfg, model, covered, no_connectivity, novelty, out } => {
            let g = load_cfg(&cfg)?;
            let layout = match model {
                ModelArg::Holistic => LayoutFile::holistic(&g, !no_connectivity),
                ModelArg::Incremental => {
                    let covered: BTreeSet<EdgeId> = match covered {
                        Some(p) => serde_json::from_str::<Vec<EdgeId>>(&read(&p)?)?.into_iter().collect(),
                        None => BTreeSet::new(),
                    };
                    if let Some(&bad) = covered.iter().find(|&&e| e >= g.edge_count()) {
                        return Err(Error::LayoutMismatch(format!("covered edge {bad} does not exist")));
                    }
                    LayoutFile::incremental(&g, &covered, novelty)
                }
            };
            let (lp, layout_text) = bridge::export(&g, &layout)?;
            write(&out, &lp)?;
            let mut layout_path = out.clone().into_os_string();
            layout_path.push("-layout");
            write(Path::new(&layout_path), &layout_text)?;
            println!("{} variables, {} constraints", layout.variables, layout.constraints);
            Ok(0)
        }
        Command::ImportSolution { cfg, layout, solution, out } => {
            let g = load_cfg(&cfg)?;
            let layout: LayoutFile = serde_json::from_str(&read(&layout)?)?;
            let imported = bridge::import(&g, &layout, &read(&solution)?)?;
            for (i, p) in imported.paths.iter().enumerate() {
                println!("path {}: {}", i + 1, p.trace());
            }
            for (i, e) in &imported.errors {
                println!("path {i}: {e}");
            }
            let expected = match layout.model {
                bridge::ModelKind::Holistic => g.cyclomatic_complexity(),
                bridge::ModelKind::Incremental => 1,
            };
            let success = imported.errors.is_empty() && imported.paths.len() == expected && imported.rank == expected;
            println!(
                "status {:?}, objective {}, rank {}, coverage {}/{}",
                imported.solution.status,
                imported.solution.objective,
                imported.rank,
                imported.coverage.covered,
                imported.coverage.total
            );
            if let Some(path) = out {
                let doc = json!({
                    "k": g.cyclomatic_complexity(),
                    "paths": imported.paths.iter().map(|p| json!({"nodes": p.nodes(), "edges": p.edges()})).collect::<Vec<_>>(),
                    "strategy": "import",
                    "success": success,
                });
                write(&path, &(serde_json::to_string_pretty(&doc)? + "\n"))?;
            }
            Ok(if success { 0 } else { EXIT_FAILED })
        }
    }
}
