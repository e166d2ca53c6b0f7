use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde_json::{json, Map, Value};

use tricolor::analysis::{self, BranchVector, RateExpr};
use tricolor::bushy::PartitionCounts;
use tricolor::dimacs::{parse_coloring, parse_dimacs, write_coloring, write_dimacs};
use tricolor::generate::{generate, GeneratorSpec};
use tricolor::solver::{brute_force_with_cap, ColoringViolation, DEFAULT_ORACLE_CAP};
use tricolor::{solve_with_config, verify_coloring, Graph, SearchStats, SolveStatus, SolverConfig};

const STATS_SCHEMA_VERSION: u64 = 1;

#[derive(Parser)]
#[command(name = "tricolor", version, about = "Exact 3-coloring by forest-guided branch-and-reduce")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decide 3-colorability of a DIMACS graph and print a coloring.
    Solve(SolveArgs),
    /// Check a coloring file against a DIMACS graph.
    Verify { graph: PathBuf, coloring: PathBuf },
    /// Emit a generated instance as DIMACS.
    Gen {
        /// e.g. `random-min-degree-3:n=30,seed=7`, `worst-case-family:t=2`,
        /// `figure-fixture:fig1-right`
        spec: String,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Work factors, rates and the linear program of the runtime analysis.
    Analyze(AnalyzeArgs),
    /// Solve every `.col` file in a directory and cross-check small ones
    /// against the brute-force oracle.
    Bench {
        corpus: PathBuf,
        #[arg(long, default_value_t = DEFAULT_ORACLE_CAP)]
        oracle_cap: usize,
    },
}

#[derive(Args)]
struct SolveArgs {
    file: PathBuf,
    /// Explore the whole search space instead of stopping at the first coloring.
    #[arg(long)]
    exhaustive: bool,
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    /// Write search statistics as flat JSON.
    #[arg(long, value_name = "FILE")]
    stats: Option<PathBuf>,
}

#[derive(Args)]
struct AnalyzeArgs {
    /// Solve the linear program and print the class fractions.
    #[arg(long)]
    lp: bool,
    /// Comma-separated branch vector, e.g. `2,6,6`.
    #[arg(long, value_name = "R1,R2,...")]
    work_factor: Option<String>,
    /// Rate expression, e.g. `3*1.36443^4/8`.
    #[arg(long, value_name = "EXPR")]
    rate: Option<String>,
    #[arg(long)]
    json: bool,
}

fn read_graph(path: &Path) -> Result<Graph> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let parsed = parse_dimacs(&text).with_context(|| format!("parsing {}", path.display()))?;
    for w in &parsed.warnings {
        eprintln!("warning: {}: {w}", path.display());
    }
    Ok(parsed.graph)
}

/// Flattens nested objects into dotted keys; arrays become `.0`, `.1`, ...
fn flatten(prefix: &str, value: &Value, out: &mut Map<String, Value>) {
    match value {
        Value::Object(map) => {
            for (k, v) in map {
                flatten(&join(prefix, k), v, out);
            }
        }
        Value::Array(items) => {
            for (i, v) in items.iter().enumerate() {
                flatten(&join(prefix, &i.to_string()), v, out);
            }
        }
        other => {
            out.insert(prefix.to_string(), other.clone());
        }
    }
}

fn join(prefix: &str, key: &str) -> String {
    if prefix.is_empty() {
        key.to_string()
    } else {
        format!("{prefix}.{key}")
    }
}

fn partition_document(p: &PartitionCounts, out: &mut Map<String, Value>) {
    let scalar = [
        ("R", p.r),
        ("I", p.i),
        ("L", p.l),
        ("N", p.n),
        ("U", p.u),
        ("N1", p.n1),
        ("N2", p.n2),
        ("N3", p.n3),
        ("U_prime", p.u_prime),
        ("N_other", p.n_other),
        ("out_of_range", p.out_of_range),
    ];
    for (k, v) in scalar {
        out.insert(format!("partition.{k}"), json!(v));
    }
    for (k, v) in p.n3_i.iter().enumerate() {
        out.insert(format!("partition.N3_{}", k + 1), json!(v));
    }
    for (j, v) in p.u_j.iter().enumerate() {
        out.insert(format!("partition.U{j}"), json!(v));
    }
}

fn stats_document(status: &SolveStatus, stats: &SearchStats) -> Result<Map<String, Value>> {
    let mut out = Map::new();
    out.insert("schema_version".into(), json!(STATS_SCHEMA_VERSION));
    out.insert("status".into(), json!(if status.is_colorable() { "colorable" } else { "not_colorable" }));
    let mut value = serde_json::to_value(stats)?;
    if let Value::Object(map) = &mut value {
        map.remove("partition");
    }
    flatten("search", &value, &mut out);
    partition_document(&stats.partition, &mut out);
    Ok(out)
}

fn solve(args: SolveArgs) -> Result<ExitCode> {
    if args.jobs == 0 {
        bail!("--jobs must be at least 1");
    }
    let g = read_graph(&args.file)?;
    let config = SolverConfig { exhaustive: args.exhaustive, jobs: args.jobs, sink: None };
    let result = solve_with_config(&g, &config);
    if let Some(path) = &args.stats {
        let doc = stats_document(&result.status, &result.stats)?;
        let text = serde_json::to_string_pretty(&Value::Object(doc))?;
        fs::write(path, text + "\n").with_context(|| format!("writing {}", path.display()))?;
    }
    match &result.status {
        SolveStatus::Colorable(c) => {
            println!("c colorable");
            print!("{}", write_coloring(c));
            Ok(ExitCode::SUCCESS)
        }
        SolveStatus::NotColorable => {
            println!("c not colorable");
            Ok(ExitCode::from(1))
        }
    }
}

fn verify(graph: &Path, coloring: &Path) -> Result<ExitCode> {
    let g = read_graph(graph)?;
    let text = fs::read_to_string(coloring).with_context(|| format!("reading {}", coloring.display()))?;
    let c = parse_coloring(&text).with_context(|| format!("parsing {}", coloring.display()))?;
    match verify_coloring(&g, &c) {
        Ok(()) => {
            println!("valid");
            Ok(ExitCode::SUCCESS)
        }
        Err(ColoringViolation::Edge(u, v)) => {
            println!("invalid: edge {} {} is monochromatic", u.0 + 1, v.0 + 1);
            Ok(ExitCode::from(1))
        }
        Err(ColoringViolation::Uncolored(v)) => {
            println!("invalid: vertex {} has no color", v.0 + 1);
            Ok(ExitCode::from(1))
        }
    }
}

fn gen(spec: &str, output: Option<PathBuf>) -> Result<ExitCode> {
    let spec: GeneratorSpec = spec.parse()?;
    let g = generate(&spec)?;
    let text = format!("c {spec}\n{}", write_dimacs(&g));
    match output {
        Some(path) => fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?,
        None => print!("{text}"),
    }
    Ok(ExitCode::SUCCESS)
}

fn analyze(args: AnalyzeArgs) -> Result<ExitCode> {
    let all = !args.lp && args.work_factor.is_none() && args.rate.is_none();
    let mut doc = Map::new();
    if let Some(v) = &args.work_factor {
        let bv: BranchVector<f64> = v.parse().with_context(|| format!("branch vector `{v}`"))?;
        let lambda = analysis::work_factor(&bv);
        doc.insert("work_factor".into(), json!(lambda));
        if !args.json {
            println!("{lambda:.4}");
        }
    }
    if let Some(e) = &args.rate {
        let expr: RateExpr = e.parse()?;
        let r = expr.eval();
        doc.insert("rate".into(), json!(r));
        if !args.json {
            println!("{r:.5}");
        }
    }
    if args.lp || all {
        let report = analysis::solve_lp(&analysis::build_lp(), true)?;
        if args.json {
            let mut lp = Map::new();
            for (k, v) in report.as_map() {
                lp.insert(k, json!(v));
            }
            lp.insert("exact_verified".into(), json!(report.exact_verified));
            lp.insert("max_reduced_cost".into(), json!(report.max_reduced_cost));
            doc.insert("lp".into(), Value::Object(lp));
        } else {
            println!("{report}");
        }
    }
    if args.json {
        println!("{}", serde_json::to_string_pretty(&Value::Object(doc))?);
    }
    Ok(ExitCode::SUCCESS)
}

fn bench(corpus: &Path, cap: usize) -> Result<ExitCode> {
    let mut files: Vec<PathBuf> = fs::read_dir(corpus)
        .with_context(|| format!("reading {}", corpus.display()))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "col"))
        .collect();
    files.sort();
    let mut mismatches = 0;
    for path in &files {
        let g = read_graph(path)?;
        let result = tricolor::solve_3coloring(&g);
        let valid = result.status.coloring().is_none_or(|c| verify_coloring(&g, c).is_ok());
        let oracle = brute_force_with_cap(&g, cap).ok().map(|o| o.is_some());
        let agree = valid && oracle.is_none_or(|o| o == result.status.is_colorable());
        if !agree {
            mismatches += 1;
        }
        println!(
            "{}\tn={}\tm={}\t{}\toracle={}\t{:.3}s\t{}",
            path.file_name().unwrap_or_default().to_string_lossy(),
            g.vertex_count(),
            g.edge_count(),
            if result.status.is_colorable() { "colorable" } else { "not-colorable" },
            oracle.map_or("skipped", |o| if o { "colorable" } else { "not-colorable" }),
            result.stats.wall_time.as_secs_f64(),
            if agree { "ok" } else { "MISMATCH" },
        );
    }
    println!("{} files, {mismatches} mismatches", files.len());
    Ok(if mismatches == 0 { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Solve(args) => solve(args),
        Command::Verify { graph, coloring } => verify(&graph, &coloring),
        Command::Gen { spec, output } => gen(&spec, output),
        Command::Analyze(args) => analyze(args),
        Command::Bench { corpus, oracle_cap } => bench(&corpus, oracle_cap),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(2) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
