use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use serde::Serialize;

use parcut::driver::{minimum_cut, RunConfig, WorkCounters};
use parcut::packing::PackingParams;
use parcut::parse_graph;

/// Randomized parallel minimum cut over an edge-list graph.
#[derive(Parser)]
#[command(name = "parcut", version, about)]
struct Args {
    /// RNG seed (falls back to PARCUT_SEED, then 0)
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads; 0 auto-detects
    #[arg(long, default_value_t = 0)]
    threads: usize,
    /// Multiplier on the ceil(ln n) spanning trees tried per attempt
    #[arg(long = "trees", default_value_t = 3.0)]
    trees: f64,
    /// Tree-packing accuracy in (0,1)
    #[arg(long, default_value_t = 0.2)]
    epsilon: f64,
    /// Extra restarts with derived seeds, keeping the best cut
    #[arg(long, default_value_t = 0)]
    retries: u32,
    /// Cross-check the result against the Stoer-Wagner oracle
    #[arg(long)]
    oracle: bool,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Edge-list file: one "u v w" per line, '#' comments, blank lines ok
    graph_file: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Serialize)]
struct JsonReport<'a> {
    value: i64,
    side: Vec<&'a str>,
    trees_tried: u64,
    work_counters: &'a WorkCounters,
    #[serde(skip_serializing_if = "Option::is_none")]
    oracle_agreement: Option<bool>,
}

fn main() -> ExitCode {
    let args = Args::parse();

    let seed = match args.seed {
        Some(s) => s,
        None => match std::env::var("PARCUT_SEED") {
            Ok(raw) => match raw.parse() {
                Ok(s) => s,
                Err(_) => {
                    eprintln!("parcut: PARCUT_SEED is not a valid integer: {raw:?}");
                    return ExitCode::from(2);
                }
            },
            Err(_) => 0,
        },
    };
    if args.epsilon <= 0.0 || args.epsilon >= 1.0 {
        eprintln!("parcut: --epsilon must lie in (0,1)");
        return ExitCode::from(2);
    }
    if args.trees < 1.0 {
        eprintln!("parcut: --trees must be at least 1");
        return ExitCode::from(2);
    }

    let text = match std::fs::read_to_string(&args.graph_file) {
        Ok(t) => t,
        Err(err) => {
            eprintln!("parcut: cannot read {}: {err}", args.graph_file.display());
            return ExitCode::from(1);
        }
    };
    let parsed = match parse_graph(&text) {
        Ok(p) => p,
        Err(err) => {
            eprintln!("parcut: {}: {err}", args.graph_file.display());
            return ExitCode::from(1);
        }
    };

    let cfg = RunConfig {
        seed,
        threads: args.threads,
        packing: PackingParams {
            epsilon: args.epsilon,
            tree_count_multiplier: args.trees,
            ..Default::default()
        },
        retries: args.retries,
        oracle_check: args.oracle,
    };
    let report = match minimum_cut(&parsed.graph, &cfg) {
        Ok(r) => r,
        Err(err) => {
            eprintln!("parcut: {err}");
            return ExitCode::from(1);
        }
    };

    let side_tokens: Vec<&str> =
        report.side.iter().map(|&v| parsed.tokens[v as usize].as_str()).collect();
    match args.format {
        Format::Json => {
            let json = JsonReport {
                value: report.value,
                side: side_tokens,
                trees_tried: report.trees_tried,
                work_counters: &report.work_counters,
                oracle_agreement: report.oracle_agreement,
            };
            println!("{}", serde_json::to_string_pretty(&json).expect("serializable report"));
        }
        Format::Text => {
            println!("value {}", report.value);
            for tok in side_tokens {
                println!("{tok}");
            }
        }
    }

    if report.oracle_agreement == Some(false) {
        eprintln!("parcut: oracle disagreement: Stoer-Wagner found a different value");
        return ExitCode::from(1);
    }
    ExitCode::SUCCESS
}
