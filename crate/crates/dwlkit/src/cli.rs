//! Command-line surface of the toolkit.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::dwl::{dwl_distinguish, dwl_refine, ColorTable, InitLabeling};
use crate::encode::mite_raw;
use crate::error::{Error, Result};
use crate::harness::{
    average_precision, chronological_split, expressiveness_suite, inductive_mask, roc_auc,
    Section, SuiteConfig,
};
use crate::neural::{evaluate, load_params, save_params, train, TrainConfig};
use crate::temporal::{build_dat, load_events, DynamicGraph, GraphFormat};

#[derive(Parser)]
#[command(name = "dwlkit", version, about = "Continuous-time dynamic graph toolkit")]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the dynamic WL test: per-round color classes for one graph, or a
    /// distinguishing verdict for two.
    Dwl(DwlArgs),
    /// Emit encodings of a graph.
    #[command(subcommand)]
    Encode(EncodeCommand),
    /// Chronologically split an event stream (70/15/15 by time).
    Split(SplitArgs),
    /// Run the expressiveness property suite.
    Suite(SuiteArgs),
    /// Compute AP/AUC from score and label files.
    Metrics(MetricsArgs),
    /// Train the pair-level link predictor.
    Train(TrainArgs),
    /// Evaluate saved parameters.
    Eval(EvalArgs),
}

#[derive(Args)]
struct DwlArgs {
    /// Test order (1 = node colors, 2 = ordered-pair colors).
    #[arg(long, default_value_t = 1)]
    k: usize,
    /// Query time.
    #[arg(long)]
    t: f64,
    /// Maximum refinement rounds.
    #[arg(long, default_value_t = 16)]
    rounds: usize,
    /// Input format of the graph files.
    #[arg(long)]
    format: Option<String>,
    /// Graph file; with a second file, run the parallel distinguishing test.
    graph_a: PathBuf,
    graph_b: Option<PathBuf>,
}

#[derive(Subcommand)]
enum EncodeCommand {
    /// Multi-interacted time encodings of every node w.r.t. a target pair,
    /// one CSV row per node.
    Mite(MiteArgs),
}

#[derive(Args)]
struct MiteArgs {
    /// Target pair "u,v".
    #[arg(long)]
    pair: String,
    /// Query time.
    #[arg(long)]
    t: f64,
    /// Preserved timestamps per half.
    #[arg(long, default_value_t = 32)]
    k: usize,
    #[arg(long)]
    format: Option<String>,
    graph: PathBuf,
}

#[derive(Args)]
struct SplitArgs {
    /// Inductive masking fraction over test-range nodes.
    #[arg(long, default_value_t = 0.0)]
    mask_fraction: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    format: Option<String>,
    graph: PathBuf,
}

#[derive(Args)]
struct SuiteArgs {
    #[arg(long, default_value_t = 1000)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Randomized separation-search constructions.
    #[arg(long, default_value_t = 25)]
    searches: usize,
    /// Directory to write counterexample graph pairs as replayable
    /// edge-list files (<property>_a.edges / <property>_b.edges).
    #[arg(long)]
    dump_counterexamples: Option<PathBuf>,
}

#[derive(Args)]
struct MetricsArgs {
    /// File with one score per line.
    #[arg(long)]
    scores: PathBuf,
    /// File with one 0/1 label per line.
    #[arg(long)]
    labels: PathBuf,
}

#[derive(Args)]
struct TrainArgs {
    /// key=value configuration file; must name the dataset via `data=`.
    #[arg(long)]
    config: PathBuf,
    /// Output stem for the weight files (<stem>.json + <stem>.bin).
    #[arg(long, default_value = "params")]
    out: PathBuf,
}

#[derive(Args)]
struct EvalArgs {
    /// Weight stem or manifest path produced by `train`.
    #[arg(long)]
    params: PathBuf,
    /// Dataset override; defaults to the one recorded at training time.
    #[arg(long)]
    data: Option<PathBuf>,
    #[arg(long)]
    format: Option<String>,
    /// Section to evaluate: val or test.
    #[arg(long, default_value = "test")]
    section: String,
}

fn resolve_format(path: &Path, flag: Option<&str>) -> Result<GraphFormat> {
    if let Some(name) = flag {
        return GraphFormat::parse_name(name);
    }
    match path.extension().and_then(|e| e.to_str()) {
        Some("csv") => Ok(GraphFormat::JodieCsv),
        _ => Ok(GraphFormat::EdgeList),
    }
}

fn load_graph(path: &Path, flag: Option<&str>) -> Result<DynamicGraph> {
    let format = resolve_format(path, flag)?;
    let mut file = fs::File::open(path)?;
    load_events(&mut file, format)
}

fn parse_pair(text: &str) -> Result<(usize, usize)> {
    let (u, v) = text
        .split_once(',')
        .ok_or_else(|| Error::invalid(format!("expected 'u,v', got '{text}'")))?;
    let parse = |s: &str| {
        s.trim()
            .parse::<usize>()
            .map_err(|e| Error::invalid(format!("invalid node id '{s}': {e}")))
    };
    Ok((parse(u)?, parse(v)?))
}

#[derive(Serialize)]
struct RoundClasses {
    round: usize,
    classes: usize,
    sizes: Vec<usize>,
}

#[derive(Serialize)]
struct RefineOutput {
    k: usize,
    t: f64,
    rounds_run: usize,
    rounds: Vec<RoundClasses>,
}

fn run_dwl(args: &DwlArgs) -> Result<String> {
    let ga = load_graph(&args.graph_a, args.format.as_deref())?;
    match &args.graph_b {
        Some(path_b) => {
            let gb = load_graph(path_b, args.format.as_deref())?;
            let verdict = dwl_distinguish(&ga, &gb, args.t, args.k, args.rounds)?;
            Ok(serde_json::to_string_pretty(&verdict)?)
        }
        None => {
            let mut table = ColorTable::new();
            let coloring = dwl_refine(
                &ga,
                args.t,
                args.k,
                InitLabeling::FromFeatures,
                args.rounds,
                &mut table,
            )?;
            let rounds = (0..=coloring.rounds_run())
                .map(|round| {
                    let sizes = coloring.class_sizes(round);
                    RoundClasses { round, classes: sizes.len(), sizes }
                })
                .collect();
            let out = RefineOutput {
                k: args.k,
                t: args.t,
                rounds_run: coloring.rounds_run(),
                rounds,
            };
            Ok(serde_json::to_string_pretty(&out)?)
        }
    }
}

fn run_mite(args: &MiteArgs) -> Result<String> {
    let g = load_graph(&args.graph, args.format.as_deref())?;
    let dat = build_dat(&g);
    let (u, v) = parse_pair(&args.pair)?;
    let mut out = String::from("w");
    for i in 0..2 * args.k {
        out.push_str(&format!(",m{i}"));
    }
    out.push('\n');
    for w in 0..g.node_count() {
        let mite = mite_raw(&dat, u, v, w, args.t, args.k)?;
        out.push_str(&w.to_string());
        for value in mite.values() {
            out.push_str(&format!(",{value}"));
        }
        out.push('\n');
    }
    Ok(out)
}

fn run_split(args: &SplitArgs) -> Result<String> {
    let g = load_graph(&args.graph, args.format.as_deref())?;
    let mut split = chronological_split(&g)?;
    if args.mask_fraction > 0.0 {
        split = inductive_mask(&split, &g, args.mask_fraction, args.seed)?;
    }
    Ok(serde_json::to_string_pretty(&split)?)
}

fn run_suite(args: &SuiteArgs) -> Result<String> {
    let config = SuiteConfig {
        trials: args.trials,
        seed: args.seed,
        searches: args.searches,
        ..SuiteConfig::default()
    };
    let report = expressiveness_suite(&config)?;
    if let Some(dir) = &args.dump_counterexamples {
        fs::create_dir_all(dir)?;
        for prop in &report.properties {
            if let Some(ce) = &prop.counterexample {
                fs::write(dir.join(format!("{}_a.edges", prop.name)), &ce.graph_a)?;
                fs::write(dir.join(format!("{}_b.edges", prop.name)), &ce.graph_b)?;
            }
        }
    }
    Ok(serde_json::to_string_pretty(&report)?)
}

fn read_column(path: &Path) -> Result<Vec<f64>> {
    let text = fs::read_to_string(path)?;
    text.lines()
        .enumerate()
        .filter(|(_, line)| !line.trim().is_empty())
        .map(|(i, line)| {
            line.trim()
                .parse::<f64>()
                .map_err(|e| Error::Parse { line: i + 1, msg: e.to_string() })
        })
        .collect()
}

fn run_metrics(args: &MetricsArgs) -> Result<String> {
    let scores = read_column(&args.scores)?;
    let labels = read_column(&args.labels)?;
    #[derive(Serialize)]
    struct Out {
        ap: f64,
        auc: f64,
        count: usize,
    }
    let out = Out {
        ap: average_precision(&scores, &labels)?,
        auc: roc_auc(&scores, &labels)?,
        count: scores.len(),
    };
    Ok(serde_json::to_string_pretty(&out)?)
}

fn run_train(args: &TrainArgs) -> Result<String> {
    let config = TrainConfig::from_kv_text(&fs::read_to_string(&args.config)?)?;
    let data = config
        .data
        .clone()
        .ok_or_else(|| Error::invalid("config must set data=<path to event stream>"))?;
    let g = load_graph(Path::new(&data), config.format.as_deref())?;
    let dat = build_dat(&g);
    let mut split = chronological_split(&g)?;
    if config.inductive_fraction > 0.0 {
        split = inductive_mask(&split, &g, config.inductive_fraction, config.seed)?;
    }
    let (params, history) = train(&g, &dat, &split, &config)?;
    save_params(&params, &args.out, Some(&config))?;
    #[derive(Serialize)]
    struct Out {
        params: String,
        epochs_run: usize,
        history: Vec<crate::neural::EpochStats>,
    }
    let out = Out {
        params: args.out.display().to_string(),
        epochs_run: history.len(),
        history,
    };
    Ok(serde_json::to_string_pretty(&out)?)
}

fn run_eval(args: &EvalArgs) -> Result<String> {
    let (params, config) = load_params(&args.params)?;
    let mut config = config
        .ok_or_else(|| Error::invalid("weight manifest carries no training configuration"))?;
    if let Some(data) = &args.data {
        config.data = Some(data.display().to_string());
        config.format = args.format.clone();
    }
    let data = config
        .data
        .clone()
        .ok_or_else(|| Error::invalid("no dataset recorded; pass --data"))?;
    let g = load_graph(Path::new(&data), config.format.as_deref())?;
    let dat = build_dat(&g);
    let mut split = chronological_split(&g)?;
    if config.inductive_fraction > 0.0 {
        split = inductive_mask(&split, &g, config.inductive_fraction, config.seed)?;
    }
    let section = match args.section.as_str() {
        "val" => Section::Val,
        "test" => Section::Test,
        other => return Err(Error::invalid(format!("unknown section '{other}'"))),
    };
    let report = evaluate(&params, &g, &dat, &split, section, &config)?;
    Ok(serde_json::to_string_pretty(&report)?)
}

/// Executes a parsed command line and returns what should be printed.
pub fn run(cli: Cli) -> Result<String> {
    match &cli.command {
        Command::Dwl(args) => run_dwl(args),
        Command::Encode(EncodeCommand::Mite(args)) => run_mite(args),
        Command::Split(args) => run_split(args),
        Command::Suite(args) => run_suite(args),
        Command::Metrics(args) => run_metrics(args),
        Command::Train(args) => run_train(args),
        Command::Eval(args) => run_eval(args),
    }
}
