//! Command-line front end: evaluate a dataset, inspect the triple parser,
//! or run a perturbation recovery check.

use std::path::PathBuf;
use std::time::Duration;

use clap::{Parser, Subcommand, ValueEnum};

use kgeval::calibrate::{perturb, recovery_check, synthetic_gold, PerturbationPlan};
use kgeval::dataset::load_dataset;
use kgeval::ged::RateMode;
use kgeval::parse::extract_triples;
use kgeval::report::{render_report, ReportFormat};
use kgeval::runner::{aggregate, evaluate_dataset, EvalConfig, Pooling};
use kgeval::similarity::{LexicalProvider, RemoteProvider, SimilarityProvider};
use kgeval::Error;

#[derive(Parser)]
#[command(name = "kgeval", version, about = "Knowledge-graph construction metrics")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Score a dataset and print a one-row report.
    Evaluate(EvaluateArgs),
    /// Run the triple extractor on a raw text file.
    Parse(ParseArgs),
    /// Perturb a synthetic gold graph and verify the measured rates
    /// recover the injected error counts.
    Calibrate(CalibrateArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Provider {
    /// Offline character-trigram cosine.
    Lexical,
    /// HTTP scoring service.
    Remote,
}

#[derive(clap::Args)]
struct EvaluateArgs {
    /// Line-delimited JSON dataset.
    #[arg(long)]
    dataset: PathBuf,

    /// Row label for the report.
    #[arg(long, default_value = "model")]
    label: String,

    #[arg(long, value_enum, default_value_t = Provider::Lexical)]
    provider: Provider,

    /// Scoring service URL; falls back to the KGEVAL_ENDPOINT variable.
    #[arg(long)]
    endpoint: Option<String>,

    /// Strict cutoff for the soft-match fraction, in (0, 1).
    #[arg(long, default_value_t = 0.95)]
    threshold: f64,

    /// Which edit pairs feed the hallucination/omission rates.
    #[arg(long, default_value = "edges")]
    rate_mode: RateMode,

    /// macro averages per-example scores; micro pools counts first.
    #[arg(long, default_value = "macro")]
    pooling: Pooling,

    /// Node count above which edit distance falls back to a greedy bound.
    #[arg(long, default_value_t = 12)]
    node_cap: usize,

    /// Divide each edit cost by the gold graph size.
    #[arg(long)]
    ged_normalized: bool,

    #[arg(long, default_value = "markdown")]
    format: ReportFormat,

    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,

    /// Worker threads; 0 picks a default.
    #[arg(long, default_value_t = 0)]
    workers: usize,

    /// Per-request timeout for the remote provider.
    #[arg(long, default_value_t = 30)]
    timeout_secs: u64,

    /// Pairs per remote scoring request.
    #[arg(long, default_value_t = 64)]
    batch_size: usize,

    /// Retries per remote batch after transient failures.
    #[arg(long, default_value_t = 2)]
    retries: u32,
}

#[derive(clap::Args)]
struct ParseArgs {
    /// Raw model output to extract triples from.
    #[arg(long = "in")]
    input: PathBuf,
}

#[derive(clap::Args)]
struct CalibrateArgs {
    /// Synthetic gold graph size.
    #[arg(long, default_value_t = 8)]
    nodes: usize,

    #[arg(long, default_value_t = 0)]
    insertions: usize,

    #[arg(long, default_value_t = 0)]
    deletions: usize,

    #[arg(long, default_value_t = 0)]
    relabels: usize,

    #[arg(long, default_value_t = 0)]
    seed: u64,
}

fn main() {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Evaluate(args) => evaluate(args),
        Command::Parse(args) => parse(args),
        Command::Calibrate(args) => calibrate(args),
    };
    if let Err(e) = outcome {
        eprintln!("error: {e}");
        std::process::exit(exit_code(&e));
    }
}

/// 2 for data problems the caller can fix in the input, 3 for scoring
/// backend trouble, 1 otherwise.
fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Example { source, .. } => exit_code(source),
        Error::Schema { .. }
        | Error::DuplicateId { .. }
        | Error::Io(_)
        | Error::MalformedTriple { .. } => 2,
        Error::ScoringBackend(_) | Error::Protocol(_) => 3,
        _ => 1,
    }
}

fn evaluate(args: EvaluateArgs) -> Result<(), Error> {
    let records = load_dataset(&args.dataset)?;
    let cfg = EvalConfig {
        node_cap: args.node_cap,
        rate_mode: args.rate_mode,
        threshold: args.threshold,
        pooling: args.pooling,
        normalize_ged: args.ged_normalized,
        workers: args.workers,
        ..EvalConfig::default()
    };
    let provider: Box<dyn SimilarityProvider> = match args.provider {
        Provider::Lexical => Box::new(LexicalProvider::new()),
        Provider::Remote => {
            let endpoint = args
                .endpoint
                .or_else(|| std::env::var("KGEVAL_ENDPOINT").ok())
                .ok_or_else(|| {
                    Error::ScoringBackend(
                        "remote provider needs --endpoint or KGEVAL_ENDPOINT".to_string(),
                    )
                })?;
            Box::new(
                RemoteProvider::new(
                    endpoint,
                    Duration::from_secs(args.timeout_secs),
                    args.batch_size,
                )
                .with_retries(args.retries),
            )
        }
    };

    let results = evaluate_dataset(&records, provider.as_ref(), &cfg)?;
    let parsed = results.iter().filter(|r| r.parse_status.is_some()).count();
    if parsed > 0 {
        let fallbacks = results
            .iter()
            .filter(|r| {
                r.parse_status
                    .is_some_and(|s| s == kgeval::parse::ParseStatus::EmptyFallback)
            })
            .count();
        eprintln!(
            "parsed {} raw prediction(s), {} unusable",
            parsed, fallbacks
        );
    }

    let row = aggregate(&results, &args.label, &cfg)?;
    let rendered = render_report(&[row], args.format);
    match args.out {
        Some(path) => std::fs::write(path, rendered)?,
        None => print!("{rendered}"),
    }
    Ok(())
}

fn parse(args: ParseArgs) -> Result<(), Error> {
    let text = std::fs::read_to_string(&args.input)?;
    let outcome = extract_triples(&text);
    for note in &outcome.diagnostics {
        eprintln!("note: {note}");
    }
    println!("{}", kgeval::parse::canonical_triple_list(&outcome.triples));
    println!("status: {}", outcome.status.as_str());
    Ok(())
}

fn calibrate(args: CalibrateArgs) -> Result<(), Error> {
    let gold = synthetic_gold(args.nodes, args.seed);
    let plan = PerturbationPlan {
        seed: args.seed,
        insertions: args.insertions,
        deletions: args.deletions,
        relabels: args.relabels,
    };
    let (pred, expected) = perturb(&gold, &plan)?;
    println!(
        "gold: {} nodes, {} edges; perturbed: {} nodes, {} edges",
        gold.node_count(),
        gold.edge_count(),
        pred.node_count(),
        pred.edge_count()
    );
    println!(
        "expected: {} hallucinated, {} omitted, {} total edge pairs",
        expected.hallucinated, expected.omitted, expected.total
    );
    if recovery_check(&gold, &plan)? {
        println!("recovery: exact");
        Ok(())
    } else {
        println!("recovery: MISMATCH");
        std::process::exit(1);
    }
}
