//! Command-line interface: `monitor`, `reorder`, `sketch-dump`, `bench`,
//! and `gen`.

use std::io::{BufWriter, Write};
use std::path::PathBuf;
use std::sync::mpsc;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand};

use fairstream_core::constraint::Proportion;
use fairstream_core::reorder::bfair_reorder;
use fairstream_core::sketch::ForwardSketch;
use fairstream_core::{AttributeSchema, FairnessConstraint, Item, WindowSpec};

use crate::bench::{run_bench, BenchParams, CSV_HEADER};
use crate::config::{load_config, Config, Overrides};
use crate::engine::Engine;
use crate::events::write_events;
use crate::gen::{generate, to_csv, GenSpec};
use crate::source::{RecordReader, SourceSpec};

#[derive(Parser)]
#[command(
    name = "fairstream",
    about = "Continuous block-level group fairness over sliding windows: monitor, reorder, inspect, benchmark"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the monitoring engine over a stream source, emitting JSON events.
    Monitor(MonitorArgs),
    /// Reorder a whole file offline to maximize unique fair blocks.
    Reorder(ReorderArgs),
    /// Print the forward sketch of a window (optionally after slides).
    SketchDump(SketchDumpArgs),
    /// Run a benchmark suite and print CSV rows.
    Bench(BenchArgs),
    /// Emit a synthetic skewed stream as CSV.
    Gen(GenArgs),
}

#[derive(Args, Clone)]
struct ConstraintArgs {
    /// Ordered attribute values, comma separated (e.g. C,A,H).
    #[arg(long, value_delimiter = ',')]
    schema: Option<Vec<String>>,
    /// Required proportions per value, comma separated, same order.
    #[arg(long, value_delimiter = ',')]
    proportions: Option<Vec<String>>,
    /// Fairness scaling factor ε (applied per block range).
    #[arg(long)]
    epsilon: Option<f64>,
}

#[derive(Args)]
struct MonitorArgs {
    /// TOML config file; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    #[command(flatten)]
    constraint: ConstraintArgs,
    /// Window size |W|.
    #[arg(long)]
    window: Option<usize>,
    /// Block size s (must divide |W|).
    #[arg(long)]
    block: Option<usize>,
    /// Landmark budget |X|.
    #[arg(long)]
    landmark: Option<usize>,
    /// Items per slide.
    #[arg(long)]
    slide: Option<usize>,
    /// Input: file path, `-` for stdin, or tcp://host:port.
    #[arg(long)]
    source: Option<String>,
    /// Paced delivery, items per second.
    #[arg(long)]
    rate: Option<u64>,
    /// Event log path (stdout when omitted).
    #[arg(long)]
    output: Option<PathBuf>,
    /// Metrics snapshot cadence in windows.
    #[arg(long)]
    metrics_every: Option<u64>,
}

#[derive(Args)]
struct ReorderArgs {
    /// Input file (CSV or JSON lines).
    #[arg(long)]
    input: PathBuf,
    /// Reordered stream destination (stdout when omitted).
    #[arg(long)]
    output: Option<PathBuf>,
    #[command(flatten)]
    constraint: ConstraintArgs,
    /// Block size s.
    #[arg(long, default_value_t = 25)]
    block: usize,
}

#[derive(Args)]
struct SketchDumpArgs {
    /// Input file (CSV or JSON lines).
    #[arg(long)]
    source: String,
    #[arg(long, value_delimiter = ',')]
    schema: Vec<String>,
    /// Window size |W|.
    #[arg(long)]
    window: usize,
    /// Slides to apply after building (consumes that many extra items).
    #[arg(long, default_value_t = 0)]
    slides: usize,
}

#[derive(Args)]
struct BenchArgs {
    /// Suite: fsketch-vs-bsketch, slide-cost, monitor-throughput, reorder-runtime.
    #[arg(long)]
    suite: String,
    #[arg(long, value_delimiter = ',')]
    windows: Option<Vec<usize>>,
    #[arg(long, value_delimiter = ',')]
    blocks: Option<Vec<usize>>,
    #[arg(long, value_delimiter = ',')]
    cardinalities: Option<Vec<usize>>,
    #[arg(long, value_delimiter = ',')]
    landmarks: Option<Vec<usize>>,
    #[arg(long)]
    seed: Option<u64>,
    /// CSV destination (stdout when omitted).
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct GenArgs {
    /// Number of items.
    #[arg(long)]
    n: usize,
    #[arg(long, value_delimiter = ',')]
    schema: Vec<String>,
    /// Relative weights per value, same order as the schema.
    #[arg(long, value_delimiter = ',')]
    weights: Vec<u64>,
    /// Probability of repeating the previous value (run length control).
    #[arg(long, default_value_t = 0.0)]
    burstiness: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Destination (stdout when omitted).
    #[arg(long)]
    output: Option<PathBuf>,
}

/// Errors that exit with code 1; everything else exits with 2.
#[derive(Debug)]
struct ValidationError(anyhow::Error);

impl std::fmt::Display for ValidationError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        self.0.fmt(f)
    }
}

impl std::error::Error for ValidationError {}

fn validation(err: impl Into<anyhow::Error>) -> anyhow::Error {
    anyhow::Error::new(ValidationError(err.into()))
}

/// Parses argv, runs the subcommand, and maps errors to exit codes:
/// 0 success, 1 validation error, 2 runtime error.
pub fn run() -> i32 {
    env_logger::Builder::from_env(env_logger::Env::new().filter("FAIRSTREAM_LOG")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Monitor(args) => cmd_monitor(args),
        Command::Reorder(args) => cmd_reorder(args),
        Command::SketchDump(args) => cmd_sketch_dump(args),
        Command::Bench(args) => cmd_bench(args),
        Command::Gen(args) => cmd_gen(args),
    };
    match result {
        Ok(()) => 0,
        Err(err) => {
            eprintln!("error: {err:#}");
            if err.is::<ValidationError>() {
                1
            } else {
                2
            }
        }
    }
}

fn open_sink(path: Option<&PathBuf>) -> anyhow::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            std::fs::File::create(p).with_context(|| format!("creating {}", p.display()))?,
        )),
        None => Box::new(BufWriter::new(std::io::stdout())),
    })
}

fn resolve_config(args: MonitorArgs) -> anyhow::Result<Config> {
    let overrides = Overrides {
        schema: args.constraint.schema,
        proportions: args.constraint.proportions,
        epsilon: args.constraint.epsilon,
        window: args.window,
        block: args.block,
        landmark: args.landmark,
        slide: args.slide,
        source: args.source,
        rate: args.rate,
        output: args.output,
        metrics_every: args.metrics_every,
    };
    load_config(args.config.as_deref(), overrides).map_err(validation)
}

fn cmd_monitor(args: MonitorArgs) -> anyhow::Result<()> {
    let config = resolve_config(args)?;
    let mut sink = open_sink(config.output.as_ref())?;
    let mut engine = Engine::new(
        config.schema.clone(),
        config.constraint.clone(),
        config.spec,
        config.metrics_every,
    );

    // Ingestion thread feeding a bounded queue: a full queue blocks the
    // reader, pausing the source instead of dropping items.
    let input = config.source.open().map_err(validation)?;
    let mut reader = RecordReader::new(input, config.schema.clone());
    if let Some(rate) = config.rate {
        reader = reader.with_rate(rate);
    }
    let (tx, rx) = mpsc::sync_channel::<Result<Item, crate::source::SourceError>>(1024);
    let ingest = std::thread::spawn(move || {
        for record in reader {
            let failed = record.is_err();
            if tx.send(record).is_err() || failed {
                break;
            }
        }
    });

    let run = (|| -> anyhow::Result<()> {
        for record in rx.iter() {
            let item = record.context("reading stream")?;
            let events = engine.process_item(item)?;
            write_events(&mut sink, &events)?;
        }
        let events = engine.finalize()?;
        write_events(&mut sink, &events)?;
        sink.flush()?;
        Ok(())
    })();
    ingest.join().ok();
    run
}

fn build_constraint(
    args: &ConstraintArgs,
) -> anyhow::Result<(AttributeSchema, FairnessConstraint)> {
    let schema_values = args
        .schema
        .clone()
        .ok_or_else(|| validation(anyhow!("--schema is required")))?;
    let proportion_texts = args
        .proportions
        .clone()
        .ok_or_else(|| validation(anyhow!("--proportions is required")))?;
    if schema_values.len() != proportion_texts.len() {
        return Err(validation(anyhow!(
            "{} proportions given for {} schema values",
            proportion_texts.len(),
            schema_values.len()
        )));
    }
    let schema = AttributeSchema::new(schema_values).map_err(validation)?;
    let proportions = proportion_texts
        .iter()
        .map(|t| Proportion::parse(t))
        .collect::<Result<Vec<_>, _>>()
        .map_err(validation)?;
    let constraint = FairnessConstraint::from_proportions(proportions, args.epsilon.unwrap_or(1.0))
        .map_err(validation)?;
    Ok((schema, constraint))
}

fn read_items(spec: &SourceSpec, schema: &AttributeSchema) -> anyhow::Result<Vec<Item>> {
    let input = spec.open().map_err(validation)?;
    RecordReader::new(input, schema.clone())
        .collect::<Result<Vec<_>, _>>()
        .context("reading stream")
}

fn cmd_reorder(args: ReorderArgs) -> anyhow::Result<()> {
    let (schema, constraint) = build_constraint(&args.constraint)?;
    if args.block == 0 {
        return Err(validation(anyhow!("--block must be positive")));
    }
    let spec = WindowSpec::new(args.block, args.block, 1, 0).map_err(validation)?;
    let items = read_items(&SourceSpec::File(args.input.clone()), &schema)?;
    if items.len() < args.block {
        return Err(validation(anyhow!(
            "input has {} items, shorter than one block of {}",
            items.len(),
            args.block
        )));
    }
    let before = fairstream_core::count_fair_blocks(&items, &constraint, &spec)?;
    let result = bfair_reorder(&items, &constraint, &spec)?;

    let mut sink = open_sink(args.output.as_ref())?;
    sink.write_all(to_csv(&result.stream, &schema).as_bytes())?;
    sink.flush()?;

    let summary = serde_json::json!({
        "items": items.len(),
        "fair_blocks_before": before,
        "fair_blocks_after": result.fair_block_count,
        "combo": result.primary_combo.as_ref().map(|c| c.counts().to_vec()),
        "secondary_combo": result.secondary_combo.as_ref().map(|c| c.counts().to_vec()),
        "changed": result.changed,
    });
    eprintln!("{summary}");
    Ok(())
}

fn cmd_sketch_dump(args: SketchDumpArgs) -> anyhow::Result<()> {
    if args.window == 0 {
        return Err(validation(anyhow!("--window must be positive")));
    }
    let schema = AttributeSchema::new(args.schema).map_err(validation)?;
    let items = read_items(&SourceSpec::parse(&args.source), &schema)?;
    let needed = args.window + args.slides;
    if items.len() < needed {
        return Err(validation(anyhow!(
            "need {} items ({} window + {} slides), got {}",
            needed,
            args.window,
            args.slides,
            items.len()
        )));
    }
    let mut sketch = ForwardSketch::build(&items[..args.window], &schema)?;
    for &item in &items[args.window..needed] {
        sketch.slide(item)?;
    }
    let mut out = BufWriter::new(std::io::stdout());
    let fmt = |counts: &[u64]| {
        let inner: Vec<String> = counts.iter().map(u64::to_string).collect();
        format!("[{}]", inner.join(","))
    };
    for i in 0..args.window {
        writeln!(out, "{}", fmt(sketch.raw_entry(i)))?;
    }
    writeln!(out, "base={}", fmt(sketch.base()))?;
    out.flush()?;
    Ok(())
}

fn cmd_bench(args: BenchArgs) -> anyhow::Result<()> {
    let defaults = BenchParams::default();
    let params = BenchParams {
        windows: args.windows.unwrap_or(defaults.windows),
        blocks: args.blocks.unwrap_or(defaults.blocks),
        cardinalities: args.cardinalities.unwrap_or(defaults.cardinalities),
        landmarks: args.landmarks.unwrap_or(defaults.landmarks),
        seed: args.seed.unwrap_or(defaults.seed),
    };
    let rows = run_bench(&args.suite, &params).map_err(|e| match e {
        crate::bench::BenchError::UnknownSuite(_) => validation(e),
        other => anyhow::Error::new(other),
    })?;
    let mut sink = open_sink(args.output.as_ref())?;
    writeln!(sink, "{CSV_HEADER}")?;
    for row in rows {
        writeln!(sink, "{}", row.to_csv())?;
    }
    sink.flush()?;
    Ok(())
}

fn cmd_gen(args: GenArgs) -> anyhow::Result<()> {
    let schema = AttributeSchema::new(args.schema).map_err(validation)?;
    if args.weights.len() != schema.cardinality() {
        return Err(validation(anyhow!(
            "{} weights given for {} schema values",
            args.weights.len(),
            schema.cardinality()
        )));
    }
    if args.weights.iter().all(|&w| w == 0) {
        return Err(validation(anyhow!("at least one weight must be positive")));
    }
    if !(0.0..1.0).contains(&args.burstiness) {
        return Err(validation(anyhow!("--burstiness must lie in [0, 1)")));
    }
    let items = generate(&GenSpec {
        n: args.n,
        weights: args.weights,
        burstiness: args.burstiness,
        seed: args.seed,
    });
    let mut sink = open_sink(args.output.as_ref())?;
    sink.write_all(to_csv(&items, &schema).as_bytes())?;
    sink.flush()?;
    Ok(())
}
