//! Self-timing benchmark scenarios with CSV reporting.

use std::time::Instant;

use fairstream_core::constraint::Proportion;
use fairstream_core::oracle::BackwardSketch;
use fairstream_core::reorder::bfair_reorder;
use fairstream_core::sketch::ForwardSketch;
use fairstream_core::{monitor_bfair, AttributeSchema, FairnessConstraint, Item, WindowSpec};

use crate::gen::{generate, GenSpec};

#[derive(Debug, thiserror::Error)]
pub enum BenchError {
    #[error("unknown bench suite {0:?} (expected fsketch-vs-bsketch, slide-cost, monitor-throughput, or reorder-runtime)")]
    UnknownSuite(String),
    #[error(transparent)]
    Invalid(#[from] fairstream_core::Error),
}

/// Parameter sweeps; each suite reads the axes it varies and takes the
/// first entry of the others.
#[derive(Debug, Clone)]
pub struct BenchParams {
    pub windows: Vec<usize>,
    pub blocks: Vec<usize>,
    pub cardinalities: Vec<usize>,
    pub landmarks: Vec<usize>,
    pub seed: u64,
}

impl Default for BenchParams {
    fn default() -> Self {
        Self {
            windows: vec![1000],
            blocks: vec![25],
            cardinalities: vec![5],
            landmarks: vec![100],
            seed: 0xFA1F_57E0,
        }
    }
}

/// One CSV row: full parameter tuple plus the measured stats.
#[derive(Debug, Clone)]
pub struct BenchReport {
    pub suite: String,
    pub window: usize,
    pub block: usize,
    pub cardinality: usize,
    pub landmark: usize,
    pub mean_us: f64,
    pub p90_us: f64,
    pub throughput_wps: f64,
    pub peak_mem_kb: u64,
}

pub const CSV_HEADER: &str =
    "suite,window,block,cardinality,landmark,mean_us,p90_us,throughput_wps,peak_mem_kb";

impl BenchReport {
    pub fn to_csv(&self) -> String {
        format!(
            "{},{},{},{},{},{:.4},{:.4},{:.1},{}",
            self.suite,
            self.window,
            self.block,
            self.cardinality,
            self.landmark,
            self.mean_us,
            self.p90_us,
            self.throughput_wps,
            self.peak_mem_kb
        )
    }
}

/// Runs the named scenario and returns its rows.
pub fn run_bench(suite: &str, params: &BenchParams) -> Result<Vec<BenchReport>, BenchError> {
    match suite {
        "fsketch-vs-bsketch" => fsketch_vs_bsketch(params),
        "slide-cost" => slide_cost(params),
        "monitor-throughput" => monitor_throughput(params),
        "reorder-runtime" => reorder_runtime(params),
        other => Err(BenchError::UnknownSuite(other.to_string())),
    }
}

fn uniform_setup(cardinality: usize) -> (AttributeSchema, FairnessConstraint) {
    let schema = AttributeSchema::new((0..cardinality).map(|i| format!("v{i}"))).unwrap();
    let constraint = FairnessConstraint::from_proportions(
        (0..cardinality)
            .map(|_| Proportion::Ratio(1, cardinality as u64))
            .collect(),
        1.0,
    )
    .unwrap();
    (schema, constraint)
}

fn stream_for(n: usize, cardinality: usize, seed: u64) -> Vec<Item> {
    generate(&GenSpec {
        n,
        weights: vec![1; cardinality],
        burstiness: 0.0,
        seed,
    })
}

/// Timing loop: warms up 10% of the samples, then records one duration
/// per sample (each sample runs `batch` operations and divides).
struct Samples {
    per_op_us: Vec<f64>,
}

impl Samples {
    fn collect<F: FnMut()>(samples: usize, batch: u32, mut op: F) -> Self {
        let warmup = samples.div_ceil(10);
        let mut per_op_us = Vec::with_capacity(samples);
        for i in 0..warmup + samples {
            let start = Instant::now();
            for _ in 0..batch {
                op();
            }
            let elapsed = start.elapsed().as_secs_f64() * 1e6 / batch as f64;
            if i >= warmup {
                per_op_us.push(elapsed);
            }
        }
        Self { per_op_us }
    }

    fn mean_us(&self) -> f64 {
        self.per_op_us.iter().sum::<f64>() / self.per_op_us.len() as f64
    }

    fn p90_us(&self) -> f64 {
        let mut sorted = self.per_op_us.clone();
        sorted.sort_by(f64::total_cmp);
        let rank = ((0.9 * sorted.len() as f64).ceil() as usize).clamp(1, sorted.len());
        sorted[rank - 1]
    }

    fn row(&self, suite: &str, window: usize, block: usize, cardinality: usize, landmark: usize, mem_bytes: usize) -> BenchReport {
        let mean = self.mean_us();
        BenchReport {
            suite: suite.to_string(),
            window,
            block,
            cardinality,
            landmark,
            mean_us: mean,
            p90_us: self.p90_us(),
            throughput_wps: 1e6 / mean,
            peak_mem_kb: (mem_bytes / 1024) as u64,
        }
    }
}

fn fsketch_mem(window: usize, cardinality: usize) -> usize {
    (window + 1) * (cardinality - 1) * 8 + window * std::mem::size_of::<Item>()
}

fn bsketch_mem(window: usize, cardinality: usize) -> usize {
    (window + 1) * (cardinality - 1) * 8 + window * std::mem::size_of::<Item>()
}

/// Slides needed so a (samples, batch) measurement never wraps: warmup
/// adds one tenth on top.
fn slides_needed(samples: usize, batch: u32) -> usize {
    (samples + samples.div_ceil(10) + 1) * batch as usize
}

/// Forward-sketch slide vs. backward-sketch rebuild, per slide.
fn fsketch_vs_bsketch(params: &BenchParams) -> Result<Vec<BenchReport>, BenchError> {
    let cardinality = params.cardinalities[0];
    let (schema, _) = uniform_setup(cardinality);
    let mut rows = Vec::new();
    for &window in &params.windows {
        let (f_samples, f_batch) = (64, 64);
        let slides = slides_needed(f_samples, f_batch).max(4096);
        let stream = stream_for(window + slides, cardinality, params.seed);

        let mut fsketch = ForwardSketch::build(&stream[..window], &schema)?;
        let mut at = window;
        let samples = Samples::collect(f_samples, f_batch, || {
            fsketch.slide(stream[at]).unwrap();
            at += 1;
        });
        rows.push(samples.row(
            "fsketch-vs-bsketch/fsketch",
            window,
            params.blocks[0],
            cardinality,
            0,
            fsketch_mem(window, cardinality),
        ));

        let mut bsketch = BackwardSketch::build(&stream[..window], &schema)?;
        let mut offset = 0usize;
        let samples = Samples::collect(48, 4, || {
            offset = (offset + 1) % slides;
            bsketch.rebuild(&stream[offset..offset + window]).unwrap();
        });
        rows.push(samples.row(
            "fsketch-vs-bsketch/bsketch",
            window,
            params.blocks[0],
            cardinality,
            0,
            bsketch_mem(window, cardinality),
        ));
    }
    Ok(rows)
}

/// Forward-sketch slide cost alone, across window sizes.
fn slide_cost(params: &BenchParams) -> Result<Vec<BenchReport>, BenchError> {
    let cardinality = params.cardinalities[0];
    let (schema, _) = uniform_setup(cardinality);
    let mut rows = Vec::new();
    for &window in &params.windows {
        let (n_samples, batch) = (64, 128);
        let slides = slides_needed(n_samples, batch);
        let stream = stream_for(window + slides, cardinality, params.seed);
        let mut sketch = ForwardSketch::build(&stream[..window], &schema)?;
        let mut at = window;
        let samples = Samples::collect(n_samples, batch, || {
            sketch.slide(stream[at]).unwrap();
            at += 1;
        });
        rows.push(samples.row(
            "slide-cost",
            window,
            params.blocks[0],
            cardinality,
            0,
            fsketch_mem(window, cardinality),
        ));
    }
    Ok(rows)
}

/// Slide plus verdict per window, across window and block sizes.
///
/// The stream cycles through the values, so every window is fair under
/// the uniform constraint and the monitor scans all `k` blocks: the
/// checking cost being measured. A violating stream would exit at the
/// first block and hide the block-count dependence entirely.
fn monitor_throughput(params: &BenchParams) -> Result<Vec<BenchReport>, BenchError> {
    let cardinality = params.cardinalities[0];
    let (schema, constraint) = uniform_setup(cardinality);
    let mut rows = Vec::new();
    for &window in &params.windows {
        for &block in &params.blocks {
            if window % block != 0 {
                continue;
            }
            let spec = WindowSpec::new(window, block, 1, 0)?;
            let (n_samples, batch) = (64, 32);
            let slides = slides_needed(n_samples, batch);
            let stream: Vec<Item> = (0..window + slides)
                .map(|i| Item::new(i as u64 + 1, i % cardinality))
                .collect();
            let mut sketch = ForwardSketch::build(&stream[..window], &schema)?;
            let mut at = window;
            let samples = Samples::collect(n_samples, batch, || {
                sketch.slide(stream[at]).unwrap();
                at += 1;
                std::hint::black_box(monitor_bfair(&sketch, &constraint, &spec).unwrap());
            });
            rows.push(samples.row(
                "monitor-throughput",
                window,
                block,
                cardinality,
                0,
                fsketch_mem(window, cardinality),
            ));
        }
    }
    Ok(rows)
}

/// Full reordering of window ∪ landmarks, across stream lengths.
fn reorder_runtime(params: &BenchParams) -> Result<Vec<BenchReport>, BenchError> {
    let cardinality = params.cardinalities[0];
    let (_, constraint) = uniform_setup(cardinality);
    let block = params.blocks[0];
    let mut rows = Vec::new();
    for &window in &params.windows {
        for &landmark in &params.landmarks {
            let n = window + landmark;
            let spec = WindowSpec::new(
                window - window % block.max(1),
                block,
                1,
                landmark,
            )?;
            // Skewed stream so the reorderer has real work to do.
            let mut weights = vec![1u64; cardinality];
            weights[0] = 3;
            let items = generate(&GenSpec {
                n,
                weights,
                burstiness: 0.2,
                seed: params.seed,
            });
            let samples = Samples::collect(20, 1, || {
                std::hint::black_box(bfair_reorder(&items, &constraint, &spec).unwrap());
            });
            rows.push(samples.row(
                "reorder-runtime",
                window,
                block,
                cardinality,
                landmark,
                n * std::mem::size_of::<Item>() * 3,
            ));
        }
    }
    Ok(rows)
}
