//! Synthetic skewed stream generation for tests and benchmarks.

use fairstream_core::{AttributeSchema, Item};
use rand::distributions::{Distribution, WeightedIndex};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Parameters of a synthetic stream: per-value weights control skew,
/// burstiness in `[0, 1)` is the probability of repeating the previous
/// value instead of drawing fresh.
#[derive(Debug, Clone)]
pub struct GenSpec {
    pub n: usize,
    pub weights: Vec<u64>,
    pub burstiness: f64,
    pub seed: u64,
}

/// Deterministically generates `n` items with positions `1..=n`.
pub fn generate(spec: &GenSpec) -> Vec<Item> {
    assert!(
        !spec.weights.is_empty() && spec.weights.iter().any(|&w| w > 0),
        "weights must include a positive entry"
    );
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let dist = WeightedIndex::new(&spec.weights).expect("validated weights");
    let burstiness = spec.burstiness.clamp(0.0, 0.999_999);
    let mut previous: Option<usize> = None;
    (1..=spec.n as u64)
        .map(|seq| {
            let value = match previous {
                Some(prev) if rng.gen_bool(burstiness) => prev,
                _ => dist.sample(&mut rng),
            };
            previous = Some(value);
            Item::new(seq, value)
        })
        .collect()
}

/// Renders items as CSV lines (`seq,value`).
pub fn to_csv(items: &[Item], schema: &AttributeSchema) -> String {
    let mut out = String::new();
    for item in items {
        out.push_str(&format!("{},{}\n", item.seq, schema.label(item.value)));
    }
    out
}
