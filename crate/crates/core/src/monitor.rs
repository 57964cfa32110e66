//! Per-window fairness verdicts and the window-feasibility test.

use crate::constraint::FairnessConstraint;
use crate::schema::CountVector;
use crate::sketch::ForwardSketch;
use crate::window::WindowSpec;
use crate::Error;

/// The first fairness violation found in a window, in (block ascending,
/// schema value order).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    /// 1-based index of the violating block.
    pub block: usize,
    /// Schema index of the violating value.
    pub value: usize,
    /// The block's count of that value.
    pub observed: u64,
    /// Allowed range for the value.
    pub lo: u64,
    pub hi: u64,
}

/// Outcome of checking one window.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verdict {
    /// Details of the first violation; `None` exactly when the window is fair.
    pub violation: Option<Violation>,
}

impl Verdict {
    pub fn fair() -> Self {
        Verdict { violation: None }
    }

    pub fn unfair(violation: Violation) -> Self {
        Verdict {
            violation: Some(violation),
        }
    }

    #[inline]
    pub fn is_fair(&self) -> bool {
        self.violation.is_none()
    }
}

/// Checks blocks `1..=k` in order against the per-value count ranges,
/// stopping at the first violating (block, value) pair.
///
/// Each block costs one `O(ℓ)` sketch query plus `ℓ` range checks, so the
/// worst case is `O(k·ℓ)` and an early violation exits after a single block.
pub fn monitor_bfair(
    sketch: &ForwardSketch,
    constraint: &FairnessConstraint,
    spec: &WindowSpec,
) -> Result<Verdict, Error> {
    if spec.window_size != sketch.window_len() {
        return Err(Error::LengthMismatch {
            expected: spec.window_size,
            got: sketch.window_len(),
        });
    }
    if constraint.cardinality() != sketch.cardinality() {
        return Err(Error::InvalidConstraint {
            reason: "constraint cardinality does not match the sketch",
        });
    }
    let ranges = constraint.block_ranges(spec);
    for block in 1..=spec.blocks() {
        let counts = sketch.block_counts(block, spec)?;
        for (value, (&observed, &(lo, hi))) in
            counts.as_slice().iter().zip(&ranges).enumerate()
        {
            if observed < lo || observed > hi {
                return Ok(Verdict::unfair(Violation {
                    block,
                    value,
                    observed,
                    lo,
                    hi,
                }));
            }
        }
    }
    Ok(Verdict::fair())
}

/// Whether the window's items alone can be permuted into `k` disjoint fair
/// blocks: every value's total must reach `k · ⌊ε·f(p)·s⌋`.
///
/// `true` routes a violation to an in-window reorder; `false` makes the
/// engine buffer landmark items first.
pub fn feasible_within_window(
    totals: &CountVector,
    constraint: &FairnessConstraint,
    spec: &WindowSpec,
) -> bool {
    let k = spec.blocks() as u64;
    totals
        .as_slice()
        .iter()
        .enumerate()
        .all(|(idx, &total)| total >= k * constraint.count_range_at(spec, idx).0)
}
