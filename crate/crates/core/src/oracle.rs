//! Ground-truth implementations used by tests and benchmarks: naive
//! block recounting, a brute-force reorder optimum, and the backward
//! (suffix-cumulative) sketch baseline.

use alloc::format;
use alloc::vec::Vec;

use crate::constraint::FairnessConstraint;
use crate::monitor::{Verdict, Violation};
use crate::schema::{AttributeSchema, CountVector, Item};
use crate::window::WindowSpec;
use crate::Error;

/// Recounts every block directly and applies the count ranges; contract
/// identical to [`crate::monitor::monitor_bfair`], including which
/// violation is reported first.
pub fn naive_monitor(
    window: &[Item],
    constraint: &FairnessConstraint,
    spec: &WindowSpec,
) -> Result<Verdict, Error> {
    if window.len() != spec.window_size {
        return Err(Error::LengthMismatch {
            expected: spec.window_size,
            got: window.len(),
        });
    }
    let ranges = constraint.block_ranges(spec);
    let s = spec.block_size;
    for block in 1..=spec.blocks() {
        let chunk = &window[(block - 1) * s..block * s];
        let counts = CountVector::tally(chunk, constraint.cardinality());
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

/// Hard guard on brute-force enumeration; distinct multiset permutations
/// explode factorially past this.
pub const BRUTE_FORCE_MAX: usize = 12;

/// The maximum number of unique fair blocks over *all* distinct multiset
/// permutations of the input values.
///
/// Enumeration walks value choices depth-first, maintaining the rolling
/// counts of the last `s` placed items so each completed window is checked
/// in `O(1)` amortized, and prunes branches that cannot beat the best
/// count found so far.
pub fn brute_force_reorder(
    items: &[Item],
    constraint: &FairnessConstraint,
    spec: &WindowSpec,
) -> Result<u64, Error> {
    let n = items.len();
    if n > BRUTE_FORCE_MAX {
        return Err(Error::TooLargeForBruteForce {
            len: n,
            max: BRUTE_FORCE_MAX,
        });
    }
    let s = spec.block_size;
    if n < s {
        return Err(Error::StreamTooShort {
            len: n,
            block_size: s,
        });
    }
    let cardinality = constraint.cardinality();
    let mut remaining = alloc::vec![0u64; cardinality];
    for it in items {
        if it.value >= cardinality {
            return Err(Error::UnknownValue {
                label: format!("#{}", it.value),
            });
        }
        remaining[it.value] += 1;
    }
    let ranges = constraint.block_ranges(spec);
    let mut search = Search {
        ranges: &ranges,
        n,
        s,
        path: Vec::with_capacity(n),
        window: alloc::vec![0u64; cardinality],
        best: 0,
    };
    search.run(&mut remaining, 0);
    Ok(search.best)
}

struct Search<'a> {
    ranges: &'a [(u64, u64)],
    n: usize,
    s: usize,
    path: Vec<usize>,
    /// Counts of the last `min(depth, s)` placed values.
    window: Vec<u64>,
    best: u64,
}

impl Search<'_> {
    fn run(&mut self, remaining: &mut [u64], fair_so_far: u64) {
        let depth = self.path.len();
        if depth == self.n {
            self.best = self.best.max(fair_so_far);
            return;
        }
        // Windows still undecided end at positions max(depth, s-1)+1 ..= n.
        let undecided = (self.n - depth.max(self.s - 1)) as u64;
        if fair_so_far + undecided <= self.best {
            return;
        }
        for value in 0..remaining.len() {
            if remaining[value] == 0 {
                continue;
            }
            remaining[value] -= 1;
            self.path.push(value);
            self.window[value] += 1;
            let evicted = if self.path.len() > self.s {
                let ev = self.path[self.path.len() - 1 - self.s];
                self.window[ev] -= 1;
                Some(ev)
            } else {
                None
            };
            let gained = if self.path.len() >= self.s && self.window_is_fair() {
                1
            } else {
                0
            };
            self.run(remaining, fair_so_far + gained);
            if let Some(ev) = evicted {
                self.window[ev] += 1;
            }
            self.window[value] -= 1;
            self.path.pop();
            remaining[value] += 1;
        }
    }

    #[inline]
    fn window_is_fair(&self) -> bool {
        self.window
            .iter()
            .zip(self.ranges)
            .all(|(&c, &(lo, hi))| c >= lo && c <= hi)
    }
}

/// Suffix-cumulative baseline sketch: entry `i` holds the counts of the
/// stored `ℓ−1` values from position `i` to the window end, so a slide
/// invalidates every entry and the structure must be rebuilt from scratch.
#[derive(Debug, Clone)]
pub struct BackwardSketch {
    stored: usize,
    cardinality: usize,
    window_len: usize,
    /// `(window_len + 1) × stored`; the extra all-zero row past the end
    /// makes block differencing uniform.
    buf: Vec<u64>,
}

impl BackwardSketch {
    pub fn build(window: &[Item], schema: &AttributeSchema) -> Result<Self, Error> {
        let cardinality = schema.cardinality();
        let mut sketch = Self {
            stored: cardinality - 1,
            cardinality,
            window_len: window.len(),
            buf: Vec::new(),
        };
        sketch.rebuild(window)?;
        Ok(sketch)
    }

    /// Recomputes every suffix entry for the given window; reuses the
    /// allocation so repeated rebuilds measure pure construction cost.
    pub fn rebuild(&mut self, window: &[Item]) -> Result<(), Error> {
        if window.is_empty() {
            return Err(Error::LengthMismatch {
                expected: 1,
                got: 0,
            });
        }
        self.window_len = window.len();
        let rows = window.len() + 1;
        self.buf.clear();
        self.buf.resize(rows * self.stored, 0);
        for i in (0..window.len()).rev() {
            let value = window[i].value;
            if value >= self.cardinality {
                return Err(Error::UnknownValue {
                    label: format!("#{}", value),
                });
            }
            let (front, back) = self.buf.split_at_mut((i + 1) * self.stored);
            let row = &mut front[i * self.stored..];
            row.copy_from_slice(&back[..self.stored]);
            if value < self.stored {
                row[value] += 1;
            }
        }
        Ok(())
    }

    /// Stored suffix counts from 1-based `position` to the window end.
    pub fn suffix_entry(&self, position: usize) -> &[u64] {
        let i = position - 1;
        &self.buf[i * self.stored..(i + 1) * self.stored]
    }

    /// Per-value counts of block `block_index` (1-based) by differencing
    /// suffix entries from the back.
    pub fn block_counts(
        &self,
        block_index: usize,
        spec: &WindowSpec,
    ) -> Result<CountVector, Error> {
        if spec.window_size != self.window_len {
            return Err(Error::LengthMismatch {
                expected: spec.window_size,
                got: self.window_len,
            });
        }
        let k = spec.blocks();
        if block_index == 0 || block_index > k {
            return Err(Error::BlockIndexOutOfRange {
                index: block_index,
                blocks: k,
            });
        }
        let s = spec.block_size;
        let start = self.suffix_entry((block_index - 1) * s + 1);
        let end = self.suffix_entry(block_index * s + 1);
        let mut counts = Vec::with_capacity(self.cardinality);
        let mut diff_sum = 0;
        for (a, b) in start.iter().zip(end) {
            let d = a - b;
            diff_sum += d;
            counts.push(d);
        }
        counts.push(s as u64 - diff_sum);
        Ok(CountVector(counts))
    }

    /// Whole-window totals (all `ℓ` values).
    pub fn window_counts(&self) -> CountVector {
        let first = self.suffix_entry(1);
        let mut counts = Vec::with_capacity(self.cardinality);
        let mut sum = 0;
        for &c in first {
            sum += c;
            counts.push(c);
        }
        counts.push(self.window_len as u64 - sum);
        CountVector(counts)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constraint::Proportion;

    fn schema_cah() -> AttributeSchema {
        AttributeSchema::new(["C", "A", "H"]).unwrap()
    }

    fn window_fifteen() -> Vec<Item> {
        schema_cah()
            .items_from_labels([
                "C", "C", "A", "H", "H", "C", "A", "C", "H", "H", "A", "A", "C", "H", "H",
            ])
            .unwrap()
    }

    fn constraint(props: [&str; 3]) -> FairnessConstraint {
        FairnessConstraint::new(
            &schema_cah(),
            [
                ("C", Proportion::parse(props[0]).unwrap()),
                ("A", Proportion::parse(props[1]).unwrap()),
                ("H", Proportion::parse(props[2]).unwrap()),
            ],
        )
        .unwrap()
    }

    #[test]
    fn naive_monitor_reproduces_the_worked_verdicts() {
        let spec = WindowSpec::new(15, 5, 1, 0).unwrap();
        let fair = naive_monitor(&window_fifteen(), &constraint(["0.3", "0.3", "0.4"]), &spec)
            .unwrap();
        assert!(fair.is_fair());
        let unfair =
            naive_monitor(&window_fifteen(), &constraint(["0.5", "0.2", "0.3"]), &spec).unwrap();
        assert_eq!(unfair.violation.as_ref().map(|v| v.block), Some(3));
    }

    #[test]
    fn brute_force_finds_the_alternating_optimum() {
        let schema = AttributeSchema::new(["C", "A"]).unwrap();
        let c = FairnessConstraint::new(
            &schema,
            [
                ("C", Proportion::parse("0.5").unwrap()),
                ("A", Proportion::parse("0.5").unwrap()),
            ],
        )
        .unwrap();
        let spec = WindowSpec::new(4, 2, 1, 0).unwrap();
        let items = schema.items_from_labels(["C", "A", "A", "C"]).unwrap();
        assert_eq!(brute_force_reorder(&items, &c, &spec).unwrap(), 3);
    }

    #[test]
    fn brute_force_reports_zero_when_no_permutation_helps() {
        let schema = AttributeSchema::new(["C", "A"]).unwrap();
        let c = FairnessConstraint::new(
            &schema,
            [
                ("C", Proportion::parse("0.5").unwrap()),
                ("A", Proportion::parse("0.5").unwrap()),
            ],
        )
        .unwrap();
        let spec = WindowSpec::new(4, 2, 1, 0).unwrap();
        let items = schema.items_from_labels(["C", "C", "C", "C"]).unwrap();
        assert_eq!(brute_force_reorder(&items, &c, &spec).unwrap(), 0);
    }

    #[test]
    fn brute_force_refuses_oversized_input() {
        let schema = AttributeSchema::new(["C", "A"]).unwrap();
        let c = FairnessConstraint::new(
            &schema,
            [
                ("C", Proportion::parse("0.5").unwrap()),
                ("A", Proportion::parse("0.5").unwrap()),
            ],
        )
        .unwrap();
        let spec = WindowSpec::new(4, 2, 1, 0).unwrap();
        let items: Vec<Item> = (1..=13).map(|i| Item::new(i, (i % 2) as usize)).collect();
        assert!(matches!(
            brute_force_reorder(&items, &c, &spec),
            Err(Error::TooLargeForBruteForce { len: 13, max: 12 })
        ));
    }

    #[test]
    fn backward_sketch_suffix_entries_match_direct_recounts() {
        let sketch = BackwardSketch::build(&window_fifteen(), &schema_cah()).unwrap();
        // Suffix 11..15 is A, A, C, H, H.
        assert_eq!(sketch.suffix_entry(11), &[1, 2]);
        // The last entry is the indicator of the final item (H: inferred).
        assert_eq!(sketch.suffix_entry(15), &[0, 0]);
        assert_eq!(sketch.suffix_entry(1), &[5, 4]);
    }

    #[test]
    fn backward_block_counts_match_forward_semantics() {
        let spec = WindowSpec::new(15, 5, 1, 0).unwrap();
        let sketch = BackwardSketch::build(&window_fifteen(), &schema_cah()).unwrap();
        assert_eq!(sketch.block_counts(1, &spec).unwrap().as_slice(), &[2, 1, 2]);
        assert_eq!(sketch.block_counts(2, &spec).unwrap().as_slice(), &[2, 1, 2]);
        assert_eq!(sketch.block_counts(3, &spec).unwrap().as_slice(), &[1, 2, 2]);
        assert_eq!(sketch.window_counts().as_slice(), &[5, 4, 6]);
    }
}
