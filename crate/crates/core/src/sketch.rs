//! The forward sketch: per-position cumulative counts of the first `ℓ−1`
//! attribute values over the current window.

use alloc::format;
use alloc::vec::Vec;

use crate::schema::{AttributeSchema, CountVector, Item};
use crate::window::WindowSpec;
use crate::Error;

/// Cumulative count vectors over the current window, one per position,
/// each of length `ℓ−1` (the last value's count is inferred).
///
/// Entries stay cumulative *from the last rebuild*, not from the current
/// window start: evicting an item does not touch the stored vectors.
/// Instead a `base` vector accumulates the evicted items' counts and every
/// query subtracts it. This keeps the slide at `O(ℓ)` (drop the oldest
/// entry, append one new vector) while block queries remain exact on slid
/// windows.
///
/// The ring never rebases; 64-bit counters outlast any realistic stream.
#[derive(Debug, Clone)]
pub struct ForwardSketch {
    /// `ℓ−1` stored values.
    stored: usize,
    cardinality: usize,
    window_len: usize,
    /// Ring of `window_len` vectors, flattened row-major.
    buf: Vec<u64>,
    /// Ring index of the oldest entry.
    head: usize,
    /// Cumulative counts of every item evicted since the last rebuild.
    base: Vec<u64>,
    /// Stream position of the first item currently in the window.
    origin_seq: u64,
    /// Whether window positions are consecutive, enabling slide-order checks.
    sequential: bool,
}

impl ForwardSketch {
    /// Builds the sketch for a full window: entry `i` holds the exact
    /// cumulative counts of the stored values over `window[1..=i]`, and
    /// the base is zero.
    pub fn build(window: &[Item], schema: &AttributeSchema) -> Result<Self, Error> {
        if window.is_empty() {
            return Err(Error::LengthMismatch {
                expected: 1,
                got: 0,
            });
        }
        let cardinality = schema.cardinality();
        let stored = cardinality - 1;
        let mut buf = alloc::vec![0u64; window.len() * stored];
        let mut acc = alloc::vec![0u64; stored];
        for (i, item) in window.iter().enumerate() {
            if item.value >= cardinality {
                return Err(Error::UnknownValue {
                    label: format!("#{}", item.value),
                });
            }
            if item.value < stored {
                acc[item.value] += 1;
            }
            buf[i * stored..(i + 1) * stored].copy_from_slice(&acc);
        }
        let sequential = window
            .windows(2)
            .all(|pair| pair[1].seq == pair[0].seq + 1);
        Ok(Self {
            stored,
            cardinality,
            window_len: window.len(),
            buf,
            head: 0,
            base: alloc::vec![0u64; stored],
            origin_seq: window[0].seq,
            sequential,
        })
    }

    /// Evicts the oldest item and appends `new_item`.
    ///
    /// The base absorbs the evicted item's stored-value indicator (its
    /// cumulative entry relative to the old base), the oldest entry slot is
    /// reused for the new last entry, and every query then reflects the new
    /// window exactly.
    ///
    /// When the window was built over consecutive stream positions, the new
    /// item must arrive at `origin_seq + |W|`; windows rebuilt from a
    /// reordered sequence carry permuted positions, so the check is owned
    /// by the caller there.
    pub fn slide(&mut self, new_item: Item) -> Result<(), Error> {
        if new_item.value >= self.cardinality {
            return Err(Error::UnknownValue {
                label: format!("#{}", new_item.value),
            });
        }
        if self.sequential {
            let expected = self.origin_seq + self.window_len as u64;
            if new_item.seq != expected {
                return Err(Error::OutOfOrder {
                    expected,
                    got: new_item.seq,
                });
            }
        }
        // The oldest entry is the cumulative count through the evicted
        // item, so it becomes the new base verbatim. Its slot is then
        // reused for the new last entry; no allocation on this path.
        let head_at = self.head * self.stored;
        self.base
            .copy_from_slice(&self.buf[head_at..head_at + self.stored]);
        let last_at = ((self.head + self.window_len - 1) % self.window_len) * self.stored;
        self.buf.copy_within(last_at..last_at + self.stored, head_at);
        if new_item.value < self.stored {
            self.buf[head_at + new_item.value] += 1;
        }
        self.head = (self.head + 1) % self.window_len;
        self.origin_seq += 1;
        Ok(())
    }

    /// Exact per-value counts (all `ℓ` values) of block `block_index`
    /// (1-based) under `spec`.
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
        let curr = self.entry(block_index * s - 1);
        let mut counts = Vec::with_capacity(self.cardinality);
        let mut diff_sum = 0u64;
        if block_index == 1 {
            for (c, b) in curr.iter().zip(&self.base) {
                let d = c - b;
                diff_sum += d;
                counts.push(d);
            }
        } else {
            let prev = self.entry((block_index - 1) * s - 1);
            for (c, p) in curr.iter().zip(prev) {
                let d = c - p;
                diff_sum += d;
                counts.push(d);
            }
        }
        counts.push(s as u64 - diff_sum);
        Ok(CountVector(counts))
    }

    /// Exact per-value totals of the whole window: last entry minus base,
    /// with the `ℓ`-th value inferred from `|W|`.
    pub fn window_counts(&self) -> CountVector {
        let last = self.entry(self.window_len - 1);
        let mut counts = Vec::with_capacity(self.cardinality);
        let mut diff_sum = 0u64;
        for (c, b) in last.iter().zip(&self.base) {
            let d = c - b;
            diff_sum += d;
            counts.push(d);
        }
        counts.push(self.window_len as u64 - diff_sum);
        CountVector(counts)
    }

    /// Window length `|W|`.
    #[inline]
    pub fn window_len(&self) -> usize {
        self.window_len
    }

    /// Attribute cardinality `ℓ`.
    #[inline]
    pub fn cardinality(&self) -> usize {
        self.cardinality
    }

    /// Stream position of the first item in the window.
    #[inline]
    pub fn origin_seq(&self) -> u64 {
        self.origin_seq
    }

    /// Raw stored vector at window-relative index `i` (0-based), without
    /// base subtraction. Debug surface for the sketch dump.
    pub fn raw_entry(&self, i: usize) -> &[u64] {
        self.entry(i)
    }

    /// The eviction base vector (stored values only).
    #[inline]
    pub fn base(&self) -> &[u64] {
        &self.base
    }

    #[inline]
    fn entry(&self, i: usize) -> &[u64] {
        let slot = (self.head + i) % self.window_len;
        &self.buf[slot * self.stored..(slot + 1) * self.stored]
    }
}
