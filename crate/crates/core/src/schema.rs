//! The protected attribute schema and the items that carry it.

use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use crate::Error;

/// The ordered set of `ℓ` distinct values a protected attribute may take.
///
/// The ordering is fixed at construction: sketches store cumulative counts
/// for the first `ℓ−1` values and infer the last one, so the layout of
/// every downstream structure depends on this order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AttributeSchema {
    values: Vec<String>,
}

impl AttributeSchema {
    /// Builds a schema from ordered labels. Requires `ℓ ≥ 2` and all
    /// labels distinct.
    pub fn new<I, S>(labels: I) -> Result<Self, Error>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let values: Vec<String> = labels.into_iter().map(Into::into).collect();
        if values.len() < 2 {
            return Err(Error::SchemaTooSmall {
                cardinality: values.len(),
            });
        }
        for (i, v) in values.iter().enumerate() {
            if values[..i].contains(v) {
                return Err(Error::DuplicateLabel { label: v.clone() });
            }
        }
        Ok(Self { values })
    }

    /// Number of attribute values `ℓ`.
    #[inline]
    pub fn cardinality(&self) -> usize {
        self.values.len()
    }

    /// The ordered labels.
    #[inline]
    pub fn values(&self) -> &[String] {
        &self.values
    }

    /// Index of `label` in schema order.
    pub fn index_of(&self, label: &str) -> Result<usize, Error> {
        self.values
            .iter()
            .position(|v| v == label)
            .ok_or_else(|| Error::UnknownValue {
                label: label.to_string(),
            })
    }

    /// Label at `index` (schema order).
    #[inline]
    pub fn label(&self, index: usize) -> &str {
        &self.values[index]
    }

    /// Convenience constructor for an item carrying `label`.
    pub fn item(&self, seq: u64, label: &str) -> Result<Item, Error> {
        Ok(Item {
            seq,
            value: self.index_of(label)?,
        })
    }

    /// Maps a whole label sequence to items with positions `1..=n`.
    pub fn items_from_labels<'a, I>(&self, labels: I) -> Result<Vec<Item>, Error>
    where
        I: IntoIterator<Item = &'a str>,
    {
        labels
            .into_iter()
            .enumerate()
            .map(|(i, l)| self.item(i as u64 + 1, l))
            .collect()
    }
}

/// One stream element: its position in the stream and its attribute value
/// (as an index into the [`AttributeSchema`]).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Item {
    /// 1-based stream position; strictly increasing at ingestion.
    pub seq: u64,
    /// Index of the protected attribute value in schema order.
    pub value: usize,
}

impl Item {
    #[inline]
    pub fn new(seq: u64, value: usize) -> Self {
        Self { seq, value }
    }
}

/// Per-value counts, index-aligned with the schema.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct CountVector(pub Vec<u64>);

impl CountVector {
    /// A zero vector of the given length.
    pub fn zeros(len: usize) -> Self {
        CountVector(alloc::vec![0; len])
    }

    /// Exact per-value counts of a slice of items.
    pub fn tally(items: &[Item], cardinality: usize) -> Self {
        let mut counts = alloc::vec![0u64; cardinality];
        for it in items {
            counts[it.value] += 1;
        }
        CountVector(counts)
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.0.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    #[inline]
    pub fn sum(&self) -> u64 {
        self.0.iter().sum()
    }

    #[inline]
    pub fn as_slice(&self) -> &[u64] {
        &self.0
    }
}

impl fmt::Debug for CountVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.0.iter()).finish()
    }
}

impl From<Vec<u64>> for CountVector {
    fn from(v: Vec<u64>) -> Self {
        CountVector(v)
    }
}

impl core::ops::Index<usize> for CountVector {
    type Output = u64;
    #[inline]
    fn index(&self, i: usize) -> &u64 {
        &self.0[i]
    }
}
