//! Group fairness constraints and the per-block count combinations they
//! admit.

use alloc::vec::Vec;

use crate::schema::AttributeSchema;
use crate::window::WindowSpec;
use crate::Error;

/// A required proportion `f(p)`, kept exact when supplied as a ratio.
///
/// Decimal strings parse to exact ratios (`"0.3"` → `3/10`), so ranges like
/// `⌊0.3·5⌋` never depend on how a platform rounds `0.3`. Raw floats are
/// accepted too and are floored/ceiled with a `1e-9` slack.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Proportion {
    /// Exact `numerator / denominator`.
    Ratio(u64, u64),
    /// Nearest-representable float, rounded with slack.
    Float(f64),
}

/// Slack applied before floor/ceil of float-valued proportions.
const FLOAT_SLACK: f64 = 1e-9;

impl Proportion {
    /// Parses `"a/b"` or a decimal string into an exact ratio.
    pub fn parse(text: &str) -> Result<Self, Error> {
        let bad = || Error::InvalidConstraint {
            reason: "proportions must be decimals or a/b ratios",
        };
        let text = text.trim();
        if let Some((a, b)) = text.split_once('/') {
            let num: u64 = a.trim().parse().map_err(|_| bad())?;
            let den: u64 = b.trim().parse().map_err(|_| bad())?;
            if den == 0 {
                return Err(bad());
            }
            return Ok(Self::ratio(num, den));
        }
        let (int_part, frac_part) = match text.split_once('.') {
            Some((i, f)) => (i, f),
            None => (text, ""),
        };
        if frac_part.len() > 18 {
            return Err(bad());
        }
        let int_val: u64 = if int_part.is_empty() {
            0
        } else {
            int_part.parse().map_err(|_| bad())?
        };
        let frac_val: u64 = if frac_part.is_empty() {
            0
        } else {
            frac_part.parse().map_err(|_| bad())?
        };
        let den = 10u64.pow(frac_part.len() as u32);
        Ok(Self::ratio(int_val * den + frac_val, den))
    }

    fn ratio(num: u64, den: u64) -> Self {
        let g = gcd(num, den);
        Proportion::Ratio(num / g, den / g)
    }

    /// The proportion as a float (for sum checks and reporting).
    pub fn as_f64(&self) -> f64 {
        match *self {
            Proportion::Ratio(n, d) => n as f64 / d as f64,
            Proportion::Float(x) => x,
        }
    }

    /// `(⌊ε·f·s⌋, ⌈ε·f·s⌉)`. Exact integer arithmetic when the proportion
    /// is a ratio and `ε` is 1; otherwise float with slack.
    fn count_range(&self, block_size: usize, epsilon: f64) -> (u64, u64) {
        let s = block_size as u64;
        if epsilon == 1.0 {
            if let Proportion::Ratio(n, d) = *self {
                let num = n as u128 * s as u128;
                let den = d as u128;
                let lo = (num / den) as u64;
                let hi = num.div_ceil(den) as u64;
                return (lo, hi);
            }
        }
        let t = epsilon * self.as_f64() * s as f64;
        (floor_nonneg(t + FLOAT_SLACK), ceil_nonneg(t - FLOAT_SLACK))
    }
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a.max(1)
}

/// Floor of a nonnegative float as u64 (`as` truncates toward zero).
fn floor_nonneg(x: f64) -> u64 {
    if x <= 0.0 {
        0
    } else {
        x as u64
    }
}

fn ceil_nonneg(x: f64) -> u64 {
    if x <= 0.0 {
        return 0;
    }
    let t = x as u64;
    if (t as f64) < x {
        t + 1
    } else {
        t
    }
}

/// The group fairness constraint: one proportion per schema value,
/// summing to 1, plus the optional scaling factor `ε` (default 1).
#[derive(Debug, Clone, PartialEq)]
pub struct FairnessConstraint {
    proportions: Vec<Proportion>,
    epsilon: f64,
}

impl FairnessConstraint {
    /// Builds a constraint from `(label, proportion)` pairs. Every schema
    /// value must get exactly one entry and the proportions must sum to 1
    /// within `1e-9`.
    pub fn new<'a, I>(schema: &AttributeSchema, entries: I) -> Result<Self, Error>
    where
        I: IntoIterator<Item = (&'a str, Proportion)>,
    {
        let mut proportions: Vec<Option<Proportion>> =
            alloc::vec![None; schema.cardinality()];
        for (label, p) in entries {
            let idx = schema.index_of(label)?;
            if proportions[idx].is_some() {
                return Err(Error::InvalidConstraint {
                    reason: "a value was given two proportions",
                });
            }
            proportions[idx] = Some(p);
        }
        let proportions: Vec<Proportion> = proportions
            .into_iter()
            .collect::<Option<_>>()
            .ok_or(Error::InvalidConstraint {
                reason: "every schema value needs a proportion",
            })?;
        Self::from_proportions(proportions, 1.0)
    }

    /// Builds a constraint from proportions already in schema order.
    pub fn from_proportions(
        proportions: Vec<Proportion>,
        epsilon: f64,
    ) -> Result<Self, Error> {
        if proportions.iter().any(|p| {
            let v = p.as_f64();
            !(v > 0.0 && v <= 1.0)
        }) {
            return Err(Error::InvalidConstraint {
                reason: "each proportion must lie in (0, 1]",
            });
        }
        let sum: f64 = proportions.iter().map(Proportion::as_f64).sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidConstraint {
                reason: "proportions must sum to 1",
            });
        }
        if !epsilon.is_finite() || epsilon <= 0.0 {
            return Err(Error::InvalidConstraint {
                reason: "epsilon must be positive",
            });
        }
        Ok(Self {
            proportions,
            epsilon,
        })
    }

    /// Same proportions with a different `ε` scaling.
    pub fn with_epsilon(mut self, epsilon: f64) -> Result<Self, Error> {
        if !epsilon.is_finite() || epsilon <= 0.0 {
            return Err(Error::InvalidConstraint {
                reason: "epsilon must be positive",
            });
        }
        self.epsilon = epsilon;
        Ok(self)
    }

    #[inline]
    pub fn cardinality(&self) -> usize {
        self.proportions.len()
    }

    #[inline]
    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    #[inline]
    pub fn proportions(&self) -> &[Proportion] {
        &self.proportions
    }

    /// `(⌊ε·f(p)·s⌋, ⌈ε·f(p)·s⌉)` for the value at `index`.
    pub fn count_range_at(&self, spec: &WindowSpec, index: usize) -> (u64, u64) {
        self.proportions[index].count_range(spec.block_size, self.epsilon)
    }

    /// All per-value ranges in schema order.
    pub fn block_ranges(&self, spec: &WindowSpec) -> Vec<(u64, u64)> {
        self.proportions
            .iter()
            .map(|p| p.count_range(spec.block_size, self.epsilon))
            .collect()
    }
}

/// Allowed in-block count range for the value labeled `p`.
pub fn count_range(
    constraint: &FairnessConstraint,
    spec: &WindowSpec,
    schema: &AttributeSchema,
    p: &str,
) -> Result<(u64, u64), Error> {
    let idx = schema.index_of(p)?;
    Ok(constraint.count_range_at(spec, idx))
}

/// One admissible assignment of per-value counts for a single block:
/// `v_p` within its count range for every value and `Σ v_p = s`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CountCombination(pub Vec<u64>);

impl CountCombination {
    #[inline]
    pub fn counts(&self) -> &[u64] {
        &self.0
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.0.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Enumerates every integer vector `v` with `v_p` in its count range and
/// `Σ v_p = s`, in lexicographic order by schema value order.
///
/// The list can only be empty when the ranges are inconsistent with `s`
/// (`Σ lo > s` or `Σ hi < s`), which cannot happen for a well-formed
/// constraint with `ε = 1` but is guarded anyway.
pub fn valid_combinations(
    constraint: &FairnessConstraint,
    spec: &WindowSpec,
) -> Vec<CountCombination> {
    let ranges = constraint.block_ranges(spec);
    let s = spec.block_size as u64;
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(ranges.len());
    enumerate(&ranges, s, &mut current, &mut out);
    out
}

fn enumerate(
    ranges: &[(u64, u64)],
    remaining: u64,
    current: &mut Vec<u64>,
    out: &mut Vec<CountCombination>,
) {
    if ranges.is_empty() {
        if remaining == 0 {
            out.push(CountCombination(current.clone()));
        }
        return;
    }
    let (lo, hi) = ranges[0];
    let rest = &ranges[1..];
    let rest_lo: u64 = rest.iter().map(|r| r.0).sum();
    let rest_hi: u64 = rest.iter().map(|r| r.1).sum();
    for v in lo..=hi.min(remaining) {
        // Prune branches that cannot reach the exact block sum.
        let left = remaining - v;
        if left < rest_lo || left > rest_hi {
            continue;
        }
        current.push(v);
        enumerate(rest, left, current, out);
        current.pop();
    }
}
