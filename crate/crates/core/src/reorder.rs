//! Window reordering: permute a window (optionally extended by landmark
//! items) to maximize the number of unique fair blocks.
//!
//! The search space is built around *isomorphic streams*: a block pattern
//! whose per-value counts form a valid combination is repeated, so every
//! window of `s` consecutive items (not only the disjoint blocks) stays
//! fair. Three constructions are tried per input and the best actual
//! fair-block count wins:
//!
//! 1. the single-pattern stream (`IBC` identical blocks, an extended
//!    prefix of length `EPL`, leftovers at the tail);
//! 2. the two-pattern stream, when the remainder after the `IBC` blocks
//!    fills at least one complete block of a *different* combination;
//! 3. a block chain mixing any number of valid combinations, with each
//!    adjacent pair of patterns aligned so the crossing windows remain
//!    fair. The chain subsumes cases where maximizing disjoint fair
//!    blocks requires three or more combinations at once.

use alloc::collections::VecDeque;
use alloc::format;
use alloc::vec::Vec;

use crate::constraint::{valid_combinations, CountCombination, FairnessConstraint};
use crate::schema::{CountVector, Item};
use crate::window::WindowSpec;
use crate::Error;

/// Which construction produced a [`ReorderResult`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Construction {
    /// Input returned as-is.
    Unchanged,
    /// One pattern repeated `IBC` times plus its extended prefix.
    SingleCase,
    /// Primary pattern blocks followed by a second combination's blocks.
    TwoCase,
    /// A mixed block chain with end extensions.
    Chain,
}

/// A reordered stream and how it was obtained.
#[derive(Debug, Clone)]
pub struct ReorderResult {
    /// Permutation of the input items (same items, same seq ids).
    pub stream: Vec<Item>,
    /// `count_fair_blocks(stream)`.
    pub fair_block_count: u64,
    /// The combination whose pattern fills the leading blocks; `None` when
    /// the input was returned unchanged without choosing one.
    pub primary_combo: Option<CountCombination>,
    /// The second combination of a two-pattern or chained stream.
    pub secondary_combo: Option<CountCombination>,
    /// `false` when the input sequence was returned as-is.
    pub changed: bool,
    /// The winning construction.
    pub construction: Construction,
}

/// The block layout a reordering will materialize.
#[derive(Debug, Clone)]
pub struct PatternPlan {
    /// Value-index sequences of length `s`: the primary pattern, plus one
    /// secondary pattern in the two-case construction.
    pub patterns: Vec<Vec<usize>>,
    pub ibc: u64,
    pub ibc_r: Option<u64>,
    /// Per-value counts of the prefix appended after the blocks.
    pub ep: Vec<u64>,
    pub epl: u64,
    /// Per-value counts appended at the tail, in schema order.
    pub leftovers: Vec<u64>,
}

impl PatternPlan {
    /// Plans the construction for one combination over the given totals:
    /// the single-pattern stream, or the two-pattern stream when the
    /// remainder fills at least one complete block of another combination
    /// and that yields at least as many fair blocks. `None` when not even
    /// one block fits. Returns the chosen secondary combination alongside.
    pub fn for_combination(
        totals: &CountVector,
        combo: &CountCombination,
        all_combos: &[CountCombination],
        constraint: &FairnessConstraint,
        spec: &WindowSpec,
        stream_len: usize,
    ) -> Option<(PatternPlan, Option<CountCombination>)> {
        let cardinality = constraint.cardinality();
        let ranges = constraint.block_ranges(spec);
        let s = spec.block_size as u64;
        let n = stream_len as u64;

        let blocks = ibc(totals, combo);
        if blocks < 1 {
            return None;
        }
        let (ep, epl) = extended_prefix(totals, combo, blocks);
        let remainder = sub(
            totals.as_slice(),
            &combo.counts().iter().map(|v| v * blocks).collect::<Vec<_>>(),
        );
        let single = PatternPlan {
            patterns: alloc::vec![single_case_pattern(combo.counts(), ep.as_slice())],
            ibc: blocks,
            ibc_r: None,
            ep: ep.as_slice().to_vec(),
            epl,
            leftovers: sub(&remainder, ep.as_slice()),
        };
        let single_count = count_fair_values(
            &assemble(&single, &[blocks]),
            &ranges,
            spec.block_size,
            cardinality,
        );

        let mut best_multi: Option<(u64, PatternPlan, CountCombination)> = None;
        if blocks * s < n {
            let remainder_cv = CountVector(remainder.clone());
            for other in all_combos.iter().filter(|c| c.counts() != combo.counts()) {
                let blocks_r = ibc(&remainder_cv, other);
                if blocks_r < 1 {
                    continue;
                }
                let (ep_r, epl_r) = extended_prefix(&remainder_cv, other, blocks_r);
                let ep_r = ep_r.as_slice().to_vec();
                let final_remainder = sub(
                    &remainder,
                    &other.counts().iter().map(|v| v * blocks_r).collect::<Vec<_>>(),
                );
                // The primary pattern is the secondary one with the count
                // differences substituted in place, which keeps every
                // window crossing the pattern boundary between the two
                // combinations' counts.
                let second = secondary_pattern(other.counts(), combo.counts(), &ep_r);
                let first = substitute(&second, other.counts(), combo.counts(), Prefer::None);
                let plan = PatternPlan {
                    patterns: alloc::vec![first, second],
                    ibc: blocks,
                    ibc_r: Some(blocks_r),
                    ep: ep_r.clone(),
                    epl: epl_r,
                    leftovers: sub(&final_remainder, &ep_r),
                };
                let count = count_fair_values(
                    &assemble(&plan, &[blocks, blocks_r]),
                    &ranges,
                    spec.block_size,
                    cardinality,
                );
                if best_multi.as_ref().is_none_or(|(c, ..)| count > *c) {
                    best_multi = Some((count, plan, other.clone()));
                }
            }
        }

        Some(match best_multi {
            Some((count, plan, other)) if count >= single_count => (plan, Some(other)),
            _ => (single, None),
        })
    }
}

/// Number of start positions whose `s`-item block satisfies every value's
/// count range: the reordering objective and its verification oracle.
pub fn count_fair_blocks(
    stream: &[Item],
    constraint: &FairnessConstraint,
    spec: &WindowSpec,
) -> Result<u64, Error> {
    if stream.len() < spec.block_size {
        return Err(Error::StreamTooShort {
            len: stream.len(),
            block_size: spec.block_size,
        });
    }
    let cardinality = constraint.cardinality();
    for it in stream {
        if it.value >= cardinality {
            return Err(Error::UnknownValue {
                label: format!("#{}", it.value),
            });
        }
    }
    let ranges = constraint.block_ranges(spec);
    let values: Vec<usize> = stream.iter().map(|it| it.value).collect();
    Ok(count_fair_values(&values, &ranges, spec.block_size, cardinality))
}

/// Sliding count over raw value indices; tracks how many values are
/// outside their range so each step is O(1).
fn count_fair_values(
    values: &[usize],
    ranges: &[(u64, u64)],
    s: usize,
    cardinality: usize,
) -> u64 {
    let n = values.len();
    if n < s {
        return 0;
    }
    let mut counts = alloc::vec![0u64; cardinality];
    let mut out_of_range = ranges.iter().filter(|&&(lo, _)| lo > 0).count();
    let in_range = |c: u64, (lo, hi): (u64, u64)| c >= lo && c <= hi;
    let bump = |counts: &mut [u64], out: &mut usize, v: usize, up: bool| {
        let before = in_range(counts[v], ranges[v]);
        if up {
            counts[v] += 1;
        } else {
            counts[v] -= 1;
        }
        let after = in_range(counts[v], ranges[v]);
        match (before, after) {
            (true, false) => *out += 1,
            (false, true) => *out -= 1,
            _ => {}
        }
    };
    let mut fair = 0u64;
    for (i, &v) in values.iter().enumerate() {
        bump(&mut counts, &mut out_of_range, v, true);
        if i + 1 >= s {
            if out_of_range == 0 {
                fair += 1;
            }
            if i + 1 < n {
                bump(&mut counts, &mut out_of_range, values[i + 1 - s], false);
            }
        }
    }
    fair
}

/// `min_p ⌊V_p / v_p⌋` with `v_p = 0` contributing nothing (a value the
/// pattern does not require can never be the bottleneck).
pub fn ibc(totals: &CountVector, combo: &CountCombination) -> u64 {
    debug_assert_eq!(totals.len(), combo.len());
    totals
        .as_slice()
        .iter()
        .zip(combo.counts())
        .filter(|&(_, &v)| v > 0)
        .map(|(&total, &v)| total / v)
        .min()
        .unwrap_or(0)
}

/// `EP_p = min(v_p, V_p − ibc·v_p)` and `EPL = Σ EP_p`: the leftover items
/// that can open one more partial pattern after the isomorphic blocks.
pub fn extended_prefix(
    totals: &CountVector,
    combo: &CountCombination,
    ibc: u64,
) -> (CountVector, u64) {
    let ep: Vec<u64> = totals
        .as_slice()
        .iter()
        .zip(combo.counts())
        .map(|(&total, &v)| v.min(total.saturating_sub(ibc * v)))
        .collect();
    let epl = ep.iter().sum();
    (CountVector(ep), epl)
}

/// Repeats each value index `counts[p]` times, in schema order.
fn expand(counts: &[u64]) -> Vec<usize> {
    let mut out = Vec::with_capacity(counts.iter().sum::<u64>() as usize);
    for (value, &c) in counts.iter().enumerate() {
        out.extend(core::iter::repeat_n(value, c as usize));
    }
    out
}

fn sub(a: &[u64], b: &[u64]) -> Vec<u64> {
    a.iter().zip(b).map(|(&x, &y)| x - y).collect()
}

/// Pattern for the single-combination construction: extended-prefix
/// values first (schema order), then the rest of the combination. Placing
/// the prefix values first is what lets the tail prefix keep overlapping
/// windows fair.
fn single_case_pattern(combo: &[u64], ep: &[u64]) -> Vec<usize> {
    let mut pattern = expand(ep);
    pattern.extend(expand(&sub(combo, ep)));
    pattern
}

/// Layout of the secondary pattern in the two-case construction: the
/// final remainder prefix `ep_r` first (it must be this pattern's own
/// prefix for the appended tail to keep overlapping windows fair), then
/// the counts shared with the primary combination, then the surplus.
fn secondary_pattern(budget: &[u64], other: &[u64], ep_r: &[u64]) -> Vec<usize> {
    let mut head = alloc::vec![0u64; budget.len()];
    let mut middle = alloc::vec![0u64; budget.len()];
    let mut tail = alloc::vec![0u64; budget.len()];
    for p in 0..budget.len() {
        let common = budget[p].min(other[p]);
        head[p] = ep_r[p].min(budget[p]);
        middle[p] = common.saturating_sub(head[p]).min(budget[p] - head[p]);
        tail[p] = budget[p] - head[p] - middle[p];
    }
    let mut pattern = expand(&head);
    pattern.extend(expand(&middle));
    pattern.extend(expand(&tail));
    pattern
}

fn assemble(plan: &PatternPlan, reps: &[u64]) -> Vec<usize> {
    let mut values = Vec::new();
    for (pattern, &rep) in plan.patterns.iter().zip(reps) {
        for _ in 0..rep {
            values.extend_from_slice(pattern);
        }
    }
    values.extend(expand(&plan.ep));
    values.extend(expand(&plan.leftovers));
    values
}

/// Fills a value-index sequence with the actual items, consuming each
/// value's items in arrival order.
fn fill_items(values: &[usize], items: &[Item], cardinality: usize) -> Vec<Item> {
    let mut queues: Vec<VecDeque<Item>> = alloc::vec![VecDeque::new(); cardinality];
    for &it in items {
        queues[it.value].push_back(it);
    }
    values
        .iter()
        .map(|&v| queues[v].pop_front().expect("value budget mismatch"))
        .collect()
}

fn unchanged(
    items: &[Item],
    primary: Option<CountCombination>,
    constraint: &FairnessConstraint,
    spec: &WindowSpec,
) -> Result<ReorderResult, Error> {
    Ok(ReorderResult {
        stream: items.to_vec(),
        fair_block_count: count_fair_blocks(items, constraint, spec)?,
        primary_combo: primary,
        secondary_combo: None,
        changed: false,
        construction: Construction::Unchanged,
    })
}

/// Reorders `items` around one count combination: `ibc` isomorphic blocks
/// of its pattern, then either the extended prefix (single case) or a
/// second run of blocks from another combination that the remainder can
/// fill (two-case), then leftovers.
pub fn max_reorder(
    items: &[Item],
    combo: &CountCombination,
    all_combos: &[CountCombination],
    constraint: &FairnessConstraint,
    spec: &WindowSpec,
) -> Result<ReorderResult, Error> {
    let cardinality = constraint.cardinality();
    if combo.len() != cardinality {
        return Err(Error::InvalidConstraint {
            reason: "combination length does not match the schema",
        });
    }
    if items.len() < spec.block_size {
        return Err(Error::StreamTooShort {
            len: items.len(),
            block_size: spec.block_size,
        });
    }
    let totals = CountVector::tally(items, cardinality);
    let Some((plan, secondary)) =
        PatternPlan::for_combination(&totals, combo, all_combos, constraint, spec, items.len())
    else {
        return unchanged(items, Some(combo.clone()), constraint, spec);
    };
    let mut reps = alloc::vec![plan.ibc];
    if let Some(blocks_r) = plan.ibc_r {
        reps.push(blocks_r);
    }
    let values = assemble(&plan, &reps);
    debug_assert_eq!(values.len(), items.len());
    let ranges = constraint.block_ranges(spec);
    let count = count_fair_values(&values, &ranges, spec.block_size, cardinality);
    let construction = if plan.ibc_r.is_some() {
        Construction::TwoCase
    } else {
        Construction::SingleCase
    };
    Ok(ReorderResult {
        stream: fill_items(&values, items, cardinality),
        fair_block_count: count,
        primary_combo: Some(combo.clone()),
        secondary_combo: secondary,
        changed: true,
        construction,
    })
}

/// Runs [`max_reorder`] for every valid combination plus the block-chain
/// construction and returns the result with the maximum fair-block count;
/// ties go to the earlier combination in enumeration order, with the
/// chain and the untouched input as fallbacks.
pub fn bfair_reorder(
    items: &[Item],
    constraint: &FairnessConstraint,
    spec: &WindowSpec,
) -> Result<ReorderResult, Error> {
    if items.len() < spec.block_size {
        return Err(Error::StreamTooShort {
            len: items.len(),
            block_size: spec.block_size,
        });
    }
    let combos = valid_combinations(constraint, spec);
    if combos.is_empty() {
        // Inconsistent ranges (possible under scaled ε): no block can be
        // fair, so reordering cannot help.
        return unchanged(items, None, constraint, spec);
    }

    let mut best: Option<ReorderResult> = None;
    for combo in &combos {
        let candidate = max_reorder(items, combo, &combos, constraint, spec)?;
        if best
            .as_ref()
            .is_none_or(|b| candidate.fair_block_count > b.fair_block_count)
        {
            best = Some(candidate);
        }
    }
    let mut best = best.expect("at least one combination");

    if let Some(chained) = chain_reorder(items, &combos, constraint, spec) {
        if chained.fair_block_count > best.fair_block_count {
            best = chained;
        }
    }

    if !best.changed {
        return Ok(best);
    }
    let input_count = count_fair_blocks(items, constraint, spec)?;
    if input_count > best.fair_block_count {
        return unchanged(items, best.primary_combo, constraint, spec);
    }
    Ok(best)
}

// ---------------------------------------------------------------------------
// Block chains: streams mixing any number of valid combinations.
//
// Every valid combination lies within the per-value ranges, and the ranges
// span at most two adjacent integers, so two patterns laid out as
// `shared part ++ own surplus` keep every window crossing their boundary
// between the two combinations' counts, hence fair. A window of length `s`
// overlaps at most two blocks, so pairwise alignment of adjacent blocks is
// enough: the chain below derives each block's layout from its predecessor
// by substituting the surplus values into the vacated slots in place.
// ---------------------------------------------------------------------------

struct ChainContext<'a> {
    combos: &'a [CountCombination],
    ranges: Vec<(u64, u64)>,
    totals: Vec<u64>,
    s: usize,
    cardinality: usize,
}

fn chain_reorder(
    items: &[Item],
    combos: &[CountCombination],
    constraint: &FairnessConstraint,
    spec: &WindowSpec,
) -> Option<ReorderResult> {
    let cardinality = constraint.cardinality();
    let totals = CountVector::tally(items, cardinality).0;
    let ranges = constraint.block_ranges(spec);
    let ctx = ChainContext {
        combos,
        ranges,
        totals,
        s: spec.block_size,
        cardinality,
    };

    let assignments = best_assignments(&ctx, items.len())?;
    let mut best: Option<(u64, Vec<usize>, Vec<u64>)> = None; // (count, values, multiset)
    for multiset in &assignments {
        let distinct: Vec<usize> = (0..ctx.combos.len())
            .filter(|&c| multiset[c] > 0)
            .collect();
        for variant in ordering_variants(multiset, &distinct) {
            for values in build_chain(&ctx, &variant) {
                let count = count_fair_values(&values, &ctx.ranges, ctx.s, ctx.cardinality);
                if best.as_ref().is_none_or(|(c, ..)| count > *c) {
                    best = Some((count, values, multiset.clone()));
                }
            }
        }
    }

    let (count, values, multiset) = best?;
    let mut by_frequency: Vec<usize> = (0..ctx.combos.len())
        .filter(|&c| multiset[c] > 0)
        .collect();
    by_frequency.sort_by(|&a, &b| multiset[b].cmp(&multiset[a]).then(a.cmp(&b)));
    Some(ReorderResult {
        stream: fill_items(&values, items, cardinality),
        fair_block_count: count,
        primary_combo: Some(combos[by_frequency[0]].clone()),
        secondary_combo: by_frequency.get(1).map(|&c| combos[c].clone()),
        changed: true,
        construction: Construction::Chain,
    })
}

/// Multisets of combinations (indexed into `ctx.combos`) that maximize the
/// total number of disjoint fair blocks buildable from the totals.
///
/// Small instances enumerate every multiset of maximal size; larger ones
/// use one greedy assignment that bumps the values with the most slack.
fn best_assignments(ctx: &ChainContext, n: usize) -> Option<Vec<Vec<u64>>> {
    let lo: Vec<u64> = ctx.ranges.iter().map(|r| r.0).collect();
    let lo_sum: u64 = lo.iter().sum();
    let s = ctx.s as u64;
    if lo_sum > s {
        return None;
    }
    let m_cap = (n / ctx.s) as u64;
    let m_ub = ctx
        .totals
        .iter()
        .zip(&lo)
        .filter(|&(_, &l)| l > 0)
        .map(|(&total, &l)| total / l)
        .min()
        .unwrap_or(m_cap)
        .min(m_cap);
    if m_ub == 0 {
        return None;
    }

    if ctx.combos.len() <= 6 && m_ub <= 16 {
        let mut best_m = 0u64;
        let mut collected: Vec<Vec<u64>> = Vec::new();
        let mut current = alloc::vec![0u64; ctx.combos.len()];
        let mut budget = ctx.totals.clone();
        enumerate_multisets(
            ctx,
            0,
            0,
            &mut current,
            &mut budget,
            &mut best_m,
            &mut collected,
        );
        if best_m == 0 {
            return None;
        }
        return Some(collected);
    }

    greedy_assignment(ctx, m_ub, &lo).map(|ms| alloc::vec![ms])
}

fn enumerate_multisets(
    ctx: &ChainContext,
    combo_idx: usize,
    blocks_so_far: u64,
    current: &mut Vec<u64>,
    budget: &mut Vec<u64>,
    best_m: &mut u64,
    collected: &mut Vec<Vec<u64>>,
) {
    const MAX_COLLECTED: usize = 64;
    if combo_idx == ctx.combos.len() {
        if blocks_so_far > *best_m {
            *best_m = blocks_so_far;
            collected.clear();
        }
        if blocks_so_far == *best_m && *best_m > 0 && collected.len() < MAX_COLLECTED {
            collected.push(current.clone());
        }
        return;
    }
    // Upper bound on blocks this combination can still add.
    let counts = ctx.combos[combo_idx].counts();
    let max_here = counts
        .iter()
        .zip(budget.iter())
        .filter(|&(&v, _)| v > 0)
        .map(|(&v, &b)| b / v)
        .min()
        .unwrap_or(0);
    for take in (0..=max_here).rev() {
        for (b, &v) in budget.iter_mut().zip(counts) {
            *b -= v * take;
        }
        current[combo_idx] = take;
        enumerate_multisets(
            ctx,
            combo_idx + 1,
            blocks_so_far + take,
            current,
            budget,
            best_m,
            collected,
        );
        current[combo_idx] = 0;
        for (b, &v) in budget.iter_mut().zip(counts) {
            *b += v * take;
        }
    }
}

/// Largest feasible `m`, assigning each block's fractional bumps to the
/// values with the most remaining slack.
fn greedy_assignment(ctx: &ChainContext, m_ub: u64, lo: &[u64]) -> Option<Vec<u64>> {
    let s = ctx.s as u64;
    let lo_sum: u64 = lo.iter().sum();
    let d = (s - lo_sum) as usize;
    let fractional: Vec<usize> = ctx
        .ranges
        .iter()
        .enumerate()
        .filter(|(_, &(l, h))| h > l)
        .map(|(p, _)| p)
        .collect();
    if d > fractional.len() {
        return None;
    }
    'outer: for m in (1..=m_ub).rev() {
        let mut cap: Vec<u64> = fractional
            .iter()
            .map(|&p| (ctx.totals[p] - m * lo[p]).min(m))
            .collect();
        if cap.iter().sum::<u64>() < m * d as u64 {
            continue;
        }
        let mut multiset = alloc::vec![0u64; ctx.combos.len()];
        for _ in 0..m {
            // Bump the d fractional values with the largest remaining capacity.
            let mut order: Vec<usize> = (0..fractional.len()).collect();
            order.sort_by(|&a, &b| cap[b].cmp(&cap[a]).then(a.cmp(&b)));
            let chosen = &order[..d];
            if chosen.iter().any(|&i| cap[i] == 0) {
                continue 'outer;
            }
            let mut combo: Vec<u64> = lo.to_vec();
            for &i in chosen {
                cap[i] -= 1;
                combo[fractional[i]] += 1;
            }
            let idx = ctx
                .combos
                .iter()
                .position(|c| c.counts() == combo.as_slice())?;
            multiset[idx] += 1;
        }
        return Some(multiset);
    }
    None
}

/// Block orderings worth trying: runs in enumeration order, plus each
/// distinct combination rotated to the end (the final block's pattern
/// shapes how long a prefix the remainder can extend).
fn ordering_variants(multiset: &[u64], distinct: &[usize]) -> Vec<Vec<usize>> {
    let mut variants = Vec::with_capacity(distinct.len() + 1);
    let base: Vec<usize> = distinct
        .iter()
        .flat_map(|&c| core::iter::repeat_n(c, multiset[c] as usize))
        .collect();
    variants.push(base.clone());
    for &last in distinct {
        let mut v: Vec<usize> = base.iter().copied().filter(|&c| c != last).collect();
        v.extend(core::iter::repeat_n(last, multiset[last] as usize));
        if v != base {
            variants.push(v);
        }
    }
    variants
}

/// Lays out the chain's blocks plus the fair extensions on both ends:
/// a suffix of a virtual *preceding* block in front, the longest prefix
/// of a virtual *next* block behind, leftovers at the tail. Returns both
/// allocation orders (front extension first vs. back extension first),
/// since the two extensions compete for the same leftover items.
fn build_chain(ctx: &ChainContext, block_combos: &[usize]) -> Vec<Vec<usize>> {
    let mut blocks = Vec::with_capacity(ctx.totals.iter().sum::<u64>() as usize);
    let mut layout = expand(ctx.combos[block_combos[0]].counts());
    let first_layout = layout.clone();
    blocks.extend_from_slice(&layout);
    for pair in block_combos.windows(2) {
        layout = substitute(
            &layout,
            ctx.combos[pair[0]].counts(),
            ctx.combos[pair[1]].counts(),
            Prefer::None,
        );
        blocks.extend_from_slice(&layout);
    }

    let mut remainder = ctx.totals.clone();
    for &c in block_combos {
        for (r, &v) in remainder.iter_mut().zip(ctx.combos[c].counts()) {
            *r -= v;
        }
    }

    let first = ctx.combos[block_combos[0]].counts();
    let last = ctx.combos[*block_combos.last().unwrap()].counts();
    let mut variants = Vec::with_capacity(2);
    for back_first in [true, false] {
        let mut avail = remainder.clone();
        let (front, back) = if back_first {
            let back = best_back_extension(ctx, &layout, last, &mut avail);
            let front = best_front_extension(ctx, &first_layout, first, &mut avail);
            (front, back)
        } else {
            let front = best_front_extension(ctx, &first_layout, first, &mut avail);
            let back = best_back_extension(ctx, &layout, last, &mut avail);
            (front, back)
        };
        let mut values = front;
        values.extend_from_slice(&blocks);
        values.extend_from_slice(&back);
        values.extend(expand(&avail));
        variants.push(values);
        if remainder.iter().all(|&r| r == 0) {
            break;
        }
    }
    variants
}

/// Longest buildable prefix of a virtual block following the last one,
/// over every choice of its combination; consumes the chosen items.
fn best_back_extension(
    ctx: &ChainContext,
    last_layout: &[usize],
    last_combo: &[u64],
    avail: &mut [u64],
) -> Vec<usize> {
    let mut best: Vec<usize> = Vec::new();
    for combo in ctx.combos {
        let virtual_layout = substitute(
            last_layout,
            last_combo,
            combo.counts(),
            Prefer::Early(avail),
        );
        let mut stock = avail.to_vec();
        let mut prefix = Vec::new();
        for &v in virtual_layout.iter().take(ctx.s - 1) {
            if stock[v] == 0 {
                break;
            }
            stock[v] -= 1;
            prefix.push(v);
        }
        if prefix.len() > best.len() {
            best = prefix;
        }
    }
    for &v in &best {
        avail[v] -= 1;
    }
    best
}

/// Longest buildable suffix of a virtual block preceding the first one;
/// consumes the chosen items.
fn best_front_extension(
    ctx: &ChainContext,
    first_layout: &[usize],
    first_combo: &[u64],
    avail: &mut [u64],
) -> Vec<usize> {
    let mut best: Vec<usize> = Vec::new();
    for combo in ctx.combos {
        let virtual_layout = substitute(
            first_layout,
            first_combo,
            combo.counts(),
            Prefer::Late(avail),
        );
        let mut stock = avail.to_vec();
        let mut suffix = Vec::new();
        for &v in virtual_layout.iter().rev().take(ctx.s - 1) {
            if stock[v] == 0 {
                break;
            }
            stock[v] -= 1;
            suffix.push(v);
        }
        suffix.reverse();
        if suffix.len() > best.len() {
            best = suffix;
        }
    }
    for &v in &best {
        avail[v] -= 1;
    }
    best
}

/// Surplus placement strategy for [`substitute`].
enum Prefer<'a> {
    None,
    /// Values with stock in the given remainder go to the earliest
    /// vacated slots (extends a buildable prefix).
    Early(&'a [u64]),
    /// Stocked values go to the latest vacated slots (extends a suffix).
    Late(&'a [u64]),
}

/// Derives an adjacent block's layout from the previous one: values the
/// new combination no longer needs vacate their last occurrence, and the
/// new combination's surplus values fill the vacated slots in place, so
/// shared values keep their positions and crossing windows stay fair.
fn substitute(layout: &[usize], from: &[u64], to: &[u64], prefer: Prefer) -> Vec<usize> {
    let mut out: Vec<Option<usize>> = layout.iter().map(|&v| Some(v)).collect();
    let mut removals: Vec<u64> = from
        .iter()
        .zip(to)
        .map(|(&f, &t)| f.saturating_sub(t))
        .collect();
    for slot in (0..out.len()).rev() {
        let v = out[slot].unwrap();
        if removals[v] > 0 {
            removals[v] -= 1;
            out[slot] = None;
        }
    }
    let mut surplus: Vec<usize> = Vec::new();
    for (p, (&f, &t)) in from.iter().zip(to).enumerate() {
        for _ in f..t {
            surplus.push(p);
        }
    }
    match prefer {
        Prefer::None => {}
        Prefer::Early(avail) => surplus.sort_by_key(|&p| (avail[p] == 0, p)),
        Prefer::Late(avail) => surplus.sort_by_key(|&p| (avail[p] > 0, p)),
    }
    let mut next = surplus.into_iter();
    out.into_iter()
        .map(|slot| slot.unwrap_or_else(|| next.next().expect("surplus matches vacancies")))
        .collect()
}
