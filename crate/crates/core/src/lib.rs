//! Block-level group fairness over count-based sliding windows.
//!
//! A stream of items carries one protected attribute with `ℓ` possible
//! values. Every window of the latest `|W|` items is split into `k`
//! equal blocks of size `s`, and the window is *fair* when each block
//! holds every value `p` within `[⌊f(p)·s⌋, ⌈f(p)·s⌉]` of its required
//! proportion `f(p)`. This crate provides:
//!
//! - [`sketch::ForwardSketch`]: per-position cumulative counts of the
//!   first `ℓ−1` values, built in `O(|W|·ℓ)`, slid in `O(ℓ)`, and
//!   queried per block in `O(ℓ)`;
//! - [`monitor`]: the block-by-block fairness verdict with early
//!   termination, plus the window-feasibility test that decides whether
//!   an in-window permutation can restore fairness;
//! - [`reorder`]: the reordering search that permutes a window
//!   (optionally extended by landmark items) into an isomorphic-block
//!   stream maximizing the number of unique fair blocks;
//! - [`oracle`]: naive recounting, a brute-force reorder optimum, and
//!   the backward (suffix-cumulative) sketch, used as ground truth by
//!   tests and benchmarks.
//!
//! The crate is `no_std`-compatible (requires `alloc`); the companion
//! `fairstream` crate adds stream sources, the engine loop, and the CLI.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

mod error;

pub mod constraint;
pub mod monitor;
pub mod oracle;
pub mod reorder;
pub mod schema;
pub mod sketch;
pub mod window;

pub use constraint::{CountCombination, FairnessConstraint, Proportion};
pub use error::Error;
pub use monitor::{feasible_within_window, monitor_bfair, Verdict, Violation};
pub use reorder::{bfair_reorder, count_fair_blocks, Construction, ReorderResult};
pub use schema::{AttributeSchema, CountVector, Item};
pub use sketch::ForwardSketch;
pub use window::WindowSpec;
