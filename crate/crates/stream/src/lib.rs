//! Streaming side of the block-fairness toolkit: the monitoring engine,
//! stream sources and event sinks, synthetic generation, benchmarks, and
//! the command-line interface. The algorithms live in `fairstream-core`.

pub mod bench;
pub mod cli;
pub mod config;
pub mod engine;
pub mod events;
pub mod gen;
pub mod source;

pub use engine::{Engine, EngineError};
pub use events::{EngineEvent, MetricsEvent, ReorderEvent, ReorderScope, VerdictEvent};
