//! The continuous monitoring loop: window buffering, sketch lifecycle,
//! verdict emission, feasibility routing, landmark accumulation, and
//! reorder application.

use std::collections::VecDeque;
use std::time::Instant;

use fairstream_core::monitor::{feasible_within_window, monitor_bfair, Verdict};
use fairstream_core::reorder::{bfair_reorder, count_fair_blocks};
use fairstream_core::schema::{AttributeSchema, Item};
use fairstream_core::sketch::ForwardSketch;
use fairstream_core::{FairnessConstraint, WindowSpec};

use crate::events::{
    EngineEvent, MetricsEvent, ReorderEvent, ReorderScope, VerdictEvent, ViolationEvent,
};

#[derive(Debug, thiserror::Error)]
pub enum EngineError {
    #[error("item arrived out of order: expected position {expected}, got {got}")]
    OutOfOrder { expected: u64, got: u64 },
    #[error("attribute value index {0} is outside the schema")]
    UnknownValue(usize),
    #[error("engine already finalized; no further items accepted")]
    Draining,
    #[error(transparent)]
    Core(#[from] fairstream_core::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Phase {
    Warming,
    Monitoring,
    CollectingLandmarks,
    Draining,
}

/// One engine instance per stream. Items arrive at consecutive positions;
/// every full window gets a verdict on slide boundaries, unfair windows
/// are reordered in place when their totals allow it and otherwise after
/// buffering landmark items.
pub struct Engine {
    schema: AttributeSchema,
    constraint: FairnessConstraint,
    spec: WindowSpec,
    phase: Phase,
    /// Current window, oldest first; exactly `|W|` items once warm.
    buffer: VecDeque<Item>,
    sketch: Option<ForwardSketch>,
    landmarks: Vec<Item>,
    /// Arrival stamps of the buffered landmarks (for flush latencies).
    landmark_arrivals: Vec<u64>,
    paused_arrival_us: u64,
    window_id: u64,
    next_seq: Option<u64>,
    items_into_slide: usize,
    started: Instant,
    metrics_every: u64,
    last_metrics_window: u64,
    // Cumulative metrics.
    latencies_us: Vec<u64>,
    windows_seen: u64,
    windows_fair: u64,
    last_counted: Option<(u64, bool)>,
    sketch_rebuilds: u64,
    scope_blocks: u64,
    scope_fair_before: u64,
    scope_fair_after: u64,
    /// Optional tap recording items in their final (post-reorder) order.
    capture: Option<Vec<Item>>,
}

impl Engine {
    pub fn new(
        schema: AttributeSchema,
        constraint: FairnessConstraint,
        spec: WindowSpec,
        metrics_every: u64,
    ) -> Self {
        Self {
            schema,
            constraint,
            spec,
            phase: Phase::Warming,
            buffer: VecDeque::with_capacity(spec.window_size),
            sketch: None,
            landmarks: Vec::new(),
            landmark_arrivals: Vec::new(),
            paused_arrival_us: 0,
            window_id: 0,
            next_seq: None,
            items_into_slide: 0,
            started: Instant::now(),
            metrics_every: metrics_every.max(1),
            last_metrics_window: 0,
            latencies_us: Vec::new(),
            windows_seen: 0,
            windows_fair: 0,
            last_counted: None,
            sketch_rebuilds: 0,
            scope_blocks: 0,
            scope_fair_before: 0,
            scope_fair_after: 0,
            capture: None,
        }
    }

    /// Records every item in its final emitted order (reorder scopes
    /// permuted, everything else untouched). Test/debug surface.
    pub fn with_output_capture(mut self) -> Self {
        self.capture = Some(Vec::new());
        self
    }

    /// Items emitted so far in final order.
    pub fn captured_output(&self) -> &[Item] {
        self.capture.as_deref().unwrap_or(&[])
    }

    /// How many times the sketch was built from scratch.
    pub fn sketch_rebuilds(&self) -> u64 {
        self.sketch_rebuilds
    }

    /// The current window contents, oldest first (introspection).
    pub fn current_window(&self) -> Vec<Item> {
        self.buffer.iter().copied().collect()
    }

    fn now_us(&self) -> u64 {
        self.started.elapsed().as_micros() as u64
    }

    /// Feeds one item; returns the events it produced, in order.
    pub fn process_item(&mut self, item: Item) -> Result<Vec<EngineEvent>, EngineError> {
        if self.phase == Phase::Draining {
            return Err(EngineError::Draining);
        }
        if item.value >= self.schema.cardinality() {
            return Err(EngineError::UnknownValue(item.value));
        }
        if let Some(expected) = self.next_seq {
            if item.seq != expected {
                return Err(EngineError::OutOfOrder {
                    expected,
                    got: item.seq,
                });
            }
        }
        self.next_seq = Some(item.seq + 1);

        let mut events = Vec::new();
        match self.phase {
            Phase::Warming => {
                self.buffer.push_back(item);
                if self.buffer.len() == self.spec.window_size {
                    let arrived = self.now_us();
                    self.rebuild_sketch()?;
                    self.window_id += 1;
                    self.items_into_slide = 0;
                    let verdict = self.monitor()?;
                    self.emit_verdict(&verdict, arrived, &mut events);
                    if !verdict.is_fair() {
                        self.route_violation(arrived, &mut events)?;
                    }
                    if self.phase == Phase::Warming {
                        self.phase = Phase::Monitoring;
                    }
                }
            }
            Phase::Monitoring => {
                let arrived = self.now_us();
                self.slide_one(item)?;
                self.items_into_slide += 1;
                if self.items_into_slide == self.spec.slide {
                    self.items_into_slide = 0;
                    self.window_id += 1;
                    let verdict = self.monitor()?;
                    self.emit_verdict(&verdict, arrived, &mut events);
                    if !verdict.is_fair() {
                        self.route_violation(arrived, &mut events)?;
                    }
                }
            }
            Phase::CollectingLandmarks => {
                self.landmarks.push(item);
                self.landmark_arrivals.push(self.now_us());
                if self.landmarks.len() == self.spec.landmark_size {
                    self.flush_landmark_reorder(&mut events)?;
                }
            }
            Phase::Draining => unreachable!(),
        }
        Ok(events)
    }

    /// Flushes any pending landmark reorder (with however many landmarks
    /// arrived), emits the final metrics snapshot, and drains the engine.
    /// Repeat calls are no-ops.
    pub fn finalize(&mut self) -> Result<Vec<EngineEvent>, EngineError> {
        if self.phase == Phase::Draining {
            return Ok(Vec::new());
        }
        let mut events = Vec::new();
        if self.phase == Phase::CollectingLandmarks {
            log::info!(
                "stream ended mid-collection: reordering with {} of {} landmarks",
                self.landmarks.len(),
                self.spec.landmark_size
            );
            self.flush_landmark_reorder(&mut events)?;
        }
        if self.phase == Phase::Warming && self.windows_seen == 0 {
            log::info!(
                "stream ended during warm-up: {} of {} items buffered, no verdicts",
                self.buffer.len(),
                self.spec.window_size
            );
        }
        if let Some(capture) = self.capture.as_mut() {
            capture.extend(self.buffer.iter().copied());
        }
        self.phase = Phase::Draining;
        events.push(EngineEvent::Metrics(self.metrics_snapshot()));
        Ok(events)
    }

    fn rebuild_sketch(&mut self) -> Result<(), EngineError> {
        let window: Vec<Item> = self.buffer.iter().copied().collect();
        self.sketch = Some(ForwardSketch::build(&window, &self.schema)?);
        self.sketch_rebuilds += 1;
        Ok(())
    }

    fn slide_one(&mut self, item: Item) -> Result<(), EngineError> {
        let evicted = self.buffer.pop_front().expect("warm window");
        if let Some(capture) = self.capture.as_mut() {
            capture.push(evicted);
        }
        self.buffer.push_back(item);
        self.sketch
            .as_mut()
            .expect("sketch exists while monitoring")
            .slide(item)?;
        Ok(())
    }

    fn monitor(&mut self) -> Result<Verdict, EngineError> {
        let sketch = self.sketch.as_ref().expect("sketch built");
        Ok(monitor_bfair(sketch, &self.constraint, &self.spec)?)
    }

    fn emit_verdict(&mut self, verdict: &Verdict, arrived_us: u64, events: &mut Vec<EngineEvent>) {
        let emitted_us = self.now_us();
        let event = VerdictEvent {
            window_id: self.window_id,
            fair: verdict.is_fair(),
            violation: verdict.violation.as_ref().map(|v| ViolationEvent {
                block: v.block as u64,
                value: self.schema.label(v.value).to_string(),
                observed: v.observed,
                lo: v.lo,
                hi: v.hi,
            }),
            arrived_us,
            emitted_us,
        };
        self.latencies_us.push(event.latency_us());
        match self.last_counted {
            Some((id, was_fair)) if id == self.window_id => {
                // Re-verdict after a reorder replaces the previous one.
                if was_fair && !event.fair {
                    self.windows_fair -= 1;
                } else if !was_fair && event.fair {
                    self.windows_fair += 1;
                }
            }
            _ => {
                self.windows_seen += 1;
                if event.fair {
                    self.windows_fair += 1;
                }
            }
        }
        self.last_counted = Some((self.window_id, event.fair));
        events.push(EngineEvent::Verdict(event));
        self.maybe_emit_metrics(events);
    }

    fn maybe_emit_metrics(&mut self, events: &mut Vec<EngineEvent>) {
        if self.window_id.is_multiple_of(self.metrics_every) && self.window_id > self.last_metrics_window {
            self.last_metrics_window = self.window_id;
            events.push(EngineEvent::Metrics(self.metrics_snapshot()));
        }
    }

    /// An unfair window either gets reordered in place (feasible totals,
    /// or no landmark budget) or pauses the engine to buffer landmarks.
    fn route_violation(
        &mut self,
        arrived_us: u64,
        events: &mut Vec<EngineEvent>,
    ) -> Result<(), EngineError> {
        let totals = self
            .sketch
            .as_ref()
            .expect("sketch built")
            .window_counts();
        if feasible_within_window(&totals, &self.constraint, &self.spec)
            || self.spec.landmark_size == 0
        {
            self.reorder_in_window(arrived_us, events)
        } else {
            log::debug!(
                "window {} infeasible in place; buffering {} landmarks",
                self.window_id,
                self.spec.landmark_size
            );
            self.phase = Phase::CollectingLandmarks;
            self.paused_arrival_us = arrived_us;
            self.landmarks.clear();
            self.landmark_arrivals.clear();
            Ok(())
        }
    }

    fn reorder_in_window(
        &mut self,
        arrived_us: u64,
        events: &mut Vec<EngineEvent>,
    ) -> Result<(), EngineError> {
        let window: Vec<Item> = self.buffer.iter().copied().collect();
        let before = count_fair_blocks(&window, &self.constraint, &self.spec)?;
        let result = bfair_reorder(&window, &self.constraint, &self.spec)?;
        self.record_scope(window.len(), before, result.fair_block_count);
        if result.changed {
            self.buffer = result.stream.iter().copied().collect();
            self.rebuild_sketch()?;
        }
        events.push(EngineEvent::Reorder(ReorderEvent {
            window_id: self.window_id,
            scope: ReorderScope::InWindow,
            combos: combos_of(&result),
            fair_blocks_before: before,
            fair_blocks_after: result.fair_block_count,
            landmarks_collected: None,
            landmarks_requested: self.spec.landmark_size as u64,
        }));
        // Re-verdict the same window; never re-route it.
        let verdict = self.monitor()?;
        self.emit_verdict(&verdict, arrived_us, events);
        Ok(())
    }

    /// Reorders window ∪ landmarks, replaces the buffered suffix with the
    /// permuted sequence, and emits the paused window's verdict plus one
    /// verdict per slid window over the reordered items.
    fn flush_landmark_reorder(&mut self, events: &mut Vec<EngineEvent>) -> Result<(), EngineError> {
        let collected = self.landmarks.len();
        let mut scope: Vec<Item> = self.buffer.iter().copied().collect();
        scope.extend(self.landmarks.iter().copied());
        let before = count_fair_blocks(&scope, &self.constraint, &self.spec)?;
        let result = bfair_reorder(&scope, &self.constraint, &self.spec)?;
        self.record_scope(scope.len(), before, result.fair_block_count);
        events.push(EngineEvent::Reorder(ReorderEvent {
            window_id: self.window_id,
            scope: ReorderScope::WithLandmarks,
            combos: combos_of(&result),
            fair_blocks_before: before,
            fair_blocks_after: result.fair_block_count,
            landmarks_collected: Some(collected as u64),
            landmarks_requested: self.spec.landmark_size as u64,
        }));

        let reordered = result.stream;
        let window_len = self.spec.window_size;
        self.buffer = reordered[..window_len].iter().copied().collect();
        self.rebuild_sketch()?;

        // Re-verdict the paused window, then monitor each slid window.
        // None of these verdicts re-enter routing: the reorder already
        // did its best for exactly these items.
        let verdict = self.monitor()?;
        self.emit_verdict(&verdict, self.paused_arrival_us, events);
        for (offset, &item) in reordered[window_len..].iter().enumerate() {
            self.slide_one(item)?;
            self.items_into_slide += 1;
            if self.items_into_slide == self.spec.slide {
                self.items_into_slide = 0;
                self.window_id += 1;
                let verdict = self.monitor()?;
                self.emit_verdict(&verdict, self.landmark_arrivals[offset], events);
            }
        }
        self.landmarks.clear();
        self.landmark_arrivals.clear();
        self.phase = Phase::Monitoring;
        Ok(())
    }

    fn record_scope(&mut self, scope_len: usize, before: u64, after: u64) {
        self.scope_blocks += (scope_len - self.spec.block_size + 1) as u64;
        self.scope_fair_before += before;
        self.scope_fair_after += after;
    }

    fn metrics_snapshot(&self) -> MetricsEvent {
        let elapsed_us = self.now_us().max(1);
        let mut sorted = self.latencies_us.clone();
        sorted.sort_unstable();
        let percentile = |q: f64| -> u64 {
            if sorted.is_empty() {
                return 0;
            }
            let rank = ((q * sorted.len() as f64).ceil() as usize).clamp(1, sorted.len());
            sorted[rank - 1]
        };
        let pct = |num: u64, den: u64| {
            if den == 0 {
                0.0
            } else {
                100.0 * num as f64 / den as f64
            }
        };
        MetricsEvent {
            windows: self.windows_seen,
            fair_pct: pct(self.windows_fair, self.windows_seen),
            throughput_wps: self.windows_seen as f64 / (elapsed_us as f64 / 1e6),
            p50_us: percentile(0.50),
            p90_us: percentile(0.90),
            fair_block_pct_before: (self.scope_blocks > 0)
                .then(|| pct(self.scope_fair_before, self.scope_blocks)),
            fair_block_pct_after: (self.scope_blocks > 0)
                .then(|| pct(self.scope_fair_after, self.scope_blocks)),
            elapsed_us,
        }
    }
}

fn combos_of(result: &fairstream_core::ReorderResult) -> Vec<Vec<u64>> {
    let mut combos = Vec::new();
    if let Some(c) = &result.primary_combo {
        combos.push(c.counts().to_vec());
    }
    if let Some(c) = &result.secondary_combo {
        combos.push(c.counts().to_vec());
    }
    combos
}
