//! Engine events and their JSON-lines wire encoding.

use std::io::Write;

use serde::Serialize;

/// Where a reordering drew its items from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReorderScope {
    /// The current window only.
    InWindow,
    /// The window plus buffered landmark items.
    WithLandmarks,
}

impl ReorderScope {
    fn wire_name(self) -> &'static str {
        match self {
            ReorderScope::InWindow => "in_window",
            ReorderScope::WithLandmarks => "with_landmarks",
        }
    }
}

/// One window's verdict.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerdictEvent {
    pub window_id: u64,
    pub fair: bool,
    pub violation: Option<ViolationEvent>,
    /// Microseconds since engine start when the window's last item arrived.
    pub arrived_us: u64,
    /// Microseconds since engine start when the verdict was produced.
    pub emitted_us: u64,
}

impl VerdictEvent {
    /// Buffering plus processing delay for this verdict.
    pub fn latency_us(&self) -> u64 {
        self.emitted_us.saturating_sub(self.arrived_us)
    }
}

/// First violating (block, value) pair of an unfair window.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ViolationEvent {
    pub block: u64,
    pub value: String,
    pub observed: u64,
    pub lo: u64,
    pub hi: u64,
}

/// A reordering attempt and its effect on the unique-fair-block count
/// within its scope.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReorderEvent {
    pub window_id: u64,
    pub scope: ReorderScope,
    /// Chosen combination(s): primary first, secondary when a two-pattern
    /// or chained stream was built.
    pub combos: Vec<Vec<u64>>,
    pub fair_blocks_before: u64,
    pub fair_blocks_after: u64,
    /// Landmarks actually buffered; differs from the configured size only
    /// when the stream ended mid-collection.
    pub landmarks_collected: Option<u64>,
    /// Landmark budget from the window spec.
    pub landmarks_requested: u64,
}

/// Cumulative counters at a snapshot point.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricsEvent {
    pub windows: u64,
    /// Percentage of windows whose final verdict was fair.
    pub fair_pct: f64,
    pub throughput_wps: f64,
    pub p50_us: u64,
    pub p90_us: u64,
    /// Fair-block percentage across reorder scopes, before and after.
    pub fair_block_pct_before: Option<f64>,
    pub fair_block_pct_after: Option<f64>,
    pub elapsed_us: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum EngineEvent {
    Verdict(VerdictEvent),
    Reorder(ReorderEvent),
    Metrics(MetricsEvent),
}

// Wire shapes. Field names and their order are part of the output format;
// extra internal fields (arrival timestamps, secondary combination,
// fair-block percentages) do not serialize.

#[derive(Serialize)]
struct WireViolation<'a> {
    block: u64,
    value: &'a str,
    observed: u64,
    lo: u64,
    hi: u64,
}

#[derive(Serialize)]
#[serde(tag = "type", rename_all = "lowercase")]
enum Wire<'a> {
    Verdict {
        window_id: u64,
        fair: bool,
        #[serde(skip_serializing_if = "Option::is_none")]
        violation: Option<WireViolation<'a>>,
        latency_us: u64,
    },
    Reorder {
        window_id: u64,
        scope: &'static str,
        combo: &'a [u64],
        fair_blocks_before: u64,
        fair_blocks_after: u64,
        #[serde(skip_serializing_if = "Option::is_none")]
        landmarks: Option<u64>,
    },
    Metrics {
        windows: u64,
        fair_pct: f64,
        throughput_wps: f64,
        p50_us: u64,
        p90_us: u64,
    },
}

/// Renders one event as its single-line JSON wire form.
pub fn event_to_json(event: &EngineEvent) -> String {
    let wire = match event {
        EngineEvent::Verdict(v) => Wire::Verdict {
            window_id: v.window_id,
            fair: v.fair,
            violation: v.violation.as_ref().map(|viol| WireViolation {
                block: viol.block,
                value: &viol.value,
                observed: viol.observed,
                lo: viol.lo,
                hi: viol.hi,
            }),
            latency_us: v.latency_us(),
        },
        EngineEvent::Reorder(r) => Wire::Reorder {
            window_id: r.window_id,
            scope: r.scope.wire_name(),
            combo: r.combos.first().map(|c| c.as_slice()).unwrap_or(&[]),
            fair_blocks_before: r.fair_blocks_before,
            fair_blocks_after: r.fair_blocks_after,
            landmarks: r
                .landmarks_collected
                .filter(|&n| n < r.landmarks_requested),
        },
        EngineEvent::Metrics(m) => Wire::Metrics {
            windows: m.windows,
            fair_pct: m.fair_pct,
            throughput_wps: m.throughput_wps,
            p50_us: m.p50_us,
            p90_us: m.p90_us,
        },
    };
    serde_json::to_string(&wire).expect("event serialization is infallible")
}

/// Writes events as JSON lines.
pub fn write_events<'a, W, I>(sink: &mut W, events: I) -> std::io::Result<()>
where
    W: Write,
    I: IntoIterator<Item = &'a EngineEvent>,
{
    for event in events {
        sink.write_all(event_to_json(event).as_bytes())?;
        sink.write_all(b"\n")?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fair_verdict_wire_shape() {
        let e = EngineEvent::Verdict(VerdictEvent {
            window_id: 1,
            fair: true,
            violation: None,
            arrived_us: 10,
            emitted_us: 17,
        });
        assert_eq!(
            event_to_json(&e),
            r#"{"type":"verdict","window_id":1,"fair":true,"latency_us":7}"#
        );
    }

    #[test]
    fn unfair_verdict_includes_the_violation() {
        let e = EngineEvent::Verdict(VerdictEvent {
            window_id: 1,
            fair: false,
            violation: Some(ViolationEvent {
                block: 3,
                value: "C".into(),
                observed: 1,
                lo: 2,
                hi: 3,
            }),
            arrived_us: 0,
            emitted_us: 0,
        });
        assert_eq!(
            event_to_json(&e),
            r#"{"type":"verdict","window_id":1,"fair":false,"violation":{"block":3,"value":"C","observed":1,"lo":2,"hi":3},"latency_us":0}"#
        );
    }

    #[test]
    fn reorder_wire_shape() {
        let e = EngineEvent::Reorder(ReorderEvent {
            window_id: 4,
            scope: ReorderScope::WithLandmarks,
            combos: vec![vec![2, 1, 2], vec![3, 1, 1]],
            fair_blocks_before: 3,
            fair_blocks_after: 13,
            landmarks_collected: Some(5),
            landmarks_requested: 5,
        });
        assert_eq!(
            event_to_json(&e),
            r#"{"type":"reorder","window_id":4,"scope":"with_landmarks","combo":[2,1,2],"fair_blocks_before":3,"fair_blocks_after":13}"#
        );
    }

    #[test]
    fn reorder_with_shortfall_reports_collected_landmarks() {
        let e = EngineEvent::Reorder(ReorderEvent {
            window_id: 4,
            scope: ReorderScope::WithLandmarks,
            combos: vec![vec![1, 1]],
            fair_blocks_before: 0,
            fair_blocks_after: 2,
            landmarks_collected: Some(2),
            landmarks_requested: 5,
        });
        assert!(event_to_json(&e).ends_with(r#","landmarks":2}"#));
    }

    #[test]
    fn metrics_wire_shape() {
        let e = EngineEvent::Metrics(MetricsEvent {
            windows: 1000,
            fair_pct: 87.5,
            throughput_wps: 25000.0,
            p50_us: 11,
            p90_us: 42,
            fair_block_pct_before: None,
            fair_block_pct_after: None,
            elapsed_us: 40000,
        });
        assert_eq!(
            event_to_json(&e),
            r#"{"type":"metrics","windows":1000,"fair_pct":87.5,"throughput_wps":25000.0,"p50_us":11,"p90_us":42}"#
        );
    }

    #[test]
    fn lines_are_single_line_and_parseable() {
        let e = EngineEvent::Verdict(VerdictEvent {
            window_id: 9,
            fair: true,
            violation: None,
            arrived_us: 1,
            emitted_us: 2,
        });
        let mut out = Vec::new();
        write_events(&mut out, [&e]).unwrap();
        let text = String::from_utf8(out).unwrap();
        assert_eq!(text.lines().count(), 1);
        let parsed: serde_json::Value = serde_json::from_str(text.trim()).unwrap();
        assert_eq!(parsed["type"], "verdict");
    }
}
