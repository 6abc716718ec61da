//! Effect of a single mark insertion on the loop count.
//!
//! Inserting at a regular point either merges two loops (endpoints on
//! different loops), splits one (same loop, and the mark kind matches the
//! orientation relation), or rewires one without changing the count.
//! `predict` reads the change off the edge-time classification; `verify`
//! retraces from scratch and compares. The full retrace is deliberately
//! the oracle here; incremental updates would have to match it.

use crate::error::Result;
use crate::graphs::Graph;
use crate::loopcore::{trace_loops, LoopSet, Mark, MarkConfig, MarkKind};
use crate::observables::{classify, EdgeTimeClass};

/// Predicted loop-count changes for inserting a cross / a bar at one
/// regular point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SurgeryPrediction {
    pub delta_cross: i32,
    pub delta_bar: i32,
}

/// Returns a new configuration with an extra mark at `(e, s)`; the
/// original is unchanged. Fails if `s` collides with an existing mark.
pub fn insert_mark(marks: &MarkConfig, e: usize, s: f64, kind: MarkKind) -> Result<MarkConfig> {
    marks.with_inserted(Mark { edge: e as u32, time: s, kind })
}

/// Maps the classification of `(e, s)` to the loop-count deltas:
/// different loops merge either way; same loop with equal orientation is
/// split by a cross and rewired by a bar; opposite orientation swaps the
/// two roles.
pub fn predict(g: &Graph, loops: &LoopSet, e: usize, s: f64) -> Result<SurgeryPrediction> {
    Ok(match classify(g, loops, e, s)? {
        EdgeTimeClass::DifferentLoops => SurgeryPrediction { delta_cross: -1, delta_bar: -1 },
        EdgeTimeClass::SameLoopSameOrientation => {
            SurgeryPrediction { delta_cross: 1, delta_bar: 0 }
        }
        EdgeTimeClass::SameLoopOppositeOrientation => {
            SurgeryPrediction { delta_cross: 0, delta_bar: 1 }
        }
    })
}

/// Retraces the configuration with a cross and with a bar inserted at
/// `(e, s)` and checks both loop-count changes against `predict`. A
/// `false` return falsifies the tracer or the classifier.
pub fn verify(
    g: &Graph,
    marks: &MarkConfig,
    loops: &LoopSet,
    e: usize,
    s: f64,
) -> Result<bool> {
    let prediction = predict(g, loops, e, s)?;
    let base = loops.lambda() as i32;
    let with_cross = trace_loops(g, &insert_mark(marks, e, s, MarkKind::Cross)?)?;
    let with_bar = trace_loops(g, &insert_mark(marks, e, s, MarkKind::Bar)?)?;
    Ok(with_cross.lambda() as i32 - base == prediction.delta_cross
        && with_bar.lambda() as i32 - base == prediction.delta_bar)
}
