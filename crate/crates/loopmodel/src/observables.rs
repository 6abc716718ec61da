//! Same-loop indicators, insertion volumes, the slice identities, and the
//! macroscopic-loop event.
//!
//! Indicators are piecewise constant between consecutive global mark
//! times, so every time-circle integral is evaluated exactly as a sum of
//! interval lengths with the indicator read at the interval midpoint. At
//! mark times themselves the indicators are 0 by convention; midpoints are
//! always regular, so the convention never surfaces in the sums.

use crate::error::{Error, Result};
use crate::graphs::{Graph, SparsityVerdict};
use crate::loopcore::{LoopSet, MarkConfig};

/// Relation of an edge's endpoints at a regular time.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EdgeTimeClass {
    /// The endpoints lie on distinct loops.
    DifferentLoops,
    /// Same loop, crossed at the same vertical direction.
    SameLoopSameOrientation,
    /// Same loop, opposite vertical directions.
    SameLoopOppositeOrientation,
}

/// The two same-loop insertion volumes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InsertionVolumes {
    pub j_plus: f64,
    pub j_minus: f64,
}

impl InsertionVolumes {
    pub fn total(&self) -> f64 {
        self.j_plus + self.j_minus
    }
}

/// Classifies edge `e` at the regular time `s`.
///
/// Orientation comparison goes through directed-trajectory membership, so
/// "same orientation" means the upward passes of the two endpoints lie on
/// the same directed trajectory; this is invariant under reversing the
/// whole loop.
pub fn classify(g: &Graph, loops: &LoopSet, e: usize, s: f64) -> Result<EdgeTimeClass> {
    let (x, y) = g.endpoints(e)?;
    let (x, y) = (x as usize, y as usize);
    if loops.loop_at(x, s)? != loops.loop_at(y, s)? {
        return Ok(EdgeTimeClass::DifferentLoops);
    }
    let up_x = loops.trajectory_at(x, s, true)?;
    let up_y = loops.trajectory_at(y, s, true)?;
    if up_x == up_y {
        // mutual exclusion: the downward pass of y must then disagree
        debug_assert_ne!(up_x, loops.trajectory_at(y, s, false)?);
        Ok(EdgeTimeClass::SameLoopSameOrientation)
    } else {
        let down_y = loops.trajectory_at(y, s, false)?;
        if up_x != down_y {
            return Err(Error::TracerInvariant(format!(
                "edge {e} at s = {s}: same loop but trajectories unpaired"
            )));
        }
        Ok(EdgeTimeClass::SameLoopOppositeOrientation)
    }
}

/// The insertion volumes: for each edge, the total time its endpoints
/// spend on one loop with equal (`j_plus`) or opposite (`j_minus`)
/// orientation. Exact up to floating point.
pub fn insertion_volumes(
    g: &Graph,
    marks: &MarkConfig,
    loops: &LoopSet,
) -> Result<InsertionVolumes> {
    let mut j_plus = 0.0;
    let mut j_minus = 0.0;
    for iv in marks.intervals() {
        for e in 0..g.edge_count() {
            match classify(g, loops, e, iv.mid)? {
                EdgeTimeClass::SameLoopSameOrientation => j_plus += iv.len,
                EdgeTimeClass::SameLoopOppositeOrientation => j_minus += iv.len,
                EdgeTimeClass::DifferentLoops => {}
            }
        }
    }
    Ok(InsertionVolumes { j_plus, j_minus })
}

/// Checks at one regular time that the same-loop edge count equals the sum
/// of induced edge counts over the slice sets, and that "same loop" splits
/// exactly into the two orientation classes.
pub fn pointwise_slice_check(
    g: &Graph,
    _marks: &MarkConfig,
    loops: &LoopSet,
    s: f64,
) -> Result<bool> {
    let mut same_loop_edges = 0usize;
    for e in 0..g.edge_count() {
        let class = classify(g, loops, e, s)?;
        let (x, y) = g.endpoints(e)?;
        let same = loops.loop_at(x as usize, s)? == loops.loop_at(y as usize, s)?;
        let counted = matches!(
            class,
            EdgeTimeClass::SameLoopSameOrientation | EdgeTimeClass::SameLoopOppositeOrientation
        );
        if same != counted {
            return Ok(false);
        }
        if counted {
            same_loop_edges += 1;
        }
    }
    let mut induced_sum = 0usize;
    for gamma in 0..loops.loop_count() {
        let slice = loops.slice_set(gamma, s)?;
        induced_sum += g.induced_edge_count(&slice)?;
    }
    Ok(same_loop_edges == induced_sum)
}

/// The time integral of the summed induced edge counts of the slice sets.
/// Computed from the unoriented slice partition only, independently of the
/// orientation classification used by [`insertion_volumes`]; the two must
/// agree on every configuration.
pub fn integrated_slice_value(
    g: &Graph,
    marks: &MarkConfig,
    loops: &LoopSet,
) -> Result<f64> {
    let mut total = 0.0;
    for iv in marks.intervals() {
        let vertex_loops = loops.slice_loops(iv.mid)?;
        let mut count = 0usize;
        for e in 0..g.edge_count() {
            let (x, y) = g.endpoints(e)?;
            if vertex_loops[x as usize] == vertex_loops[y as usize] {
                count += 1;
            }
        }
        total += iv.len * count as f64;
    }
    Ok(total)
}

/// Whether some loop's vertex support exceeds `eta * n`, together with the
/// largest support fraction.
pub fn macroscopic_event(loops: &LoopSet, eta: f64) -> Result<(bool, f64)> {
    if !(eta > 0.0 && eta <= 1.0) {
        return Err(Error::InvalidParameter(format!("eta = {eta} must be in (0, 1]")));
    }
    let frac = loops.max_support_fraction();
    Ok((frac > eta, frac))
}

/// On a graph whose sparsity certificate holds at `(eta, eps)`: if no loop
/// support exceeds `eta * n`, the insertion volumes must satisfy
/// `j_plus + j_minus <= (1 + eps) n` (up to 1e-9). Returns the outcome of
/// that check, or `true` vacuously when the macroscopic event occurs.
pub fn slice_bound_check(
    g: &Graph,
    marks: &MarkConfig,
    loops: &LoopSet,
    eta: f64,
    eps: f64,
    sparsity: &SparsityVerdict,
) -> Result<bool> {
    if !sparsity.holds {
        return Err(Error::InvalidParameter(
            "slice bound requires a holding sparsity verdict".into(),
        ));
    }
    let (macroscopic, _) = macroscopic_event(loops, eta)?;
    if macroscopic {
        return Ok(true);
    }
    let volumes = insertion_volumes(g, marks, loops)?;
    Ok(volumes.total() <= (1.0 + eps) * g.n() as f64 + 1e-9)
}

/// The integrand of the drift identity:
/// `(1 + theta u) J+ + (1 + theta (1-u)) J- - |E|`.
pub fn drift_integrand(theta: f64, u: f64, volumes: &InsertionVolumes, edge_count: usize) -> f64 {
    (1.0 + theta * u) * volumes.j_plus + (1.0 + theta * (1.0 - u)) * volumes.j_minus
        - edge_count as f64
}

/// Comparison tolerance for the two integrated-slice computations. Both
/// sides accumulate `edge_count * (marks + 1)` interval terms in
/// different orders, so the admissible gap grows with that product; on
/// desk-scale graphs the bound stays far below any quantity of interest.
pub fn integrated_identity_tolerance(edge_count: usize, marks: usize) -> f64 {
    1e-10 + edge_count as f64 * (marks as f64 + 1.0) * 1e-14
}
