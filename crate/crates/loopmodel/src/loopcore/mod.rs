//! Mark configurations on `E x S^1` and exact tracing of the loop
//! decomposition of `G x S^1`.
//!
//! Marks are sampled per edge from a Poisson process with intensity `t`,
//! each mark independently a cross with probability `u` and a bar
//! otherwise. All mark times are kept globally distinct (an almost-sure
//! event in the model, enforced here by resampling), so "regular time" is
//! well defined and every time-circle integral reduces to a finite sum
//! over the intervals between consecutive mark times.

mod io;
mod trace;

pub use io::{read_marks_file, write_marks_file, MarksHeader};
pub use trace::{trace_loops, LoopSet, Strand};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, Poisson};

use crate::error::{Error, Result};
use crate::graphs::Graph;

/// Kind of an edge mark.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MarkKind {
    /// Preserves the vertical direction of the traversing trajectory.
    Cross,
    /// Reverses the vertical direction.
    Bar,
}

/// A single mark: an atom of the marked point process on one edge.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mark {
    pub edge: u32,
    pub time: f64,
    pub kind: MarkKind,
}

/// One regular interval between consecutive global mark times, with its
/// midpoint (a regular time whenever the interval is nonempty).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub start: f64,
    pub len: f64,
    pub mid: f64,
}

/// An immutable mark configuration: per-edge sorted mark sequences plus
/// the global time-sorted index.
///
/// Invariants: every time lies in `[0,1)`; all times are pairwise
/// distinct across the whole configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct MarkConfig {
    edge_count: usize,
    /// All marks, sorted by time.
    marks: Vec<Mark>,
    /// Per edge, indices into `marks`, sorted by time.
    per_edge: Vec<Vec<u32>>,
}

impl MarkConfig {
    pub fn new(edge_count: usize, mut marks: Vec<Mark>) -> Result<Self> {
        for m in &marks {
            if m.edge as usize >= edge_count {
                return Err(Error::EdgeOutOfRange { edge: m.edge as usize, edge_count });
            }
            if !(0.0..1.0).contains(&m.time) {
                return Err(Error::InvalidParameter(format!(
                    "mark time {} outside [0,1)",
                    m.time
                )));
            }
        }
        marks.sort_by(|a, b| a.time.total_cmp(&b.time));
        if let Some(w) = marks.windows(2).find(|w| w[0].time == w[1].time) {
            return Err(Error::DuplicateMarkTime(w[0].time));
        }
        let mut per_edge = vec![Vec::new(); edge_count];
        for (i, m) in marks.iter().enumerate() {
            per_edge[m.edge as usize].push(i as u32);
        }
        Ok(Self { edge_count, marks, per_edge })
    }

    pub fn empty(edge_count: usize) -> Self {
        Self { edge_count, marks: Vec::new(), per_edge: vec![Vec::new(); edge_count] }
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    /// Total number of marks.
    pub fn len(&self) -> usize {
        self.marks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.marks.is_empty()
    }

    /// All marks in global time order.
    pub fn marks(&self) -> &[Mark] {
        &self.marks
    }

    /// Marks on one edge, in time order.
    pub fn marks_on_edge(&self, e: usize) -> impl Iterator<Item = &Mark> + '_ {
        self.per_edge[e].iter().map(move |&i| &self.marks[i as usize])
    }

    /// The sorted global time set `T`.
    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        self.marks.iter().map(|m| m.time)
    }

    /// True when no mark sits at time `s`.
    pub fn is_regular(&self, s: f64) -> bool {
        self.marks
            .binary_search_by(|m| m.time.total_cmp(&s))
            .is_err()
    }

    /// The cyclic intervals between consecutive global mark times. The
    /// empty configuration yields the single interval of length one.
    pub fn intervals(&self) -> Vec<Interval> {
        if self.marks.is_empty() {
            return vec![Interval { start: 0.0, len: 1.0, mid: 0.5 }];
        }
        let k = self.marks.len();
        let mut out = Vec::with_capacity(k);
        for i in 0..k {
            let start = self.marks[i].time;
            let end = if i + 1 < k { self.marks[i + 1].time } else { self.marks[0].time + 1.0 };
            let len = end - start;
            let mid = (start + len / 2.0).fract();
            out.push(Interval { start, len, mid });
        }
        out
    }

    /// A copy with one extra mark; fails if the time collides with an
    /// existing mark.
    pub fn with_inserted(&self, mark: Mark) -> Result<Self> {
        let mut marks = self.marks.clone();
        marks.push(mark);
        Self::new(self.edge_count, marks)
    }

    /// A copy with the mark at global index `idx` removed.
    pub fn with_removed(&self, idx: usize) -> Result<Self> {
        if idx >= self.marks.len() {
            return Err(Error::InvalidParameter(format!("no mark at index {idx}")));
        }
        let mut marks = self.marks.clone();
        marks.remove(idx);
        Self::new(self.edge_count, marks)
    }

    /// A copy with the mark at global index `idx` given a fresh time and
    /// kind (same edge).
    pub fn with_relocated(&self, idx: usize, time: f64, kind: MarkKind) -> Result<Self> {
        if idx >= self.marks.len() {
            return Err(Error::InvalidParameter(format!("no mark at index {idx}")));
        }
        let mut marks = self.marks.clone();
        marks[idx].time = time;
        marks[idx].kind = kind;
        Self::new(self.edge_count, marks)
    }
}

fn validate_t_u(t: f64, u: f64) -> Result<()> {
    if !(t >= 0.0) {
        return Err(Error::InvalidParameter(format!("intensity t = {t} must be >= 0")));
    }
    if !(0.0..=1.0).contains(&u) {
        return Err(Error::InvalidParameter(format!("cross probability u = {u} not in [0,1]")));
    }
    Ok(())
}

/// Draws a configuration from the unweighted mark law: per edge a
/// Poisson(`t`) number of marks, times i.i.d. uniform on `[0,1)`, each
/// mark a cross with probability `u`. Colliding times (possible only
/// through floating point) are resampled until globally distinct.
pub fn sample_marks(g: &Graph, t: f64, u: f64, seed: u64) -> Result<MarkConfig> {
    validate_t_u(t, u)?;
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let marks = draw_marks(g.edge_count(), t, u, &mut rng)?;
    Ok(dedup_times(g.edge_count(), marks, &mut rng))
}

/// Thinning-coupled pair of configurations at intensities `t_hi >= t_lo`:
/// the low-intensity configuration keeps each mark of the high one
/// independently with probability `t_lo / t_hi`. Used for common-random-
/// number finite differences.
pub fn sample_marks_thinned_pair(
    g: &Graph,
    t_hi: f64,
    t_lo: f64,
    u: f64,
    seed: u64,
) -> Result<(MarkConfig, MarkConfig)> {
    validate_t_u(t_hi, u)?;
    if !(0.0..=t_hi).contains(&t_lo) {
        return Err(Error::InvalidParameter(format!(
            "need 0 <= t_lo <= t_hi, got t_lo = {t_lo}, t_hi = {t_hi}"
        )));
    }
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let marks = draw_marks(g.edge_count(), t_hi, u, &mut rng)?;
    let hi = dedup_times(g.edge_count(), marks, &mut rng);
    let keep = if t_hi > 0.0 { t_lo / t_hi } else { 0.0 };
    let lo_marks = hi
        .marks()
        .iter()
        .copied()
        .filter(|_| rng.random::<f64>() < keep)
        .collect();
    let lo = MarkConfig::new(g.edge_count(), lo_marks).expect("subset of distinct times");
    Ok((hi, lo))
}

fn draw_marks(
    edge_count: usize,
    t: f64,
    u: f64,
    rng: &mut ChaCha12Rng,
) -> Result<Vec<Mark>> {
    let mut marks = Vec::new();
    if t == 0.0 {
        return Ok(marks);
    }
    let pois = Poisson::new(t)
        .map_err(|e| Error::InvalidParameter(format!("bad Poisson intensity {t}: {e}")))?;
    for e in 0..edge_count {
        let k = pois.sample(rng) as usize;
        for _ in 0..k {
            let time: f64 = rng.random();
            let kind = if rng.random::<f64>() < u { MarkKind::Cross } else { MarkKind::Bar };
            marks.push(Mark { edge: e as u32, time, kind });
        }
    }
    Ok(marks)
}

/// Resamples the times of any colliding marks until all are distinct.
fn dedup_times(edge_count: usize, mut marks: Vec<Mark>, rng: &mut ChaCha12Rng) -> MarkConfig {
    loop {
        let mut order: Vec<usize> = (0..marks.len()).collect();
        order.sort_by(|&a, &b| marks[a].time.total_cmp(&marks[b].time));
        let dups: Vec<usize> = order
            .windows(2)
            .filter(|w| marks[w[0]].time == marks[w[1]].time)
            .map(|w| w[1])
            .collect();
        if dups.is_empty() {
            return MarkConfig::new(edge_count, marks).expect("validated distinct times");
        }
        for i in dups {
            marks[i].time = rng.random();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn single_edge() -> Graph {
        Graph::new(2, [(0, 1)]).unwrap()
    }

    #[test]
    fn zero_intensity_is_empty() {
        let cfg = sample_marks(&single_edge(), 0.0, 0.5, 3).unwrap();
        assert!(cfg.is_empty());
        assert_eq!(cfg.intervals().len(), 1);
        assert_eq!(cfg.intervals()[0].mid, 0.5);
    }

    #[test]
    fn poisson_mean_mark_count() {
        let g = single_edge();
        let reps = 4000;
        let mut total = 0usize;
        for seed in 0..reps {
            total += sample_marks(&g, 2.0, 0.5, seed).unwrap().len();
        }
        let mean = total as f64 / reps as f64;
        let se = (2.0 / reps as f64).sqrt(); // Var Poisson(2) = 2
        assert!((mean - 2.0).abs() <= 3.0 * se, "mean {mean} (se {se})");
    }

    #[test]
    fn all_cross_at_u_one() {
        let cfg = sample_marks(&single_edge(), 4.0, 1.0, 9).unwrap();
        assert!(cfg.marks().iter().all(|m| m.kind == MarkKind::Cross));
        let cfg = sample_marks(&single_edge(), 4.0, 0.0, 9).unwrap();
        assert!(cfg.marks().iter().all(|m| m.kind == MarkKind::Bar));
    }

    #[test]
    fn sampling_is_deterministic() {
        let g = Graph::cycle(5);
        let a = sample_marks(&g, 1.5, 0.3, 77).unwrap();
        let b = sample_marks(&g, 1.5, 0.3, 77).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn rejects_duplicate_times() {
        let m = |t: f64| Mark { edge: 0, time: t, kind: MarkKind::Bar };
        assert!(matches!(
            MarkConfig::new(1, vec![m(0.25), m(0.25)]),
            Err(Error::DuplicateMarkTime(_))
        ));
    }

    #[test]
    fn intervals_tile_the_circle() {
        let cfg = sample_marks(&Graph::cycle(4), 2.0, 0.5, 5).unwrap();
        let total: f64 = cfg.intervals().iter().map(|iv| iv.len).sum();
        assert!((total - 1.0).abs() < 1e-12);
        for iv in cfg.intervals() {
            assert!(cfg.is_regular(iv.mid));
        }
    }

    #[test]
    fn thinned_pair_is_a_subset() {
        let g = Graph::cycle(6);
        let (hi, lo) = sample_marks_thinned_pair(&g, 1.0, 0.5, 0.5, 11).unwrap();
        assert!(lo.len() <= hi.len());
        for m in lo.marks() {
            assert!(hi.marks().iter().any(|h| h == m));
        }
    }

    #[test]
    fn insert_remove_roundtrip() {
        let cfg = sample_marks(&single_edge(), 2.0, 0.5, 42).unwrap();
        let mark = Mark { edge: 0, time: 0.123456, kind: MarkKind::Cross };
        let bigger = cfg.with_inserted(mark).unwrap();
        assert_eq!(bigger.len(), cfg.len() + 1);
        let idx = bigger.marks().iter().position(|m| m == &mark).unwrap();
        let back = bigger.with_removed(idx).unwrap();
        assert_eq!(back, cfg);
        // sortedness invariant
        assert!(bigger.marks().windows(2).all(|w| w[0].time < w[1].time));
    }
}
