//! Deterministic loop tracing.
//!
//! The vertical line of each vertex is cut at the times of marks on its
//! incident edges into *strands*. A mark at `(e = {x,y}, s)` consumes the
//! four strand endpoints meeting it and connects them pairwise:
//!
//! - a bar joins `(x, below s) <-> (y, below s)` and
//!   `(x, above s) <-> (y, above s)`;
//! - a cross joins `(x, below s) <-> (y, above s)` and
//!   `(x, above s) <-> (y, below s)`.
//!
//! Interleaving these connections with the strands themselves makes every
//! endpoint degree exactly two, so the structure decomposes into cycles:
//! the unoriented loops, computed here as union-find components of
//! strands. Orienting each strand Up or Down and following connections
//! yields the directed trajectories; every unoriented loop must consist of
//! exactly one time-reversal pair of directed trajectories, which the
//! tracer asserts on every call.

use crate::error::{Error, Result};
use crate::graphs::Graph;

use super::{MarkConfig, MarkKind};

/// One strand: a maximal vertical interval at a vertex containing no
/// incident mark time in its interior. A vertex with no incident marks has
/// a single full-circle strand.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Strand {
    pub vertex: u32,
    /// Interval start; equal to `end` for a full-circle strand.
    pub start: f64,
    /// Interval end, cyclically; `start + 1` wraps to `start`.
    pub end: f64,
}

const UP: usize = 0;
const DOWN: usize = 1;

/// The traced loop decomposition of one configuration.
#[derive(Debug, Clone)]
pub struct LoopSet {
    n: usize,
    lambda: usize,
    traj_count: usize,
    /// Sorted global mark times, for regularity checks.
    global_times: Vec<f64>,
    /// Per-vertex sorted incident mark times (empty list = one strand).
    event_times: Vec<Vec<f64>>,
    /// First strand id of each vertex; length `n + 1`.
    strand_offset: Vec<usize>,
    strand_vertex: Vec<u32>,
    /// Strand -> unoriented loop id.
    strand_loop: Vec<u32>,
    /// Directed pass `2*strand + dir` -> directed trajectory id.
    pass_traj: Vec<u32>,
    /// Loop id -> sorted vertex support.
    supports: Vec<Vec<u32>>,
}

struct UnionFind(Vec<u32>);

impl UnionFind {
    fn new(n: usize) -> Self {
        Self((0..n as u32).collect())
    }
    fn find(&mut self, mut x: u32) -> u32 {
        while self.0[x as usize] != x {
            let p = self.0[x as usize];
            self.0[x as usize] = self.0[p as usize];
            x = p;
        }
        x
    }
    fn union(&mut self, a: u32, b: u32) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.0[rb as usize] = ra;
        }
    }
}

/// Traces the loops of `(g, marks)`.
///
/// Pure in its inputs; the error path signals an internal consistency
/// failure (a tracer bug), never an expected condition.
pub fn trace_loops(g: &Graph, marks: &MarkConfig) -> Result<LoopSet> {
    if marks.edge_count() != g.edge_count() {
        return Err(Error::InvalidParameter(format!(
            "configuration built for {} edges, graph has {}",
            marks.edge_count(),
            g.edge_count()
        )));
    }
    let n = g.n();

    // Per-vertex event lists. Iterating marks in global time order keeps
    // each list sorted. For mark i we record its event index at both
    // endpoints.
    let mut event_times: Vec<Vec<f64>> = vec![Vec::new(); n];
    let mut event_marks: Vec<Vec<u32>> = vec![Vec::new(); n];
    let mut mark_event_idx: Vec<(u32, u32)> = Vec::with_capacity(marks.len());
    for (i, m) in marks.marks().iter().enumerate() {
        let (x, y) = g.endpoints(m.edge as usize)?;
        let jx = event_times[x as usize].len() as u32;
        event_times[x as usize].push(m.time);
        event_marks[x as usize].push(i as u32);
        let jy = event_times[y as usize].len() as u32;
        event_times[y as usize].push(m.time);
        event_marks[y as usize].push(i as u32);
        mark_event_idx.push((jx, jy));
    }

    // Strand layout: vertex v owns strands offset[v]..offset[v+1], one per
    // event (or a single full-circle strand). Strand j at v spans
    // [tau_j, tau_{j+1 mod k}).
    let mut strand_offset = Vec::with_capacity(n + 1);
    strand_offset.push(0usize);
    for v in 0..n {
        let k = event_times[v].len().max(1);
        strand_offset.push(strand_offset[v] + k);
    }
    let strand_count = strand_offset[n];
    let mut strand_vertex = vec![0u32; strand_count];
    for v in 0..n {
        strand_vertex[strand_offset[v]..strand_offset[v + 1]].fill(v as u32);
    }

    // strand starting / ending at event j of vertex v
    let starting = |v: usize, j: u32| strand_offset[v] + j as usize;
    let ending = |v: usize, j: u32| {
        let k = event_times[v].len();
        strand_offset[v] + (j as usize + k - 1) % k
    };

    // For each mark: the endpoints' below/above strands, then union the
    // strand pairs the mark connects.
    let mut uf = UnionFind::new(strand_count);
    let mut below_above: Vec<[(u32, u32); 2]> = Vec::with_capacity(marks.len());
    for (i, m) in marks.marks().iter().enumerate() {
        let (x, y) = g.endpoints(m.edge as usize)?;
        let (jx, jy) = mark_event_idx[i];
        let bx = ending(x as usize, jx) as u32;
        let ax = starting(x as usize, jx) as u32;
        let by = ending(y as usize, jy) as u32;
        let ay = starting(y as usize, jy) as u32;
        below_above.push([(bx, ax), (by, ay)]);
        match m.kind {
            MarkKind::Cross => {
                uf.union(bx, ay);
                uf.union(by, ax);
            }
            MarkKind::Bar => {
                uf.union(bx, by);
                uf.union(ax, ay);
            }
        }
    }

    // Dense loop ids in order of first strand occurrence.
    let mut strand_loop = vec![u32::MAX; strand_count];
    let mut root_to_loop: Vec<u32> = vec![u32::MAX; strand_count];
    let mut lambda = 0usize;
    for (s, slot) in strand_loop.iter_mut().enumerate() {
        let r = uf.find(s as u32) as usize;
        if root_to_loop[r] == u32::MAX {
            root_to_loop[r] = lambda as u32;
            lambda += 1;
        }
        *slot = root_to_loop[r];
    }

    // Directed successor permutation over passes (strand, Up/Down).
    let succ = |pass: usize| -> usize {
        let strand = pass / 2;
        let dir = pass % 2;
        let v = strand_vertex[strand] as usize;
        let k = event_times[v].len();
        if k == 0 {
            return pass; // free circle closes on itself
        }
        let j = strand - strand_offset[v];
        // Up exits through the strand's top endpoint (event j+1 cyclic),
        // Down through its bottom endpoint (event j).
        let exit_event = if dir == UP { (j + 1) % k } else { j };
        let mark_id = event_marks[v][exit_event] as usize;
        let m = &marks.marks()[mark_id];
        let (x, _) = g.endpoints(m.edge as usize).expect("validated above");
        let other_side = usize::from(x as usize == v); // 0 = x side, 1 = y side
        let (below_w, above_w) = below_above[mark_id][other_side];
        match (dir, m.kind) {
            (UP, MarkKind::Cross) => 2 * above_w as usize + UP,
            (UP, MarkKind::Bar) => 2 * below_w as usize + DOWN,
            (DOWN, MarkKind::Cross) => 2 * below_w as usize + DOWN,
            (DOWN, MarkKind::Bar) => 2 * above_w as usize + UP,
            _ => unreachable!(),
        }
    };

    // Cycle decomposition of the successor map.
    let pass_count = 2 * strand_count;
    let mut pass_traj = vec![u32::MAX; pass_count];
    let mut traj_count = 0usize;
    for start in 0..pass_count {
        if pass_traj[start] != u32::MAX {
            continue;
        }
        let id = traj_count as u32;
        traj_count += 1;
        let mut p = start;
        loop {
            if pass_traj[p] != u32::MAX {
                return Err(Error::TracerInvariant(format!(
                    "pass {p} reached twice; successor map is not a permutation"
                )));
            }
            pass_traj[p] = id;
            p = succ(p);
            if p == start {
                break;
            }
        }
    }

    let loops = LoopSet {
        n,
        lambda,
        traj_count,
        global_times: marks.times().collect(),
        event_times,
        strand_offset,
        strand_vertex,
        strand_loop,
        pass_traj,
        supports: Vec::new(),
    };
    loops.check_consistency()?;
    Ok(loops.with_supports())
}

impl LoopSet {
    /// Trajectory pairing and component structure checks, run on every
    /// traced configuration.
    #[allow(clippy::needless_range_loop)]
    fn check_consistency(&self) -> Result<()> {
        // Each unoriented loop is one time-reversal pair of directed
        // trajectories. A directed trajectory containing both passes of
        // some strand would be its own reversal; the model's trichotomy
        // has no place for such a loop, so its appearance is reported as
        // a tracer diagnostic rather than classified.
        let strand_count = self.strand_vertex.len();
        for s in 0..strand_count {
            if self.pass_traj[2 * s + UP] == self.pass_traj[2 * s + DOWN] {
                return Err(Error::TracerInvariant(format!(
                    "self-reversal-symmetric trajectory through strand {s}"
                )));
            }
        }
        if self.traj_count != 2 * self.lambda {
            return Err(Error::TracerInvariant(format!(
                "{} directed trajectories for {} loops",
                self.traj_count, self.lambda
            )));
        }
        // Reversal closure and loop membership: within one loop the Up and
        // Down passes of its strands use exactly two trajectory ids, and
        // reversing a pass flips between them.
        let mut loop_traj: Vec<[u32; 2]> = vec![[u32::MAX; 2]; self.lambda];
        for s in 0..strand_count {
            let l = self.strand_loop[s] as usize;
            for dir in [UP, DOWN] {
                let t = self.pass_traj[2 * s + dir];
                let slot = &mut loop_traj[l];
                if slot[0] == u32::MAX {
                    slot[0] = t;
                } else if slot[0] != t && slot[1] == u32::MAX {
                    slot[1] = t;
                } else if slot[0] != t && slot[1] != t {
                    return Err(Error::TracerInvariant(format!(
                        "loop {l} touched by three directed trajectories"
                    )));
                }
            }
        }
        for (l, pair) in loop_traj.iter().enumerate() {
            if pair[1] == u32::MAX {
                return Err(Error::TracerInvariant(format!(
                    "loop {l} has fewer than two directed trajectories"
                )));
            }
        }
        for s in 0..strand_count {
            let l = self.strand_loop[s] as usize;
            let pair = loop_traj[l];
            let up = self.pass_traj[2 * s + UP];
            let down = self.pass_traj[2 * s + DOWN];
            if !(up == pair[0] && down == pair[1] || up == pair[1] && down == pair[0]) {
                return Err(Error::TracerInvariant(format!(
                    "strand {s}: reversal does not swap the loop's trajectory pair"
                )));
            }
        }
        Ok(())
    }

    fn with_supports(mut self) -> Self {
        let mut supports = vec![Vec::new(); self.lambda];
        for (s, &l) in self.strand_loop.iter().enumerate() {
            supports[l as usize].push(self.strand_vertex[s]);
        }
        for sup in &mut supports {
            sup.sort_unstable();
            sup.dedup();
        }
        self.supports = supports;
        self
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// The loop count.
    pub fn lambda(&self) -> usize {
        self.lambda
    }

    /// Number of directed trajectories (always `2 * lambda`).
    pub fn directed_trajectory_count(&self) -> usize {
        self.traj_count
    }

    pub fn loop_count(&self) -> usize {
        self.lambda
    }

    /// Sorted vertex support of loop `gamma`.
    pub fn vertex_support(&self, gamma: usize) -> &[u32] {
        &self.supports[gamma]
    }

    pub fn supports(&self) -> &[Vec<u32>] {
        &self.supports
    }

    /// Largest support size over loops, divided by `n`.
    pub fn max_support_fraction(&self) -> f64 {
        let max = self.supports.iter().map(Vec::len).max().unwrap_or(0);
        max as f64 / self.n as f64
    }

    pub fn is_regular(&self, s: f64) -> bool {
        self.global_times.binary_search_by(|t| t.total_cmp(&s)).is_err()
    }

    fn require_regular(&self, s: f64) -> Result<()> {
        if !(0.0..1.0).contains(&s) {
            return Err(Error::InvalidParameter(format!("time {s} outside [0,1)")));
        }
        if self.is_regular(s) {
            Ok(())
        } else {
            Err(Error::IrregularTime(s))
        }
    }

    /// Strand of vertex `v` whose interval contains the time `s`.
    fn strand_at(&self, v: usize, s: f64) -> usize {
        let times = &self.event_times[v];
        if times.is_empty() {
            return self.strand_offset[v];
        }
        let idx = times.partition_point(|&t| t <= s);
        // before the first event we are on the wrapping strand
        let j = if idx == 0 { times.len() - 1 } else { idx - 1 };
        self.strand_offset[v] + j
    }

    /// Unoriented loop through `(v, s)` at a regular time.
    pub fn loop_at(&self, v: usize, s: f64) -> Result<u32> {
        self.require_regular(s)?;
        Ok(self.strand_loop[self.strand_at(v, s)])
    }

    /// Directed trajectory through `(v, s)` moving up / down.
    pub fn trajectory_at(&self, v: usize, s: f64, upward: bool) -> Result<u32> {
        self.require_regular(s)?;
        let strand = self.strand_at(v, s);
        Ok(self.pass_traj[2 * strand + if upward { UP } else { DOWN }])
    }

    /// The slice of loop `gamma` at height `s`: vertices whose strand at
    /// `s` belongs to `gamma`.
    pub fn slice_set(&self, gamma: usize, s: f64) -> Result<Vec<usize>> {
        self.require_regular(s)?;
        if gamma >= self.lambda {
            return Err(Error::InvalidParameter(format!("no loop {gamma}")));
        }
        Ok((0..self.n)
            .filter(|&v| self.strand_loop[self.strand_at(v, s)] == gamma as u32)
            .collect())
    }

    /// Loop id of every vertex at height `s` (the slice partition).
    pub fn slice_loops(&self, s: f64) -> Result<Vec<u32>> {
        self.require_regular(s)?;
        Ok((0..self.n)
            .map(|v| self.strand_loop[self.strand_at(v, s)])
            .collect())
    }

    /// All strands with their intervals, for tiling checks in tests.
    pub fn strands(&self) -> Vec<Strand> {
        let mut out = Vec::with_capacity(self.strand_vertex.len());
        for v in 0..self.n {
            let times = &self.event_times[v];
            let k = times.len();
            if k == 0 {
                out.push(Strand { vertex: v as u32, start: 0.0, end: 1.0 });
                continue;
            }
            for j in 0..k {
                out.push(Strand {
                    vertex: v as u32,
                    start: times[j],
                    end: times[(j + 1) % k],
                });
            }
        }
        out
    }
}
