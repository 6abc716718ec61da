//! Small-set sparsity certification: decide whether every vertex set `S`
//! with `|S| <= eta*n` induces at most `(1+eps)|S|` edges.
//!
//! Exhaustive mode enumerates connected candidate sets only. This is sound
//! because both `e_G(S)` and `|S|` are additive over connected components,
//! so a violating set has a violating component; and an inclusion-minimal
//! violating set has minimum internal degree strictly above `1+eps`
//! (removing a vertex of lower internal degree would leave a smaller
//! violator), hence lives inside the corresponding core of the graph. The
//! search therefore enumerates connected subsets of that core, anchored at
//! their smallest vertex to visit each set exactly once.

use rand::seq::IndexedRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::Graph;

/// How the sparsity condition is checked.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SearchMode {
    /// Complete enumeration; a `holds` verdict is a certificate.
    Exhaustive,
    /// Randomized greedy densification; can only find witnesses.
    Heuristic,
}

/// A violating vertex set, when one was found.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub vertices: Vec<usize>,
    pub induced_edges: usize,
}

/// Outcome of a sparsity check.
///
/// `holds == false` comes with a witness satisfying `|S| <= size_cap` and
/// `e_G(S) > (1+eps)|S|`. `holds == true` is a certificate only in
/// exhaustive mode.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SparsityVerdict {
    pub holds: bool,
    pub witness: Option<Witness>,
    pub mode: SearchMode,
    pub size_cap: usize,
    pub eta: f64,
    pub eps: f64,
}

/// Threshold comparison used everywhere in this module. The 1e-9 slack
/// protects integer thresholds like `(1+1.0)*k` from rounding dust.
fn violates(edges: usize, size: usize, eps: f64) -> bool {
    edges as f64 > (1.0 + eps) * size as f64 + 1e-9
}

/// Smallest integer strictly greater than `1 + eps`, computed on the safe
/// (smaller) side so core stripping never removes a minimal violator.
fn min_internal_degree(eps: f64) -> usize {
    let t = 1.0 + eps;
    if t.fract() == 0.0 {
        t as usize + 1
    } else {
        t.ceil() as usize
    }
}

/// Checks the small-set sparsity condition for sets up to `floor(eta*n)`.
///
/// In exhaustive mode `budget` caps the number of candidate sets visited;
/// exceeding it is an error (there is no "unknown" verdict). In heuristic
/// mode `budget` is split into restarts of `size_cap` growth steps each.
pub fn sparsity_check(
    g: &Graph,
    eta: f64,
    eps: f64,
    mode: SearchMode,
    budget: u64,
) -> Result<SparsityVerdict> {
    if !(eta > 0.0 && eta <= 1.0) {
        return Err(Error::InvalidParameter(format!("eta = {eta} must be in (0, 1]")));
    }
    if !(eps > 0.0) {
        return Err(Error::InvalidParameter(format!("eps = {eps} must be positive")));
    }
    let size_cap = (eta * g.n() as f64).floor() as usize;
    let verdict = |holds, witness| SparsityVerdict { holds, witness, mode, size_cap, eta, eps };
    if size_cap == 0 {
        return Ok(verdict(true, None));
    }
    let mut witness = match mode {
        SearchMode::Exhaustive => exhaustive_search(g, eps, size_cap, budget)?,
        SearchMode::Heuristic => heuristic_search(g, eps, size_cap, budget),
    };
    if let Some(w) = &mut witness {
        w.vertices.sort_unstable();
    }
    if let Some(w) = &witness {
        // Re-validate the witness through the public counting path.
        let e = g.induced_edge_count(&w.vertices)?;
        assert_eq!(e, w.induced_edges, "witness edge count mismatch");
        assert!(w.vertices.len() <= size_cap && violates(e, w.vertices.len(), eps));
    }
    Ok(verdict(witness.is_none(), witness))
}

/// Vertices of the `k`-core: repeatedly strip vertices of degree < k.
fn core_vertices(g: &Graph, k: usize) -> Vec<usize> {
    let n = g.n();
    let mut deg: Vec<usize> = (0..n).map(|v| g.degree(v)).collect();
    let mut alive = vec![true; n];
    let mut queue: Vec<usize> = (0..n).filter(|&v| deg[v] < k).collect();
    while let Some(v) = queue.pop() {
        if !alive[v] {
            continue;
        }
        alive[v] = false;
        for &w in g.neighbors(v) {
            let w = w as usize;
            if alive[w] {
                deg[w] -= 1;
                if deg[w] < k {
                    queue.push(w);
                }
            }
        }
    }
    (0..n).filter(|&v| alive[v]).collect()
}

struct ExhaustiveState<'a> {
    g: &'a Graph,
    eps: f64,
    cap: usize,
    max_core_degree: usize,
    budget: u64,
    visited: u64,
    in_core: Vec<bool>,
    in_set: Vec<bool>,
    seen: Vec<bool>, // in the set, in the extension, or permanently excluded
    set: Vec<usize>,
    edges_in_set: usize,
}

/// Branch pruning from the degree bound: adding the `(j+1)`-th vertex to a
/// `j`-set contributes at most `min(max_degree, j)` edges. Returns whether
/// any admissible extension size could still violate.
fn can_reach_violation(state: &ExhaustiveState, k: usize, e: usize) -> bool {
    let mut best = e;
    for k_next in k + 1..=state.cap {
        best += state.max_core_degree.min(k_next - 1);
        if violates(best, k_next, state.eps) {
            return true;
        }
    }
    false
}

/// Connected-subset enumeration over the core, anchored at the smallest
/// vertex of each set. Returns the first witness found, or `None` after
/// complete enumeration.
fn exhaustive_search(
    g: &Graph,
    eps: f64,
    cap: usize,
    budget: u64,
) -> Result<Option<Witness>> {
    let core = core_vertices(g, min_internal_degree(eps));
    if core.is_empty() {
        return Ok(None);
    }
    let mut in_core = vec![false; g.n()];
    for &v in &core {
        in_core[v] = true;
    }
    let max_core_degree = core
        .iter()
        .map(|&v| g.neighbors(v).iter().filter(|&&w| in_core[w as usize]).count())
        .max()
        .unwrap_or(0);
    let mut state = ExhaustiveState {
        g,
        eps,
        cap,
        max_core_degree,
        budget,
        visited: 0,
        in_core,
        in_set: vec![false; g.n()],
        seen: vec![false; g.n()],
        set: Vec::with_capacity(cap),
        edges_in_set: 0,
    };
    for &anchor in &core {
        state.seen[anchor] = true; // anchors are increasing; smaller ones are excluded
        state.in_set[anchor] = true;
        state.set.push(anchor);
        state.edges_in_set = 0;
        let mut ext: Vec<usize> = state
            .g
            .neighbors(anchor)
            .iter()
            .map(|&w| w as usize)
            .filter(|&w| state.in_core[w] && w > anchor)
            .collect();
        let newly_seen: Vec<usize> = ext.iter().copied().filter(|&w| !state.seen[w]).collect();
        for &w in &newly_seen {
            state.seen[w] = true;
        }
        let found = extend(&mut state, &mut ext)?;
        for &w in &newly_seen {
            state.seen[w] = false;
        }
        state.in_set[anchor] = false;
        state.set.pop();
        if found.is_some() {
            return Ok(found);
        }
    }
    Ok(None)
}

fn extend(state: &mut ExhaustiveState, ext: &mut Vec<usize>) -> Result<Option<Witness>> {
    state.visited += 1;
    if state.visited > state.budget {
        return Err(Error::BudgetExceeded { visited: state.visited, budget: state.budget });
    }
    if violates(state.edges_in_set, state.set.len(), state.eps) {
        return Ok(Some(Witness {
            vertices: state.set.clone(),
            induced_edges: state.edges_in_set,
        }));
    }
    if state.set.len() >= state.cap
        || !can_reach_violation(state, state.set.len(), state.edges_in_set)
    {
        return Ok(None);
    }
    // Each sibling pops a candidate; candidates popped earlier never
    // reappear deeper in this subtree, so every set is visited once.
    while let Some(w) = ext.pop() {
        let added = state
            .g
            .neighbors(w)
            .iter()
            .filter(|&&u| state.in_set[u as usize])
            .count();
        state.in_set[w] = true;
        state.set.push(w);
        state.edges_in_set += added;

        let mut child_ext: Vec<usize> = ext.clone();
        let newly_seen: Vec<usize> = state
            .g
            .neighbors(w)
            .iter()
            .map(|&u| u as usize)
            .filter(|&u| state.in_core[u] && !state.seen[u])
            .collect();
        for &u in &newly_seen {
            state.seen[u] = true;
            child_ext.push(u);
        }
        let found = extend(state, &mut child_ext)?;
        for &u in &newly_seen {
            state.seen[u] = false;
        }
        state.edges_in_set -= added;
        state.set.pop();
        state.in_set[w] = false;
        if found.is_some() {
            return Ok(found);
        }
    }
    Ok(None)
}

const HEURISTIC_SEED: u64 = 0x5eed_c0ff_ee00_0001;

/// Greedy densification from random seed edges: grow a set by repeatedly
/// adding the neighbor with the most edges into the current set, recording
/// the first violating prefix. Deterministic for fixed inputs.
fn heuristic_search(g: &Graph, eps: f64, cap: usize, budget: u64) -> Option<Witness> {
    if g.edge_count() == 0 || cap < 2 {
        return None;
    }
    let restarts = (budget / cap.max(1) as u64).max(1);
    let mut rng = ChaCha12Rng::seed_from_u64(HEURISTIC_SEED);
    let mut best: Option<Witness> = None;
    let mut best_excess = f64::NEG_INFINITY;
    for _ in 0..restarts {
        let &(x, y) = g
            .edges()
            .choose(&mut rng)
            .expect("nonempty edge list");
        let mut in_set = vec![false; g.n()];
        let mut set = vec![x as usize, y as usize];
        in_set[x as usize] = true;
        in_set[y as usize] = true;
        let mut edges = 1usize;
        loop {
            let excess = edges as f64 - (1.0 + eps) * set.len() as f64;
            if violates(edges, set.len(), eps) && excess > best_excess {
                best_excess = excess;
                best = Some(Witness { vertices: set.clone(), induced_edges: edges });
            }
            if set.len() >= cap {
                break;
            }
            // candidate neighbors and their marginal edge counts
            let mut best_gain = 0usize;
            let mut ties: Vec<usize> = Vec::new();
            let mut counted = vec![false; g.n()];
            for &v in &set {
                for &u in g.neighbors(v) {
                    let u = u as usize;
                    if in_set[u] || counted[u] {
                        continue;
                    }
                    counted[u] = true;
                    let gain =
                        g.neighbors(u).iter().filter(|&&z| in_set[z as usize]).count();
                    match gain.cmp(&best_gain) {
                        std::cmp::Ordering::Greater => {
                            best_gain = gain;
                            ties = vec![u];
                        }
                        std::cmp::Ordering::Equal => ties.push(u),
                        std::cmp::Ordering::Less => {}
                    }
                }
            }
            let Some(&u) = ties.choose(&mut rng) else { break };
            in_set[u] = true;
            set.push(u);
            edges += best_gain;
        }
    }
    best.map(|mut w| {
        w.vertices.sort_unstable();
        w
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphs::gen_erdos_renyi;

    const BIG_BUDGET: u64 = 50_000_000;

    #[test]
    fn trees_always_hold() {
        let p8 = Graph::path(8);
        for eps in [0.01, 0.1, 1.0] {
            let v = sparsity_check(&p8, 1.0, eps, SearchMode::Exhaustive, BIG_BUDGET).unwrap();
            assert!(v.holds, "eps={eps}");
            assert_eq!(v.size_cap, 8);
        }
    }

    #[test]
    fn proper_subsets_of_cycle_hold() {
        let c12 = Graph::cycle(12);
        let v = sparsity_check(&c12, 0.9, 0.05, SearchMode::Exhaustive, BIG_BUDGET).unwrap();
        assert!(v.holds);
    }

    #[test]
    fn k4_violates_at_full_scale() {
        let k4 = Graph::complete(4);
        let v = sparsity_check(&k4, 1.0, 0.25, SearchMode::Exhaustive, BIG_BUDGET).unwrap();
        assert!(!v.holds);
        let w = v.witness.unwrap();
        assert_eq!(w.vertices, vec![0, 1, 2, 3]);
        assert_eq!(w.induced_edges, 6); // 6 > 1.25 * 4
    }

    #[test]
    fn budget_exceeded_is_an_error() {
        let g = gen_erdos_renyi(30, 4.0, 9).unwrap();
        let r = sparsity_check(&g, 0.5, 0.2, SearchMode::Exhaustive, 3);
        assert!(matches!(r, Err(Error::BudgetExceeded { .. })));
    }

    #[test]
    fn heuristic_finds_planted_clique() {
        // sparse cycle plus a planted K5 on vertices 0..5
        let mut edges: Vec<(u32, u32)> = (0..30u32).map(|i| (i, (i + 1) % 30)).collect();
        for x in 0..5u32 {
            for y in x + 1..5 {
                if !edges.contains(&(x, y)) {
                    edges.push((x, y));
                }
            }
        }
        let g = Graph::new(30, edges).unwrap();
        let v = sparsity_check(&g, 0.3, 0.5, SearchMode::Heuristic, 2_000).unwrap();
        assert!(!v.holds);
        let w = v.witness.unwrap();
        assert!(w.vertices.len() <= 9);
        assert!(w.induced_edges as f64 > 1.5 * w.vertices.len() as f64);
    }

    #[test]
    fn heuristic_never_certifies_but_reports_clean() {
        let p8 = Graph::path(8);
        let v = sparsity_check(&p8, 1.0, 0.1, SearchMode::Heuristic, 100).unwrap();
        assert!(v.holds);
        assert_eq!(v.mode, SearchMode::Heuristic);
    }

    /// Brute force over all subsets; the oracle for the connected-set
    /// reduction.
    pub(super) fn brute_force_any_violation(g: &Graph, cap: usize, eps: f64) -> Option<Vec<usize>> {
        let n = g.n();
        assert!(n <= 20);
        for mask in 1u32..(1 << n) {
            let size = mask.count_ones() as usize;
            if size > cap {
                continue;
            }
            let set: Vec<usize> = (0..n).filter(|&v| mask & (1 << v) != 0).collect();
            let e = g.induced_edge_count(&set).unwrap();
            if violates(e, size, eps) {
                return Some(set);
            }
        }
        None
    }

    #[test]
    fn connected_enumeration_agrees_with_subset_brute_force() {
        for seed in 0..40u64 {
            let g = gen_erdos_renyi(12, 4.5, seed).unwrap();
            for (eta, eps) in [(1.0, 0.25), (1.0, 1.0), (0.5, 0.5)] {
                let cap = (eta * 12.0_f64).floor() as usize;
                let brute = brute_force_any_violation(&g, cap, eps);
                let v = sparsity_check(&g, eta, eps, SearchMode::Exhaustive, BIG_BUDGET).unwrap();
                assert_eq!(
                    v.holds,
                    brute.is_none(),
                    "seed={seed} eta={eta} eps={eps} brute={brute:?} verdict={v:?}"
                );
            }
        }
    }

    #[test]
    fn induced_edge_count_upper_bounds() {
        for seed in 0..10u64 {
            let g = gen_erdos_renyi(14, 5.0, seed).unwrap();
            let delta = g.max_degree();
            for mask in (0u32..(1 << 14)).step_by(97) {
                let set: Vec<usize> = (0..14).filter(|&v| mask & (1 << v) != 0).collect();
                let e = g.induced_edge_count(&set).unwrap();
                let k = set.len();
                assert!(e <= k * k.saturating_sub(1) / 2);
                assert!(2 * e <= delta * k);
            }
        }
    }
}
