//! The three random graph ensembles: sparse Erdős–Rényi, the half-edge
//! pairing (configuration) model, and random regular graphs obtained by
//! conditioning the pairing model on simplicity.
//!
//! Generators are pure functions of `(parameters, seed)`: the same inputs
//! reproduce the same graph.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

use crate::error::{Error, Result};
use crate::seeds::derive_seed;

use super::{Graph, Multigraph};

/// Samples `G(n, lambda/n)`: each of the `C(n,2)` pairs is present
/// independently with probability `lambda/n`.
///
/// Uses geometric skipping over the lexicographic pair sequence, so the
/// expected work is `O(|E|)` rather than `O(n^2)`.
pub fn gen_erdos_renyi(n: usize, lambda: f64, seed: u64) -> Result<Graph> {
    if n == 0 {
        return Err(Error::InvalidParameter("n must be positive".into()));
    }
    if !(lambda >= 0.0) {
        return Err(Error::InvalidParameter(format!("lambda = {lambda} must be >= 0")));
    }
    let p = lambda / n as f64;
    if p > 1.0 {
        return Err(Error::InvalidParameter(format!(
            "edge probability lambda/n = {p} exceeds 1"
        )));
    }
    let total = n * (n - 1) / 2;
    let mut edges = Vec::new();
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    if p >= 1.0 {
        return Ok(Graph::complete(n));
    }
    if p > 0.0 {
        let log_q = (1.0 - p).ln();
        // Skip lengths are geometric: the next present pair after index i is
        // i + 1 + floor(log(U) / log(1-p)).
        let mut idx: i64 = -1;
        loop {
            let u: f64 = rng.random();
            let skip = (u.ln() / log_q).floor() as i64;
            idx += 1 + skip.max(0);
            if idx as usize >= total {
                break;
            }
            edges.push(pair_from_index(n, idx as usize));
        }
    }
    Graph::new(n, edges)
}

/// Maps a lexicographic pair index to the pair `(x, y)`, `x < y`.
/// Index 0 is `(0,1)`, then `(0,2)`, ..., `(0,n-1)`, `(1,2)`, ...
fn pair_from_index(n: usize, idx: usize) -> (u32, u32) {
    // offset(x) = number of pairs with first coordinate < x
    let offset = |x: usize| x * (n - 1) - x * (x.saturating_sub(1)) / 2;
    let mut lo = 0usize;
    let mut hi = n - 1;
    while lo < hi {
        let mid = (lo + hi).div_ceil(2);
        if offset(mid) <= idx {
            lo = mid;
        } else {
            hi = mid - 1;
        }
    }
    let x = lo;
    let y = x + 1 + (idx - offset(x));
    (x as u32, y as u32)
}

/// Uniform random pairing of half-edges for the given degree sequence.
/// The result is a multigraph whose degree sequence (self-loops counted
/// twice) equals the input.
pub fn gen_configuration_multigraph(degrees: &[usize], seed: u64) -> Result<Multigraph> {
    let sum: usize = degrees.iter().sum();
    if !sum.is_multiple_of(2) {
        return Err(Error::OddDegreeSum { sum });
    }
    let mut half_edges: Vec<u32> = Vec::with_capacity(sum);
    for (v, &d) in degrees.iter().enumerate() {
        half_edges.extend(std::iter::repeat_n(v as u32, d));
    }
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    // A uniform shuffle paired off consecutively is a uniform perfect
    // matching of the half-edges.
    half_edges.shuffle(&mut rng);
    let edges = half_edges.chunks_exact(2).map(|c| (c[0], c[1])).collect();
    Multigraph::new(degrees.len(), edges)
}

/// Exact rejection sampling of the configuration model conditioned on
/// simplicity: pairings are redrawn until the first simple one, which then
/// has exactly the conditional law.
///
/// Returns the graph together with the number of pairings drawn.
pub fn condition_simple(
    degrees: &[usize],
    seed: u64,
    max_attempts: usize,
) -> Result<(Graph, usize)> {
    let n = degrees.len();
    if let Some((v, &d)) = degrees.iter().enumerate().find(|&(_, &d)| d >= n.max(1)) {
        return Err(Error::InvalidParameter(format!(
            "degree {d} at vertex {v} admits no simple graph on {n} vertices"
        )));
    }
    for attempt in 0..max_attempts {
        let mg = gen_configuration_multigraph(degrees, derive_seed(seed, attempt as u64))?;
        if mg.is_simple() {
            return Ok((mg.into_simple()?, attempt + 1));
        }
    }
    Err(Error::MaxAttemptsExhausted { attempts: max_attempts })
}

/// Default pairing budget for [`gen_random_regular`]. A pairing is simple
/// with probability about `exp(-(d*d - 1)/4)`, so large `d` needs a bigger
/// budget via [`gen_random_regular_with_attempts`].
pub const REGULAR_MAX_ATTEMPTS: usize = 10_000_000;

/// Random `d`-regular simple graph on `n` vertices via the conditioned
/// pairing model, with the default pairing budget.
///
/// Uniformity: every simple graph with the given degree sequence is
/// realized by the same number of half-edge pairings (`prod_i d_i!`), so
/// conditioning the uniform pairing on simplicity is uniform over simple
/// `d`-regular graphs.
pub fn gen_random_regular(n: usize, d: usize, seed: u64) -> Result<Graph> {
    gen_random_regular_with_attempts(n, d, seed, REGULAR_MAX_ATTEMPTS)
}

/// As [`gen_random_regular`], with an explicit pairing budget.
pub fn gen_random_regular_with_attempts(
    n: usize,
    d: usize,
    seed: u64,
    max_attempts: usize,
) -> Result<Graph> {
    if d < 1 || d >= n {
        return Err(Error::InvalidParameter(format!(
            "need 1 <= d < n (got d = {d}, n = {n})"
        )));
    }
    if !(n * d).is_multiple_of(2) {
        return Err(Error::OddDegreeSum { sum: n * d });
    }
    let (g, _) = condition_simple(&vec![d; n], seed, max_attempts)?;
    Ok(g)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn er_zero_lambda_is_empty() {
        let g = gen_erdos_renyi(10, 0.0, 5).unwrap();
        assert_eq!(g.edge_count(), 0);
    }

    #[test]
    fn er_rejects_probability_above_one() {
        assert!(gen_erdos_renyi(4, 8.0, 0).is_err());
    }

    #[test]
    fn er_deterministic_in_seed() {
        let a = gen_erdos_renyi(50, 3.0, 123).unwrap();
        let b = gen_erdos_renyi(50, 3.0, 123).unwrap();
        let c = gen_erdos_renyi(50, 3.0, 124).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn er_mean_edge_count_matches_binomial() {
        // E|E| = C(n,2) * lambda/n = 2497.5 at n = 1000, lambda = 5.
        let n = 1000;
        let lambda = 5.0;
        let seeds = 200;
        let mut counts = Vec::with_capacity(seeds);
        for s in 0..seeds {
            counts.push(gen_erdos_renyi(n, lambda, s as u64).unwrap().edge_count() as f64);
        }
        let mean: f64 = counts.iter().sum::<f64>() / seeds as f64;
        let expected = (n * (n - 1) / 2) as f64 * lambda / n as f64;
        let var: f64 =
            counts.iter().map(|c| (c - mean).powi(2)).sum::<f64>() / (seeds - 1) as f64;
        let se = (var / seeds as f64).sqrt();
        assert!(
            (mean - expected).abs() <= 3.0 * se,
            "mean {mean} vs expected {expected} (se {se})"
        );
    }

    #[test]
    fn pair_index_roundtrip() {
        let n = 9;
        let mut idx = 0;
        for x in 0..n as u32 {
            for y in x + 1..n as u32 {
                assert_eq!(pair_from_index(n, idx), (x, y));
                idx += 1;
            }
        }
    }

    #[test]
    fn configuration_model_tiny_cases() {
        let m = gen_configuration_multigraph(&[1, 1], 7).unwrap();
        assert_eq!(m.edges(), &[(0, 1)]);
        let m = gen_configuration_multigraph(&[2], 7).unwrap();
        assert_eq!(m.edges(), &[(0, 0)]);
        assert!(gen_configuration_multigraph(&[1, 2], 7).is_err());
    }

    #[test]
    fn configuration_model_preserves_degrees() {
        for seed in 0..20 {
            let m = gen_configuration_multigraph(&[3, 3, 3, 3], seed).unwrap();
            assert_eq!(m.degrees(), vec![3, 3, 3, 3]);
        }
    }

    #[test]
    fn condition_simple_degree_one_pair() {
        let (g, attempts) = condition_simple(&[1, 1], 0, 10).unwrap();
        assert_eq!(g.edges(), &[(0, 1)]);
        assert_eq!(attempts, 1);
    }

    #[test]
    fn condition_simple_regular_invariants() {
        let (g, _) = condition_simple(&[3; 100], 11, 10_000).unwrap();
        assert_eq!(g.n(), 100);
        assert!((0..100).all(|v| g.degree(v) == 3));
    }

    #[test]
    fn random_regular_k4() {
        // K4 is the unique 3-regular simple graph on 4 vertices.
        for seed in 0..5 {
            let g = gen_random_regular(4, 3, seed).unwrap();
            assert_eq!(g.edges(), Graph::complete(4).edges());
        }
    }

    #[test]
    fn random_regular_two_regular_is_disjoint_cycles() {
        let g = gen_random_regular(6, 2, 3).unwrap();
        assert!((0..6).all(|v| g.degree(v) == 2));
    }

    #[test]
    fn random_regular_odd_nd_rejected() {
        assert!(matches!(
            gen_random_regular(5, 3, 0),
            Err(Error::OddDegreeSum { sum: 15 })
        ));
    }

    /// Exhaustive pairing-enumeration oracle on degrees (2,2,2): of the 15
    /// perfect matchings of the 6 half-edges, exactly 8 give the triangle
    /// (the only simple outcome). `condition_simple` must (a) always return
    /// the triangle and (b) accept a pairing with empirical frequency 8/15.
    #[test]
    fn condition_simple_matches_pairing_enumeration_oracle() {
        let (n_simple, n_total) = enumerate_pairings_222();
        assert_eq!((n_simple, n_total), (8, 15));
        let p_accept = n_simple as f64 / n_total as f64;

        let runs = 4000;
        let mut total_attempts = 0usize;
        for seed in 0..runs {
            let (g, attempts) = condition_simple(&[2, 2, 2], seed as u64, 10_000).unwrap();
            assert_eq!(g.edges(), Graph::cycle(3).edges());
            total_attempts += attempts;
        }
        // attempts are geometric with success probability 8/15
        let rate = runs as f64 / total_attempts as f64;
        let se = (p_accept * (1.0 - p_accept) / total_attempts as f64).sqrt();
        assert!(
            (rate - p_accept).abs() <= 3.0 * se,
            "acceptance rate {rate} vs {p_accept} (se {se})"
        );
    }

    /// Enumerates all perfect matchings of the half-edges for degrees
    /// (2,2,2) and counts the simple ones. Independent of the sampler.
    fn enumerate_pairings_222() -> (usize, usize) {
        let owner = [0u32, 0, 1, 1, 2, 2]; // half-edge -> vertex
        let mut simple = 0;
        let mut total = 0;
        fn rec(
            owner: &[u32; 6],
            used: &mut [bool; 6],
            edges: &mut Vec<(u32, u32)>,
            simple: &mut usize,
            total: &mut usize,
        ) {
            let Some(first) = (0..6).find(|&i| !used[i]) else {
                *total += 1;
                let mut seen = std::collections::HashSet::new();
                if edges.iter().all(|&(x, y)| x != y && seen.insert((x.min(y), x.max(y)))) {
                    *simple += 1;
                }
                return;
            };
            used[first] = true;
            for j in first + 1..6 {
                if used[j] {
                    continue;
                }
                used[j] = true;
                edges.push((owner[first], owner[j]));
                rec(owner, used, edges, simple, total);
                edges.pop();
                used[j] = false;
            }
            used[first] = false;
        }
        rec(&owner, &mut [false; 6], &mut Vec::new(), &mut simple, &mut total);
        (simple, total)
    }
}
