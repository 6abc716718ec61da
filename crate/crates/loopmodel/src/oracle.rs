//! Exact reference computations for small systems.
//!
//! For integer loop weight `theta` the partition function equals the trace
//! of `exp(-t H)` on a product of `theta`-dimensional site spaces, with
//! per-edge operators fixed here as the transposition `T |a,b> = |b,a>`
//! and the cup-cap `<c,d| Q |a,b> = delta_{a,b} delta_{c,d}`, assembled
//! into `H = sum_e (Id - u T_e - (1-u) Q_e)`.
//!
//! The defining self-check is the word-trace bridge: for any word in the
//! `T_e`/`Q_e` operators, the trace equals `theta^lambda` where `lambda`
//! is the traced loop count of the configuration realizing the word at
//! distinct times (crosses for `T`, bars for `Q`). Word traces are
//! computed in exact integer arithmetic, so a convention error would
//! surface as a hard mismatch rather than being renormalized away.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::graphs::Graph;
use crate::loopcore::{trace_loops, Mark, MarkConfig, MarkKind};

/// Default cap on the product-space dimension `theta^n`.
pub const DEFAULT_DIM_CAP: usize = 4096;

/// Closed-form single-edge partition function, valid for all real
/// `theta > 0`:
/// `(th(th-1)/2) e^{-(1+u)t} + (th(th+1)/2 - 1) e^{-(1-u)t} + e^{(1-u)(th-1)t}`.
///
/// Equality with the trace representation at every integer `theta` makes
/// this a polynomial identity in `theta` per mark count, hence valid for
/// all `theta > 0`.
pub fn single_edge_z(theta: f64, t: f64, u: f64) -> f64 {
    let sym = theta * (theta + 1.0) / 2.0 - 1.0;
    let anti = theta * (theta - 1.0) / 2.0;
    anti * (-(1.0 + u) * t).exp() + sym * (-(1.0 - u) * t).exp()
        + ((1.0 - u) * (theta - 1.0) * t).exp()
}

/// Time derivative of `log single_edge_z`.
pub fn single_edge_log_z_deriv(theta: f64, t: f64, u: f64) -> f64 {
    let sym = theta * (theta + 1.0) / 2.0 - 1.0;
    let anti = theta * (theta - 1.0) / 2.0;
    let z = single_edge_z(theta, t, u);
    let dz = -(1.0 + u) * anti * (-(1.0 + u) * t).exp()
        - (1.0 - u) * sym * (-(1.0 - u) * t).exp()
        + (1.0 - u) * (theta - 1.0) * ((1.0 - u) * (theta - 1.0) * t).exp();
    dz / z
}

/// `D_{theta,u}(t)` on the single edge for `theta != 1`:
/// `theta/(theta-1) * d/dt log Z`.
pub fn single_edge_drift(theta: f64, t: f64, u: f64) -> Result<f64> {
    if theta <= 0.0 || theta == 1.0 {
        return Err(Error::InvalidParameter(format!(
            "drift closed form needs theta > 0, theta != 1 (got {theta})"
        )));
    }
    Ok(theta / (theta - 1.0) * single_edge_log_z_deriv(theta, t, u))
}

fn checked_dim(theta: usize, n: usize, cap: usize) -> Result<usize> {
    let mut dim = 1usize;
    for _ in 0..n {
        dim = dim
            .checked_mul(theta)
            .ok_or(Error::DimensionCapExceeded { dim: usize::MAX, cap })?;
        if dim > cap {
            return Err(Error::DimensionCapExceeded { dim, cap });
        }
    }
    Ok(dim)
}

fn validate_theta(theta: usize) -> Result<()> {
    if theta < 2 {
        return Err(Error::InvalidParameter(format!(
            "trace representation needs integer theta >= 2 (got {theta})"
        )));
    }
    Ok(())
}

/// Two-site operator kind in a word.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WordOp {
    /// Transposition `T`: swaps the two site states.
    Transpose,
    /// Cup-cap `Q`: projects onto equal states and resums.
    Cup,
}

/// One letter of a word: an operator acting on sites `x`, `y`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WordLetter {
    pub x: usize,
    pub y: usize,
    pub op: WordOp,
}

/// Dense integer matrix of one two-site operator on the `theta^n` product
/// space. Basis index is little-endian in the site digits.
pub fn op_matrix(theta: usize, n: usize, letter: WordLetter, cap: usize) -> Result<Vec<i64>> {
    validate_theta(theta)?;
    if letter.x >= n || letter.y >= n || letter.x == letter.y {
        return Err(Error::InvalidParameter(format!(
            "operator sites ({}, {}) invalid for {n} sites",
            letter.x, letter.y
        )));
    }
    let dim = checked_dim(theta, n, cap)?;
    let pow_x = theta.pow(letter.x as u32);
    let pow_y = theta.pow(letter.y as u32);
    let digit = |b: usize, pw: usize| (b / pw) % theta;
    let mut m = vec![0i64; dim * dim];
    for b in 0..dim {
        let dx = digit(b, pow_x);
        let dy = digit(b, pow_y);
        match letter.op {
            WordOp::Transpose => {
                let r = b - dx * pow_x - dy * pow_y + dy * pow_x + dx * pow_y;
                m[r * dim + b] = 1;
            }
            WordOp::Cup => {
                if dx == dy {
                    let base = b - dx * pow_x - dx * pow_y;
                    for a in 0..theta {
                        let r = base + a * pow_x + a * pow_y;
                        m[r * dim + b] = 1;
                    }
                }
            }
        }
    }
    Ok(m)
}

/// Exact integer trace of a word of two-site operators, applied in time
/// order (the first letter acts first).
pub fn word_trace(theta: usize, n: usize, word: &[WordLetter], cap: usize) -> Result<i128> {
    validate_theta(theta)?;
    let dim = checked_dim(theta, n, cap)?;
    // accumulate O_k ... O_1
    let mut prod: Vec<i128> = (0..dim * dim)
        .map(|i| i128::from(i % (dim + 1) == 0))
        .collect();
    for letter in word {
        let op = op_matrix(theta, n, *letter, cap)?;
        let mut next = vec![0i128; dim * dim];
        for r in 0..dim {
            for k in 0..dim {
                let o = op[r * dim + k] as i128;
                if o == 0 {
                    continue;
                }
                for c in 0..dim {
                    next[r * dim + c] += o * prod[k * dim + c];
                }
            }
        }
        prod = next;
    }
    Ok((0..dim).map(|i| prod[i * dim + i]).sum())
}

/// Loop count of the configuration realizing a word: letter `i` becomes a
/// mark at time `(i+1)/(k+1)` on the corresponding edge, crosses for
/// transpositions and bars for cups.
pub fn word_loop_count(n: usize, word: &[WordLetter]) -> Result<usize> {
    let mut edges: Vec<(u32, u32)> = word
        .iter()
        .map(|l| (l.x.min(l.y) as u32, l.x.max(l.y) as u32))
        .collect();
    edges.sort_unstable();
    edges.dedup();
    let g = Graph::new(n, edges.iter().copied())?;
    let k = word.len();
    let marks = word
        .iter()
        .enumerate()
        .map(|(i, l)| {
            let key = (l.x.min(l.y) as u32, l.x.max(l.y) as u32);
            let edge = edges.binary_search(&key).expect("edge recorded") as u32;
            Mark {
                edge,
                time: (i + 1) as f64 / (k + 1) as f64,
                kind: match l.op {
                    WordOp::Transpose => MarkKind::Cross,
                    WordOp::Cup => MarkKind::Bar,
                },
            }
        })
        .collect();
    let cfg = MarkConfig::new(edges.len(), marks)?;
    Ok(trace_loops(&g, &cfg)?.lambda())
}

/// Eigenvalues of `H_{G,theta,u}`, reusable across a time grid.
#[derive(Debug, Clone)]
pub struct Spectrum {
    eigenvalues: Vec<f64>,
}

impl Spectrum {
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// `Z(t) = sum_j exp(-t lambda_j)`.
    pub fn z(&self, t: f64) -> f64 {
        self.eigenvalues.iter().map(|&l| (-t * l).exp()).sum()
    }

    /// Second derivative of `log Z` at `t`: the variance of the
    /// eigenvalues under the Gibbs weights, hence nonnegative.
    pub fn log_z_curvature(&self, t: f64) -> f64 {
        let min = self.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
        let weights: Vec<f64> =
            self.eigenvalues.iter().map(|&l| (-t * (l - min)).exp()).collect();
        let z: f64 = weights.iter().sum();
        let mean = self
            .eigenvalues
            .iter()
            .zip(&weights)
            .map(|(&l, &w)| l * w)
            .sum::<f64>()
            / z;
        let second = self
            .eigenvalues
            .iter()
            .zip(&weights)
            .map(|(&l, &w)| l * l * w)
            .sum::<f64>()
            / z;
        second - mean * mean
    }
}

/// Dense `H = sum_e (Id - u T_e - (1-u) Q_e)` for integer `theta`.
pub fn hamiltonian(g: &Graph, theta: usize, u: f64, cap: usize) -> Result<DMatrix<f64>> {
    validate_theta(theta)?;
    if !(0.0..=1.0).contains(&u) {
        return Err(Error::InvalidParameter(format!("u = {u} not in [0,1]")));
    }
    let dim = checked_dim(theta, g.n(), cap)?;
    let mut h = DMatrix::<f64>::zeros(dim, dim);
    for e in 0..g.edge_count() {
        let (x, y) = g.endpoints(e)?;
        let site = |v: u32| v as usize;
        let t_mat =
            op_matrix(theta, g.n(), WordLetter { x: site(x), y: site(y), op: WordOp::Transpose }, cap)?;
        let q_mat =
            op_matrix(theta, g.n(), WordLetter { x: site(x), y: site(y), op: WordOp::Cup }, cap)?;
        for d in 0..dim {
            h[(d, d)] += 1.0;
        }
        for r in 0..dim {
            for c in 0..dim {
                let tv = t_mat[r * dim + c];
                if tv != 0 {
                    h[(r, c)] -= u * tv as f64;
                }
                let qv = q_mat[r * dim + c];
                if qv != 0 {
                    h[(r, c)] -= (1.0 - u) * qv as f64;
                }
            }
        }
    }
    Ok(h)
}

/// Eigendecomposition of `H_{G,theta,u}`.
pub fn spectrum(g: &Graph, theta: usize, u: f64, cap: usize) -> Result<Spectrum> {
    let h = hamiltonian(g, theta, u, cap)?;
    let eig = h.symmetric_eigen();
    Ok(Spectrum { eigenvalues: eig.eigenvalues.iter().copied().collect() })
}

/// `Z_G(theta, t, u)` by dense eigendecomposition.
pub fn exact_z_trace(g: &Graph, theta: usize, t: f64, u: f64, cap: usize) -> Result<f64> {
    Ok(spectrum(g, theta, u, cap)?.z(t))
}

/// Exact `log Z` curvature on a time grid.
pub fn log_z_curvature_grid(
    g: &Graph,
    theta: usize,
    u: f64,
    t_grid: &[f64],
    cap: usize,
) -> Result<Vec<f64>> {
    let sp = spectrum(g, theta, u, cap)?;
    Ok(t_grid.iter().map(|&t| sp.log_z_curvature(t)).collect())
}
