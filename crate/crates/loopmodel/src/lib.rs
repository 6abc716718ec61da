//! Random loop model with crosses and bars on finite graphs.
//!
//! A graph `G = (V, E)` is crossed with the unit time circle. Each edge
//! carries a Poisson set of marks, each mark a *cross* (preserves vertical
//! direction) or a *bar* (reverses it). Trajectories moving vertically and
//! jumping at marks close up into loops; the loop count weights the
//! `theta`-tilted measure.
//!
//! The crate provides:
//! - [`graphs`]: simple graphs, the sparse random ensembles, induced edge
//!   counts, and small-set sparsity certificates;
//! - [`loopcore`]: mark configurations and exact loop tracing;
//! - [`observables`]: same-loop indicators, insertion volumes, slice
//!   identities, and the macroscopic-loop event;
//! - [`surgery`]: the split–merge–rewire effect of single-mark insertion;
//! - [`measure`]: Monte Carlo estimators under the unweighted and
//!   `theta`-weighted laws;
//! - [`bounds`]: closed-form constants and lower-bound formulas;
//! - [`oracle`]: exact small-system references (closed forms, trace
//!   representation, log-convexity).

// Negated comparisons like `!(x > 0.0)` are used on purpose in parameter
// validation: they reject NaN, which `x <= 0.0` would let through.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod error;
pub mod graphs;
pub mod loopcore;
pub mod measure;
pub mod observables;
pub mod oracle;
pub mod seeds;
pub mod surgery;

pub use error::{Error, Result};
