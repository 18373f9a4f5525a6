//! # coopcast-core
//!
//! Rate regions of two-receiver discrete memoryless broadcast channels whose
//! receivers can exchange messages over finite-capacity conference links.
//!
//! The crate is `no_std` (with `alloc`) and contains only pure computation:
//!
//! | Module | Contents |
//! |---|---|
//! | [`prob`] | pmfs, kernels, channels, dense joint tensors, entropy and mutual information |
//! | [`optim`] | simplex search used to evaluate suprema over distributions |
//! | [`frontier`] | weighted-sum frontier tracing and upper concave envelopes |
//! | [`degraded`] | capacity region of the physically degraded channel with an Rx1 → Rx2 link |
//! | [`general`] | Marton-type inner bounds with estimate-and-forward conferencing, cut-set outer bound |
//! | [`common`] | common-message rates: single-step and two-step conferences, upper bound |
//! | [`dfsim`] | Monte Carlo simulation of the block-Markov decode-and-forward code |
//!
//! All rates are in bits per channel use. IO, file formats and the command-line
//! front end live in the `coopcast` crate.
#![cfg_attr(not(test), no_std)]
// negated comparisons reject NaN on purpose
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

extern crate alloc;

pub mod common;
pub mod degraded;
pub mod dfsim;
pub mod error;
pub mod frontier;
pub mod general;
pub mod optim;
pub mod prob;

pub use error::{Error, Result};
pub use frontier::{FrontierPoint, RateFrontier, RatePolytope};
pub use optim::{Executor, OptBudget, Sequential};
pub use prob::{
    binary_entropy, compose_chain, entropy, marginalize, mutual_information, star, Alphabet,
    BroadcastChannel, Degradedness, Factor, JointPmf, Kernel, Pmf, Var,
};
