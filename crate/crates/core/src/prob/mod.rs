//! Finite-alphabet probability objects and exact information measures.
//!
//! Logs are base 2 throughout. `0 log 0` and `0 log(0/0)` are taken as zero
//! by explicit branch. Inputs are validated to a mass tolerance of `1e-12`
//! and never silently renormalized.

mod channel;
pub(crate) mod dense;
mod info;
mod joint;
mod pmf;

pub use channel::{BroadcastChannel, Degradedness};
pub use info::{binary_entropy, entropy, mutual_information, star};
pub use joint::{compose_chain, marginalize, Factor, JointPmf, Var, MAX_CELLS};
pub use pmf::{Alphabet, Kernel, Pmf, MASS_TOL};

pub(crate) use dense::Dense;
pub(crate) use info::entropy_of_masses;
