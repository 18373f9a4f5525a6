//! Host side of `coopcast`: channel files, frontier and witness formats,
//! a rayon [`Executor`](coopcast_core::Executor) and the command line.
//!
//! The numerics live in [`coopcast_core`]; everything here is plumbing.
//! Parallelism never changes results since every job draws from its own
//! seeded stream and results are gathered in index order.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod channel_file;
pub mod cli;
pub mod error;
pub mod exec;
pub mod formats;

pub use channel_file::{load_channel, Builtin, ChannelSpecFile, LoadedChannel};
pub use cli::run;
pub use error::{CliError, CliResult};
pub use exec::RayonExecutor;
pub use formats::{audit, read_frontier_csv, write_frontier_csv, AuditReport, WitnessFile};
