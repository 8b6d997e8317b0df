//! Clique-based sub-network scheduling on conflict graphs.
//!
//! Users are grouped into r-cliques of the conflict graph, a subset of those
//! cliques is selected (aggressively or conservatively), and the resulting
//! consolidated graph is multicolored with a one-shot local algorithm.

pub mod cliques;
pub mod error;
pub mod experiment;
pub mod generators;
pub mod graph;
pub mod io;
pub mod metrics;
pub mod rng;
pub mod scheduler;
pub mod selection;

pub use cliques::{CliqueVertex, ConsolidatedGraph};
pub use error::{Error, Result};
pub use generators::{GenSpec, GraphFamily};
pub use graph::{ConflictGraph, Distance, LocalView, UserId};
pub use selection::SelectionResult;

#[cfg(feature = "parallel")]
pub(crate) fn par_map<T: Sync, R: Send>(items: &[T], f: impl Fn(&T) -> R + Sync + Send) -> Vec<R> {
    use rayon::prelude::*;
    items.par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub(crate) fn par_map<T: Sync, R: Send>(items: &[T], f: impl Fn(&T) -> R + Sync + Send) -> Vec<R> {
    items.iter().map(f).collect()
}
