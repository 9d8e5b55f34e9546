//! Sublevel-set topology of the potential landscape: filtration of the
//! grid, separating saddles, the adapted labeling of minima, and the
//! equivalence classes that drive the spectral prediction.

mod filtration;
mod floodfill;
mod labeling;
mod union_find;

pub use filtration::{Filtration, Grid, DEFAULT_MAX_NODES};
pub use floodfill::{build_landscape_oracle, flood_components};
pub use labeling::{
    build_landscape, descend_two_sides, separating_saddles, sweep_merge_events, value_scales,
    Class, LabeledLandscape, MergeEvent, MinimumLabel, SeparatingSaddle, TieBreak, TopologyParams,
};
pub use union_find::DisjointSet;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum TopologyError {
    #[error("potential evaluation failed: {0}")]
    Evaluation(String),
    #[error("grid of {nodes} nodes exceeds the cap of {cap}")]
    MemoryBound { nodes: usize, cap: usize },
    #[error("no critical points supplied")]
    NoCriticalPoints,
    #[error("all critical values coincide; landscape has no barriers to resolve")]
    NoDistinctValues,
    #[error("no separating saddles found")]
    NoSeparatingSaddles,
    /// The grid cannot resolve a feature of the landscape; rerun with a
    /// finer topology grid.
    #[error("resolution failure: {0}")]
    Resolution(String),
    /// An internal cross-check failed; indicates a degenerate landscape
    /// or a bug, not a resolution problem.
    #[error("consistency failure: {0}")]
    Consistency(String),
    #[error("labeling bijectivity violated: {0}")]
    Bijectivity(String),
}
