//! Direct grid discretizations of the metastable operators and their
//! small-spectrum computation: the verification side of the pipeline.

pub mod banded;

mod assemble;
mod dump;
mod eigen;

pub use assemble::{build_random_walk_matrix, build_witten_matrix, row_stochastic_matrix};
pub use banded::{smallest_eigenpairs_banded, BandedChol, BandedSym};
pub use dump::dump_matrix;
pub use eigen::{
    count_small_spectrum, default_window_constant, smallest_eigenvalues, SmallSpectrum,
    WindowCount, DENSE_LIMIT,
};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::topology::Grid;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OperatorKind {
    RandomWalk,
    Witten,
}

impl OperatorKind {
    /// Hessian weight realized by the operator in dimension `d`.
    pub fn rho(&self, dim: usize) -> f64 {
        match self {
            OperatorKind::RandomWalk => 1.0 / (2.0 * dim as f64 + 4.0),
            OperatorKind::Witten => 1.0,
        }
    }
}

/// An assembled symmetric operator on a uniform grid.
#[derive(Clone, Debug)]
pub struct DiscreteOperator {
    pub kind: OperatorKind,
    pub h: f64,
    pub delta: f64,
    pub grid: Grid,
    pub rho: f64,
    pub matrix: BandedSym,
    /// Exact null vector (twisted Laplacian) or invariant vector of the
    /// walk (eigenvalue 0 of `P`), unit norm.
    pub kernel: Vec<f64>,
}

#[derive(Debug, Error)]
pub enum OperatorError {
    #[error("ball under-resolved: h/delta = {ratio:.3} < 16; use more nodes")]
    BallUnderResolved { ratio: f64 },
    #[error("h/delta = {ratio:.6} is an integer; the ball edge falls on grid nodes, adjust nodes or h")]
    IntegerBallRadius { ratio: f64 },
    #[error("local oscillation {oscillation:.3} of W per cell exceeds the overflow limit {limit:.3}; refine the grid or increase h")]
    Overflow { oscillation: f64, limit: f64 },
    #[error("unsupported configuration: {0}")]
    Unsupported(String),
    #[error("potential evaluation failed: {0}")]
    Evaluation(String),
    #[error("Cholesky factorization failed at row {row} (pivot {pivot:e})")]
    FactorizationFailed { pivot: f64, row: usize },
    #[error("eigensolver did not converge: residual {residual:e} > tolerance {tol:e}")]
    NonConvergence { residual: f64, tol: f64 },
    #[error("computed eigenvalue {value:e} below the negativity bound {bound:e}")]
    NegativeEigenvalue { value: f64, bound: f64 },
}
