//! The potential `W`: parsing, exact differentiation, critical points and
//! the standing hypotheses (Morse, confinement proxy, at least two minima).

mod ast;
mod critical;
mod jet;
mod parser;

pub use ast::Expr;
pub use critical::{
    find_critical_points, lex_cmp, validate_hypotheses, NewtonReport, ValidationReport,
};
pub use jet::Jet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum PotentialError {
    #[error("syntax error at byte {position}: {message}")]
    Syntax { position: usize, message: String },
    #[error("unknown identifier '{name}' at byte {position}")]
    UnknownIdentifier { position: usize, name: String },
    #[error("dimension mismatch at byte {position}: {message}")]
    DimensionMismatch { position: usize, message: String },
    #[error("invalid dimension {0}, expected 1 or 2")]
    InvalidDimension(usize),
    #[error("invalid domain: {0}")]
    InvalidDomain(String),
    #[error("point {point:?} outside the domain")]
    OutOfDomain { point: Vec<f64> },
    #[error("non-finite intermediate: {what}")]
    NonFinite { what: String },
    #[error("degenerate Hessian at critical point {location:?}: eigenvalue {eigenvalue:e} below Morse tolerance {tol:e}")]
    MorseViolation {
        location: Vec<f64>,
        eigenvalue: f64,
        tol: f64,
    },
}

/// Axis-aligned box; one `[lower, upper]` pair per axis.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct Domain {
    pub bounds: Vec<[f64; 2]>,
}

impl Domain {
    pub fn new(bounds: Vec<[f64; 2]>) -> Result<Self, PotentialError> {
        if bounds.is_empty() || bounds.len() > 2 {
            return Err(PotentialError::InvalidDomain(format!(
                "{} axes, expected 1 or 2",
                bounds.len()
            )));
        }
        for b in &bounds {
            if !(b[0] < b[1]) || !b[0].is_finite() || !b[1].is_finite() {
                return Err(PotentialError::InvalidDomain(format!(
                    "bad axis bounds [{}, {}]",
                    b[0], b[1]
                )));
            }
        }
        Ok(Domain { bounds })
    }

    pub fn dimension(&self) -> usize {
        self.bounds.len()
    }

    pub fn contains(&self, p: &[f64]) -> bool {
        self.bounds
            .iter()
            .zip(p)
            .all(|(b, &x)| x >= b[0] && x <= b[1])
    }

    pub fn width(&self, axis: usize) -> f64 {
        self.bounds[axis][1] - self.bounds[axis][0]
    }

    pub fn max_width(&self) -> f64 {
        (0..self.dimension())
            .map(|a| self.width(a))
            .fold(0.0, f64::max)
    }
}

/// An evaluable scalar field on the domain, immutable after parse.
#[derive(Clone, Debug)]
pub struct Potential {
    dimension: usize,
    expression: Expr,
    domain: Domain,
    source: String,
}

/// Result of one evaluation: value, gradient and symmetric Hessian,
/// all exact up to rounding.
#[derive(Clone, Copy, Debug)]
pub struct EvalResult {
    pub value: f64,
    pub gradient: [f64; 2],
    pub hessian: [[f64; 2]; 2],
}

impl Potential {
    pub fn parse(
        source_text: &str,
        dimension: usize,
        domain: Domain,
    ) -> Result<Self, PotentialError> {
        if dimension != 1 && dimension != 2 {
            return Err(PotentialError::InvalidDimension(dimension));
        }
        if domain.dimension() != dimension {
            return Err(PotentialError::InvalidDomain(format!(
                "domain has {} axes but dimension is {}",
                domain.dimension(),
                dimension
            )));
        }
        let expression = parser::Parser::parse(source_text, dimension)?;
        Ok(Potential {
            dimension,
            expression,
            domain,
            source: source_text.to_string(),
        })
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn expression(&self) -> &Expr {
        &self.expression
    }

    /// Value, gradient and Hessian at an in-domain point.
    pub fn eval_with_derivatives(&self, point: &[f64]) -> Result<EvalResult, PotentialError> {
        if !self.domain.contains(&point[..self.dimension]) {
            return Err(PotentialError::OutOfDomain {
                point: point[..self.dimension].to_vec(),
            });
        }
        self.eval_unchecked(point)
    }

    /// Same as [`eval_with_derivatives`](Self::eval_with_derivatives) but
    /// without the domain check; used by solvers that briefly step outside.
    pub fn eval_unchecked(&self, point: &[f64]) -> Result<EvalResult, PotentialError> {
        let mut buf = [0.0; 2];
        buf[..self.dimension].copy_from_slice(&point[..self.dimension]);
        let jet = self.expression.eval(&buf)?;
        Ok(EvalResult {
            value: jet.v,
            gradient: jet.g,
            hessian: jet.h,
        })
    }

    /// Value only.
    pub fn value(&self, point: &[f64]) -> Result<f64, PotentialError> {
        Ok(self.eval_unchecked(point)?.value)
    }
}

/// A nondegenerate critical point of `W`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CriticalPoint {
    pub location: Vec<f64>,
    pub value: f64,
    /// Number of negative Hessian eigenvalues (0 = minimum, d = maximum).
    pub index: usize,
    /// Sorted ascending.
    pub hessian_eigenvalues: Vec<f64>,
    pub hessian_det: f64,
    /// Full symmetric Hessian (upper-left `dim x dim` block is meaningful).
    pub hessian: [[f64; 2]; 2],
}

impl CriticalPoint {
    pub fn is_minimum(&self) -> bool {
        self.index == 0
    }

    pub fn is_saddle(&self) -> bool {
        self.index == 1
    }

    /// The negative Hessian eigenvalue of an index-1 point.
    pub fn negative_eigenvalue(&self) -> Option<f64> {
        if self.index == 1 {
            Some(self.hessian_eigenvalues[0])
        } else {
            None
        }
    }
}

/// Eigenvalues of a symmetric matrix of size `dim` (1 or 2), ascending.
pub(crate) fn sym_eigenvalues(h: &[[f64; 2]; 2], dim: usize) -> Vec<f64> {
    if dim == 1 {
        vec![h[0][0]]
    } else {
        let tr = h[0][0] + h[1][1];
        let det = h[0][0] * h[1][1] - h[0][1] * h[1][0];
        let disc = (tr * tr / 4.0 - det).max(0.0).sqrt();
        vec![tr / 2.0 - disc, tr / 2.0 + disc]
    }
}
