//! Leading-order spectral prediction: interaction matrices over the
//! equivalence classes, the orthonormal phi-family, the graded Schur
//! recursion, and the assembled predicted spectrum.

mod leading;
mod predict;
mod schur;

pub use leading::{
    assemble_class_matrix, interaction_matrix, normalization_leading, phi_family,
    phi_family_with_mixer, tau0, ClassMatrices, NormContext, PhiFamily,
};
pub use predict::{predict_spectrum, PredictedSpectrum, SpectralGroup};
pub use schur::graded_schur_spectrum;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum SpectralError {
    #[error("critical point is not an index-1 saddle")]
    NotASaddle,
    #[error("mixer matrix is not orthogonal (deviation {0:e})")]
    NonOrthogonalMixer(f64),
    #[error("rank deficiency while completing the phi-family (residual {0:e})")]
    RankDeficient(f64),
    #[error("class matrix not positive definite (min eigenvalue {0:e})")]
    NotPositiveDefinite(f64),
    #[error("singular leading block in the Schur recursion")]
    SingularLeadingBlock,
    #[error("internal spectral error: {0}")]
    Internal(String),
}
