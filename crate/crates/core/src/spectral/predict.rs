//! Assembly of the predicted exponentially small spectrum across classes.

use serde::{Deserialize, Serialize};

use crate::topology::LabeledLandscape;

use super::leading::assemble_class_matrix;
use super::schur::graded_schur_spectrum;
use super::SpectralError;

/// One barrier level of the predicted spectrum.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SpectralGroup {
    /// Barrier height of the level.
    pub s_hat: f64,
    /// `h * exp(-2 s_hat / h)`.
    pub scale: f64,
    /// Leading-block eigenvalues across classes, ascending.
    pub prefactors: Vec<f64>,
    /// `scale * prefactors`, ascending.
    pub eigenvalues: Vec<f64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PredictedSpectrum {
    pub h: f64,
    pub rho: f64,
    /// Levels by increasing barrier height (decreasing eigenvalue scale).
    pub groups: Vec<SpectralGroup>,
}

impl PredictedSpectrum {
    /// All predicted eigenvalues including the exact zero, ascending.
    pub fn all_eigenvalues(&self) -> Vec<f64> {
        let mut out = vec![0.0];
        for g in &self.groups {
            out.extend(&g.eigenvalues);
        }
        out.sort_by(|a, b| a.partial_cmp(b).unwrap());
        out
    }

    pub fn total_count(&self) -> usize {
        1 + self.groups.iter().map(|g| g.eigenvalues.len()).sum::<usize>()
    }
}

/// Predicted small eigenvalues at semiclassical parameter `h` for an
/// operator with Hessian weight `rho` (1 for the conjugated Laplacian,
/// `1/(2d+4)` for the ball walk).
pub fn predict_spectrum(
    land: &LabeledLandscape,
    rho: f64,
    h: f64,
) -> Result<PredictedSpectrum, SpectralError> {
    if !(h > 0.0) || !(rho > 0.0) {
        return Err(SpectralError::Internal(format!(
            "h and rho must be positive, got h={h}, rho={rho}"
        )));
    }
    // global barrier levels from all labeled minima except the global one
    let mut s_hats: Vec<f64> = Vec::new();
    for m in &land.minima {
        if m.s_value.is_finite() {
            if !s_hats
                .iter()
                .any(|&s| (s - m.s_value).abs() <= land.tol_value)
            {
                s_hats.push(m.s_value);
            }
        }
    }
    s_hats.sort_by(|a, b| a.partial_cmp(b).unwrap());

    let mut prefactors: Vec<Vec<f64>> = vec![Vec::new(); s_hats.len()];
    for ci in 0..land.classes.len() {
        let cm = assemble_class_matrix(land, ci, rho, None)?;
        let blocks: Vec<usize> = cm.s_blocks.iter().map(|&(_, k)| k).collect();
        let spectra = graded_schur_spectrum(&cm.m0, &blocks)?;
        for ((s, _), eigs) in cm.s_blocks.iter().zip(spectra) {
            let gi = s_hats
                .iter()
                .position(|x| (x - s).abs() <= land.tol_value)
                .ok_or_else(|| SpectralError::Internal("class level missing globally".into()))?;
            prefactors[gi].extend(eigs);
        }
    }

    let mut groups = Vec::with_capacity(s_hats.len());
    for (s_hat, mut pf) in s_hats.into_iter().zip(prefactors) {
        pf.sort_by(|a, b| a.partial_cmp(b).unwrap());
        if pf.iter().any(|&x| x < 0.0) {
            return Err(SpectralError::NotPositiveDefinite(pf[0]));
        }
        let scale = h * (-2.0 * s_hat / h).exp();
        let eigenvalues: Vec<f64> = pf.iter().map(|&x| scale * x).collect();
        groups.push(SpectralGroup {
            s_hat,
            scale,
            prefactors: pf,
            eigenvalues,
        });
    }

    let out = PredictedSpectrum { h, rho, groups };
    if out.total_count() != land.n0() {
        return Err(SpectralError::Internal(format!(
            "predicted {} eigenvalues for {} minima",
            out.total_count(),
            land.n0()
        )));
    }
    Ok(out)
}
