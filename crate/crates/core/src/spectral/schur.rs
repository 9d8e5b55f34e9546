//! Graded Schur recursion: successive elimination of the faster blocks
//! and the spectrum of each leading block.

use nalgebra::DMatrix;

use super::SpectralError;

/// For a symmetric positive definite `m0` partitioned into ordered blocks,
/// returns per block `j` the eigenvalues (ascending) of the leading block
/// of the Schur complement that eliminates blocks `1..j-1`.
pub fn graded_schur_spectrum(
    m0: &DMatrix<f64>,
    blocks: &[usize],
) -> Result<Vec<Vec<f64>>, SpectralError> {
    let n: usize = blocks.iter().sum();
    if n != m0.nrows() || n != m0.ncols() {
        return Err(SpectralError::Internal(format!(
            "block sizes sum to {n} but the matrix is {}x{}",
            m0.nrows(),
            m0.ncols()
        )));
    }
    let mut rest = m0.clone();
    let mut out = Vec::with_capacity(blocks.len());
    for (bi, &k) in blocks.iter().enumerate() {
        let lead = rest.view((0, 0), (k, k)).into_owned();
        let mut eigs: Vec<f64> = lead.clone().symmetric_eigen().eigenvalues.iter().copied().collect();
        eigs.sort_by(|a, b| a.partial_cmp(b).unwrap());
        out.push(eigs);
        if bi + 1 == blocks.len() {
            break;
        }
        let m = rest.nrows() - k;
        let a = lead;
        let b = rest.view((0, k), (k, m)).into_owned();
        let c = rest.view((k, 0), (m, k)).into_owned();
        let d = rest.view((k, k), (m, m)).into_owned();
        let a_inv = a.try_inverse().ok_or(SpectralError::SingularLeadingBlock)?;
        rest = d - c * a_inv * b;
    }
    Ok(out)
}
