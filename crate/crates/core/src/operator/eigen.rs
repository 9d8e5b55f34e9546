//! Small-spectrum computation and the spectral-window census.

use serde::{Deserialize, Serialize};

use crate::topology::LabeledLandscape;

use super::banded::smallest_eigenpairs_banded;
use super::{DiscreteOperator, OperatorError};

/// Node count below which a full dense eigensolve is used; above it the
/// banded shift-invert iteration takes over.
pub const DENSE_LIMIT: usize = 1200;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SmallSpectrum {
    /// The `k` smallest eigenvalues, ascending.
    pub eigenvalues: Vec<f64>,
    /// `|A v - lambda v| / |A|` per pair.
    pub residuals: Vec<f64>,
    /// 2-norm estimate of the matrix used for the relative bounds.
    pub norm_estimate: f64,
}

/// The `k` smallest eigenvalues of a discrete operator.
pub fn smallest_eigenvalues(
    op: &DiscreteOperator,
    k: usize,
    tol: f64,
) -> Result<SmallSpectrum, OperatorError> {
    assert!(k >= 1 && k <= 12, "k must be in 1..=12");
    let n = op.matrix.n;
    let k = k.min(n);
    let norm = op.matrix.norm_estimate().max(f64::MIN_POSITIVE);

    let (eigenvalues, residuals) = if n <= DENSE_LIMIT {
        let dense = op.matrix.to_dense();
        let eig = dense.clone().symmetric_eigen();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].partial_cmp(&eig.eigenvalues[b]).unwrap());
        let mut vals = Vec::with_capacity(k);
        let mut ress = Vec::with_capacity(k);
        for &i in order.iter().take(k) {
            let lambda = eig.eigenvalues[i];
            let v = eig.eigenvectors.column(i);
            let r = (&dense * v - lambda * v).norm() / norm;
            vals.push(lambda);
            ress.push(r);
        }
        (vals, ress)
    } else {
        let (vals, _, ress) = smallest_eigenpairs_banded(&op.matrix, k, tol)?;
        (vals, ress)
    };

    for &e in &eigenvalues {
        if e < -1e-12 * norm {
            return Err(OperatorError::NegativeEigenvalue {
                value: e,
                bound: -1e-12 * norm,
            });
        }
    }
    Ok(SmallSpectrum {
        eigenvalues,
        residuals,
        norm_estimate: norm,
    })
}

/// Count of eigenvalues inside the window `[0, c h]`; flags the count as
/// ambiguous when the window edge sits within ten solver tolerances of an
/// eigenvalue.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct WindowCount {
    pub count: usize,
    pub ambiguous: bool,
}

pub fn count_small_spectrum(s: &SmallSpectrum, c: f64, h: f64) -> WindowCount {
    let edge = c * h;
    let count = s.eigenvalues.iter().filter(|&&e| e <= edge).count();
    let guard = 10.0
        * s.residuals
            .iter()
            .copied()
            .fold(0.0f64, f64::max)
            .max(f64::EPSILON)
        * s.norm_estimate;
    let ambiguous = s.eigenvalues.iter().any(|&e| (e - edge).abs() <= guard);
    WindowCount { count, ambiguous }
}

/// Default spectral-window constant:
/// `c = 0.1 * rho * min positive Hessian eigenvalue over the minima`.
pub fn default_window_constant(land: &LabeledLandscape, rho: f64) -> f64 {
    let min_pos = (0..land.n0())
        .flat_map(|id| land.minimum_point(id).hessian_eigenvalues.clone())
        .filter(|&e| e > 0.0)
        .fold(f64::INFINITY, f64::min);
    0.1 * rho * min_pos
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::{build_random_walk_matrix, build_witten_matrix};
    use crate::potential::{Domain, Potential};

    fn dw(a: f64) -> Potential {
        Potential::parse(
            &format!("{a}*(x^2-1)^2"),
            1,
            Domain::new(vec![[-2.5, 2.5]]).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn diagonal_matrix_smallest() {
        use crate::operator::banded::BandedSym;
        use crate::operator::{DiscreteOperator, OperatorKind};
        use crate::topology::Grid;
        let mut m = BandedSym::zeros(3, 0);
        for (i, v) in [1.0, 2.0, 3.0].iter().enumerate() {
            m.add(i, i, *v);
        }
        let op = DiscreteOperator {
            kind: OperatorKind::Witten,
            h: 1.0,
            delta: 1.0,
            grid: Grid::new(Domain::new(vec![[0.0, 1.0]]).unwrap(), 3),
            rho: 1.0,
            matrix: m,
            kernel: vec![1.0, 0.0, 0.0],
        };
        let s = smallest_eigenvalues(&op, 2, 1e-10).unwrap();
        assert!((s.eigenvalues[0] - 1.0).abs() < 1e-12);
        assert!((s.eigenvalues[1] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn witten_double_well_gap_structure() {
        let p = dw(0.1);
        let op = build_witten_matrix(&p, 2001, 0.02).unwrap();
        let s = smallest_eigenvalues(&op, 3, 1e-8).unwrap();
        assert!(s.eigenvalues[0].abs() < 1e-10 * s.norm_estimate);
        // lambda2 exponentially small, lambda3 of order h
        assert!(s.eigenvalues[2] / s.eigenvalues[1] >= 1e3);
        assert!(s.eigenvalues[1] < 0.02);
    }

    #[test]
    fn sparse_path_matches_dense_path() {
        let p = dw(0.1);
        // 2001 nodes goes through the banded path; compare against the
        // dense solve of the same matrix
        let op = build_witten_matrix(&p, 2001, 0.05).unwrap();
        let s = smallest_eigenvalues(&op, 4, 1e-8).unwrap();
        let dense = op.matrix.to_dense();
        let mut de: Vec<f64> = dense.symmetric_eigen().eigenvalues.iter().copied().collect();
        de.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for (a, b) in s.eigenvalues.iter().zip(&de) {
            assert!((a - b).abs() <= 1e-8 * s.norm_estimate, "{a:e} vs {b:e}");
        }
    }

    #[test]
    fn window_counts() {
        let p = dw(0.1);
        let h = 0.04;
        // h/delta = 0.04 * 2562 / 5 = 20.496
        let op = build_random_walk_matrix(&p, 2563, h).unwrap();
        let s = smallest_eigenvalues(&op, 4, 1e-8).unwrap();
        // c = 0.1 * rho * min positive Hessian eigenvalue (0.8)
        let c = 0.1 * (1.0 / 6.0) * 0.8;
        let wc = count_small_spectrum(&s, c, h);
        assert_eq!(wc.count, 2);

        // single well: exactly one eigenvalue in the window
        let sw = Potential::parse("x^2", 1, Domain::new(vec![[-2.0, 2.0]]).unwrap()).unwrap();
        let op = build_witten_matrix(&sw, 801, 0.05).unwrap();
        let s = smallest_eigenvalues(&op, 3, 1e-8).unwrap();
        let wc = count_small_spectrum(&s, 0.1 * 2.0, 0.05);
        assert_eq!(wc.count, 1);
    }
}
