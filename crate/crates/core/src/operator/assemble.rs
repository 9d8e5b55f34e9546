//! Assembly of the discrete operators: the conjugated ball-walk matrix
//! `P = I - G` in 1D and the discrete twisted Laplacian `B' B` in 1D/2D.

use nalgebra::DMatrix;

use crate::potential::Potential;
use crate::topology::Grid;

use super::banded::BandedSym;
use super::{DiscreteOperator, OperatorError, OperatorKind};

/// Largest per-cell exponent allowed before `exp` overflow becomes a risk.
const MAX_CELL_EXPONENT: f64 = 600.0;

fn sample_potential(potential: &Potential, grid: &Grid) -> Result<Vec<f64>, OperatorError> {
    let mut w = Vec::with_capacity(grid.node_count());
    for idx in 0..grid.node_count() {
        let p = grid.coords(idx);
        w.push(
            potential
                .value(&p)
                .map_err(|e| OperatorError::Evaluation(e.to_string()))?,
        );
    }
    Ok(w)
}

/// Conjugated ball-walk operator `P = I - G` on a 1D grid.
///
/// With a per-row local shift `Wloc_i = min W over the ball around i`,
/// the symmetric kernel is `G_ij = delta * r_i * r_j` for `|x_i-x_j| < h`,
/// where `r_i = exp(-(W_i - Wloc_i)/2h) / sqrt(mloc_i)` and
/// `mloc_i = sum over the ball of exp(-(W_k - Wloc_i)/h) * delta`.
/// The global-minimum shift cancels exactly, so no quotient of
/// underflowed sums ever forms. The vector
/// `v_i = exp(-(W_i - Wmin)/2h - (Wloc_i - Wmin)/2h) * sqrt(mloc_i)`
/// satisfies `G v = v` up to rounding.
pub fn build_random_walk_matrix(
    potential: &Potential,
    nodes: usize,
    h: f64,
) -> Result<DiscreteOperator, OperatorError> {
    if potential.dimension() != 1 {
        return Err(OperatorError::Unsupported(
            "ball-walk assembly is implemented in 1D".into(),
        ));
    }
    let grid = Grid::new(potential.domain().clone(), nodes);
    let delta = grid.spacing(0);
    let ratio = h / delta;
    if ratio < 16.0 {
        return Err(OperatorError::BallUnderResolved { ratio });
    }
    if (ratio - ratio.round()).abs() < 1e-9 {
        return Err(OperatorError::IntegerBallRadius { ratio });
    }
    let r = ratio.floor() as usize; // strict |x_i - x_j| < h
    let n = grid.node_count();
    let w = sample_potential(potential, &grid)?;
    let wmin = w.iter().copied().fold(f64::INFINITY, f64::min);

    let mut rvec = vec![0.0; n];
    let mut vvec = vec![0.0; n];
    for i in 0..n {
        let lo = i.saturating_sub(r);
        let hi = (i + r).min(n - 1);
        let wloc = w[lo..=hi].iter().copied().fold(f64::INFINITY, f64::min);
        if (w[i] - wloc) / h > MAX_CELL_EXPONENT {
            return Err(OperatorError::Overflow {
                oscillation: w[i] - wloc,
                limit: MAX_CELL_EXPONENT * h,
            });
        }
        let mloc: f64 = w[lo..=hi]
            .iter()
            .map(|&wk| (-(wk - wloc) / h).exp() * delta)
            .sum();
        rvec[i] = (-(w[i] - wloc) / (2.0 * h)).exp() / mloc.sqrt();
        vvec[i] = (-((w[i] - wmin) + (wloc - wmin)) / (2.0 * h)).exp() * mloc.sqrt();
    }

    let mut matrix = BandedSym::zeros(n, r);
    for i in 0..n {
        for j in i.saturating_sub(r)..=i {
            let g = delta * rvec[i] * rvec[j];
            let p = if i == j { 1.0 - g } else { -g };
            matrix.add(i, j, p);
        }
    }

    let vn = vvec.iter().map(|x| x * x).sum::<f64>().sqrt();
    vvec.iter_mut().for_each(|x| *x /= vn);

    Ok(DiscreteOperator {
        kind: OperatorKind::RandomWalk,
        h,
        delta,
        grid,
        rho: 1.0 / 6.0, // 1/(2d+4) with d = 1
        matrix,
        kernel: vvec,
    })
}

/// The row-stochastic, un-conjugated walk matrix `T` on the same grid;
/// dense, intended for small cross-check instances. Row sums are exactly
/// one because each row is divided by its own sum.
pub fn row_stochastic_matrix(
    potential: &Potential,
    nodes: usize,
    h: f64,
) -> Result<DMatrix<f64>, OperatorError> {
    if potential.dimension() != 1 {
        return Err(OperatorError::Unsupported(
            "ball-walk assembly is implemented in 1D".into(),
        ));
    }
    let grid = Grid::new(potential.domain().clone(), nodes);
    let delta = grid.spacing(0);
    let ratio = h / delta;
    if ratio < 16.0 {
        return Err(OperatorError::BallUnderResolved { ratio });
    }
    if (ratio - ratio.round()).abs() < 1e-9 {
        return Err(OperatorError::IntegerBallRadius { ratio });
    }
    let r = ratio.floor() as usize;
    let n = grid.node_count();
    let w = sample_potential(potential, &grid)?;
    let mut t = DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        let lo = i.saturating_sub(r);
        let hi = (i + r).min(n - 1);
        let wloc = w[lo..=hi].iter().copied().fold(f64::INFINITY, f64::min);
        let weights: Vec<f64> = w[lo..=hi]
            .iter()
            .map(|&wk| (-(wk - wloc) / h).exp() * delta)
            .collect();
        let m: f64 = weights.iter().sum();
        for (off, wt) in weights.iter().enumerate() {
            t[(i, lo + off)] = wt / m;
        }
    }
    Ok(t)
}

/// Discrete twisted Laplacian `sum over axes of B' B`, where per edge
/// `(B u)_e = (h/delta) (exp((W_hi - W_mid)/h) u_hi - exp((W_lo - W_mid)/h) u_lo)`
/// with `W_mid` evaluated at the edge midpoint. `B` annihilates
/// `exp(-(W - Wmin)/h)` by construction, so `0` is an exact eigenvalue.
pub fn build_witten_matrix(
    potential: &Potential,
    nodes: usize,
    h: f64,
) -> Result<DiscreteOperator, OperatorError> {
    let dim = potential.dimension();
    let grid = Grid::new(potential.domain().clone(), nodes);
    let n = grid.node_count();
    let w = sample_potential(potential, &grid)?;
    let wmin = w.iter().copied().fold(f64::INFINITY, f64::min);

    let bw = if dim == 1 { 1 } else { grid.shape[0] };
    let mut matrix = BandedSym::zeros(n, bw);
    let (nx, ny) = (grid.shape[0], grid.shape[1]);

    let mut add_edge = |lo: usize, hi: usize, axis: usize| -> Result<(), OperatorError> {
        let delta = grid.spacing(axis);
        let plo = grid.coords(lo);
        let phi = grid.coords(hi);
        let mid = [(plo[0] + phi[0]) / 2.0, (plo[1] + phi[1]) / 2.0];
        let wmid = potential
            .value(&mid)
            .map_err(|e| OperatorError::Evaluation(e.to_string()))?;
        let elo = (w[lo] - wmid) / h;
        let ehi = (w[hi] - wmid) / h;
        if elo.abs() > MAX_CELL_EXPONENT || ehi.abs() > MAX_CELL_EXPONENT {
            return Err(OperatorError::Overflow {
                oscillation: (w[lo] - wmid).abs().max((w[hi] - wmid).abs()),
                limit: MAX_CELL_EXPONENT * h,
            });
        }
        let s = h / delta;
        let clo = s * elo.exp();
        let chi = s * ehi.exp();
        matrix.add(lo, lo, clo * clo);
        matrix.add(hi, hi, chi * chi);
        matrix.add(hi, lo, -clo * chi);
        Ok(())
    };

    for iy in 0..ny {
        for ix in 0..nx.saturating_sub(1) {
            add_edge(grid.index(ix, iy), grid.index(ix + 1, iy), 0)?;
        }
    }
    if dim == 2 {
        for iy in 0..ny - 1 {
            for ix in 0..nx {
                add_edge(grid.index(ix, iy), grid.index(ix, iy + 1), 1)?;
            }
        }
    }

    let mut kernel: Vec<f64> = w.iter().map(|&wi| (-(wi - wmin) / h).exp()).collect();
    let kn = kernel.iter().map(|x| x * x).sum::<f64>().sqrt();
    kernel.iter_mut().for_each(|x| *x /= kn);

    Ok(DiscreteOperator {
        kind: OperatorKind::Witten,
        h,
        delta: grid.max_spacing(),
        grid,
        rho: 1.0,
        matrix,
        kernel,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potential::Domain;

    fn dw(a: f64) -> Potential {
        Potential::parse(
            &format!("{a}*(x^2-1)^2"),
            1,
            Domain::new(vec![[-2.5, 2.5]]).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn walk_invariant_vector_is_exact() {
        let p = dw(0.1);
        // delta = 5/1024, h/delta = 20.48 (non-integer, >= 16)
        let op = build_random_walk_matrix(&p, 1025, 0.1).unwrap();
        let mut pv = vec![0.0; op.matrix.n];
        op.matrix.matvec(&op.kernel, &mut pv);
        let num = pv.iter().map(|x| x * x).sum::<f64>().sqrt();
        assert!(num <= 1e-13, "|P v| = {num:e}");
    }

    #[test]
    fn walk_matrix_entries_nonnegative_off_identity() {
        let p = dw(0.1);
        let op = build_random_walk_matrix(&p, 513, 0.2).unwrap();
        // G = I - P has entries >= 0
        for i in 0..op.matrix.n {
            for j in i.saturating_sub(op.matrix.bw)..=i {
                let g = if i == j {
                    1.0 - op.matrix.get(i, j)
                } else {
                    -op.matrix.get(i, j)
                };
                assert!(g >= 0.0);
            }
        }
    }

    #[test]
    fn walk_guards() {
        let p = dw(0.1);
        // ball under-resolved
        assert!(matches!(
            build_random_walk_matrix(&p, 65, 0.2),
            Err(OperatorError::BallUnderResolved { .. })
        ));
        // integer h/delta: delta = 5/1000, h = 0.1 -> ratio exactly 20
        assert!(matches!(
            build_random_walk_matrix(&p, 1001, 0.1),
            Err(OperatorError::IntegerBallRadius { .. })
        ));
    }

    #[test]
    fn stochastic_row_sums_are_exactly_one() {
        let p = dw(0.1);
        let t = row_stochastic_matrix(&p, 201, 0.44).unwrap();
        for i in 0..t.nrows() {
            let s: f64 = t.row(i).iter().sum();
            // normalization by the row's own sum: exact up to division
            // rounding, a few ulps at most
            assert!((s - 1.0).abs() <= 4.0 * f64::EPSILON, "row {i}: {s:e}");
        }
    }

    #[test]
    fn witten_kernel_is_exact() {
        let p = dw(0.1);
        let op = build_witten_matrix(&p, 1001, 0.05).unwrap();
        let mut av = vec![0.0; op.matrix.n];
        op.matrix.matvec(&op.kernel, &mut av);
        let num = av.iter().map(|x| x * x).sum::<f64>().sqrt();
        let bound = 1e-13 * op.matrix.norm_estimate();
        assert!(num <= bound, "|A u| = {num:e}, bound {bound:e}");
    }

    #[test]
    fn witten_2d_kernel_and_psd() {
        let p = Potential::parse(
            "(x^2-1)^2 + 2*y^2",
            2,
            Domain::new(vec![[-2.5, 2.5], [-2.0, 2.0]]).unwrap(),
        )
        .unwrap();
        let op = build_witten_matrix(&p, 33, 0.3).unwrap();
        let mut av = vec![0.0; op.matrix.n];
        op.matrix.matvec(&op.kernel, &mut av);
        let num = av.iter().map(|x| x * x).sum::<f64>().sqrt();
        assert!(num <= 1e-13 * op.matrix.norm_estimate());
        // Gram form: dense eigenvalues all >= -1e-12 |A|
        let dense = op.matrix.to_dense();
        let eigs = dense.symmetric_eigen().eigenvalues;
        let norm = op.matrix.norm_estimate();
        for e in eigs.iter() {
            assert!(*e >= -1e-12 * norm);
        }
    }
}
