//! Leading-order ingredients: normalization constants, the orthonormal
//! phi-family over each extended class, the interaction matrix N0, and
//! the class matrix M0 = T' N0 T.

use nalgebra::DMatrix;

use crate::potential::CriticalPoint;
use crate::topology::LabeledLandscape;

use super::SpectralError;

/// Which same-value group of minima normalizes the quasimode.
#[derive(Clone, Copy, Debug)]
pub enum NormContext {
    /// The group `H^alpha(m)` inside the class component.
    Class { class_index: usize },
    /// All global minima of `W` (the group of the level-one label).
    Global,
}

fn det_inv_sqrt_sum(land: &LabeledLandscape, ids: &[usize]) -> f64 {
    ids.iter()
        .map(|&id| land.minimum_point(id).hessian_det.powf(-0.5))
        .sum()
}

/// Leading term of the quasimode normalization:
/// `c0 = pi^{-d/4} (sum over the group of det(Hess)^{-1/2})^{-1/2}`.
pub fn normalization_leading(
    land: &LabeledLandscape,
    minimum_id: usize,
    context: NormContext,
) -> Result<f64, SpectralError> {
    let dim = land.minima[minimum_id].location.len();
    let group: Vec<usize> = match context {
        NormContext::Class { class_index } => {
            let class = &land.classes[class_index];
            let ext = class.extended();
            let pos = ext
                .iter()
                .position(|&id| id == minimum_id)
                .ok_or_else(|| SpectralError::Internal("minimum not in class".into()))?;
            class.h_groups[pos].clone()
        }
        NormContext::Global => {
            let w0 = land.global_label().value;
            (0..land.n0())
                .filter(|&id| (land.minima[id].value - w0).abs() <= land.tol_value)
                .collect()
        }
    };
    if group.is_empty() {
        return Err(SpectralError::Internal("empty normalization group".into()));
    }
    let s = det_inv_sqrt_sum(land, &group);
    Ok(std::f64::consts::PI.powf(-(dim as f64) / 4.0) * s.powf(-0.5))
}

/// `tau0 = |negative eigenvalue of 2 rho Hess(s)| = 2 rho |mu_-|`.
pub fn tau0(saddle: &CriticalPoint, rho: f64) -> Result<f64, SpectralError> {
    let mu = saddle.negative_eigenvalue().ok_or(SpectralError::NotASaddle)?;
    Ok(2.0 * rho * mu.abs())
}

/// Orthonormal family over the extended class `U_alpha` (hat last).
#[derive(Clone, Debug)]
pub struct PhiFamily {
    pub class_index: usize,
    /// Minimum ids in extended order: members by increasing `S`, hat last.
    pub order: Vec<usize>,
    /// Column `k` holds the coordinates of `phi_{order[k]}` over `order`.
    pub vectors: DMatrix<f64>,
}

pub fn phi_family(
    land: &LabeledLandscape,
    class_index: usize,
) -> Result<PhiFamily, SpectralError> {
    phi_family_with_mixer(land, class_index, None)
}

/// Same, but with an orthogonal mix applied to the type-II completion
/// vectors; the class spectrum must be invariant under any such mix and
/// tests exercise that.
pub fn phi_family_with_mixer(
    land: &LabeledLandscape,
    class_index: usize,
    mixer: Option<&DMatrix<f64>>,
) -> Result<PhiFamily, SpectralError> {
    let class = &land.classes[class_index];
    let order = class.extended();
    let n = order.len();
    let hat_pos = n - 1;

    // support of phi_hat: the hat plus every type-II member
    let type_ii: Vec<bool> = order
        .iter()
        .enumerate()
        .map(|(pos, &id)| pos == hat_pos || land.minima[id].type_ii)
        .collect();

    let mut vectors = DMatrix::<f64>::zeros(n, n);

    // phi_hat: entries proportional to 1/c0 on the support
    let mut hat = DMatrix::<f64>::zeros(n, 1);
    for pos in 0..n {
        if type_ii[pos] {
            let c0 = normalization_leading(land, order[pos], NormContext::Class { class_index })?;
            hat[(pos, 0)] = 1.0 / c0;
        }
    }
    let norm = hat.norm();
    if norm == 0.0 {
        return Err(SpectralError::Internal("empty phi_hat support".into()));
    }
    hat /= norm;
    vectors.set_column(hat_pos, &hat.column(0));

    // type-I members: exact indicator vectors
    for pos in 0..hat_pos {
        if !type_ii[pos] {
            vectors[(pos, pos)] = 1.0;
        }
    }

    // type-II members: Gram-Schmidt completion of the complement of
    // phi_hat inside the span of the support indicators, in label order
    let mut done: Vec<usize> = vec![hat_pos];
    for pos in 0..hat_pos {
        if !type_ii[pos] {
            continue;
        }
        let mut v = DMatrix::<f64>::zeros(n, 1);
        v[(pos, 0)] = 1.0;
        for &d in &done {
            let col = vectors.column(d);
            let dot = col.dot(&v.column(0));
            for r in 0..n {
                v[(r, 0)] -= dot * col[r];
            }
        }
        let norm = v.norm();
        if norm < 1e-8 {
            return Err(SpectralError::RankDeficient(norm));
        }
        v /= norm;
        vectors.set_column(pos, &v.column(0));
        done.push(pos);
    }

    if let Some(q) = mixer {
        let cols: Vec<usize> = (0..hat_pos).filter(|&p| type_ii[p]).collect();
        let k = cols.len();
        if q.nrows() != k || q.ncols() != k {
            return Err(SpectralError::Internal("mixer size mismatch".into()));
        }
        let dev = (q.transpose() * q - DMatrix::identity(k, k)).norm();
        if dev > 1e-10 {
            return Err(SpectralError::NonOrthogonalMixer(dev));
        }
        let mut block = DMatrix::<f64>::zeros(n, k);
        for (j, &c) in cols.iter().enumerate() {
            block.set_column(j, &vectors.column(c));
        }
        let mixed = &block * q;
        for (j, &c) in cols.iter().enumerate() {
            vectors.set_column(c, &mixed.column(j));
        }
    }

    Ok(PhiFamily {
        class_index,
        order,
        vectors,
    })
}

/// Leading interaction matrix over the extended class:
/// `N0[a,b] = (-1)^{1-delta_ab}/(2 pi) * Ca^{-1/2} Cb^{-1/2} *
///  sum over shared boundary saddles of |det Hess(s)|^{-1/2} tau0(s)`,
/// where `Ca` sums `det(Hess)^{-1/2}` over the same-value group of `a`.
pub fn interaction_matrix(
    land: &LabeledLandscape,
    class_index: usize,
    rho: f64,
) -> Result<DMatrix<f64>, SpectralError> {
    let class = &land.classes[class_index];
    let n = class.extended().len();
    let mut n0 = DMatrix::<f64>::zeros(n, n);
    let cs: Vec<f64> = (0..n)
        .map(|pos| det_inv_sqrt_sum(land, &class.h_groups[pos]))
        .collect();
    for a in 0..n {
        for b in a..n {
            let shared: Vec<usize> = class.j_sets[a]
                .iter()
                .copied()
                .filter(|s| class.j_sets[b].contains(s))
                .collect();
            if shared.is_empty() {
                continue;
            }
            let mut sum = 0.0;
            for si in shared {
                let s = &land.saddles[si].point;
                sum += s.hessian_det.abs().powf(-0.5) * tau0(s, rho)?;
            }
            let sign = if a == b { 1.0 } else { -1.0 };
            let val = sign / (2.0 * std::f64::consts::PI)
                * cs[a].powf(-0.5)
                * cs[b].powf(-0.5)
                * sum;
            n0[(a, b)] = val;
            n0[(b, a)] = val;
        }
    }
    Ok(n0)
}

/// All class-level matrices plus the graded block structure.
#[derive(Clone, Debug)]
pub struct ClassMatrices {
    pub class_index: usize,
    pub phi: PhiFamily,
    pub n0: DMatrix<f64>,
    /// Rows over the extended class (hat last), columns over members.
    pub t: DMatrix<f64>,
    pub m0: DMatrix<f64>,
    /// `(S value, block size)` by increasing `S`; sizes sum to the member
    /// count.
    pub s_blocks: Vec<(f64, usize)>,
}

pub fn assemble_class_matrix(
    land: &LabeledLandscape,
    class_index: usize,
    rho: f64,
    mixer: Option<&DMatrix<f64>>,
) -> Result<ClassMatrices, SpectralError> {
    let class = &land.classes[class_index];
    let phi = phi_family_with_mixer(land, class_index, mixer)?;
    let n0 = interaction_matrix(land, class_index, rho)?;
    let n = phi.order.len();
    let members = class.members.len();

    // T[j][k] = phi_{member k} evaluated at extended position j
    let mut t = DMatrix::<f64>::zeros(n, members);
    for k in 0..members {
        t.set_column(k, &phi.vectors.column(k));
    }
    let m0 = t.transpose() * &n0 * &t;

    // positive definiteness check
    let eig = m0.clone().symmetric_eigen();
    let min_eig = eig.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
    if min_eig <= 0.0 {
        return Err(SpectralError::NotPositiveDefinite(min_eig));
    }

    let mut s_blocks: Vec<(f64, usize)> = Vec::new();
    for &id in &class.members {
        let s = land.minima[id].s_value;
        match s_blocks.last_mut() {
            Some((v, cnt)) if (*v - s).abs() <= land.tol_value => *cnt += 1,
            _ => s_blocks.push((s, 1)),
        }
    }

    Ok(ClassMatrices {
        class_index,
        phi,
        n0,
        t,
        m0,
        s_blocks,
    })
}
