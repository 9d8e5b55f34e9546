//! Symmetric banded matrix storage (lower band by diagonals), banded
//! Cholesky factorization, and the shift-invert Lanczos eigensolver.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::OperatorError;

/// Symmetric matrix stored by sub-diagonals: `data[d * n + j] = A[j+d, j]`
/// for `0 <= d <= bw`, `j + d < n`.
#[derive(Clone, Debug)]
pub struct BandedSym {
    pub n: usize,
    pub bw: usize,
    data: Vec<f64>,
}

impl BandedSym {
    pub fn zeros(n: usize, bw: usize) -> Self {
        BandedSym {
            n,
            bw,
            data: vec![0.0; (bw + 1) * n],
        }
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (r, c) = if i >= j { (i, j) } else { (j, i) };
        let d = r - c;
        if d > self.bw {
            0.0
        } else {
            self.data[d * self.n + c]
        }
    }

    /// Adds to `A[i, j]` (and by symmetry `A[j, i]`); `|i-j|` must be
    /// within the band.
    #[inline]
    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        let (r, c) = if i >= j { (i, j) } else { (j, i) };
        let d = r - c;
        debug_assert!(d <= self.bw);
        self.data[d * self.n + c] += v;
    }

    pub fn matvec(&self, x: &[f64], y: &mut [f64]) {
        let n = self.n;
        y[..n].fill(0.0);
        for j in 0..n {
            y[j] += self.data[j] * x[j];
        }
        for d in 1..=self.bw {
            let row = &self.data[d * n..d * n + n.saturating_sub(d)];
            for (j, &a) in row.iter().enumerate() {
                y[j + d] += a * x[j];
                y[j] += a * x[j + d];
            }
        }
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.n, self.n, |i, j| self.get(i, j))
    }

    /// Frobenius norm accounting for symmetry.
    pub fn frobenius_norm(&self) -> f64 {
        let n = self.n;
        let mut s = self.data[..n].iter().map(|x| x * x).sum::<f64>();
        for d in 1..=self.bw {
            s += 2.0
                * self.data[d * n..d * n + n.saturating_sub(d)]
                    .iter()
                    .map(|x| x * x)
                    .sum::<f64>();
        }
        s.sqrt()
    }

    /// 2-norm estimate by power iteration with a deterministic start.
    pub fn norm_estimate(&self) -> f64 {
        let n = self.n;
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut x: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let mut y = vec![0.0; n];
        let mut norm = 0.0;
        for _ in 0..30 {
            let xn = x.iter().map(|v| v * v).sum::<f64>().sqrt();
            if xn == 0.0 {
                return 0.0;
            }
            x.iter_mut().for_each(|v| *v /= xn);
            self.matvec(&x, &mut y);
            norm = y.iter().map(|v| v * v).sum::<f64>().sqrt();
            std::mem::swap(&mut x, &mut y);
        }
        norm
    }

    /// Cholesky factorization `A = L L'` with `L` in the same band; fails
    /// if a pivot is not strictly positive.
    pub fn cholesky(&self) -> Result<BandedChol, OperatorError> {
        let n = self.n;
        let bw = self.bw;
        let mut l = self.data.clone();
        for j in 0..n {
            // pivot
            let mut s = l[j];
            let k0 = j.saturating_sub(bw);
            for k in k0..j {
                let v = l[(j - k) * n + k];
                s -= v * v;
            }
            if s <= 0.0 {
                return Err(OperatorError::FactorizationFailed { pivot: s, row: j });
            }
            let pivot = s.sqrt();
            l[j] = pivot;
            // column below the pivot
            let imax = (j + bw).min(n - 1);
            for i in j + 1..=imax {
                let mut s = l[(i - j) * n + j];
                let k0 = i.saturating_sub(bw);
                for k in k0..j {
                    s -= l[(i - k) * n + k] * l[(j - k) * n + k];
                }
                l[(i - j) * n + j] = s / pivot;
            }
        }
        Ok(BandedChol { n, bw, l })
    }
}

/// Lower-triangular banded Cholesky factor.
#[derive(Clone, Debug)]
pub struct BandedChol {
    n: usize,
    bw: usize,
    l: Vec<f64>,
}

impl BandedChol {
    /// Solves `L L' x = b` in place.
    pub fn solve(&self, x: &mut [f64]) {
        let n = self.n;
        let bw = self.bw;
        // forward: L y = b
        for i in 0..n {
            let mut s = x[i];
            let k0 = i.saturating_sub(bw);
            for k in k0..i {
                s -= self.l[(i - k) * n + k] * x[k];
            }
            x[i] = s / self.l[i];
        }
        // backward: L' x = y
        for i in (0..n).rev() {
            let mut s = x[i];
            let kmax = (i + bw).min(n - 1);
            for k in i + 1..=kmax {
                s -= self.l[(k - i) * n + i] * x[k];
            }
            x[i] = s / self.l[i];
        }
    }
}

/// Shift-invert Lanczos with full reorthogonalization: the `k` smallest
/// eigenpairs of a symmetric positive semidefinite banded matrix.
///
/// Returns `(eigenvalues ascending, eigenvectors, residuals)` with
/// residuals measured as `|A v - lambda v| / |A|`.
pub fn smallest_eigenpairs_banded(
    a: &BandedSym,
    k: usize,
    tol: f64,
) -> Result<(Vec<f64>, Vec<Vec<f64>>, Vec<f64>), OperatorError> {
    let n = a.n;
    assert!(k >= 1 && k <= n);
    let norm = a.norm_estimate().max(f64::MIN_POSITIVE);

    // shift slightly to make the exact-kernel matrix invertible
    let mut shift = 1e-12 * norm;
    let chol = loop {
        let mut shifted = a.clone();
        for j in 0..n {
            shifted.add(j, j, shift);
        }
        match shifted.cholesky() {
            Ok(c) => break c,
            Err(_) if shift < norm => shift *= 100.0,
            Err(e) => return Err(e),
        }
    };

    let steps = (3 * k + 40).min(n);
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(steps);
    let mut alphas = Vec::with_capacity(steps);
    let mut betas = Vec::with_capacity(steps);

    let mut v: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let vn = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.iter_mut().for_each(|x| *x /= vn);

    for _ in 0..steps {
        let mut w = v.clone();
        chol.solve(&mut w);
        let alpha: f64 = w.iter().zip(&v).map(|(a, b)| a * b).sum();
        alphas.push(alpha);
        // full reorthogonalization against all previous vectors, twice
        basis.push(v.clone());
        for _ in 0..2 {
            for q in &basis {
                let d: f64 = w.iter().zip(q).map(|(a, b)| a * b).sum();
                w.iter_mut().zip(q).for_each(|(a, b)| *a -= d * b);
            }
        }
        let beta = w.iter().map(|x| x * x).sum::<f64>().sqrt();
        if beta < 1e-300 {
            break;
        }
        betas.push(beta);
        w.iter_mut().for_each(|x| *x /= beta);
        v = w;
    }
    betas.truncate(alphas.len().saturating_sub(1));

    // dense eigensolve of the small tridiagonal Lanczos matrix
    let m = alphas.len();
    let mut t = DMatrix::<f64>::zeros(m, m);
    for i in 0..m {
        t[(i, i)] = alphas[i];
        if i + 1 < m {
            t[(i, i + 1)] = betas[i];
            t[(i + 1, i)] = betas[i];
        }
    }
    let eig = t.symmetric_eigen();
    // largest Ritz values of the inverse = smallest eigenvalues of A
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&x, &y| eig.eigenvalues[y].partial_cmp(&eig.eigenvalues[x]).unwrap());

    let kk = k.min(m);
    let mut pairs: Vec<(f64, Vec<f64>, f64)> = Vec::with_capacity(kk);
    let mut av = vec![0.0; n];
    for &idx in order.iter().take(kk) {
        let y = eig.eigenvectors.column(idx);
        let mut vec = vec![0.0; n];
        for (j, q) in basis.iter().enumerate() {
            let c = y[j];
            vec.iter_mut().zip(q).for_each(|(a, b)| *a += c * b);
        }
        let vn = vec.iter().map(|x| x * x).sum::<f64>().sqrt();
        vec.iter_mut().for_each(|x| *x /= vn);
        a.matvec(&vec, &mut av);
        let lambda: f64 = av.iter().zip(&vec).map(|(a, b)| a * b).sum();
        let res = av
            .iter()
            .zip(&vec)
            .map(|(a, b)| (a - lambda * b) * (a - lambda * b))
            .sum::<f64>()
            .sqrt()
            / norm;
        pairs.push((lambda, vec, res));
    }
    pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());

    let worst = pairs.iter().map(|p| p.2).fold(0.0f64, f64::max);
    if worst > tol {
        return Err(OperatorError::NonConvergence {
            residual: worst,
            tol,
        });
    }
    let mut vals = Vec::with_capacity(kk);
    let mut vecs = Vec::with_capacity(kk);
    let mut ress = Vec::with_capacity(kk);
    for (l, v, r) in pairs {
        vals.push(l);
        vecs.push(v);
        ress.push(r);
    }
    Ok((vals, vecs, ress))
}
