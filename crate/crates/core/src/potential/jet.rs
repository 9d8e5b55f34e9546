//! Second-order forward-mode numbers carrying value, gradient and Hessian.
//!
//! Dimension is at most 2, so the derivative payload is stored inline.
//! All chain rules are exact: no truncation error beyond rounding.

/// Value + gradient + symmetric Hessian of a scalar quantity in up to 2 variables.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Jet {
    pub v: f64,
    pub g: [f64; 2],
    /// Symmetric; `h[i][j] == h[j][i]` by construction.
    pub h: [[f64; 2]; 2],
}

impl Jet {
    pub fn constant(v: f64) -> Self {
        Jet { v, g: [0.0; 2], h: [[0.0; 2]; 2] }
    }

    /// Seed for the `axis`-th independent variable.
    pub fn variable(v: f64, axis: usize) -> Self {
        let mut g = [0.0; 2];
        g[axis] = 1.0;
        Jet { v, g, h: [[0.0; 2]; 2] }
    }

    pub fn is_finite(&self) -> bool {
        self.v.is_finite()
            && self.g.iter().all(|x| x.is_finite())
            && self.h.iter().flatten().all(|x| x.is_finite())
    }

    /// Chain rule for a scalar function applied to `self`:
    /// `f(u)` with first and second derivatives evaluated at `self.v`.
    fn chain(self, f: f64, df: f64, ddf: f64) -> Self {
        let mut h = [[0.0; 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                h[i][j] = df * self.h[i][j] + ddf * self.g[i] * self.g[j];
            }
        }
        Jet { v: f, g: [df * self.g[0], df * self.g[1]], h }
    }

    pub fn neg(self) -> Self {
        self.chain(-self.v, -1.0, 0.0)
    }

    pub fn add(self, o: Self) -> Self {
        let mut r = self;
        r.v += o.v;
        for i in 0..2 {
            r.g[i] += o.g[i];
            for j in 0..2 {
                r.h[i][j] += o.h[i][j];
            }
        }
        r
    }

    pub fn sub(self, o: Self) -> Self {
        self.add(o.neg())
    }

    pub fn mul(self, o: Self) -> Self {
        let mut h = [[0.0; 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                h[i][j] = self.h[i][j] * o.v
                    + self.g[i] * o.g[j]
                    + self.g[j] * o.g[i]
                    + self.v * o.h[i][j];
            }
        }
        Jet {
            v: self.v * o.v,
            g: [
                self.g[0] * o.v + self.v * o.g[0],
                self.g[1] * o.v + self.v * o.g[1],
            ],
            h,
        }
    }

    pub fn recip(self) -> Self {
        let iv = 1.0 / self.v;
        self.chain(iv, -iv * iv, 2.0 * iv * iv * iv)
    }

    pub fn div(self, o: Self) -> Self {
        self.mul(o.recip())
    }

    pub fn exp(self) -> Self {
        let e = self.v.exp();
        self.chain(e, e, e)
    }

    pub fn ln(self) -> Self {
        let iv = 1.0 / self.v;
        self.chain(self.v.ln(), iv, -iv * iv)
    }

    pub fn sin(self) -> Self {
        let (s, c) = self.v.sin_cos();
        self.chain(s, c, -s)
    }

    pub fn cos(self) -> Self {
        let (s, c) = self.v.sin_cos();
        self.chain(c, -s, -c)
    }

    pub fn sqrt(self) -> Self {
        let r = self.v.sqrt();
        self.chain(r, 0.5 / r, -0.25 / (r * r * r))
    }

    /// Integer power by the direct monomial chain rule. Handles `v == 0`
    /// without producing NaN for `k >= 2`.
    pub fn powi(self, k: i64) -> Self {
        match k {
            0 => Jet::constant(1.0),
            1 => self,
            _ if k < 0 => self.powi(-k).recip(),
            _ => {
                let kf = k as f64;
                let f = self.v.powi(k as i32);
                let df = kf * self.v.powi(k as i32 - 1);
                let ddf = if k >= 2 {
                    kf * (kf - 1.0) * self.v.powi(k as i32 - 2)
                } else {
                    0.0
                };
                self.chain(f, df, ddf)
            }
        }
    }

    /// General power `self^o` via `exp(o * ln(self))`; requires positive base.
    pub fn pow(self, o: Self) -> Self {
        o.mul(self.ln()).exp()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grad_hess(f: impl Fn(Jet) -> Jet, x: f64) -> (f64, f64, f64) {
        let j = f(Jet::variable(x, 0));
        (j.v, j.g[0], j.h[0][0])
    }

    #[test]
    fn quartic_double_well_derivatives() {
        // W(x) = (x^2 - 1)^2, W'' = 12x^2 - 4
        let w = |x: Jet| x.mul(x).sub(Jet::constant(1.0)).powi(2);
        let (v, g, h) = grad_hess(w, 1.0);
        assert_eq!(v, 0.0);
        assert_eq!(g, 0.0);
        assert_eq!(h, 8.0);
        let (v, g, h) = grad_hess(w, 0.0);
        assert_eq!(v, 1.0);
        assert_eq!(g, 0.0);
        assert_eq!(h, -4.0);
    }

    #[test]
    fn mixed_partials_symmetric() {
        // f(x, y) = x^2 y + sin(x y)
        let f = |x: Jet, y: Jet| x.powi(2).mul(y).add(x.mul(y).sin());
        let j = f(Jet::variable(0.7, 0), Jet::variable(-0.3, 1));
        assert!((j.h[0][1] - j.h[1][0]).abs() < 1e-15);
        // d2/dxdy = 2x + cos(xy) - xy sin(xy)
        let (x, y) = (0.7_f64, -0.3_f64);
        let expect = 2.0 * x + (x * y).cos() - x * y * (x * y).sin();
        assert!((j.h[0][1] - expect).abs() < 1e-14);
    }

    #[test]
    fn transcendental_chain() {
        // f = exp(ln(sqrt(x))) = sqrt(x)
        let f = |x: Jet| x.sqrt().ln().exp();
        let (v, g, h) = grad_hess(f, 4.0);
        assert!((v - 2.0).abs() < 1e-15);
        assert!((g - 0.25).abs() < 1e-15);
        assert!((h + 1.0 / 32.0).abs() < 1e-15);
    }
}
