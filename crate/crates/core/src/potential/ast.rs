//! Expression tree for potentials over `x` (and `y` in dimension 2).

use super::jet::Jet;
use super::PotentialError;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum UnaryFn {
    Exp,
    Ln,
    Sin,
    Cos,
    Sqrt,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Number(f64),
    Var(usize),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, Box<Expr>),
    Call(UnaryFn, Box<Expr>),
}

impl Expr {
    /// Evaluate with exact first and second derivatives.
    pub fn eval(&self, point: &[f64]) -> Result<Jet, PotentialError> {
        let jet = self.eval_inner(point)?;
        if !jet.is_finite() {
            return Err(PotentialError::NonFinite {
                what: "expression value or derivative".into(),
            });
        }
        Ok(jet)
    }

    fn eval_inner(&self, point: &[f64]) -> Result<Jet, PotentialError> {
        Ok(match self {
            Expr::Number(c) => Jet::constant(*c),
            Expr::Var(axis) => Jet::variable(point[*axis], *axis),
            Expr::Neg(a) => a.eval_inner(point)?.neg(),
            Expr::Add(a, b) => a.eval_inner(point)?.add(b.eval_inner(point)?),
            Expr::Sub(a, b) => a.eval_inner(point)?.sub(b.eval_inner(point)?),
            Expr::Mul(a, b) => a.eval_inner(point)?.mul(b.eval_inner(point)?),
            Expr::Div(a, b) => {
                let d = b.eval_inner(point)?;
                if d.v == 0.0 {
                    return Err(PotentialError::NonFinite {
                        what: "division by zero".into(),
                    });
                }
                a.eval_inner(point)?.div(d)
            }
            Expr::Pow(a, b) => {
                let base = a.eval_inner(point)?;
                let expo = b.eval_inner(point)?;
                let is_const_int = expo.g == [0.0; 2]
                    && expo.v.fract() == 0.0
                    && expo.v.abs() < 1e9;
                if is_const_int {
                    base.powi(expo.v as i64)
                } else {
                    if base.v <= 0.0 {
                        return Err(PotentialError::NonFinite {
                            what: format!(
                                "non-integer power of non-positive base {}",
                                base.v
                            ),
                        });
                    }
                    base.pow(expo)
                }
            }
            Expr::Call(f, a) => {
                let u = a.eval_inner(point)?;
                match f {
                    UnaryFn::Exp => u.exp(),
                    UnaryFn::Ln => {
                        if u.v <= 0.0 {
                            return Err(PotentialError::NonFinite {
                                what: format!("ln of non-positive value {}", u.v),
                            });
                        }
                        u.ln()
                    }
                    UnaryFn::Sin => u.sin(),
                    UnaryFn::Cos => u.cos(),
                    UnaryFn::Sqrt => {
                        if u.v < 0.0 {
                            return Err(PotentialError::NonFinite {
                                what: format!("sqrt of negative value {}", u.v),
                            });
                        }
                        u.sqrt()
                    }
                }
            }
        })
    }
}
