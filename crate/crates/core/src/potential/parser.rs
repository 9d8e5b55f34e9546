//! Recursive-descent parser for the potential expression language.
//!
//! Grammar (standard precedence, `^` right-associative and binding
//! tighter than unary minus):
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := factor (('*' | '/') factor)*
//! factor := '-' factor | power
//! power  := atom ('^' factor)?
//! atom   := number | ident | ident '(' expr ')' | '(' expr ')'
//! ```

use super::ast::{Expr, UnaryFn};
use super::PotentialError;

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

struct Lexer<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn tokens(src: &'a str) -> Result<Vec<(Tok, usize)>, PotentialError> {
        let mut lx = Lexer { src: src.as_bytes(), pos: 0 };
        let mut out = Vec::new();
        loop {
            lx.skip_ws();
            if lx.pos >= lx.src.len() {
                break;
            }
            let start = lx.pos;
            let c = lx.src[lx.pos];
            let tok = match c {
                b'+' => {
                    lx.pos += 1;
                    Tok::Plus
                }
                b'-' => {
                    lx.pos += 1;
                    Tok::Minus
                }
                b'*' => {
                    lx.pos += 1;
                    Tok::Star
                }
                b'/' => {
                    lx.pos += 1;
                    Tok::Slash
                }
                b'^' => {
                    lx.pos += 1;
                    Tok::Caret
                }
                b'(' => {
                    lx.pos += 1;
                    Tok::LParen
                }
                b')' => {
                    lx.pos += 1;
                    Tok::RParen
                }
                b'0'..=b'9' | b'.' => lx.number(start)?,
                c if c.is_ascii_alphabetic() || c == b'_' => lx.ident(start),
                _ => {
                    return Err(PotentialError::Syntax {
                        position: start,
                        message: format!("unexpected character '{}'", c as char),
                    })
                }
            };
            out.push((tok, start));
        }
        Ok(out)
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn number(&mut self, start: usize) -> Result<Tok, PotentialError> {
        let mut seen_dot = false;
        let mut seen_exp = false;
        while self.pos < self.src.len() {
            let c = self.src[self.pos];
            match c {
                b'0'..=b'9' => self.pos += 1,
                b'.' if !seen_dot && !seen_exp => {
                    seen_dot = true;
                    self.pos += 1;
                }
                b'e' | b'E' if !seen_exp => {
                    seen_exp = true;
                    self.pos += 1;
                    if self.pos < self.src.len()
                        && (self.src[self.pos] == b'+' || self.src[self.pos] == b'-')
                    {
                        self.pos += 1;
                    }
                }
                _ => break,
            }
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
        text.parse::<f64>()
            .map(Tok::Num)
            .map_err(|_| PotentialError::Syntax {
                position: start,
                message: format!("invalid number literal '{text}'"),
            })
    }

    fn ident(&mut self, start: usize) -> Tok {
        while self.pos < self.src.len()
            && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
        {
            self.pos += 1;
        }
        Tok::Ident(
            std::str::from_utf8(&self.src[start..self.pos])
                .unwrap()
                .to_string(),
        )
    }
}

pub(super) struct Parser {
    toks: Vec<(Tok, usize)>,
    idx: usize,
    dimension: usize,
    src_len: usize,
}

impl Parser {
    pub fn parse(source: &str, dimension: usize) -> Result<Expr, PotentialError> {
        let toks = Lexer::tokens(source)?;
        let mut p = Parser {
            toks,
            idx: 0,
            dimension,
            src_len: source.len(),
        };
        let expr = p.expr()?;
        if let Some((_, pos)) = p.peek_with_pos() {
            return Err(PotentialError::Syntax {
                position: pos,
                message: "trailing input after expression".into(),
            });
        }
        Ok(expr)
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.idx).map(|(t, _)| t)
    }

    fn peek_with_pos(&self) -> Option<(&Tok, usize)> {
        self.toks.get(self.idx).map(|(t, p)| (t, *p))
    }

    fn bump(&mut self) -> Option<(Tok, usize)> {
        let t = self.toks.get(self.idx).cloned();
        self.idx += 1;
        t
    }

    fn here(&self) -> usize {
        self.toks
            .get(self.idx)
            .map(|(_, p)| *p)
            .unwrap_or(self.src_len)
    }

    fn expr(&mut self) -> Result<Expr, PotentialError> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.bump();
                    lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
                }
                Some(Tok::Minus) => {
                    self.bump();
                    lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Expr, PotentialError> {
        let mut lhs = self.factor()?;
        loop {
            match self.peek() {
                Some(Tok::Star) => {
                    self.bump();
                    lhs = Expr::Mul(Box::new(lhs), Box::new(self.factor()?));
                }
                Some(Tok::Slash) => {
                    self.bump();
                    lhs = Expr::Div(Box::new(lhs), Box::new(self.factor()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn factor(&mut self) -> Result<Expr, PotentialError> {
        if matches!(self.peek(), Some(Tok::Minus)) {
            self.bump();
            return Ok(Expr::Neg(Box::new(self.factor()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, PotentialError> {
        let base = self.atom()?;
        if matches!(self.peek(), Some(Tok::Caret)) {
            self.bump();
            let expo = self.factor()?;
            return Ok(Expr::Pow(Box::new(base), Box::new(expo)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr, PotentialError> {
        let pos = self.here();
        match self.bump() {
            Some((Tok::Num(v), _)) => Ok(Expr::Number(v)),
            Some((Tok::Ident(name), pos)) => self.ident_atom(name, pos),
            Some((Tok::LParen, _)) => {
                let inner = self.expr()?;
                self.expect_rparen()?;
                Ok(inner)
            }
            Some((tok, pos)) => Err(PotentialError::Syntax {
                position: pos,
                message: format!("unexpected token {tok:?}"),
            }),
            None => Err(PotentialError::Syntax {
                position: pos,
                message: "unexpected end of expression".into(),
            }),
        }
    }

    fn ident_atom(&mut self, name: String, pos: usize) -> Result<Expr, PotentialError> {
        match name.as_str() {
            "x" => Ok(Expr::Var(0)),
            "y" => {
                if self.dimension < 2 {
                    return Err(PotentialError::DimensionMismatch {
                        position: pos,
                        message: "variable 'y' used in a 1-dimensional potential".into(),
                    });
                }
                Ok(Expr::Var(1))
            }
            "pi" => Ok(Expr::Number(std::f64::consts::PI)),
            "exp" | "ln" | "sin" | "cos" | "sqrt" => {
                let f = match name.as_str() {
                    "exp" => UnaryFn::Exp,
                    "ln" => UnaryFn::Ln,
                    "sin" => UnaryFn::Sin,
                    "cos" => UnaryFn::Cos,
                    _ => UnaryFn::Sqrt,
                };
                match self.bump() {
                    Some((Tok::LParen, _)) => {}
                    _ => {
                        return Err(PotentialError::Syntax {
                            position: pos,
                            message: format!("function '{name}' requires parentheses"),
                        })
                    }
                }
                let arg = self.expr()?;
                self.expect_rparen()?;
                Ok(Expr::Call(f, Box::new(arg)))
            }
            _ => Err(PotentialError::UnknownIdentifier {
                position: pos,
                name,
            }),
        }
    }

    fn expect_rparen(&mut self) -> Result<(), PotentialError> {
        let pos = self.here();
        match self.bump() {
            Some((Tok::RParen, _)) => Ok(()),
            _ => Err(PotentialError::Syntax {
                position: pos,
                message: "expected ')'".into(),
            }),
        }
    }
}
