//! Recursive-descent parser; one token of lookahead, exact error
//! positions.

use super::lex::{lex, syntax_error, Spanned, Tok};
use super::{IntExpr, PairSide, SetExpr};
use crate::error::Result;

pub(super) fn parse(text: &str) -> Result<SetExpr> {
    let tokens = lex(text)?;
    let mut p = Parser {
        text,
        tokens,
        at: 0,
    };
    let set = p.set()?;
    p.expect_eof()?;
    Ok(set)
}

struct Parser<'t> {
    text: &'t str,
    tokens: Vec<Spanned>,
    at: usize,
}

impl Parser<'_> {
    fn peek(&self) -> &Tok {
        &self.tokens[self.at].tok
    }

    fn pos(&self) -> usize {
        self.tokens[self.at].pos
    }

    fn bump(&mut self) -> Tok {
        let t = self.tokens[self.at].tok.clone();
        if self.at + 1 < self.tokens.len() {
            self.at += 1;
        }
        t
    }

    fn err(&self, expected: impl Into<String>) -> crate::error::Error {
        syntax_error(self.text, self.pos(), expected)
    }

    fn expect(&mut self, tok: Tok) -> Result<()> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            Err(self.err(tok.describe()))
        }
    }

    fn expect_eof(&mut self) -> Result<()> {
        if *self.peek() == Tok::Eof {
            Ok(())
        } else {
            Err(self.err("end of input"))
        }
    }

    fn ident(&mut self, what: &str) -> Result<String> {
        match self.peek() {
            Tok::Ident(_) => match self.bump() {
                Tok::Ident(s) => Ok(s),
                _ => unreachable!(),
            },
            _ => Err(self.err(what)),
        }
    }

    fn set(&mut self) -> Result<SetExpr> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek() {
                Tok::Pipe => SetExpr::Union as fn(_, _) -> _,
                Tok::Amp => SetExpr::Intersect as fn(_, _) -> _,
                Tok::Backslash => SetExpr::Difference as fn(_, _) -> _,
                _ => break,
            };
            self.bump();
            let rhs = self.term()?;
            lhs = op(Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<SetExpr> {
        match self.peek().clone() {
            Tok::Bang => {
                self.bump();
                self.expect(Tok::LParen)?;
                let inner = self.set()?;
                self.expect(Tok::RParen)?;
                Ok(SetExpr::Complement(Box::new(inner)))
            }
            Tok::Ident(name) => match name.as_str() {
                "interval" => {
                    self.bump();
                    self.expect(Tok::LParen)?;
                    let lo = self.int_expr()?;
                    self.expect(Tok::Comma)?;
                    let hi = self.int_expr()?;
                    self.expect(Tok::RParen)?;
                    Ok(SetExpr::Interval(lo, hi))
                }
                "ap" => {
                    self.bump();
                    self.expect(Tok::LParen)?;
                    let start = self.int_expr()?;
                    self.expect(Tok::Comma)?;
                    let step = self.int_expr()?;
                    self.expect(Tok::Comma)?;
                    let count = self.int_expr()?;
                    self.expect(Tok::RParen)?;
                    Ok(SetExpr::ArithProg { start, step, count })
                }
                "mod" => {
                    self.bump();
                    self.expect(Tok::LParen)?;
                    let modulus = self.int_expr()?;
                    self.expect(Tok::Comma)?;
                    self.expect(Tok::LBrace)?;
                    let mut residues = vec![self.int_expr()?];
                    loop {
                        match self.peek() {
                            Tok::Comma => {
                                self.bump();
                                residues.push(self.int_expr()?);
                            }
                            Tok::RBrace => {
                                self.bump();
                                break;
                            }
                            _ => return Err(self.err("',' or '}'")),
                        }
                    }
                    self.expect(Tok::RParen)?;
                    Ok(SetExpr::ModResidues { modulus, residues })
                }
                "sum" => {
                    self.bump();
                    self.expect(Tok::LParen)?;
                    let a = self.set()?;
                    self.expect(Tok::Comma)?;
                    let b = self.set()?;
                    self.expect(Tok::RParen)?;
                    Ok(SetExpr::Sum(Box::new(a), Box::new(b)))
                }
                "dilate" | "erode" => {
                    self.bump();
                    self.expect(Tok::LParen)?;
                    let inner = self.set()?;
                    self.expect(Tok::Comma)?;
                    let amount = self.int_expr()?;
                    self.expect(Tok::RParen)?;
                    Ok(if name == "dilate" {
                        SetExpr::Dilate(Box::new(inner), amount)
                    } else {
                        SetExpr::Erode(Box::new(inner), amount)
                    })
                }
                "union" => {
                    self.bump();
                    self.expect(Tok::LParen)?;
                    let var = self.ident("binder name")?;
                    self.expect(Tok::Eq)?;
                    let lo = self.int_expr()?;
                    self.expect(Tok::DotDot)?;
                    let hi = self.int_expr()?;
                    self.expect(Tok::Comma)?;
                    let body = self.set()?;
                    self.expect(Tok::RParen)?;
                    Ok(SetExpr::IndexedUnion {
                        var,
                        lo,
                        hi,
                        body: Box::new(body),
                    })
                }
                "family" => {
                    self.bump();
                    self.expect(Tok::LParen)?;
                    let fam = self.ident("family name")?;
                    let mut params = Vec::new();
                    loop {
                        match self.peek() {
                            Tok::Comma => {
                                self.bump();
                                let key = self.ident("parameter name")?;
                                self.expect(Tok::Eq)?;
                                let value = self.int_expr()?;
                                params.push((key, value));
                            }
                            Tok::RParen => {
                                self.bump();
                                break;
                            }
                            _ => return Err(self.err("',' or ')'")),
                        }
                    }
                    let select = if *self.peek() == Tok::Dot {
                        self.bump();
                        let side_pos = self.pos();
                        let side = self.ident("'A' or 'B'")?;
                        match side.as_str() {
                            "A" => Some(PairSide::A),
                            "B" => Some(PairSide::B),
                            _ => {
                                return Err(syntax_error(self.text, side_pos, "'A' or 'B'"))
                            }
                        }
                    } else {
                        None
                    };
                    Ok(SetExpr::FamilyRef {
                        name: fam,
                        params,
                        select,
                    })
                }
                _ => Err(self.err(
                    "a set constructor (interval, ap, mod, sum, dilate, erode, union, family, or !)",
                )),
            },
            _ => Err(self.err(
                "a set constructor (interval, ap, mod, sum, dilate, erode, union, family, or !)",
            )),
        }
    }

    // Integer expressions: '!' tightest, then '^' (right-assoc), unary
    // minus, '*', and '+'/'-' loosest.
    fn int_expr(&mut self) -> Result<IntExpr> {
        let mut lhs = self.int_mul()?;
        loop {
            let sub = match self.peek() {
                Tok::Plus => false,
                Tok::Minus => true,
                _ => break,
            };
            self.bump();
            let rhs = self.int_mul()?;
            lhs = if sub {
                IntExpr::Sub(Box::new(lhs), Box::new(rhs))
            } else {
                IntExpr::Add(Box::new(lhs), Box::new(rhs))
            };
        }
        Ok(lhs)
    }

    fn int_mul(&mut self) -> Result<IntExpr> {
        let mut lhs = self.int_unary()?;
        while *self.peek() == Tok::Star {
            self.bump();
            let rhs = self.int_unary()?;
            lhs = IntExpr::Mul(Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn int_unary(&mut self) -> Result<IntExpr> {
        if *self.peek() == Tok::Minus {
            self.bump();
            let inner = self.int_unary()?;
            // Fold a negated literal so -5 round-trips as Lit(-5).
            return Ok(match inner {
                IntExpr::Lit(v) => IntExpr::Lit(-v),
                other => IntExpr::Neg(Box::new(other)),
            });
        }
        self.int_pow()
    }

    fn int_pow(&mut self) -> Result<IntExpr> {
        let base = self.int_postfix()?;
        if *self.peek() == Tok::Caret {
            self.bump();
            let exp = self.int_unary()?;
            return Ok(IntExpr::Pow(Box::new(base), Box::new(exp)));
        }
        Ok(base)
    }

    fn int_postfix(&mut self) -> Result<IntExpr> {
        let mut e = self.int_atom()?;
        while *self.peek() == Tok::Bang {
            self.bump();
            e = IntExpr::Fact(Box::new(e));
        }
        Ok(e)
    }

    fn int_atom(&mut self) -> Result<IntExpr> {
        match self.peek().clone() {
            Tok::Int(v) => {
                self.bump();
                Ok(IntExpr::Lit(v))
            }
            Tok::Ident(name) => {
                self.bump();
                Ok(IntExpr::Var(name))
            }
            Tok::LParen => {
                self.bump();
                let inner = self.int_expr()?;
                self.expect(Tok::RParen)?;
                Ok(inner)
            }
            _ => Err(self.err("an integer expression")),
        }
    }
}
