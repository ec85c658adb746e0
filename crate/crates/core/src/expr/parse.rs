//! Recursive-descent parser.
//!
//! ```text
//! expr   = term { ("+" | "-") term } ;
//! term   = unary { ("*" | "/") unary } ;
//! unary  = "-" unary | power ;
//! power  = atom { "^" integer } ;
//! atom   = number | "x" | "y" | "v" | "pi" | func "(" expr ")" | "(" expr ")" ;
//! func   = "abs" | "sqrt" | "sin" | "cos" | "exp" | "log" | "sd" ;
//! ```
//!
//! A minus sign directly in front of a numeric literal (not itself raised to
//! a power) is folded into a negative constant.

use super::{BinaryOp, Expr, UnaryOp, Var};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num { value: f64, integer: bool },
    Ident(String),
    Op(char),
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    pos: usize,
}

fn syntax<T>(pos: usize, msg: impl Into<String>) -> Result<T> {
    Err(Error::Syntax {
        pos,
        msg: msg.into(),
    })
}

fn tokenize(text: &str) -> Result<Vec<Token>> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        if c.is_ascii_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() || c == '.' {
            let start = i;
            let mut integer = true;
            while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                if bytes[i] == b'.' {
                    integer = false;
                }
                i += 1;
            }
            if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                let mut j = i + 1;
                if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                    j += 1;
                }
                if j < bytes.len() && bytes[j].is_ascii_digit() {
                    integer = false;
                    i = j;
                    while i < bytes.len() && bytes[i].is_ascii_digit() {
                        i += 1;
                    }
                }
            }
            let lit = &text[start..i];
            match lit.parse::<f64>() {
                Ok(value) if value.is_finite() => out.push(Token {
                    tok: Tok::Num { value, integer },
                    pos: start,
                }),
                _ => return syntax(start, format!("malformed number `{lit}`")),
            }
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            out.push(Token {
                tok: Tok::Ident(text[start..i].to_string()),
                pos: start,
            });
        } else if "+-*/^()".contains(c) {
            out.push(Token {
                tok: Tok::Op(c),
                pos: i,
            });
            i += 1;
        } else {
            return syntax(i, format!("unexpected character `{c}`"));
        }
    }
    Ok(out)
}

struct Parser {
    tokens: Vec<Token>,
    idx: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.tokens.get(self.idx).map(|t| &t.tok)
    }

    fn peek_at(&self, k: usize) -> Option<&Tok> {
        self.tokens.get(self.idx + k).map(|t| &t.tok)
    }

    fn pos(&self) -> usize {
        self.tokens.get(self.idx).map_or(self.end, |t| t.pos)
    }

    fn eat_op(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Op(c)) {
            self.idx += 1;
            true
        } else {
            false
        }
    }

    fn expect_op(&mut self, c: char) -> Result<()> {
        if self.eat_op(c) {
            Ok(())
        } else {
            syntax(self.pos(), format!("expected `{c}`"))
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        loop {
            let op = if self.eat_op('+') {
                BinaryOp::Add
            } else if self.eat_op('-') {
                BinaryOp::Sub
            } else {
                return Ok(lhs);
            };
            let rhs = self.term()?;
            lhs = Expr::binary(op, lhs, rhs);
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        loop {
            let op = if self.eat_op('*') {
                BinaryOp::Mul
            } else if self.eat_op('/') {
                BinaryOp::Div
            } else {
                return Ok(lhs);
            };
            let rhs = self.unary()?;
            lhs = Expr::binary(op, lhs, rhs);
        }
    }

    fn unary(&mut self) -> Result<Expr> {
        if self.eat_op('-') {
            if let (Some(Tok::Num { value, .. }), next) = (self.peek(), self.peek_at(1)) {
                if next != Some(&Tok::Op('^')) {
                    let value = *value;
                    self.idx += 1;
                    return Ok(Expr::Const(-value));
                }
            }
            return Ok(Expr::unary(UnaryOp::Neg, self.unary()?));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr> {
        let mut base = self.atom()?;
        while self.eat_op('^') {
            match self.peek() {
                Some(Tok::Num {
                    value,
                    integer: true,
                }) if *value <= u32::MAX as f64 => {
                    let n = *value as u32;
                    self.idx += 1;
                    base = Expr::pow(base, n);
                }
                _ => return syntax(self.pos(), "expected non-negative integer exponent"),
            }
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr> {
        let pos = self.pos();
        let Some(tok) = self.peek().cloned() else {
            return syntax(pos, "unexpected end of input");
        };
        self.idx += 1;
        match tok {
            Tok::Num { value, .. } => Ok(Expr::Const(value)),
            Tok::Op('(') => {
                let e = self.expr()?;
                self.expect_op(')')?;
                Ok(e)
            }
            Tok::Ident(name) => match name.as_str() {
                "x" => Ok(Expr::Var(Var::X)),
                "y" => Ok(Expr::Var(Var::Y)),
                "v" => Ok(Expr::Var(Var::V)),
                "pi" => Ok(Expr::Const(std::f64::consts::PI)),
                _ => match UnaryOp::from_func_name(&name) {
                    Some(op) => {
                        self.expect_op('(')?;
                        let arg = self.expr()?;
                        self.expect_op(')')?;
                        Ok(Expr::unary(op, arg))
                    }
                    None => syntax(pos, format!("unknown identifier `{name}`")),
                },
            },
            Tok::Op(c) => syntax(pos, format!("unexpected `{c}`")),
        }
    }
}

/// Parses and validates an expression.
pub fn parse(text: &str) -> Result<Expr> {
    if text.trim().is_empty() {
        return syntax(0, "empty expression");
    }
    let tokens = tokenize(text)?;
    let mut p = Parser {
        tokens,
        idx: 0,
        end: text.len(),
    };
    let e = p.expr()?;
    if p.idx != p.tokens.len() {
        return syntax(p.pos(), "unexpected trailing input");
    }
    e.validate()?;
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn syntax_pos(s: &str) -> usize {
        match parse(s) {
            Err(Error::Syntax { pos, .. }) => pos,
            other => panic!("expected syntax error for {s:?}, got {other:?}"),
        }
    }

    #[test]
    fn squared_difference() {
        let e = parse("(v - 1)^2").unwrap();
        assert_eq!(
            e,
            Expr::pow(Expr::sub(Expr::Var(Var::V), Expr::Const(1.0)), 2)
        );
    }

    #[test]
    fn constraint_lagrangian_structure() {
        let e = parse("x + y^2").unwrap();
        assert_eq!(
            e,
            Expr::add(Expr::Var(Var::X), Expr::pow(Expr::Var(Var::Y), 2))
        );
    }

    #[test]
    fn syntax_error_positions() {
        assert_eq!(syntax_pos("v^"), 2);
        assert_eq!(syntax_pos("x + * y"), 4);
        assert_eq!(syntax_pos("(x"), 2);
        assert_eq!(syntax_pos("x^1.5"), 2);
        assert_eq!(syntax_pos(""), 0);
        assert_eq!(syntax_pos("x $ y"), 2);
    }

    #[test]
    fn unknown_identifier() {
        assert_eq!(syntax_pos("x + z"), 4);
        assert_eq!(syntax_pos("tan(x)"), 0);
    }

    #[test]
    fn abs_of_v_rejected() {
        assert!(matches!(parse("abs(v)"), Err(Error::Parameter(_))));
        assert!(matches!(parse("abs(sd(x))"), Err(Error::Parameter(_))));
        assert!(matches!(parse("sd(y)"), Err(Error::Parameter(_))));
        assert!(parse("abs(x) * v").is_ok());
    }

    #[test]
    fn precedence() {
        // pow binds tighter than unary minus, which binds tighter than mul.
        assert_eq!(
            parse("-x^2").unwrap(),
            Expr::unary(UnaryOp::Neg, Expr::pow(Expr::Var(Var::X), 2))
        );
        assert_eq!(parse("-2^2").unwrap().eval_constant().unwrap(), -4.0);
        assert_eq!(
            parse("2*-3").unwrap(),
            Expr::mul(Expr::Const(2.0), Expr::Const(-3.0))
        );
        assert_eq!(parse("1 - 2 - 3").unwrap().eval_constant().unwrap(), -4.0);
        assert_eq!(parse("8 / 4 / 2").unwrap().eval_constant().unwrap(), 1.0);
        assert_eq!(parse("1 + 2 * 3^2").unwrap().eval_constant().unwrap(), 19.0);
        assert_eq!(parse("1.5e1").unwrap(), Expr::Const(15.0));
    }
}
