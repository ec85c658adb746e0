//! Expression trees for Lagrangians `f(x, y, v)` and closed-form curves `y(x)`.
//!
//! The slot `v` holds the (complex) scale derivative of the curve, so
//! evaluation is carried out in complex arithmetic throughout. Real-only
//! primitives (`abs`, `sqrt`) are restricted to subtrees that cannot become
//! complex, i.e. subtrees free of `v` and of `sd(..)`.
//!
//! `sd(u)` is the scale derivative of the x-only expression `u`, evaluated at
//! the current `x` with the current `eps`. It lets a Lagrangian carry
//! ε-dependent coefficients such as `(v - sd(abs(x)))^2`.

mod diff;
mod parse;
mod simplify;

use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::scale_ops;

pub use parse::parse;

/// Independent variables of a Lagrangian.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Var {
    X,
    Y,
    /// The scale-derivative slot.
    V,
}

impl Var {
    pub fn name(self) -> &'static str {
        match self {
            Var::X => "x",
            Var::Y => "y",
            Var::V => "v",
        }
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UnaryOp {
    Neg,
    Abs,
    Sqrt,
    Sin,
    Cos,
    Exp,
    Log,
    /// Scale derivative of an x-only subexpression.
    ScaleDeriv,
}

impl UnaryOp {
    fn func_name(self) -> Option<&'static str> {
        match self {
            UnaryOp::Neg => None,
            UnaryOp::Abs => Some("abs"),
            UnaryOp::Sqrt => Some("sqrt"),
            UnaryOp::Sin => Some("sin"),
            UnaryOp::Cos => Some("cos"),
            UnaryOp::Exp => Some("exp"),
            UnaryOp::Log => Some("log"),
            UnaryOp::ScaleDeriv => Some("sd"),
        }
    }

    fn from_func_name(name: &str) -> Option<Self> {
        Some(match name {
            "abs" => UnaryOp::Abs,
            "sqrt" => UnaryOp::Sqrt,
            "sin" => UnaryOp::Sin,
            "cos" => UnaryOp::Cos,
            "exp" => UnaryOp::Exp,
            "log" => UnaryOp::Log,
            "sd" => UnaryOp::ScaleDeriv,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinaryOp {
    Add,
    Sub,
    Mul,
    Div,
}

impl BinaryOp {
    fn symbol(self) -> char {
        match self {
            BinaryOp::Add => '+',
            BinaryOp::Sub => '-',
            BinaryOp::Mul => '*',
            BinaryOp::Div => '/',
        }
    }
}

/// Expression AST.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Const(f64),
    Var(Var),
    Unary(UnaryOp, Box<Expr>),
    Binary(BinaryOp, Box<Expr>, Box<Expr>),
    /// Integer power with a non-negative exponent.
    Pow(Box<Expr>, u32),
}

/// Evaluation point `(x, y(x), □_ε y(x))` together with the scale `eps`
/// needed by `sd(..)` nodes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Env {
    pub x: f64,
    pub y: f64,
    pub v: Complex64,
    pub eps: f64,
}

impl Env {
    pub fn new(x: f64, y: f64, v: Complex64, eps: f64) -> Self {
        Env { x, y, v, eps }
    }
}

impl Expr {
    pub fn constant(c: f64) -> Self {
        Expr::Const(c)
    }

    pub fn var(v: Var) -> Self {
        Expr::Var(v)
    }

    pub fn unary(op: UnaryOp, e: Expr) -> Self {
        Expr::Unary(op, Box::new(e))
    }

    pub fn binary(op: BinaryOp, l: Expr, r: Expr) -> Self {
        Expr::Binary(op, Box::new(l), Box::new(r))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn add(l: Expr, r: Expr) -> Self {
        Self::binary(BinaryOp::Add, l, r)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn sub(l: Expr, r: Expr) -> Self {
        Self::binary(BinaryOp::Sub, l, r)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn mul(l: Expr, r: Expr) -> Self {
        Self::binary(BinaryOp::Mul, l, r)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn div(l: Expr, r: Expr) -> Self {
        Self::binary(BinaryOp::Div, l, r)
    }

    pub fn pow(base: Expr, n: u32) -> Self {
        Expr::Pow(Box::new(base), n)
    }

    /// True when `var` occurs anywhere in the tree. `sd(u)` counts as
    /// depending on `x` whenever `u` does.
    pub fn contains(&self, var: Var) -> bool {
        match self {
            Expr::Const(_) => false,
            Expr::Var(v) => *v == var,
            Expr::Unary(_, e) | Expr::Pow(e, _) => e.contains(var),
            Expr::Binary(_, l, r) => l.contains(var) || r.contains(var),
        }
    }

    fn contains_scale_deriv(&self) -> bool {
        match self {
            Expr::Const(_) | Expr::Var(_) => false,
            Expr::Unary(UnaryOp::ScaleDeriv, _) => true,
            Expr::Unary(_, e) | Expr::Pow(e, _) => e.contains_scale_deriv(),
            Expr::Binary(_, l, r) => l.contains_scale_deriv() || r.contains_scale_deriv(),
        }
    }

    /// A subtree is real when it can never produce a nonzero imaginary part.
    pub fn is_real(&self) -> bool {
        !self.contains(Var::V) && !self.contains_scale_deriv()
    }

    /// True when the expression only involves `x` and real primitives, so it
    /// can serve as a closed-form curve.
    pub fn is_real_in_x(&self) -> bool {
        self.is_real() && !self.contains(Var::Y)
    }

    /// Checks the structural rules: `abs`/`sqrt` only over real subtrees and
    /// `sd` only over real x-only subtrees.
    pub fn validate(&self) -> Result<()> {
        match self {
            Expr::Const(c) if !c.is_finite() => {
                Err(Error::Parameter(format!("non-finite constant {c}")))
            }
            Expr::Const(_) | Expr::Var(_) => Ok(()),
            Expr::Unary(op, e) => {
                match op {
                    UnaryOp::Abs | UnaryOp::Sqrt if !e.is_real() => {
                        return Err(Error::Parameter(format!(
                            "{}(..) may not be applied to a complex subexpression (one involving v or sd)",
                            op.func_name().unwrap_or_default()
                        )));
                    }
                    UnaryOp::ScaleDeriv if !e.is_real_in_x() => {
                        return Err(Error::Parameter(
                            "sd(..) argument must be a real expression in x only".into(),
                        ));
                    }
                    _ => {}
                }
                e.validate()
            }
            Expr::Binary(_, l, r) => {
                l.validate()?;
                r.validate()
            }
            Expr::Pow(e, _) => e.validate(),
        }
    }

    /// Complex evaluation at `env`.
    pub fn eval(&self, env: &Env) -> Result<Complex64> {
        let z = self.eval_inner(env)?;
        if z.re.is_finite() && z.im.is_finite() {
            Ok(z)
        } else {
            Err(Error::Eval(format!(
                "non-finite value while evaluating {self}"
            )))
        }
    }

    fn eval_inner(&self, env: &Env) -> Result<Complex64> {
        Ok(match self {
            Expr::Const(c) => Complex64::new(*c, 0.0),
            Expr::Var(Var::X) => Complex64::new(env.x, 0.0),
            Expr::Var(Var::Y) => Complex64::new(env.y, 0.0),
            Expr::Var(Var::V) => env.v,
            Expr::Unary(op, e) => {
                if *op == UnaryOp::ScaleDeriv {
                    return scale_ops::scale_derivative_of(|s| e.eval_real(s), env.x, env.eps);
                }
                let a = e.eval_inner(env)?;
                match op {
                    UnaryOp::Neg => -a,
                    UnaryOp::Abs => Complex64::new(a.re.abs(), 0.0),
                    UnaryOp::Sqrt => {
                        if a.re < 0.0 {
                            return Err(Error::Eval(format!("sqrt of negative value {}", a.re)));
                        }
                        Complex64::new(a.re.sqrt(), 0.0)
                    }
                    UnaryOp::Sin => a.sin(),
                    UnaryOp::Cos => a.cos(),
                    UnaryOp::Exp => a.exp(),
                    UnaryOp::Log => {
                        if a == Complex64::new(0.0, 0.0) {
                            return Err(Error::Eval("log of zero".into()));
                        }
                        a.ln()
                    }
                    UnaryOp::ScaleDeriv => unreachable!(),
                }
            }
            Expr::Binary(op, l, r) => {
                let a = l.eval_inner(env)?;
                let b = r.eval_inner(env)?;
                match op {
                    BinaryOp::Add => a + b,
                    BinaryOp::Sub => a - b,
                    BinaryOp::Mul => a * b,
                    BinaryOp::Div => {
                        if b == Complex64::new(0.0, 0.0) {
                            return Err(Error::Eval("division by zero".into()));
                        }
                        a / b
                    }
                }
            }
            Expr::Pow(e, n) => e.eval_inner(env)?.powu(*n),
        })
    }

    /// Real evaluation of an x-only expression (curves and `sd` arguments).
    pub fn eval_real(&self, x: f64) -> Result<f64> {
        let r = self.eval_real_inner(x)?;
        if r.is_finite() {
            Ok(r)
        } else {
            Err(Error::Eval(format!(
                "non-finite value while evaluating {self} at x = {x}"
            )))
        }
    }

    fn eval_real_inner(&self, x: f64) -> Result<f64> {
        Ok(match self {
            Expr::Const(c) => *c,
            Expr::Var(Var::X) => x,
            Expr::Var(v) => {
                return Err(Error::Eval(format!(
                    "variable {v} is not available in a curve expression"
                )))
            }
            Expr::Unary(op, e) => {
                let a = e.eval_real_inner(x)?;
                match op {
                    UnaryOp::Neg => -a,
                    UnaryOp::Abs => a.abs(),
                    UnaryOp::Sqrt => {
                        if a < 0.0 {
                            return Err(Error::Eval(format!("sqrt of negative value {a}")));
                        }
                        a.sqrt()
                    }
                    UnaryOp::Sin => a.sin(),
                    UnaryOp::Cos => a.cos(),
                    UnaryOp::Exp => a.exp(),
                    UnaryOp::Log => {
                        if a <= 0.0 {
                            return Err(Error::Eval(format!("log of non-positive value {a}")));
                        }
                        a.ln()
                    }
                    UnaryOp::ScaleDeriv => {
                        return Err(Error::Eval(
                            "sd(..) is complex-valued and cannot appear in a curve".into(),
                        ))
                    }
                }
            }
            Expr::Binary(op, l, r) => {
                let a = l.eval_real_inner(x)?;
                let b = r.eval_real_inner(x)?;
                match op {
                    BinaryOp::Add => a + b,
                    BinaryOp::Sub => a - b,
                    BinaryOp::Mul => a * b,
                    BinaryOp::Div => {
                        if b == 0.0 {
                            return Err(Error::Eval("division by zero".into()));
                        }
                        a / b
                    }
                }
            }
            Expr::Pow(e, n) => e.eval_real_inner(x)?.powi(*n as i32),
        })
    }

    /// Symbolic derivative with respect to `wrt`, simplified.
    pub fn diff(&self, wrt: Var) -> Result<Expr> {
        Ok(diff::diff(self, wrt)?.simplify())
    }

    /// Constant folding and 0/1 identities.
    pub fn simplify(&self) -> Expr {
        simplify::simplify(self)
    }

    /// Evaluates an expression free of variables and `sd`.
    pub fn eval_constant(&self) -> Result<f64> {
        if self.contains(Var::X) || self.contains(Var::Y) || !self.is_real() {
            return Err(Error::Parameter(format!(
                "{self} is not a constant expression"
            )));
        }
        self.eval_real(0.0)
    }
}

/// Prints an expression in a form that [`parse`] reads back to an equal tree.
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Const(c) if *c < 0.0 => write!(f, "(-{})", -c),
            Expr::Const(c) => write!(f, "{c}"),
            Expr::Var(v) => write!(f, "{v}"),
            Expr::Unary(UnaryOp::Neg, e) => write!(f, "-({e})"),
            Expr::Unary(op, e) => write!(f, "{}({e})", op.func_name().unwrap_or_default()),
            Expr::Binary(op, l, r) => write!(f, "({l} {} {r})", op.symbol()),
            Expr::Pow(e, n) => match **e {
                Expr::Unary(UnaryOp::Neg, _) | Expr::Pow(..) => write!(f, "({e})^{n}"),
                _ => write!(f, "{e}^{n}"),
            },
        }
    }
}
