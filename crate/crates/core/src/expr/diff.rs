use super::{BinaryOp, Expr, UnaryOp, Var};
use crate::error::{Error, Result};

fn c(v: f64) -> Expr {
    Expr::Const(v)
}

/// Unsimplified symbolic derivative. `v` is treated as a single
/// complex-analytic variable.
pub(super) fn diff(e: &Expr, wrt: Var) -> Result<Expr> {
    if !e.contains(wrt) {
        return Ok(c(0.0));
    }
    Ok(match e {
        Expr::Const(_) => c(0.0),
        Expr::Var(v) => c(if *v == wrt { 1.0 } else { 0.0 }),
        Expr::Unary(op, u) => {
            let du = diff(u, wrt)?;
            let u = (**u).clone();
            match op {
                UnaryOp::Neg => Expr::unary(UnaryOp::Neg, du),
                UnaryOp::Sin => Expr::mul(Expr::unary(UnaryOp::Cos, u), du),
                UnaryOp::Cos => {
                    Expr::mul(Expr::unary(UnaryOp::Neg, Expr::unary(UnaryOp::Sin, u)), du)
                }
                UnaryOp::Exp => Expr::mul(Expr::unary(UnaryOp::Exp, u), du),
                UnaryOp::Log => Expr::div(du, u),
                UnaryOp::Sqrt => Expr::div(du, Expr::mul(c(2.0), Expr::unary(UnaryOp::Sqrt, u))),
                UnaryOp::Abs => {
                    return Err(Error::Unsupported(format!(
                        "cannot differentiate abs({u}) with respect to {wrt}"
                    )))
                }
                UnaryOp::ScaleDeriv => {
                    return Err(Error::Unsupported(format!(
                        "cannot differentiate sd({u}) with respect to {wrt}"
                    )))
                }
            }
        }
        Expr::Binary(op, l, r) => {
            let dl = diff(l, wrt)?;
            let dr = diff(r, wrt)?;
            let (l, r) = ((**l).clone(), (**r).clone());
            match op {
                BinaryOp::Add => Expr::add(dl, dr),
                BinaryOp::Sub => Expr::sub(dl, dr),
                BinaryOp::Mul => Expr::add(Expr::mul(dl, r), Expr::mul(l, dr)),
                BinaryOp::Div => Expr::div(
                    Expr::sub(Expr::mul(dl, r.clone()), Expr::mul(l, dr)),
                    Expr::pow(r, 2),
                ),
            }
        }
        Expr::Pow(u, n) => match n {
            0 => c(0.0),
            _ => Expr::mul(
                Expr::mul(c(*n as f64), Expr::pow((**u).clone(), n - 1)),
                diff(u, wrt)?,
            ),
        },
    })
}

#[cfg(test)]
mod tests {
    use super::super::{parse, Env};
    use super::*;
    use num_complex::Complex64;

    #[test]
    fn power_rule_in_v() {
        let e = parse("(v - 3)^2").unwrap();
        let d = e.diff(Var::V).unwrap();
        assert_eq!(d, parse("2 * (v - 3)").unwrap());
    }

    #[test]
    fn constraint_partials() {
        let g = parse("x + y^2").unwrap();
        assert_eq!(g.diff(Var::Y).unwrap(), parse("2 * y").unwrap());
        assert_eq!(g.diff(Var::V).unwrap(), Expr::Const(0.0));
    }

    #[test]
    fn abs_of_x_is_a_coefficient() {
        // ∂/∂v and ∂/∂y pass straight through abs(x) and sd(abs(x)).
        let f = parse("(v - sd(abs(x)))^2 + abs(x) * y").unwrap();
        assert_eq!(
            f.diff(Var::V).unwrap(),
            parse("2 * (v - sd(abs(x)))").unwrap()
        );
        assert_eq!(f.diff(Var::Y).unwrap(), parse("abs(x)").unwrap());
        assert!(matches!(f.diff(Var::X), Err(Error::Unsupported(_))));
        assert!(matches!(
            parse("abs(y)").unwrap().diff(Var::Y),
            Err(Error::Unsupported(_))
        ));
    }

    #[test]
    fn transcendental_rules() {
        let e = parse("sin(v) * exp(y) / (1 + v^2) + log(v) - cos(y)").unwrap();
        let env = Env::new(0.3, 0.2, Complex64::new(0.7, -0.2), 0.1);
        let h = 1e-6;
        let dv = e.diff(Var::V).unwrap().eval(&env).unwrap();
        let mut p = env;
        let mut m = env;
        p.v += h;
        m.v -= h;
        let fd = (e.eval(&p).unwrap() - e.eval(&m).unwrap()) / (2.0 * h);
        assert!((dv - fd).norm() < 1e-8 * (1.0 + fd.norm()));

        let dy = e.diff(Var::Y).unwrap().eval(&env).unwrap();
        let (mut p, mut m) = (env, env);
        p.y += h;
        m.y -= h;
        let fd = (e.eval(&p).unwrap() - e.eval(&m).unwrap()) / (2.0 * h);
        assert!((dy - fd).norm() < 1e-8 * (1.0 + fd.norm()));
    }
}
