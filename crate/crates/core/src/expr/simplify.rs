use super::{BinaryOp, Expr, UnaryOp};

fn is_const(e: &Expr, v: f64) -> bool {
    matches!(e, Expr::Const(c) if *c == v)
}

/// Folds a unary function of a constant, leaving error cases (log of a
/// non-positive value, sqrt of a negative one) for evaluation to report.
fn fold_unary(op: UnaryOp, a: f64) -> Option<f64> {
    let r = match op {
        UnaryOp::Neg => -a,
        UnaryOp::Abs => a.abs(),
        UnaryOp::Sqrt if a >= 0.0 => a.sqrt(),
        UnaryOp::Sin => a.sin(),
        UnaryOp::Cos => a.cos(),
        UnaryOp::Exp => a.exp(),
        UnaryOp::Log if a > 0.0 => a.ln(),
        _ => return None,
    };
    r.is_finite().then_some(r)
}

pub(super) fn simplify(e: &Expr) -> Expr {
    match e {
        Expr::Const(_) | Expr::Var(_) => e.clone(),
        Expr::Unary(op, u) => {
            let u = simplify(u);
            match (op, &u) {
                (UnaryOp::ScaleDeriv, _) => Expr::unary(*op, u),
                (_, Expr::Const(a)) => match fold_unary(*op, *a) {
                    Some(r) => Expr::Const(r),
                    None => Expr::unary(*op, u),
                },
                (UnaryOp::Neg, Expr::Unary(UnaryOp::Neg, inner)) => (**inner).clone(),
                _ => Expr::unary(*op, u),
            }
        }
        Expr::Pow(u, n) => {
            let u = simplify(u);
            match (n, &u) {
                (0, _) => Expr::Const(1.0),
                (1, _) => u,
                (_, Expr::Const(a)) if a.powi(*n as i32).is_finite() => {
                    Expr::Const(a.powi(*n as i32))
                }
                _ => Expr::pow(u, *n),
            }
        }
        Expr::Binary(op, l, r) => simplify_binary(*op, simplify(l), simplify(r)),
    }
}

fn simplify_binary(op: BinaryOp, l: Expr, r: Expr) -> Expr {
    if let (Expr::Const(a), Expr::Const(b)) = (&l, &r) {
        let folded = match op {
            BinaryOp::Add => Some(a + b),
            BinaryOp::Sub => Some(a - b),
            BinaryOp::Mul => Some(a * b),
            BinaryOp::Div if *b != 0.0 => Some(a / b),
            BinaryOp::Div => None,
        };
        if let Some(v) = folded.filter(|v| v.is_finite()) {
            return Expr::Const(v);
        }
    }
    match op {
        BinaryOp::Add if is_const(&l, 0.0) => r,
        BinaryOp::Add if is_const(&r, 0.0) => l,
        BinaryOp::Sub if is_const(&r, 0.0) => l,
        BinaryOp::Sub if is_const(&l, 0.0) => simplify(&Expr::unary(UnaryOp::Neg, r)),
        BinaryOp::Sub if l == r => Expr::Const(0.0),
        BinaryOp::Mul if is_const(&l, 0.0) || is_const(&r, 0.0) => Expr::Const(0.0),
        BinaryOp::Mul if is_const(&l, 1.0) => r,
        BinaryOp::Mul if is_const(&r, 1.0) => l,
        BinaryOp::Mul => match (l, r) {
            // c1 * (c2 * e) and (c1 * e) * c2 re-associate to (c1 c2) * e.
            (Expr::Const(a), Expr::Binary(BinaryOp::Mul, il, ir))
                if matches!(*il, Expr::Const(_)) =>
            {
                let Expr::Const(b) = *il else { unreachable!() };
                simplify_binary(BinaryOp::Mul, Expr::Const(a * b), *ir)
            }
            (Expr::Binary(BinaryOp::Mul, il, ir), Expr::Const(b))
                if matches!(*il, Expr::Const(_)) =>
            {
                let Expr::Const(a) = *il else { unreachable!() };
                simplify_binary(BinaryOp::Mul, Expr::Const(a * b), *ir)
            }
            // Keep constants on the left.
            (l, Expr::Const(b)) => Expr::mul(Expr::Const(b), l),
            (l, r) => Expr::mul(l, r),
        },
        BinaryOp::Div if is_const(&r, 1.0) => l,
        BinaryOp::Div if is_const(&l, 0.0) && !is_const(&r, 0.0) => Expr::Const(0.0),
        _ => Expr::binary(op, l, r),
    }
}

#[cfg(test)]
mod tests {
    use super::super::parse;
    use super::*;

    fn s(text: &str) -> Expr {
        parse(text).unwrap().simplify()
    }

    #[test]
    fn zero_and_one_identities() {
        assert_eq!(s("0*v + y"), parse("y").unwrap());
        assert_eq!(s("v - v"), Expr::Const(0.0));
        assert_eq!(s("1 * (x / 1) + 0"), parse("x").unwrap());
        assert_eq!(s("(y + 0)^1"), parse("y").unwrap());
        assert_eq!(s("v^0"), Expr::Const(1.0));
    }

    #[test]
    fn reassociates_constant_products() {
        assert_eq!(s("2*(3*x)"), parse("6*x").unwrap());
        assert_eq!(s("(2*x)*3"), parse("6*x").unwrap());
        assert_eq!(s("x * 4"), parse("4*x").unwrap());
    }

    #[test]
    fn folds_constants_but_keeps_errors() {
        assert_eq!(s("2^3 - sin(0)"), Expr::Const(8.0));
        assert_eq!(s("-(-(y))"), parse("y").unwrap());
        // Errors must still surface at evaluation time.
        assert_eq!(s("log(0)"), parse("log(0)").unwrap());
        assert_eq!(s("1/0"), parse("1/0").unwrap());
    }
}
