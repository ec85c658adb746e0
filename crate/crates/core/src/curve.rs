//! Real-valued curves on a bounded domain.

use std::f64::consts::PI;

use crate::error::{param, Error, Result};
use crate::expr::{self, Expr, UnaryOp, Var};

#[derive(Debug, Clone, PartialEq)]
pub enum CurveKind {
    /// An x-only real expression.
    ClosedForm(Expr),
    /// Samples on a strictly increasing grid, linearly interpolated.
    Sampled { grid: Vec<f64>, values: Vec<f64> },
    /// Linear combination `Σ cₖ·curveₖ`, defined on the intersection of the
    /// component domains.
    Combination(Vec<(f64, Curve)>),
}

/// A real function `y: [lo, hi] → ℝ`.
///
/// Domains are checked at every evaluation, not at construction, so a single
/// curve can serve stencils of many widths.
#[derive(Debug, Clone, PartialEq)]
pub struct Curve {
    kind: CurveKind,
    lo: f64,
    hi: f64,
}

fn slack(lo: f64, hi: f64) -> f64 {
    1e-12 * (1.0 + lo.abs().max(hi.abs()))
}

impl Curve {
    pub fn closed_form(expr: Expr, lo: f64, hi: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return param(format!("invalid curve domain [{lo}, {hi}]"));
        }
        expr.validate()?;
        if !expr.is_real_in_x() {
            return param(format!(
                "curve expression {expr} must be real and depend on x only"
            ));
        }
        Ok(Curve {
            kind: CurveKind::ClosedForm(expr),
            lo,
            hi,
        })
    }

    /// Parses an x-only expression such as `abs(x)`.
    pub fn parse(text: &str, lo: f64, hi: f64) -> Result<Self> {
        Self::closed_form(expr::parse(text)?, lo, hi)
    }

    pub fn sampled(grid: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if grid.len() != values.len() {
            return param(format!(
                "sample grid has {} points but {} values",
                grid.len(),
                values.len()
            ));
        }
        if grid.len() < 2 {
            return param("a sampled curve needs at least two samples");
        }
        if grid.iter().chain(&values).any(|v| !v.is_finite()) {
            return param("sampled curve contains non-finite entries");
        }
        if let Some(w) = grid.windows(2).find(|w| w[1] <= w[0]) {
            return param(format!(
                "sample grid not strictly increasing at {} -> {}",
                w[0], w[1]
            ));
        }
        let (lo, hi) = (grid[0], grid[grid.len() - 1]);
        Ok(Curve {
            kind: CurveKind::Sampled { grid, values },
            lo,
            hi,
        })
    }

    /// Samples `f` on a uniform grid of `n` points over `[lo, hi]`.
    pub fn sample_fn(f: impl Fn(f64) -> f64, lo: f64, hi: f64, n: usize) -> Result<Self> {
        if n < 2 {
            return param("need at least two samples");
        }
        let grid: Vec<f64> = (0..n)
            .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
            .collect();
        let values = grid.iter().map(|&x| f(x)).collect();
        Self::sampled(grid, values)
    }

    pub fn linear_combination(terms: Vec<(f64, Curve)>) -> Result<Self> {
        if terms.is_empty() {
            return param("empty linear combination");
        }
        if terms.iter().any(|(c, _)| !c.is_finite()) {
            return param("non-finite combination coefficient");
        }
        let lo = terms
            .iter()
            .map(|(_, c)| c.lo)
            .fold(f64::NEG_INFINITY, f64::max);
        let hi = terms
            .iter()
            .map(|(_, c)| c.hi)
            .fold(f64::INFINITY, f64::min);
        if lo >= hi {
            return param("component domains do not overlap");
        }
        Ok(Curve {
            kind: CurveKind::Combination(terms),
            lo,
            hi,
        })
    }

    /// `Σ_{n<terms} aⁿ cos(bⁿ π x)`, Hölder with exponent `-ln a / ln b` when
    /// `0 < a < 1 < b` and `ab ≥ 1`.
    pub fn weierstrass(a: f64, b: f64, terms: u32, lo: f64, hi: f64) -> Result<Self> {
        if !(0.0 < a && a < 1.0 && b > 1.0) || terms == 0 {
            return param(format!(
                "invalid Weierstrass parameters a={a}, b={b}, terms={terms}"
            ));
        }
        let expr = (0..terms)
            .map(|n| {
                Expr::mul(
                    Expr::Const(a.powi(n as i32)),
                    Expr::unary(
                        UnaryOp::Cos,
                        Expr::mul(Expr::Const(b.powi(n as i32) * PI), Expr::Var(Var::X)),
                    ),
                )
            })
            .reduce(Expr::add)
            .expect("terms > 0");
        Self::closed_form(expr, lo, hi)
    }

    pub fn kind(&self) -> &CurveKind {
        &self.kind
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.lo, self.hi)
    }

    pub fn contains(&self, x: f64) -> bool {
        let s = slack(self.lo, self.hi);
        x >= self.lo - s && x <= self.hi + s
    }

    /// Errors unless `[lo, hi]` lies inside the domain.
    pub fn check_covers(&self, lo: f64, hi: f64) -> Result<()> {
        for p in [lo, hi] {
            if !self.contains(p) {
                return Err(self.domain_error(p));
            }
        }
        Ok(())
    }

    fn domain_error(&self, point: f64) -> Error {
        Error::Domain {
            point,
            lo: self.lo,
            hi: self.hi,
        }
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        if !self.contains(x) {
            return Err(self.domain_error(x));
        }
        match &self.kind {
            CurveKind::ClosedForm(e) => e.eval_real(x),
            CurveKind::Sampled { grid, values } => Ok(interpolate(grid, values, x)),
            CurveKind::Combination(terms) => {
                let mut acc = 0.0;
                for (c, curve) in terms {
                    acc += c * curve.eval(x)?;
                }
                Ok(acc)
            }
        }
    }
}

fn interpolate(grid: &[f64], values: &[f64], x: f64) -> f64 {
    let i = grid.partition_point(|&g| g <= x);
    if i == 0 {
        return values[0];
    }
    if i == grid.len() {
        return values[i - 1];
    }
    let (x0, x1) = (grid[i - 1], grid[i]);
    let t = (x - x0) / (x1 - x0);
    values[i - 1] + t * (values[i] - values[i - 1])
}

/// A complex curve `re + i·im`; both parts share one domain.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexCurve {
    pub re: Curve,
    pub im: Curve,
}

impl ComplexCurve {
    pub fn new(re: Curve, im: Curve) -> Result<Self> {
        if re.domain() != im.domain() {
            return param(format!(
                "real part domain {:?} differs from imaginary part domain {:?}",
                re.domain(),
                im.domain()
            ));
        }
        Ok(ComplexCurve { re, im })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_form_rejects_lagrangian_slots() {
        assert!(Curve::parse("x + y", -1.0, 1.0).is_err());
        assert!(Curve::parse("v", -1.0, 1.0).is_err());
        assert!(Curve::parse("x^2", 1.0, -1.0).is_err());
    }

    #[test]
    fn domain_violation() {
        let c = Curve::parse("x^2", -1.0, 1.0).unwrap();
        assert!(matches!(c.eval(1.5), Err(Error::Domain { .. })));
        // Rounding at the edge is tolerated.
        assert!(c.eval(0.9 + 0.1).is_ok());
    }

    #[test]
    fn sampled_interpolation() {
        let c = Curve::sampled(vec![0.0, 1.0, 3.0], vec![0.0, 2.0, 0.0]).unwrap();
        assert_eq!(c.eval(1.0).unwrap(), 2.0);
        assert_eq!(c.eval(0.5).unwrap(), 1.0);
        assert_eq!(c.eval(2.0).unwrap(), 1.0);
        assert_eq!(c.eval(3.0).unwrap(), 0.0);
        assert!(c.eval(3.5).is_err());
    }

    #[test]
    fn sampled_validation() {
        assert!(Curve::sampled(vec![0.0, 0.0], vec![1.0, 1.0]).is_err());
        assert!(Curve::sampled(vec![0.0, 1.0], vec![1.0]).is_err());
        assert!(Curve::sampled(vec![0.0, f64::NAN], vec![1.0, 2.0]).is_err());
    }

    #[test]
    fn combination_domain_is_intersection() {
        let a = Curve::parse("x", -2.0, 1.0).unwrap();
        let b = Curve::parse("x^2", -1.0, 2.0).unwrap();
        let c = Curve::linear_combination(vec![(1.0, a), (0.5, b)]).unwrap();
        assert_eq!(c.domain(), (-1.0, 1.0));
        assert_eq!(c.eval(0.5).unwrap(), 0.5 + 0.125);
    }

    #[test]
    fn weierstrass_at_origin() {
        let w = Curve::weierstrass(0.5, 3.0, 21, 0.0, 1.0).unwrap();
        let expected: f64 = (0..21).map(|n| 0.5f64.powi(n)).sum();
        assert!((w.eval(0.0).unwrap() - expected).abs() < 1e-12);
    }
}
