//! Complex functionals `Φ(y) = ∫ f(x, y, □_ε y) dx`, their Euler–Lagrange
//! residuals and the first variation.

mod bracket;
mod quadrature;

pub use bracket::{bracket_limit, bracket_samples, BracketConfig, EpsilonSchedule, LimitEstimate};
pub use quadrature::{integrate, QuadratureConfig, QuadratureRule};

use num_complex::Complex64;

use crate::curve::Curve;
use crate::error::{check_eps, param, Result};
use crate::expr::{Env, Expr, Var};
use crate::scale_ops::{
    complex_conj_operator_of, complex_scale_derivative_of, conj_scale_derivative, scale_derivative,
};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// The point `(x, y(x), □_ε y(x))` at scale `eps`.
pub fn env_along(y: &Curve, x: f64, eps: f64) -> Result<Env> {
    Ok(Env::new(x, y.eval(x)?, scale_derivative(y, x, eps)?, eps))
}

/// `Φ(y) = ∫_a^b f(x, y(x), □_ε y(x)) dx`.
pub fn functional_value(
    f: &Expr,
    y: &Curve,
    a: f64,
    b: f64,
    eps: f64,
    quad: &QuadratureConfig,
) -> Result<Complex64> {
    check_eps(eps)?;
    f.validate()?;
    y.check_covers(a - eps, b + eps)?;
    integrate(|x| f.eval(&env_along(y, x, eps)?), a, b, quad)
}

/// Euler–Lagrange operator of a Lagrangian, with its partial derivatives
/// `∂f/∂y` and `∂f/∂v` prepared once.
#[derive(Debug, Clone, PartialEq)]
pub struct EulerLagrange {
    lagrangian: Expr,
    d_y: Expr,
    d_v: Expr,
}

impl EulerLagrange {
    pub fn new(f: &Expr) -> Result<Self> {
        f.validate()?;
        Ok(EulerLagrange {
            lagrangian: f.clone(),
            d_y: f.diff(Var::Y)?,
            d_v: f.diff(Var::V)?,
        })
    }

    pub fn lagrangian(&self) -> &Expr {
        &self.lagrangian
    }

    pub fn d_y(&self) -> &Expr {
        &self.d_y
    }

    pub fn d_v(&self) -> &Expr {
        &self.d_v
    }

    /// `f_ε(x) = ∂f/∂v` evaluated along the curve.
    pub fn momentum(&self, y: &Curve, x: f64, eps: f64) -> Result<Complex64> {
        self.d_v.eval(&env_along(y, x, eps)?)
    }

    /// `∂f/∂y − □_ε(∂f/∂v)` at `x`. The outer scale derivative reads the
    /// momentum field at `x ± eps`, so `y` must cover `x ± 2eps`.
    pub fn residual_at(&self, y: &Curve, x: f64, eps: f64) -> Result<Complex64> {
        let d_y = self.d_y.eval(&env_along(y, x, eps)?)?;
        let d_mom = complex_scale_derivative_of(|s| self.momentum(y, s, eps), x, eps)?;
        Ok(d_y - d_mom)
    }

    pub fn residual_field(&self, y: &Curve, grid: &[f64], eps: f64) -> Result<ResidualField> {
        check_eps(eps)?;
        if grid.is_empty() {
            return param("empty residual grid");
        }
        let lo = grid.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = grid.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        y.check_covers(lo - 2.0 * eps, hi + 2.0 * eps)?;
        let values = grid
            .iter()
            .map(|&x| self.residual_at(y, x, eps))
            .collect::<Result<Vec<_>>>()?;
        Ok(ResidualField {
            grid: grid.to_vec(),
            values,
            eps,
        })
    }

    /// Residual fields at every scale of `schedule`.
    pub fn sweep(
        &self,
        y: &Curve,
        grid: &[f64],
        schedule: &EpsilonSchedule,
    ) -> Result<ResidualSweep> {
        let eps = schedule.values();
        let fields = eps
            .iter()
            .map(|&e| self.residual_field(y, grid, e))
            .collect::<Result<Vec<_>>>()?;
        Ok(ResidualSweep { eps, fields })
    }
}

/// `r(x) = ∂f/∂y − □_ε(∂f/∂v)` sampled on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ResidualField {
    pub grid: Vec<f64>,
    pub values: Vec<Complex64>,
    pub eps: f64,
}

impl ResidualField {
    pub fn sup_norm(&self) -> f64 {
        self.values.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

/// Residual fields of one Lagrangian across a schedule.
#[derive(Debug, Clone, PartialEq)]
pub struct ResidualSweep {
    pub eps: Vec<f64>,
    pub fields: Vec<ResidualField>,
}

impl ResidualSweep {
    pub fn grid(&self) -> &[f64] {
        &self.fields[0].grid
    }

    /// `[r(x)]_ε` at every grid point.
    pub fn pointwise_brackets(&self, cfg: &BracketConfig) -> Result<Vec<LimitEstimate>> {
        (0..self.grid().len())
            .map(|i| {
                let vals: Vec<Complex64> = self.fields.iter().map(|f| f.values[i]).collect();
                bracket_samples(&self.eps, &vals, cfg)
            })
            .collect()
    }

    /// `[max_x |r(x)|]_ε`.
    pub fn sup_norm_bracket(&self, cfg: &BracketConfig) -> Result<LimitEstimate> {
        let vals: Vec<Complex64> = self
            .fields
            .iter()
            .map(|f| Complex64::new(f.sup_norm(), 0.0))
            .collect();
        bracket_samples(&self.eps, &vals, cfg)
    }
}

pub fn el_residual(f: &Expr, y: &Curve, grid: &[f64], eps: f64) -> Result<ResidualField> {
    EulerLagrange::new(f)?.residual_field(y, grid, eps)
}

/// Pointwise `[·]_ε` of the Euler–Lagrange residual over `schedule`.
pub fn bracket_field(
    f: &Expr,
    y: &Curve,
    grid: &[f64],
    schedule: &EpsilonSchedule,
    cfg: &BracketConfig,
) -> Result<Vec<LimitEstimate>> {
    EulerLagrange::new(f)?
        .sweep(y, grid, schedule)?
        .pointwise_brackets(cfg)
}

/// Decomposition of the first variation `F_y(h)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VariationDerivative {
    /// `∫ r(x) h(x) dx`.
    pub residual_term: Complex64,
    /// `∫ □_ε(f_ε h) dx`.
    pub boundary_term: Complex64,
    /// `R = −(ε/2) ∫ [□f_ε□h − ⊟f_ε□h − □f_ε⊟h − ⊟f_ε⊟h] dx`.
    pub remainder: Complex64,
    /// `residual_term + boundary_term + i·remainder`.
    pub value: Complex64,
}

/// First variation of `Φ` at `y` in direction `h`.
///
/// `⊟` acts on the complex momentum field as the operator
/// `½(Δ⁺ + Δ⁻) + i·½(Δ⁺ − Δ⁻)`, which keeps the Leibniz rule exact, so `value`
/// equals `∫ (∂f/∂y·h + ∂f/∂v·□_ε h) dx` up to rounding.
pub fn variation_derivative(
    f: &Expr,
    y: &Curve,
    h: &Curve,
    a: f64,
    b: f64,
    eps: f64,
    quad: &QuadratureConfig,
) -> Result<VariationDerivative> {
    check_eps(eps)?;
    let el = EulerLagrange::new(f)?;
    y.check_covers(a - 2.0 * eps, b + 2.0 * eps)?;
    h.check_covers(a - eps, b + eps)?;
    let mom = |s: f64| el.momentum(y, s, eps);

    let residual_term = integrate(|x| Ok(el.residual_at(y, x, eps)? * h.eval(x)?), a, b, quad)?;
    let boundary_term = integrate(
        |x| complex_scale_derivative_of(|s| Ok(mom(s)? * h.eval(s)?), x, eps),
        a,
        b,
        quad,
    )?;
    let bracket = integrate(
        |x| {
            let bf = complex_scale_derivative_of(mom, x, eps)?;
            let cf = complex_conj_operator_of(mom, x, eps)?;
            let bh = scale_derivative(h, x, eps)?;
            let ch = conj_scale_derivative(h, x, eps)?;
            Ok(bf * bh - cf * bh - bf * ch - cf * ch)
        },
        a,
        b,
        quad,
    )?;
    let remainder = -(0.5 * eps) * bracket;
    Ok(VariationDerivative {
        residual_term,
        boundary_term,
        remainder,
        value: residual_term + boundary_term + I * remainder,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Extremality {
    Extremal,
    NotExtremal,
    /// Some bracket did not converge along the schedule.
    Inconclusive,
}

impl Extremality {
    pub fn classify(brackets: &[LimitEstimate]) -> Self {
        if brackets.iter().any(|b| !b.converged) {
            Extremality::Inconclusive
        } else if brackets.iter().all(|b| b.is_zero) {
            Extremality::Extremal
        } else {
            Extremality::NotExtremal
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExtremalReport {
    pub verdict: Extremality,
    pub grid: Vec<f64>,
    pub brackets: Vec<LimitEstimate>,
}

/// A curve is an extremal exactly when the bracketed Euler–Lagrange residual
/// vanishes at every grid point.
pub fn is_extremal(
    f: &Expr,
    y: &Curve,
    grid: &[f64],
    schedule: &EpsilonSchedule,
    cfg: &BracketConfig,
) -> Result<ExtremalReport> {
    let brackets = bracket_field(f, y, grid, schedule, cfg)?;
    Ok(ExtremalReport {
        verdict: Extremality::classify(&brackets),
        grid: grid.to_vec(),
        brackets,
    })
}

/// `n` equally spaced points covering `[a, b]` inclusive.
pub fn uniform_grid(a: f64, b: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![0.5 * (a + b)],
        _ => (0..n)
            .map(|i| a + (b - a) * i as f64 / (n - 1) as f64)
            .collect(),
    }
}
