//! Quantum (ε-left/right) derivatives and the complex scale derivative.
//!
//! For a real function `f` and `ε > 0`:
//!
//! ```text
//! Δ⁺f(x) = (f(x+ε) − f(x)) / ε
//! Δ⁻f(x) = −(f(x−ε) − f(x)) / ε
//! □f(x)  = ½(Δ⁺ + Δ⁻) − i·½(Δ⁺ − Δ⁻)
//! ```
//!
//! The formula for `□` is ℂ-linear, so applying it to complex difference
//! quotients gives `□Re f + i·□Im f` directly.

use num_complex::Complex64;

use crate::curve::{ComplexCurve, Curve};
use crate::error::{check_eps, Result};

/// Complex value produced by scale derivatives.
pub type ComplexScalar = Complex64;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

fn combine_real(dp: f64, dm: f64) -> Complex64 {
    Complex64::new(0.5 * (dp + dm), -0.5 * (dp - dm))
}

fn combine(dp: Complex64, dm: Complex64) -> Complex64 {
    0.5 * (dp + dm) - I * (0.5 * (dp - dm))
}

fn combine_conj(dp: Complex64, dm: Complex64) -> Complex64 {
    0.5 * (dp + dm) + I * (0.5 * (dp - dm))
}

/// `□_ε` of a real function given pointwise.
pub fn scale_derivative_of<F>(f: F, x: f64, eps: f64) -> Result<Complex64>
where
    F: Fn(f64) -> Result<f64>,
{
    check_eps(eps)?;
    let f0 = f(x)?;
    let dp = (f(x + eps)? - f0) / eps;
    let dm = -(f(x - eps)? - f0) / eps;
    Ok(combine_real(dp, dm))
}

fn complex_deltas<F>(f: &F, x: f64, eps: f64) -> Result<(Complex64, Complex64)>
where
    F: Fn(f64) -> Result<Complex64>,
{
    check_eps(eps)?;
    let f0 = f(x)?;
    let dp = (f(x + eps)? - f0) / eps;
    let dm = -(f(x - eps)? - f0) / eps;
    Ok((dp, dm))
}

/// `□_ε` of a complex field given pointwise.
pub fn complex_scale_derivative_of<F>(f: F, x: f64, eps: f64) -> Result<Complex64>
where
    F: Fn(f64) -> Result<Complex64>,
{
    let (dp, dm) = complex_deltas(&f, x, eps)?;
    Ok(combine(dp, dm))
}

/// The conjugate operator `⊟_ε = ½(Δ⁺ + Δ⁻) + i·½(Δ⁺ − Δ⁻)` applied to a
/// complex field. On real fields this is the complex conjugate of `□_ε`.
pub fn complex_conj_operator_of<F>(f: F, x: f64, eps: f64) -> Result<Complex64>
where
    F: Fn(f64) -> Result<Complex64>,
{
    let (dp, dm) = complex_deltas(&f, x, eps)?;
    Ok(combine_conj(dp, dm))
}

pub fn delta_plus(f: &Curve, x: f64, eps: f64) -> Result<f64> {
    check_eps(eps)?;
    Ok((f.eval(x + eps)? - f.eval(x)?) / eps)
}

pub fn delta_minus(f: &Curve, x: f64, eps: f64) -> Result<f64> {
    check_eps(eps)?;
    Ok(-(f.eval(x - eps)? - f.eval(x)?) / eps)
}

pub fn scale_derivative(f: &Curve, x: f64, eps: f64) -> Result<Complex64> {
    scale_derivative_of(|s| f.eval(s), x, eps)
}

/// `□_ε Re f + i·□_ε Im f`.
pub fn scale_derivative_complex(f: &ComplexCurve, x: f64, eps: f64) -> Result<Complex64> {
    Ok(scale_derivative(&f.re, x, eps)? + I * scale_derivative(&f.im, x, eps)?)
}

/// `⊟_ε f(x)`, the complex conjugate of `□_ε f(x)`.
pub fn conj_scale_derivative(f: &Curve, x: f64, eps: f64) -> Result<Complex64> {
    Ok(scale_derivative(f, x, eps)?.conj())
}

/// `□_ε(f·g)` minus the right-hand side of the quantum Leibniz rule
///
/// ```text
/// □f·g + f·□g + i(ε/2)(□f□g − ⊟f□g − □f⊟g − ⊟f⊟g).
/// ```
///
/// The rule is an exact algebraic identity, so the result is rounding noise.
/// Requires `[x − 2ε, x + 2ε]` inside both domains.
pub fn leibniz_defect(f: &Curve, g: &Curve, x: f64, eps: f64) -> Result<Complex64> {
    check_eps(eps)?;
    f.check_covers(x - 2.0 * eps, x + 2.0 * eps)?;
    g.check_covers(x - 2.0 * eps, x + 2.0 * eps)?;
    let lhs = scale_derivative_of(|s| Ok(f.eval(s)? * g.eval(s)?), x, eps)?;
    let (fx, gx) = (f.eval(x)?, g.eval(x)?);
    let bf = scale_derivative(f, x, eps)?;
    let bg = scale_derivative(g, x, eps)?;
    let (cf, cg) = (bf.conj(), bg.conj());
    let rhs = bf * gx + fx * bg + I * (0.5 * eps) * (bf * bg - cf * bg - bf * cg - cf * cg);
    Ok(lhs - rhs)
}

pub fn scale_derivative_field(f: &Curve, grid: &[f64], eps: f64) -> Result<Vec<Complex64>> {
    check_eps(eps)?;
    grid.iter().map(|&x| scale_derivative(f, x, eps)).collect()
}
