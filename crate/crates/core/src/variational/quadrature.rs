use num_complex::Complex64;

use crate::error::{param, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum QuadratureRule {
    #[default]
    CompositeSimpson,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QuadratureConfig {
    pub rule: QuadratureRule,
    pub n_panels: usize,
}

impl QuadratureConfig {
    pub fn simpson(n_panels: usize) -> Result<Self> {
        if n_panels < 2 || !n_panels.is_multiple_of(2) {
            return param(format!(
                "n_panels must be even and at least 2, got {n_panels}"
            ));
        }
        Ok(QuadratureConfig {
            rule: QuadratureRule::CompositeSimpson,
            n_panels,
        })
    }
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        QuadratureConfig {
            rule: QuadratureRule::CompositeSimpson,
            n_panels: 256,
        }
    }
}

fn simpson<F>(f: &mut F, a: f64, b: f64, n: usize) -> Result<Complex64>
where
    F: FnMut(f64) -> Result<Complex64>,
{
    let h = (b - a) / n as f64;
    let mut acc = f(a)? + f(b)?;
    for k in 1..n {
        let w = if k % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * f(a + h * k as f64)?;
    }
    Ok(acc * (h / 3.0))
}

/// Integrates a complex integrand over `[a, b]`.
///
/// When `0 ∈ (a, b)` the interval is split there so that a node sits on the
/// origin, where integrands built from `|x|` have their kink. Panels are
/// shared between the two halves in proportion to their lengths. Summation
/// order is fixed, so results are reproducible bit for bit.
pub fn integrate<F>(mut f: F, a: f64, b: f64, cfg: &QuadratureConfig) -> Result<Complex64>
where
    F: FnMut(f64) -> Result<Complex64>,
{
    if !(a.is_finite() && b.is_finite() && a < b) {
        return param(format!("invalid integration interval [{a}, {b}]"));
    }
    let n = cfg.n_panels;
    if n < 2 || !n.is_multiple_of(2) {
        return param(format!("n_panels must be even and at least 2, got {n}"));
    }
    match cfg.rule {
        QuadratureRule::CompositeSimpson => {
            if a < 0.0 && 0.0 < b && n >= 4 {
                let half = n / 2;
                let left = ((half as f64 * (-a) / (b - a)).round() as usize).clamp(1, half - 1);
                let right = half - left;
                Ok(simpson(&mut f, a, 0.0, 2 * left)? + simpson(&mut f, 0.0, b, 2 * right)?)
            } else {
                simpson(&mut f, a, b, n)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn real(f: impl Fn(f64) -> f64) -> impl FnMut(f64) -> Result<Complex64> {
        move |x| Ok(Complex64::new(f(x), 0.0))
    }

    #[test]
    fn exact_on_cubics() {
        let cfg = QuadratureConfig::simpson(4).unwrap();
        let v = integrate(real(|x| x * x * x - 2.0 * x + 1.0), 0.5, 2.0, &cfg).unwrap();
        let exact = (2f64.powi(4) - 0.5f64.powi(4)) / 4.0 - (4.0 - 0.25) + 1.5;
        assert!((v.re - exact).abs() < 1e-14);
    }

    #[test]
    fn kink_at_origin_is_a_node() {
        let cfg = QuadratureConfig::simpson(6).unwrap();
        let v = integrate(real(|x: f64| x.abs()), -1.0, 2.0, &cfg).unwrap();
        assert!((v.re - 2.5).abs() < 1e-14);
    }

    #[test]
    fn complex_integrand() {
        let cfg = QuadratureConfig::default();
        let v = integrate(|x| Ok(Complex64::new(x.cos(), x.sin())), 0.0, 1.0, &cfg).unwrap();
        let exact = Complex64::new(1f64.sin(), 1.0 - 1f64.cos());
        assert!((v - exact).norm() < 1e-10);
    }

    #[test]
    fn rejects_bad_config() {
        assert!(QuadratureConfig::simpson(3).is_err());
        assert!(QuadratureConfig::simpson(0).is_err());
        let cfg = QuadratureConfig::default();
        assert!(integrate(real(|x| x), 1.0, 1.0, &cfg).is_err());
    }
}
