//! The `[·]_ε` filter: replace an ε-family by its limit as ε → 0, and by
//! exactly zero when that limit vanishes.
//!
//! The limit is estimated by Richardson extrapolation on a geometric
//! schedule: the quadratic through the three smallest scales is evaluated at
//! ε = 0. This is exact for samplers that are polynomial of degree ≤ 2 in ε,
//! which covers products of affine families. Convergence is judged by
//! comparing against the extrapolant from the window one step coarser.

use num_complex::Complex64;

use crate::error::{param, Error, Result};

/// Geometric scale sequence `eps0 · ratioᵏ`, `k = 0..count`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpsilonSchedule {
    eps0: f64,
    ratio: f64,
    count: usize,
}

impl EpsilonSchedule {
    pub fn new(eps0: f64, ratio: f64, count: usize) -> Result<Self> {
        if !(eps0.is_finite() && eps0 > 0.0) {
            return param(format!("eps0 must be positive, got {eps0}"));
        }
        if !(ratio > 0.0 && ratio < 1.0) {
            return param(format!("ratio must lie in (0, 1), got {ratio}"));
        }
        if count < 3 {
            return param(format!("schedule needs at least 3 scales, got {count}"));
        }
        Ok(EpsilonSchedule { eps0, ratio, count })
    }

    pub fn eps0(&self) -> f64 {
        self.eps0
    }

    pub fn ratio(&self) -> f64 {
        self.ratio
    }

    pub fn count(&self) -> usize {
        self.count
    }

    pub fn values(&self) -> Vec<f64> {
        (0..self.count)
            .map(|k| self.eps0 * self.ratio.powi(k as i32))
            .collect()
    }

    pub fn smallest(&self) -> f64 {
        self.eps0 * self.ratio.powi(self.count as i32 - 1)
    }
}

impl Default for EpsilonSchedule {
    fn default() -> Self {
        EpsilonSchedule {
            eps0: 0.1,
            ratio: 0.5,
            count: 8,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BracketConfig {
    /// Extrapolated limits with modulus at or below this are snapped to zero.
    pub zero_tol: f64,
    /// Maximum allowed gap between successive extrapolants.
    pub conv_tol: f64,
}

impl BracketConfig {
    pub fn new(zero_tol: f64, conv_tol: f64) -> Result<Self> {
        if !(zero_tol > 0.0 && conv_tol > 0.0) {
            return param("zero_tol and conv_tol must be positive");
        }
        Ok(BracketConfig { zero_tol, conv_tol })
    }
}

impl Default for BracketConfig {
    fn default() -> Self {
        BracketConfig {
            zero_tol: 1e-6,
            conv_tol: 1e-6,
        }
    }
}

/// Result of applying `[·]_ε` to one family.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LimitEstimate {
    /// `[a(ε)]_ε`: the extrapolated limit, or exactly zero when `is_zero`.
    pub value: Complex64,
    /// The extrapolated limit before zero snapping.
    pub extrapolated: Complex64,
    pub converged: bool,
    pub tail_residual: f64,
    pub is_zero: bool,
}

/// Polynomial extrapolation to ε = 0 through the given points (Lagrange
/// form).
fn extrapolate(eps: &[f64], vals: &[Complex64]) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for j in 0..eps.len() {
        let mut w = 1.0;
        for m in 0..eps.len() {
            if m != j {
                w *= eps[m] / (eps[m] - eps[j]);
            }
        }
        acc += w * vals[j];
    }
    acc
}

/// Brackets precomputed samples `vals[k] = a(eps[k])` on a decreasing
/// schedule of at least three scales.
pub fn bracket_samples(
    eps: &[f64],
    vals: &[Complex64],
    cfg: &BracketConfig,
) -> Result<LimitEstimate> {
    if eps.len() != vals.len() {
        return param("scale and sample counts differ");
    }
    let n = eps.len();
    if n < 3 {
        return param("bracketing needs at least three scales");
    }
    let last = extrapolate(&eps[n - 3..], &vals[n - 3..]);
    let prev = if n >= 4 {
        extrapolate(&eps[n - 4..n - 1], &vals[n - 4..n - 1])
    } else {
        extrapolate(&eps[n - 2..], &vals[n - 2..])
    };
    let tail_residual = (last - prev).norm();
    let finite = last.re.is_finite() && last.im.is_finite() && tail_residual.is_finite();
    let converged = finite && tail_residual <= cfg.conv_tol;
    let is_zero = finite && last.norm() <= cfg.zero_tol;
    Ok(LimitEstimate {
        value: if is_zero {
            Complex64::new(0.0, 0.0)
        } else {
            last
        },
        extrapolated: last,
        converged,
        tail_residual: if tail_residual.is_finite() {
            tail_residual
        } else {
            f64::MAX
        },
        is_zero,
    })
}

/// `[sampler(ε)]_ε` over `schedule`.
pub fn bracket_limit<F>(
    mut sampler: F,
    schedule: &EpsilonSchedule,
    cfg: &BracketConfig,
) -> Result<LimitEstimate>
where
    F: FnMut(f64) -> Result<Complex64>,
{
    let eps = schedule.values();
    let vals = eps
        .iter()
        .map(|&e| sampler(e))
        .collect::<Result<Vec<_>>>()?;
    if vals.iter().any(|v| !(v.re.is_finite() && v.im.is_finite())) {
        return Err(Error::Eval("sampler returned a non-finite value".into()));
    }
    bracket_samples(&eps, &vals, cfg)
}
