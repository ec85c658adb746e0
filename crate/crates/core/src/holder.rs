//! Hölder-class estimation and admissibility of variations.
//!
//! A curve is Hölder with exponent `α` when every pair of points at distance
//! at most `ε` differs by no more than `c·εᵅ`. That quantifier ranges over all
//! pairs, so the estimators here probe random pairs instead: at each scale `ε`
//! the modulus of continuity `ω(ε)` is the largest increment seen over the
//! probes, and `α` is the slope of `ln ω` against `ln ε`.
//!
//! Probes are stratified: each pass drops one jittered probe into every window
//! of width `ε`, so narrow features such as a cusp are never skipped. Jitter
//! comes from a ChaCha stream seeded by the caller and keyed by the bit
//! pattern of `ε`, so results are reproducible and raising the probe density
//! only ever adds probes.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::curve::Curve;
use crate::error::{check_eps, param, Result};

/// Upper bound on the number of probes at a single scale.
const MAX_PROBES: usize = 4_000_000;

/// Allowed shortfall of the estimated exponent when checking admissibility.
pub const ESTIMATION_SLACK: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ProbeConfig {
    /// Probes per window of width `ε`. Each pass places one jittered probe
    /// in every window, so the probe count at scale `ε` is about
    /// `per_window · (domain length) / ε`.
    pub per_window: usize,
    pub seed: u64,
}

impl Default for ProbeConfig {
    fn default() -> Self {
        ProbeConfig {
            per_window: 2,
            seed: 0x5ca1e,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HolderEstimate {
    pub alpha_hat: f64,
    pub c_hat: f64,
    pub regression_r2: f64,
    pub scales_used: usize,
    /// Set when the curve showed no increments at all (constant curve).
    pub degenerate: bool,
}

/// Largest increment `|f(x) − f(x′)|` over probed pairs with `|x − x′| ≤ eps`.
pub fn modulus_of_continuity(f: &Curve, eps: f64, probes: &ProbeConfig) -> Result<f64> {
    check_eps(eps)?;
    if probes.per_window == 0 {
        return param("probe density must be at least one per window");
    }
    let (lo, hi) = f.domain();
    let span = hi - lo - eps;
    if span < 0.0 {
        return param(format!(
            "eps = {eps} exceeds the curve domain length {}",
            hi - lo
        ));
    }
    let windows = ((span / eps).ceil() as usize).clamp(1, MAX_PROBES);
    let width = span / windows as f64;
    let passes = probes.per_window.min((MAX_PROBES / windows).max(1));
    let mut rng = ChaCha8Rng::seed_from_u64(probes.seed);
    rng.set_stream(eps.to_bits());
    let mut best = 0.0_f64;
    for _ in 0..passes {
        for j in 0..windows {
            let x = lo + width * (j as f64 + rng.gen::<f64>());
            let a = f.eval(x)?;
            let m = f.eval(x + 0.5 * eps)?;
            let b = f.eval(x + eps)?;
            best = best
                .max((a - m).abs())
                .max((m - b).abs())
                .max((a - b).abs());
        }
    }
    Ok(best)
}

/// Lower bound on the Hölder constant for exponent `alpha`: the largest
/// `ω(ε)/εᵅ` over `eps_set`.
pub fn holder_constant(
    f: &Curve,
    alpha: f64,
    eps_set: &[f64],
    probes: &ProbeConfig,
) -> Result<f64> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return param(format!("alpha must lie in (0, 1], got {alpha}"));
    }
    if eps_set.is_empty() {
        return param("empty eps set");
    }
    let mut c = 0.0_f64;
    for &eps in eps_set {
        c = c.max(modulus_of_continuity(f, eps, probes)? / eps.powf(alpha));
    }
    Ok(c)
}

/// Least-squares fit of `ln ω(ε) = α ln ε + ln c` over a decreasing schedule.
pub fn estimate_exponent(
    f: &Curve,
    schedule: &[f64],
    probes: &ProbeConfig,
) -> Result<HolderEstimate> {
    if schedule.len() < 3 {
        return param("exponent estimation needs at least three scales");
    }
    if schedule.windows(2).any(|w| w[1] >= w[0]) {
        return param("scale schedule must be strictly decreasing");
    }
    let mut pts = Vec::with_capacity(schedule.len());
    for &eps in schedule {
        let w = modulus_of_continuity(f, eps, probes)?;
        if w > 0.0 {
            pts.push((eps.ln(), w.ln()));
        }
    }
    if pts.len() < 3 {
        return Ok(HolderEstimate {
            alpha_hat: 1.0,
            c_hat: f64::MIN_POSITIVE,
            regression_r2: 0.0,
            scales_used: pts.len(),
            degenerate: true,
        });
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = pts.iter().map(|p| (p.1 - my).powi(2)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = pts
        .iter()
        .map(|p| (p.1 - intercept - slope * p.0).powi(2))
        .sum();
    let r2 = if syy > 0.0 { 1.0 - ss_res / syy } else { 1.0 };
    Ok(HolderEstimate {
        alpha_hat: slope.clamp(1e-6, 1.0),
        c_hat: intercept.exp().max(f64::MIN_POSITIVE),
        regression_r2: r2.clamp(0.0, 1.0),
        scales_used: pts.len(),
        degenerate: false,
    })
}

/// Smallest exponent `β` a variation may have so that `y + h` stays in the
/// Hölder class of `y`: `α` on `[1/2, 1)`, `1 − α` on `(0, 1/2)`.
pub fn min_variation_exponent(alpha: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return param(format!("alpha must lie in (0, 1), got {alpha}"));
    }
    Ok(if alpha >= 0.5 { alpha } else { 1.0 - alpha })
}

/// Dyadic schedule of ten scales starting at a hundredth of the domain.
///
/// Coarser scales are dominated by the low-frequency content of the curve and
/// pull the fitted slope towards 1.
pub fn default_schedule(f: &Curve) -> Vec<f64> {
    let (lo, hi) = f.domain();
    let eps0 = (hi - lo) / 100.0;
    (0..10).map(|k| eps0 * 0.5f64.powi(k)).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct Admissibility {
    pub admissible: bool,
    pub value_at_a: Option<f64>,
    pub value_at_b: Option<f64>,
    pub beta_min: Option<f64>,
    pub estimate: Option<HolderEstimate>,
    /// One entry per failed condition.
    pub failures: Vec<String>,
}

/// Checks that `h` vanishes at both ends (within `tol`) and is at least as
/// regular as a variation of a curve with exponent `alpha` must be.
pub fn is_admissible_variation(h: &Curve, alpha: f64, a: f64, b: f64, tol: f64) -> Admissibility {
    let mut failures = Vec::new();
    let mut endpoint = |x: f64, label: &str| match h.eval(x) {
        Ok(v) if v.abs() <= tol => Some(v),
        Ok(v) => {
            failures.push(format!("h({label}) = {v:e} exceeds tolerance {tol:e}"));
            Some(v)
        }
        Err(e) => {
            failures.push(format!("h({label}) not evaluable: {e}"));
            None
        }
    };
    let value_at_a = endpoint(a, "a");
    let value_at_b = endpoint(b, "b");

    let beta_min = match min_variation_exponent(alpha) {
        Ok(beta) => Some(beta),
        Err(e) => {
            failures.push(e.to_string());
            None
        }
    };
    let estimate = match estimate_exponent(h, &default_schedule(h), &ProbeConfig::default()) {
        Ok(est) => Some(est),
        Err(e) => {
            failures.push(format!("exponent estimation failed: {e}"));
            None
        }
    };
    if let (Some(beta), Some(est)) = (beta_min, estimate) {
        if est.alpha_hat < beta - ESTIMATION_SLACK {
            failures.push(format!(
                "estimated exponent {:.3} below required {beta:.3}",
                est.alpha_hat
            ));
        }
    }
    Admissibility {
        admissible: failures.is_empty(),
        value_at_a,
        value_at_b,
        beta_min,
        estimate,
        failures,
    }
}
