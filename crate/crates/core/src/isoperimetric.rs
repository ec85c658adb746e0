//! Isoperimetric problems: extremize `Φ(y) = ∫ f` subject to `G(y) = ∫ g = K`
//! with fixed boundary values.
//!
//! A candidate `y` that is not an extremal of `G` is a constrained extremal
//! when some real `λ` makes it an extremal of `L = f − λg`. The verifier
//! estimates `λ` by least squares over the bracketed residual fields, builds
//! `L` symbolically and checks that its bracketed residual vanishes.

use num_complex::Complex64;

use crate::curve::Curve;
use crate::error::{param, Error, Result};
use crate::expr::Expr;
use crate::variational::{
    bracket_samples, functional_value, uniform_grid, BracketConfig, EpsilonSchedule, EulerLagrange,
    Extremality, LimitEstimate, QuadratureConfig, ResidualSweep,
};

/// Default number of residual grid points.
pub const DEFAULT_GRID_POINTS: usize = 21;

/// Default tolerance on `|y(a) − a0|` and `|y(b) − b0|`.
pub const DEFAULT_BOUNDARY_TOL: f64 = 1e-9;

/// Step of the central differences in `bracketed_partials`.
pub const PROBE_STEP: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq)]
pub struct IsoProblem {
    f: Expr,
    g: Expr,
    a: f64,
    b: f64,
    a0: f64,
    b0: f64,
    k: Complex64,
    schedule: EpsilonSchedule,
    quad: QuadratureConfig,
    bracket: BracketConfig,
    grid: Vec<f64>,
    boundary_tol: f64,
}

impl IsoProblem {
    /// A problem with default numerics and a uniform grid of
    /// [`DEFAULT_GRID_POINTS`] points covering `[a, b]`.
    pub fn new(
        f: Expr,
        g: Expr,
        (a, b): (f64, f64),
        (a0, b0): (f64, f64),
        k: Complex64,
    ) -> Result<Self> {
        if !(a.is_finite() && b.is_finite() && a < b) {
            return param(format!("invalid interval [{a}, {b}]"));
        }
        if !(a0.is_finite() && b0.is_finite()) {
            return param("boundary values must be finite");
        }
        if !(k.re.is_finite() && k.im.is_finite()) {
            return param("constraint value K must be finite");
        }
        f.validate()?;
        g.validate()?;
        Ok(IsoProblem {
            f,
            g,
            a,
            b,
            a0,
            b0,
            k,
            schedule: EpsilonSchedule::default(),
            quad: QuadratureConfig::default(),
            bracket: BracketConfig::default(),
            grid: uniform_grid(a, b, DEFAULT_GRID_POINTS),
            boundary_tol: DEFAULT_BOUNDARY_TOL,
        })
    }

    pub fn with_schedule(mut self, schedule: EpsilonSchedule) -> Self {
        self.schedule = schedule;
        self
    }

    pub fn with_quadrature(mut self, quad: QuadratureConfig) -> Self {
        self.quad = quad;
        self
    }

    pub fn with_bracket(mut self, bracket: BracketConfig) -> Self {
        self.bracket = bracket;
        self
    }

    /// Grid points must lie in `[a, b]`; endpoints are allowed.
    pub fn with_grid(mut self, grid: Vec<f64>) -> Result<Self> {
        if grid.is_empty() {
            return param("residual grid is empty");
        }
        if let Some(x) = grid.iter().find(|x| !(**x >= self.a && **x <= self.b)) {
            return param(format!("grid point {x} outside [{}, {}]", self.a, self.b));
        }
        self.grid = grid;
        Ok(self)
    }

    pub fn with_boundary_tol(mut self, tol: f64) -> Result<Self> {
        if !(tol >= 0.0 && tol.is_finite()) {
            return param(format!(
                "boundary tolerance must be non-negative, got {tol}"
            ));
        }
        self.boundary_tol = tol;
        Ok(self)
    }

    /// Same problem with constraint `c·g = c·K`.
    pub fn scaled_constraint(&self, c: f64) -> Result<Self> {
        if !(c.is_finite() && c != 0.0) {
            return param(format!(
                "constraint scale must be finite and non-zero, got {c}"
            ));
        }
        let mut p = self.clone();
        p.g = Expr::mul(Expr::constant(c), self.g.clone());
        p.k = self.k * c;
        Ok(p)
    }

    pub fn f(&self) -> &Expr {
        &self.f
    }

    pub fn g(&self) -> &Expr {
        &self.g
    }

    pub fn interval(&self) -> (f64, f64) {
        (self.a, self.b)
    }

    pub fn boundary(&self) -> (f64, f64) {
        (self.a0, self.b0)
    }

    pub fn k(&self) -> Complex64 {
        self.k
    }

    pub fn schedule(&self) -> &EpsilonSchedule {
        &self.schedule
    }

    pub fn quadrature(&self) -> &QuadratureConfig {
        &self.quad
    }

    pub fn bracket(&self) -> &BracketConfig {
        &self.bracket
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    fn check_boundary(&self, y: &Curve) -> Result<()> {
        for (x, want, label) in [(self.a, self.a0, "a"), (self.b, self.b0, "b")] {
            let got = y.eval(x)?;
            if (got - want).abs() > self.boundary_tol {
                return Err(Error::Precondition(format!(
                    "y({label}) = {got} but the boundary value is {want}"
                )));
            }
        }
        Ok(())
    }

    fn sweep(&self, lagrangian: &Expr, y: &Curve) -> Result<ResidualSweep> {
        EulerLagrange::new(lagrangian)?.sweep(y, &self.grid, &self.schedule)
    }
}

/// `|G(y) − K|` at the smallest scale of the schedule.
pub fn check_constraint(p: &IsoProblem, y: &Curve) -> Result<f64> {
    p.check_boundary(y)?;
    let g = functional_value(&p.g, y, p.a, p.b, p.schedule.smallest(), &p.quad)?;
    Ok((g - p.k).norm())
}

#[derive(Debug, Clone, PartialEq)]
pub struct HypothesisCheck {
    /// `y` is not an extremal of `G`.
    pub h1: bool,
    /// The sup-norm brackets of both residuals converged to finite limits.
    pub h2: bool,
    pub g_extremality: Extremality,
    pub f_sup: LimitEstimate,
    pub g_sup: LimitEstimate,
    /// Some bracket involved did not converge.
    pub inconclusive: bool,
}

fn hypotheses_from(
    f_sweep: &ResidualSweep,
    g_sweep: &ResidualSweep,
    cfg: &BracketConfig,
) -> Result<(HypothesisCheck, Vec<LimitEstimate>, Vec<LimitEstimate>)> {
    let f_points = f_sweep.pointwise_brackets(cfg)?;
    let g_points = g_sweep.pointwise_brackets(cfg)?;
    let f_sup = f_sweep.sup_norm_bracket(cfg)?;
    let g_sup = g_sweep.sup_norm_bracket(cfg)?;
    let g_extremality = Extremality::classify(&g_points);
    let finite = |l: &LimitEstimate| l.converged && l.extrapolated.norm().is_finite();
    let inconclusive = !(f_sup.converged && g_sup.converged)
        || f_points.iter().chain(&g_points).any(|l| !l.converged);
    let check = HypothesisCheck {
        h1: g_extremality == Extremality::NotExtremal,
        h2: finite(&f_sup) && finite(&g_sup),
        g_extremality,
        f_sup,
        g_sup,
        inconclusive,
    };
    Ok((check, f_points, g_points))
}

pub fn check_hypotheses(p: &IsoProblem, y: &Curve) -> Result<HypothesisCheck> {
    let f_sweep = p.sweep(&p.f, y)?;
    let g_sweep = p.sweep(&p.g, y)?;
    Ok(hypotheses_from(&f_sweep, &g_sweep, &p.bracket)?.0)
}

/// Real least-squares multiplier `argmin_λ Σ |r_f − λ r_g|²` over two
/// residual fields sampled on the same grid.
///
/// Fails with [`Error::DegenerateConstraint`] when `Σ |r_g|²` does not exceed
/// `len · zero_tol²`, i.e. when the RMS constraint residual is numerically
/// zero.
pub fn multiplier_from_fields(r_f: &[Complex64], r_g: &[Complex64], zero_tol: f64) -> Result<f64> {
    if r_f.len() != r_g.len() {
        return param("residual fields have different lengths");
    }
    if r_f.is_empty() {
        return param("residual fields are empty");
    }
    let mut num = 0.0;
    let mut den = 0.0;
    for (f, g) in r_f.iter().zip(r_g) {
        num += (f * g.conj()).re;
        den += g.norm_sqr();
    }
    if den.is_nan() || den <= r_g.len() as f64 * zero_tol * zero_tol {
        return Err(Error::DegenerateConstraint(den));
    }
    Ok(num / den)
}

fn values(points: &[LimitEstimate]) -> Vec<Complex64> {
    points.iter().map(|l| l.value).collect()
}

/// Multiplier estimated from the bracketed residual fields of `f` and `g`.
pub fn estimate_multiplier(p: &IsoProblem, y: &Curve) -> Result<f64> {
    let f_points = p.sweep(&p.f, y)?.pointwise_brackets(&p.bracket)?;
    let g_points = p.sweep(&p.g, y)?.pointwise_brackets(&p.bracket)?;
    multiplier_from_fields(&values(&f_points), &values(&g_points), p.bracket.zero_tol)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    ExtremalConfirmed,
    StationarityViolated,
    HypothesesFailed,
    Inconclusive,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::ExtremalConfirmed => "extremal_confirmed",
            Verdict::StationarityViolated => "stationarity_violated",
            Verdict::HypothesesFailed => "hypotheses_failed",
            Verdict::Inconclusive => "inconclusive",
        }
    }
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IsoReport {
    /// `None` when the hypotheses fail or a bracket is inconclusive.
    pub lambda: Option<f64>,
    /// Largest bracketed residual of `L = f − λg` over the grid, before zero
    /// snapping. `None` when `L` was not formed.
    pub residual_sup_norm_l: Option<f64>,
    pub hypothesis1_ok: bool,
    pub hypothesis2_ok: bool,
    pub constraint_gap: f64,
    pub hypotheses: HypothesisCheck,
    /// Bracketed residual of `L` per grid point.
    pub l_brackets: Vec<LimitEstimate>,
    pub verdict: Verdict,
}

/// Checks whether `y` is a constrained extremal of `p`, with `tol` bounding
/// both the constraint gap and the residual of `L`.
pub fn verify_iso_extremal(p: &IsoProblem, y: &Curve, tol: f64) -> Result<IsoReport> {
    if !(tol > 0.0 && tol.is_finite()) {
        return param(format!("tolerance must be positive, got {tol}"));
    }
    let constraint_gap = check_constraint(p, y)?;
    let f_sweep = p.sweep(&p.f, y)?;
    let g_sweep = p.sweep(&p.g, y)?;
    let (hyp, f_points, g_points) = hypotheses_from(&f_sweep, &g_sweep, &p.bracket)?;
    let mut report = IsoReport {
        lambda: None,
        residual_sup_norm_l: None,
        hypothesis1_ok: hyp.h1,
        hypothesis2_ok: hyp.h2,
        constraint_gap,
        hypotheses: hyp.clone(),
        l_brackets: Vec::new(),
        verdict: Verdict::Inconclusive,
    };
    if hyp.inconclusive {
        return Ok(report);
    }
    if !(hyp.h1 && hyp.h2) {
        report.verdict = Verdict::HypothesesFailed;
        return Ok(report);
    }
    let lambda =
        match multiplier_from_fields(&values(&f_points), &values(&g_points), p.bracket.zero_tol) {
            Ok(l) => l,
            Err(Error::DegenerateConstraint(_)) => {
                report.hypothesis1_ok = false;
                report.verdict = Verdict::HypothesesFailed;
                return Ok(report);
            }
            Err(e) => return Err(e),
        };
    let l = Expr::sub(p.f.clone(), Expr::mul(Expr::constant(lambda), p.g.clone()));
    let l_points = p.sweep(&l, y)?.pointwise_brackets(&p.bracket)?;
    let sup = l_points
        .iter()
        .map(|b| b.extrapolated.norm())
        .fold(0.0, f64::max);
    report.lambda = Some(lambda);
    report.residual_sup_norm_l = Some(sup);
    report.verdict = if l_points.iter().any(|b| !b.converged) {
        Verdict::Inconclusive
    } else if sup <= tol && constraint_gap <= tol {
        Verdict::ExtremalConfirmed
    } else {
        Verdict::StationarityViolated
    };
    report.l_brackets = l_points;
    Ok(report)
}

/// `(Φ(ŷ), G(ŷ))` at scale `eps` for `ŷ = y + e1·η₁ + e2·η₂`.
pub fn two_parameter_variation_probe(
    p: &IsoProblem,
    y: &Curve,
    (eta1, eta2): (&Curve, &Curve),
    (e1, e2): (f64, f64),
    eps: f64,
) -> Result<(Complex64, Complex64)> {
    let y_hat = Curve::linear_combination(vec![
        (1.0, y.clone()),
        (e1, eta1.clone()),
        (e2, eta2.clone()),
    ])?;
    let i_val = functional_value(&p.f, &y_hat, p.a, p.b, eps, &p.quad)?;
    let g_val = functional_value(&p.g, &y_hat, p.a, p.b, eps, &p.quad)?;
    Ok((i_val, g_val))
}

/// Bracketed first partials of the two-parameter probe at the origin.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbePartials {
    pub di_de1: LimitEstimate,
    pub di_de2: LimitEstimate,
    pub dg_de1: LimitEstimate,
    pub dg_de2: LimitEstimate,
}

impl ProbePartials {
    /// `[∂Ī/∂ε₁]·[∂Ḡ/∂ε₂] − [∂Ī/∂ε₂]·[∂Ḡ/∂ε₁]`.
    pub fn determinant(&self) -> Complex64 {
        self.di_de1.value * self.dg_de2.value - self.di_de2.value * self.dg_de1.value
    }

    pub fn converged(&self) -> bool {
        [self.di_de1, self.di_de2, self.dg_de1, self.dg_de2]
            .iter()
            .all(|l| l.converged)
    }
}

/// Central differences of the probe with step [`PROBE_STEP`] at every scale of
/// the schedule, each bracketed over the schedule.
pub fn bracketed_partials(
    p: &IsoProblem,
    y: &Curve,
    eta1: &Curve,
    eta2: &Curve,
) -> Result<ProbePartials> {
    let eps = p.schedule.values();
    let h = PROBE_STEP;
    let mut cols: [Vec<Complex64>; 4] = Default::default();
    for &e in &eps {
        let probe = |e1, e2| two_parameter_variation_probe(p, y, (eta1, eta2), (e1, e2), e);
        let (ip1, gp1) = probe(h, 0.0)?;
        let (im1, gm1) = probe(-h, 0.0)?;
        let (ip2, gp2) = probe(0.0, h)?;
        let (im2, gm2) = probe(0.0, -h)?;
        let d = 0.5 / h;
        cols[0].push((ip1 - im1) * d);
        cols[1].push((ip2 - im2) * d);
        cols[2].push((gp1 - gm1) * d);
        cols[3].push((gp2 - gm2) * d);
    }
    let b = |v: &Vec<Complex64>| bracket_samples(&eps, v, &p.bracket);
    Ok(ProbePartials {
        di_de1: b(&cols[0])?,
        di_de2: b(&cols[1])?,
        dg_de1: b(&cols[2])?,
        dg_de2: b(&cols[3])?,
    })
}
