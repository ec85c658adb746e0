//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits with a
//! non-zero status if any criterion fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use scale_calculus::holder::{
    default_schedule, estimate_exponent, is_admissible_variation, ProbeConfig,
};
use scale_calculus::isoperimetric::bracketed_partials;
use scale_calculus::variational::{bracket_samples, uniform_grid, EulerLagrange};
use scale_calculus::{
    bracket_field, el_residual, estimate_multiplier, functional_value, leibniz_defect, parse,
    scale_derivative, verify_iso_extremal, BracketConfig, Curve, EpsilonSchedule, Expr, IsoProblem,
    QuadratureConfig, Result, Verdict,
};

const SEED: u64 = 20_240_917;

const TOL_ABS_FORMULA: f64 = 1e-12;
const TOL_EXTREMAL_SUP: f64 = 1e-9;
const TOL_CONSTRAINT_BRACKET: f64 = 1e-4;
const TOL_CONSTRAINT_VALUE: f64 = 1e-6;
const TOL_LAMBDA_ZERO: f64 = 1e-6;
const TOL_LEIBNIZ: f64 = 1e-10;
const TOL_PRODUCT_LEMMA: f64 = 1e-8;
const TOL_CLASSICAL: f64 = 1e-5;
const TOL_PROPORTIONAL: f64 = 1e-8;
const SCAN_STEP: f64 = 1e-4;
const TOL_SCAN: f64 = SCAN_STEP;
const TOL_HOLDER: f64 = 0.1;
const TOL_DETERMINANT: f64 = 1e-5;
const VERIFY_TOL: f64 = 1e-6;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Result<Outcome> {
    Ok(Outcome {
        pass,
        detail: detail.into(),
    })
}

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn abs_curve() -> Curve {
    Curve::parse("abs(x)", -2.0, 2.0).unwrap()
}

fn objective() -> Expr {
    parse("(v - sd(abs(x)))^2").unwrap()
}

fn constraint() -> Expr {
    parse("x + y^2").unwrap()
}

fn abs_problem() -> IsoProblem {
    IsoProblem::new(
        objective(),
        constraint(),
        (-1.0, 1.0),
        (1.0, 1.0),
        c(2.0 / 3.0),
    )
    .unwrap()
}

fn random_poly(rng: &mut ChaCha8Rng) -> Curve {
    let deg = rng.gen_range(0..=4);
    let text = (0..=deg)
        .map(|k| format!("({:e})*x^{k}", rng.gen_range(-2.0..2.0)))
        .collect::<Vec<_>>()
        .join(" + ");
    Curve::parse(&text, -3.0, 3.0).unwrap()
}

/// The closed form of `□_ε|x|`, written out branch by branch.
fn abs_scale_derivative(x: f64, eps: f64) -> Complex64 {
    if x >= eps {
        c(1.0)
    } else if x >= 0.0 {
        Complex64::new(x / eps, -(eps - x) / eps)
    } else if x > -eps {
        Complex64::new(x / eps, -(eps + x) / eps)
    } else {
        c(-1.0)
    }
}

fn criterion_1() -> Result<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let y = abs_curve();
    let mut worst = 0.0f64;
    for k in 0..1000 {
        let eps = rng.gen_range(0.01..0.5);
        let x = if k % 2 == 0 {
            rng.gen_range(-1.0..1.0)
        } else {
            rng.gen_range(-eps..eps)
        };
        worst = worst.max((scale_derivative(&y, x, eps)? - abs_scale_derivative(x, eps)).norm());
    }
    outcome(
        worst <= TOL_ABS_FORMULA,
        format!("max deviation {worst:.3e} over 1000 pairs"),
    )
}

fn criterion_2() -> Result<Outcome> {
    let schedule = EpsilonSchedule::default();
    let grid = uniform_grid(-1.0, 1.0, 201);
    let mut worst = 0.0f64;
    for eps in schedule.values() {
        worst = worst.max(el_residual(&objective(), &abs_curve(), &grid, eps)?.sup_norm());
    }
    let brackets = bracket_field(
        &objective(),
        &abs_curve(),
        &grid,
        &schedule,
        &BracketConfig::default(),
    )?;
    let all_zero = brackets.iter().all(|b| b.is_zero);
    outcome(
        worst < TOL_EXTREMAL_SUP && all_zero,
        format!(
            "max sup-norm {worst:.3e} across {} scales, all brackets zero: {all_zero}",
            schedule.count()
        ),
    )
}

fn criterion_3() -> Result<Outcome> {
    let schedule = EpsilonSchedule::default();
    let cfg = BracketConfig::default();
    let grid = uniform_grid(-1.0, 1.0, 201);
    let brackets = bracket_field(&constraint(), &abs_curve(), &grid, &schedule, &cfg)?;
    let pointwise = grid
        .iter()
        .zip(&brackets)
        .map(|(x, b)| (b.value - c(2.0 * x.abs())).norm())
        .fold(0.0, f64::max);
    let sup = EulerLagrange::new(&constraint())?
        .sweep(&abs_curve(), &grid, &schedule)?
        .sup_norm_bracket(&cfg)?;
    let sup_err = (sup.value - c(2.0)).norm();
    let converged = sup.converged && brackets.iter().all(|b| b.converged);
    outcome(
        pointwise <= TOL_CONSTRAINT_BRACKET && sup_err <= TOL_CONSTRAINT_BRACKET && converged,
        format!(
            "pointwise error vs 2|x| {pointwise:.3e}, sup-norm limit {:.12} (error {sup_err:.3e})",
            sup.value.re
        ),
    )
}

fn criterion_4() -> Result<Outcome> {
    let q = QuadratureConfig::simpson(256)?;
    let mut worst = 0.0f64;
    for eps in EpsilonSchedule::default().values() {
        let v = functional_value(&constraint(), &abs_curve(), -1.0, 1.0, eps, &q)?;
        worst = worst.max((v - c(2.0 / 3.0)).norm());
    }
    outcome(
        worst <= TOL_CONSTRAINT_VALUE,
        format!("max |G(|x|) - 2/3| = {worst:.3e}"),
    )
}

fn criterion_5() -> Result<Outcome> {
    let r = verify_iso_extremal(&abs_problem(), &abs_curve(), VERIFY_TOL)?;
    let lambda = r.lambda.unwrap_or(f64::NAN);
    outcome(
        lambda.abs() < TOL_LAMBDA_ZERO && r.verdict == Verdict::ExtremalConfirmed,
        format!("lambda = {lambda:.3e}, verdict {}", r.verdict),
    )
}

fn criterion_6() -> Result<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 6);
    let mut worst = 0.0f64;
    for _ in 0..500 {
        let (f, g) = (random_poly(&mut rng), random_poly(&mut rng));
        let x = rng.gen_range(-1.0..1.0);
        let eps = rng.gen_range(0.01..0.5);
        worst = worst.max(leibniz_defect(&f, &g, x, eps)?.norm());
    }
    outcome(
        worst <= TOL_LEIBNIZ,
        format!("max defect {worst:.3e} over 500 pairs"),
    )
}

fn criterion_7() -> Result<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 7);
    let eps = EpsilonSchedule::default().values();
    let cfg = BracketConfig::default();
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let mut coef = || Complex64::new(rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0));
        let (a0, a1, b0, b1) = (coef(), coef(), coef(), coef());
        let a: Vec<_> = eps.iter().map(|e| a0 + a1 * e).collect();
        let b: Vec<_> = eps.iter().map(|e| b0 + b1 * e).collect();
        let ab: Vec<_> = a.iter().zip(&b).map(|(x, y)| x * y).collect();
        let la = bracket_samples(&eps, &a, &cfg)?.value;
        let lb = bracket_samples(&eps, &b, &cfg)?.value;
        let lab = bracket_samples(&eps, &ab, &cfg)?.value;
        worst = worst.max((lab - la * lb).norm());
    }
    outcome(
        worst <= TOL_PRODUCT_LEMMA,
        format!("max |[ab] - [a][b]| = {worst:.3e} over 20 pairs"),
    )
}

fn criterion_8() -> Result<Outcome> {
    let y = Curve::parse("x^2", -2.0, 2.0)?;
    let grid = uniform_grid(-1.0, 1.0, 201);
    let brackets = bracket_field(
        &parse("v^2")?,
        &y,
        &grid,
        &EpsilonSchedule::default(),
        &BracketConfig::default(),
    )?;
    let worst = brackets
        .iter()
        .map(|b| (b.value - c(-4.0)).norm())
        .fold(0.0, f64::max);
    let converged = brackets.iter().all(|b| b.converged);
    outcome(
        worst <= TOL_CLASSICAL && converged,
        format!("max |[r] + 4| = {worst:.3e} over {} points", grid.len()),
    )
}

/// `argmin_λ Σ |r_f − λ r_g|²` over `λ ∈ [−10, 10]` with step `SCAN_STEP`.
fn scan_lambda(p: &IsoProblem, y: &Curve) -> Result<f64> {
    let field = |e: &Expr| -> Result<Vec<Complex64>> {
        Ok(bracket_field(e, y, p.grid(), p.schedule(), p.bracket())?
            .iter()
            .map(|b| b.value)
            .collect())
    };
    let (rf, rg) = (field(p.f())?, field(p.g())?);
    let steps = (10.0 / SCAN_STEP).round() as i64;
    let mut best = (f64::INFINITY, 0.0);
    for k in -steps..=steps {
        let l = k as f64 * SCAN_STEP;
        let cost: f64 = rf
            .iter()
            .zip(&rg)
            .map(|(f, g)| (f - l * g).norm_sqr())
            .sum();
        if cost < best.0 {
            best = (cost, l);
        }
    }
    Ok(best.1)
}

fn criterion_9() -> Result<Outcome> {
    let g = constraint();
    let three_g = Expr::mul(Expr::constant(3.0), g.clone());
    let prop = IsoProblem::new(three_g, g, (-1.0, 1.0), (1.0, 1.0), c(2.0 / 3.0))?;
    let lambda3 = estimate_multiplier(&prop, &abs_curve())?;

    let cb = 1f64.cos();
    let cos = IsoProblem::new(
        parse("v^2")?,
        parse("y^2")?,
        (-1.0, 1.0),
        (cb, cb),
        c(1.0 + 2f64.sin() / 2.0),
    )?;
    let hb = 2f64.cosh();
    let cosh = IsoProblem::new(
        parse("v^2 + y^2")?,
        parse("y^2")?,
        (-1.0, 1.0),
        (hb, hb),
        c(0.0),
    )?
    .with_schedule(EpsilonSchedule::new(0.1, 0.5, 5)?)
    .with_boundary_tol(1e-6)?;
    let cases = [
        (abs_problem(), abs_curve()),
        (prop, abs_curve()),
        (cos, Curve::parse("cos(x)", -2.0, 2.0)?),
        (
            cosh,
            Curve::sample_fn(|x| (2.0 * x).cosh(), -1.5, 1.5, 30_001)?,
        ),
    ];
    let mut worst_scan = 0.0f64;
    for (p, y) in &cases {
        worst_scan = worst_scan.max((estimate_multiplier(p, y)? - scan_lambda(p, y)?).abs());
    }
    outcome(
        (lambda3 - 3.0).abs() <= TOL_PROPORTIONAL && worst_scan <= TOL_SCAN,
        format!(
            "lambda(3g, g) - 3 = {:.3e}, max |lambda - scan| = {worst_scan:.3e} over {} problems",
            lambda3 - 3.0,
            cases.len()
        ),
    )
}

fn criterion_10() -> Result<Outcome> {
    let probes = ProbeConfig::default();
    let sqrt = Curve::parse("sqrt(abs(x))", -1.0, 1.0)?;
    let a_sqrt = estimate_exponent(&sqrt, &default_schedule(&sqrt), &probes)?.alpha_hat;
    let w = Curve::weierstrass(0.5, 3.0, 21, 0.0, 1.0)?;
    let a_w = estimate_exponent(&w, &default_schedule(&w), &probes)?.alpha_hat;
    let want_w = 2f64.ln() / 3f64.ln();
    outcome(
        (a_sqrt - 0.5).abs() <= TOL_HOLDER && (a_w - want_w).abs() <= TOL_HOLDER,
        format!("sqrt(|x|): {a_sqrt:.4} (want 0.5), Weierstrass: {a_w:.4} (want {want_w:.4})"),
    )
}

fn random_variation(rng: &mut ChaCha8Rng) -> Curve {
    let (c0, c1, c2) = (
        rng.gen_range(-1.0..1.0),
        rng.gen_range(-1.0..1.0),
        rng.gen_range(-1.0..1.0),
    );
    let k = rng.gen_range(1..=3);
    let s = rng.gen_range(-0.5..0.5);
    let text = format!("(1 - x^2)*(({c0:e}) + ({c1:e})*x + ({c2:e})*x^2) + ({s:e})*sin({k}*pi*x)");
    Curve::parse(&text, -2.0, 2.0).unwrap()
}

fn criterion_11() -> Result<Outcome> {
    let p = abs_problem();
    let y = abs_curve();
    if verify_iso_extremal(&p, &y, VERIFY_TOL)?.verdict != Verdict::ExtremalConfirmed {
        return outcome(false, "base point is not a confirmed extremal");
    }
    let y_est = estimate_exponent(&y, &default_schedule(&y), &ProbeConfig::default())?;
    let alpha = y_est.alpha_hat.min(0.999);
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 11);
    let mut worst = 0.0f64;
    let mut pairs = 0;
    while pairs < 5 {
        let (e1, e2) = (random_variation(&mut rng), random_variation(&mut rng));
        if !(is_admissible_variation(&e1, alpha, -1.0, 1.0, 1e-12).admissible
            && is_admissible_variation(&e2, alpha, -1.0, 1.0, 1e-12).admissible)
        {
            continue;
        }
        let d = bracketed_partials(&p, &y, &e1, &e2)?;
        if !d.converged() {
            return outcome(false, "a bracketed partial did not converge");
        }
        worst = worst.max(d.determinant().norm());
        pairs += 1;
    }
    outcome(
        worst <= TOL_DETERMINANT,
        format!("max |det| = {worst:.3e} over {pairs} admissible pairs"),
    )
}

type Check = fn() -> Result<Outcome>;

fn main() -> ExitCode {
    let criteria: [(&str, Check, Duration); 11] = [
        (
            "closed-form scale derivative of |x|",
            criterion_1,
            Duration::from_secs(1),
        ),
        (
            "objective residual vanishes at |x|",
            criterion_2,
            Duration::from_secs(5),
        ),
        (
            "constraint residual brackets to 2|x|, sup 2",
            criterion_3,
            Duration::from_secs(5),
        ),
        ("constraint value 2/3", criterion_4, Duration::from_secs(1)),
        (
            "multiplier zero, extremal confirmed",
            criterion_5,
            Duration::from_secs(10),
        ),
        ("quantum Leibniz rule", criterion_6, Duration::from_secs(2)),
        ("bracket product rule", criterion_7, Duration::from_secs(1)),
        (
            "classical consistency for v^2 at x^2",
            criterion_8,
            Duration::from_secs(2),
        ),
        (
            "multiplier proportionality and scan oracle",
            criterion_9,
            Duration::from_secs(5),
        ),
        (
            "Hoelder exponent estimation",
            criterion_10,
            Duration::from_secs(10),
        ),
        (
            "two-parameter determinant vanishes",
            criterion_11,
            Duration::from_secs(10),
        ),
    ];
    let mut failed = 0;
    for (i, (name, check, budget)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = check();
        let elapsed = start.elapsed();
        let (pass, detail) = match result {
            Ok(o) => (o.pass && elapsed <= *budget, o.detail),
            Err(e) => (false, format!("error: {e}")),
        };
        let timing = format!("{:.3}s of {}s", elapsed.as_secs_f64(), budget.as_secs());
        println!(
            "criterion {:>2}: {} {name}: {detail} [{timing}]",
            i + 1,
            if pass { "PASS" } else { "FAIL" }
        );
        if !pass {
            failed += 1;
        }
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
