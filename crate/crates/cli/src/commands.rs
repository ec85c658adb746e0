use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use anyhow::{anyhow, bail, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use scale_calculus::holder::{default_schedule, estimate_exponent, modulus_of_continuity};
use scale_calculus::variational::{bracket_samples, EulerLagrange, LimitEstimate, ResidualSweep};
use scale_calculus::{
    functional_value, leibniz_defect, parse, scale_derivative_field, verify_iso_extremal, Curve,
    Expr, Extremality, Verdict,
};

use crate::format::{num, Table};
use crate::problem::ProblemFile;

/// Exit status of a command that ran to completion.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Success = 0,
    Negative = 1,
    Inconclusive = 3,
}

/// Exit status for input errors.
pub const INPUT_ERROR: u8 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Which {
    /// The objective `f`.
    F,
    /// The constraint integrand `g`.
    G,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum SweepKind {
    Residual,
    Functional,
    Holder,
}

fn lagrangian(p: &ProblemFile, which: Which) -> Result<Expr> {
    Ok(match which {
        Which::F => p.objective()?.clone(),
        Which::G => p.constraint()?.0.clone(),
    })
}

fn constant(text: &str) -> Result<f64> {
    parse(text)
        .and_then(|e| e.eval_constant())
        .map_err(|e| anyhow!("invalid number {text:?}: {e}"))
}

pub struct ScaleDerivArgs<'a> {
    pub problem: Option<&'a ProblemFile>,
    pub curve: Option<&'a str>,
    pub eps: Option<f64>,
    pub grid: Option<&'a [String]>,
}

pub fn scale_deriv(
    args: ScaleDerivArgs<'_>,
    defaults: &crate::problem::Numerics,
    out: &mut dyn Write,
) -> Result<Status> {
    let numerics = args.problem.map(|p| &p.numerics).unwrap_or(defaults);
    let eps = args.eps.unwrap_or(numerics.eps0);
    if !(eps > 0.0 && eps.is_finite()) {
        bail!("--eps must be positive, got {eps}");
    }
    let grid: Vec<f64> = match (args.grid, args.problem) {
        (Some(g), _) => g.iter().map(|s| constant(s)).collect::<Result<_>>()?,
        (None, Some(p)) => {
            let (a, b) = p.interval()?;
            numerics.grid(a, b)?
        }
        (None, None) => bail!("scale-deriv needs --grid or a problem file"),
    };
    if grid.is_empty() {
        bail!("the evaluation grid is empty");
    }
    let curve = match (args.curve, args.problem) {
        (Some(text), _) => {
            let lo = grid.iter().copied().fold(f64::INFINITY, f64::min) - eps;
            let hi = grid.iter().copied().fold(f64::NEG_INFINITY, f64::max) + eps;
            Curve::parse(text, lo, hi)?
        }
        (None, Some(p)) => p.curve()?,
        (None, None) => bail!("scale-deriv needs --curve or a problem file with a [curve] section"),
    };
    let values = scale_derivative_field(&curve, &grid, eps)?;
    let mut t = Table::new(out, &["x", "re", "im"])?;
    for (x, z) in grid.iter().zip(&values) {
        t.row(&[num(*x), num(z.re), num(z.im)])?;
    }
    t.finish()?;
    Ok(Status::Success)
}

fn residual_sweep(
    p: &ProblemFile,
    which: Which,
) -> Result<(ResidualSweep, Vec<LimitEstimate>, LimitEstimate)> {
    let (a, b) = p.interval()?;
    let n = &p.numerics;
    let grid = n.grid(a, b)?;
    let cfg = n.bracket()?;
    let sweep =
        EulerLagrange::new(&lagrangian(p, which)?)?.sweep(&p.curve()?, &grid, &n.schedule()?)?;
    let points = sweep.pointwise_brackets(&cfg)?;
    let sup = sweep.sup_norm_bracket(&cfg)?;
    Ok((sweep, points, sup))
}

fn flags(l: &LimitEstimate) -> Vec<&'static str> {
    let mut f = Vec::new();
    if l.is_zero {
        f.push("zero");
    }
    if !l.converged {
        f.push("nonconv");
    }
    f
}

fn write_residual_csv(
    out: &mut dyn Write,
    sweep: &ResidualSweep,
    points: &[LimitEstimate],
) -> Result<()> {
    let mut t = Table::new(
        out,
        &[
            "eps",
            "x",
            "residual_re",
            "residual_im",
            "bracket_re",
            "bracket_im",
            "sup_norm",
            "flags",
        ],
    )?;
    for field in &sweep.fields {
        let sup = field.sup_norm();
        for ((x, r), l) in field.grid.iter().zip(&field.values).zip(points) {
            let mut f = flags(l);
            if r.norm() == sup {
                f.push("max");
            }
            t.row(&[
                num(field.eps),
                num(*x),
                num(r.re),
                num(r.im),
                num(l.value.re),
                num(l.value.im),
                num(sup),
                f.join("|"),
            ])?;
        }
    }
    t.finish()?;
    Ok(())
}

pub fn el_check(
    p: &ProblemFile,
    which: Which,
    csv: Option<&Path>,
    out: &mut dyn Write,
) -> Result<Status> {
    let f = lagrangian(p, which)?;
    let (sweep, points, sup) = residual_sweep(p, which)?;
    if let Some(path) = csv {
        let mut w = BufWriter::new(
            File::create(path).map_err(|e| anyhow!("creating {}: {e}", path.display()))?,
        );
        write_residual_csv(&mut w, &sweep, &points)?;
    }
    let verdict = Extremality::classify(&points);
    let s = p.numerics.schedule()?;
    writeln!(out, "lagrangian: {f}")?;
    writeln!(
        out,
        "schedule: eps0 = {}, ratio = {}, count = {}",
        s.eps0(),
        s.ratio(),
        s.count()
    )?;
    writeln!(
        out,
        "{:>24} {:>24} {:>24}  flags",
        "x", "bracket_re", "bracket_im"
    )?;
    for (x, l) in sweep.grid().iter().zip(&points) {
        writeln!(
            out,
            "{:>24} {:>24} {:>24}  {}",
            num(*x),
            num(l.value.re),
            num(l.value.im),
            flags(l).join("|")
        )?;
    }
    writeln!(
        out,
        "sup-norm bracket: {} {}",
        num(sup.value.re),
        flags(&sup).join("|")
    )?;
    let (label, status) = match verdict {
        Extremality::Extremal => ("extremal", Status::Success),
        Extremality::NotExtremal => ("not_extremal", Status::Negative),
        Extremality::Inconclusive => ("inconclusive", Status::Inconclusive),
    };
    writeln!(out, "verdict: {label}")?;
    Ok(status)
}

pub fn iso_check(p: &ProblemFile, kv: bool, out: &mut dyn Write) -> Result<Status> {
    let problem = p.iso_problem()?;
    let r = verify_iso_extremal(&problem, &p.curve()?, p.numerics.tol)?;
    let opt = |v: Option<f64>| v.map(num).unwrap_or_else(|| "none".into());
    writeln!(out, "objective:  {}", problem.f())?;
    writeln!(
        out,
        "constraint: {} = {} + {}i",
        problem.g(),
        num(problem.k().re),
        num(problem.k().im)
    )?;
    writeln!(out, "lambda:                       {}", opt(r.lambda))?;
    writeln!(out, "hypothesis 1 (g not extremal): {}", r.hypothesis1_ok)?;
    writeln!(out, "hypothesis 2 (finite limits):  {}", r.hypothesis2_ok)?;
    writeln!(
        out,
        "constraint gap:               {}",
        num(r.constraint_gap)
    )?;
    writeln!(
        out,
        "residual sup-norm of L:       {}",
        opt(r.residual_sup_norm_l)
    )?;
    writeln!(out, "tolerance:                    {}", num(p.numerics.tol))?;
    writeln!(out, "verdict:                      {}", r.verdict)?;
    if kv {
        writeln!(out)?;
        writeln!(out, "lambda={}", opt(r.lambda))?;
        writeln!(out, "hypothesis1_ok={}", r.hypothesis1_ok)?;
        writeln!(out, "hypothesis2_ok={}", r.hypothesis2_ok)?;
        writeln!(out, "constraint_gap={}", num(r.constraint_gap))?;
        writeln!(out, "residual_sup_norm_L={}", opt(r.residual_sup_norm_l))?;
        writeln!(out, "f_sup_norm_limit={}", num(r.hypotheses.f_sup.value.re))?;
        writeln!(out, "g_sup_norm_limit={}", num(r.hypotheses.g_sup.value.re))?;
        writeln!(out, "verdict={}", r.verdict)?;
    }
    Ok(match r.verdict {
        Verdict::ExtremalConfirmed => Status::Success,
        Verdict::StationarityViolated | Verdict::HypothesesFailed => Status::Negative,
        Verdict::Inconclusive => Status::Inconclusive,
    })
}

/// Threshold on the largest Leibniz defect.
pub const LEIBNIZ_TOL: f64 = 1e-10;

fn random_poly(rng: &mut ChaCha8Rng) -> Result<Curve> {
    let deg = rng.gen_range(0..=4);
    let text = (0..=deg)
        .map(|k| format!("({:e})*x^{k}", rng.gen_range(-2.0..2.0)))
        .collect::<Vec<_>>()
        .join(" + ");
    Ok(Curve::parse(&text, -3.0, 3.0)?)
}

pub fn leibniz_test(
    seed: u64,
    trials: usize,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<Status> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for _ in 0..trials {
        let (f, g) = (random_poly(&mut rng)?, random_poly(&mut rng)?);
        let x = rng.gen_range(-1.0..1.0);
        let eps = rng.gen_range(0.01..0.5);
        worst = worst.max(leibniz_defect(&f, &g, x, eps)?.norm());
    }
    if trials == 0 {
        writeln!(
            err,
            "warning: no trials requested; the test passes vacuously"
        )?;
    }
    let pass = worst <= LEIBNIZ_TOL;
    writeln!(out, "seed = {seed}")?;
    writeln!(out, "trials = {trials}")?;
    writeln!(out, "max_defect = {}", num(worst))?;
    writeln!(out, "threshold = {}", num(LEIBNIZ_TOL))?;
    writeln!(out, "result = {}", if pass { "pass" } else { "fail" })?;
    Ok(if pass {
        Status::Success
    } else {
        Status::Negative
    })
}

pub fn sweep(
    p: &ProblemFile,
    what: SweepKind,
    which: Which,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<Status> {
    match what {
        SweepKind::Residual => {
            let (sweep, points, _) = residual_sweep(p, which)?;
            write_residual_csv(out, &sweep, &points)?;
        }
        SweepKind::Functional => sweep_functional(p, out)?,
        SweepKind::Holder => sweep_holder(p, out, err)?,
    }
    Ok(Status::Success)
}

fn sweep_functional(p: &ProblemFile, out: &mut dyn Write) -> Result<()> {
    let (a, b) = p.interval()?;
    let n = &p.numerics;
    let (schedule, quad, cfg) = (n.schedule()?, n.quadrature()?, n.bracket()?);
    let y = p.curve()?;
    let mut functionals = Vec::new();
    if let Some(f) = &p.objective {
        functionals.push(("f", f.clone()));
    }
    if let Some((g, _)) = &p.constraint {
        functionals.push(("g", g.clone()));
    }
    if functionals.is_empty() {
        bail!("functional sweep needs an [objective] or [constraint] section");
    }
    let eps = schedule.values();
    let mut t = Table::new(out, &["eps", "functional", "value_re", "value_im", "flags"])?;
    for (name, e) in &functionals {
        let vals = eps
            .iter()
            .map(|&s| Ok(functional_value(e, &y, a, b, s, &quad)?))
            .collect::<Result<Vec<_>>>()?;
        for (s, v) in eps.iter().zip(&vals) {
            t.row(&[
                num(*s),
                name.to_string(),
                num(v.re),
                num(v.im),
                String::new(),
            ])?;
        }
        let l = bracket_samples(&eps, &vals, &cfg)?;
        let mut f = vec!["limit"];
        f.extend(flags(&l));
        t.row(&[
            num(0.0),
            name.to_string(),
            num(l.value.re),
            num(l.value.im),
            f.join("|"),
        ])?;
    }
    t.finish()?;
    Ok(())
}

fn sweep_holder(p: &ProblemFile, out: &mut dyn Write, err: &mut dyn Write) -> Result<()> {
    let y = p.curve()?;
    let probes = p.numerics.probes()?;
    let schedule = default_schedule(&y);
    let mut t = Table::new(out, &["eps", "omega"])?;
    for &e in &schedule {
        t.row(&[num(e), num(modulus_of_continuity(&y, e, &probes)?)])?;
    }
    t.finish()?;
    let est = estimate_exponent(&y, &schedule, &probes)?;
    writeln!(
        err,
        "alpha_hat = {}, c_hat = {}, r2 = {}{}",
        num(est.alpha_hat),
        num(est.c_hat),
        num(est.regression_r2),
        if est.degenerate {
            " (degenerate: no increments observed)"
        } else {
            ""
        }
    )?;
    Ok(())
}
