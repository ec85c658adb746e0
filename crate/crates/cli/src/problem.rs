//! Problem files and numerics.
//!
//! A problem file is a list of `[section]` headers each followed by
//! `key = value` lines. Blank lines and lines starting with `#` or `;` are
//! ignored. Numeric values are constant expressions, so `2/3` and `-pi` are
//! accepted.
//!
//! ```text
//! [interval]    a, b
//! [boundary]    a0, b0
//! [objective]   f
//! [constraint]  g, K_re, K_im
//! [curve]       y | samples
//! [numerics]    eps0, ratio, count, n_panels, grid_points, zero_tol,
//!               conv_tol, tol, probe_density, probe_seed
//! ```

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use scale_calculus::holder::ProbeConfig;
use scale_calculus::variational::uniform_grid;
use scale_calculus::{
    parse, BracketConfig, Complex64, Curve, EpsilonSchedule, Expr, IsoProblem, QuadratureConfig,
};

const SECTIONS: [(&str, &[&str]); 6] = [
    ("interval", &["a", "b"]),
    ("boundary", &["a0", "b0"]),
    ("objective", &["f"]),
    ("constraint", &["g", "K_re", "K_im"]),
    ("curve", &["y", "samples"]),
    ("numerics", &NUMERIC_KEYS),
];

const NUMERIC_KEYS: [&str; 10] = [
    "eps0",
    "ratio",
    "count",
    "n_panels",
    "grid_points",
    "zero_tol",
    "conv_tol",
    "tol",
    "probe_density",
    "probe_seed",
];

/// Every tunable number, with defaults shared by all subcommands.
#[derive(Debug, Clone, PartialEq)]
pub struct Numerics {
    pub eps0: f64,
    pub ratio: f64,
    pub count: usize,
    pub n_panels: usize,
    pub grid_points: usize,
    pub zero_tol: f64,
    pub conv_tol: f64,
    /// Verification tolerance for the constraint gap and the residual of `L`.
    pub tol: f64,
    pub probe_density: usize,
    pub probe_seed: u64,
}

impl Default for Numerics {
    fn default() -> Self {
        let s = EpsilonSchedule::default();
        let b = BracketConfig::default();
        let p = ProbeConfig::default();
        Numerics {
            eps0: s.eps0(),
            ratio: s.ratio(),
            count: s.count(),
            n_panels: QuadratureConfig::default().n_panels,
            grid_points: scale_calculus::isoperimetric::DEFAULT_GRID_POINTS,
            zero_tol: b.zero_tol,
            conv_tol: b.conv_tol,
            tol: 1e-6,
            probe_density: p.per_window,
            probe_seed: p.seed,
        }
    }
}

fn parse_number(text: &str) -> Result<f64> {
    parse(text)
        .and_then(|e| e.eval_constant())
        .map_err(|e| anyhow!("invalid number {text:?}: {e}"))
}

fn parse_count(text: &str) -> Result<usize> {
    let v = parse_number(text)?;
    if v < 0.0 || v.fract() != 0.0 || v > u32::MAX as f64 {
        bail!("expected a non-negative integer, got {text:?}");
    }
    Ok(v as usize)
}

impl Numerics {
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let ctx = || format!("numerics key {key}");
        match key {
            "eps0" => self.eps0 = parse_number(value).with_context(ctx)?,
            "ratio" => self.ratio = parse_number(value).with_context(ctx)?,
            "count" => self.count = parse_count(value).with_context(ctx)?,
            "n_panels" => self.n_panels = parse_count(value).with_context(ctx)?,
            "grid_points" => self.grid_points = parse_count(value).with_context(ctx)?,
            "zero_tol" => self.zero_tol = parse_number(value).with_context(ctx)?,
            "conv_tol" => self.conv_tol = parse_number(value).with_context(ctx)?,
            "tol" => self.tol = parse_number(value).with_context(ctx)?,
            "probe_density" => self.probe_density = parse_count(value).with_context(ctx)?,
            "probe_seed" => {
                self.probe_seed = value
                    .trim()
                    .parse()
                    .map_err(|_| anyhow!("probe_seed must be an unsigned integer, got {value:?}"))?
            }
            _ => bail!(
                "unknown numerics key {key:?}; known keys: {}",
                NUMERIC_KEYS.join(", ")
            ),
        }
        Ok(())
    }

    /// Applies `key=value` overrides in order.
    pub fn apply_overrides(&mut self, overrides: &[String]) -> Result<()> {
        for item in overrides {
            let (k, v) = item
                .split_once('=')
                .ok_or_else(|| anyhow!("--numerics expects key=value, got {item:?}"))?;
            self.set(k.trim(), v.trim())?;
        }
        Ok(())
    }

    pub fn schedule(&self) -> Result<EpsilonSchedule> {
        Ok(EpsilonSchedule::new(self.eps0, self.ratio, self.count)?)
    }

    pub fn quadrature(&self) -> Result<QuadratureConfig> {
        Ok(QuadratureConfig::simpson(self.n_panels)?)
    }

    pub fn bracket(&self) -> Result<BracketConfig> {
        Ok(BracketConfig::new(self.zero_tol, self.conv_tol)?)
    }

    pub fn probes(&self) -> Result<ProbeConfig> {
        if self.probe_density == 0 {
            bail!("probe_density must be at least 1");
        }
        Ok(ProbeConfig {
            per_window: self.probe_density,
            seed: self.probe_seed,
        })
    }

    pub fn grid(&self, a: f64, b: f64) -> Result<Vec<f64>> {
        if self.grid_points == 0 {
            bail!("grid_points must be at least 1; the residual grid is empty");
        }
        Ok(uniform_grid(a, b, self.grid_points))
    }

    /// Validates every field at once.
    pub fn validate(&self) -> Result<()> {
        self.schedule()?;
        self.quadrature()?;
        self.bracket()?;
        self.probes()?;
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            bail!("tol must be positive, got {}", self.tol);
        }
        Ok(())
    }
}

impl fmt::Display for Numerics {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "eps0 = {}", self.eps0)?;
        writeln!(f, "ratio = {}", self.ratio)?;
        writeln!(f, "count = {}", self.count)?;
        writeln!(f, "n_panels = {}", self.n_panels)?;
        writeln!(f, "grid_points = {}", self.grid_points)?;
        writeln!(f, "zero_tol = {:e}", self.zero_tol)?;
        writeln!(f, "conv_tol = {:e}", self.conv_tol)?;
        writeln!(f, "tol = {:e}", self.tol)?;
        writeln!(f, "probe_density = {}", self.probe_density)?;
        write!(f, "probe_seed = {}", self.probe_seed)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum CurveSource {
    Expression(Expr),
    Samples(PathBuf),
}

/// A parsed problem file. Sections other than `[numerics]` are optional at
/// parse time; each subcommand asks for what it needs.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ProblemFile {
    pub interval: Option<(f64, f64)>,
    pub boundary: Option<(f64, f64)>,
    pub objective: Option<Expr>,
    pub constraint: Option<(Expr, Complex64)>,
    pub curve: Option<CurveSource>,
    pub numerics: Numerics,
}

type Sections = BTreeMap<String, BTreeMap<String, (usize, String)>>;

fn split_sections(text: &str) -> Result<Sections> {
    let mut out: Sections = BTreeMap::new();
    let mut current: Option<String> = None;
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') || line.starts_with(';') {
            continue;
        }
        if let Some(rest) = line.strip_prefix('[') {
            let name = rest
                .strip_suffix(']')
                .ok_or_else(|| anyhow!("line {line_no}: unterminated section header"))?
                .trim()
                .to_string();
            if !SECTIONS.iter().any(|(s, _)| *s == name) {
                bail!("line {line_no}: unknown section [{name}]");
            }
            if out.contains_key(&name) {
                bail!("line {line_no}: duplicate section [{name}]");
            }
            out.insert(name.clone(), BTreeMap::new());
            current = Some(name);
            continue;
        }
        let section = current
            .as_ref()
            .ok_or_else(|| anyhow!("line {line_no}: key outside any section"))?;
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| anyhow!("line {line_no}: expected key = value"))?;
        let (k, v) = (k.trim(), v.trim());
        let allowed = SECTIONS
            .iter()
            .find(|(s, _)| s == section)
            .map(|(_, k)| *k)
            .unwrap_or(&[]);
        if !allowed.contains(&k) {
            bail!(
                "line {line_no}: unknown key {k:?} in [{section}]; expected one of {}",
                allowed.join(", ")
            );
        }
        let entries = out.get_mut(section).expect("section inserted");
        if entries
            .insert(k.to_string(), (line_no, v.to_string()))
            .is_some()
        {
            bail!("line {line_no}: duplicate key {k:?} in [{section}]");
        }
    }
    Ok(out)
}

fn required<'a>(sections: &'a Sections, section: &str, key: &str) -> Result<&'a (usize, String)> {
    sections
        .get(section)
        .and_then(|s| s.get(key))
        .ok_or_else(|| anyhow!("[{section}] is missing key {key:?}"))
}

fn number(sections: &Sections, section: &str, key: &str) -> Result<f64> {
    let (line, v) = required(sections, section, key)?;
    parse_number(v).with_context(|| format!("line {line}: [{section}] {key}"))
}

fn expression(sections: &Sections, section: &str, key: &str) -> Result<Expr> {
    let (line, v) = required(sections, section, key)?;
    parse(v).with_context(|| format!("line {line}: [{section}] {key} = {v}"))
}

impl ProblemFile {
    /// Parses problem text. Relative sample paths resolve against `base`.
    pub fn parse(text: &str, base: &Path) -> Result<Self> {
        let sections = split_sections(text)?;
        let mut p = ProblemFile::default();
        if sections.contains_key("interval") {
            let (a, b) = (
                number(&sections, "interval", "a")?,
                number(&sections, "interval", "b")?,
            );
            if a.is_nan() || b.is_nan() || a >= b {
                bail!("[interval] requires a < b, got a = {a}, b = {b}");
            }
            p.interval = Some((a, b));
        }
        if sections.contains_key("boundary") {
            p.boundary = Some((
                number(&sections, "boundary", "a0")?,
                number(&sections, "boundary", "b0")?,
            ));
        }
        if sections.contains_key("objective") {
            p.objective = Some(expression(&sections, "objective", "f")?);
        }
        if let Some(c) = sections.get("constraint") {
            let g = expression(&sections, "constraint", "g")?;
            let k_re = number(&sections, "constraint", "K_re")?;
            let k_im = if c.contains_key("K_im") {
                number(&sections, "constraint", "K_im")?
            } else {
                0.0
            };
            p.constraint = Some((g, Complex64::new(k_re, k_im)));
        }
        if let Some(c) = sections.get("curve") {
            p.curve = Some(match (c.get("y"), c.get("samples")) {
                (Some(_), Some(_)) => bail!("[curve] takes either y or samples, not both"),
                (Some(_), None) => CurveSource::Expression(expression(&sections, "curve", "y")?),
                (None, Some((_, path))) => CurveSource::Samples(base.join(path)),
                (None, None) => bail!("[curve] needs y or samples"),
            });
        }
        if let Some(n) = sections.get("numerics") {
            for (k, (line, v)) in n {
                p.numerics
                    .set(k, v)
                    .with_context(|| format!("line {line}"))?;
            }
        }
        Ok(p)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text =
            std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let base = path.parent().unwrap_or(Path::new("."));
        Self::parse(&text, base).with_context(|| format!("in {}", path.display()))
    }

    pub fn interval(&self) -> Result<(f64, f64)> {
        self.interval
            .ok_or_else(|| anyhow!("problem file has no [interval] section"))
    }

    pub fn objective(&self) -> Result<&Expr> {
        self.objective
            .as_ref()
            .ok_or_else(|| anyhow!("problem file has no [objective] section"))
    }

    pub fn constraint(&self) -> Result<&(Expr, Complex64)> {
        self.constraint
            .as_ref()
            .ok_or_else(|| anyhow!("problem file has no [constraint] section"))
    }

    /// The candidate curve. Closed-form curves are defined on `[a, b]`
    /// widened by twice the largest scale, which is what residual stencils
    /// need.
    pub fn curve(&self) -> Result<Curve> {
        let (a, b) = self.interval()?;
        let margin = 2.0 * self.numerics.eps0;
        match self
            .curve
            .as_ref()
            .ok_or_else(|| anyhow!("problem file has no [curve] section"))?
        {
            CurveSource::Expression(e) => {
                Ok(Curve::closed_form(e.clone(), a - margin, b + margin)?)
            }
            CurveSource::Samples(path) => load_samples(path),
        }
    }

    pub fn iso_problem(&self) -> Result<IsoProblem> {
        let (g, k) = self.constraint()?.clone();
        let boundary = self
            .boundary
            .ok_or_else(|| anyhow!("problem file has no [boundary] section"))?;
        let (a, b) = self.interval()?;
        let n = &self.numerics;
        Ok(
            IsoProblem::new(self.objective()?.clone(), g, (a, b), boundary, k)?
                .with_schedule(n.schedule()?)
                .with_quadrature(n.quadrature()?)
                .with_bracket(n.bracket()?)
                .with_grid(n.grid(a, b)?)?,
        )
    }
}

/// Reads a two-column `x,value` CSV. A first row that does not parse as two
/// numbers is taken as a header.
pub fn load_samples(path: &Path) -> Result<Curve> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_path(path)
        .with_context(|| format!("reading samples {}", path.display()))?;
    let (mut xs, mut ys) = (Vec::new(), Vec::new());
    for (i, rec) in reader.records().enumerate() {
        let rec = rec.with_context(|| format!("{}: malformed CSV", path.display()))?;
        if rec.len() != 2 {
            bail!(
                "{}: row {} has {} columns, expected 2",
                path.display(),
                i + 1,
                rec.len()
            );
        }
        match (rec[0].parse::<f64>(), rec[1].parse::<f64>()) {
            (Ok(x), Ok(y)) => {
                xs.push(x);
                ys.push(y);
            }
            _ if i == 0 => continue,
            _ => bail!("{}: row {} is not numeric", path.display(), i + 1),
        }
    }
    Curve::sampled(xs, ys).with_context(|| format!("samples in {}", path.display()))
}

#[cfg(test)]
mod tests {
    use super::*;

    const ABS: &str = "
# the absolute-value problem
[interval]
a = -1
b = 1
[boundary]
a0 = 1
b0 = 1
[objective]
f = (v - sd(abs(x)))^2
[constraint]
g = x + y^2
K_re = 2/3
K_im = 0
[curve]
y = abs(x)
";

    #[test]
    fn parses_full_problem() {
        let p = ProblemFile::parse(ABS, Path::new(".")).unwrap();
        assert_eq!(p.interval, Some((-1.0, 1.0)));
        assert_eq!(
            p.constraint.as_ref().unwrap().1,
            Complex64::new(2.0 / 3.0, 0.0)
        );
        assert_eq!(p.numerics, Numerics::default());
        let c = p.curve().unwrap();
        assert_eq!(c.domain(), (-1.2, 1.2));
        assert!(p.iso_problem().is_ok());
    }

    #[test]
    fn numerics_section_and_overrides() {
        let text = format!("{ABS}\n[numerics]\neps0 = 0.05\ncount = 6\n");
        let mut p = ProblemFile::parse(&text, Path::new(".")).unwrap();
        assert_eq!((p.numerics.eps0, p.numerics.count), (0.05, 6));
        p.numerics
            .apply_overrides(&["count=4".into(), "zero_tol = 1e-8".into()])
            .unwrap();
        assert_eq!((p.numerics.count, p.numerics.zero_tol), (4, 1e-8));
        assert!(p.numerics.apply_overrides(&["bogus=1".into()]).is_err());
        assert!(p.numerics.apply_overrides(&["count".into()]).is_err());
        assert!(p.numerics.apply_overrides(&["count=2.5".into()]).is_err());
    }

    #[test]
    fn rejects_malformed_files() {
        for bad in [
            "[interval]\na = 1\nb = 0\n",
            "[interval]\na = 0\n",
            "[nowhere]\n",
            "a = 1\n",
            "[interval]\na = 0\na = 1\nb = 2\n",
            "[objective]\nf = v^\n",
            "[curve]\ny = abs(x)\nsamples = s.csv\n",
            "[interval\n",
            "[numerics]\ncount = many\n",
        ] {
            assert!(ProblemFile::parse(bad, Path::new(".")).is_err(), "{bad}");
        }
    }

    #[test]
    fn missing_sections_are_reported_on_use() {
        let p = ProblemFile::parse("[interval]\na = 0\nb = 1\n", Path::new(".")).unwrap();
        assert!(p.constraint().is_err());
        assert!(p.curve().is_err());
        assert!(p.iso_problem().is_err());
    }

    #[test]
    fn empty_grid_is_rejected() {
        let n = Numerics {
            grid_points: 0,
            ..Numerics::default()
        };
        assert!(n.grid(0.0, 1.0).is_err());
    }

    #[test]
    fn defaults_are_valid_and_printed() {
        let n = Numerics::default();
        n.validate().unwrap();
        let text = n.to_string();
        for k in NUMERIC_KEYS {
            assert!(text.contains(&format!("{k} = ")), "{k}");
        }
    }
}
