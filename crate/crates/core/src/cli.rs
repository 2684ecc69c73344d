//! Command-line front end: `verify`, `deficit`, `sweep` and `rule`.
//!
//! Every flag can also come from a JSON file given by `--config`, with the
//! same names; flags on the command line win. Exit status is 0 when every
//! checked relation holds, 1 on a violation and 2 on a usage or
//! configuration error.

use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::catalog::{catalog_get, CatalogParams};
use crate::deficits::{deficit_report, DeficitReport};
use crate::domain::OrthantSpec;
use crate::error::{Error, Result};
use crate::functionals::Backend;
use crate::projection::{dist_to_affine_family, dist_to_e, ProjectionResult};
use crate::quadrature::{composite_legendre_rule, half_range_rule, hermite_rule, AxisRule, QuadConfig};
use crate::report::{fmt17, to_json_17, REPORT_VERSION};
use crate::suites::{run_suite, SuiteConfig, SuiteName};
use crate::sweep::{run_sweep, SweepConfig};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_VIOLATION: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "orthant-hup", version, about = "Numerical checks of the uncertainty principle on orthants")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Run a verification suite and report every margin.
    Verify {
        #[arg(value_parser = ["identity", "lifting", "poincare", "stability", "all"])]
        suite: String,
        #[command(flatten)]
        flags: Flags,
    },
    /// Deficits and distances to the extremal and affine families for one field.
    Deficit {
        #[arg(value_name = "FIELD")]
        name: String,
        #[command(flatten)]
        flags: Flags,
    },
    /// Deficits and margins along `base + ε·perturbation`.
    Sweep {
        #[command(flatten)]
        flags: Flags,
    },
    /// Dump the nodes and weights of a one-dimensional rule.
    Rule {
        #[arg(value_enum)]
        kind: RuleKind,
        #[command(flatten)]
        flags: Flags,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum RuleKind {
    /// Weight `e^{-t²}` on the line.
    Hermite,
    /// Weight `t^a e^{-t²}` on the half line.
    Half,
    /// Unit weight on `[lo, hi]`.
    Legendre,
}

/// Flags shared by every subcommand; also the schema of `--config` files.
#[derive(Args, Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Flags {
    /// Orthant as `n,k`.
    #[arg(long)]
    pub nk: Option<String>,
    #[arg(long)]
    pub beta: Option<f64>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub lambda: Option<f64>,
    /// Per-axis quadrature order.
    #[arg(long)]
    pub order: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Lift exponent on every wall.
    #[arg(long)]
    pub l: Option<u32>,
    /// Overrides the suite tolerance.
    #[arg(long)]
    pub tol: Option<f64>,
    /// Random fields per orthant.
    #[arg(long)]
    pub count: Option<usize>,
    /// Catalogue field to check instead of the random suite.
    #[arg(long)]
    pub field: Option<String>,
    #[arg(long)]
    pub backend: Option<String>,
    /// Catalogue parameters: `B` of the affine family.
    #[arg(long = "big-b")]
    pub big_b: Option<f64>,
    #[arg(long)]
    pub b0: Option<f64>,
    #[arg(long)]
    pub base: Option<String>,
    #[arg(long)]
    pub perturbation: Option<String>,
    #[arg(long = "eps-min")]
    pub eps_min: Option<f64>,
    #[arg(long = "eps-max")]
    pub eps_max: Option<f64>,
    /// Number of points, for `sweep` and `rule`.
    #[arg(long)]
    pub points: Option<usize>,
    /// Exponent of the half-line rule weight.
    #[arg(long)]
    pub a: Option<f64>,
    #[arg(long)]
    pub lo: Option<f64>,
    #[arg(long)]
    pub hi: Option<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// JSON file with any of these flags.
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
}

macro_rules! overlay {
    ($dst:ident, $src:ident, $($f:ident),*) => {
        $( if $src.$f.is_some() { $dst.$f = $src.$f.clone(); } )*
    };
}

impl Flags {
    /// Reads `--config` if given and overlays the command-line flags on it.
    pub fn resolve(self) -> Result<Flags> {
        let mut base = match &self.config {
            Some(path) => {
                let text = fs::read_to_string(path)
                    .map_err(|e| Error::Parameter(format!("cannot read config {}: {e}", path.display())))?;
                serde_json::from_str::<Flags>(&text)
                    .map_err(|e| Error::Parameter(format!("bad config {}: {e}", path.display())))?
            }
            None => Flags::default(),
        };
        let s = self;
        overlay!(
            base, s, nk, beta, alpha, lambda, order, seed, l, tol, count, field, backend, big_b, b0, base, perturbation,
            eps_min, eps_max, points, a, lo, hi, out, format
        );
        Ok(base)
    }

    fn quad(&self) -> QuadConfig {
        match self.order {
            Some(o) => QuadConfig::with_order(o),
            None => QuadConfig::default(),
        }
    }

    fn params(&self) -> CatalogParams {
        let d = CatalogParams::default();
        CatalogParams {
            beta: self.beta.unwrap_or(d.beta),
            seed: self.seed.unwrap_or(d.seed),
            big_b: self.big_b.unwrap_or(d.big_b),
            b0: self.b0.unwrap_or(d.b0),
            lo: self.lo.unwrap_or(d.lo),
            hi: self.hi.unwrap_or(d.hi),
            ..d
        }
    }

    pub fn suite_config(&self) -> SuiteConfig {
        let d = SuiteConfig::default();
        SuiteConfig {
            nk: self.nk.clone(),
            l: self.l,
            alphas: self.alpha.map(|a| vec![a]).unwrap_or(d.alphas),
            lambdas: self.lambda.map(|l| vec![l]).unwrap_or(d.lambdas),
            seed: self.seed.unwrap_or(d.seed),
            count: self.count.unwrap_or(d.count),
            quad: self.quad(),
            tol: self.tol,
            field: self.field.clone(),
            params: self.params(),
        }
    }

    pub fn sweep_config(&self) -> SweepConfig {
        let d = SweepConfig::default();
        SweepConfig {
            nk: self.nk.clone().unwrap_or(d.nk),
            base: self.base.clone().unwrap_or(d.base),
            perturbation: self.perturbation.clone().unwrap_or(d.perturbation),
            params: self.params(),
            eps_min: self.eps_min.unwrap_or(d.eps_min),
            eps_max: self.eps_max.unwrap_or(d.eps_max),
            count: self.points.unwrap_or(d.count),
            quad: self.quad(),
        }
    }

    fn format(&self) -> Format {
        self.format.unwrap_or(Format::Json)
    }
}

/// Output of `deficit`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DeficitOutput {
    pub version: String,
    pub config_echo: Flags,
    pub field: String,
    pub nk: String,
    pub deficits: DeficitReport,
    pub dist_to_e: ProjectionResult,
    pub dist_to_affine: ProjectionResult,
}

impl DeficitOutput {
    /// One header row and one data row.
    pub fn to_csv(&self) -> String {
        let d = &self.deficits;
        let opt = |v: Option<f64>| v.map(fmt17).unwrap_or_default();
        let cols: Vec<(&str, String)> = vec![
            ("field", self.field.clone()),
            ("nk", format!("\"{}\"", self.nk)),
            ("backend", d.backend.name().to_string()),
            ("mass", fmt17(d.core.mass)),
            ("moment", fmt17(d.core.moment)),
            ("energy", fmt17(d.core.energy)),
            ("rho1", fmt17(d.rho1)),
            ("alpha", fmt17(d.alpha)),
            ("additive", fmt17(d.additive)),
            ("identity_rhs", opt(d.identity_rhs)),
            ("residual", opt(d.residual)),
            ("alpha_star", opt(d.alpha_star)),
            ("dist_e", fmt17(self.dist_to_e.dist_sq)),
            ("dist_e_beta", fmt17(self.dist_to_e.beta)),
            ("dist_affine", fmt17(self.dist_to_affine.dist_sq)),
            ("dist_affine_beta", fmt17(self.dist_to_affine.beta)),
        ];
        let (h, v): (Vec<&str>, Vec<String>) = cols.into_iter().unzip();
        format!("{}\n{}\n", h.join(","), v.join(","))
    }
}

pub fn deficit_output(field_name: &str, flags: &Flags) -> Result<DeficitOutput> {
    let nk = flags.nk.clone().unwrap_or_else(|| "2,1".into());
    let spec: OrthantSpec = nk.parse()?;
    let quad = flags.quad();
    quad.validate()?;
    let field = catalog_get(field_name, spec, &flags.params())?;
    let backend = match &flags.backend {
        Some(b) => b.parse()?,
        None if field.exact_form().is_some() => Backend::Oracle,
        None => Backend::Quadrature,
    };
    if let Some(a) = flags.alpha {
        if !(a > 0.0) {
            return Err(Error::Parameter(format!("alpha must be positive, got {a}")));
        }
    }
    Ok(DeficitOutput {
        version: REPORT_VERSION.to_string(),
        config_echo: flags.clone(),
        field: field.label().to_string(),
        nk: spec.to_string(),
        deficits: deficit_report(&field, flags.alpha, backend, &quad)?,
        dist_to_e: dist_to_e(&field, &quad)?,
        dist_to_affine: dist_to_affine_family(&field, &quad)?,
    })
}

pub fn rule_csv(kind: RuleKind, flags: &Flags) -> Result<String> {
    let m = flags.points.or(flags.order).unwrap_or(10);
    let rule: AxisRule = match kind {
        RuleKind::Hermite => (*hermite_rule(m)?).clone(),
        RuleKind::Half => (*half_range_rule(m, flags.a.unwrap_or(0.0))?).clone(),
        RuleKind::Legendre => composite_legendre_rule(m, 1, flags.lo.unwrap_or(-1.0), flags.hi.unwrap_or(1.0))?,
    };
    let mut out = String::from("index,node,weight\n");
    for (i, (x, w)) in rule.nodes.iter().zip(&rule.weights).enumerate() {
        out.push_str(&format!("{i},{},{}\n", fmt17(*x), fmt17(*w)));
    }
    Ok(out)
}

fn usage_code(e: &Error) -> i32 {
    match e {
        Error::Parameter(_) | Error::Catalog(_) | Error::Domain(_) | Error::Capability(_) => EXIT_USAGE,
        _ => EXIT_VIOLATION,
    }
}

fn emit(flags: &Flags, body: &str, out: &mut dyn Write) -> Result<()> {
    match &flags.out {
        Some(path) => fs::write(path, body)
            .map_err(|e| Error::Parameter(format!("cannot write {}: {e}", path.display()))),
        None => {
            let _ = out.write_all(body.as_bytes());
            Ok(())
        }
    }
}

fn execute(command: Command, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    match command {
        Command::Verify { suite, flags } => {
            let flags = flags.resolve()?;
            let suite: SuiteName = suite.parse()?;
            let report = run_suite(suite, &flags.suite_config())?;
            let body = match flags.format() {
                Format::Json => report.to_json(),
                Format::Csv => report.to_csv(),
            };
            emit(&flags, &body, out)?;
            let table = report.table();
            if flags.out.is_some() {
                let _ = out.write_all(table.as_bytes());
            } else {
                let _ = err.write_all(table.as_bytes());
            }
            Ok(if report.all_pass() { EXIT_PASS } else { EXIT_VIOLATION })
        }
        Command::Deficit { name, flags } => {
            let flags = flags.resolve()?;
            let d = deficit_output(&name, &flags)?;
            let body = match flags.format() {
                Format::Json => to_json_17(&d),
                Format::Csv => d.to_csv(),
            };
            emit(&flags, &body, out)?;
            Ok(EXIT_PASS)
        }
        Command::Sweep { flags } => {
            let flags = flags.resolve()?;
            let table = run_sweep(&flags.sweep_config())?;
            let body = match flags.format.unwrap_or(Format::Csv) {
                Format::Json => table.to_json(),
                Format::Csv => table.to_csv(),
            };
            emit(&flags, &body, out)?;
            for r in table.rows.iter().filter(|r| !r.violations.is_empty()) {
                let _ = writeln!(err, "violation at epsilon {}: {}", fmt17(r.epsilon), r.violations.join(", "));
            }
            Ok(if table.violation_count() == 0 { EXIT_PASS } else { EXIT_VIOLATION })
        }
        Command::Rule { kind, flags } => {
            let flags = flags.resolve()?;
            emit(&flags, &rule_csv(kind, &flags)?, out)?;
            Ok(EXIT_PASS)
        }
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_PASS };
            let _ = if e.use_stderr() { write!(err, "{e}") } else { write!(out, "{e}") };
            return code;
        }
    };
    match execute(cli.command, out, err) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            usage_code(&e)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn call(args: &[&str]) -> (i32, String, String) {
        let (mut o, mut e) = (Vec::new(), Vec::new());
        let code = run(std::iter::once("orthant-hup").chain(args.iter().copied()), &mut o, &mut e);
        (code, String::from_utf8(o).unwrap(), String::from_utf8(e).unwrap())
    }

    #[test]
    fn deficit_of_extremal_is_zero() {
        let (code, out, _) = call(&["deficit", "extremal", "--nk", "1,1", "--beta", "0.5", "--order", "24"]);
        assert_eq!(code, 0);
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert!(v["deficits"]["rho1"].as_f64().unwrap().abs() < 1e-12);
    }

    #[test]
    fn usage_errors_exit_2() {
        assert_eq!(call(&["verify", "nonsense"]).0, 2);
        assert_eq!(call(&["deficit", "gaussian"]).0, 2);
        assert_eq!(call(&["deficit", "extremal", "--nk", "1"]).0, 2);
        assert_eq!(call(&["sweep", "--eps-min", "1", "--eps-max", "0"]).0, 2);
    }

    #[test]
    fn rule_dump() {
        let (code, out, _) = call(&["rule", "hermite", "--points", "3"]);
        assert_eq!(code, 0);
        assert_eq!(out.lines().count(), 4);
        assert!(out.lines().nth(2).unwrap().starts_with("1,0.0000000000000000e0,"));
    }

    #[test]
    fn flags_override_config() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.json");
        fs::write(&path, r#"{"nk": "1,1", "beta": 0.25, "order": 24}"#).unwrap();
        let f = Flags { config: Some(path.clone()), beta: Some(2.0), ..Default::default() }.resolve().unwrap();
        assert_eq!(f.nk.as_deref(), Some("1,1"));
        assert_eq!(f.beta, Some(2.0));
        fs::write(&path, r#"{"bogus": 1}"#).unwrap();
        assert!(Flags { config: Some(path), ..Default::default() }.resolve().is_err());
    }
}
