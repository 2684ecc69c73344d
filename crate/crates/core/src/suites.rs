//! The verification suites behind `verify`: identity, lifting, Poincaré and
//! stability. Each returns a [`Report`] whose cases carry a signed margin,
//! non-negative when the checked relation holds within tolerance.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::catalog::{self, AffineMember, CatalogParams, MAX_RANDOM_DEGREE, SUITE_SPECS};
use crate::deficits::{
    additive_from, envelope_search, full_space_deficits, identity_residual, optimal_alpha_from, rho1_from,
};
use crate::domain::{make_extremal, OrthantSpec, ScaledGaussianMeasure, TestField, WeightExponents};
use crate::error::{Error, Result};
use crate::functionals::{core_functionals, Backend};
use crate::lifting::{
    cartesian_lifted_integral, radial_lifted_integral, verify_dilation_pairing, verify_gradient_lift,
    verify_gradient_lift_weighted, verify_mass_lift, verify_moment_lift, LiftCheck, LiftPlan, LiftedIntegral,
};
use crate::poincare::{
    deficit_poincare_form, poincare_gap_from, poincare_stability_from, polynomial_stats, rayleigh_from,
    MeasureStats,
};
use crate::poly::Polynomial;
use crate::quadrature::QuadConfig;
use crate::report::{CaseResult, Report};
use crate::stability::{
    stability_report, StabilityReport, ADDITIVE_VS_CENTERED, ADDITIVE_VS_GRADIENT_NORM, RHO1_VS_CONSTRAINED,
    RHO1_VS_EXTREMAL,
};
use crate::tolerances::*;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SuiteName {
    Identity,
    Lifting,
    Poincare,
    Stability,
    All,
}

impl SuiteName {
    pub fn as_str(&self) -> &'static str {
        match self {
            SuiteName::Identity => "identity",
            SuiteName::Lifting => "lifting",
            SuiteName::Poincare => "poincare",
            SuiteName::Stability => "stability",
            SuiteName::All => "all",
        }
    }
}

impl std::str::FromStr for SuiteName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "identity" => Ok(SuiteName::Identity),
            "lifting" => Ok(SuiteName::Lifting),
            "poincare" => Ok(SuiteName::Poincare),
            "stability" => Ok(SuiteName::Stability),
            "all" => Ok(SuiteName::All),
            other => Err(Error::Parameter(format!("unknown suite '{other}'"))),
        }
    }
}

/// Everything a suite run depends on; echoed verbatim into the report.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SuiteConfig {
    /// `"n,k"`; `None` runs every orthant of the default suite.
    pub nk: Option<String>,
    /// Lift exponent applied to every wall.
    pub l: Option<u32>,
    pub alphas: Vec<f64>,
    pub lambdas: Vec<f64>,
    pub seed: u64,
    /// Random fields per orthant.
    pub count: usize,
    pub quad: QuadConfig,
    /// Overrides the suite's default tolerance.
    pub tol: Option<f64>,
    /// A catalogue entry to check instead of the random suite.
    pub field: Option<String>,
    pub params: CatalogParams,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            nk: None,
            l: None,
            alphas: vec![0.5, 1.0, 2.0],
            lambdas: vec![0.5, 1.0, 2.0],
            seed: 0,
            count: 10,
            quad: QuadConfig::default(),
            tol: None,
            field: None,
            params: CatalogParams::default(),
        }
    }
}

impl SuiteConfig {
    pub fn specs(&self) -> Result<Vec<OrthantSpec>> {
        match &self.nk {
            Some(s) => Ok(vec![s.parse()?]),
            None => SUITE_SPECS.iter().map(|(n, k)| OrthantSpec::new(*n, *k)).collect(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.quad.validate()?;
        self.specs()?;
        if self.alphas.iter().chain(&self.lambdas).any(|a| !(*a > 0.0) || !a.is_finite()) {
            return Err(Error::Parameter("alphas and lambdas must be positive".into()));
        }
        if let Some(t) = self.tol {
            if !(t > 0.0) {
                return Err(Error::Parameter(format!("tolerance must be positive, got {t}")));
            }
        }
        if let Some(name) = &self.field {
            if !catalog::NAMES.contains(&name.as_str()) {
                return Err(Error::Catalog(format!("unknown field '{name}'")));
            }
        }
        Ok(())
    }

    fn tol_or(&self, default: f64) -> f64 {
        self.tol.unwrap_or(default)
    }

    fn field_seed(&self, spec: &OrthantSpec) -> u64 {
        self.seed + catalog::suite_seed(*spec)
    }
}

fn backend_of(field: &TestField) -> Backend {
    if field.exact_form().is_some() {
        Backend::Oracle
    } else {
        Backend::Quadrature
    }
}

fn or_failed(name: String, nk: String, backend: &str, r: Result<CaseResult>) -> CaseResult {
    r.unwrap_or_else(|e| CaseResult::failed(name, nk, backend, &e.to_string()))
}

/// Runs one suite (or all of them) and assembles the report.
pub fn run_suite(suite: SuiteName, cfg: &SuiteConfig) -> Result<Report> {
    cfg.validate()?;
    let cases = match suite {
        SuiteName::Identity => identity_cases(cfg)?,
        SuiteName::Lifting => lifting_cases(cfg)?,
        SuiteName::Poincare => poincare_cases(cfg)?,
        SuiteName::Stability => stability_cases(cfg)?,
        SuiteName::All => {
            let mut all = identity_cases(cfg)?;
            all.extend(lifting_cases(cfg)?);
            all.extend(poincare_cases(cfg)?);
            all.extend(stability_cases(cfg)?);
            all
        }
    };
    let echo = serde_json::to_value(cfg).expect("config serializes");
    Ok(Report::new(suite.as_str(), echo, cases))
}

fn selected_fields(cfg: &SuiteConfig, spec: OrthantSpec) -> Result<Vec<TestField>> {
    match &cfg.field {
        Some(name) => Ok(vec![catalog::catalog_get(name, spec, &cfg.params)?]),
        None => catalog::random_suite(spec, cfg.count, cfg.field_seed(&spec)),
    }
}

// ---------------------------------------------------------------- identity

fn identity_cases(cfg: &SuiteConfig) -> Result<Vec<CaseResult>> {
    let tol = cfg.tol_or(IDENTITY_RESIDUAL);
    let mut jobs = Vec::new();
    for spec in cfg.specs()? {
        let mut fields = selected_fields(cfg, spec)?;
        if cfg.field.is_none() {
            fields.push(make_extremal(spec, 1.0, 0.5)?);
        }
        jobs.extend(fields.into_iter().map(|f| (spec, f)));
    }
    let cases: Vec<Vec<CaseResult>> = jobs
        .par_iter()
        .map(|(spec, f)| {
            let nk = spec.to_string();
            let backend = backend_of(f);
            let mut out = Vec::new();
            for &alpha in &cfg.alphas {
                let name = format!("identity/{nk}/{}/alpha={alpha}", f.label());
                let r = (|| {
                    let core = core_functionals(f, backend, &cfg.quad)?;
                    let additive = additive_from(&core, alpha)?;
                    let residual = identity_residual(f, alpha, backend, &cfg.quad)?;
                    Ok(CaseResult::new(name.clone(), nk.clone(), backend.name())
                        .value("additive", additive)
                        .value("identity_rhs", additive - residual)
                        .value("residual", residual)
                        .margin(tol * (1.0 + additive.abs()) - residual.abs()))
                })();
                out.push(or_failed(name, nk.clone(), backend.name(), r));
            }
            let name = format!("identity/{nk}/{}/envelope", f.label());
            let r = (|| {
                let core = core_functionals(f, backend, &cfg.quad)?;
                let rho1 = rho1_from(&core);
                let a_star = optimal_alpha_from(&core)?;
                let half_star = 0.5 * additive_from(&core, a_star)?;
                let search = envelope_search(&core);
                let err = (half_star - rho1).abs().max((0.5 * search.value - rho1).abs());
                Ok(CaseResult::new(name.clone(), nk.clone(), backend.name())
                    .value("rho1", rho1)
                    .value("alpha_star", a_star)
                    .value("half_additive_at_alpha_star", half_star)
                    .value("half_additive_golden", 0.5 * search.value)
                    .value("alpha_golden", search.x)
                    .margin(cfg.tol_or(ENVELOPE) * core.scale() - err))
            })();
            out.push(or_failed(name, nk, backend.name(), r));
            out
        })
        .collect();
    Ok(cases.into_iter().flatten().collect())
}

// ---------------------------------------------------------------- lifting

fn lift_case(name: String, nk: &str, backend: &str, tol: f64, r: Result<LiftCheck>) -> CaseResult {
    let r = r.map(|c| {
        CaseResult::new(name.clone(), nk, backend)
            .value("lhs", c.lhs)
            .value("rhs", c.rhs)
            .value("gap", c.gap)
            .margin(tol - c.gap)
    });
    or_failed(name, nk.to_string(), backend, r)
}

/// Whether the block-radial lift of `field` is smooth, which the Cartesian
/// tensor grid needs: bumps must stay off the walls, and the residual of an
/// exact field may carry only even powers of the wall variables (an odd power
/// lifts to a kink `|y|` at the block origin).
pub fn lift_is_smooth(field: &TestField) -> bool {
    let spec = field.spec();
    if let Some(b) = field.support() {
        return spec.wall_axes().all(|i| b.lo[i] > 0.0);
    }
    let Some(u) = field.exact_form() else { return false };
    match u.poly().div_monomial(field.wall_exponents()) {
        Some(v) => v.terms().all(|(m, _)| spec.wall_axes().all(|i| m[i] % 2 == 0)),
        None => false,
    }
}

fn lifting_cases(cfg: &SuiteConfig) -> Result<Vec<CaseResult>> {
    let specs = match &cfg.nk {
        Some(_) => cfg.specs()?,
        None => vec![OrthantSpec::new(1, 1)?, OrthantSpec::new(2, 1)?],
    };
    let ls: Vec<u32> = match cfg.l {
        Some(l) => vec![l],
        None => vec![1, 2],
    };
    let mut jobs: Vec<(OrthantSpec, u32, TestField)> = Vec::new();
    for spec in &specs {
        for &l in &ls {
            let exact = catalog::polygauss_random(*spec, cfg.field_seed(spec) + l as u64, MAX_RANDOM_DEGREE, l)?;
            jobs.push((*spec, l, exact));
            if l == 1 {
                jobs.push((*spec, l, make_extremal(*spec, 1.0, 0.5)?));
            }
            jobs.push((*spec, l, catalog::bump(*spec, cfg.params.lo, cfg.params.hi, l)?));
        }
    }
    let cases: Vec<Vec<CaseResult>> = jobs
        .par_iter()
        .map(|(spec, l, f)| {
            let nk = spec.to_string();
            let is_bump = f.support().is_some();
            let backend = if is_bump { "quadrature" } else { "oracle" };
            let tol = cfg.tol_or(if is_bump { LIFT_BUMP_GAP } else { LIFT_EXACT_GAP });
            let prefix = format!("lifting/{nk}/l={l}/{}", f.label());
            let plan = match LiftPlan::uniform(*spec, *l) {
                Ok(p) => p,
                Err(e) => return vec![CaseResult::failed(prefix, nk, backend, &e.to_string())],
            };
            let q = &cfg.quad;
            let mut out = vec![lift_case(format!("{prefix}/mass"), &nk, backend, tol, verify_mass_lift(f, &plan, q))];
            for a in [1.0, 2.0] {
                out.push(lift_case(format!("{prefix}/moment(a={a})"), &nk, backend, tol, verify_moment_lift(f, &plan, a, q)));
            }
            if is_bump {
                for b in [0.0, 1.0] {
                    out.push(lift_case(format!("{prefix}/gradient(b={b})"), &nk, backend, tol, verify_gradient_lift(f, &plan, b, q)));
                    out.push(lift_case(
                        format!("{prefix}/gradient_weighted(b={b})"),
                        &nk,
                        backend,
                        tol,
                        verify_gradient_lift_weighted(f, &plan, b, q),
                    ));
                }
            }
            if *l == 1 {
                out.push(lift_case(format!("{prefix}/dilation"), &nk, backend, tol, verify_dilation_pairing(f, &plan, q)));
            }
            if plan.lifted_dim() <= 4 && lift_is_smooth(f) {
                let mut whats = vec![("moment(a=0)", LiftedIntegral::Moment(0.0)), ("moment(a=1)", LiftedIntegral::Moment(1.0))];
                if is_bump {
                    whats.push(("gradient(b=0)", LiftedIntegral::Gradient(0.0)));
                }
                for (label, what) in whats {
                    let r = (|| {
                        let cart = cartesian_lifted_integral(f, &plan, what, q)?;
                        let radial = radial_lifted_integral(f, &plan, what, q)?;
                        Ok(LiftCheck::new(cart, radial))
                    })();
                    out.push(lift_case(format!("{prefix}/cartesian_{label}"), &nk, backend, cfg.tol_or(LIFT_BUMP_GAP), r));
                }
            }
            out
        })
        .collect();
    Ok(cases.into_iter().flatten().collect())
}

// ---------------------------------------------------------------- poincare

/// Weight-exponent patterns of the Poincaré suite.
pub const POINCARE_WEIGHTS: [&[f64]; 3] = [&[0.0, 2.0], &[2.0, 2.0], &[0.0, 0.0, 2.0]];

fn restricted_affine(a: &[f64], seed: u64) -> Polynomial {
    let n = a.len();
    let mut p = Polynomial::constant(n, 0.3 + 0.1 * (seed % 7) as f64);
    for (i, ai) in a.iter().enumerate() {
        if *ai == 0.0 {
            p = p.add(&Polynomial::coordinate(n, i).scale(1.0 - 0.25 * i as f64));
        }
    }
    p
}

fn poincare_case(name: String, nk: &str, stats: &MeasureStats, exact: Option<&MeasureStats>) -> Result<Vec<CaseResult>> {
    let lambda = stats.lambda;
    let q = rayleigh_from(stats)?;
    let stab = poincare_stability_from(stats);
    let gap = poincare_gap_from(stats);
    let mut out = vec![
        CaseResult::new(format!("{name}/quotient"), nk, "oracle")
            .value("quotient", q)
            .value("bound", 1.0 / (lambda * lambda))
            .margin(q - 1.0 / (lambda * lambda) + POINCARE_QUOTIENT),
        CaseResult::new(format!("{name}/stability"), nk, "oracle")
            .value("lhs_gap", stab.lhs_gap)
            .value("rhs_bound", stab.rhs_bound)
            .value("margin", stab.margin)
            .margin(stab.margin + POINCARE_STABILITY * stab.scale),
    ];
    let eq_quotient = (q - 1.0 / (lambda * lambda)).abs() <= POINCARE_QUOTIENT;
    let eq_affine = stats.is_restricted_affine(POINCARE_QUOTIENT);
    out.push(
        CaseResult::new(format!("{name}/equality_detection"), nk, "oracle")
            .value("quotient_gap", gap.gap)
            .value("affine_residual", stats.affine_residual())
            .value("variance", stats.variance)
            .margin(if eq_quotient == eq_affine { 0.0 } else { -1.0 }),
    );
    if let Some(ex) = exact {
        let rel = [
            (stats.mean, ex.mean),
            (stats.variance, ex.variance),
            (stats.dirichlet, ex.dirichlet),
        ]
        .iter()
        .map(|(a, b)| (a - b).abs() / b.abs().max(ex.second_moment))
        .fold(0.0, f64::max);
        out.push(
            CaseResult::new(format!("{name}/backend_agreement"), nk, "quadrature")
                .value("rel_diff", rel)
                .margin(BACKEND_AGREEMENT - rel),
        );
    }
    Ok(out)
}

fn poincare_cases(cfg: &SuiteConfig) -> Result<Vec<CaseResult>> {
    let mut jobs: Vec<(String, ScaledGaussianMeasure, Polynomial)> = Vec::new();
    for a in POINCARE_WEIGHTS {
        let tag = a.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",");
        for &lambda in &cfg.lambdas {
            let m = ScaledGaussianMeasure::new(WeightExponents::new(a.to_vec())?, lambda)?;
            for i in 0..cfg.count as u64 {
                let seed = cfg.seed + 500 + i;
                let p = catalog::random_polynomial(a.len(), MAX_RANDOM_DEGREE, seed);
                jobs.push((format!("poincare/A=({tag})/lambda={lambda}/random(seed={seed})"), m.clone(), p));
            }
            if a.contains(&0.0) {
                jobs.push((format!("poincare/A=({tag})/lambda={lambda}/restricted_affine"), m.clone(), restricted_affine(a, 1)));
            }
            let all_linear = (0..a.len()).fold(Polynomial::constant(a.len(), 0.5), |p, i| p.add(&Polynomial::coordinate(a.len(), i)));
            jobs.push((format!("poincare/A=({tag})/lambda={lambda}/full_linear"), m.clone(), all_linear));
        }
    }
    let cases: Vec<Vec<CaseResult>> = jobs
        .par_iter()
        .map(|(name, m, p)| {
            let nk = m.dim().to_string();
            let r = (|| {
                let exact = polynomial_stats(p, m)?;
                let quad = crate::poincare::measure_stats(p, m, &cfg.quad)?;
                let mut out = poincare_case(name.clone(), &nk, &exact, None)?;
                out.extend(poincare_case(format!("{name}/quadrature"), &nk, &quad, Some(&exact))?);
                Ok(out)
            })();
            r.unwrap_or_else(|e: Error| vec![CaseResult::failed(name.clone(), nk, "oracle", &e.to_string())])
        })
        .collect();
    let mut out: Vec<CaseResult> = cases.into_iter().flatten().collect();

    // closed form for A = (2), λ = 1, f = x
    let m = ScaledGaussianMeasure::new(WeightExponents::new(vec![2.0])?, 1.0)?;
    let x = Polynomial::coordinate(1, 0);
    let expected = 1.0 / (3.0 - 8.0 / PI);
    for (backend, stats) in [
        ("oracle", polynomial_stats(&x, &m)),
        ("quadrature", crate::poincare::measure_stats(&x, &m, &cfg.quad)),
    ] {
        let name = format!("poincare/closed_form/A=(2)/{backend}");
        let r = stats.and_then(|s| rayleigh_from(&s)).map(|q| {
            let rel = (q - expected).abs() / expected;
            CaseResult::new(name.clone(), "1", backend)
                .value("quotient", q)
                .value("expected", expected)
                .margin(cfg.tol_or(1e-10) - rel)
        });
        out.push(or_failed(name, "1".into(), backend, r));
    }

    // the additive deficit as a weighted Dirichlet form
    for spec in cfg.specs()? {
        let fields = catalog::random_suite(spec, cfg.count.min(4), cfg.field_seed(&spec) + 77)?;
        let rs: Vec<CaseResult> = fields
            .par_iter()
            .map(|f| {
                let nk = spec.to_string();
                let name = format!("poincare/deficit_form/{nk}/{}", f.label());
                let r = deficit_poincare_form(f, &cfg.quad).map(|c| {
                    CaseResult::new(name.clone(), nk.clone(), "quadrature")
                        .value("additive", c.additive)
                        .value("poincare_form", c.poincare_form)
                        .value("normalization", c.normalization)
                        .value("rel_gap", c.rel_gap)
                        .margin(IDENTITY_RESIDUAL - c.rel_gap)
                });
                or_failed(name, nk, "quadrature", r)
            })
            .collect();
        out.extend(rs);
    }
    Ok(out)
}

// ---------------------------------------------------------------- stability

/// Shape of a field from the affine equality family `(b_0 + b·x)·w·e^{-B|x|²}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AffineShape {
    /// `B = 1/2`.
    pub unit_scale: bool,
    /// `b = 0`.
    pub flat: bool,
    /// `b_0 = 0`.
    pub pure_slope: bool,
}

impl AffineShape {
    fn of(m: &AffineMember) -> Self {
        Self { unit_scale: m.big_b == 0.5, flat: m.is_flat(), pure_slope: m.b0 == 0.0 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum FieldKind {
    Affine(AffineShape),
    Generic,
}

/// Which of the four main stability inequalities a field attains with
/// equality. Every affine member is an equality for the extremal distance;
/// at `B = 1/2` also for the centred and gradient-norm estimates; and, by
/// dilation covariance, pure slopes `(b·x)·w·e^{-B|x|²}` and extremals are
/// equalities for the constrained estimate at every `B`.
pub fn expected_equalities(kind: FieldKind) -> [(&'static str, bool); 4] {
    let (affine, s) = match kind {
        FieldKind::Affine(s) => (true, s),
        FieldKind::Generic => (false, AffineShape { unit_scale: false, flat: false, pure_slope: false }),
    };
    [
        (RHO1_VS_EXTREMAL, affine),
        (ADDITIVE_VS_CENTERED, affine && s.unit_scale),
        (RHO1_VS_CONSTRAINED, affine && (s.flat || s.pure_slope)),
        (ADDITIVE_VS_GRADIENT_NORM, affine && s.unit_scale),
    ]
}

fn stability_field_cases(nk: &str, f: &TestField, kind: FieldKind, r: &StabilityReport, tol: f64) -> Vec<CaseResult> {
    let backend = r.core.backend.name();
    let mut out = Vec::new();
    for c in &r.checks {
        let mut case = CaseResult::new(format!("stability/{nk}/{}/{}", f.label(), c.name), nk, backend);
        if c.name == RHO1_VS_CONSTRAINED {
            case = case.value("constrained_dist_sq", 2.0 * c.rhs);
        }
        out.push(
            case.value("lhs", c.lhs)
                .value("rhs", c.rhs)
                .value("scale", c.scale)
                .value("rho1", r.rho1)
                .value("equality", if c.equality { 1.0 } else { 0.0 })
                .margin(c.margin + tol * c.scale),
        );
    }
    for (name, expected) in expected_equalities(kind) {
        if let Some(c) = r.check(name) {
            out.push(
                CaseResult::new(format!("stability/{nk}/{}/equality/{name}", f.label()), nk, backend)
                    .value("margin", c.margin)
                    .value("scale", c.scale)
                    .value("expected", if expected { 1.0 } else { 0.0 })
                    .value("detected", if c.equality { 1.0 } else { 0.0 })
                    .margin(if c.equality == expected { 0.0 } else { -1.0 }),
            );
        }
    }
    out
}

fn stability_cases(cfg: &SuiteConfig) -> Result<Vec<CaseResult>> {
    let tol = cfg.tol_or(STABILITY_MARGIN);
    let mut jobs: Vec<(OrthantSpec, TestField, FieldKind)> = Vec::new();
    for spec in cfg.specs()? {
        match cfg.field.as_deref() {
            Some(name) => {
                let f = catalog::catalog_get(name, spec, &cfg.params)?;
                let p = &cfg.params;
                let member = match name {
                    "sharp_example" if spec.n() > spec.k() => {
                        let mut b = vec![0.0; spec.n() - spec.k()];
                        b[0] = 1.0;
                        Some(AffineMember { b, b0: 0.0, big_b: 0.5 })
                    }
                    "affine_equality" => {
                        let b = if p.b.is_empty() { vec![1.0; spec.n() - spec.k()] } else { p.b.clone() };
                        Some(AffineMember { b, b0: p.b0, big_b: p.big_b })
                    }
                    "extremal" if p.c != 0.0 => Some(AffineMember { b: vec![], b0: p.c, big_b: p.beta }),
                    _ => None,
                };
                let kind = member.map(|m| FieldKind::Affine(AffineShape::of(&m))).unwrap_or(FieldKind::Generic);
                jobs.push((spec, f, kind));
            }
            None => {
                for f in catalog::random_suite(spec, cfg.count, cfg.field_seed(&spec))? {
                    jobs.push((spec, f, FieldKind::Generic));
                }
                for m in catalog::equality_member_params(spec) {
                    jobs.push((spec, m.field(spec)?, FieldKind::Affine(AffineShape::of(&m))));
                }
                if spec.n() > spec.k() {
                    let mut b = vec![0.0; spec.n() - spec.k()];
                    b[0] = 1.0;
                    let shape = AffineShape::of(&AffineMember { b, b0: 0.0, big_b: 0.5 });
                    jobs.push((spec, catalog::sharp_example(spec)?, FieldKind::Affine(shape)));
                }
            }
        }
    }
    let cases: Vec<Vec<CaseResult>> = jobs
        .par_iter()
        .map(|(spec, f, kind)| {
            let nk = spec.to_string();
            match stability_report(f, &cfg.quad) {
                Ok(r) => stability_field_cases(&nk, f, *kind, &r, tol),
                Err(e) => vec![CaseResult::failed(format!("stability/{nk}/{}", f.label()), nk, backend_of(f).name(), &e.to_string())],
            }
        })
        .collect();
    let mut out: Vec<CaseResult> = cases.into_iter().flatten().collect();
    if cfg.nk.is_none() && cfg.field.is_none() {
        out.extend(full_space_cases(cfg)?);
    }
    Ok(out)
}

/// `δ₂ ≥ n·N·d² + d⁴` on random full-space fields.
fn full_space_cases(cfg: &SuiteConfig) -> Result<Vec<CaseResult>> {
    let fields = catalog::full_space_suite(cfg.count)?;
    let tol = cfg.tol_or(STABILITY_MARGIN);
    Ok(fields
        .par_iter()
        .map(|f| {
            let nk = f.spec().to_string();
            let name = format!("full_space/{nk}/{}", f.label());
            let r = full_space_deficits(f, Backend::Oracle, &cfg.quad).map(|d| {
                let n = f.spec().n() as f64;
                let rhs = n * d.core.mass * d.dist_sq + d.dist_sq * d.dist_sq;
                let scale = d.core.scale().powi(2);
                CaseResult::new(name.clone(), nk.clone(), "oracle")
                    .value("delta1", d.delta1)
                    .value("delta2", d.delta2)
                    .value("dist_sq", d.dist_sq)
                    .value("rhs", rhs)
                    .margin(d.delta2 - rhs + tol * scale)
            });
            or_failed(name, nk, "oracle", r)
        })
        .collect())
}
