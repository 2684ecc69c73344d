//! Distances from a field to the extremal family `c·w·e^{-β|x|²}`, to the
//! affine family `w·e^{-β|x|²}(b + Σ b_i x_i)` over unweighted axes, and to
//! fixed-scale Gaussians.
//!
//! Every variable-scale distance reduces to maximizing
//! `r(β) = bᵀ G⁻¹ b` with `b_j = ⟨u, φ_j⟩` and `G_ij = ⟨φ_i, φ_j⟩` over
//! `log β ∈ [ln 1e-4, ln 1e4]`; the squared distance is then `N - r(β*)`.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::domain::{OrthantSpec, TestField, MAX_DIM};
use crate::error::{Error, Result};
use crate::exact_oracle;
use crate::functionals::{core_functionals, integrate_decaying, Backend};
use crate::optimize::maximize;
use crate::poly::{PolyGauss, Polynomial};
use crate::quadrature::QuadConfig;

const LOG_BETA_RANGE: (f64, f64) = (-9.210_340_371_976_184, 9.210_340_371_976_184);
const STARTS: usize = 8;
const AGREEMENT: f64 = 1e-8;
const MAX_CONDITION: f64 = 1e12;

/// Which family a [`ProjectionResult`] refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    /// `c·w·e^{-β|x|²}`, `c ∈ ℝ`, `β > 0`.
    Extremal,
    /// `w·e^{-β|x|²}(b + Σ b_i x_i)` over unweighted axes.
    Affine,
    /// Extremals with `‖ω‖² = ‖u‖²`.
    Constrained,
    /// `c·w·e^{-|x|²/(2λ²)}` at fixed `λ`.
    GaussianCenter,
    /// Affine family at fixed `λ`.
    AffineCenter,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub bracket: (f64, f64),
    pub iterations: usize,
    pub starts: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProjectionResult {
    pub family: Family,
    /// `c*` for one-parameter families, `(b, b_1, …, b_{n-k})` for affine ones.
    pub coefficients: Vec<f64>,
    pub beta: f64,
    pub lambda: Option<f64>,
    /// Sign of the optimal `ω` for the norm-constrained family.
    pub sign: Option<f64>,
    pub dist_sq: f64,
    pub diagnostics: Option<Diagnostics>,
}

/// Monomials multiplying `w·e^{-β|x|²}` in a family basis.
fn family_monomials(spec: &OrthantSpec, affine: bool) -> Vec<Vec<u32>> {
    let w = spec.wall_monomial();
    let mut out = vec![w.clone()];
    if affine {
        for i in spec.free_axes() {
            let mut m = w.clone();
            m[i] += 1;
            out.push(m);
        }
    }
    out
}

fn basis(monomials: &[Vec<u32>], beta: f64) -> Result<Vec<PolyGauss>> {
    monomials
        .iter()
        .map(|m| PolyGauss::new(2.0 * beta, Polynomial::monomial(m.clone(), 1.0)))
        .collect()
}

/// `(b, b')` with `b_j = ⟨u, φ_j⟩` and `b'_j = d b_j / dβ = -⟨u, |x|² φ_j⟩`.
fn field_inner(field: &TestField, phis: &[PolyGauss], beta: f64, cfg: &QuadConfig) -> Result<(Vec<f64>, Vec<f64>)> {
    let spec = field.spec();
    let region = spec.region();
    if let Some(u) = field.exact_form() {
        let mut b = Vec::with_capacity(phis.len());
        let mut bp = Vec::with_capacity(phis.len());
        for p in phis {
            b.push(exact_oracle::inner(u, p, &region)?);
            bp.push(-exact_oracle::moment_inner(u, p, &region)?);
        }
        return Ok((b, bp));
    }
    let n = spec.n();
    let j = phis.len();
    let rate = field.decay_rate() / 2.0 + beta;
    let v = integrate_decaying("projection inner products", &region, rate, field.support(), cfg, 2 * j, |x, out| {
        let mut g = [0.0; MAX_DIM];
        let u = field.eval_into(x, &mut g[..n]);
        let r2: f64 = x.iter().map(|t| t * t).sum();
        for (i, p) in phis.iter().enumerate() {
            let pv = u * p.eval(x);
            out[i] = pv;
            out[j + i] = -r2 * pv;
        }
    })?;
    Ok((v[..j].to_vec(), v[j..].to_vec()))
}

fn gram(phis: &[PolyGauss], region: &crate::domain::Region) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
    let j = phis.len();
    let mut g = DMatrix::zeros(j, j);
    let mut gp = DMatrix::zeros(j, j);
    for a in 0..j {
        for b in a..j {
            let v = exact_oracle::inner(&phis[a], &phis[b], region)?;
            let d = -2.0 * exact_oracle::moment_inner(&phis[a], &phis[b], region)?;
            g[(a, b)] = v;
            g[(b, a)] = v;
            gp[(a, b)] = d;
            gp[(b, a)] = d;
        }
    }
    Ok((g, gp))
}

/// Solves `G c = b` after diagonal normalization; refuses ill-conditioned Grams.
fn solve_gram(g: &DMatrix<f64>, b: &DVector<f64>) -> Result<DVector<f64>> {
    let j = g.nrows();
    let d = DVector::from_iterator(j, (0..j).map(|i| 1.0 / g[(i, i)].sqrt()));
    let gn = DMatrix::from_fn(j, j, |r, c| g[(r, c)] * d[r] * d[c]);
    let eig = gn.clone().symmetric_eigenvalues();
    let (lo, hi) = eig.iter().fold((f64::INFINITY, 0.0f64), |(l, h), v| (l.min(*v), h.max(*v)));
    if !(lo > 0.0) || hi / lo > MAX_CONDITION {
        return Err(Error::Conditioning(if lo > 0.0 { hi / lo } else { f64::INFINITY }));
    }
    let bn = b.component_mul(&d);
    let chol = gn.cholesky().ok_or(Error::Conditioning(f64::INFINITY))?;
    Ok(chol.solve(&bn).component_mul(&d))
}

struct Evaluation {
    r: f64,
    dr: f64,
    coefficients: Vec<f64>,
}

fn evaluate(field: &TestField, monomials: &[Vec<u32>], beta: f64, cfg: &QuadConfig) -> Result<Evaluation> {
    let phis = basis(monomials, beta)?;
    let (b, bp) = field_inner(field, &phis, beta, cfg)?;
    let (g, gp) = gram(&phis, &field.spec().region())?;
    let b = DVector::from_vec(b);
    let bp = DVector::from_vec(bp);
    let c = solve_gram(&g, &b)?;
    let r = c.dot(&b);
    let dr = 2.0 * c.dot(&bp) - c.dot(&(&gp * &c));
    Ok(Evaluation { r, dr, coefficients: c.iter().copied().collect() })
}

fn check_mass(mass: f64) -> Result<()> {
    if !(mass > 0.0) {
        return Err(Error::Degenerate("projection needs a field with positive mass".into()));
    }
    Ok(())
}

fn mass_of(field: &TestField, cfg: &QuadConfig) -> Result<f64> {
    let backend = if field.exact_form().is_some() { Backend::Oracle } else { Backend::Quadrature };
    Ok(core_functionals(field, backend, cfg)?.mass)
}

/// Maximizes `r(β)` over `log β`; returns `(β*, evaluation at β*, diagnostics)`.
fn optimize_scale(
    field: &TestField,
    monomials: &[Vec<u32>],
    cfg: &QuadConfig,
) -> Result<(f64, Evaluation, Diagnostics)> {
    let failure = std::sync::Mutex::new(None::<Error>);
    let record = |e: Error| {
        let mut slot = failure.lock().expect("poisoned");
        if slot.is_none() {
            *slot = Some(e);
        }
    };
    let f = |t: f64| match evaluate(field, monomials, t.exp(), cfg) {
        Ok(e) => e.r,
        Err(e) => {
            record(e);
            f64::NEG_INFINITY
        }
    };
    let g = |t: f64| match evaluate(field, monomials, t.exp(), cfg) {
        Ok(e) => e.dr * t.exp(),
        Err(e) => {
            record(e);
            0.0
        }
    };
    let best = maximize(&f, Some(&g), LOG_BETA_RANGE.0, LOG_BETA_RANGE.1, STARTS, AGREEMENT);
    if let Some(e) = failure.into_inner().expect("poisoned") {
        return Err(e);
    }
    let best = best?;
    let beta = best.x.exp();
    let eval = evaluate(field, monomials, beta, cfg)?;
    let diag = Diagnostics {
        bracket: (LOG_BETA_RANGE.0.exp(), LOG_BETA_RANGE.1.exp()),
        iterations: best.iterations,
        starts: STARTS,
    };
    Ok((beta, eval, diag))
}

/// `inf_{c, β} ‖u - c·w·e^{-β|x|²}‖²`.
pub fn dist_to_e(field: &TestField, cfg: &QuadConfig) -> Result<ProjectionResult> {
    let mass = mass_of(field, cfg)?;
    check_mass(mass)?;
    let monomials = family_monomials(&field.spec(), false);
    let (beta, eval, diag) = optimize_scale(field, &monomials, cfg)?;
    Ok(ProjectionResult {
        family: Family::Extremal,
        coefficients: eval.coefficients,
        beta,
        lambda: None,
        sign: None,
        dist_sq: (mass - eval.r).max(0.0),
        diagnostics: Some(diag),
    })
}

/// `inf ‖u - w·e^{-β|x|²}(b + Σ_{unweighted} b_i x_i)‖²`.
pub fn dist_to_affine_family(field: &TestField, cfg: &QuadConfig) -> Result<ProjectionResult> {
    let mass = mass_of(field, cfg)?;
    check_mass(mass)?;
    let monomials = family_monomials(&field.spec(), true);
    let (beta, eval, diag) = optimize_scale(field, &monomials, cfg)?;
    Ok(ProjectionResult {
        family: Family::Affine,
        coefficients: eval.coefficients,
        beta,
        lambda: None,
        sign: None,
        dist_sq: (mass - eval.r).max(0.0),
        diagnostics: Some(diag),
    })
}

/// `inf ‖u - ω‖²` over extremals `ω` with `‖ω‖² = ‖u‖²`:
/// `2N - 2√N · max_β |⟨u, g_β⟩| / ‖g_β‖`.
pub fn dist_to_e_norm_constrained(field: &TestField, cfg: &QuadConfig) -> Result<ProjectionResult> {
    let mass = mass_of(field, cfg)?;
    check_mass(mass)?;
    let monomials = family_monomials(&field.spec(), false);
    let (beta, eval, diag) = optimize_scale(field, &monomials, cfg)?;
    let phis = basis(&monomials, beta)?;
    let norm_g = exact_oracle::inner(&phis[0], &phis[0], &field.spec().region())?.sqrt();
    let (b, _) = field_inner(field, &phis, beta, cfg)?;
    let sign = if b[0] < 0.0 { -1.0 } else { 1.0 };
    let c = sign * mass.sqrt() / norm_g;
    let overlap = eval.r.max(0.0).sqrt();
    Ok(ProjectionResult {
        family: Family::Constrained,
        coefficients: vec![c],
        beta,
        lambda: None,
        sign: Some(sign),
        dist_sq: (2.0 * mass - 2.0 * mass.sqrt() * overlap).max(0.0),
        diagnostics: Some(diag),
    })
}

fn check_lambda(lambda: f64) -> Result<()> {
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(Error::Parameter(format!("lambda must be positive, got {lambda}")));
    }
    Ok(())
}

fn fixed_scale(field: &TestField, lambda: f64, affine: bool, cfg: &QuadConfig) -> Result<ProjectionResult> {
    check_lambda(lambda)?;
    let mass = mass_of(field, cfg)?;
    check_mass(mass)?;
    let beta = 1.0 / (2.0 * lambda * lambda);
    let eval = evaluate(field, &family_monomials(&field.spec(), affine), beta, cfg)?;
    Ok(ProjectionResult {
        family: if affine { Family::AffineCenter } else { Family::GaussianCenter },
        coefficients: eval.coefficients,
        beta,
        lambda: Some(lambda),
        sign: None,
        dist_sq: (mass - eval.r).max(0.0),
        diagnostics: None,
    })
}

/// `inf_c ‖u - c·w·e^{-|x|²/(2λ²)}‖²`.
pub fn gaussian_center_dist(field: &TestField, lambda: f64, cfg: &QuadConfig) -> Result<ProjectionResult> {
    fixed_scale(field, lambda, false, cfg)
}

/// `inf_{b, b_i} ‖u - w·e^{-|x|²/(2λ²)}(b + Σ_{unweighted} b_i x_i)‖²`.
pub fn affine_center_dist(field: &TestField, lambda: f64, cfg: &QuadConfig) -> Result<ProjectionResult> {
    fixed_scale(field, lambda, true, cfg)
}

/// `inf_c [E(u - cG) + M(u - cG) + N(u - cG)]` with `G = w·e^{-|x|²/2}`.
pub fn gradient_norm_dist(field: &TestField, cfg: &QuadConfig) -> Result<f64> {
    let spec = field.spec();
    let region = spec.region();
    let g = PolyGauss::new(1.0, Polynomial::monomial(spec.wall_monomial(), 1.0))?;
    let q_g = exact_oracle::descriptor_dirichlet(&g, &region)?
        + exact_oracle::moment_inner(&g, &g, &region)?
        + exact_oracle::inner(&g, &g, &region)?;
    let (q_u, cross) = if let Some(u) = field.exact_form() {
        let core = core_functionals(field, Backend::Oracle, cfg)?;
        let cross = exact_oracle::gradient_inner(u, &g, &region)?
            + exact_oracle::moment_inner(u, &g, &region)?
            + exact_oracle::inner(u, &g, &region)?;
        (core.scale(), cross)
    } else {
        let core = core_functionals(field, Backend::Quadrature, cfg)?;
        let n = spec.n();
        let rate = field.decay_rate() / 2.0 + 0.5;
        let gg = g.gradient();
        let v = integrate_decaying("gradient-norm cross term", &region, rate, field.support(), cfg, 1, |x, out| {
            let mut du = [0.0; MAX_DIM];
            let u = field.eval_into(x, &mut du[..n]);
            let gv = g.eval(x);
            let r2: f64 = x.iter().map(|t| t * t).sum();
            let dot: f64 = (0..n).map(|i| du[i] * gg[i].eval(x)).sum();
            out[0] = dot + (r2 + 1.0) * u * gv;
        })?;
        (core.scale(), v[0])
    };
    Ok((q_u - cross * cross / q_g).max(0.0))
}
