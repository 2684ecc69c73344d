//! Mass, second moment, Dirichlet energy, the inverse-square (Hardy)
//! denominator, and moments under weighted Gaussian measures.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::domain::{OrthantSpec, ScaledGaussianMeasure, SupportBox, TestField, Region, MAX_DIM};
use crate::error::{Error, Result};
use crate::exact_oracle;
use crate::poly::PolyGauss;
use crate::quadrature::{composite_legendre_rule, with_refinement, QuadConfig, QuadratureGrid, WeightKind};
use crate::tolerances::MIN_MASS;

/// Integration backend.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Backend {
    Quadrature,
    Oracle,
}

impl Backend {
    pub fn name(&self) -> &'static str {
        match self {
            Backend::Quadrature => "quadrature",
            Backend::Oracle => "oracle",
        }
    }
}

impl std::str::FromStr for Backend {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "quadrature" => Ok(Backend::Quadrature),
            "oracle" => Ok(Backend::Oracle),
            other => Err(Error::Parameter(format!("unknown backend '{other}'"))),
        }
    }
}

/// `N = ∫u²`, `M = ∫|x|²u²`, `E = ∫|∇u|²` over the field's orthant.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoreFunctionals {
    pub mass: f64,
    pub moment: f64,
    pub energy: f64,
    pub backend: Backend,
    pub spec: OrthantSpec,
}

impl CoreFunctionals {
    /// `E + M + N`, the reference size for absolute margins.
    pub fn scale(&self) -> f64 {
        self.mass + self.moment + self.energy
    }

    /// `E·M/N²`.
    pub fn hup_ratio(&self) -> Result<f64> {
        if self.mass < MIN_MASS {
            return Err(Error::Degenerate(format!("mass {} too small for a ratio", self.mass)));
        }
        Ok(self.energy * self.moment / (self.mass * self.mass))
    }
}

pub(crate) fn exact_form(field: &TestField) -> Result<&PolyGauss> {
    field
        .exact_form()
        .ok_or_else(|| Error::Capability(format!("field '{}' has no exact form for the oracle", field.label())))
}

/// Integrates a `k`-valued integrand that decays like `e^{-rate|x|²}` over
/// `region`, or over `support` with panel rules when given. Order doubling
/// follows `cfg`.
pub fn integrate_decaying<F>(
    what: &str,
    region: &Region,
    rate: f64,
    support: Option<&SupportBox>,
    cfg: &QuadConfig,
    k: usize,
    f: F,
) -> Result<Vec<f64>>
where
    F: Fn(&[f64], &mut [f64]) + Sync,
{
    with_refinement(what, cfg, |c| {
        let grid = match support {
            Some(b) => QuadratureGrid::panels(b, c.bump_order, c.bump_panels)?,
            None => QuadratureGrid::for_decay(region, rate, c.order)?,
        };
        grid.integrate_many(WeightKind::Lebesgue, k, &f)
    })
}

/// Integrates an integrand built from `field` and decaying like `u²`.
pub fn integrate_like_field<F>(what: &str, field: &TestField, cfg: &QuadConfig, k: usize, f: F) -> Result<Vec<f64>>
where
    F: Fn(&[f64], &mut [f64]) + Sync,
{
    integrate_decaying(what, &field.spec().region(), field.decay_rate(), field.support(), cfg, k, f)
}

fn sq_norm(v: &[f64]) -> f64 {
    v.iter().map(|t| t * t).sum()
}

/// `(N, M, E)` for `field` with the chosen backend.
pub fn core_functionals(field: &TestField, backend: Backend, cfg: &QuadConfig) -> Result<CoreFunctionals> {
    let spec = field.spec();
    let (mass, moment, energy) = match backend {
        Backend::Oracle => {
            let u = exact_form(field)?;
            let region = spec.region();
            (
                exact_oracle::inner(u, u, &region)?,
                exact_oracle::moment_inner(u, u, &region)?,
                exact_oracle::descriptor_dirichlet(u, &region)?,
            )
        }
        Backend::Quadrature => {
            let n = field.dim();
            let v = integrate_like_field("core functionals", field, cfg, 3, |x, out| {
                let mut g = [0.0; MAX_DIM];
                let u = field.eval_into(x, &mut g[..n]);
                let u2 = u * u;
                out[0] = u2;
                out[1] = sq_norm(x) * u2;
                out[2] = sq_norm(&g[..n]);
            })?;
            (v[0], v[1], v[2])
        }
    };
    Ok(CoreFunctionals { mass, moment, energy, backend, spec })
}

/// `E·M/N²`; the sharp lower bound on an orthant is `(n+2k)²/4`.
pub fn hup_ratio(field: &TestField, backend: Backend, cfg: &QuadConfig) -> Result<f64> {
    core_functionals(field, backend, cfg)?.hup_ratio()
}

fn check_hardy_admissible(spec: &OrthantSpec) -> Result<()> {
    if spec.k() == 0 && spec.n() <= 2 {
        return Err(Error::Capability(format!(
            "inverse-square weight is not integrable against generic fields on ℝ^{}",
            spec.n()
        )));
    }
    Ok(())
}

/// `∫ u² / |x|²`.
///
/// The quadrature path writes `1/|x|² = ∫_0^∞ e^{-τ|x|²} dτ` and substitutes
/// `s + τ = s/z²`, giving `∫_0^1 2s z^{-3} I(s/z² - s) dz` with
/// `I(τ) = ∫ u² e^{-τ|x|²}`; each `I` is a smooth Gaussian-type integral, and
/// the outer `z` integrand is a polynomial for polynomial-Gaussian fields.
pub fn hardy_denominator(field: &TestField, backend: Backend, cfg: &QuadConfig) -> Result<f64> {
    let spec = field.spec();
    check_hardy_admissible(&spec)?;
    match backend {
        Backend::Oracle => {
            let u = exact_form(field)?;
            exact_oracle::descriptor_hardy_integral(&u.mul(u), &spec.region())
        }
        Backend::Quadrature => {
            let n = field.dim();
            if let Some(b) = field.support() {
                let v = integrate_decaying("inverse-square moment", &spec.region(), 1.0, Some(b), cfg, 1, |x, out| {
                    let mut g = [0.0; MAX_DIM];
                    let u = field.eval_into(x, &mut g[..n]);
                    out[0] = u * u / sq_norm(x);
                })?;
                return Ok(v[0]);
            }
            let s = field.decay_rate();
            let region = spec.region();
            let v = with_refinement("inverse-square moment", cfg, |c| {
                let q = (c.order / 5).clamp(8, 120);
                let zr = composite_legendre_rule(q, 1, 0.0, 1.0)?;
                let mut total = 0.0;
                for (z, wz) in zr.nodes.iter().zip(&zr.weights) {
                    let tau = s / (z * z) - s;
                    let grid = QuadratureGrid::for_decay(&region, s + tau, c.order)?;
                    let inner = grid.integrate(WeightKind::Lebesgue, |x| {
                        let mut g = [0.0; MAX_DIM];
                        let u = field.eval_into(x, &mut g[..n]);
                        u * u * (-tau * sq_norm(x)).exp()
                    })?;
                    total += wz * 2.0 * s * z.powi(-3) * inner;
                }
                Ok(vec![total])
            })?;
            Ok(v[0])
        }
    }
}

/// `∫|∇u|² / ∫u²/|x|²`; bounded below by `(n+2k-2)²/4`.
pub fn hardy_ratio(field: &TestField, backend: Backend, cfg: &QuadConfig) -> Result<f64> {
    let core = core_functionals(field, backend, cfg)?;
    if core.mass < MIN_MASS {
        return Err(Error::Degenerate("zero field has no Hardy ratio".into()));
    }
    let den = hardy_denominator(field, backend, cfg)?;
    Ok(core.energy / den)
}

/// Sharp HUP constant `(n+2k)²/4`.
pub fn hup_constant(spec: &OrthantSpec) -> f64 {
    spec.hup_half_dim().powi(2)
}

/// Sharp Hardy constant `(n+2k-2)²/4`.
pub fn hardy_constant(spec: &OrthantSpec) -> f64 {
    ((spec.n() + 2 * spec.k()) as f64 - 2.0).powi(2) / 4.0
}

/// `(∫f dμ, ∫(f - mean)² dμ)` for the probability measure `μ_{A,λ}`.
pub fn measure_mean_var<F>(measure: &ScaledGaussianMeasure, f: F, cfg: &QuadConfig) -> Result<(f64, f64)>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    let z = measure.normalization();
    let v = with_refinement("measure moments", cfg, |c| {
        let grid = QuadratureGrid::for_measure(measure.exponents(), measure.lambda(), c.order)?;
        let mean = grid.integrate(WeightKind::Native, &f)? / z;
        let var = grid.integrate(WeightKind::Native, |x| (f(x) - mean).powi(2))? / z;
        Ok(vec![mean, var])
    })?;
    Ok((v[0], v[1]))
}

/// `π^{(n+2k)/2} / (2 (4π)^k)`, the deficit of `x_1 · w · e^{-|x|²/2}` when `n > k`.
pub fn sharp_example_value(spec: &OrthantSpec) -> f64 {
    PI.powf(spec.hup_half_dim()) / (2.0 * (4.0 * PI).powi(spec.k() as i32))
}
