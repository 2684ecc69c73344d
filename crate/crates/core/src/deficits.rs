//! Heisenberg deficits on orthants, the scale non-invariant identity, and the
//! full-space reference deficits.

use serde::{Deserialize, Serialize};

use crate::domain::{TestField, MAX_DIM};
use crate::error::{Error, Result};
use crate::functionals::{core_functionals, integrate_like_field, Backend, CoreFunctionals};
use crate::optimize::{multistart_max, LineSearch};
use crate::projection;
use crate::quadrature::QuadConfig;

/// `ρ₁ = √(EM) - (n+2k)N/2`.
pub fn rho1_from(core: &CoreFunctionals) -> f64 {
    (core.energy * core.moment).sqrt() - core.spec.hup_half_dim() * core.mass
}

pub fn rho1(field: &TestField, backend: Backend, cfg: &QuadConfig) -> Result<f64> {
    Ok(rho1_from(&core_functionals(field, backend, cfg)?))
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha == 0.0 || !alpha.is_finite() {
        return Err(Error::Parameter(format!("alpha must be finite and nonzero, got {alpha}")));
    }
    Ok(())
}

/// `α²E + M/α² - (n+2k)N`.
pub fn additive_from(core: &CoreFunctionals, alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    let a2 = alpha * alpha;
    Ok(a2 * core.energy + core.moment / a2 - 2.0 * core.spec.hup_half_dim() * core.mass)
}

pub fn additive_deficit(field: &TestField, alpha: f64, backend: Backend, cfg: &QuadConfig) -> Result<f64> {
    check_alpha(alpha)?;
    additive_from(&core_functionals(field, backend, cfg)?, alpha)
}

/// `∫ |α∇(u/w) + (x/α)(u/w)|² w² dx`, the weighted Dirichlet form equal to
/// the additive deficit. Evaluated by quadrature from the wall-factored field.
pub fn identity_rhs(field: &TestField, alpha: f64, cfg: &QuadConfig) -> Result<f64> {
    check_alpha(alpha)?;
    if !field.vanishes_on_walls() {
        return Err(Error::Capability(
            "the identity needs a field vanishing on every wall (wall exponent >= 1)".into(),
        ));
    }
    let spec = field.spec();
    let n = spec.n();
    let walls = spec.wall_axes();
    let v = integrate_like_field("identity right side", field, cfg, 1, |x, out| {
        let mut g = [0.0; MAX_DIM];
        let q = field.quotient_by_wall_into(x, &mut g[..n]);
        let mut s = 0.0;
        for i in 0..n {
            let c = alpha * g[i] + x[i] / alpha * q;
            s += c * c;
        }
        let w: f64 = walls.clone().map(|i| x[i]).product();
        out[0] = s * w * w;
    })?;
    Ok(v[0])
}

/// `additive(α) - identity_rhs(α)`, with the left side from `backend`.
pub fn identity_residual(field: &TestField, alpha: f64, backend: Backend, cfg: &QuadConfig) -> Result<f64> {
    Ok(additive_deficit(field, alpha, backend, cfg)? - identity_rhs(field, alpha, cfg)?)
}

/// `α* = (M/E)^{1/4}`.
pub fn optimal_alpha_from(core: &CoreFunctionals) -> Result<f64> {
    if !(core.energy > 0.0) || !(core.moment > 0.0) {
        return Err(Error::Degenerate(format!(
            "optimal alpha needs E > 0 and M > 0 (E={}, M={})",
            core.energy, core.moment
        )));
    }
    Ok((core.moment / core.energy).powf(0.25))
}

pub fn optimal_alpha(field: &TestField, backend: Backend, cfg: &QuadConfig) -> Result<f64> {
    optimal_alpha_from(&core_functionals(field, backend, cfg)?)
}

/// Minimizes `additive(α)` over `log α ∈ [ln 1e-3, ln 1e3]` by multistart
/// golden section, independently of the closed-form `α*`.
pub fn envelope_search(core: &CoreFunctionals) -> LineSearch {
    let f = |t: f64| -additive_from(core, t.exp()).expect("exp never vanishes");
    let (best, _) = multistart_max(&f, (1e-3f64).ln(), (1e3f64).ln(), 8, 1e-10);
    LineSearch { x: best.x.exp(), value: -best.value, ..best }
}

/// Functionals, deficits and the identity residual of one field.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DeficitReport {
    pub core: CoreFunctionals,
    pub rho1: f64,
    pub alpha: f64,
    pub additive: f64,
    pub identity_rhs: Option<f64>,
    pub residual: Option<f64>,
    pub alpha_star: Option<f64>,
    pub backend: Backend,
}

/// Builds a report at `alpha`, defaulting to `α*` (or 1 when `α*` is undefined).
/// The identity right side is included when the field vanishes on the walls.
pub fn deficit_report(field: &TestField, alpha: Option<f64>, backend: Backend, cfg: &QuadConfig) -> Result<DeficitReport> {
    let core = core_functionals(field, backend, cfg)?;
    let alpha_star = optimal_alpha_from(&core).ok();
    let alpha = alpha.or(alpha_star).unwrap_or(1.0);
    let additive = additive_from(&core, alpha)?;
    let identity_rhs = if field.vanishes_on_walls() { Some(identity_rhs(field, alpha, cfg)?) } else { None };
    Ok(DeficitReport {
        core,
        rho1: rho1_from(&core),
        alpha,
        additive,
        identity_rhs,
        residual: identity_rhs.map(|r| additive - r),
        alpha_star,
        backend,
    })
}

/// Full-space deficits `δ₁ = √(EM) - nN/2`, `δ₂ = EM - n²N²/4` and the
/// squared distance to the Gaussians `c e^{-β|x|²}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FullSpaceDeficits {
    pub delta1: f64,
    pub delta2: f64,
    pub dist_sq: f64,
    pub core: CoreFunctionals,
}

pub fn full_space_deficits(field: &TestField, backend: Backend, cfg: &QuadConfig) -> Result<FullSpaceDeficits> {
    let spec = field.spec();
    if spec.k() != 0 {
        return Err(Error::Capability("full-space deficits need a field without walls".into()));
    }
    let core = core_functionals(field, backend, cfg)?;
    let n = spec.n() as f64;
    let delta1 = (core.energy * core.moment).sqrt() - n * core.mass / 2.0;
    let delta2 = core.energy * core.moment - n * n * core.mass * core.mass / 4.0;
    let dist_sq = if core.mass == 0.0 { 0.0 } else { projection::dist_to_e(field, cfg)?.dist_sq };
    Ok(FullSpaceDeficits { delta1, delta2, dist_sq, core })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::{make_extremal, OrthantSpec};
    use crate::poly::{PolyGauss, Polynomial};
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    fn spec(n: usize, k: usize) -> OrthantSpec {
        OrthantSpec::new(n, k).unwrap()
    }

    fn cfg() -> QuadConfig {
        QuadConfig::with_order(24)
    }

    fn field(n: usize, k: usize, p: Vec<u32>, poly: Polynomial) -> TestField {
        TestField::from_polygauss(spec(n, k), p, PolyGauss::new(1.0, poly).unwrap()).unwrap()
    }

    fn product_field() -> TestField {
        field(2, 1, vec![0, 1], Polynomial::monomial(vec![1, 1], 1.0))
    }

    fn affine_field() -> TestField {
        field(2, 1, vec![0, 1], Polynomial::from_terms(2, [(vec![0, 1], 1.0), (vec![1, 1], 1.0)]))
    }

    #[test]
    fn extremals_have_zero_rho1() {
        for (n, k) in [(1, 1), (2, 1), (3, 2)] {
            for beta in [0.25, 1.0] {
                let f = make_extremal(spec(n, k), 1.3, beta).unwrap();
                let core = core_functionals(&f, Backend::Oracle, &cfg()).unwrap();
                assert!(rho1_from(&core).abs() <= 1e-10 * core.scale());
            }
        }
    }

    #[test]
    fn product_field_rho1() {
        let r = rho1(&product_field(), Backend::Oracle, &cfg()).unwrap();
        assert_relative_eq!(r, PI / 8.0, max_relative = 1e-12);
        let r2 = rho1(&product_field().scaled(2.0), Backend::Oracle, &cfg()).unwrap();
        assert_relative_eq!(r2, 4.0 * r, max_relative = 1e-12);
    }

    #[test]
    fn additive_values() {
        let f = make_extremal(spec(1, 1), 1.0, 0.5).unwrap();
        assert!(additive_deficit(&f, 1.0, Backend::Oracle, &cfg()).unwrap().abs() < 1e-14);
        assert_relative_eq!(
            additive_deficit(&f, 2f64.sqrt(), Backend::Oracle, &cfg()).unwrap(),
            3.0 * PI.sqrt() / 16.0,
            max_relative = 1e-13
        );
        assert_relative_eq!(additive_deficit(&affine_field(), 1.0, Backend::Oracle, &cfg()).unwrap(), PI / 4.0, max_relative = 1e-13);
        assert!(additive_deficit(&f, 0.0, Backend::Oracle, &cfg()).is_err());
    }

    #[test]
    fn identity_holds_on_examples() {
        let f = make_extremal(spec(2, 1), 1.0, 0.5).unwrap();
        assert!(identity_rhs(&f, 1.0, &cfg()).unwrap().abs() < 1e-14);
        assert_relative_eq!(identity_rhs(&product_field(), 1.0, &cfg()).unwrap(), PI / 4.0, max_relative = 1e-12);
        for alpha in [0.5, 1.0, 2.0] {
            let r = identity_residual(&affine_field(), alpha, Backend::Oracle, &cfg()).unwrap();
            assert!(r.abs() < 1e-12, "{r}");
        }
        let zero = make_extremal(spec(2, 1), 0.0, 0.5).unwrap();
        assert_eq!(identity_rhs(&zero, 1.5, &cfg()).unwrap(), 0.0);
    }

    #[test]
    fn identity_needs_wall_vanishing() {
        let f = field(1, 1, vec![0], Polynomial::constant(1, 1.0));
        assert!(matches!(identity_rhs(&f, 1.0, &cfg()), Err(Error::Capability(_))));
    }

    #[test]
    fn optimal_alpha_values() {
        let f = make_extremal(spec(1, 1), 1.0, 0.5).unwrap();
        assert_relative_eq!(optimal_alpha(&f, Backend::Oracle, &cfg()).unwrap(), 1.0, max_relative = 1e-14);
        let f = make_extremal(spec(1, 1), 1.0, 1.0).unwrap();
        assert_relative_eq!(optimal_alpha(&f, Backend::Oracle, &cfg()).unwrap(), 0.5f64.sqrt(), max_relative = 1e-14);
        let core = core_functionals(&product_field(), Backend::Oracle, &cfg()).unwrap();
        let a = optimal_alpha_from(&core).unwrap();
        assert_relative_eq!(a, 1.0, max_relative = 1e-14);
        assert_relative_eq!(additive_from(&core, a).unwrap() / 2.0, rho1_from(&core), max_relative = 1e-12);
        let zero = make_extremal(spec(1, 1), 0.0, 1.0).unwrap();
        assert!(matches!(optimal_alpha(&zero, Backend::Oracle, &cfg()), Err(Error::Degenerate(_))));
    }

    #[test]
    fn envelope_matches_closed_form() {
        let core = core_functionals(&affine_field(), Backend::Oracle, &cfg()).unwrap();
        let e = envelope_search(&core);
        assert_relative_eq!(e.value / 2.0, rho1_from(&core), max_relative = 1e-9);
        assert_relative_eq!(e.x, optimal_alpha_from(&core).unwrap(), max_relative = 1e-4);
    }

    #[test]
    fn full_space_gaussian_and_odd_mode() {
        let g = TestField::from_polygauss(spec(1, 0), vec![0], PolyGauss::new(1.0, Polynomial::constant(1, 1.0)).unwrap()).unwrap();
        let d = full_space_deficits(&g, Backend::Oracle, &cfg()).unwrap();
        assert!(d.delta1.abs() < 1e-14 && d.delta2.abs() < 1e-14 && d.dist_sq.abs() < 1e-12);
        let h = TestField::from_polygauss(spec(1, 0), vec![0], PolyGauss::new(1.0, Polynomial::coordinate(1, 0)).unwrap()).unwrap();
        let d = full_space_deficits(&h, Backend::Oracle, &cfg()).unwrap();
        assert_relative_eq!(d.delta1, PI.sqrt() / 2.0, max_relative = 1e-13);
        let z = make_extremal(spec(2, 0), 0.0, 1.0).unwrap();
        let d = full_space_deficits(&z, Backend::Oracle, &cfg()).unwrap();
        assert_eq!((d.delta1, d.delta2, d.dist_sq), (0.0, 0.0, 0.0));
        assert!(full_space_deficits(&product_field(), Backend::Oracle, &cfg()).is_err());
    }
}
