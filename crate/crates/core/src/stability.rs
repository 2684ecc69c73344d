//! Margins of the stability inequalities for the orthant HUP, for one field.
//!
//! Each inequality is reported as `lhs ≥ rhs` with `margin = lhs - rhs`.
//! It holds when `margin ≥ -1e-7·scale` and is an equality when
//! `|margin| ≤ 1e-7·scale`, where `scale = E + M + N`.

use serde::{Deserialize, Serialize};

use crate::deficits::{additive_from, rho1_from};
use crate::domain::TestField;
use crate::error::Result;
use crate::functionals::{core_functionals, Backend, CoreFunctionals};
use crate::projection::{
    affine_center_dist, dist_to_affine_family, dist_to_e, dist_to_e_norm_constrained, gaussian_center_dist,
    gradient_norm_dist,
};
use crate::quadrature::QuadConfig;
use crate::tolerances::{EQUALITY_DETECTION, STABILITY_MARGIN};

/// Scales at which the scale-dependent estimate is checked.
pub const ALPHAS: [f64; 3] = [0.5, 1.0, 2.0];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InequalityCheck {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
    pub scale: f64,
    pub holds: bool,
    pub equality: bool,
}

impl InequalityCheck {
    pub fn new(name: impl Into<String>, lhs: f64, rhs: f64, scale: f64) -> Self {
        let margin = lhs - rhs;
        Self {
            name: name.into(),
            lhs,
            rhs,
            margin,
            scale,
            holds: margin >= -STABILITY_MARGIN * scale,
            equality: margin.abs() <= EQUALITY_DETECTION * scale,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StabilityReport {
    pub label: String,
    pub core: CoreFunctionals,
    pub rho1: f64,
    pub checks: Vec<InequalityCheck>,
    /// Variants reported for comparison only; they do not affect `all_hold`.
    pub diagnostics: Vec<InequalityCheck>,
}

impl StabilityReport {
    pub fn all_hold(&self) -> bool {
        self.checks.iter().all(|c| c.holds)
    }

    pub fn check(&self, name: &str) -> Option<&InequalityCheck> {
        self.checks.iter().find(|c| c.name == name)
    }

    /// The margin closest to violation, relative to scale.
    pub fn worst(&self) -> Option<&InequalityCheck> {
        self.checks
            .iter()
            .min_by(|a, b| (a.margin / a.scale).total_cmp(&(b.margin / b.scale)))
    }
}

pub const RHO1_VS_EXTREMAL: &str = "rho1_vs_extremal_dist";
pub const ADDITIVE_VS_CENTERED: &str = "additive_vs_twice_centered_dist";
pub const RHO1_VS_CONSTRAINED: &str = "rho1_vs_half_constrained_dist";
pub const ADDITIVE_VS_GRADIENT_NORM: &str = "additive_vs_gradient_norm_dist";
pub const AFFINE_BELOW_EXTREMAL: &str = "extremal_dist_vs_affine_dist";
pub const EXTREMAL_BELOW_MASS: &str = "mass_vs_extremal_dist";

/// Name of the scale-dependent check at `alpha`.
pub fn scale_dependent_name(alpha: f64) -> String {
    format!("scale_dependent(alpha={alpha})")
}

fn backend_for(field: &TestField) -> Backend {
    if field.exact_form().is_some() {
        Backend::Oracle
    } else {
        Backend::Quadrature
    }
}

/// Evaluates every stability inequality on `field`.
///
/// The scale-dependent estimate uses `½·additive(α)` as its left side; it
/// coincides with `ρ₁` at `α = (M/E)^{1/4}` and dominates it elsewhere. The
/// same estimate with `ρ₁` on the left is kept under `diagnostics`.
pub fn stability_report(field: &TestField, cfg: &QuadConfig) -> Result<StabilityReport> {
    let core = core_functionals(field, backend_for(field), cfg)?;
    let scale = core.scale();
    let rho1 = rho1_from(&core);
    let additive1 = additive_from(&core, 1.0)?;
    let d = 2.0 * core.spec.hup_half_dim();

    let dist_e = dist_to_e(field, cfg)?.dist_sq;
    let dist_affine = dist_to_affine_family(field, cfg)?.dist_sq;
    let constrained = dist_to_e_norm_constrained(field, cfg)?.dist_sq;
    let centered = gaussian_center_dist(field, 1.0, cfg)?.dist_sq;
    let gnorm = gradient_norm_dist(field, cfg)?;

    let mut checks = vec![
        InequalityCheck::new(RHO1_VS_EXTREMAL, rho1, dist_e, scale),
        InequalityCheck::new(ADDITIVE_VS_CENTERED, additive1, 2.0 * centered, scale),
        InequalityCheck::new(RHO1_VS_CONSTRAINED, rho1, 0.5 * constrained, scale),
        InequalityCheck::new(ADDITIVE_VS_GRADIENT_NORM, additive1, 2.0 / (d + 3.0) * gnorm, scale),
        InequalityCheck::new(AFFINE_BELOW_EXTREMAL, dist_e, dist_affine, scale),
        InequalityCheck::new(EXTREMAL_BELOW_MASS, core.mass, dist_e, scale),
    ];
    let mut diagnostics = Vec::new();
    for alpha in ALPHAS {
        let center = gaussian_center_dist(field, alpha, cfg)?.dist_sq;
        let affine = affine_center_dist(field, alpha, cfg)?.dist_sq;
        let half_additive = 0.5 * additive_from(&core, alpha)?;
        checks.push(InequalityCheck::new(scale_dependent_name(alpha), half_additive - center, affine, scale));
        diagnostics.push(InequalityCheck::new(
            format!("scale_dependent_rho1(alpha={alpha})"),
            rho1 - center,
            affine,
            scale,
        ));
    }
    Ok(StabilityReport { label: field.label().to_string(), core, rho1, checks, diagnostics })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{affine_equality, sharp_example};
    use crate::domain::{make_extremal, OrthantSpec};
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    fn cfg() -> QuadConfig {
        QuadConfig::with_order(24)
    }

    #[test]
    fn sharp_example_is_an_equality_case() {
        let spec = OrthantSpec::new(2, 1).unwrap();
        let r = stability_report(&sharp_example(spec).unwrap(), &cfg()).unwrap();
        assert!(r.all_hold(), "{r:#?}");
        assert_relative_eq!(r.rho1, PI / 8.0, max_relative = 1e-12);
        let c = r.check(RHO1_VS_CONSTRAINED).unwrap();
        assert_relative_eq!(c.rhs, PI / 8.0, max_relative = 1e-9);
        for name in [RHO1_VS_EXTREMAL, ADDITIVE_VS_CENTERED, RHO1_VS_CONSTRAINED, ADDITIVE_VS_GRADIENT_NORM] {
            assert!(r.check(name).unwrap().equality, "{name}: {r:#?}");
        }
    }

    #[test]
    fn extremal_off_unit_scale() {
        let spec = OrthantSpec::new(3, 1).unwrap();
        let r = stability_report(&make_extremal(spec, 1.0, 0.9).unwrap(), &cfg()).unwrap();
        assert!(r.all_hold(), "{r:#?}");
        assert!(r.check(RHO1_VS_EXTREMAL).unwrap().equality);
        assert!(!r.check(ADDITIVE_VS_CENTERED).unwrap().equality);
        assert!(r.diagnostics.iter().any(|c| !c.holds));
    }

    #[test]
    fn affine_member_at_unit_scale() {
        let spec = OrthantSpec::new(2, 1).unwrap();
        let f = affine_equality(spec, &[1.0], 1.0, 0.5).unwrap();
        let r = stability_report(&f, &cfg()).unwrap();
        assert!(r.all_hold());
        assert!(r.check(RHO1_VS_EXTREMAL).unwrap().equality);
        assert!(r.check(ADDITIVE_VS_CENTERED).unwrap().equality);
        assert!(r.check(AFFINE_BELOW_EXTREMAL).unwrap().lhs > 0.1);
    }
}
