//! Gaussian-type quadrature rules and tensor-product integration.

mod grid;
mod rules;

pub use grid::{tensor_integrate, GridAxis, QuadratureGrid, WeightKind};
pub use rules::{
    composite_legendre_rule, half_monomial_rule, half_range_rule, hermite_rule, legendre_panel_rule,
    AxisRule, RuleDomain, MAX_ORDER,
};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tolerances::ORDER_DOUBLING;

/// Orders and refinement policy for quadrature-backed functionals.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct QuadConfig {
    /// Per-axis order on Gaussian-weight axes.
    pub order: usize,
    /// Points per panel for compactly supported integrands.
    pub bump_order: usize,
    /// Panels per axis for compactly supported integrands.
    pub bump_panels: usize,
    /// Recompute at doubled order and fail if the relative change exceeds `1e-6`.
    pub check_convergence: bool,
}

impl Default for QuadConfig {
    fn default() -> Self {
        Self { order: 60, bump_order: 80, bump_panels: 2, check_convergence: true }
    }
}

impl QuadConfig {
    pub fn with_order(order: usize) -> Self {
        Self { order, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if self.order == 0 || self.order > MAX_ORDER {
            return Err(Error::Parameter(format!("order must be in 1..={MAX_ORDER}, got {}", self.order)));
        }
        if self.bump_order == 0 || self.bump_order > MAX_ORDER || self.bump_panels == 0 {
            return Err(Error::Parameter("bump order and panel count must be positive".into()));
        }
        Ok(())
    }

    /// The same configuration with every order doubled.
    pub fn doubled(&self) -> Self {
        Self { order: 2 * self.order, bump_order: 2 * self.bump_order, ..*self }
    }
}

/// Runs `compute` at the configured orders and, when enabled, at doubled
/// orders; returns the refined values.
pub fn with_refinement<F>(what: &str, cfg: &QuadConfig, compute: F) -> Result<Vec<f64>>
where
    F: Fn(&QuadConfig) -> Result<Vec<f64>>,
{
    cfg.validate()?;
    let coarse = compute(cfg)?;
    if !cfg.check_convergence {
        return Ok(coarse);
    }
    let fine = compute(&cfg.doubled())?;
    let scale = fine.iter().chain(&coarse).fold(0.0f64, |m, v| m.max(v.abs()));
    let worst = coarse
        .iter()
        .zip(&fine)
        .map(|(c, f)| if scale == 0.0 { 0.0 } else { (c - f).abs() / scale })
        .fold(0.0f64, f64::max);
    if worst > ORDER_DOUBLING {
        return Err(Error::Convergence { what: what.to_string(), rel_change: worst });
    }
    Ok(fine)
}
