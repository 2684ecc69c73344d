//! Lifting of orthant fields to full space.
//!
//! A wall axis `x_i` with integer `l_i` becomes a block `y_i ∈ ℝ^{2l_i+1}` and
//! the residual is composed with block norms, `ṽ(x', y) = v(x', |y_1|, …)`.
//! Integrals of `ṽ` over `ℝ^{n+2|l|}` then equal orthant integrals weighted by
//! `∏ x_i^{2l_i}` times the sphere areas `|𝕊^{2l_i}|`.
//!
//! The lifted side is computed by radial reduction (Gauss rules for
//! `r^{2l} e^{-r²}` on each wall axis, no sphere-area algebra beyond the
//! constant) and, in lifted dimension at most 4, by a full Cartesian grid.

use serde::{Deserialize, Serialize};

use std::sync::Arc;

use crate::domain::{sphere_area, AxisKind, OrthantSpec, Region, TestField, MAX_DIM};
use crate::error::{Error, Result};
use crate::exact_oracle;
use crate::functionals::integrate_decaying;
use crate::poly::{PolyGauss, Polynomial};
use crate::quadrature::{
    composite_legendre_rule, hermite_rule, with_refinement, GridAxis, QuadConfig, QuadratureGrid, WeightKind, MAX_ORDER,
};

/// Largest lifted dimension handled.
pub const MAX_LIFTED_DIM: usize = 8;
/// Largest lifted dimension for the Cartesian cross-check.
pub const MAX_CARTESIAN_DIM: usize = 4;

/// Lifting exponents `l` on the wall axes of an orthant.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LiftPlan {
    spec: OrthantSpec,
    l: Vec<u32>,
}

impl LiftPlan {
    pub fn new(spec: OrthantSpec, l: Vec<u32>) -> Result<Self> {
        if l.len() != spec.n() {
            return Err(Error::Parameter(format!("lift exponents need {} entries, got {}", spec.n(), l.len())));
        }
        if let Some(i) = (0..spec.n()).find(|i| !spec.is_wall(*i) && l[*i] != 0) {
            return Err(Error::Parameter(format!("axis {} is not a wall and cannot be lifted", i + 1)));
        }
        Ok(Self { spec, l })
    }

    /// `l_i = p_i` on every wall, so the lifted residual reproduces `u`.
    pub fn for_field(field: &TestField) -> Result<Self> {
        Self::new(field.spec(), field.wall_exponents().to_vec())
    }

    /// Same `l_i` on every wall axis.
    pub fn uniform(spec: OrthantSpec, l: u32) -> Result<Self> {
        Self::new(spec, (0..spec.n()).map(|i| if spec.is_wall(i) { l } else { 0 }).collect())
    }

    pub fn spec(&self) -> OrthantSpec {
        self.spec
    }

    pub fn l(&self) -> &[u32] {
        &self.l
    }

    /// `|l| = Σ l_i`.
    pub fn total(&self) -> u32 {
        self.l.iter().sum()
    }

    /// `n + 2|l|`.
    pub fn lifted_dim(&self) -> usize {
        self.spec.n() + 2 * self.total() as usize
    }

    /// `∏_{walls} |𝕊^{2 l_i}|`.
    pub fn sphere_factor(&self) -> f64 {
        self.spec
            .wall_axes()
            .map(|i| sphere_area(2 * self.l[i] as i64).expect("non-negative dimension"))
            .product()
    }

    /// Block sizes in lifted coordinates, one per orthant axis.
    fn block_sizes(&self) -> Vec<usize> {
        (0..self.spec.n())
            .map(|i| if self.spec.is_wall(i) { 2 * self.l[i] as usize + 1 } else { 1 })
            .collect()
    }

    /// `P(x', y) = (x', |y_1|, …, |y_k|)` written into `out`.
    fn project_into(&self, point: &[f64], out: &mut [f64]) {
        let mut at = 0;
        for (i, size) in self.block_sizes().into_iter().enumerate() {
            if self.spec.is_wall(i) {
                out[i] = point[at..at + size].iter().map(|t| t * t).sum::<f64>().sqrt();
            } else {
                out[i] = point[at];
            }
            at += size;
        }
    }

    pub fn project(&self, point: &[f64]) -> Result<Vec<f64>> {
        if point.len() != self.lifted_dim() {
            return Err(Error::Domain(format!(
                "lifted point needs {} coordinates, got {}",
                self.lifted_dim(),
                point.len()
            )));
        }
        let mut out = vec![0.0; self.spec.n()];
        self.project_into(point, &mut out);
        if self.spec.wall_axes().any(|i| out[i] <= 0.0) {
            return Err(Error::Domain("a lifted block has zero norm".into()));
        }
        Ok(out)
    }
}

fn check_plan(field: &TestField, plan: &LiftPlan) -> Result<()> {
    if field.spec() != plan.spec {
        return Err(Error::Parameter("lift plan and field live on different orthants".into()));
    }
    if plan.lifted_dim() > MAX_LIFTED_DIM {
        return Err(Error::Capability(format!(
            "lifted dimension {} exceeds the grid budget of {MAX_LIFTED_DIM}",
            plan.lifted_dim()
        )));
    }
    if plan.spec.wall_axes().any(|i| plan.l[i] != field.wall_exponents()[i]) {
        return Err(Error::Parameter("lift exponents must equal the field's wall exponents".into()));
    }
    Ok(())
}

/// `ṽ` at a lifted interior point.
pub fn lifted_eval(field: &TestField, plan: &LiftPlan, point: &[f64]) -> Result<f64> {
    if field.spec() != plan.spec {
        return Err(Error::Parameter("lift plan and field live on different orthants".into()));
    }
    let x = plan.project(point)?;
    let mut g = vec![0.0; x.len()];
    Ok(field.residual().eval(&x, &mut g))
}

/// `(ṽ, ∇ṽ)` at a lifted interior point by the chain rule through block norms.
pub fn lifted_gradient(field: &TestField, plan: &LiftPlan, point: &[f64]) -> Result<(f64, Vec<f64>)> {
    let x = plan.project(point)?;
    let mut g = vec![0.0; x.len()];
    let v = field.residual().eval(&x, &mut g);
    let mut out = vec![0.0; point.len()];
    let mut at = 0;
    for (i, size) in plan.block_sizes().into_iter().enumerate() {
        if plan.spec.is_wall(i) {
            for j in 0..size {
                out[at + j] = g[i] * point[at + j] / x[i];
            }
        } else {
            out[at] = g[i];
        }
        at += size;
    }
    Ok((v, out))
}

/// Two sides of a lifting formula with `gap = |lhs - rhs| / (1 + |rhs|)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LiftCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub gap: f64,
}

impl LiftCheck {
    pub fn new(lhs: f64, rhs: f64) -> Self {
        Self { lhs, rhs, gap: (lhs - rhs).abs() / (1.0 + rhs.abs()) }
    }
}

/// Integrand data handed to radial and Cartesian integrands: the orthant
/// point `x = P(·)`, `v(x)`, and `∇v(x)`.
struct Sample<'a> {
    x: &'a [f64],
    v: f64,
    grad: &'a [f64],
}

/// `∫_{orthant} ∏ x_i^{2l_i} F(x, v, ∇v) dx` using half-range rules whose
/// weight carries `x^{2l}`, or panel rules over a bump's support.
fn radial_integral<F>(what: &str, field: &TestField, plan: &LiftPlan, cfg: &QuadConfig, f: F) -> Result<f64>
where
    F: Fn(&Sample) -> f64 + Sync,
{
    let spec = plan.spec;
    let n = spec.n();
    let eval = |x: &[f64]| {
        let mut g = [0.0; MAX_DIM];
        let v = field.residual().eval(x, &mut g[..n]);
        f(&Sample { x, v, grad: &g[..n] })
    };
    if let Some(b) = field.support() {
        let v = integrate_decaying(what, &spec.region(), 1.0, Some(b), cfg, 1, |x, out| {
            let w: f64 = spec.wall_axes().map(|i| x[i].powi(2 * plan.l[i] as i32)).product();
            out[0] = w * eval(x);
        })?;
        return Ok(v[0]);
    }
    let region = Region {
        axes: (0..n)
            .map(|i| AxisKind { half: spec.is_wall(i), weight_exponent: 2.0 * plan.l[i] as f64 })
            .collect(),
    };
    let rate = field.decay_rate();
    let v = with_refinement(what, cfg, |c| {
        Ok(vec![QuadratureGrid::for_decay(&region, rate, c.order)?.integrate(WeightKind::Weighted, eval)?])
    })?;
    Ok(v[0])
}

/// Orthant-side integral `∫ F(x, u, ∇u)` with plain Lebesgue rules.
fn orthant_integral<F>(what: &str, field: &TestField, cfg: &QuadConfig, f: F) -> Result<f64>
where
    F: Fn(&[f64], f64, &[f64]) -> f64 + Sync,
{
    let n = field.dim();
    let v = integrate_decaying(what, &field.spec().region(), field.decay_rate(), field.support(), cfg, 1, |x, out| {
        let mut g = [0.0; MAX_DIM];
        let u = field.eval_into(x, &mut g[..n]);
        out[0] = f(x, u, &g[..n]);
    })?;
    Ok(v[0])
}

/// Orthant-side configuration for bump checks: different panel split and
/// order from the lifted side, so the two sides share no nodes.
fn orthant_cfg(cfg: &QuadConfig) -> QuadConfig {
    QuadConfig { bump_panels: cfg.bump_panels + 1, bump_order: cfg.bump_order.saturating_sub(7).max(8), ..*cfg }
}

fn sq(v: &[f64]) -> f64 {
    v.iter().map(|t| t * t).sum()
}

/// `∫ ṽ²` over the lifted space against `|𝕊|·∫ u²` over the orthant.
pub fn verify_mass_lift(field: &TestField, plan: &LiftPlan, cfg: &QuadConfig) -> Result<LiftCheck> {
    verify_moment_lift(field, plan, 0.0, cfg)
}

/// `∫ |(x', y)|^{2a} ṽ²` against `|𝕊|·∫ |x|^{2a} u²`.
pub fn verify_moment_lift(field: &TestField, plan: &LiftPlan, a: f64, cfg: &QuadConfig) -> Result<LiftCheck> {
    check_plan(field, plan)?;
    if !(a >= 0.0) || !a.is_finite() {
        return Err(Error::Parameter(format!("moment exponent must be finite and >= 0, got {a}")));
    }
    let weight = |x: &[f64]| if a == 0.0 { 1.0 } else { sq(x).powf(a) };
    let lhs = plan.sphere_factor()
        * radial_integral("lifted moment", field, plan, cfg, |s| weight(s.x) * s.v * s.v)?;
    let rhs = plan.sphere_factor() * moment_rhs(field, a, cfg)?;
    Ok(LiftCheck::new(lhs, rhs))
}

fn moment_rhs(field: &TestField, a: f64, cfg: &QuadConfig) -> Result<f64> {
    if let (Some(u), true) = (field.exact_form(), a.fract() == 0.0) {
        let r = Polynomial::radius_squared_pow(u.dim(), a as u32);
        return exact_oracle::descriptor_integral(&u.mul(u).mul_poly(&r), &field.spec().region());
    }
    orthant_integral("orthant moment", field, &orthant_cfg(cfg), |x, u, _| {
        let w = if a == 0.0 { 1.0 } else { sq(x).powf(a) };
        w * u * u
    })
}

/// `|𝕊|^{-1} ∫ |(x', y)|^{2b} |∇ṽ|²` against
/// `∫ |x|^{2b}|∇u|² + Σ l_i(l_i-1) u²/x_i² + 2b|l| |x|^{2b-2} u²`.
///
/// Needs a residual compactly supported away from the walls; `b ∈ {0, 1}`.
/// The middle term carries no `|x|^{2b}` factor here, so for `b = 1` and
/// some `l_i ≥ 2` the two sides differ; see [`verify_gradient_lift_weighted`].
pub fn verify_gradient_lift(field: &TestField, plan: &LiftPlan, b: f64, cfg: &QuadConfig) -> Result<LiftCheck> {
    gradient_lift(field, plan, b, cfg, false)
}

/// Same as [`verify_gradient_lift`] with the singular term weighted as
/// `|x|^{2b} l_i(l_i-1) u²/x_i²`, which is what integrating `|x|^{2b} ṽ Δṽ`
/// by parts on the lifted side produces.
pub fn verify_gradient_lift_weighted(field: &TestField, plan: &LiftPlan, b: f64, cfg: &QuadConfig) -> Result<LiftCheck> {
    gradient_lift(field, plan, b, cfg, true)
}

fn gradient_lift(field: &TestField, plan: &LiftPlan, b: f64, cfg: &QuadConfig, weight_middle: bool) -> Result<LiftCheck> {
    check_plan(field, plan)?;
    if field.support().is_none() {
        return Err(Error::Capability(
            "the gradient formula needs a residual vanishing near the walls (bump field)".into(),
        ));
    }
    if b != 0.0 && b != 1.0 {
        return Err(Error::Parameter(format!("gradient weight exponent must be 0 or 1, got {b}")));
    }
    let spec = plan.spec;
    let bi = b as i32;
    let lhs = radial_integral("lifted gradient", field, plan, cfg, |s| sq(s.x).powi(bi) * sq(s.grad))?;
    let total_l = plan.total() as f64;
    let l = plan.l.clone();
    let rhs = orthant_integral("orthant gradient", field, &orthant_cfg(cfg), move |x, u, g| {
        let r2 = sq(x);
        let mut s = r2.powi(bi) * sq(g);
        for i in spec.wall_axes() {
            let li = l[i] as f64;
            if li > 1.0 {
                let weight = if weight_middle { r2.powi(bi) } else { 1.0 };
                s += weight * li * (li - 1.0) * u * u / (x[i] * x[i]);
            }
        }
        if bi == 1 {
            s += 2.0 * total_l * u * u;
        }
        s
    })?;
    Ok(LiftCheck::new(lhs, rhs))
}

/// `∫ ṽ ((x', y)·∇ṽ)` against `|𝕊²|^k ∫ (u/w)[x·∇(u/w)] w²`, for `l = 1` on every wall.
pub fn verify_dilation_pairing(field: &TestField, plan: &LiftPlan, cfg: &QuadConfig) -> Result<LiftCheck> {
    check_plan(field, plan)?;
    let spec = plan.spec;
    if spec.wall_axes().any(|i| plan.l[i] != 1) {
        return Err(Error::Parameter("the dilation pairing needs l = 1 on every wall".into()));
    }
    let dot = |x: &[f64], g: &[f64]| x.iter().zip(g).map(|(a, b)| a * b).sum::<f64>();
    let lhs = plan.sphere_factor() * radial_integral("lifted dilation", field, plan, cfg, |s| s.v * dot(s.x, s.grad))?;
    let rhs_core = if let Some(u) = field.exact_form() {
        let w = spec.wall_monomial();
        let q = PolyGauss::new(u.rate(), u.poly().div_monomial(&w).expect("wall exponents are 1"))?;
        let mut xq = PolyGauss::zero(spec.n(), u.rate())?;
        for (i, d) in q.gradient().into_iter().enumerate() {
            xq = xq.add(&d.mul_coordinate(i))?;
        }
        let w2: Vec<u32> = w.iter().map(|e| 2 * e).collect();
        exact_oracle::descriptor_integral(&q.mul(&xq).mul_monomial(&w2), &spec.region())?
    } else {
        let n = spec.n();
        let c = orthant_cfg(cfg);
        integrate_decaying("orthant dilation", &spec.region(), field.decay_rate(), field.support(), &c, 1, |x, out| {
            let mut g = [0.0; MAX_DIM];
            let q = field.quotient_by_wall_into(x, &mut g[..n]);
            let w: f64 = spec.wall_axes().map(|i| x[i]).product();
            out[0] = q * dot(x, &g[..n]) * w * w;
        })?[0]
    };
    Ok(LiftCheck::new(lhs, plan.sphere_factor() * rhs_core))
}

/// Which lifted-side integral the Cartesian check evaluates.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum LiftedIntegral {
    /// `∫ |X|^{2a} ṽ²`.
    Moment(f64),
    /// `∫ |X|^{2b} |∇ṽ|²`, divided by the sphere factor.
    Gradient(f64),
    /// `∫ ṽ (X·∇ṽ)`.
    Dilation,
}

/// Points per panel on bump axes of the Cartesian grid.
pub const CARTESIAN_PANEL_ORDER: usize = 30;

/// The lifted-side integral by a full Cartesian grid on `ℝ^{n+2|l|}`,
/// evaluating `ṽ` through block norms at every node. Only for lifted
/// dimension at most 4.
pub fn cartesian_lifted_integral(field: &TestField, plan: &LiftPlan, what: LiftedIntegral, cfg: &QuadConfig) -> Result<f64> {
    check_plan(field, plan)?;
    let dim = plan.lifted_dim();
    if dim > MAX_CARTESIAN_DIM {
        return Err(Error::Capability(format!(
            "Cartesian cross-check limited to lifted dimension {MAX_CARTESIAN_DIM}, got {dim}"
        )));
    }
    let spec = plan.spec;
    let n = spec.n();
    let sizes = plan.block_sizes();
    let integrand = |y: &[f64]| -> f64 {
        let mut x = [0.0; MAX_DIM];
        plan.project_into(y, &mut x[..n]);
        let mut g = [0.0; MAX_DIM];
        let v = field.residual().eval(&x[..n], &mut g[..n]);
        let r2 = sq(y);
        match what {
            LiftedIntegral::Moment(a) => (if a == 0.0 { 1.0 } else { r2.powf(a) }) * v * v,
            LiftedIntegral::Gradient(b) => {
                // |∇ṽ|² = |∇v|² at the projected point
                (if b == 0.0 { 1.0 } else { r2.powf(b) }) * sq(&g[..n])
            }
            LiftedIntegral::Dilation => {
                let radial: f64 = (0..n).map(|i| x[i] * g[i]).sum();
                v * radial
            }
        }
    };
    let scale = match what {
        LiftedIntegral::Gradient(_) => 1.0 / plan.sphere_factor(),
        _ => 1.0,
    };
    // One pass at a capped order: the comparison with the radial value is the
    // convergence check, and doubling a 4-D grid is too costly.
    let c = cfg;
    let mut axes = Vec::with_capacity(dim);
    for (i, size) in sizes.iter().enumerate() {
        for _ in 0..*size {
            let axis = match field.support() {
                Some(b) => {
                    let (lo, hi) = if spec.is_wall(i) { (-b.hi[i], b.hi[i]) } else { (b.lo[i], b.hi[i]) };
                    let panels = if spec.is_wall(i) { 2 * c.bump_panels } else { c.bump_panels };
                    let m = c.bump_order.min(CARTESIAN_PANEL_ORDER);
                    GridAxis::new(Arc::new(composite_legendre_rule(m, panels, lo, hi)?), 1.0)?
                }
                None => GridAxis::new(hermite_rule(c.order.min(MAX_ORDER))?, 1.0 / field.decay_rate().sqrt())?,
            };
            axes.push(axis);
        }
    }
    let grid = QuadratureGrid::new(axes)?;
    let v = grid.integrate(WeightKind::Lebesgue, integrand)?;
    Ok(scale * v)
}

/// Lifted-side integral by radial reduction, for comparison with
/// [`cartesian_lifted_integral`].
pub fn radial_lifted_integral(field: &TestField, plan: &LiftPlan, what: LiftedIntegral, cfg: &QuadConfig) -> Result<f64> {
    check_plan(field, plan)?;
    let core = radial_integral("radial lift", field, plan, cfg, |s| {
        let r2 = sq(s.x);
        match what {
            LiftedIntegral::Moment(a) => (if a == 0.0 { 1.0 } else { r2.powf(a) }) * s.v * s.v,
            LiftedIntegral::Gradient(b) => (if b == 0.0 { 1.0 } else { r2.powf(b) }) * sq(s.grad),
            LiftedIntegral::Dilation => s.v * s.x.iter().zip(s.grad).map(|(a, b)| a * b).sum::<f64>(),
        }
    })?;
    Ok(match what {
        LiftedIntegral::Gradient(_) => core,
        _ => plan.sphere_factor() * core,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::{make_extremal, SupportBox};
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    fn s11() -> OrthantSpec {
        OrthantSpec::new(1, 1).unwrap()
    }

    fn cfg() -> QuadConfig {
        QuadConfig::with_order(24)
    }

    #[test]
    fn lifted_eval_examples() {
        let f = make_extremal(s11(), 1.0, 0.5).unwrap();
        let plan = LiftPlan::uniform(s11(), 1).unwrap();
        assert_eq!(plan.lifted_dim(), 3);
        let a = lifted_eval(&f, &plan, &[1.0, 0.0, 0.0]).unwrap();
        assert_relative_eq!(a, (-0.5f64).exp(), max_relative = 1e-15);
        assert_eq!(a, lifted_eval(&f, &plan, &[0.0, 1.0, 0.0]).unwrap());
        assert!(matches!(lifted_eval(&f, &plan, &[0.0, 0.0, 0.0]), Err(Error::Domain(_))));

        let spec = OrthantSpec::new(2, 1).unwrap();
        let u = PolyGauss::new(1.0, Polynomial::monomial(vec![1, 1], 1.0)).unwrap();
        let g = TestField::from_polygauss(spec, vec![0, 1], u).unwrap();
        let plan = LiftPlan::uniform(spec, 1).unwrap();
        let v = lifted_eval(&g, &plan, &[1.0, 0.0, 0.0, 2.0]).unwrap();
        assert_relative_eq!(v, (-2.5f64).exp(), max_relative = 1e-15);
    }

    #[test]
    fn mass_and_moment_lift_extremal() {
        let f = make_extremal(s11(), 1.0, 0.5).unwrap();
        let plan = LiftPlan::uniform(s11(), 1).unwrap();
        let m = verify_mass_lift(&f, &plan, &cfg()).unwrap();
        assert_relative_eq!(m.lhs, PI.powf(1.5), max_relative = 1e-12);
        assert_relative_eq!(m.rhs, PI.powf(1.5), max_relative = 1e-13);
        let m1 = verify_moment_lift(&f, &plan, 1.0, &cfg()).unwrap();
        assert_relative_eq!(m1.lhs, 1.5 * PI.powf(1.5), max_relative = 1e-12);
        assert!(m1.gap < 1e-12);
        let m2 = verify_moment_lift(&f, &plan, 2.0, &cfg()).unwrap();
        assert_relative_eq!(m2.rhs, 3.75 * PI.powf(1.5), max_relative = 1e-13);
        assert!(m2.gap < 1e-12);
    }

    #[test]
    fn zero_field_lifts_to_zero() {
        let f = make_extremal(s11(), 0.0, 0.5).unwrap();
        let plan = LiftPlan::uniform(s11(), 1).unwrap();
        let m = verify_mass_lift(&f, &plan, &cfg()).unwrap();
        assert_eq!((m.lhs, m.rhs, m.gap), (0.0, 0.0, 0.0));
        let d = verify_dilation_pairing(&f, &plan, &cfg()).unwrap();
        assert_eq!((d.lhs, d.rhs, d.gap), (0.0, 0.0, 0.0));
    }

    #[test]
    fn bump_mass_lift() {
        let f = TestField::bump(s11(), vec![1], SupportBox::cube(1, 1.0, 2.0).unwrap()).unwrap();
        let plan = LiftPlan::for_field(&f).unwrap();
        let m = verify_mass_lift(&f, &plan, &QuadConfig::default()).unwrap();
        assert!(m.gap < 1e-6, "{m:?}");
    }

    #[test]
    fn gradient_lift_bump() {
        for (l, b) in [(1u32, 0.0), (1, 1.0), (2, 0.0)] {
            let f = TestField::bump(s11(), vec![l], SupportBox::cube(1, 1.0, 2.0).unwrap()).unwrap();
            let plan = LiftPlan::for_field(&f).unwrap();
            let c = verify_gradient_lift(&f, &plan, b, &QuadConfig::default()).unwrap();
            assert!(c.gap < 1e-6, "l={l} b={b}: {c:?}");
        }
    }

    #[test]
    fn gradient_lift_weighted_middle_term() {
        let f = TestField::bump(s11(), vec![2], SupportBox::cube(1, 1.0, 2.0).unwrap()).unwrap();
        let plan = LiftPlan::for_field(&f).unwrap();
        let cfg = QuadConfig::default();
        let literal = verify_gradient_lift(&f, &plan, 1.0, &cfg).unwrap();
        let weighted = verify_gradient_lift_weighted(&f, &plan, 1.0, &cfg).unwrap();
        assert!(literal.gap > 1e-3, "{literal:?}");
        assert!(weighted.gap < 1e-6, "{weighted:?}");
        for b in [0.0, 1.0] {
            let g = TestField::bump(OrthantSpec::new(2, 1).unwrap(), vec![0, 2], SupportBox::cube(2, 0.5, 1.5).unwrap()).unwrap();
            let plan = LiftPlan::for_field(&g).unwrap();
            let c = verify_gradient_lift_weighted(&g, &plan, b, &cfg).unwrap();
            assert!(c.gap < 1e-6, "b={b}: {c:?}");
        }
    }

    #[test]
    fn gradient_lift_refuses_non_bump() {
        let f = make_extremal(s11(), 1.0, 0.5).unwrap();
        let plan = LiftPlan::for_field(&f).unwrap();
        assert!(matches!(verify_gradient_lift(&f, &plan, 0.0, &cfg()), Err(Error::Capability(_))));
    }

    #[test]
    fn dilation_pairing_extremal_closed_form() {
        for (n, k) in [(1, 1), (2, 1), (2, 2)] {
            let spec = OrthantSpec::new(n, k).unwrap();
            let f = make_extremal(spec, 1.0, 0.5).unwrap();
            let plan = LiftPlan::uniform(spec, 1).unwrap();
            let d = verify_dilation_pairing(&f, &plan, &cfg()).unwrap();
            let mass = verify_mass_lift(&f, &plan, &cfg()).unwrap().rhs;
            assert!(d.gap < 1e-10, "{d:?}");
            assert_relative_eq!(d.rhs, -((n + 2 * k) as f64) / 2.0 * mass, max_relative = 1e-12);
        }
    }

    #[test]
    fn lifted_dimension_budget() {
        let spec = OrthantSpec::new(3, 3).unwrap();
        let f = make_extremal(spec, 1.0, 0.5).unwrap();
        let plan = LiftPlan::new(spec, vec![1, 1, 1]).unwrap();
        assert_eq!(plan.lifted_dim(), 9);
        assert!(matches!(verify_mass_lift(&f, &plan, &cfg()), Err(Error::Capability(_))));
    }

    #[test]
    fn cartesian_matches_radial_extremal() {
        let f = make_extremal(s11(), 1.0, 0.5).unwrap();
        let plan = LiftPlan::for_field(&f).unwrap();
        for what in [LiftedIntegral::Moment(0.0), LiftedIntegral::Moment(1.0), LiftedIntegral::Dilation] {
            let c = cartesian_lifted_integral(&f, &plan, what, &cfg()).unwrap();
            let r = radial_lifted_integral(&f, &plan, what, &cfg()).unwrap();
            assert_relative_eq!(c, r, max_relative = 1e-10);
        }
    }

    #[test]
    fn cartesian_matches_radial_bump() {
        let f = TestField::bump(s11(), vec![1], SupportBox::cube(1, 1.0, 2.0).unwrap()).unwrap();
        let plan = LiftPlan::for_field(&f).unwrap();
        let cfg = QuadConfig { check_convergence: false, ..QuadConfig::default() };
        for what in [LiftedIntegral::Moment(0.0), LiftedIntegral::Gradient(0.0)] {
            let c = cartesian_lifted_integral(&f, &plan, what, &cfg).unwrap();
            let r = radial_lifted_integral(&f, &plan, what, &cfg).unwrap();
            assert!((c - r).abs() <= 1e-6 * (1.0 + r.abs()), "{what:?}: {c} vs {r}");
        }
    }
}
