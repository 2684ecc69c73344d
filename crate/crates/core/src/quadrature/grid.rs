//! Tensor-product grids and deterministic parallel integration.

use std::sync::Arc;

use rayon::prelude::*;

use crate::domain::{Region, SupportBox, WeightExponents, MAX_DIM};
use crate::error::{Error, Result};
use crate::exact_oracle::neumaier_add;

use super::rules::{
    composite_legendre_rule, half_range_rule, hermite_rule_internal, AxisRule, RuleDomain,
    MAX_INTERNAL_ORDER,
};

/// One axis of a grid: a rule plus the substitution `x = σ t`.
#[derive(Clone, Debug)]
pub struct GridAxis {
    rule: Arc<AxisRule>,
    scale: f64,
    x: Vec<f64>,
    native: Vec<f64>,
    lebesgue: Vec<f64>,
    weighted: Vec<f64>,
}

impl GridAxis {
    /// Gaussian-type rules are scaled by `σ`; interval rules ignore it.
    pub fn new(rule: Arc<AxisRule>, scale: f64) -> Result<Self> {
        if !(scale > 0.0) || !scale.is_finite() {
            return Err(Error::Parameter(format!("grid scale must be positive, got {scale}")));
        }
        let m = rule.len();
        let (mut x, mut native, mut lebesgue, mut weighted) =
            (Vec::with_capacity(m), Vec::with_capacity(m), Vec::with_capacity(m), Vec::with_capacity(m));
        match rule.domain {
            RuleDomain::Interval { .. } => {
                x.extend_from_slice(&rule.nodes);
                native.extend_from_slice(&rule.weights);
                lebesgue.extend_from_slice(&rule.weights);
                weighted.extend_from_slice(&rule.weights);
            }
            RuleDomain::FullLine | RuleDomain::HalfLine { .. } => {
                let a = match rule.domain {
                    RuleDomain::HalfLine { a } => a,
                    _ => 0.0,
                };
                let ls = scale.ln();
                for (t, lw) in rule.nodes.iter().zip(&rule.log_weights) {
                    let xi = scale * t;
                    x.push(xi);
                    native.push((lw + (1.0 + a) * ls).exp());
                    let lt = if a > 0.0 { a * t.ln() } else { 0.0 };
                    lebesgue.push((lw + ls + t * t - lt).exp());
                    weighted.push((lw + (1.0 + a) * ls + t * t).exp());
                }
            }
        }
        Ok(Self { rule, scale, x, native, lebesgue, weighted })
    }

    pub fn rule(&self) -> &AxisRule {
        &self.rule
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn nodes(&self) -> &[f64] {
        &self.x
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    fn weights(&self, kind: WeightKind) -> &[f64] {
        match kind {
            WeightKind::Native => &self.native,
            WeightKind::Lebesgue => &self.lebesgue,
            WeightKind::Weighted => &self.weighted,
        }
    }
}

/// Which measure the grid weights represent.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WeightKind {
    /// The rule's own weight carried to `x`: `∫ f(x) x^a e^{-x²/σ²} dx`.
    Native,
    /// Plain Lebesgue measure, `∫ f(x) dx`; the integrand carries its own decay.
    Lebesgue,
    /// Lebesgue measure times the half-line monomial, `∫ f(x) x^a dx`.
    Weighted,
}

#[derive(Clone, Debug)]
pub struct QuadratureGrid {
    axes: Vec<GridAxis>,
}

impl QuadratureGrid {
    pub fn new(axes: Vec<GridAxis>) -> Result<Self> {
        if axes.is_empty() || axes.len() > MAX_DIM {
            return Err(Error::Parameter(format!("grid dimension must be in 1..={MAX_DIM}")));
        }
        Ok(Self { axes })
    }

    /// Grid for integrands decaying like `e^{-rate |x|²}` on a region; half
    /// axes use Gauss rules for `x^a e^{-x²}` with the region's exponent.
    pub fn for_decay(region: &Region, rate: f64, order: usize) -> Result<Self> {
        if !(rate > 0.0) || !rate.is_finite() {
            return Err(Error::Parameter(format!("decay rate must be positive, got {rate}")));
        }
        let sigma = 1.0 / rate.sqrt();
        let axes = region
            .axes
            .iter()
            .map(|ax| {
                let rule = if ax.half {
                    half_range_rule(order, ax.weight_exponent)?
                } else {
                    hermite_rule_internal(order, MAX_INTERNAL_ORDER)?
                };
                GridAxis::new(rule, sigma)
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(axes)
    }

    /// Grid whose native weight is `x^A e^{-|x|²/(2λ²)}`.
    pub fn for_measure(exponents: &WeightExponents, lambda: f64, order: usize) -> Result<Self> {
        Self::for_decay(&exponents.region(), 1.0 / (2.0 * lambda * lambda), order)
    }

    /// Composite Gauss–Legendre grid over a box.
    pub fn panels(support: &SupportBox, order: usize, panels: usize) -> Result<Self> {
        let axes = support
            .lo
            .iter()
            .zip(&support.hi)
            .map(|(lo, hi)| GridAxis::new(Arc::new(composite_legendre_rule(order, panels, *lo, *hi)?), 1.0))
            .collect::<Result<Vec<_>>>()?;
        Self::new(axes)
    }

    pub fn dim(&self) -> usize {
        self.axes.len()
    }

    pub fn axes(&self) -> &[GridAxis] {
        &self.axes
    }

    pub fn node_count(&self) -> usize {
        self.axes.iter().map(GridAxis::len).product()
    }

    /// `Σ w f(x)` for a scalar integrand.
    pub fn integrate<F>(&self, kind: WeightKind, f: F) -> Result<f64>
    where
        F: Fn(&[f64]) -> f64 + Sync,
    {
        let out = self.integrate_many(kind, 1, |x, o| o[0] = f(x))?;
        Ok(out[0])
    }

    /// Vector-valued integration: `f` writes `k` values per node.
    ///
    /// The first axis is split across workers; each worker sums its slab in
    /// lexicographic order with compensated accumulation, and slab sums are
    /// combined by a fixed pairwise tree, so the result does not depend on
    /// scheduling.
    pub fn integrate_many<F>(&self, kind: WeightKind, k: usize, f: F) -> Result<Vec<f64>>
    where
        F: Fn(&[f64], &mut [f64]) + Sync,
    {
        let first = &self.axes[0];
        let slabs: Vec<Vec<f64>> = (0..first.len())
            .into_par_iter()
            .map(|i0| self.slab(kind, k, i0, &f))
            .collect::<Result<Vec<_>>>()?;
        Ok(pairwise(&slabs, k))
    }

    fn slab<F>(&self, kind: WeightKind, k: usize, i0: usize, f: &F) -> Result<Vec<f64>>
    where
        F: Fn(&[f64], &mut [f64]),
    {
        let d = self.dim();
        let mut x = [0.0; MAX_DIM];
        let mut idx = [0usize; MAX_DIM];
        let mut wprod = [0.0; MAX_DIM + 1];
        let mut out = vec![0.0; k];
        let mut sum = vec![0.0; k];
        let mut comp = vec![0.0; k];
        x[0] = self.axes[0].x[i0];
        wprod[1] = self.axes[0].weights(kind)[i0];
        for j in 1..d {
            x[j] = self.axes[j].x[0];
            wprod[j + 1] = wprod[j] * self.axes[j].weights(kind)[0];
        }
        loop {
            f(&x[..d], &mut out);
            let w = wprod[d];
            for c in 0..k {
                let v = out[c];
                if !v.is_finite() {
                    return Err(Error::Evaluation { node: x[..d].to_vec() });
                }
                if w != 0.0 {
                    neumaier_add(&mut sum[c], &mut comp[c], w * v);
                }
            }
            // odometer over axes 1..d, last axis fastest
            let mut j = d;
            loop {
                if j == 1 {
                    return Ok(sum.iter().zip(&comp).map(|(s, c)| s + c).collect());
                }
                j -= 1;
                idx[j] += 1;
                if idx[j] < self.axes[j].len() {
                    break;
                }
                idx[j] = 0;
            }
            for jj in j..d {
                x[jj] = self.axes[jj].x[idx[jj]];
                wprod[jj + 1] = wprod[jj] * self.axes[jj].weights(kind)[idx[jj]];
            }
        }
    }
}

fn pairwise(parts: &[Vec<f64>], k: usize) -> Vec<f64> {
    match parts.len() {
        0 => vec![0.0; k],
        1 => parts[0].clone(),
        n => {
            let (l, r) = parts.split_at(n / 2);
            let a = pairwise(l, k);
            let b = pairwise(r, k);
            a.iter().zip(&b).map(|(x, y)| x + y).collect()
        }
    }
}

/// `Σ` over the tensor node set of the joint native weight times `f`.
pub fn tensor_integrate<F>(grid: &QuadratureGrid, f: F) -> Result<f64>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    grid.integrate(WeightKind::Native, f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::rules::{half_monomial_rule, hermite_rule};
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    #[test]
    fn one_axis_constant() {
        let g = QuadratureGrid::new(vec![GridAxis::new(hermite_rule(20).unwrap(), 1.0).unwrap()]).unwrap();
        assert_relative_eq!(tensor_integrate(&g, |_| 1.0).unwrap(), PI.sqrt(), max_relative = 1e-14);
    }

    #[test]
    fn mixed_axes_constant() {
        let g = QuadratureGrid::new(vec![
            GridAxis::new(hermite_rule(30).unwrap(), 1.0).unwrap(),
            GridAxis::new(half_monomial_rule(30, 2.0).unwrap(), 1.0).unwrap(),
        ])
        .unwrap();
        assert_relative_eq!(tensor_integrate(&g, |_| 1.0).unwrap(), PI / 4.0, max_relative = 1e-13);
    }

    #[test]
    fn three_axis_second_moment() {
        let axis = || GridAxis::new(hermite_rule(30).unwrap(), 1.0).unwrap();
        let g = QuadratureGrid::new(vec![axis(), axis(), axis()]).unwrap();
        let v = tensor_integrate(&g, |y| y.iter().map(|t| t * t).sum()).unwrap();
        assert_relative_eq!(v, 1.5 * PI.powf(1.5), max_relative = 1e-13);
    }

    #[test]
    fn scaled_gaussian_lebesgue() {
        for &s in &[0.3, 1.0, 4.0] {
            let g = QuadratureGrid::for_decay(&Region::full(3), s, 20).unwrap();
            let v = g.integrate(WeightKind::Lebesgue, |x| (-s * x.iter().map(|t| t * t).sum::<f64>()).exp()).unwrap();
            assert_relative_eq!(v, (PI / s).powf(1.5), max_relative = 1e-12);
        }
    }

    #[test]
    fn non_finite_integrand_reports_node() {
        let g = QuadratureGrid::for_decay(&Region::full(2), 1.0, 4).unwrap();
        let err = g.integrate(WeightKind::Native, |x| if x[0] > 0.0 { f64::NAN } else { 1.0 }).unwrap_err();
        match err {
            Error::Evaluation { node } => assert!(node[0] > 0.0 && node.len() == 2),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn deterministic_repeats() {
        let g = QuadratureGrid::for_decay(&Region::full(3), 1.0, 24).unwrap();
        let f = |x: &[f64]| (x[0] * 1.3).sin() * (-x.iter().map(|t| t * t).sum::<f64>()).exp() + x[1].cos();
        let a = g.integrate(WeightKind::Lebesgue, f).unwrap();
        for _ in 0..5 {
            assert_eq!(a.to_bits(), g.integrate(WeightKind::Lebesgue, f).unwrap().to_bits());
        }
    }

    #[test]
    fn bump_panels_match_reference() {
        let g = QuadratureGrid::panels(&SupportBox::cube(1, -1.0, 1.0).unwrap(), 80, 1).unwrap();
        let v = g.integrate(WeightKind::Native, |x| crate::domain::mollifier(x[0]).0).unwrap();
        // reference by a much finer composite rule
        let fine = QuadratureGrid::panels(&SupportBox::cube(1, -1.0, 1.0).unwrap(), 40, 64).unwrap();
        let r = fine.integrate(WeightKind::Native, |x| crate::domain::mollifier(x[0]).0).unwrap();
        assert_relative_eq!(v, r, max_relative = 1e-10);
    }
}
