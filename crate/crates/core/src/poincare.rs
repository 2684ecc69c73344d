//! Gaussian Poincaré inequality for the monomial-weighted measure `μ_{A,λ}`
//! and its stability refinement against affine functions of the unweighted
//! coordinates.
//!
//! Everything reduces to a handful of `μ`-moments of `f`, collected in
//! [`MeasureStats`]. Polynomials get them from Gamma moments; arbitrary
//! smooth functions get them from the measure's own tensor quadrature.

use serde::{Deserialize, Serialize};

use crate::deficits;
use crate::domain::{Residual, ScaledGaussianMeasure, TestField};
use crate::error::{Error, Result};
use crate::exact_oracle::{full_moment_real, half_moment_real};
use crate::functionals::{core_functionals, Backend};
use crate::poly::Polynomial;
use crate::quadrature::{with_refinement, QuadConfig, QuadratureGrid, WeightKind};

/// Variance below this fraction of `E[f²]` is treated as zero.
const DEGENERATE_VARIANCE: f64 = 1e-24;

/// A scalar function given by a closure returning its value and writing its gradient.
pub struct FnField<F> {
    dim: usize,
    f: F,
}

impl<F> FnField<F>
where
    F: Fn(&[f64], &mut [f64]) -> f64 + Send + Sync,
{
    pub fn new(dim: usize, f: F) -> Self {
        Self { dim, f }
    }
}

impl<F> Residual for FnField<F>
where
    F: Fn(&[f64], &mut [f64]) -> f64 + Send + Sync,
{
    fn dim(&self) -> usize {
        self.dim
    }

    fn eval(&self, x: &[f64], grad: &mut [f64]) -> f64 {
        (self.f)(x, grad)
    }
}

/// The `μ`-moments of `f` that the Poincaré quantities are built from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeasureStats {
    pub lambda: f64,
    pub mean: f64,
    /// `E[f²]`, kept for scaling the degeneracy test.
    pub second_moment: f64,
    pub variance: f64,
    /// `E|∇f|²`.
    pub dirichlet: f64,
    /// Indices of the axes with zero weight exponent.
    pub unweighted_axes: Vec<usize>,
    /// `Cov(f, x_i)` for each unweighted axis.
    pub covariances: Vec<f64>,
    /// `Var(x_i)` for each unweighted axis.
    pub axis_variances: Vec<f64>,
}

impl MeasureStats {
    pub fn is_degenerate(&self) -> bool {
        self.variance <= DEGENERATE_VARIANCE * self.second_moment.max(f64::MIN_POSITIVE)
    }

    /// Regression slopes `d_i = Cov(f, x_i) / Var(x_i)` on the unweighted axes.
    pub fn slopes(&self) -> Vec<f64> {
        self.covariances.iter().zip(&self.axis_variances).map(|(c, v)| c / v).collect()
    }

    /// `inf_{c,d} E|f - c - d·x|²` with `d` on the unweighted axes.
    pub fn affine_residual(&self) -> f64 {
        let explained: f64 = self.covariances.iter().zip(&self.axis_variances).map(|(c, v)| c * c / v).sum();
        (self.variance - explained).max(0.0)
    }

    /// True when the restricted-affine residual is negligible against `Var(f)`.
    pub fn is_restricted_affine(&self, tol: f64) -> bool {
        self.affine_residual() < tol * self.variance
    }
}

fn unweighted_axes(measure: &ScaledGaussianMeasure) -> Vec<usize> {
    (0..measure.dim()).filter(|i| !measure.exponents().is_weighted(*i)).collect()
}

fn check_dim(dim: usize, measure: &ScaledGaussianMeasure) -> Result<()> {
    if dim != measure.dim() {
        return Err(Error::Parameter(format!("function has dimension {dim}, measure has {}", measure.dim())));
    }
    Ok(())
}

/// `E_μ[x^γ]` from one-dimensional Gamma moments.
fn monomial_expectation(gamma: &[u32], measure: &ScaledGaussianMeasure) -> f64 {
    let r = measure.rate();
    gamma
        .iter()
        .zip(measure.exponents().as_slice())
        .map(|(&g, &a)| {
            if a > 0.0 {
                half_moment_real(a + g as f64, r) / half_moment_real(a, r)
            } else if g % 2 == 1 {
                0.0
            } else {
                full_moment_real(g as f64, r) / full_moment_real(0.0, r)
            }
        })
        .product()
}

/// `E_μ[p]` for a polynomial.
pub fn polynomial_expectation(p: &Polynomial, measure: &ScaledGaussianMeasure) -> Result<f64> {
    check_dim(p.dim(), measure)?;
    Ok(p.terms().map(|(g, c)| c * monomial_expectation(g, measure)).sum())
}

/// Exact moments of a polynomial under `μ`.
pub fn polynomial_stats(p: &Polynomial, measure: &ScaledGaussianMeasure) -> Result<MeasureStats> {
    check_dim(p.dim(), measure)?;
    let n = p.dim();
    let mean = polynomial_expectation(p, measure)?;
    let centered = p.sub(&Polynomial::constant(n, mean));
    let variance = polynomial_expectation(&centered.mul(&centered), measure)?;
    let second_moment = polynomial_expectation(&p.mul(p), measure)?;
    let mut dirichlet = 0.0;
    for i in 0..n {
        let d = p.partial(i);
        dirichlet += polynomial_expectation(&d.mul(&d), measure)?;
    }
    let axes = unweighted_axes(measure);
    let mut covariances = Vec::with_capacity(axes.len());
    let mut axis_variances = Vec::with_capacity(axes.len());
    for &i in &axes {
        covariances.push(polynomial_expectation(&centered.mul_coordinate(i), measure)?);
        axis_variances.push(measure.lambda().powi(2));
    }
    Ok(MeasureStats {
        lambda: measure.lambda(),
        mean,
        second_moment,
        variance,
        dirichlet,
        unweighted_axes: axes,
        covariances,
        axis_variances,
    })
}

/// Moments of an arbitrary smooth function under `μ` by tensor quadrature,
/// with the usual order-doubling check.
pub fn measure_stats(f: &dyn Residual, measure: &ScaledGaussianMeasure, cfg: &QuadConfig) -> Result<MeasureStats> {
    let n = f.dim();
    check_dim(n, measure)?;
    let axes = unweighted_axes(measure);
    let z = measure.normalization();
    let m = axes.len();
    let v = with_refinement("measure moments", cfg, |c| {
        let grid = QuadratureGrid::for_measure(measure.exponents(), measure.lambda(), c.order)?;
        let first = grid.integrate_many(WeightKind::Native, 1 + m, |x, out| {
            let mut g = [0.0; crate::domain::MAX_DIM];
            out[0] = f.eval(x, &mut g[..n]);
            for (j, &i) in axes.iter().enumerate() {
                out[1 + j] = x[i];
            }
        })?;
        let mean = first[0] / z;
        let axis_means: Vec<f64> = first[1..].iter().map(|v| v / z).collect();
        let second = grid.integrate_many(WeightKind::Native, 3 + 2 * m, |x, out| {
            let mut g = [0.0; crate::domain::MAX_DIM];
            let v = f.eval(x, &mut g[..n]);
            let dv = v - mean;
            out[0] = dv * dv;
            out[1] = v * v;
            out[2] = g[..n].iter().map(|t| t * t).sum();
            for (j, &i) in axes.iter().enumerate() {
                let dx = x[i] - axis_means[j];
                out[3 + j] = dv * dx;
                out[3 + m + j] = dx * dx;
            }
        })?;
        let mut out = vec![mean];
        out.extend(second.iter().map(|v| v / z));
        Ok(out)
    })?;
    Ok(MeasureStats {
        lambda: measure.lambda(),
        mean: v[0],
        variance: v[1],
        second_moment: v[2],
        dirichlet: v[3],
        unweighted_axes: axes,
        covariances: v[4..4 + m].to_vec(),
        axis_variances: v[4 + m..4 + 2 * m].to_vec(),
    })
}

/// `E|∇f|² / Var(f)` from precomputed moments.
pub fn rayleigh_from(stats: &MeasureStats) -> Result<f64> {
    if stats.is_degenerate() {
        return Err(Error::Degenerate("the function has zero variance under the measure".into()));
    }
    Ok(stats.dirichlet / stats.variance)
}

/// Rayleigh quotient `∫|∇f|² dμ / ∫(f - mean)² dμ`, bounded below by `1/λ²`.
pub fn rayleigh_quotient(f: &dyn Residual, measure: &ScaledGaussianMeasure, cfg: &QuadConfig) -> Result<f64> {
    rayleigh_from(&measure_stats(f, measure, cfg)?)
}

/// Poincaré gap `E|∇f|² - Var(f)/λ²`. A constant function has gap 0 and the flag set.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PoincareGap {
    pub gap: f64,
    pub degenerate: bool,
    /// `max(E|∇f|², Var(f)/λ²)`, the size the gap is judged against.
    pub scale: f64,
}

pub fn poincare_gap_from(stats: &MeasureStats) -> PoincareGap {
    let bound = stats.variance / stats.lambda.powi(2);
    let scale = stats.dirichlet.abs().max(bound.abs());
    if stats.is_degenerate() {
        return PoincareGap { gap: 0.0, degenerate: true, scale };
    }
    PoincareGap { gap: stats.dirichlet - bound, degenerate: false, scale }
}

pub fn poincare_gap(f: &dyn Residual, measure: &ScaledGaussianMeasure, cfg: &QuadConfig) -> Result<PoincareGap> {
    Ok(poincare_gap_from(&measure_stats(f, measure, cfg)?))
}

/// Stability refinement: the Poincaré gap dominates the restricted-affine residual.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PoincareStability {
    pub lhs_gap: f64,
    pub rhs_bound: f64,
    pub margin: f64,
    pub scale: f64,
    /// Best constant `c`.
    pub offset: f64,
    /// Best slopes, one per unweighted axis.
    pub slopes: Vec<f64>,
}

pub fn poincare_stability_from(stats: &MeasureStats) -> PoincareStability {
    let inv = 1.0 / stats.lambda.powi(2);
    let lhs_gap = stats.dirichlet - inv * stats.variance;
    let rhs_bound = inv * stats.affine_residual();
    let slopes = stats.slopes();
    PoincareStability {
        lhs_gap,
        rhs_bound,
        margin: lhs_gap - rhs_bound,
        scale: stats.dirichlet.abs().max(inv * stats.variance),
        // unweighted coordinates have mean zero under μ
        offset: stats.mean,
        slopes,
    }
}

pub fn poincare_stability_gap(
    f: &dyn Residual,
    measure: &ScaledGaussianMeasure,
    cfg: &QuadConfig,
) -> Result<PoincareStability> {
    Ok(poincare_stability_from(&measure_stats(f, measure, cfg)?))
}

/// The additive deficit at `α = 1` computed two ways: from the core
/// functionals, and as `Z ∫|∇f|² dμ` for `f = (u/w) e^{|x|²/2}` under the
/// measure with exponent 2 on the walls and `λ = 1/√2`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DeficitPoincareCheck {
    pub additive: f64,
    pub poincare_form: f64,
    pub normalization: f64,
    pub rel_gap: f64,
}

pub fn deficit_poincare_form(field: &TestField, cfg: &QuadConfig) -> Result<DeficitPoincareCheck> {
    let spec = field.spec();
    if !field.wall_exponents().iter().enumerate().all(|(i, &p)| p == u32::from(spec.is_wall(i))) {
        return Err(Error::Capability("needs wall exponent exactly 1 on every wall and 0 elsewhere".into()));
    }
    let backend = if field.exact_form().is_some() { Backend::Oracle } else { Backend::Quadrature };
    let core = core_functionals(field, backend, cfg)?;
    let additive = deficits::additive_from(&core, 1.0)?;
    let exps: Vec<f64> = (0..spec.n()).map(|i| if spec.is_wall(i) { 2.0 } else { 0.0 }).collect();
    let measure = ScaledGaussianMeasure::new(crate::domain::WeightExponents::new(exps)?, std::f64::consts::FRAC_1_SQRT_2)?;
    let n = spec.n();
    let f = FnField::new(n, |x: &[f64], grad: &mut [f64]| {
        let q = field.quotient_by_wall_into(x, grad);
        let e = (0.5 * x.iter().map(|t| t * t).sum::<f64>()).exp();
        for (g, xi) in grad.iter_mut().zip(x) {
            *g = e * (*g + xi * q);
        }
        q * e
    });
    let stats = measure_stats(&f, &measure, cfg)?;
    let z = measure.normalization();
    let poincare_form = z * stats.dirichlet;
    let scale = additive.abs().max(poincare_form.abs()).max(core.scale());
    Ok(DeficitPoincareCheck {
        additive,
        poincare_form,
        normalization: z,
        rel_gap: (additive - poincare_form).abs() / scale,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::{make_extremal, OrthantSpec, WeightExponents};
    use crate::poly::PolyGauss;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    fn mu(a: Vec<f64>, lambda: f64) -> ScaledGaussianMeasure {
        ScaledGaussianMeasure::new(WeightExponents::new(a).unwrap(), lambda).unwrap()
    }

    fn cfg() -> QuadConfig {
        QuadConfig::with_order(24)
    }

    #[test]
    fn classical_gaussian_equality() {
        let x = Polynomial::coordinate(1, 0);
        let m = mu(vec![0.0], 1.0);
        assert_relative_eq!(rayleigh_from(&polynomial_stats(&x, &m).unwrap()).unwrap(), 1.0, max_relative = 1e-14);
        assert_relative_eq!(rayleigh_quotient(&x, &m, &cfg()).unwrap(), 1.0, max_relative = 1e-12);
    }

    #[test]
    fn weighted_half_line_quotient() {
        let x = Polynomial::coordinate(1, 0);
        let m = mu(vec![2.0], 1.0);
        let expected = 1.0 / (3.0 - 8.0 / PI);
        assert_relative_eq!(rayleigh_from(&polynomial_stats(&x, &m).unwrap()).unwrap(), expected, max_relative = 1e-12);
        assert_relative_eq!(rayleigh_quotient(&x, &m, &cfg()).unwrap(), expected, max_relative = 1e-10);
        let gap = poincare_gap(&x, &m, &cfg()).unwrap();
        assert_relative_eq!(gap.gap, 8.0 / PI - 2.0, max_relative = 1e-10);
    }

    #[test]
    fn unweighted_linear_is_equality() {
        let x1 = Polynomial::coordinate(2, 0);
        let m = mu(vec![0.0, 2.0], 2.0);
        let s = polynomial_stats(&x1, &m).unwrap();
        assert_relative_eq!(s.variance, 4.0, max_relative = 1e-14);
        assert_relative_eq!(rayleigh_from(&s).unwrap(), 0.25, max_relative = 1e-14);
        let f = x1.scale(3.0).add(&Polynomial::constant(2, -1.5));
        let g = poincare_gap(&f, &m, &cfg()).unwrap();
        assert!(g.gap.abs() < 1e-10 * g.scale, "{g:?}");
        assert!(polynomial_stats(&f, &m).unwrap().is_restricted_affine(1e-9));
    }

    #[test]
    fn constant_is_flagged() {
        let c = Polynomial::constant(2, 2.0);
        let m = mu(vec![0.0, 2.0], 1.0);
        let g = poincare_gap(&c, &m, &cfg()).unwrap();
        assert!(g.degenerate);
        assert_eq!(g.gap, 0.0);
        assert!(matches!(rayleigh_quotient(&c, &m, &cfg()), Err(Error::Degenerate(_))));
    }

    #[test]
    fn stability_product_example() {
        let f = Polynomial::monomial(vec![1, 1], 1.0);
        let m = mu(vec![0.0, 2.0], 1.0);
        let exact = poincare_stability_from(&polynomial_stats(&f, &m).unwrap());
        let quad = poincare_stability_gap(&f, &m, &cfg()).unwrap();
        let ex2 = monomial_expectation(&[0, 1], &m);
        assert_relative_eq!(exact.slopes[0], ex2, max_relative = 1e-13);
        assert!(exact.margin >= 0.0);
        assert_relative_eq!(quad.margin, exact.margin, max_relative = 1e-10);
    }

    #[test]
    fn stability_without_unweighted_axes() {
        let x = Polynomial::coordinate(1, 0);
        let m = mu(vec![2.0], 1.0);
        let s = polynomial_stats(&x, &m).unwrap();
        let st = poincare_stability_from(&s);
        assert_relative_eq!(st.rhs_bound, s.variance, max_relative = 1e-14);
        assert_relative_eq!(st.margin, poincare_gap_from(&s).gap - s.variance, max_relative = 1e-13);
        assert_relative_eq!(st.margin, 16.0 / PI - 5.0, max_relative = 1e-12);
    }

    #[test]
    fn quadrature_matches_exact_moments() {
        let f = Polynomial::from_terms(3, [(vec![1, 2, 0], 0.7), (vec![0, 1, 1], -1.2), (vec![2, 0, 1], 0.4)]);
        let m = mu(vec![0.0, 2.0, 2.0], 0.5);
        let a = polynomial_stats(&f, &m).unwrap();
        let b = measure_stats(&f, &m, &cfg()).unwrap();
        for (x, y) in [(a.mean, b.mean), (a.variance, b.variance), (a.dirichlet, b.dirichlet)] {
            assert_relative_eq!(x, y, max_relative = 1e-11);
        }
    }

    #[test]
    fn closure_fields_work() {
        let m = mu(vec![0.0], 1.0);
        let f = FnField::new(1, |x: &[f64], g: &mut [f64]| {
            g[0] = x[0].cos();
            x[0].sin()
        });
        let q = rayleigh_quotient(&f, &m, &QuadConfig::with_order(40)).unwrap();
        assert!(q >= 1.0);
    }

    #[test]
    fn additive_deficit_is_a_dirichlet_form() {
        let spec = OrthantSpec::new(2, 1).unwrap();
        let ext = make_extremal(spec, 1.3, 0.5).unwrap();
        let c = deficit_poincare_form(&ext, &cfg()).unwrap();
        assert!(c.additive.abs() < 1e-12 && c.poincare_form.abs() < 1e-12, "{c:?}");
        let p = Polynomial::from_terms(2, [(vec![0, 1], 1.0), (vec![1, 1], 0.5), (vec![2, 1], -0.3)]);
        for rate in [1.0, 2.0] {
            let u = TestField::from_polygauss(spec, vec![0, 1], PolyGauss::new(rate, p.clone()).unwrap()).unwrap();
            let c = deficit_poincare_form(&u, &cfg()).unwrap();
            assert!(c.rel_gap < 1e-8, "rate {rate}: {c:?}");
        }
    }
}
