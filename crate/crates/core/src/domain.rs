//! Orthant geometry, monomial weights, weighted Gaussian measures and the
//! wall-factored representation of test fields.
//!
//! Wall axes are always the last `k` coordinates. A field is stored as
//! `u(x) = (∏ x_i^{p_i}) · v(x)` with the smooth residual `v` and its
//! gradient available pointwise, so quotients like `u / w` never need a
//! limiting evaluation at a wall.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact_oracle;
use crate::poly::{Polynomial, PolyGauss};

/// Upper bound on the ambient dimension handled by stack buffers.
pub const MAX_DIM: usize = 16;

/// `ℝ^{n-k} × ℝ^k_{>0}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct OrthantSpec {
    n: usize,
    k: usize,
}

impl OrthantSpec {
    pub fn new(n: usize, k: usize) -> Result<Self> {
        if n == 0 || n > MAX_DIM {
            return Err(Error::Parameter(format!("dimension n must be in 1..={MAX_DIM}, got {n}")));
        }
        if k > n {
            return Err(Error::Parameter(format!("wall count k={k} exceeds n={n}")));
        }
        Ok(Self { n, k })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Zero-based indices of the wall axes, `n-k..n`.
    pub fn wall_axes(&self) -> std::ops::Range<usize> {
        self.n - self.k..self.n
    }

    /// Zero-based indices of the unweighted axes, `0..n-k`.
    pub fn free_axes(&self) -> std::ops::Range<usize> {
        0..self.n - self.k
    }

    pub fn is_wall(&self, i: usize) -> bool {
        i >= self.n - self.k && i < self.n
    }

    /// The sharp HUP constant's square root, `(n + 2k) / 2`.
    pub fn hup_half_dim(&self) -> f64 {
        (self.n + 2 * self.k) as f64 / 2.0
    }

    /// `w(x) = ∏_{wall} x_i` as a multi-index.
    pub fn wall_monomial(&self) -> Vec<u32> {
        (0..self.n).map(|i| u32::from(self.is_wall(i))).collect()
    }

    pub fn region(&self) -> Region {
        Region {
            axes: (0..self.n)
                .map(|i| AxisKind { half: self.is_wall(i), weight_exponent: 0.0 })
                .collect(),
        }
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.n
            && x.iter().all(|v| v.is_finite())
            && self.wall_axes().all(|i| x[i] > 0.0)
    }
}

impl fmt::Display for OrthantSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{}", self.n, self.k)
    }
}

impl std::str::FromStr for OrthantSpec {
    type Err = Error;

    /// Parses `"n,k"`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parameter(format!("expected 'n,k', got '{s}'"));
        let (n, k) = s.split_once(',').ok_or_else(bad)?;
        let n = n.trim().parse().map_err(|_| bad())?;
        let k = k.trim().parse().map_err(|_| bad())?;
        Self::new(n, k)
    }
}

/// Monomial weight exponents `A = (a_1, …, a_n)`, `a_i ≥ 0`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightExponents(Vec<f64>);

impl WeightExponents {
    pub fn new(a: Vec<f64>) -> Result<Self> {
        if a.is_empty() || a.len() > MAX_DIM {
            return Err(Error::Parameter("weight exponents need 1..=16 entries".into()));
        }
        if let Some(bad) = a.iter().find(|v| !(**v >= 0.0) || !v.is_finite()) {
            return Err(Error::Parameter(format!("weight exponent must be finite and >= 0, got {bad}")));
        }
        Ok(Self(a))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    /// `|A| = Σ a_i`.
    pub fn total(&self) -> f64 {
        self.0.iter().sum()
    }

    pub fn is_weighted(&self, i: usize) -> bool {
        self.0[i] > 0.0
    }

    /// Integer exponents, required by the lifting operations.
    pub fn integer(&self) -> Result<Vec<u32>> {
        self.0
            .iter()
            .map(|a| {
                if a.fract() == 0.0 {
                    Ok(*a as u32)
                } else {
                    Err(Error::Parameter(format!("lifting needs integer exponents, got {a}")))
                }
            })
            .collect()
    }

    /// `x^A`.
    pub fn monomial(&self, x: &[f64]) -> f64 {
        self.0.iter().zip(x).map(|(a, xi)| if *a == 0.0 { 1.0 } else { xi.powf(*a) }).product()
    }

    /// `ℝ^n_{A,+}` with the weight folded into each half axis.
    pub fn region(&self) -> Region {
        Region {
            axes: self
                .0
                .iter()
                .map(|a| AxisKind { half: *a > 0.0, weight_exponent: *a })
                .collect(),
        }
    }
}

/// One axis of an integration region.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AxisKind {
    /// `(0, ∞)` instead of `ℝ`.
    pub half: bool,
    /// Extra factor `x^a` folded into the integrand (0 for plain Lebesgue).
    pub weight_exponent: f64,
}

/// Product region with optional per-axis monomial weights.
#[derive(Clone, Debug, PartialEq)]
pub struct Region {
    pub axes: Vec<AxisKind>,
}

impl Region {
    pub fn full(n: usize) -> Self {
        Self { axes: vec![AxisKind { half: false, weight_exponent: 0.0 }; n] }
    }

    pub fn dim(&self) -> usize {
        self.axes.len()
    }
}

/// `|𝕊^d| = 2π^{(d+1)/2} / Γ((d+1)/2)`.
pub fn sphere_area(d: i64) -> Result<f64> {
    if d < 0 {
        return Err(Error::Parameter(format!("sphere dimension must be >= 0, got {d}")));
    }
    let h = (d + 1) as f64 / 2.0;
    Ok(2.0 * PI.powf(h) / exact_oracle::gamma_half_integer((d + 1) as u32))
}

/// Probability measure `∝ x^A exp(-|x|²/(2λ²))` on `ℝ^n_{A,+}`.
#[derive(Clone, Debug, PartialEq)]
pub struct ScaledGaussianMeasure {
    exponents: WeightExponents,
    lambda: f64,
    normalization: f64,
}

impl ScaledGaussianMeasure {
    pub fn new(exponents: WeightExponents, lambda: f64) -> Result<Self> {
        if !(lambda > 0.0) || !lambda.is_finite() {
            return Err(Error::Parameter(format!("measure scale must be positive, got {lambda}")));
        }
        let rate = 1.0 / (2.0 * lambda * lambda);
        let normalization = exponents
            .as_slice()
            .iter()
            .map(|a| {
                if *a > 0.0 {
                    exact_oracle::half_moment_real(*a, rate)
                } else {
                    exact_oracle::full_moment_real(0.0, rate)
                }
            })
            .product();
        Ok(Self { exponents, lambda, normalization })
    }

    pub fn exponents(&self) -> &WeightExponents {
        &self.exponents
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn dim(&self) -> usize {
        self.exponents.dim()
    }

    /// `Z = ∫ x^A exp(-|x|²/(2λ²)) dx`.
    pub fn normalization(&self) -> f64 {
        self.normalization
    }

    /// Rate in the `exp(-r x²)` convention, `1 / (2λ²)`.
    pub fn rate(&self) -> f64 {
        1.0 / (2.0 * self.lambda * self.lambda)
    }

    /// Unnormalized density `x^A exp(-|x|²/(2λ²))`.
    pub fn density(&self, x: &[f64]) -> f64 {
        let r2: f64 = x.iter().map(|v| v * v).sum();
        self.exponents.monomial(x) * (-self.rate() * r2).exp()
    }
}

/// A smooth function given pointwise with its gradient.
pub trait Residual: Send + Sync {
    fn dim(&self) -> usize;

    /// Writes `∇f(x)` into `grad` and returns `f(x)`.
    fn eval(&self, x: &[f64], grad: &mut [f64]) -> f64;
}

impl Residual for PolyGauss {
    fn dim(&self) -> usize {
        PolyGauss::dim(self)
    }

    fn eval(&self, x: &[f64], grad: &mut [f64]) -> f64 {
        self.eval_with_grad(x, grad)
    }
}

impl Residual for Polynomial {
    fn dim(&self) -> usize {
        Polynomial::dim(self)
    }

    fn eval(&self, x: &[f64], grad: &mut [f64]) -> f64 {
        self.eval_with_grad(x, grad)
    }
}

/// Axis-aligned box `∏ [lo_i, hi_i]` bounding the support of a bump field.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SupportBox {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl SupportBox {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        if lo.len() != hi.len() || lo.is_empty() {
            return Err(Error::Parameter("support box bounds must have equal, nonzero length".into()));
        }
        if lo.iter().zip(&hi).any(|(a, b)| !(a < b)) {
            return Err(Error::Parameter("support box needs lo < hi on every axis".into()));
        }
        Ok(Self { lo, hi })
    }

    pub fn cube(n: usize, lo: f64, hi: f64) -> Result<Self> {
        Self::new(vec![lo; n], vec![hi; n])
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }
}

/// Standard mollifier `exp(-1/(1-t²))` on `(-1, 1)`, with its derivative.
pub fn mollifier(t: f64) -> (f64, f64) {
    let q = 1.0 - t * t;
    if q <= 0.0 {
        return (0.0, 0.0);
    }
    let inv = 1.0 / q;
    if inv > 700.0 {
        return (0.0, 0.0);
    }
    let e = (-inv).exp();
    (e, -2.0 * t * inv * inv * e)
}

/// Product of mollifiers mapped onto a support box.
#[derive(Clone, Debug)]
pub struct BumpResidual {
    support: SupportBox,
}

impl BumpResidual {
    pub fn new(support: SupportBox) -> Self {
        Self { support }
    }

    pub fn support(&self) -> &SupportBox {
        &self.support
    }
}

impl Residual for BumpResidual {
    fn dim(&self) -> usize {
        self.support.dim()
    }

    fn eval(&self, x: &[f64], grad: &mut [f64]) -> f64 {
        let n = self.dim();
        let mut vals = [0.0; MAX_DIM];
        let mut ders = [0.0; MAX_DIM];
        for i in 0..n {
            let (lo, hi) = (self.support.lo[i], self.support.hi[i]);
            let t = (2.0 * x[i] - (lo + hi)) / (hi - lo);
            let (m, dm) = mollifier(t);
            vals[i] = m;
            ders[i] = dm * 2.0 / (hi - lo);
        }
        let value: f64 = vals[..n].iter().product();
        for i in 0..n {
            let others: f64 = (0..n).filter(|j| *j != i).map(|j| vals[j]).product();
            grad[i] = ders[i] * others;
        }
        value
    }
}

struct ScaledResidual {
    inner: Arc<dyn Residual>,
    factor: f64,
}

impl Residual for ScaledResidual {
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn eval(&self, x: &[f64], grad: &mut [f64]) -> f64 {
        let v = self.inner.eval(x, grad);
        grad.iter_mut().for_each(|g| *g *= self.factor);
        v * self.factor
    }
}

/// A scalar field on an orthant in wall-factored form `u = x^p · v`.
#[derive(Clone)]
pub struct TestField {
    label: String,
    spec: OrthantSpec,
    wall_exponents: Vec<u32>,
    residual: Arc<dyn Residual>,
    decay_rate: f64,
    exact_form: Option<PolyGauss>,
    support: Option<SupportBox>,
}

impl fmt::Debug for TestField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TestField")
            .field("label", &self.label)
            .field("spec", &self.spec)
            .field("wall_exponents", &self.wall_exponents)
            .field("decay_rate", &self.decay_rate)
            .field("exact_form", &self.exact_form)
            .field("support", &self.support)
            .finish()
    }
}

fn check_wall_exponents(spec: &OrthantSpec, p: &[u32]) -> Result<()> {
    if p.len() != spec.n() {
        return Err(Error::Parameter(format!(
            "wall exponent vector has length {}, expected {}",
            p.len(),
            spec.n()
        )));
    }
    if let Some(i) = (0..spec.n()).find(|i| !spec.is_wall(*i) && p[*i] != 0) {
        return Err(Error::Parameter(format!("axis {} is not a wall but has a wall exponent", i + 1)));
    }
    Ok(())
}

impl TestField {
    /// Field with an exact polynomial-Gaussian form. `u` must be divisible by `x^p`.
    pub fn from_polygauss(spec: OrthantSpec, wall_exponents: Vec<u32>, u: PolyGauss) -> Result<Self> {
        check_wall_exponents(&spec, &wall_exponents)?;
        if u.dim() != spec.n() {
            return Err(Error::Parameter("descriptor dimension does not match the orthant".into()));
        }
        let v_poly = u.poly().div_monomial(&wall_exponents).ok_or_else(|| {
            Error::Parameter("descriptor is not divisible by the declared wall monomial".into())
        })?;
        let v = PolyGauss::new(u.rate(), v_poly)?;
        Ok(Self {
            label: "polygauss".into(),
            spec,
            wall_exponents,
            residual: Arc::new(v),
            decay_rate: u.rate(),
            exact_form: Some(u),
            support: None,
        })
    }

    /// Field given by an arbitrary residual with a caller-declared decay rate.
    pub fn from_residual(
        spec: OrthantSpec,
        wall_exponents: Vec<u32>,
        residual: Arc<dyn Residual>,
        decay_rate: f64,
    ) -> Result<Self> {
        check_wall_exponents(&spec, &wall_exponents)?;
        if residual.dim() != spec.n() {
            return Err(Error::Parameter("residual dimension does not match the orthant".into()));
        }
        if !(decay_rate > 0.0) {
            return Err(Error::Parameter(format!("decay rate must be positive, got {decay_rate}")));
        }
        Ok(Self {
            label: "custom".into(),
            spec,
            wall_exponents,
            residual,
            decay_rate,
            exact_form: None,
            support: None,
        })
    }

    /// `x^p · ∏ mollifier` supported in `support`, which must sit inside the open orthant.
    pub fn bump(spec: OrthantSpec, wall_exponents: Vec<u32>, support: SupportBox) -> Result<Self> {
        check_wall_exponents(&spec, &wall_exponents)?;
        if support.dim() != spec.n() {
            return Err(Error::Parameter("support box dimension does not match the orthant".into()));
        }
        if spec.wall_axes().any(|i| support.lo[i] <= 0.0) {
            return Err(Error::Parameter("bump support must stay away from the walls".into()));
        }
        let residual = Arc::new(BumpResidual::new(support.clone()));
        Ok(Self {
            label: "bump".into(),
            spec,
            wall_exponents,
            residual,
            decay_rate: 1.0,
            exact_form: None,
            support: Some(support),
        })
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn spec(&self) -> OrthantSpec {
        self.spec
    }

    pub fn dim(&self) -> usize {
        self.spec.n()
    }

    pub fn wall_exponents(&self) -> &[u32] {
        &self.wall_exponents
    }

    pub fn decay_rate(&self) -> f64 {
        self.decay_rate
    }

    pub fn exact_form(&self) -> Option<&PolyGauss> {
        self.exact_form.as_ref()
    }

    pub fn support(&self) -> Option<&SupportBox> {
        self.support.as_ref()
    }

    pub fn residual(&self) -> &Arc<dyn Residual> {
        &self.residual
    }

    /// `true` when every wall axis carries exponent at least one, so `u / w` is smooth.
    pub fn vanishes_on_walls(&self) -> bool {
        self.spec.wall_axes().all(|i| self.wall_exponents[i] >= 1)
    }

    /// `c · u`.
    pub fn scaled(&self, c: f64) -> Self {
        let mut out = self.clone();
        out.residual = Arc::new(ScaledResidual { inner: self.residual.clone(), factor: c });
        out.exact_form = self.exact_form.as_ref().map(|d| d.scale(c));
        if let Some(d) = &out.exact_form {
            if let Some(v) = d.poly().div_monomial(&self.wall_exponents) {
                out.residual = Arc::new(PolyGauss::new(d.rate(), v).expect("rate already validated"));
            }
        }
        out
    }

    /// `x ↦ u(x/λ)`; needs an exact form.
    pub fn dilated(&self, lambda: f64) -> Result<Self> {
        let d = self
            .exact_form
            .as_ref()
            .ok_or_else(|| Error::Capability("dilation needs an exact polynomial-Gaussian form".into()))?;
        Ok(Self::from_polygauss(self.spec, self.wall_exponents.clone(), d.dilate(lambda)?)?
            .with_label(format!("{}∘(x/{lambda})", self.label)))
    }

    /// `u + c · other` for two exact fields sharing orthant, wall factor and rate.
    pub fn add_scaled(&self, c: f64, other: &Self) -> Result<Self> {
        if self.spec != other.spec {
            return Err(Error::Parameter("fields live on different orthants".into()));
        }
        let (a, b) = match (&self.exact_form, &other.exact_form) {
            (Some(a), Some(b)) => (a, b),
            _ => return Err(Error::Capability("field sums need exact forms".into())),
        };
        let p: Vec<u32> = self
            .wall_exponents
            .iter()
            .zip(&other.wall_exponents)
            .map(|(x, y)| *x.min(y))
            .collect();
        Self::from_polygauss(self.spec, p, a.add(&b.scale(c))?)
    }

    /// Unchecked hot-path evaluation of `u` and `∇u`; `grad` has length `n`.
    #[inline]
    pub fn eval_into(&self, x: &[f64], grad: &mut [f64]) -> f64 {
        let n = self.dim();
        let v = self.residual.eval(x, grad);
        let mut m = 1.0;
        for i in self.spec.wall_axes() {
            let p = self.wall_exponents[i];
            if p > 0 {
                m *= x[i].powi(p as i32);
            }
        }
        for i in 0..n {
            let p = self.wall_exponents[i];
            let mut g = grad[i];
            if p > 0 {
                g += p as f64 / x[i] * v;
            }
            grad[i] = m * g;
        }
        m * v
    }

    /// `u / w` and its gradient, where `w` is the product of the wall coordinates.
    #[inline]
    pub fn quotient_by_wall_into(&self, x: &[f64], grad: &mut [f64]) -> f64 {
        let n = self.dim();
        let v = self.residual.eval(x, grad);
        let mut m = 1.0;
        for i in self.spec.wall_axes() {
            let q = self.wall_exponents[i] - 1;
            if q > 0 {
                m *= x[i].powi(q as i32);
            }
        }
        for i in 0..n {
            let q = if self.spec.is_wall(i) { self.wall_exponents[i] - 1 } else { 0 };
            let mut g = grad[i];
            if q > 0 {
                g += q as f64 / x[i] * v;
            }
            grad[i] = m * g;
        }
        m * v
    }

    /// Checked evaluation of `(u(x), ∇u(x))` at an interior point.
    pub fn eval(&self, x: &[f64]) -> Result<(f64, Vec<f64>)> {
        if x.len() != self.dim() {
            return Err(Error::Domain(format!("expected {} coordinates, got {}", self.dim(), x.len())));
        }
        if !self.spec.contains(x) {
            return Err(Error::Domain(format!("{x:?} is on or outside a wall")));
        }
        let mut g = vec![0.0; self.dim()];
        let v = self.eval_into(x, &mut g);
        Ok((v, g))
    }
}

/// `field_eval`: value and gradient of `u` at an interior point.
pub fn field_eval(field: &TestField, x: &[f64]) -> Result<(f64, Vec<f64>)> {
    field.eval(x)
}

/// `c · w(x) · exp(-β|x|²)`, the equality family of the orthant HUP.
pub fn make_extremal(spec: OrthantSpec, c: f64, beta: f64) -> Result<TestField> {
    if !(beta > 0.0) || !beta.is_finite() {
        return Err(Error::Parameter(format!("beta must be positive, got {beta}")));
    }
    let w = spec.wall_monomial();
    let u = PolyGauss::new(2.0 * beta, Polynomial::monomial(w.clone(), c))?;
    Ok(TestField::from_polygauss(spec, w, u)?.with_label(format!("extremal(c={c},beta={beta})")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn extremal_half_line_value() {
        let f = make_extremal(OrthantSpec::new(1, 1).unwrap(), 1.0, 0.5).unwrap();
        let (v, g) = f.eval(&[1.0]).unwrap();
        assert_relative_eq!(v, (-0.5f64).exp(), max_relative = 1e-15);
        assert!(g[0].abs() < 1e-15);
    }

    #[test]
    fn extremal_zero_amplitude_is_zero_field() {
        let f = make_extremal(OrthantSpec::new(2, 1).unwrap(), 0.0, 1.0).unwrap();
        let (v, g) = f.eval(&[0.3, 0.7]).unwrap();
        assert_eq!(v, 0.0);
        assert!(g.iter().all(|x| *x == 0.0));
        assert!(f.exact_form().unwrap().is_zero());
    }

    #[test]
    fn extremal_two_walls() {
        let f = make_extremal(OrthantSpec::new(2, 2).unwrap(), 2.0, 1.0).unwrap();
        let d = f.exact_form().unwrap();
        assert_eq!(d.rate(), 2.0);
        assert_eq!(d.poly().coefficient(&[1, 1]), 2.0);
        assert_eq!(d.poly().num_terms(), 1);
        assert_relative_eq!(f.eval(&[1.0, 1.0]).unwrap().0, 2.0 * (-2.0f64).exp(), max_relative = 1e-15);
    }

    #[test]
    fn non_positive_beta_rejected() {
        let spec = OrthantSpec::new(1, 1).unwrap();
        assert!(matches!(make_extremal(spec, 1.0, 0.0), Err(Error::Parameter(_))));
        assert!(matches!(make_extremal(spec, 1.0, -1.0), Err(Error::Parameter(_))));
    }

    #[test]
    fn wall_points_are_refused() {
        let f = make_extremal(OrthantSpec::new(2, 1).unwrap(), 1.0, 0.5).unwrap();
        assert!(matches!(f.eval(&[0.5, 0.0]), Err(Error::Domain(_))));
        assert!(matches!(f.eval(&[0.5, -1.0]), Err(Error::Domain(_))));
        assert!(f.eval(&[-0.5, 1.0]).is_ok());
    }

    #[test]
    fn product_of_coordinates_gradient() {
        // u = x1 x2 e^{-|x|²/2} on ℝ×ℝ_{>0}
        let spec = OrthantSpec::new(2, 1).unwrap();
        let u = PolyGauss::new(1.0, Polynomial::monomial(vec![1, 1], 1.0)).unwrap();
        let f = TestField::from_polygauss(spec, vec![0, 1], u).unwrap();
        let (v, g) = f.eval(&[1.0, 1.0]).unwrap();
        assert_relative_eq!(v, (-1.0f64).exp(), max_relative = 1e-15);
        assert!(g[0].abs() < 1e-15 && g[1].abs() < 1e-15);
    }

    #[test]
    fn sphere_areas() {
        assert_relative_eq!(sphere_area(0).unwrap(), 2.0, max_relative = 1e-15);
        assert_relative_eq!(sphere_area(1).unwrap(), 2.0 * PI, max_relative = 1e-15);
        assert_relative_eq!(sphere_area(2).unwrap(), 4.0 * PI, max_relative = 1e-15);
        assert_relative_eq!(sphere_area(3).unwrap(), 2.0 * PI * PI, max_relative = 1e-15);
        assert!(sphere_area(-1).is_err());
    }

    #[test]
    fn extremal_vanishes_at_walls() {
        let f = make_extremal(OrthantSpec::new(2, 1).unwrap(), 1.0, 0.5).unwrap();
        let sup = f.eval(&[0.0, 1.0]).unwrap().0.abs();
        let near = f.eval(&[0.0, 1e-8]).unwrap().0.abs();
        assert!(near < 1e-7 * sup);
    }

    #[test]
    fn measure_normalization_closed_form() {
        // A=(2), λ=1: ∫_0^∞ x² e^{-x²/2} = √(π/2)
        let m = ScaledGaussianMeasure::new(WeightExponents::new(vec![2.0]).unwrap(), 1.0).unwrap();
        assert_relative_eq!(m.normalization(), (PI / 2.0).sqrt(), max_relative = 1e-14);
        let m0 = ScaledGaussianMeasure::new(WeightExponents::new(vec![0.0, 0.0]).unwrap(), 2.0).unwrap();
        assert_relative_eq!(m0.normalization(), 8.0 * PI, max_relative = 1e-14);
    }

    #[test]
    fn weight_exponent_validation() {
        assert!(WeightExponents::new(vec![-1.0]).is_err());
        assert!(WeightExponents::new(vec![0.5]).unwrap().integer().is_err());
        assert_eq!(WeightExponents::new(vec![0.0, 2.0]).unwrap().integer().unwrap(), vec![0, 2]);
    }

    #[test]
    fn bump_support_must_avoid_walls() {
        let spec = OrthantSpec::new(1, 1).unwrap();
        assert!(TestField::bump(spec, vec![1], SupportBox::cube(1, 0.0, 1.0).unwrap()).is_err());
        let f = TestField::bump(spec, vec![1], SupportBox::cube(1, 1.0, 2.0).unwrap()).unwrap();
        assert_eq!(f.eval(&[0.5]).unwrap().0, 0.0);
        assert!(f.eval(&[1.5]).unwrap().0 > 0.0);
    }
}
