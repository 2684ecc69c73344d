//! Sparse multivariate polynomials and polynomial × Gaussian descriptors.
//!
//! A [`PolyGauss`] stores `P(x) · exp(-s|x|²/2)`. The class is closed under
//! addition (equal rates), products (rates add), multiplication by
//! coordinates and partial differentiation, which is all the oracle needs to
//! integrate masses, moments, Dirichlet energies and inner products exactly.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};

/// Exponent vector of a monomial `x^γ`.
pub type MultiIndex = Vec<u32>;

/// Sparse polynomial in a fixed number of variables.
#[derive(Clone, PartialEq, Default)]
pub struct Polynomial {
    dim: usize,
    terms: BTreeMap<MultiIndex, f64>,
}

impl fmt::Debug for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (g, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "{c}")?;
            for (i, e) in g.iter().enumerate() {
                match e {
                    0 => {}
                    1 => write!(f, "·x{}", i + 1)?,
                    _ => write!(f, "·x{}^{}", i + 1, e)?,
                }
            }
        }
        Ok(())
    }
}

impl Polynomial {
    pub fn zero(dim: usize) -> Self {
        Self { dim, terms: BTreeMap::new() }
    }

    pub fn constant(dim: usize, c: f64) -> Self {
        let mut p = Self::zero(dim);
        p.add_term(vec![0; dim], c);
        p
    }

    /// `c · x^γ`.
    pub fn monomial(gamma: MultiIndex, c: f64) -> Self {
        let mut p = Self::zero(gamma.len());
        p.add_term(gamma, c);
        p
    }

    /// The coordinate function `x_i` (zero-based).
    pub fn coordinate(dim: usize, i: usize) -> Self {
        let mut g = vec![0; dim];
        g[i] = 1;
        Self::monomial(g, 1.0)
    }

    /// Builds a polynomial from `(γ, c)` pairs; repeated indices accumulate.
    pub fn from_terms<I>(dim: usize, terms: I) -> Self
    where
        I: IntoIterator<Item = (MultiIndex, f64)>,
    {
        let mut p = Self::zero(dim);
        for (g, c) in terms {
            assert_eq!(g.len(), dim, "multi-index length mismatch");
            p.add_term(g, c);
        }
        p
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, f64)> {
        self.terms.iter().map(|(g, c)| (g, *c))
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coefficient(&self, gamma: &[u32]) -> f64 {
        self.terms.get(gamma).copied().unwrap_or(0.0)
    }

    fn add_term(&mut self, gamma: MultiIndex, c: f64) {
        if c == 0.0 {
            return;
        }
        let entry = self.terms.entry(gamma).or_insert(0.0);
        *entry += c;
        if *entry == 0.0 {
            // keep the map free of explicit zeros so is_zero stays meaningful
            self.terms.retain(|_, v| *v != 0.0);
        }
    }

    /// Largest total degree among the terms (0 for the zero polynomial).
    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(|g| g.iter().sum()).max().unwrap_or(0)
    }

    /// Largest exponent of `x_i` among the terms.
    pub fn degree_in(&self, i: usize) -> u32 {
        self.terms.keys().map(|g| g[i]).max().unwrap_or(0)
    }

    pub fn scale(&self, a: f64) -> Self {
        if a == 0.0 {
            return Self::zero(self.dim);
        }
        Self {
            dim: self.dim,
            terms: self.terms.iter().map(|(g, c)| (g.clone(), a * c)).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim);
        let mut out = self.clone();
        for (g, c) in &other.terms {
            out.add_term(g.clone(), *c);
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(-1.0))
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim);
        let mut out = Self::zero(self.dim);
        for (g1, c1) in &self.terms {
            for (g2, c2) in &other.terms {
                let g: MultiIndex = g1.iter().zip(g2).map(|(a, b)| a + b).collect();
                out.add_term(g, c1 * c2);
            }
        }
        out
    }

    /// Multiplies by `x^γ`.
    pub fn mul_monomial(&self, gamma: &[u32]) -> Self {
        Self {
            dim: self.dim,
            terms: self
                .terms
                .iter()
                .map(|(g, c)| (g.iter().zip(gamma).map(|(a, b)| a + b).collect(), *c))
                .collect(),
        }
    }

    pub fn mul_coordinate(&self, i: usize) -> Self {
        let mut g = vec![0; self.dim];
        g[i] = 1;
        self.mul_monomial(&g)
    }

    /// Exact division by `x^γ`; `None` if some term is not divisible.
    pub fn div_monomial(&self, gamma: &[u32]) -> Option<Self> {
        let mut terms = BTreeMap::new();
        for (g, c) in &self.terms {
            if g.iter().zip(gamma).any(|(a, b)| a < b) {
                return None;
            }
            terms.insert(g.iter().zip(gamma).map(|(a, b)| a - b).collect(), *c);
        }
        Some(Self { dim: self.dim, terms })
    }

    pub fn partial(&self, i: usize) -> Self {
        let mut out = Self::zero(self.dim);
        for (g, c) in &self.terms {
            if g[i] == 0 {
                continue;
            }
            let mut h = g.clone();
            h[i] -= 1;
            out.add_term(h, c * g[i] as f64);
        }
        out
    }

    /// `Σ x_i²` raised to an integer power.
    pub fn radius_squared_pow(dim: usize, power: u32) -> Self {
        let r2 = Self::from_terms(
            dim,
            (0..dim).map(|i| {
                let mut g = vec![0; dim];
                g[i] = 2;
                (g, 1.0)
            }),
        );
        let mut out = Self::constant(dim, 1.0);
        for _ in 0..power {
            out = out.mul(&r2);
        }
        out
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        let table = PowerTable::new(x);
        self.terms.iter().map(|(g, c)| c * table.monomial(g)).sum()
    }

    /// Value and gradient in one pass; `grad` must have length `dim`.
    pub fn eval_with_grad(&self, x: &[f64], grad: &mut [f64]) -> f64 {
        grad.iter_mut().for_each(|g| *g = 0.0);
        let table = PowerTable::new(x);
        let mut value = 0.0;
        for (g, c) in &self.terms {
            value += c * table.monomial(g);
            for i in 0..self.dim {
                let e = g[i];
                if e == 0 {
                    continue;
                }
                let mut d = c * e as f64;
                for (j, ej) in g.iter().enumerate() {
                    d *= table.pow(j, if j == i { ej - 1 } else { *ej });
                }
                grad[i] += d;
            }
        }
        value
    }
}

/// Small powers of each coordinate, so monomials cost one lookup per axis.
struct PowerTable<'a> {
    x: &'a [f64],
    pows: [[f64; POWER_TABLE_SIZE]; TABLE_DIM],
}

const POWER_TABLE_SIZE: usize = 16;
const TABLE_DIM: usize = 8;

impl<'a> PowerTable<'a> {
    fn new(x: &'a [f64]) -> Self {
        let mut pows = [[1.0; POWER_TABLE_SIZE]; TABLE_DIM];
        for (row, xi) in pows.iter_mut().zip(x) {
            for e in 1..POWER_TABLE_SIZE {
                row[e] = row[e - 1] * xi;
            }
        }
        Self { x, pows }
    }

    #[inline]
    fn pow(&self, j: usize, e: u32) -> f64 {
        if j < TABLE_DIM && (e as usize) < POWER_TABLE_SIZE {
            self.pows[j][e as usize]
        } else {
            self.x[j].powi(e as i32)
        }
    }

    #[inline]
    fn monomial(&self, g: &[u32]) -> f64 {
        g.iter().enumerate().map(|(j, e)| self.pow(j, *e)).product()
    }
}

/// `P(x) · exp(-s|x|²/2)` with `s > 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct PolyGauss {
    rate: f64,
    poly: Polynomial,
}

impl PolyGauss {
    pub fn new(rate: f64, poly: Polynomial) -> Result<Self> {
        if !(rate > 0.0) || !rate.is_finite() {
            return Err(Error::Parameter(format!("Gaussian rate must be positive, got {rate}")));
        }
        Ok(Self { rate, poly })
    }

    pub fn zero(dim: usize, rate: f64) -> Result<Self> {
        Self::new(rate, Polynomial::zero(dim))
    }

    pub fn rate(&self) -> f64 {
        self.rate
    }

    pub fn poly(&self) -> &Polynomial {
        &self.poly
    }

    pub fn dim(&self) -> usize {
        self.poly.dim()
    }

    pub fn is_zero(&self) -> bool {
        self.poly.is_zero()
    }

    pub fn scale(&self, a: f64) -> Self {
        Self { rate: self.rate, poly: self.poly.scale(a) }
    }

    /// Sum of two descriptors with the same rate.
    pub fn add(&self, other: &Self) -> Result<Self> {
        if !same_rate(self.rate, other.rate) {
            return Err(Error::Parameter(format!(
                "cannot add descriptors with rates {} and {}",
                self.rate, other.rate
            )));
        }
        Ok(Self { rate: self.rate, poly: self.poly.add(&other.poly) })
    }

    pub fn mul(&self, other: &Self) -> Self {
        Self { rate: self.rate + other.rate, poly: self.poly.mul(&other.poly) }
    }

    pub fn mul_poly(&self, p: &Polynomial) -> Self {
        Self { rate: self.rate, poly: self.poly.mul(p) }
    }

    pub fn mul_coordinate(&self, i: usize) -> Self {
        Self { rate: self.rate, poly: self.poly.mul_coordinate(i) }
    }

    pub fn mul_monomial(&self, gamma: &[u32]) -> Self {
        Self { rate: self.rate, poly: self.poly.mul_monomial(gamma) }
    }

    /// `∂_i (P e^{-s|x|²/2}) = (∂_i P - s x_i P) e^{-s|x|²/2}`.
    pub fn partial(&self, i: usize) -> Self {
        let dp = self.poly.partial(i);
        let xp = self.poly.mul_coordinate(i).scale(self.rate);
        Self { rate: self.rate, poly: dp.sub(&xp) }
    }

    pub fn gradient(&self) -> Vec<Self> {
        (0..self.dim()).map(|i| self.partial(i)).collect()
    }

    /// The dilate `x ↦ u(x/λ)`.
    pub fn dilate(&self, lambda: f64) -> Result<Self> {
        if !(lambda > 0.0) {
            return Err(Error::Parameter(format!("dilation must be positive, got {lambda}")));
        }
        let poly = Polynomial::from_terms(
            self.dim(),
            self.poly
                .terms()
                .map(|(g, c)| (g.clone(), c * lambda.powi(-(g.iter().sum::<u32>() as i32)))),
        );
        Self::new(self.rate / (lambda * lambda), poly)
    }

    pub fn gaussian(&self, x: &[f64]) -> f64 {
        let r2: f64 = x.iter().map(|v| v * v).sum();
        (-0.5 * self.rate * r2).exp()
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.poly.eval(x) * self.gaussian(x)
    }

    /// Value and gradient; `grad` must have length `dim`.
    pub fn eval_with_grad(&self, x: &[f64], grad: &mut [f64]) -> f64 {
        let e = self.gaussian(x);
        let p = self.poly.eval_with_grad(x, grad);
        for (g, xi) in grad.iter_mut().zip(x) {
            *g = (*g - self.rate * xi * p) * e;
        }
        p * e
    }
}

pub(crate) fn same_rate(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-14 * a.abs().max(b.abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn product_rule_on_descriptor() {
        // x e^{-x²/2}: derivative (1 - x²) e^{-x²/2}
        let d = PolyGauss::new(1.0, Polynomial::coordinate(1, 0)).unwrap();
        let dp = d.partial(0);
        assert_relative_eq!(dp.eval(&[1.0]), 0.0, epsilon = 1e-15);
        assert_relative_eq!(dp.eval(&[2.0]), -3.0 * (-2.0f64).exp(), max_relative = 1e-14);
    }

    #[test]
    fn division_by_wall_monomial() {
        let p = Polynomial::from_terms(2, [(vec![1, 1], 2.0), (vec![0, 2], 1.0)]);
        let q = p.div_monomial(&[0, 1]).unwrap();
        assert_eq!(q.coefficient(&[1, 0]), 2.0);
        assert_eq!(q.coefficient(&[0, 1]), 1.0);
        assert!(p.div_monomial(&[1, 0]).is_none());
    }

    #[test]
    fn cancellation_leaves_no_zero_terms() {
        let p = Polynomial::coordinate(2, 0);
        assert!(p.sub(&p).is_zero());
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let p = Polynomial::from_terms(
            3,
            [(vec![2, 1, 0], 0.7), (vec![0, 1, 3], -1.3), (vec![1, 0, 1], 0.25)],
        );
        let d = PolyGauss::new(1.5, p).unwrap();
        let x = [0.3, -0.8, 1.1];
        let mut g = [0.0; 3];
        d.eval_with_grad(&x, &mut g);
        for i in 0..3 {
            let h = 1e-6;
            let mut xp = x;
            let mut xm = x;
            xp[i] += h;
            xm[i] -= h;
            let fd = (d.eval(&xp) - d.eval(&xm)) / (2.0 * h);
            assert_relative_eq!(g[i], fd, max_relative = 1e-7);
        }
    }

    #[test]
    fn add_requires_equal_rates() {
        let a = PolyGauss::new(1.0, Polynomial::constant(1, 1.0)).unwrap();
        let b = PolyGauss::new(2.0, Polynomial::constant(1, 1.0)).unwrap();
        assert!(a.add(&b).is_err());
    }

    #[test]
    fn dilation_rescales_rate() {
        let d = PolyGauss::new(1.0, Polynomial::coordinate(1, 0)).unwrap();
        let dl = d.dilate(2.0).unwrap();
        assert_relative_eq!(dl.eval(&[3.0]), d.eval(&[1.5]), max_relative = 1e-15);
    }
}
