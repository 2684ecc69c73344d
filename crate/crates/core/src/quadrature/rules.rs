//! One-dimensional Gauss rules from three-term recurrences.
//!
//! Nodes are eigenvalues of the symmetric Jacobi matrix, polished by Newton
//! steps on the recurrence. Weights are Christoffel numbers
//! `1 / Σ_j p̂_j(t)²` evaluated in scaled arithmetic, which keeps the tiny tail
//! weights accurate where eigenvector components underflow or lose digits.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};

use nalgebra::DMatrix;
use statrs::function::gamma::gamma;

use crate::error::{Error, Result};

pub const MAX_ORDER: usize = 200;
/// Internal ceiling used by order-doubling checks.
pub(crate) const MAX_INTERNAL_ORDER: usize = 2 * MAX_ORDER;

/// Support and weight function of an [`AxisRule`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum RuleDomain {
    /// `ℝ` with weight `e^{-t²}`.
    FullLine,
    /// `(0, ∞)` with weight `t^a e^{-t²}`.
    HalfLine { a: f64 },
    /// `[lo, hi]` with unit weight.
    Interval { lo: f64, hi: f64 },
}

#[derive(Clone, Debug)]
pub struct AxisRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    /// `ln` of each weight, accurate even where the weight underflows.
    pub log_weights: Vec<f64>,
    pub domain: RuleDomain,
}

impl AxisRule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// `Σ w_i f(t_i)`.
    pub fn apply(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(t, w)| w * f(*t)).sum()
    }

    /// Total mass of the weight function on the rule's domain.
    pub fn exact_mass(&self) -> f64 {
        match self.domain {
            RuleDomain::FullLine => PI.sqrt(),
            RuleDomain::HalfLine { a } => gamma((a + 1.0) / 2.0) / 2.0,
            RuleDomain::Interval { lo, hi } => hi - lo,
        }
    }
}

/// Recurrence `b_{j+1} p̂_{j+1} = (t - a_j) p̂_j - b_j p̂_{j-1}` with `p̂_0 = 1/√μ₀`.
struct Recurrence {
    a: Vec<f64>,
    /// `b[j]` couples degrees `j-1` and `j`; `b[0]` unused.
    b: Vec<f64>,
    mu0: f64,
}

impl Recurrence {
    fn order(&self) -> usize {
        self.a.len()
    }

    /// Returns `(q, q', ln Σ_{j<m} p̂_j²)` where `q = b_m p̂_m`.
    fn evaluate(&self, t: f64) -> (f64, f64, f64) {
        const BIG: f64 = 1e120;
        let m = self.order();
        let mut p_prev = 0.0;
        let mut dp_prev = 0.0;
        let mut p = 1.0 / self.mu0.sqrt();
        let mut dp = 0.0;
        let mut log_scale = 0.0;
        let mut sum = 0.0;
        for j in 0..m {
            sum += p * p;
            let next = (t - self.a[j]) * p - self.b[j] * p_prev;
            let dnext = p + (t - self.a[j]) * dp - self.b[j] * dp_prev;
            let (np, ndp) = if j + 1 < m {
                (next / self.b[j + 1], dnext / self.b[j + 1])
            } else {
                (next, dnext)
            };
            p_prev = p;
            dp_prev = dp;
            p = np;
            dp = ndp;
            if p.abs() > BIG || p_prev.abs() > BIG {
                p /= BIG;
                dp /= BIG;
                p_prev /= BIG;
                dp_prev /= BIG;
                sum /= BIG * BIG;
                log_scale += BIG.ln();
            }
        }
        (p, dp, sum.ln() + 2.0 * log_scale)
    }

    fn gauss(&self, domain: RuleDomain) -> Result<AxisRule> {
        let m = self.order();
        let mut jac = DMatrix::<f64>::zeros(m, m);
        for j in 0..m {
            jac[(j, j)] = self.a[j];
            if j + 1 < m {
                jac[(j, j + 1)] = self.b[j + 1];
                jac[(j + 1, j)] = self.b[j + 1];
            }
        }
        let mut nodes: Vec<f64> = jac.symmetric_eigenvalues().iter().copied().collect();
        nodes.sort_by(|x, y| x.partial_cmp(y).expect("finite eigenvalues"));
        for t in nodes.iter_mut() {
            for _ in 0..3 {
                let (q, dq, _) = self.evaluate(*t);
                if dq == 0.0 || !dq.is_finite() {
                    break;
                }
                let step = q / dq;
                if !(step.abs() < 1e-6 * (1.0 + t.abs())) {
                    break;
                }
                *t -= step;
                if step.abs() <= 1e-16 * (1.0 + t.abs()) {
                    break;
                }
            }
        }
        if nodes.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::Parameter("quadrature nodes failed to separate".into()));
        }
        let log_weights: Vec<f64> = nodes.iter().map(|t| -self.evaluate(*t).2).collect();
        let weights = log_weights.iter().map(|l| l.exp()).collect();
        Ok(AxisRule { nodes, weights, log_weights, domain })
    }
}

fn check_order(m: usize, limit: usize) -> Result<()> {
    if m == 0 || m > limit {
        return Err(Error::Parameter(format!("rule order must be in 1..={limit}, got {m}")));
    }
    Ok(())
}

#[derive(Clone, Copy, PartialEq, Eq, Hash)]
enum RuleKey {
    Hermite(usize),
    HalfMonomial(usize, u64),
    HalfRange(usize, u64),
    Legendre(usize),
}

fn cache() -> &'static Mutex<HashMap<RuleKey, Arc<AxisRule>>> {
    static CACHE: OnceLock<Mutex<HashMap<RuleKey, Arc<AxisRule>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

fn cached(key: RuleKey, build: impl FnOnce() -> Result<AxisRule>) -> Result<Arc<AxisRule>> {
    if let Some(r) = cache().lock().expect("rule cache poisoned").get(&key) {
        return Ok(r.clone());
    }
    let rule = Arc::new(build()?);
    cache().lock().expect("rule cache poisoned").insert(key, rule.clone());
    Ok(rule)
}

fn hermite_recurrence(m: usize) -> Recurrence {
    Recurrence {
        a: vec![0.0; m],
        b: (0..m).map(|j| (j as f64 / 2.0).sqrt()).collect(),
        mu0: PI.sqrt(),
    }
}

fn legendre_recurrence(m: usize) -> Recurrence {
    Recurrence {
        a: vec![0.0; m],
        b: (0..m)
            .map(|j| {
                let j = j as f64;
                if j == 0.0 {
                    0.0
                } else {
                    j / (4.0 * j * j - 1.0).sqrt()
                }
            })
            .collect(),
        mu0: 2.0,
    }
}

fn laguerre_recurrence(m: usize, alpha: f64) -> Recurrence {
    Recurrence {
        a: (0..m).map(|j| 2.0 * j as f64 + alpha + 1.0).collect(),
        b: (0..m).map(|j| (j as f64 * (j as f64 + alpha)).sqrt()).collect(),
        mu0: gamma(alpha + 1.0),
    }
}

/// Jacobi weight `(1-t)^α (1+t)^β` on `[-1, 1]`.
fn jacobi_recurrence(m: usize, alpha: f64, beta: f64) -> Recurrence {
    let ab = alpha + beta;
    let a = (0..m)
        .map(|j| {
            let j = j as f64;
            if j == 0.0 {
                (beta - alpha) / (ab + 2.0)
            } else {
                (beta * beta - alpha * alpha) / ((2.0 * j + ab) * (2.0 * j + ab + 2.0))
            }
        })
        .collect();
    let b = (0..m)
        .map(|j| {
            let j = j as f64;
            if j == 0.0 {
                return 0.0;
            }
            let s = 2.0 * j + ab;
            let num = 4.0 * j * (j + alpha) * (j + beta) * (j + ab);
            let den = s * s * (s + 1.0) * (s - 1.0);
            if den == 0.0 {
                // j = 1 with α + β = 0
                (4.0 * (1.0 + alpha) * (1.0 + beta) / ((2.0 + ab).powi(2) * (3.0 + ab))).sqrt()
            } else {
                (num / den).sqrt()
            }
        })
        .collect();
    let mu0 = 2f64.powf(ab + 1.0) * gamma(alpha + 1.0) * gamma(beta + 1.0) / gamma(ab + 2.0);
    Recurrence { a, b, mu0 }
}

/// `m`-point Gauss–Hermite rule for `∫_ℝ f(t) e^{-t²} dt`.
pub fn hermite_rule(m: usize) -> Result<Arc<AxisRule>> {
    hermite_rule_internal(m, MAX_ORDER)
}

pub(crate) fn hermite_rule_internal(m: usize, limit: usize) -> Result<Arc<AxisRule>> {
    check_order(m, limit)?;
    cached(RuleKey::Hermite(m), || hermite_recurrence(m).gauss(RuleDomain::FullLine))
}

fn check_exponent(a: f64) -> Result<()> {
    if !(a >= 0.0) || !a.is_finite() {
        return Err(Error::Parameter(format!("half-line exponent must be finite and >= 0, got {a}")));
    }
    Ok(())
}

/// Rule for `∫_0^∞ f(x) x^a e^{-x²} dx` via `t = x²` and generalized
/// Gauss–Laguerre with parameter `(a-1)/2`.
///
/// Exact when `f` is a polynomial in `x²` of degree `≤ 2m-1`; odd powers of
/// `x` are integrated only approximately. See [`half_range_rule`] for a rule
/// exact in `x` itself.
pub fn half_monomial_rule(m: usize, a: f64) -> Result<Arc<AxisRule>> {
    check_order(m, MAX_INTERNAL_ORDER)?;
    check_exponent(a)?;
    cached(RuleKey::HalfMonomial(m, a.to_bits()), || {
        let lag = laguerre_recurrence(m, (a - 1.0) / 2.0).gauss(RuleDomain::HalfLine { a })?;
        let nodes = lag.nodes.iter().map(|t| t.sqrt()).collect();
        let log_weights: Vec<f64> = lag.log_weights.iter().map(|l| l - 2f64.ln()).collect();
        let weights = log_weights.iter().map(|l| l.exp()).collect();
        Ok(AxisRule { nodes, weights, log_weights, domain: RuleDomain::HalfLine { a } })
    })
}

/// Gauss rule for `∫_0^∞ f(x) x^a e^{-x²} dx`, exact for polynomials in `x`
/// of degree `≤ 2m-1`.
///
/// The recurrence coefficients of this half-range weight have no closed form,
/// so they are generated by a stable Lanczos procedure applied to a fine
/// discretization of the weight: Gauss–Jacobi on the first panel (absorbing
/// `x^a`) followed by composite Gauss–Legendre panels out to where the weight
/// is below double precision relative to the polynomial growth.
pub fn half_range_rule(m: usize, a: f64) -> Result<Arc<AxisRule>> {
    check_order(m, MAX_INTERNAL_ORDER)?;
    check_exponent(a)?;
    cached(RuleKey::HalfRange(m, a.to_bits()), || half_range_recurrence(m, a)?.gauss(RuleDomain::HalfLine { a }))
}

fn half_range_recurrence(m: usize, a: f64) -> Result<Recurrence> {
    let (xs, ws) = half_range_discretization(m, a)?;
    let (alpha, beta) = lanczos(&xs, &ws, m);
    let mu0 = beta[0];
    let b = (0..m).map(|j| if j == 0 { 0.0 } else { beta[j].sqrt() }).collect();
    Ok(Recurrence { a: alpha, b, mu0 })
}

fn half_range_discretization(m: usize, a: f64) -> Result<(Vec<f64>, Vec<f64>)> {
    let reach = (2.0 * m as f64 + a + 2.0).sqrt();
    let upper = reach + 9.0;
    let width = (1.0 / reach).min(0.25);
    let first = width;
    let panel_points = 20;
    let jac = jacobi_recurrence(30, 0.0, a).gauss(RuleDomain::Interval { lo: -1.0, hi: 1.0 })?;
    let leg = legendre_rule(panel_points)?;
    let mut xs = Vec::new();
    let mut ws = Vec::new();
    let half = first / 2.0;
    for (t, w) in jac.nodes.iter().zip(&jac.weights) {
        let x = half * (1.0 + t);
        xs.push(x);
        ws.push(w * half.powf(a + 1.0) * (-x * x).exp());
    }
    let panels = ((upper - first) / width).ceil() as usize;
    for p in 0..panels {
        let lo = first + p as f64 * width;
        let hi = lo + width;
        let c = (lo + hi) / 2.0;
        let h = (hi - lo) / 2.0;
        for (t, w) in leg.nodes.iter().zip(&leg.weights) {
            let x = c + h * t;
            let val = w * h * x.powf(a) * (-x * x).exp();
            if val > 0.0 {
                xs.push(x);
                ws.push(val);
            }
        }
    }
    Ok((xs, ws))
}

/// Recurrence coefficients of a discrete measure by the
/// Rutishauser–Kahan–Pal–Walker variant of the Lanczos algorithm.
///
/// Returns `(α_0..α_{m-1}, β_0..β_{m-1})` where `β_0` is the total mass and
/// `β_j = b_j²` for `j ≥ 1`.
fn lanczos(x: &[f64], w: &[f64], m: usize) -> (Vec<f64>, Vec<f64>) {
    let ncap = x.len();
    assert!(m <= ncap);
    let mut p0 = x.to_vec();
    let mut p1 = vec![0.0; ncap];
    p1[0] = w[0];
    for n in 0..ncap - 1 {
        let mut pn = w[n + 1];
        let mut gam = 1.0;
        let mut sig = 0.0;
        let mut t = 0.0;
        let xlam = x[n + 1];
        for k in 0..=n + 1 {
            let rho = p1[k] + pn;
            let tmp = gam * rho;
            let tsig = sig;
            if rho <= 0.0 {
                gam = 1.0;
                sig = 0.0;
            } else {
                gam = p1[k] / rho;
                sig = pn / rho;
            }
            let tk = sig * (p0[k] - xlam) - gam * t;
            p0[k] -= tk - t;
            t = tk;
            pn = if sig <= 0.0 { tsig * p1[k] } else { t * t / sig };
            p1[k] = tmp;
        }
    }
    p0.truncate(m);
    p1.truncate(m);
    (p0, p1)
}

fn legendre_rule(m: usize) -> Result<Arc<AxisRule>> {
    check_order(m, MAX_INTERNAL_ORDER)?;
    cached(RuleKey::Legendre(m), || {
        legendre_recurrence(m).gauss(RuleDomain::Interval { lo: -1.0, hi: 1.0 })
    })
}

/// `m`-point Gauss–Legendre rule on `[lo, hi]`.
pub fn legendre_panel_rule(m: usize, lo: f64, hi: f64) -> Result<AxisRule> {
    if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
        return Err(Error::Parameter(format!("empty or unbounded interval [{lo}, {hi}]")));
    }
    let base = legendre_rule(m)?;
    let c = (lo + hi) / 2.0;
    let h = (hi - lo) / 2.0;
    let nodes = base.nodes.iter().map(|t| c + h * t).collect();
    let weights: Vec<f64> = base.weights.iter().map(|w| w * h).collect();
    let log_weights = weights.iter().map(|w| w.ln()).collect();
    Ok(AxisRule { nodes, weights, log_weights, domain: RuleDomain::Interval { lo, hi } })
}

/// Composite Gauss–Legendre rule with `panels` equal panels of `m` points.
pub fn composite_legendre_rule(m: usize, panels: usize, lo: f64, hi: f64) -> Result<AxisRule> {
    if panels == 0 {
        return Err(Error::Parameter("need at least one panel".into()));
    }
    let width = (hi - lo) / panels as f64;
    let mut nodes = Vec::with_capacity(m * panels);
    let mut weights = Vec::with_capacity(m * panels);
    for p in 0..panels {
        let plo = lo + p as f64 * width;
        let phi = if p + 1 == panels { hi } else { plo + width };
        let r = legendre_panel_rule(m, plo, phi)?;
        nodes.extend(r.nodes);
        weights.extend(r.weights);
    }
    let log_weights = weights.iter().map(|w: &f64| w.ln()).collect();
    Ok(AxisRule { nodes, weights, log_weights, domain: RuleDomain::Interval { lo, hi } })
}
