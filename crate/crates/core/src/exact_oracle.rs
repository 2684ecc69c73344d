//! Closed-form Gamma-moment integrals of polynomial-Gaussian descriptors.
//!
//! Every integral reduces to products of one-dimensional moments
//! `∫ x^m e^{-s x²} dx` over the half or full line, so the functionals of a
//! [`PolyGauss`] field are exact up to floating-point rounding.

use std::f64::consts::PI;

use statrs::function::gamma::ln_gamma;

use crate::domain::Region;
use crate::error::{Error, Result};
use crate::poly::{PolyGauss, Polynomial};

/// `Γ(m/2)` for a positive integer `m`.
///
/// Uses the exact recurrence from `Γ(1/2) = √π` and `Γ(1) = 1` while the
/// value stays finite, and log-Gamma beyond that.
pub fn gamma_half_integer(m: u32) -> f64 {
    assert!(m > 0, "Γ(0) is undefined");
    if m > 340 {
        return ln_gamma(m as f64 / 2.0).exp();
    }
    let (mut value, mut x) = if m.is_multiple_of(2) { (1.0, 1.0) } else { (PI.sqrt(), 0.5) };
    let target = m as f64 / 2.0;
    while x < target {
        value *= x;
        x += 1.0;
    }
    value
}

fn check_rate(s: f64) -> Result<()> {
    if !(s > 0.0) || !s.is_finite() {
        return Err(Error::Parameter(format!("Gaussian rate must be positive, got {s}")));
    }
    Ok(())
}

/// `∫_0^∞ x^m e^{-s x²} dx = Γ((m+1)/2) / (2 s^{(m+1)/2})`.
pub fn half_moment(m: u32, s: f64) -> Result<f64> {
    check_rate(s)?;
    let h = (m as f64 + 1.0) / 2.0;
    let g = gamma_half_integer(m + 1);
    let direct = g / (2.0 * s.powf(h));
    if direct.is_finite() && direct > 0.0 {
        Ok(direct)
    } else {
        Ok((ln_gamma(h) - h * s.ln()).exp() / 2.0)
    }
}

/// `∫_ℝ x^m e^{-s x²} dx`: zero for odd `m`, twice the half moment otherwise.
pub fn full_moment(m: u32, s: f64) -> Result<f64> {
    check_rate(s)?;
    if m % 2 == 1 {
        Ok(0.0)
    } else {
        Ok(2.0 * half_moment(m, s)?)
    }
}

/// `∫_0^∞ x^p e^{-s x²} dx` for a real exponent `p > -1`.
///
/// Panics on `s <= 0` or `p <= -1`; callers validate beforehand.
pub fn half_moment_real(p: f64, s: f64) -> f64 {
    assert!(s > 0.0 && p > -1.0);
    if p.fract() == 0.0 && p >= 0.0 {
        return half_moment(p as u32, s).expect("rate checked");
    }
    let h = (p + 1.0) / 2.0;
    (ln_gamma(h) - h * s.ln()).exp() / 2.0
}

/// `∫_ℝ |x|^p e^{-s x²} dx` for an even integer or real `p > -1`.
pub fn full_moment_real(p: f64, s: f64) -> f64 {
    2.0 * half_moment_real(p, s)
}

/// One-dimensional moment `∫ x^{m + a} e^{-s x²}` on one region axis.
fn axis_moment(half: bool, a: f64, m: u32, s: f64) -> f64 {
    if half {
        half_moment_real(m as f64 + a, s)
    } else if m % 2 == 1 {
        0.0
    } else {
        full_moment_real(m as f64, s)
    }
}

fn check_region(d: &PolyGauss, region: &Region) -> Result<()> {
    if d.dim() != region.dim() {
        return Err(Error::Parameter(format!(
            "descriptor has dimension {}, region has {}",
            d.dim(),
            region.dim()
        )));
    }
    check_rate(d.rate())
}

/// `∫_R P(x) e^{-s|x|²/2} ∏ x_i^{a_i} dx` for the descriptor `P e^{-s|x|²/2}`.
pub fn descriptor_integral(d: &PolyGauss, region: &Region) -> Result<f64> {
    check_region(d, region)?;
    let axis_rate = d.rate() / 2.0;
    let mut total = 0.0;
    let mut comp = 0.0;
    for (gamma, c) in d.poly().terms() {
        let mut prod = c;
        for (i, g) in gamma.iter().enumerate() {
            let ax = region.axes[i];
            prod *= axis_moment(ax.half, ax.weight_exponent, *g, axis_rate);
            if prod == 0.0 {
                break;
            }
        }
        neumaier_add(&mut total, &mut comp, prod);
    }
    Ok(total + comp)
}

/// `∫_R |∇u|²` for `u = P e^{-s|x|²/2}`.
pub fn descriptor_dirichlet(d: &PolyGauss, region: &Region) -> Result<f64> {
    check_region(d, region)?;
    let mut total = 0.0;
    for g in d.gradient() {
        total += descriptor_integral(&g.mul(&g), region)?;
    }
    Ok(total)
}

/// `∫_R u v` for two descriptors.
pub fn inner(u: &PolyGauss, v: &PolyGauss, region: &Region) -> Result<f64> {
    descriptor_integral(&u.mul(v), region)
}

/// `∫_R ⟨∇u, ∇v⟩` for two descriptors.
pub fn gradient_inner(u: &PolyGauss, v: &PolyGauss, region: &Region) -> Result<f64> {
    let gu = u.gradient();
    let gv = v.gradient();
    let mut total = 0.0;
    for (a, b) in gu.iter().zip(&gv) {
        total += inner(a, b, region)?;
    }
    Ok(total)
}

/// `∫_R |x|² u v`.
pub fn moment_inner(u: &PolyGauss, v: &PolyGauss, region: &Region) -> Result<f64> {
    let r2 = Polynomial::radius_squared_pow(u.dim(), 1);
    descriptor_integral(&u.mul(v).mul_poly(&r2), region)
}

/// `∫_R P(x) e^{-s|x|²/2} / |x|² dx`.
///
/// Uses `1/|x|² = ∫_0^∞ e^{-τ|x|²} dτ`: each monomial `x^γ` contributes
/// `∏ m_i(1) · r^{-(D-2)/2} / ((D-2)/2)` with `r = s/2` and `D` the total
/// homogeneity degree including the dimension. Terms with `D <= 2` diverge.
pub fn descriptor_hardy_integral(d: &PolyGauss, region: &Region) -> Result<f64> {
    check_region(d, region)?;
    let r = d.rate() / 2.0;
    let n = region.dim() as f64;
    let weight: f64 = region.axes.iter().map(|a| a.weight_exponent).sum();
    let mut total = 0.0;
    let mut comp = 0.0;
    for (gamma, c) in d.poly().terms() {
        let mut prod = c;
        for (i, g) in gamma.iter().enumerate() {
            let ax = region.axes[i];
            prod *= axis_moment(ax.half, ax.weight_exponent, *g, 1.0);
            if prod == 0.0 {
                break;
            }
        }
        if prod == 0.0 {
            continue;
        }
        let deg: f64 = gamma.iter().map(|g| *g as f64).sum::<f64>() + n + weight;
        let h = (deg - 2.0) / 2.0;
        if h <= 0.0 {
            return Err(Error::Convergence {
                what: "inverse-square moment diverges at the origin".into(),
                rel_change: f64::INFINITY,
            });
        }
        neumaier_add(&mut total, &mut comp, prod * r.powf(-h) / h);
    }
    Ok(total + comp)
}

pub(crate) fn neumaier_add(sum: &mut f64, comp: &mut f64, x: f64) {
    let t = *sum + x;
    if sum.abs() >= x.abs() {
        *comp += (*sum - t) + x;
    } else {
        *comp += (x - t) + *sum;
    }
    *sum = t;
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::{OrthantSpec, WeightExponents};
    use approx::assert_relative_eq;

    fn region(n: usize, k: usize) -> Region {
        OrthantSpec::new(n, k).unwrap().region()
    }

    #[test]
    fn half_moment_values() {
        assert_relative_eq!(half_moment(0, 1.0).unwrap(), PI.sqrt() / 2.0, max_relative = 1e-15);
        assert_relative_eq!(half_moment(2, 1.0).unwrap(), PI.sqrt() / 4.0, max_relative = 1e-15);
        assert_relative_eq!(half_moment(3, 0.5).unwrap(), 2.0, max_relative = 1e-15);
        assert!(half_moment(2, 0.0).is_err());
        assert!(half_moment(2, -1.0).is_err());
    }

    #[test]
    fn full_moment_values() {
        assert_eq!(full_moment(1, 1.0).unwrap(), 0.0);
        assert_relative_eq!(full_moment(2, 1.0).unwrap(), PI.sqrt() / 2.0, max_relative = 1e-15);
        assert_relative_eq!(full_moment(4, 1.0).unwrap(), 3.0 * PI.sqrt() / 4.0, max_relative = 1e-15);
    }

    #[test]
    fn large_moments_stay_finite() {
        let direct = half_moment(400, 1.0).unwrap();
        let logged = (ln_gamma(200.5)).exp() / 2.0;
        assert_relative_eq!(direct, logged, max_relative = 1e-12);
        assert!(half_moment(900, 200.0).unwrap().is_finite());
    }

    #[test]
    fn gamma_half_integer_reference_values() {
        let table = [
            (1, 1.7724538509055159),
            (2, 1.0),
            (3, 0.886226925452758),
            (7, 3.323350970447842),
            (10, 24.0),
            (29, 23092317922.31424),
            (41, 5.406242982335075e+17),
            (60, 8.841761993739703e+30),
        ];
        for (m, g) in table {
            assert_relative_eq!(gamma_half_integer(m), g, max_relative = 1e-15);
        }
    }

    #[test]
    fn extremal_descriptor_integrals() {
        // x² e^{-x²} on the half line
        let u = PolyGauss::new(1.0, Polynomial::monomial(vec![1], 1.0)).unwrap();
        let u2 = u.mul(&u);
        let r = region(1, 1);
        assert_relative_eq!(descriptor_integral(&u2, &r).unwrap(), PI.sqrt() / 4.0, max_relative = 1e-15);
        assert_relative_eq!(moment_inner(&u, &u, &r).unwrap(), 3.0 * PI.sqrt() / 8.0, max_relative = 1e-15);
        assert_relative_eq!(descriptor_dirichlet(&u, &r).unwrap(), 3.0 * PI.sqrt() / 8.0, max_relative = 1e-14);
    }

    #[test]
    fn odd_full_factor_vanishes() {
        let d = PolyGauss::new(2.0, Polynomial::monomial(vec![1, 1], 1.0)).unwrap();
        assert_eq!(descriptor_integral(&d, &region(2, 1)).unwrap(), 0.0);
    }

    #[test]
    fn product_field_dirichlet() {
        let u = PolyGauss::new(1.0, Polynomial::monomial(vec![1, 1], 1.0)).unwrap();
        assert_relative_eq!(descriptor_dirichlet(&u, &region(2, 1)).unwrap(), 3.0 * PI / 8.0, max_relative = 1e-14);
        assert_eq!(descriptor_dirichlet(&PolyGauss::zero(2, 1.0).unwrap(), &region(2, 1)).unwrap(), 0.0);
    }

    #[test]
    fn hardy_moment_half_line() {
        // ∫_0^∞ x² e^{-x²} / x² = √π/2
        let d = PolyGauss::new(2.0, Polynomial::monomial(vec![2], 1.0)).unwrap();
        assert_relative_eq!(descriptor_hardy_integral(&d, &region(1, 1)).unwrap(), PI.sqrt() / 2.0, max_relative = 1e-14);
    }

    #[test]
    fn hardy_moment_divergent_term_rejected() {
        let d = PolyGauss::new(2.0, Polynomial::constant(2, 1.0)).unwrap();
        assert!(descriptor_hardy_integral(&d, &region(2, 0)).is_err());
    }

    #[test]
    fn hardy_moment_three_space() {
        // ∫_{ℝ³} e^{-|x|²}/|x|² = 4π ∫ e^{-r²} dr = 2π^{3/2}
        let d = PolyGauss::new(2.0, Polynomial::constant(3, 1.0)).unwrap();
        assert_relative_eq!(
            descriptor_hardy_integral(&d, &region(3, 0)).unwrap(),
            2.0 * PI.powf(1.5),
            max_relative = 1e-14
        );
    }

    #[test]
    fn weighted_region_moment() {
        let r = WeightExponents::new(vec![2.0]).unwrap().region();
        let d = PolyGauss::new(1.0, Polynomial::constant(1, 1.0)).unwrap();
        // ∫_0^∞ x² e^{-x²/2} = √(π/2)
        assert_relative_eq!(descriptor_integral(&d, &r).unwrap(), (PI / 2.0).sqrt(), max_relative = 1e-15);
    }
}
