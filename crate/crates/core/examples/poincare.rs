//! Poincaré inequality for x^A e^{-|x|²/(2λ²)}: Rayleigh quotients, the
//! stability margin, and the closed form 1/(3 - 8/π) for A = (2), f = x.

use std::f64::consts::PI;

use orthant_hup::catalog::random_polynomial;
use orthant_hup::domain::{ScaledGaussianMeasure, WeightExponents};
use orthant_hup::poincare::{measure_stats, poincare_stability_from, polynomial_stats, rayleigh_from};
use orthant_hup::poly::Polynomial;
use orthant_hup::quadrature::QuadConfig;

fn main() -> orthant_hup::Result<()> {
    let m = ScaledGaussianMeasure::new(WeightExponents::new(vec![2.0])?, 1.0)?;
    let x = Polynomial::coordinate(1, 0);
    let q = rayleigh_from(&polynomial_stats(&x, &m)?)?;
    println!("A=(2), lambda=1, f=x: quotient {q:.16e}, closed form {:.16e}", 1.0 / (3.0 - 8.0 / PI));

    let cfg = QuadConfig::with_order(24);
    for lambda in [0.5, 1.0, 2.0] {
        let m = ScaledGaussianMeasure::new(WeightExponents::new(vec![0.0, 2.0])?, lambda)?;
        for seed in 0..3 {
            let p = random_polynomial(2, 4, seed);
            let exact = polynomial_stats(&p, &m)?;
            let quad = measure_stats(&p, &m, &cfg)?;
            let s = poincare_stability_from(&exact);
            println!(
                "lambda {lambda} seed {seed}: quotient {:.6} >= {:.6}, stability margin {:.3e}, variance oracle/quadrature {:.3e}",
                rayleigh_from(&exact)?,
                1.0 / (lambda * lambda),
                s.margin,
                (quad.variance - exact.variance).abs() / exact.variance
            );
        }
        let affine = Polynomial::constant(2, 0.3).add(&Polynomial::coordinate(2, 0));
        println!("  restricted affine 0.3 + x1: quotient {:.16e}", rayleigh_from(&polynomial_stats(&affine, &m)?)?);
    }
    Ok(())
}
