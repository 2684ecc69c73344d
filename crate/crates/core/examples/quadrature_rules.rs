//! The one-dimensional Gauss rules behind the tensor grids, checked on
//! moments with known values.

use std::f64::consts::PI;

use orthant_hup::exact_oracle::{full_moment, half_moment_real};
use orthant_hup::quadrature::{half_range_rule, hermite_rule, legendre_panel_rule};

fn main() -> orthant_hup::Result<()> {
    let h = hermite_rule(20)?;
    for m in [0, 2, 10, 38] {
        let q = h.apply(|t| t.powi(m as i32));
        println!("Hermite 20: int t^{m} e^(-t^2) = {q:.16e} (exact {:.16e})", full_moment(m, 1.0)?);
    }
    for a in [0.0, 0.5, 2.0] {
        let r = half_range_rule(20, a)?;
        for j in [0, 3, 7] {
            let q = r.apply(|t| t.powi(j));
            let exact = half_moment_real(a + j as f64, 1.0);
            println!("half line a={a}: int t^{j} t^a e^(-t^2) = {q:.16e} (exact {exact:.16e})");
        }
    }
    let l = legendre_panel_rule(8, 0.0, PI)?;
    println!("Legendre 8 on [0, pi]: int sin = {:.16e}", l.apply(f64::sin));
    Ok(())
}
