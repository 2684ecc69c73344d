//! The scale-dependent identity: the additive deficit equals the integral of
//! the squared "completed" gradient, and half its minimum over α is ρ₁.

use orthant_hup::catalog::polygauss_random;
use orthant_hup::deficits::{deficit_report, envelope_search};
use orthant_hup::domain::OrthantSpec;
use orthant_hup::functionals::Backend;
use orthant_hup::quadrature::QuadConfig;

fn main() -> orthant_hup::Result<()> {
    let cfg = QuadConfig::default();
    let spec = OrthantSpec::new(2, 1)?;
    let f = polygauss_random(spec, 7, 4, 1)?;
    println!("field {} on the {spec} orthant", f.label());
    for alpha in [0.5, 1.0, 2.0] {
        let r = deficit_report(&f, Some(alpha), Backend::Oracle, &cfg)?;
        println!(
            "alpha {alpha}: additive {:.16e}  identity rhs {:.16e}  residual {:.2e}",
            r.additive,
            r.identity_rhs.unwrap(),
            r.residual.unwrap()
        );
    }
    let r = deficit_report(&f, None, Backend::Oracle, &cfg)?;
    let search = envelope_search(&r.core);
    println!("rho1 {:.16e}", r.rho1);
    println!("alpha* {:.16e}  half additive there {:.16e}", r.alpha, 0.5 * r.additive);
    println!("golden search alpha {:.16e}  half minimum {:.16e}", search.x, 0.5 * search.value);
    Ok(())
}
