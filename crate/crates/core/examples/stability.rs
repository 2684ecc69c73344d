//! Every stability inequality on one random field, the sharp example and an
//! affine equality member.

use orthant_hup::catalog::{affine_equality, polygauss_random, sharp_example};
use orthant_hup::domain::OrthantSpec;
use orthant_hup::quadrature::QuadConfig;
use orthant_hup::stability::stability_report;

fn main() -> orthant_hup::Result<()> {
    let cfg = QuadConfig::default();
    let spec = OrthantSpec::new(2, 1)?;
    let fields = [
        polygauss_random(spec, 11, 4, 1)?,
        sharp_example(spec)?,
        affine_equality(spec, &[0.7], -0.4, 0.5)?,
    ];
    for f in &fields {
        let r = stability_report(f, &cfg)?;
        println!("{}: rho1 {:.16e}", r.label, r.rho1);
        for c in &r.checks {
            let tag = if c.equality { "equality" } else if c.holds { "holds" } else { "VIOLATED" };
            println!("  {:<36} {:>22.16e} >= {:>22.16e}  {tag}", c.name, c.lhs, c.rhs);
        }
    }
    Ok(())
}
