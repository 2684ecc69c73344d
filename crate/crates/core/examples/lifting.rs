//! Lifting orthant integrals to full space: mass, moments, the weighted
//! gradient formula and the dilation pairing, for an exact field and a bump.

use orthant_hup::catalog::{bump, polygauss_random};
use orthant_hup::domain::OrthantSpec;
use orthant_hup::lifting::{
    cartesian_lifted_integral, radial_lifted_integral, verify_dilation_pairing, verify_gradient_lift,
    verify_gradient_lift_weighted, verify_mass_lift, verify_moment_lift, LiftCheck, LiftPlan, LiftedIntegral,
};
use orthant_hup::quadrature::QuadConfig;

fn show(what: &str, c: LiftCheck) {
    println!("  {what:<22} lhs {:.16e} rhs {:.16e} gap {:.2e}", c.lhs, c.rhs, c.gap);
}

fn main() -> orthant_hup::Result<()> {
    let cfg = QuadConfig::default();
    let spec = OrthantSpec::new(2, 1)?;

    let f = polygauss_random(spec, 3, 4, 1)?;
    let plan = LiftPlan::uniform(spec, 1)?;
    println!("{} lifted to dimension {}", f.label(), plan.lifted_dim());
    show("mass", verify_mass_lift(&f, &plan, &cfg)?);
    show("moment a=1", verify_moment_lift(&f, &plan, 1.0, &cfg)?);
    show("dilation", verify_dilation_pairing(&f, &plan, &cfg)?);

    for l in [1, 2] {
        let b = bump(spec, 1.0, 2.0, l)?;
        let plan = LiftPlan::uniform(spec, l)?;
        println!("{} with l = {l}", b.label());
        for beta in [0.0, 1.0] {
            show(&format!("gradient b={beta}"), verify_gradient_lift(&b, &plan, beta, &cfg)?);
            show(&format!("weighted gradient b={beta}"), verify_gradient_lift_weighted(&b, &plan, beta, &cfg)?);
        }
        if plan.lifted_dim() <= 4 {
            let what = LiftedIntegral::Moment(0.0);
            let c = cartesian_lifted_integral(&b, &plan, what, &cfg)?;
            let r = radial_lifted_integral(&b, &plan, what, &cfg)?;
            println!("  Cartesian {c:.16e} radial {r:.16e}");
        }
    }
    Ok(())
}
