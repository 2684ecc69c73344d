//! Distances to the extremal family, the affine family, the norm-constrained
//! extremals and the fixed-centre Gaussians.

use orthant_hup::catalog::{affine_equality, polygauss_random, sharp_example};
use orthant_hup::domain::OrthantSpec;
use orthant_hup::projection::{
    dist_to_affine_family, dist_to_e, dist_to_e_norm_constrained, gaussian_center_dist, gradient_norm_dist,
};
use orthant_hup::quadrature::QuadConfig;

fn main() -> orthant_hup::Result<()> {
    let cfg = QuadConfig::default();
    let spec = OrthantSpec::new(2, 1)?;
    for f in [sharp_example(spec)?, affine_equality(spec, &[1.0], 1.0, 0.5)?, polygauss_random(spec, 5, 4, 1)?] {
        let e = dist_to_e(&f, &cfg)?;
        let a = dist_to_affine_family(&f, &cfg)?;
        println!("{}", f.label());
        println!("  extremals        {:.16e} at beta {:.6} c {:?}", e.dist_sq, e.beta, e.coefficients);
        println!("  affine family    {:.16e} at beta {:.6} b {:?}", a.dist_sq, a.beta, a.coefficients);
        println!("  norm-constrained {:.16e}", dist_to_e_norm_constrained(&f, &cfg)?.dist_sq);
        println!("  centre lambda=1  {:.16e}", gaussian_center_dist(&f, 1.0, &cfg)?.dist_sq);
        println!("  gradient norm    {:.16e}", gradient_norm_dist(&f, &cfg)?);
    }
    Ok(())
}
