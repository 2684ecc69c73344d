//! The HUP ratio E·M/N² of the extremals against the sharp constant (n+2k)²/4,
//! with both integration backends.

use orthant_hup::catalog::SUITE_SPECS;
use orthant_hup::domain::{make_extremal, OrthantSpec};
use orthant_hup::functionals::{hup_constant, hup_ratio, Backend};
use orthant_hup::quadrature::QuadConfig;

fn main() -> orthant_hup::Result<()> {
    let cfg = QuadConfig::default();
    println!("{:>5} {:>5} {:>22} {:>22} {:>22}", "n,k", "beta", "constant", "oracle", "quadrature");
    for (n, k) in SUITE_SPECS {
        let spec = OrthantSpec::new(n, k)?;
        for beta in [0.25, 0.5, 2.0] {
            let f = make_extremal(spec, 1.0, beta)?;
            println!(
                "{:>5} {beta:>5} {:>22.16e} {:>22.16e} {:>22.16e}",
                spec.to_string(),
                hup_constant(&spec),
                hup_ratio(&f, Backend::Oracle, &cfg)?,
                hup_ratio(&f, Backend::Quadrature, &cfg)?
            );
        }
    }
    Ok(())
}
