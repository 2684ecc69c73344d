//! Deficits and margins along extremal + ε·(sharp example), written as CSV.

use orthant_hup::stability::RHO1_VS_EXTREMAL;
use orthant_hup::sweep::{run_sweep, SweepConfig};

fn main() -> orthant_hup::Result<()> {
    let table = run_sweep(&SweepConfig::default())?;
    print!("{}", table.to_csv());
    eprintln!(
        "smallest margin of rho1 >= dist_E: {:.3e}; violations: {}",
        table.min_margin(RHO1_VS_EXTREMAL).unwrap_or(f64::NAN),
        table.violation_count()
    );
    Ok(())
}
