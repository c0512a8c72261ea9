//! The Young function `Psi` paired with `Phi` for the Orlicz gradient estimate.

use plap::nfunc::Exponent;
use plap::rearrange::{self, YoungFunction};

pub fn main() -> plap::Result<()> {
    let p = Exponent::new(3.0)?;
    for phi in [YoungFunction::power(4.0)?, YoungFunction::exp_type(1.0, 2.0)?] {
        let (psi, report) = rearrange::orlicz_target_with_report(&phi, p)?;
        println!("index {:.3} (p' = {})", report.index, p.pprime());
        for t in [1e-3, 1.0, 1e3] {
            println!("  Psi({t:e}) = {:.4e}, local power {:.3}", psi.value(t), psi.log_slope(t));
        }
    }
    match rearrange::orlicz_target(&YoungFunction::power(p.pprime())?, p) {
        Err(e) => println!("power p' rejected: {e}"),
        Ok(_) => println!("power p' unexpectedly accepted"),
    }
    Ok(())
}
