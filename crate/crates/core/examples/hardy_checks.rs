//! One-dimensional Hardy conditions for Lebesgue and Lorentz norms.

use plap::nfunc::Exponent;
use plap::rearrange::{self, RiNorm, StepFunction, StepProfile};

pub fn main() -> plap::Result<()> {
    let p = Exponent::new(2.0)?;
    let family = vec![
        StepFunction::indicator(1.0, 1.0)?,
        StepFunction::from_values(&[3.0, 1.0, 0.2], &[0.1, 0.5, 2.0])?,
    ];
    for norm in [RiNorm::Lebesgue(4.0), RiNorm::Lorentz { q: 4.0, r: 2.0 }] {
        let avg = rearrange::hardy_check_avg(&norm, p, &family, None)?;
        let profiles: Vec<StepProfile> = family.iter().map(StepProfile::from_step).collect();
        let tail = rearrange::hardy_check_tail(&norm, &norm, &profiles)?;
        println!("{norm:?}: averaged {avg:.4?}, tail {tail:.4?}");
    }
    // At the critical exponent the ratios grow with k.
    for k in [1.0, 10.0, 100.0, 1000.0] {
        let phi = StepFunction::indicator(1.0 / k, k)?;
        let r = rearrange::hardy_check_avg(&RiNorm::Lebesgue(p.pprime()), p, &[phi], Some(1.0))?;
        println!("k = {k}: {:.4}", r[0]);
    }
    Ok(())
}
