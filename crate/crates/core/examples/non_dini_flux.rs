//! A flux with modulus `1/log(e^2/r)` and a Laplace solution whose gradient grows like
//! `|log log(e^2/r)|` at the origin.

use plap::lab::example55;

pub fn main() -> plap::Result<()> {
    for k in 1..=2 {
        let r = 10f64.powi(-k);
        let measured = example55::max_gradient_outside(r, 32)?;
        println!("r = {r:e}: max |Du_h| = {measured:.4}, |xi(r)| = {:.4}", example55::xi(r).abs());
    }
    println!("Holder seminorm of F on M = 32: {:.4}", example55::holder_of_flux(32)?);
    Ok(())
}
