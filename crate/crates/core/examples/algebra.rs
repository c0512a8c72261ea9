//! Fits the equivalence band of the tensor-map expressions for several exponents.

use plap::nfunc::{self, Exponent, Tensor};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn main() -> plap::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for p in [1.2, 1.5, 2.0, 3.0, 4.5] {
        let fit = nfunc::fit_equivalence_band(Exponent::new(p)?, 2000, &mut rng);
        println!("p = {p}: C_p = {:.3} over {} pairs", fit.constant, fit.samples_used);
    }
    let p = Exponent::new(3.0)?;
    let a = Tensor::from_vec(1, 2, vec![1.0, -2.0])?;
    let b = Tensor::from_vec(1, 2, vec![0.5, 0.25])?;
    let e = nfunc::equivalence_ratios(p, &a, &b)?;
    println!("A(P) = {:?}, V(P) = {:?}", nfunc::a_map(p, &a).as_slice(), nfunc::v_map(p, &a).as_slice());
    println!("five expressions: {:?}", e.five());
    Ok(())
}
