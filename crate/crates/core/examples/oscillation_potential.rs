//! The oscillation potential of a flux and the Dini transform of a few moduli.

use plap::mesh::{ElemField, Mesh};
use plap::nfunc::Exponent;
use plap::oscillation::{self, Modulus, ModulusFamily, PotentialParams};

pub fn main() -> plap::Result<()> {
    let mesh = Mesh::unit_square(32)?;
    let f = ElemField::from_fn(&mesh, 1, 2, |x, t| t.copy_from_slice(&[x[0], 0.0]));
    let params = PotentialParams::new(0.25, 0.5, Exponent::new(2.0)?)?;
    println!("radii {:?}", params.radii(mesh.h()));
    println!("potential at the center: {:.5}", oscillation::oscillation_potential(&mesh, &f, [0.5, 0.5], &params)?);

    for omega in [
        Modulus::power(0.5)?,
        Modulus::fitted(ModulusFamily::LogInverse { sigma: 2.0, scale: 3.0 }, 0.1, 1.0)?,
        Modulus::fitted(ModulusFamily::DiniLog { scale: std::f64::consts::E }, 0.1, 1.0)?,
    ] {
        match oscillation::dini_transform(&omega) {
            Ok(t) => println!("{:?}: Dini integral at 0.1 = {:.5}", omega.family, t.value(0.1)),
            Err(e) => println!("{:?}: {e}", omega.family),
        }
    }
    Ok(())
}
