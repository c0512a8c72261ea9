//! Sharp and plain maximal functions of a step field, and the discrete Riesz constant.

use plap::maximal::{self, RadiiSet};
use plap::mesh::{ElemField, Mesh};

pub fn main() -> plap::Result<()> {
    let mesh = Mesh::unit_square(32)?;
    let f = ElemField::from_fn(&mesh, 1, 1, |x, t| t[0] = if x[0] + 0.3 * x[1] > 0.6 { 1.0 } else { 0.0 });
    let radii = RadiiSet::dyadic(1.0 / 16.0, 0.25)?;
    for x in [[0.5, 0.5], [0.6, 0.3], [0.3, 0.7]] {
        let sharp = maximal::sharp_maximal(&mesh, &f, 1.0, &radii, x)?;
        let plain = maximal::plain_maximal(&mesh, &f, 1.0, &radii, x)?;
        println!("x = {x:?}: sharp {sharp:.4}, plain {plain:.4}");
    }
    let c = maximal::riesz_constant(&mesh, &f, 2.0, &RadiiSet::dyadic(1.0 / 32.0, 0.25)?)?;
    println!("Riesz constant for q = 2: {c:.4}");
    Ok(())
}
