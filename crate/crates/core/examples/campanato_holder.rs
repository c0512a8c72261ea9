//! Campanato, BMO and Holder seminorms of a field, and its VMO modulus.

use plap::mesh::{ElemField, Mesh};
use plap::oscillation::{self, BallFamily, Modulus};

pub fn main() -> plap::Result<()> {
    let mesh = Mesh::unit_square(32)?;
    let f = ElemField::from_fn(&mesh, 1, 1, |x, t| t[0] = ((x[0] - 0.5).hypot(x[1] - 0.5)).sqrt());
    let family = BallFamily::standard(&mesh);
    let half = Modulus::power(0.5)?;
    println!("Campanato (r^0.5, q = 1): {:.4}", oscillation::campanato_seminorm(&mesh, &f, &half, 1.0, &family)?);
    println!("BMO (q = 1): {:.4}", oscillation::campanato_seminorm(&mesh, &f, &Modulus::constant(1.0)?, 1.0, &family)?);
    println!("Holder (r^0.5): {:.4}", oscillation::holder_seminorm(&mesh, &f, &half)?);
    let vmo = oscillation::vmo_modulus(&mesh, &f, 1.0, &family)?;
    for (r, v) in vmo.radii.iter().zip(&vmo.values) {
        println!("  VMO modulus at {r:.4}: {v:.4}");
    }
    Ok(())
}
