//! Decreasing rearrangement of a field and its Lebesgue, Lorentz, Orlicz and
//! Marcinkiewicz norms.

use plap::mesh::Mesh;
use plap::rearrange::{self, YoungFunction};

pub fn main() -> plap::Result<()> {
    let mesh = Mesh::unit_square(16)?;
    let values: Vec<f64> = (0..mesh.element_count())
        .map(|e| {
            let x = mesh.barycenter(e);
            (1.0 - x[0]) * x[1] + 0.1
        })
        .collect();
    let sf = rearrange::rearrange(&mesh, &values)?;
    println!("{} pieces, total measure {}", sf.pieces().len(), sf.total_measure());
    println!("f*(0.25) = {:.4}, f**(0.25) = {:.4}", sf.value_at(0.25), sf.double_star(0.25)?);
    println!("L^2 = {:.6}, L^{{2,2}} = {:.6}", sf.lebesgue_norm(2.0)?, sf.lorentz_norm(2.0, 2.0)?);
    println!("L^{{3,1}} = {:.6}", sf.lorentz_norm(3.0, 1.0)?);
    println!("Luxemburg (t^3) = {:.6}", sf.luxemburg_norm(&YoungFunction::power(3.0)?)?);
    println!("Marcinkiewicz (s^0.5) = {:.6}", sf.marcinkiewicz_norm(f64::sqrt));
    Ok(())
}
