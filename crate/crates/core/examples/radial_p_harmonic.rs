//! `|x|^{(p-2)/(p-1)}` is p-harmonic in the plane away from the origin; the discrete
//! solution on `[1, 2]^2` with this boundary data converges to it.

use plap::mesh::{Mesh, NodalField, Rect};
use plap::nfunc::Exponent;
use plap::solver::{self, SolverConfig};

pub fn main() -> plap::Result<()> {
    let p = Exponent::new(3.0)?;
    let power = (p.p() - 2.0) / (p.p() - 1.0);
    let exact = |x: [f64; 2]| x[0].hypot(x[1]).powf(power);
    for m in [8, 16, 32] {
        let mesh = Mesh::new(Rect::new(1.0, 2.0, 1.0, 2.0)?, m)?;
        let g = NodalField::interpolate(&mesh, 1, |x, o| o[0] = exact(x));
        let sol = solver::solve_pharmonic(&mesh, p, &g, &SolverConfig::default())?;
        let err = (0..mesh.node_count())
            .filter(|&a| !mesh.is_boundary(a))
            .map(|a| (sol.u.at(a)[0] - exact(mesh.node(a))).abs())
            .fold(0.0, f64::max);
        println!("M = {m}: interior max error {err:.3e} after {} iterations", sol.iterations);
    }
    Ok(())
}
