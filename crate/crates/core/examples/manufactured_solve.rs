//! Solves a linear and a nonlinear manufactured problem and prints the observed errors.

use std::f64::consts::PI;

use plap::mesh::{ElemField, Mesh, NodalField};
use plap::nfunc::Exponent;
use plap::solver::{self, DirichletProblem, SolverConfig};

fn l2_error(mesh: &Mesh, u: &NodalField, exact: impl Fn([f64; 2]) -> f64) -> f64 {
    let sum: f64 = (0..mesh.node_count()).map(|a| (u.at(a)[0] - exact(mesh.node(a))).powi(2)).sum();
    (sum * mesh.hx() * mesh.hy()).sqrt()
}

pub fn main() -> plap::Result<()> {
    let exact = |x: [f64; 2]| (PI * x[0]).sin() * (PI * x[1]).sin();
    let grad = |x: [f64; 2]| [PI * (PI * x[0]).cos() * (PI * x[1]).sin(), PI * (PI * x[0]).sin() * (PI * x[1]).cos()];
    let mut last: Option<f64> = None;
    for m in [8, 16, 32] {
        let mesh = Mesh::unit_square(m)?;
        let f = ElemField::from_fn(&mesh, 1, 2, |x, t| t.copy_from_slice(&grad(x)));
        let prob = DirichletProblem::new(Exponent::new(2.0)?, mesh.clone(), f, NodalField::zeros(&mesh, 1))?;
        let sol = solver::solve(&prob, &SolverConfig::default())?;
        let err = l2_error(&mesh, &sol.u, exact);
        match last {
            Some(prev) => println!("M = {m}: L2 error {err:.3e}, order {:.2}", (prev / err).log2()),
            None => println!("M = {m}: L2 error {err:.3e}"),
        }
        last = Some(err);
    }

    // F = A(Dw) makes the interpolant of w the exact discrete solution.
    let mesh = Mesh::unit_square(16)?;
    let w = NodalField::interpolate(&mesh, 1, |x, o| o[0] = (PI * x[0]).sin() * x[1] + 0.5 * x[0] * x[0]);
    let prob = DirichletProblem::a_manufactured(Exponent::new(3.0)?, mesh, w)?;
    let sol = solver::solve(&prob, &SolverConfig::default())?;
    println!(
        "p = 3: {} iterations, residual {:.2e}, energy {:.6} -> {:.6}",
        sol.iterations,
        sol.residual,
        sol.energy_trace.first().unwrap_or(&f64::NAN),
        sol.energy_trace.last().unwrap_or(&f64::NAN)
    );
    Ok(())
}
