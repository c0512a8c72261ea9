//! Experiment runner: configuration, seeded problem data, experiments and reports.
//!
//! Every experiment takes an [`ExperimentConfig`] and returns a [`Report`]. Fitted
//! constants are measured on a mesh and its refinement; the ratio of the two is the
//! stability factor compared against `cfg.stability`.

pub mod basic;
pub mod config;
pub mod data;
pub mod decay;
pub mod example55;
pub mod local;
pub mod reduction;
pub mod report;
pub mod table;

pub use basic::exp_basic_estimate;
pub use config::{parse_modulus, parse_young, ExperimentConfig};
pub use decay::exp_decay;
pub use example55::exp_example_5_5;
pub use local::{exp_oscillation_estimate, exp_potential};
pub use reduction::{exp_reduction, riesz_stability};
pub use report::{Assertion, CaseRecord, Report};
pub use table::{norm_table, NormSpec};

use crate::error::Result;
use crate::mesh::{self, ElemField};
use crate::nfunc;
use crate::solver::{self, DirichletProblem, Solution, SolverConfig};

/// Solver settings used by all experiments.
pub fn solver_config() -> SolverConfig {
    SolverConfig {
        tol_residual: 1e-8,
        ..SolverConfig::default()
    }
}

/// Solves `prob` and returns the solution with its gradient and flux `A(Du)`.
pub fn solve_with_flux(prob: &DirichletProblem) -> Result<(Solution, ElemField, ElemField)> {
    let sol = solver::solve(prob, &solver_config())?;
    let grad = mesh::gradient(&prob.mesh, &sol.u)?;
    let p = prob.p.p();
    let flux = grad.mapped(|t| nfunc::a_map_in_place(p, t));
    Ok((sol, grad, flux))
}

/// `V(Du)` of a gradient field.
pub fn v_field(p: f64, grad: &ElemField) -> ElemField {
    grad.mapped(|t| nfunc::v_map_in_place(p, t))
}

pub(crate) fn median(values: &mut [f64]) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    values.sort_by(f64::total_cmp);
    let k = values.len() / 2;
    if values.len() % 2 == 1 {
        values[k]
    } else {
        0.5 * (values[k - 1] + values[k])
    }
}

pub(crate) fn case_id(p: f64, n: usize, m: usize, seed: u64) -> String {
    format!("p{p}-N{n}-M{m}-s{seed}")
}

/// Margin-respecting half-width of a centered sample lattice on the unit square.
pub(crate) fn lattice_half_width(margin: f64) -> f64 {
    (0.5 - margin) * (1.0 - 1e-9)
}
