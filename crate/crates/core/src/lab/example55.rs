//! A Laplace problem whose flux has the modulus `omega(r) = 1/log(e^2/r)`, which is not
//! Dini, and whose solution `u = x2 xi(|x|)` has a logarithmically unbounded gradient.

use std::f64::consts::E;

use rayon::prelude::*;

use super::report::stability_factor;
use super::{solve_with_flux, CaseRecord, ExperimentConfig, Report};
use crate::error::{Error, Result};
use crate::mesh::{ElemField, Mesh, NodalField, Rect};
use crate::nfunc::Exponent;
use crate::oscillation::{self, Modulus, ModulusFamily};
use crate::solver::{self, DirichletProblem};

pub const SCALE: f64 = E * E;

pub fn omega(r: f64) -> f64 {
    1.0 / (SCALE / r).ln()
}

/// `xi(r) = -int_r^1 omega(rho)/rho d rho = log log e^2 - log log(e^2/r)`.
pub fn xi(r: f64) -> f64 {
    SCALE.ln().ln() - (SCALE / r).ln().ln()
}

pub fn solution(x: [f64; 2]) -> f64 {
    x[1] * xi(x[0].hypot(x[1]))
}

pub fn flux(x: [f64; 2]) -> [f64; 2] {
    let r2 = x[0] * x[0] + x[1] * x[1];
    let w = omega(r2.sqrt()) / r2;
    [2.0 * x[0] * x[1] * w, (x[1] * x[1] - x[0] * x[0]) * w]
}

pub fn gradient(x: [f64; 2]) -> [f64; 2] {
    let r2 = x[0] * x[0] + x[1] * x[1];
    let w = omega(r2.sqrt()) / r2;
    [x[0] * x[1] * w, xi(r2.sqrt()) + x[1] * x[1] * w]
}

pub fn modulus() -> Result<Modulus> {
    Modulus::fitted(ModulusFamily::DiniLog { scale: SCALE }, 0.1, 2.9)
}

fn problem(bounds: Rect, m: usize) -> Result<DirichletProblem> {
    let mesh = Mesh::new(bounds, m)?;
    let f = ElemField::from_fn(&mesh, 1, 2, |x, t| t.copy_from_slice(&flux(x)));
    let g = NodalField::interpolate(&mesh, 1, |x, o| o[0] = solution(x));
    DirichletProblem::new(Exponent::new(2.0)?, mesh, f, g)
}

/// `max |r_a| / h^2` over interior nodes `a` with `|x_a| > 0.1`, where `r` is the
/// nodal residual of the interpolated exact solution on `[-1, 1]^2`.
pub fn residual_density(m: usize) -> Result<f64> {
    let prob = problem(Rect::new(-1.0, 1.0, -1.0, 1.0)?, m)?;
    let r = solver::nodal_residuals(&prob, &prob.g)?;
    let mesh = &prob.mesh;
    let area = mesh.hx() * mesh.hy();
    Ok((0..mesh.node_count())
        .filter(|&a| {
            let x = mesh.node(a);
            x[0].hypot(x[1]) > 0.1
        })
        .map(|a| r[a] / area)
        .fold(0.0, f64::max))
}

/// Discrete solution on `[-4r, 4r]^2` with `m` cells per side; the largest gradient over
/// elements whose barycenter satisfies `|x| >= r`.
pub fn max_gradient_outside(r: f64, m: usize) -> Result<f64> {
    let prob = problem(Rect::new(-4.0 * r, 4.0 * r, -4.0 * r, 4.0 * r)?, m)?;
    let (_, grad, _) = solve_with_flux(&prob)?;
    let mesh = &prob.mesh;
    Ok((0..mesh.element_count())
        .filter(|&e| {
            let c = mesh.barycenter(e);
            c[0].hypot(c[1]) >= r
        })
        .map(|e| grad.at(e)[0].hypot(grad.at(e)[1]))
        .fold(0.0, f64::max))
}

pub fn holder_of_flux(m: usize) -> Result<f64> {
    let mesh = Mesh::new(Rect::new(-1.0, 1.0, -1.0, 1.0)?, m)?;
    let f = ElemField::from_fn(&mesh, 1, 2, |x, t| t.copy_from_slice(&flux(x)));
    oscillation::holder_seminorm(&mesh, &f, &modulus()?)
}

/// Residual order, gradient growth against `|xi|`, Holder stability of `F` and the
/// divergence of the Dini integral. Only `cfg.stability` is read.
pub fn exp_example_5_5(cfg: &ExperimentConfig) -> Result<Report> {
    let mut report = Report::new("example55");
    let grids = [32usize, 64, 128];
    let densities: Vec<f64> = grids.par_iter().map(|&m| residual_density(m)).collect::<Result<_>>()?;
    let orders: Vec<f64> = densities.windows(2).map(|w| (w[0] / w[1]).log2()).collect();
    let min_order = orders.iter().cloned().fold(f64::INFINITY, f64::min);
    for (k, (&m, &d)) in grids.iter().zip(&densities).enumerate() {
        let mut rec = CaseRecord::new(format!("residual-M{m}"), 2.0, m, 0).metric("residual_density", d);
        if let Some(o) = orders.get(k) {
            rec = rec.metric("order", *o);
        }
        report.cases.push(rec);
    }
    report.check("residual order away from the origin", "order >= 0.8", min_order, min_order >= 0.8);

    let levels = [1usize, 2, 3];
    let maxima: Vec<f64> = levels
        .par_iter()
        .map(|&k| max_gradient_outside(10f64.powi(-(k as i32)), 64))
        .collect::<Result<_>>()?;
    let mut worst: f64 = 0.0;
    for (&k, &g) in levels.iter().zip(&maxima) {
        let r = 10f64.powi(-(k as i32));
        let exact = xi(r).abs();
        let rel = (g - exact).abs() / exact;
        worst = worst.max(rel);
        let mut rec = CaseRecord::new(format!("gradient-r1e-{k}"), 2.0, 64, 0)
            .metric("r", r)
            .metric("max_grad", g)
            .metric("abs_xi", exact)
            .metric("relative_error", rel);
        rec.pass = rel <= 0.1;
        report.cases.push(rec);
    }
    report.check("max gradient tracks |xi(r)|", "relative error <= 0.1 for r = 1e-1, 1e-2, 1e-3", worst, worst <= 0.1);

    let (h32, h64) = rayon::join(|| holder_of_flux(32), || holder_of_flux(64));
    let (h32, h64) = (h32?, h64?);
    let factor = stability_factor(h32, h64);
    let mut rec = CaseRecord::new("holder", 2.0, 32, 0)
        .metric("holder", h32)
        .metric("holder_refined", h64);
    rec.fitted_constant = Some(h32);
    rec.stability_factor = Some(factor);
    rec.pass = h32.is_finite() && factor < cfg.stability;
    report.cases.push(rec);
    report.check(
        "Holder seminorm of F finite and stable",
        &format!("factor < {}", cfg.stability),
        factor,
        h32.is_finite() && factor < cfg.stability,
    );

    let omega = modulus()?;
    let closed = matches!(oscillation::dini_transform(&omega), Err(Error::DiniDivergence(_)));
    let numeric = oscillation::dini_integral_numeric(&omega.family, 0.5).is_err();
    report.check(
        "Dini integral diverges",
        "divergence reported by closed form and quadrature",
        (closed && numeric) as u8 as f64,
        closed && numeric,
    );
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn displayed_gradient_matches_finite_differences() {
        let h = 1e-5;
        for &x in &[[0.3, 0.4], [-0.2, 0.05], [0.01, -0.02], [0.6, -0.7]] {
            let g = gradient(x);
            let dx = (solution([x[0] + h, x[1]]) - solution([x[0] - h, x[1]])) / (2.0 * h);
            let dy = (solution([x[0], x[1] + h]) - solution([x[0], x[1] - h])) / (2.0 * h);
            assert!((dx - g[0]).abs() < 1e-7 * (1.0 + g[0].abs()), "{x:?}");
            assert!((dy - g[1]).abs() < 1e-7 * (1.0 + g[1].abs()), "{x:?}");
        }
    }

    #[test]
    fn difference_of_gradient_and_flux_is_divergence_free() {
        let h = 1e-4;
        let d = |x: [f64; 2]| {
            let (g, f) = (gradient(x), flux(x));
            [g[0] - f[0], g[1] - f[1]]
        };
        for &x in &[[0.3, 0.4], [-0.5, 0.1], [0.05, 0.07]] {
            let div = (d([x[0] + h, x[1]])[0] - d([x[0] - h, x[1]])[0]) / (2.0 * h)
                + (d([x[0], x[1] + h])[1] - d([x[0], x[1] - h])[1]) / (2.0 * h);
            assert!(div.abs() < 1e-5, "{x:?}: {div}");
        }
    }

    #[test]
    fn xi_values() {
        assert_eq!(xi(1.0), 0.0);
        // for the modulus 1/log(e/r) the same substitution gives -log log(e/r)
        let r: f64 = 0.01;
        let n = 200_000;
        let step = -r.ln() / n as f64;
        let quad: f64 = (0..n)
            .map(|k| {
                let t = r.ln() + (k as f64 + 0.5) * step;
                step / (E / t.exp()).ln()
            })
            .sum();
        assert!((-quad - (-(E / r).ln().ln())).abs() < 1e-9);
        assert!((xi(0.01) - (2f64.ln() - (2.0 + 100f64.ln()).ln())).abs() < 1e-14);
        assert!(xi(1e-3) < xi(1e-2) && xi(1e-2) < 0.0);
    }
}
