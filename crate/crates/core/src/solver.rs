//! Dirichlet problems for the p-Laplace system and their Kacanov solver.
//!
//! The discrete problem minimizes `J(u) = sum_e |e| ((1/p)|Du|^p - F : Du)` over P1
//! fields with prescribed boundary values. Each Kacanov step freezes the coefficient
//! `k = (eps^2 + |Du|^2)^{(p-2)/2}`, solves the linear system with that coefficient for a
//! search direction, and moves along it by an exact line search on the regularized
//! energy. A step that would raise the energy is halved until it does not.

use crate::error::{Error, Result};
use crate::mesh::{self, ElemField, Mesh, NodalField};
use crate::nfunc::{self, Exponent};

#[derive(Clone, Debug)]
pub struct DirichletProblem {
    pub p: Exponent,
    pub mesh: Mesh,
    /// Right-hand side `F`, an `N x 2` tensor per element.
    pub f: ElemField,
    /// Boundary data; only its values on boundary nodes are used.
    pub g: NodalField,
}

impl DirichletProblem {
    pub fn new(p: Exponent, mesh: Mesh, f: ElemField, g: NodalField) -> Result<Self> {
        if f.cols() != 2 || f.len() != mesh.element_count() {
            return Err(Error::ShapeMismatch(format!(
                "F must hold one N x 2 tensor per element, got {}x{} on {} elements",
                f.rows(),
                f.cols(),
                f.len()
            )));
        }
        if g.components() != f.rows() || g.values().len() != g.components() * mesh.node_count() {
            return Err(Error::ShapeMismatch(format!(
                "boundary data has {} components, F has {} rows",
                g.components(),
                f.rows()
            )));
        }
        Ok(Self { p, mesh, f, g })
    }

    /// The problem with `F = A(Dw)` and `g = w`, whose discrete solution is `w` itself.
    pub fn a_manufactured(p: Exponent, mesh: Mesh, w: NodalField) -> Result<Self> {
        let mut f = mesh::gradient(&mesh, &w)?;
        f.map_in_place(|t| nfunc::a_map_in_place(p.p(), t));
        Self::new(p, mesh, f, w)
    }

    /// The p-harmonic problem `F = 0` with boundary data `g`.
    pub fn harmonic(p: Exponent, mesh: Mesh, g: NodalField) -> Result<Self> {
        let f = ElemField::zeros(&mesh, g.components(), 2);
        Self::new(p, mesh, f, g)
    }

    #[inline]
    pub fn components(&self) -> usize {
        self.g.components()
    }

    /// `max(max|F|^{1/(p-1)}, osc(g) / diam)`, falling back to 1 for trivial data.
    pub fn data_scale(&self) -> f64 {
        let p = self.p.p();
        let f_max = self.f.norms().into_iter().fold(0.0, f64::max);
        let n = self.components();
        let mut osc: f64 = 0.0;
        for c in 0..n {
            let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
            for node in self.mesh.boundary_nodes() {
                let v = self.g.at(node)[c];
                lo = lo.min(v);
                hi = hi.max(v);
            }
            osc = osc.max(hi - lo);
        }
        let scale = nfunc::guarded_pow(f_max, 1.0 / (p - 1.0)).max(osc / self.mesh.bounds().diameter());
        if scale > 0.0 && scale.is_finite() {
            scale
        } else {
            1.0
        }
    }

    /// `1 + ||F||_1`, the normalization of the residual.
    fn residual_normalization(&self) -> f64 {
        let norms = self.f.norms();
        1.0 + mesh::integrate(&self.mesh, &norms).unwrap_or(0.0)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolverConfig {
    /// Gradient regularization; `None` selects `1e-8` times the data scale.
    pub eps_reg: Option<f64>,
    /// Relative energy decrease below which a non-improving run counts as stagnating.
    pub tol_energy: f64,
    pub tol_residual: f64,
    pub max_iter: usize,
    /// Coefficient bounds; `None` selects `[1e-10, 1e10]` times `scale^{p-2}`.
    pub coeff_clamp: Option<(f64, f64)>,
    pub cg_tol: f64,
    pub cg_max_iter: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            eps_reg: None,
            tol_energy: 1e-14,
            tol_residual: 1e-10,
            max_iter: 300,
            coeff_clamp: None,
            cg_tol: 1e-10,
            cg_max_iter: 50_000,
        }
    }
}

impl SolverConfig {
    fn validate(&self) -> Result<()> {
        let positive = self.tol_energy > 0.0 && self.tol_residual > 0.0 && self.cg_tol > 0.0;
        let eps_ok = self.eps_reg.is_none_or(|e| e >= 0.0 && e.is_finite());
        let clamp_ok = self.coeff_clamp.is_none_or(|(lo, hi)| 0.0 < lo && lo <= hi);
        if positive && eps_ok && clamp_ok && self.max_iter > 0 && self.cg_max_iter > 0 {
            Ok(())
        } else {
            Err(Error::InvalidArgument(format!("invalid solver configuration {self:?}")))
        }
    }
}

#[derive(Clone, Debug)]
pub struct Solution {
    pub u: NodalField,
    pub iterations: usize,
    /// Regularized energy of the initial guess and of every accepted iterate.
    pub energy_trace: Vec<f64>,
    pub residual: f64,
}

/// `sum_e |e| ((1/p)|Du|^p - F : Du)`.
pub fn energy(prob: &DirichletProblem, u: &NodalField) -> Result<f64> {
    let grad = mesh::gradient(&prob.mesh, u)?;
    check_components(prob, u)?;
    Ok(regularized_energy(prob, &grad, 0.0))
}

fn regularized_energy(prob: &DirichletProblem, grad: &ElemField, eps: f64) -> f64 {
    let p = prob.p.p();
    let eps_p = nfunc::guarded_pow(eps, p);
    let mut total = 0.0;
    for e in 0..grad.len() {
        let g = grad.at(e);
        let s: f64 = eps * eps + g.iter().map(|v| v * v).sum::<f64>();
        let fg: f64 = g.iter().zip(prob.f.at(e)).map(|(a, b)| a * b).sum();
        total += prob.mesh.element_area(e) * ((mesh::pow_half(s, p) - eps_p) / p - fg);
    }
    total
}

fn check_components(prob: &DirichletProblem, u: &NodalField) -> Result<()> {
    if u.components() != prob.components() {
        return Err(Error::ShapeMismatch(format!(
            "field has {} components, problem has {}",
            u.components(),
            prob.components()
        )));
    }
    Ok(())
}

/// Per node and component, `|int A(Du) . D(phi) - int F . D(phi)|` for the hat function
/// `phi` of that node; boundary nodes are reported as 0.
pub fn nodal_residuals(prob: &DirichletProblem, u: &NodalField) -> Result<Vec<f64>> {
    check_components(prob, u)?;
    let mut flux = mesh::gradient(&prob.mesh, u)?;
    let p = prob.p.p();
    flux.map_in_place(|t| nfunc::a_map_in_place(p, t));
    let mut r = weak_form_load(prob, &flux);
    mask_boundary(&prob.mesh, prob.components(), &mut r);
    r.iter_mut().for_each(|v| *v = v.abs());
    Ok(r)
}

/// `max |int A(Du) . D(phi) - int F . D(phi)| / (1 + ||F||_1)` over interior hat functions.
pub fn residual(prob: &DirichletProblem, u: &NodalField) -> Result<f64> {
    let r = nodal_residuals(prob, u)?;
    Ok(r.into_iter().fold(0.0, f64::max) / prob.residual_normalization())
}

/// `int (flux - F) . D(phi_a)` for every node `a` and component.
fn weak_form_load(prob: &DirichletProblem, flux: &ElemField) -> Vec<f64> {
    let n = prob.components();
    let mesh = &prob.mesh;
    let mut out = vec![0.0; n * mesh.node_count()];
    for e in 0..mesh.element_count() {
        let area = mesh.element_area(e);
        let grads = mesh.hat_gradients(e);
        let (fl, f) = (flux.at(e), prob.f.at(e));
        for (k, &node) in mesh.element(e).iter().enumerate() {
            for c in 0..n {
                let dx = fl[2 * c] - f[2 * c];
                let dy = fl[2 * c + 1] - f[2 * c + 1];
                out[node * n + c] += area * (dx * grads[k][0] + dy * grads[k][1]);
            }
        }
    }
    out
}

fn mask_boundary(mesh: &Mesh, n: usize, v: &mut [f64]) {
    for node in mesh.boundary_nodes() {
        v[node * n..(node + 1) * n].iter_mut().for_each(|x| *x = 0.0);
    }
}

/// The scalar stiffness pattern shared by every component.
struct Stiffness {
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    /// For each element, CSR positions of its 3 x 3 local block.
    elem_pos: Vec<[usize; 9]>,
    diag_pos: Vec<usize>,
    boundary: Vec<bool>,
}

impl Stiffness {
    fn new(mesh: &Mesh) -> Self {
        let nn = mesh.node_count();
        let mut neighbours = vec![Vec::with_capacity(7); nn];
        for e in 0..mesh.element_count() {
            let nodes = mesh.element(e);
            for &a in &nodes {
                neighbours[a].extend_from_slice(&nodes);
            }
        }
        let mut row_ptr = Vec::with_capacity(nn + 1);
        let mut cols = Vec::new();
        row_ptr.push(0);
        for list in &mut neighbours {
            list.sort_unstable();
            list.dedup();
            cols.extend_from_slice(list);
            row_ptr.push(cols.len());
        }
        let find = |a: usize, b: usize| row_ptr[a] + cols[row_ptr[a]..row_ptr[a + 1]].binary_search(&b).unwrap();
        let elem_pos = (0..mesh.element_count())
            .map(|e| {
                let nodes = mesh.element(e);
                let mut pos = [0; 9];
                for i in 0..3 {
                    for j in 0..3 {
                        pos[3 * i + j] = find(nodes[i], nodes[j]);
                    }
                }
                pos
            })
            .collect();
        let diag_pos = (0..nn).map(|a| find(a, a)).collect();
        let boundary = (0..nn).map(|a| mesh.is_boundary(a)).collect();
        Self {
            row_ptr,
            cols,
            elem_pos,
            diag_pos,
            boundary,
        }
    }

    fn assemble(&self, mesh: &Mesh, coeff: &[f64]) -> Vec<f64> {
        let mut values = vec![0.0; self.cols.len()];
        for (e, pos) in self.elem_pos.iter().enumerate() {
            let grads = mesh.hat_gradients(e);
            let w = coeff[e] * mesh.element_area(e);
            for i in 0..3 {
                for j in 0..3 {
                    values[pos[3 * i + j]] += w * (grads[i][0] * grads[j][0] + grads[i][1] * grads[j][1]);
                }
            }
        }
        values
    }

    /// `y = K x` restricted to interior rows; `x` must vanish on the boundary.
    fn apply(&self, values: &[f64], x: &[f64], y: &mut [f64]) {
        for (a, out) in y.iter_mut().enumerate() {
            *out = if self.boundary[a] {
                0.0
            } else {
                (self.row_ptr[a]..self.row_ptr[a + 1])
                    .map(|k| values[k] * x[self.cols[k]])
                    .sum()
            };
        }
    }

    /// Jacobi-preconditioned conjugate gradients on the interior unknowns.
    fn solve(&self, values: &[f64], rhs: &[f64], tol: f64, max_iter: usize) -> Result<Vec<f64>> {
        let n = rhs.len();
        let inv_diag: Vec<f64> = (0..n)
            .map(|a| if self.boundary[a] { 0.0 } else { 1.0 / values[self.diag_pos[a]] })
            .collect();
        let mut x = vec![0.0; n];
        let mut r: Vec<f64> = rhs
            .iter()
            .zip(&self.boundary)
            .map(|(&v, &b)| if b { 0.0 } else { v })
            .collect();
        let b_norm = dot(&r, &r).sqrt();
        if b_norm == 0.0 {
            return Ok(x);
        }
        let mut z: Vec<f64> = r.iter().zip(&inv_diag).map(|(a, d)| a * d).collect();
        let mut dir = z.clone();
        let mut rz = dot(&r, &z);
        let mut q = vec![0.0; n];
        for _ in 0..max_iter {
            self.apply(values, &dir, &mut q);
            let alpha = rz / dot(&dir, &q);
            x.iter_mut().zip(&dir).for_each(|(xi, di)| *xi += alpha * di);
            r.iter_mut().zip(&q).for_each(|(ri, qi)| *ri -= alpha * qi);
            if dot(&r, &r).sqrt() <= tol * b_norm {
                return Ok(x);
            }
            z.iter_mut()
                .zip(r.iter().zip(&inv_diag))
                .for_each(|(zi, (ri, di))| *zi = ri * di);
            let rz_new = dot(&r, &z);
            let beta = rz_new / rz;
            rz = rz_new;
            dir.iter_mut().zip(&z).for_each(|(di, zi)| *di = zi + beta * *di);
        }
        Err(Error::LinearSolve {
            iterations: max_iter,
            relative: dot(&r, &r).sqrt() / b_norm,
        })
    }
}

#[inline]
fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Per-element scalars that make the energy along `u + t d` a one-dimensional function.
struct Line {
    area: Vec<f64>,
    gg: Vec<f64>,
    gd: Vec<f64>,
    dd: Vec<f64>,
    fd: Vec<f64>,
    p: f64,
    eps2: f64,
}

impl Line {
    fn new(prob: &DirichletProblem, grad: &ElemField, dgrad: &ElemField, eps: f64) -> Self {
        let ne = grad.len();
        let mut line = Self {
            area: Vec::with_capacity(ne),
            gg: Vec::with_capacity(ne),
            gd: Vec::with_capacity(ne),
            dd: Vec::with_capacity(ne),
            fd: Vec::with_capacity(ne),
            p: prob.p.p(),
            eps2: eps * eps,
        };
        for e in 0..ne {
            let (g, d, f) = (grad.at(e), dgrad.at(e), prob.f.at(e));
            line.area.push(prob.mesh.element_area(e));
            line.gg.push(dot(g, g));
            line.gd.push(dot(g, d));
            line.dd.push(dot(d, d));
            line.fd.push(dot(f, d));
        }
        line
    }

    /// Derivative of the regularized energy at step `t`.
    fn slope(&self, t: f64) -> f64 {
        (0..self.area.len())
            .map(|e| {
                let s = self.eps2 + self.gg[e] + t * (2.0 * self.gd[e] + t * self.dd[e]);
                let k = mesh::pow_half(s, self.p - 2.0);
                self.area[e] * (k * (self.gd[e] + t * self.dd[e]) - self.fd[e])
            })
            .sum()
    }

    /// `J(u + t d) - J(u)`, summed element by element without cancellation of the totals.
    fn energy_change(&self, t: f64) -> f64 {
        let half_p = 0.5 * self.p;
        (0..self.area.len())
            .map(|e| {
                let s0 = self.eps2 + self.gg[e];
                let ds = t * (2.0 * self.gd[e] + t * self.dd[e]);
                let power_change = if s0 > 0.0 {
                    mesh::pow_half(s0, self.p) * (half_p * (ds / s0).ln_1p()).exp_m1()
                } else {
                    mesh::pow_half(ds, self.p)
                };
                self.area[e] * (power_change / self.p - t * self.fd[e])
            })
            .sum()
    }

    /// Minimizer of the convex energy along the line, bracketed in `(0, 256]`.
    fn minimizer(&self) -> Option<f64> {
        if !(self.slope(0.0) < 0.0) {
            return None;
        }
        let (mut lo, mut hi) = (0.0, 1.0);
        while self.slope(hi) < 0.0 && hi < 256.0 {
            lo = hi;
            hi *= 2.0;
        }
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if self.slope(mid) < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo <= 1e-9 * hi {
                break;
            }
        }
        Some(0.5 * (lo + hi))
    }
}

/// Solves the problem starting from the linear (`p = 2`) solution.
pub fn solve(prob: &DirichletProblem, cfg: &SolverConfig) -> Result<Solution> {
    cfg.validate()?;
    let stiffness = Stiffness::new(&prob.mesh);
    let start = lift_boundary(prob, &NodalField::zeros(&prob.mesh, prob.components()));
    let ones = vec![1.0; prob.mesh.element_count()];
    let values = stiffness.assemble(&prob.mesh, &ones);
    let grad = mesh::gradient(&prob.mesh, &start)?;
    let mut r = weak_form_load(prob, &grad);
    r.iter_mut().for_each(|v| *v = -*v);
    let d = solve_components(&stiffness, &values, &r, prob.components(), cfg)?;
    let mut u = start;
    u.values_mut().iter_mut().zip(&d).for_each(|(a, b)| *a += b);
    kacanov(prob, cfg, &stiffness, u)
}

/// Solves the problem from a given initial guess, whose boundary values are replaced by `g`.
pub fn solve_from(prob: &DirichletProblem, cfg: &SolverConfig, initial: &NodalField) -> Result<Solution> {
    cfg.validate()?;
    check_components(prob, initial)?;
    let stiffness = Stiffness::new(&prob.mesh);
    kacanov(prob, cfg, &stiffness, lift_boundary(prob, initial))
}

/// The p-harmonic problem with boundary values `g`.
pub fn solve_pharmonic(mesh: &Mesh, p: Exponent, g: &NodalField, cfg: &SolverConfig) -> Result<Solution> {
    solve(&DirichletProblem::harmonic(p, mesh.clone(), g.clone())?, cfg)
}

fn lift_boundary(prob: &DirichletProblem, interior: &NodalField) -> NodalField {
    let n = prob.components();
    let mut u = interior.clone();
    for node in prob.mesh.boundary_nodes() {
        u.values_mut()[node * n..(node + 1) * n].copy_from_slice(prob.g.at(node));
    }
    u
}

fn solve_components(stiffness: &Stiffness, values: &[f64], rhs: &[f64], n: usize, cfg: &SolverConfig) -> Result<Vec<f64>> {
    let nn = rhs.len() / n;
    let mut out = vec![0.0; rhs.len()];
    for c in 0..n {
        let b: Vec<f64> = (0..nn).map(|a| rhs[a * n + c]).collect();
        let x = stiffness.solve(values, &b, cfg.cg_tol, cfg.cg_max_iter)?;
        for a in 0..nn {
            out[a * n + c] = x[a];
        }
    }
    Ok(out)
}

fn kacanov(prob: &DirichletProblem, cfg: &SolverConfig, stiffness: &Stiffness, mut u: NodalField) -> Result<Solution> {
    let p = prob.p.p();
    let n = prob.components();
    let scale = prob.data_scale();
    let eps = cfg.eps_reg.unwrap_or(1e-8 * scale);
    let (k_min, k_max) = cfg
        .coeff_clamp
        .unwrap_or_else(|| (1e-10 * scale.powf(p - 2.0), 1e10 * scale.powf(p - 2.0)));
    let mut grad = mesh::gradient(&prob.mesh, &u)?;
    let mut current = regularized_energy(prob, &grad, eps);
    let mut trace = vec![current];
    let mut res = residual(prob, &u)?;
    let mut best = res;
    let mut stalled = 0;
    let mut iterations = 0;
    while res > cfg.tol_residual {
        if iterations == cfg.max_iter || stalled >= 20 {
            return Err(Error::NonConvergence {
                iterations,
                residual: res,
                energy_trace: trace,
            });
        }
        iterations += 1;
        let mut flux = grad.clone();
        let mut coeff = Vec::with_capacity(grad.len());
        flux.map_in_place(|t| {
            let k = mesh::pow_half(eps * eps + dot(t, t), p - 2.0);
            t.iter_mut().for_each(|v| *v *= k);
            coeff.push(k.clamp(k_min, k_max));
        });
        let mut rhs = weak_form_load(prob, &flux);
        rhs.iter_mut().for_each(|v| *v = -*v);
        let values = stiffness.assemble(&prob.mesh, &coeff);
        let d = solve_components(stiffness, &values, &rhs, n, cfg)?;
        let d_field = NodalField::from_values(&prob.mesh, n, d)?;
        let dgrad = mesh::gradient(&prob.mesh, &d_field)?;
        let line = Line::new(prob, &grad, &dgrad, eps);
        let mut accepted = None;
        if let Some(mut t) = line.minimizer() {
            for _ in 0..=30 {
                let change = line.energy_change(t);
                if change <= 0.0 {
                    accepted = Some((t, change));
                    break;
                }
                t *= 0.5;
            }
        }
        let Some((t, change)) = accepted else {
            return Err(Error::NonConvergence {
                iterations,
                residual: res,
                energy_trace: trace,
            });
        };
        u.values_mut()
            .iter_mut()
            .zip(d_field.values())
            .for_each(|(a, b)| *a += t * b);
        grad = mesh::gradient(&prob.mesh, &u)?;
        current += change;
        trace.push(current);
        res = residual(prob, &u)?;
        if res < 0.99 * best {
            best = res;
            stalled = 0;
        } else if -change <= cfg.tol_energy * (1.0 + current.abs()) {
            stalled += 1;
        }
    }
    Ok(Solution {
        u,
        iterations,
        energy_trace: trace,
        residual: res,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::Rect;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn ex(p: f64) -> Exponent {
        Exponent::new(p).unwrap()
    }

    fn tight() -> SolverConfig {
        SolverConfig {
            tol_residual: 1e-11,
            cg_tol: 1e-12,
            ..SolverConfig::default()
        }
    }

    fn smooth_w(mesh: &Mesh) -> NodalField {
        NodalField::interpolate(mesh, 1, |x, o| {
            o[0] = (PI * x[0]).sin() * (PI * x[1]).cos() + 0.5 * x[0] * x[0] + x[1]
        })
    }

    fn nonincreasing(trace: &[f64]) -> bool {
        trace.windows(2).all(|w| w[1] <= w[0])
    }

    #[test]
    fn energy_hand_values() {
        let mesh = Mesh::unit_square(4).unwrap();
        let g = NodalField::zeros(&mesh, 2);
        let f = ElemField::from_fn(&mesh, 2, 2, |x, t| t.copy_from_slice(&[x[0], 1.0, -2.0, x[1]]));
        let prob = DirichletProblem::new(ex(3.0), mesh.clone(), f, g.clone()).unwrap();
        assert_eq!(energy(&prob, &g).unwrap(), 0.0);
        let affine = NodalField::interpolate(&mesh, 1, |x, o| o[0] = 3.0 * x[0] - 4.0 * x[1]);
        let lin = DirichletProblem::harmonic(ex(2.0), mesh, affine.clone()).unwrap();
        assert!((energy(&lin, &affine).unwrap() - 12.5).abs() < 1e-12);
    }

    #[test]
    fn linear_solve_satisfies_galerkin_orthogonality() {
        let mesh = Mesh::unit_square(16).unwrap();
        let f = ElemField::from_fn(&mesh, 1, 2, |x, t| t.copy_from_slice(&[x[1].sin(), x[0] * x[0]]));
        let g = NodalField::interpolate(&mesh, 1, |x, o| o[0] = x[0] - x[1]);
        let prob = DirichletProblem::new(ex(2.0), mesh, f, g).unwrap();
        let cfg = SolverConfig::default();
        let sol = solve(&prob, &cfg).unwrap();
        assert!(sol.residual <= 10.0 * cfg.cg_tol);
        assert_eq!(sol.iterations, 0);
    }

    #[test]
    fn a_manufactured_interpolant_is_exact() {
        for &p in &[1.5, 3.0] {
            let mesh = Mesh::unit_square(12).unwrap();
            let w = smooth_w(&mesh);
            let prob = DirichletProblem::a_manufactured(ex(p), mesh, w.clone()).unwrap();
            assert!(residual(&prob, &w).unwrap() < 1e-10);
            let perturbed = NodalField::interpolate(&prob.mesh, 1, |x, o| o[0] = 0.01 * x[0] * x[1]);
            let bad = NodalField::from_values(
                &prob.mesh,
                1,
                w.values().iter().zip(perturbed.values()).map(|(a, b)| a + b).collect(),
            )
            .unwrap();
            assert!(residual(&prob, &bad).unwrap() > 1e-6);
        }
    }

    #[test]
    fn solves_a_manufactured_problems() {
        for &p in &[1.5, 3.0] {
            let mesh = Mesh::unit_square(16).unwrap();
            let w = smooth_w(&mesh);
            let prob = DirichletProblem::a_manufactured(ex(p), mesh, w.clone()).unwrap();
            let sol = solve(&prob, &tight()).unwrap();
            assert!(sol.residual <= 1e-11);
            assert!(nonincreasing(&sol.energy_trace), "{:?}", sol.energy_trace);
            let err = sol
                .u
                .values()
                .iter()
                .zip(w.values())
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            assert!(err < 1e-7, "p = {p}: max nodal error {err}");
        }
    }

    #[test]
    fn affine_boundary_data_gives_affine_solution() {
        for &p in &[1.5, 2.0, 3.0, 4.5] {
            let mesh = Mesh::new(Rect::new(-1.0, 1.0, 0.0, 2.0).unwrap(), 8).unwrap();
            let g = NodalField::interpolate(&mesh, 2, |x, o| {
                o[0] = 1.0 + 2.0 * x[0] - x[1];
                o[1] = 0.5 * x[1];
            });
            let cfg = SolverConfig::default();
            let sol = solve_pharmonic(&mesh, ex(p), &g, &cfg).unwrap();
            for (a, b) in sol.u.values().iter().zip(g.values()) {
                assert!((a - b).abs() <= 10.0 * cfg.cg_tol * 3.0);
            }
        }
    }

    #[test]
    fn boundary_values_exact_and_maximum_principle() {
        let mesh = Mesh::unit_square(16).unwrap();
        let g = NodalField::interpolate(&mesh, 1, |x, o| o[0] = (5.0 * x[0]).sin() * (3.0 * x[1]).cos());
        let sol = solve_pharmonic(&mesh, ex(3.0), &g, &SolverConfig::default()).unwrap();
        let boundary = mesh.boundary_nodes();
        let lo = boundary.iter().map(|&n| g.at(n)[0]).fold(f64::INFINITY, f64::min);
        let hi = boundary.iter().map(|&n| g.at(n)[0]).fold(f64::NEG_INFINITY, f64::max);
        for &n in &boundary {
            assert_eq!(sol.u.at(n), g.at(n));
        }
        for v in sol.u.values() {
            assert!(*v >= lo - 1e-9 && *v <= hi + 1e-9);
        }
    }

    #[test]
    fn solution_minimizes_energy() {
        let mesh = Mesh::unit_square(8).unwrap();
        let f = ElemField::from_fn(&mesh, 1, 2, |x, t| t.copy_from_slice(&[(3.0 * x[1]).cos(), x[0]]));
        let g = NodalField::interpolate(&mesh, 1, |x, o| o[0] = x[0] * x[1]);
        let prob = DirichletProblem::new(ex(1.5), mesh.clone(), f, g).unwrap();
        let sol = solve(&prob, &tight()).unwrap();
        let best = energy(&prob, &sol.u).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..100 {
            let amp = 10f64.powf(rng.random_range(-4.0..0.0));
            let mut trial = sol.u.clone();
            for (node, v) in trial.values_mut().iter_mut().enumerate() {
                if !mesh.is_boundary(node) {
                    *v += amp * rng.random_range(-1.0..1.0);
                }
            }
            assert!(energy(&prob, &trial).unwrap() >= best);
        }
    }

    #[test]
    fn different_initial_guesses_agree() {
        let mesh = Mesh::unit_square(12).unwrap();
        let f = ElemField::from_fn(&mesh, 1, 2, |x, t| t.copy_from_slice(&[(2.0 * x[1]).sin(), x[0] - 0.5]));
        let g = NodalField::interpolate(&mesh, 1, |x, o| o[0] = x[0]);
        let p = 3.0;
        let prob = DirichletProblem::new(ex(p), mesh.clone(), f, g).unwrap();
        let cfg = tight();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let mut solutions = Vec::new();
        for _ in 0..2 {
            let init = NodalField::from_values(
                &mesh,
                1,
                (0..mesh.node_count()).map(|_| rng.random_range(-1.0..1.0)).collect(),
            )
            .unwrap();
            solutions.push(solve_from(&prob, &cfg, &init).unwrap());
        }
        let g1 = mesh::gradient(&mesh, &solutions[0].u).unwrap();
        let g2 = mesh::gradient(&mesh, &solutions[1].u).unwrap();
        let diff: Vec<f64> = g1.sub(&g2).unwrap().norms().iter().map(|v| v.powf(p)).collect();
        let lp = mesh::integrate(&mesh, &diff).unwrap().powf(1.0 / p);
        let bound = 10.0 * cfg.tol_residual.powf(1.0 / (p - 1.0)) * prob.data_scale();
        assert!(lp <= bound, "{lp} > {bound}");
    }

    #[test]
    fn discrete_homogeneity() {
        let p = 1.5;
        let lambda: f64 = 3.0;
        let mesh = Mesh::unit_square(10).unwrap();
        let f = ElemField::from_fn(&mesh, 1, 2, |x, t| t.copy_from_slice(&[x[1] * x[1], -(x[0]).cos()]));
        let g = NodalField::interpolate(&mesh, 1, |x, o| o[0] = x[0] * x[1]);
        let base = DirichletProblem::new(ex(p), mesh.clone(), f.clone(), g.clone()).unwrap();
        let mu = lambda.powf(1.0 / (p - 1.0));
        let scaled = DirichletProblem::new(ex(p), mesh, f.scale(lambda), g.scale(mu)).unwrap();
        let a = solve(&base, &tight()).unwrap();
        let b = solve(&scaled, &tight()).unwrap();
        for (x, y) in a.u.values().iter().zip(b.u.values()) {
            assert!((mu * x - y).abs() <= 1e-7 * mu);
        }
    }

    #[test]
    fn rejects_mismatched_data() {
        let mesh = Mesh::unit_square(4).unwrap();
        let f = ElemField::zeros(&mesh, 2, 2);
        let g = NodalField::zeros(&mesh, 1);
        assert!(DirichletProblem::new(ex(2.0), mesh, f, g).is_err());
    }
}
