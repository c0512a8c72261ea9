use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::Result;
use crate::mesh::{ElemField, Mesh, NodalField};
use crate::nfunc::Exponent;
use crate::solver::DirichletProblem;

/// Deterministic generator for a labelled sub-stream of a case seed.
pub fn case_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// `sum_k a_k sin(pi (k . x) + phase_k)` with integer wave vectors.
#[derive(Clone, Debug, PartialEq)]
pub struct TrigSeries {
    modes: Vec<([f64; 2], f64, f64)>,
}

impl TrigSeries {
    /// `count` modes with wave numbers in `0..=max_freq` and amplitudes decaying like `1/|k|`.
    pub fn random<R: Rng + ?Sized>(rng: &mut R, count: usize, max_freq: u32) -> Self {
        let modes = (0..count)
            .map(|_| {
                let k = loop {
                    let k = [rng.random_range(0..=max_freq) as f64, rng.random_range(0..=max_freq) as f64];
                    if k != [0.0, 0.0] {
                        break k;
                    }
                };
                let amp: f64 = rng.sample::<f64, _>(StandardNormal) / k[0].hypot(k[1]);
                (k, amp, rng.random_range(0.0..2.0 * PI))
            })
            .collect();
        Self { modes }
    }

    pub fn value(&self, x: [f64; 2]) -> f64 {
        self.modes
            .iter()
            .map(|(k, a, ph)| a * (PI * (k[0] * x[0] + k[1] * x[1]) + ph).sin())
            .sum()
    }
}

/// An `n x 2` flux whose entries are independent 8-mode trigonometric series.
pub fn smooth_flux<R: Rng + ?Sized>(mesh: &Mesh, n: usize, rng: &mut R) -> ElemField {
    let series: Vec<TrigSeries> = (0..2 * n).map(|_| TrigSeries::random(rng, 8, 3)).collect();
    ElemField::from_fn(mesh, n, 2, |x, t| {
        for (slot, s) in t.iter_mut().zip(&series) {
            *slot = s.value(x);
        }
    })
}

/// A low-order potential: three trigonometric modes plus a random quadratic.
pub fn smooth_potential<R: Rng + ?Sized>(mesh: &Mesh, n: usize, rng: &mut R) -> NodalField {
    let parts: Vec<(TrigSeries, [f64; 5])> = (0..n)
        .map(|_| {
            let poly = std::array::from_fn(|_| rng.sample::<f64, _>(StandardNormal) * 0.5);
            (TrigSeries::random(rng, 3, 2), poly)
        })
        .collect();
    NodalField::interpolate(mesh, n, |x, out| {
        for (o, (s, c)) in out.iter_mut().zip(&parts) {
            *o = s.value(x) + c[0] * x[0] + c[1] * x[1] + c[2] * x[0] * x[0] + c[3] * x[0] * x[1] + c[4] * x[1] * x[1];
        }
    })
}

/// Boundary data that is piecewise linear in arc length with `knots` random values
/// around the perimeter; interior nodes are zero.
pub fn rough_trace<R: Rng + ?Sized>(mesh: &Mesh, n: usize, knots: usize, rng: &mut R) -> NodalField {
    let b = mesh.bounds();
    let perimeter = 2.0 * (b.width() + b.height());
    let values: Vec<Vec<f64>> = (0..n).map(|_| (0..knots).map(|_| rng.random_range(-1.0..1.0)).collect()).collect();
    let arc = |x: [f64; 2]| {
        let (w, h) = (b.width(), b.height());
        let (dx, dy) = (x[0] - b.x0, x[1] - b.y0);
        if dy.abs() < 1e-12 * h {
            dx
        } else if (dx - w).abs() < 1e-12 * w {
            w + dy
        } else if (dy - h).abs() < 1e-12 * h {
            w + h + (w - dx)
        } else {
            2.0 * w + h + (h - dy)
        }
    };
    let mut g = NodalField::zeros(mesh, n);
    for node in mesh.boundary_nodes() {
        let t = arc(mesh.node(node)) / perimeter * knots as f64;
        let k = (t.floor() as usize).min(knots - 1);
        let frac = t - k as f64;
        for (c, v) in values.iter().enumerate() {
            g.values_mut()[node * n + c] = (1.0 - frac) * v[k] + frac * v[(k + 1) % knots];
        }
    }
    g
}

/// The two problem kinds of the basic estimate runs.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FluxKind {
    /// `F = A(Dw)` and `g = w` for a smooth potential `w`.
    Manufactured,
    /// Random smooth `F` and zero boundary data.
    Smooth,
}

impl FluxKind {
    pub fn for_seed(seed: u64) -> Self {
        if seed % 2 == 0 {
            Self::Manufactured
        } else {
            Self::Smooth
        }
    }
}

/// A seeded problem on `mesh`; the same seed gives the same continuum data on every mesh.
pub fn problem(p: Exponent, mesh: &Mesh, n: usize, seed: u64, kind: FluxKind) -> Result<DirichletProblem> {
    let mut rng = case_rng(seed, 1);
    match kind {
        FluxKind::Manufactured => DirichletProblem::a_manufactured(p, mesh.clone(), smooth_potential(mesh, n, &mut rng)),
        FluxKind::Smooth => {
            let f = smooth_flux(mesh, n, &mut rng);
            DirichletProblem::new(p, mesh.clone(), f, NodalField::zeros(mesh, n))
        }
    }
}

/// Points of a `k x k` lattice filling the square of half-width `half` around the center.
pub fn sample_points(mesh: &Mesh, k: usize, half: f64) -> Vec<[f64; 2]> {
    let b = mesh.bounds();
    let c = [0.5 * (b.x0 + b.x1), 0.5 * (b.y0 + b.y1)];
    let step = if k > 1 { 2.0 * half / (k - 1) as f64 } else { 0.0 };
    let mut out = Vec::with_capacity(k * k);
    for j in 0..k {
        for i in 0..k {
            let off = if k > 1 { half } else { 0.0 };
            out.push([c[0] - off + i as f64 * step, c[1] - off + j as f64 * step]);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_continuum_data() {
        let coarse = Mesh::unit_square(4).unwrap();
        let fine = coarse.refined();
        let p = Exponent::new(2.0).unwrap();
        let a = problem(p, &coarse, 1, 3, FluxKind::Smooth).unwrap();
        let b = problem(p, &fine, 1, 3, FluxKind::Smooth).unwrap();
        let x = coarse.barycenter(0);
        let e = fine.locate(x).unwrap();
        let s = TrigSeries::random(&mut case_rng(3, 1), 8, 3);
        assert!((a.f.at(0)[0] - s.value(x)).abs() < 1e-14);
        assert!(b.f.at(e)[0].is_finite());
    }

    #[test]
    fn rough_trace_is_continuous_around_the_corner() {
        let mesh = Mesh::unit_square(16).unwrap();
        let g = rough_trace(&mesh, 1, 8, &mut case_rng(1, 2));
        let corner = mesh.node_index(0, 0);
        let next = mesh.node_index(0, 1);
        assert!((g.at(corner)[0] - g.at(next)[0]).abs() < 0.6);
        assert_eq!(g.at(mesh.node_index(5, 5))[0], 0.0);
    }

    #[test]
    fn lattice_is_centered() {
        let mesh = Mesh::unit_square(8).unwrap();
        let pts = sample_points(&mesh, 3, 0.25);
        assert_eq!(pts[0], [0.25, 0.25]);
        assert_eq!(pts[4], [0.5, 0.5]);
        assert_eq!(sample_points(&mesh, 1, 0.25), vec![[0.5, 0.5]]);
    }
}
